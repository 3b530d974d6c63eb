try:
    # installed layout: the extension lives inside the package
    from ._tstok import *  # noqa: F401,F403
    from ._tstok import __version__  # noqa: F401
except ImportError:
    # build-tree layout: the extension sits next to the package on sys.path
    from _tstok import *  # noqa: F401,F403
    from _tstok import __version__  # noqa: F401
