#include "tstok/errors.hpp"

namespace tstok {

const char* errc_name(errc c) {
    switch (c) {
        case errc::non_finite_input: return "NonFiniteInput";
        case errc::shape_mismatch: return "ShapeMismatch";
        case errc::spec_invalid: return "SpecInvalid";
        case errc::ragged_channels: return "RaggedChannels";
        case errc::unknown_token: return "UnknownToken";
        case errc::missing_terminator: return "MissingTerminator";
        case errc::overflow: return "Overflow";
        case errc::parse_error: return "ParseError";
        case errc::insufficient_data: return "InsufficientData";
        case errc::too_short: return "TooShort";
        case errc::invalid_range: return "InvalidRange";
        case errc::unknown_template: return "UnknownTemplate";
        case errc::missing_metadata: return "MissingMetadata";
        case errc::transport_error: return "TransportError";
        case errc::fixture_miss: return "FixtureMiss";
        case errc::uuid_mismatch: return "UUIDMismatch";
        case errc::missing_response: return "MissingResponse";
        case errc::all_replicates_unparseable: return "AllReplicatesUnparseable";
        case errc::corrupt_matrix: return "CorruptMatrix";
        case errc::bad_format: return "BadFormat";
        case errc::repeated_role: return "RepeatedRole";
        case errc::io_error: return "IoError";
    }
    return "Error";
}

} // namespace tstok
