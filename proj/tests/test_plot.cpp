#include "doctest.h"
#include "tstok/benchmark.hpp"
#include "tstok/plot.hpp"

using namespace tstok;

TEST_CASE("chart bytes form a PNG with the requested dimensions") {
    auto series = make_synthetic_corpus(1, 128, 2, 1)[0];
    auto png = render_line_chart(series, 320, 160);
    REQUIRE(png.size() > 57); // signature + IHDR + IDAT + IEND minimum
    CHECK(png.compare(0, 8, "\x89PNG\r\n\x1a\n", 8) == 0);
    // IHDR width/height are big-endian at offsets 16 and 20
    auto be32 = [&](std::size_t off) {
        return (static_cast<unsigned char>(png[off]) << 24) | (static_cast<unsigned char>(png[off + 1]) << 16) |
               (static_cast<unsigned char>(png[off + 2]) << 8) | static_cast<unsigned char>(png[off + 3]);
    };
    CHECK(be32(16) == 320);
    CHECK(be32(20) == 160);
    CHECK(png.substr(png.size() - 8, 4) == "IEND");
}

TEST_CASE("rendering is deterministic") {
    auto series = make_synthetic_corpus(1, 64, 1, 7)[0];
    CHECK(render_line_chart(series) == render_line_chart(series));
}

TEST_CASE("flat and single-point series still render") {
    CHECK_NOTHROW(render_line_chart(TimeSeries::from_channels({{5, 5, 5, 5}})));
    CHECK_NOTHROW(render_line_chart(TimeSeries::from_channels({{1}})));
}
