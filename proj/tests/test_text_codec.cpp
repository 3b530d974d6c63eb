#include <cmath>

#include "doctest.h"
#include "tstok/errors.hpp"
#include "tstok/rng.hpp"
#include "tstok/text_codec.hpp"

using namespace tstok;

TEST_CASE("digit rendering follows the scale-round-split rule") {
    CHECK(text_encode(TimeSeries::from_channels({{0.15, 1.2}}), TextCodecSpec{2}) == "1 5 , 1 2 0");
    CHECK(text_encode(TimeSeries::from_channels({{7}}), TextCodecSpec{0}) == "7");
    CHECK(text_encode(TimeSeries::from_channels({{-0.5}}), TextCodecSpec{1}) == "- 5");
}

TEST_CASE("small magnitudes are padded to the fixed precision") {
    // 0.05 at p=2 scales to 5 and pads to "0 5" so every value in [0,1)
    // renders at least two digit symbols
    CHECK(text_encode(TimeSeries::from_channels({{0.05}}), TextCodecSpec{2}) == "0 5");
    CHECK(text_encode(TimeSeries::from_channels({{0.0}}), TextCodecSpec{2}) == "0 0");
    CHECK(text_decode("0 5", TextCodecSpec{2}).at(0, 0) == doctest::Approx(0.05));
}

TEST_CASE("channels join with a semicolon symbol") {
    auto text = text_encode(TimeSeries::from_channels({{0.15}, {1.2}}), TextCodecSpec{2});
    CHECK(text == "1 5 ; 1 2 0");
    auto back = text_decode(text, TextCodecSpec{2});
    CHECK(back.channels() == 2);
    CHECK(back.at(0, 0) == doctest::Approx(0.15));
    CHECK(back.at(0, 1) == doctest::Approx(1.2));
}

TEST_CASE("decode inverts the examples") {
    auto series = text_decode("1 5 , 1 2 0", TextCodecSpec{2});
    CHECK(series.at(0, 0) == doctest::Approx(0.15));
    CHECK(series.at(1, 0) == doctest::Approx(1.20));
    CHECK(text_decode("7", TextCodecSpec{0}).at(0, 0) == 7.0);
}

TEST_CASE("malformed symbols raise a positioned parse error") {
    CHECK_THROWS_WITH_AS(text_decode("1 x 5", TextCodecSpec{0}), doctest::Contains("position 1"), Error);
    CHECK_THROWS_AS(text_decode("", TextCodecSpec{0}), Error);
    CHECK_THROWS_AS(text_decode("- - 5", TextCodecSpec{0}), Error);
    CHECK_THROWS_AS(text_decode("1 ,", TextCodecSpec{0}), Error);
}

TEST_CASE("overflow guard") {
    CHECK_THROWS_WITH_AS(text_encode(TimeSeries::from_channels({{1e14}}), TextCodecSpec{2}),
                         doctest::Contains("Overflow"), Error);
    CHECK_NOTHROW(text_encode(TimeSeries::from_channels({{1e12}}), TextCodecSpec{2}));
}

TEST_CASE("round trip is the identity up to p-decimal rounding") {
    Rng rng(5);
    for (std::uint32_t p : {0u, 1u, 2u, 4u}) {
        TextCodecSpec spec{p};
        double scale = std::pow(10.0, p);
        std::vector<double> values(200);
        for (auto& v : values) v = rng.uniform_real(-1000.0, 1000.0);
        auto series = TimeSeries::from_channels({values});
        auto back = text_decode(text_encode(series, spec), spec);
        for (std::size_t i = 0; i < values.size(); ++i) {
            double rounded = std::round(values[i] * scale) / scale;
            CHECK(back.at(i, 0) == doctest::Approx(rounded).epsilon(1e-12));
        }
    }
}

TEST_CASE("symbol counting is whitespace-delimited") {
    CHECK(text_symbol_count("1 5 , 1 2 0") == 6);
    CHECK(text_symbol_count("- 5") == 2);
    CHECK(text_symbol_count("") == 0);
}
