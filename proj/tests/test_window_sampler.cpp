#include <map>
#include <set>

#include "doctest.h"
#include "tstok/errors.hpp"
#include "tstok/window_sampler.hpp"

using namespace tstok;

namespace {

TimeSeries flat_series(std::size_t length, std::size_t channels = 1) {
    std::vector<std::vector<double>> chans(channels);
    for (std::size_t c = 0; c < channels; ++c) {
        chans[c].resize(length);
        for (std::size_t t = 0; t < length; ++t) chans[c][t] = static_cast<double>(t + c * 1000);
    }
    return TimeSeries::from_channels(chans);
}

// brute-force start oracle: every index whose window fits
std::set<std::size_t> oracle_starts(std::size_t T, std::size_t W, std::size_t D) {
    std::set<std::size_t> starts;
    for (std::size_t j = 0; j * D + W <= T && j <= (T - W) / D; ++j) starts.insert(j * D);
    return starts;
}

WindowParams params_of(std::size_t W, std::size_t D, std::size_t m, std::size_t M, std::size_t e_max) {
    WindowParams p;
    p.window = W;
    p.stride = D;
    p.min_length = m;
    p.max_length = M;
    p.max_elements = e_max;
    p.seed = 42;
    return p;
}

} // namespace

TEST_CASE("starts are jD for j up to floor((T-W)/D)") {
    auto segments = sample_windows(flat_series(10), "src", params_of(4, 3, 4, 4, 64));
    REQUIRE(segments.size() == 3); // j = 0..floor(6/3)
    CHECK(segments[0].start == 0);
    CHECK(segments[1].start == 3);
    CHECK(segments[2].start == 6);
    for (const auto& seg : segments) {
        CHECK(seg.length == 4);
        CHECK(seg.values[0].size() == 4);
        CHECK(seg.values[0][0] == static_cast<double>(seg.start));
    }
}

TEST_CASE("a series exactly one window long yields one segment") {
    auto segments = sample_windows(flat_series(4), "src", params_of(4, 3, 4, 4, 64));
    REQUIRE(segments.size() == 1);
    CHECK(segments[0].start == 0);
}

TEST_CASE("element cap forces iterative channel reduction") {
    // 4 channels but E_max = 4 with w = 4 leaves room for exactly 1 channel
    auto segments = sample_windows(flat_series(10, 4), "src", params_of(4, 3, 4, 4, 4));
    REQUIRE(!segments.empty());
    for (const auto& seg : segments) {
        CHECK(seg.channels.size() == 1);
        CHECK(seg.length * seg.channels.size() <= 4);
    }
}

TEST_CASE("too-short input is rejected") {
    CHECK_THROWS_WITH_AS(sample_windows(flat_series(3), "src", params_of(4, 3, 1, 4, 64)),
                         doctest::Contains("TooShort"), Error);
}

TEST_CASE("start sets match brute force over a small grid") {
    for (std::size_t T = 1; T <= 50; ++T) {
        for (std::size_t W = 1; W <= T; ++W) {
            for (std::size_t D = 1; D <= 10; ++D) {
                auto params = params_of(W, D, 1, W, W * 4);
                auto segments = sample_windows(flat_series(T), "grid", params);
                std::set<std::size_t> got;
                for (const auto& seg : segments) got.insert(seg.start);
                CHECK(got == oracle_starts(T, W, D));
                CHECK(segments.size() == (T - W) / D + 1);
            }
        }
    }
}

TEST_CASE("segments respect bounds and the element cap") {
    WindowParams params = params_of(16, 5, 2, 12, 30);
    auto segments = sample_windows(flat_series(100, 5), "bounds", params);
    for (const auto& seg : segments) {
        CHECK(seg.start + seg.length <= 100);
        CHECK(seg.length * seg.channels.size() <= params.max_elements);
        CHECK(seg.length >= 1);
        CHECK(!seg.channels.empty());
        std::set<std::size_t> distinct(seg.channels.begin(), seg.channels.end());
        CHECK(distinct.size() == seg.channels.size());
        for (std::size_t c : seg.channels) CHECK(c < 5);
    }
}

TEST_CASE("same seed gives a byte-identical manifest") {
    WindowParams params = params_of(8, 4, 2, 8, 32);
    auto a = sample_windows(flat_series(64, 3), "det", params);
    auto b = sample_windows(flat_series(64, 3), "det", params);
    CHECK(segment_manifest(a) == segment_manifest(b));
    params.seed = 43;
    auto c = sample_windows(flat_series(64, 3), "det", params);
    CHECK(segment_manifest(a) != segment_manifest(c));
}

TEST_CASE("conversation length follows the clamped formula") {
    Rng rng(1);
    // pin the uniform draw by collapsing its range
    CHECK(conversation_length(100, 0.5, 0.5, rng) == 50);
    CHECK(conversation_length(100, 0.005, 0.005, rng) == 1); // max(1, floor(0.5))
    CHECK(conversation_length(100, 1.0, 1.0, rng) == 100);
    CHECK_THROWS_WITH_AS(conversation_length(100, 0.8, 0.2, rng), doctest::Contains("InvalidRange"), Error);
    for (int i = 0; i < 1000; ++i) {
        auto t = conversation_length(37, 0.0, 1.0, rng);
        CHECK(t >= 1);
        CHECK(t <= 37);
    }
}

TEST_CASE("channel count selection is uniform") {
    Rng rng(2);
    CHECK(select_channels(1, rng) == 1);
    std::map<std::size_t, int> counts;
    for (int i = 0; i < 10000; ++i) ++counts[select_channels(4, rng)];
    for (std::size_t c = 1; c <= 4; ++c) {
        CHECK(counts[c] > 2500 - 125); // within 5% of 2500
        CHECK(counts[c] < 2500 + 125);
    }
}

TEST_CASE("manifest lines carry the reproducibility fields") {
    auto segments = sample_windows(flat_series(10, 2), "manifest.tsk", params_of(4, 3, 2, 4, 8));
    auto line = segment_manifest_line(segments[0]);
    CHECK(line.find("\"source_id\":\"manifest.tsk\"") != std::string::npos);
    CHECK(line.find("\"rng\":\"splitmix64\"") != std::string::npos);
    CHECK(line.find("\"uuid\"") != std::string::npos);
    CHECK(is_valid_uuid(segments[0].uuid));
}
