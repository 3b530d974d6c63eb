#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tstok/rng.hpp"
#include "tstok/series.hpp"

namespace tstok {

struct WindowParams {
    std::size_t window = 256;        // W
    std::size_t stride = 32;         // D
    std::size_t min_length = 1;      // m
    std::size_t max_length = 256;    // M
    std::size_t max_elements = 1024; // cap on length * channels per segment
    std::size_t max_samples = 100000; // per-dataset cap, applied by the driver
    std::uint64_t seed = 42;

    void validate() const;
};

struct Segment {
    std::string uuid;
    std::string source_id;
    std::size_t start = 0;
    std::size_t length = 0;
    std::vector<std::size_t> channels; // ascending subset of 0..C-1
    std::vector<std::vector<double>> values; // one vector per selected channel
    std::uint64_t seed = 0;

    TimeSeries to_series() const { return TimeSeries::from_channels(values); }
};

// Sliding-window extraction: start indices are jD for j = 0..floor((T-W)/D),
// each segment length is min(W, rand(m, min(M, T-t))), and the channel count
// is drawn uniformly in [1, C] then reduced while length*channels exceeds
// max_elements. Deterministic given params.seed and source_id.
std::vector<Segment> sample_windows(const TimeSeries& series, const std::string& source_id,
                                    const WindowParams& params);

// Conversation-length rule: max(1, min(floor(L_max * U(alpha_min, alpha_max)), L_max)).
std::size_t conversation_length(std::size_t l_max, double alpha_min, double alpha_max, Rng& rng);

// Uniform channel count in [1, C].
std::size_t select_channels(std::size_t channel_count, Rng& rng);

std::string segment_manifest_line(const Segment& segment);
std::string segment_manifest(const std::vector<Segment>& segments);

} // namespace tstok
