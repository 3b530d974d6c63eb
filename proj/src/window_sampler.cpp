#include "tstok/window_sampler.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "tstok/errors.hpp"

namespace tstok {

void WindowParams::validate() const {
    if (window < 1 || stride < 1) fail(errc::spec_invalid, "window and stride must be >= 1");
    if (min_length < 1 || min_length > max_length) fail(errc::spec_invalid, "need 1 <= min_length <= max_length");
    if (max_elements < min_length) fail(errc::spec_invalid, "max_elements must be >= min_length");
}

std::vector<Segment> sample_windows(const TimeSeries& series, const std::string& source_id,
                                    const WindowParams& params) {
    params.validate();
    const std::size_t T = series.length();
    const std::size_t C = series.channels();
    if (T < params.window)
        fail(errc::too_short, "series length " + std::to_string(T) + " is shorter than window " +
                                  std::to_string(params.window));

    std::uint64_t stream_seed = derive_seed(params.seed, source_id);
    Rng rng(stream_seed);
    std::vector<Segment> segments;
    const std::size_t j_max = (T - params.window) / params.stride;
    for (std::size_t j = 0; j <= j_max; ++j) {
        const std::size_t start = j * params.stride;
        const std::size_t tail = T - start; // >= window by construction
        std::size_t hi = std::min(params.max_length, tail);
        std::size_t lo = std::min(params.min_length, hi);
        std::size_t w = static_cast<std::size_t>(
            rng.uniform_int(static_cast<std::int64_t>(lo), static_cast<std::int64_t>(hi)));
        w = std::min(params.window, w);

        std::size_t c = select_channels(C, rng);
        while (w * c > params.max_elements && c > 1) --c;
        if (w * c > params.max_elements) w = params.max_elements; // c == 1; clamp length as a last resort

        // uniform subset without replacement, reported in ascending order
        std::vector<std::size_t> all(C);
        for (std::size_t i = 0; i < C; ++i) all[i] = i;
        for (std::size_t i = 0; i < c; ++i) {
            std::size_t pick = static_cast<std::size_t>(
                rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(C) - 1));
            std::swap(all[i], all[pick]);
        }
        std::vector<std::size_t> chosen(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(c));
        std::sort(chosen.begin(), chosen.end());

        Segment seg;
        seg.uuid = uuid_v4(rng);
        seg.source_id = source_id;
        seg.start = start;
        seg.length = w;
        seg.channels = chosen;
        seg.seed = stream_seed;
        seg.values.reserve(c);
        for (std::size_t ch : chosen) {
            auto span = series.channel(ch);
            seg.values.emplace_back(span.begin() + static_cast<std::ptrdiff_t>(start),
                                    span.begin() + static_cast<std::ptrdiff_t>(start + w));
        }
        segments.push_back(std::move(seg));
    }
    return segments;
}

std::size_t conversation_length(std::size_t l_max, double alpha_min, double alpha_max, Rng& rng) {
    if (l_max < 1) fail(errc::invalid_range, "L_max must be >= 1");
    if (!(alpha_min >= 0.0) || alpha_min > alpha_max)
        fail(errc::invalid_range, "need 0 <= alpha_min <= alpha_max");
    double u = rng.uniform_real(alpha_min, alpha_max);
    double raw = std::floor(static_cast<double>(l_max) * u);
    double clamped = std::max(1.0, std::min(raw, static_cast<double>(l_max)));
    return static_cast<std::size_t>(clamped);
}

std::size_t select_channels(std::size_t channel_count, Rng& rng) {
    if (channel_count < 1) fail(errc::invalid_range, "channel count must be >= 1");
    return static_cast<std::size_t>(rng.uniform_int(1, static_cast<std::int64_t>(channel_count)));
}

std::string segment_manifest_line(const Segment& segment) {
    nlohmann::json j;
    j["uuid"] = segment.uuid;
    j["source_id"] = segment.source_id;
    j["start"] = segment.start;
    j["length"] = segment.length;
    j["channels"] = segment.channels;
    j["seed"] = segment.seed;
    j["rng"] = Rng::kAlgorithm;
    return j.dump();
}

std::string segment_manifest(const std::vector<Segment>& segments) {
    std::string out;
    for (const auto& s : segments) {
        out += segment_manifest_line(s);
        out += '\n';
    }
    return out;
}

} // namespace tstok
