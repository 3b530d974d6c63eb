#include "tstok/tokenizer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>

#include "tstok/errors.hpp"
#include "tstok/rng.hpp"

namespace tstok {

void TokenizerSpec::validate() const {
    if (K < 3) fail(errc::spec_invalid, "K must be >= 3 (at least 2 bins plus separator)");
    if (!(s > 0.0) || !std::isfinite(s)) fail(errc::spec_invalid, "s must be a positive finite value");
}

std::string TokenizerSpec::fingerprint() const {
    // identifies the codebook geometry; pre_normalized is a processing flag,
    // not part of the identity
    char buf[96];
    std::snprintf(buf, sizeof(buf), "K=%u;s=%016llx;off=%llu", K,
                  static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(s)),
                  static_cast<unsigned long long>(vocab_offset));
    char out[17];
    std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(fnv1a64(buf)));
    return std::string(out);
}

std::uint32_t BinLayout::index_of(double x) const {
    double clamped = std::clamp(x, -s, s);
    auto i = static_cast<std::int64_t>(std::floor((clamped + s) / bin_width()));
    i = std::clamp<std::int64_t>(i, 0, static_cast<std::int64_t>(bin_count) - 1);
    return static_cast<std::uint32_t>(i);
}

double BinLayout::center_of(std::uint32_t index) const {
    // -s + (i + 0.5) * width, written as one ratio to keep the middle bin at
    // exactly 0 when bin_count is odd
    return s * (2.0 * static_cast<double>(index) + 1.0 - static_cast<double>(bin_count)) /
           static_cast<double>(bin_count);
}

TokenSequence encode(const TimeSeries& series, const TokenizerSpec& spec) {
    spec.validate();
    const TimeSeries* input = &series;
    TimeSeries normalized_storage(1, 1, {0.0});
    if (!spec.pre_normalized) {
        normalized_storage = normalize(series).series;
        input = &normalized_storage;
    }
    BinLayout layout(spec);
    TokenSequence out;
    out.spec_fingerprint = spec.fingerprint();
    out.ids.reserve(input->size() + input->channels());
    for (std::size_t c = 0; c < input->channels(); ++c) {
        for (double x : input->channel(c)) out.ids.push_back(spec.vocab_offset + layout.index_of(x));
        out.ids.push_back(spec.separator_id());
    }
    return out;
}

TimeSeries decode(const std::vector<std::uint64_t>& ids, const TokenizerSpec& spec) {
    spec.validate();
    BinLayout layout(spec);
    if (ids.empty() || ids.back() != spec.separator_id())
        fail(errc::missing_terminator, "token stream does not end with the channel separator");
    std::vector<std::vector<double>> channels;
    std::vector<double> current;
    for (std::uint64_t id : ids) {
        if (id < spec.vocab_offset || id > spec.separator_id())
            fail(errc::unknown_token, "id " + std::to_string(id) + " outside the tokenizer range");
        std::uint64_t local = id - spec.vocab_offset;
        if (local == spec.separator_local()) {
            channels.push_back(std::move(current));
            current.clear();
            continue;
        }
        if (local == spec.K - 1)
            fail(errc::unknown_token, "id " + std::to_string(id) + " is the reserved unused index");
        current.push_back(layout.center_of(static_cast<std::uint32_t>(local)));
    }
    const std::size_t L = channels.front().size();
    for (const auto& ch : channels) {
        if (ch.size() != L) fail(errc::ragged_channels, "channel segments have unequal lengths");
    }
    if (L == 0) fail(errc::ragged_channels, "empty channel segment");
    return TimeSeries::from_channels(channels);
}

TimeSeries decode(const TokenSequence& tokens, const TokenizerSpec& spec) { return decode(tokens.ids, spec); }

double reconstruction_error(const TimeSeries& original, const TimeSeries& reconstructed, ErrorMetric metric) {
    if (original.length() != reconstructed.length() || original.channels() != reconstructed.channels())
        fail(errc::shape_mismatch, "original and reconstruction shapes differ");
    const auto& a = original.values();
    const auto& b = reconstructed.values();
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = std::abs(a[i] - b[i]);
        switch (metric) {
            case ErrorMetric::MAE: acc += d; break;
            case ErrorMetric::MSE: acc += d * d; break;
            case ErrorMetric::MaxAbs: acc = std::max(acc, d); break;
        }
    }
    if (metric == ErrorMetric::MaxAbs) return acc;
    return acc / static_cast<double>(a.size());
}

} // namespace tstok
