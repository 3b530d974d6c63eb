#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tstok/series.hpp"

namespace tstok {

// Discrete tokenizer configuration. K controls both the bin count (K - 1)
// and the channel separator, whose local index is K; local index K - 1 is
// reserved and never emitted, so K + 1 vocabulary slots are allocated per
// spec. vocab_offset is the size of the text vocabulary the new ids are
// appended after.
struct TokenizerSpec {
    std::uint32_t K = 8192;
    double s = 3.0;
    std::uint64_t vocab_offset = 0;
    bool pre_normalized = false; // when true, inputs are already in normalized units

    std::uint32_t bin_count() const { return K - 1; }
    std::uint64_t separator_local() const { return K; }
    std::uint64_t separator_id() const { return vocab_offset + K; }

    void validate() const;
    std::string fingerprint() const;
};

struct TokenSequence {
    std::vector<std::uint64_t> ids;
    std::string spec_fingerprint;

    bool operator==(const TokenSequence&) const = default;
};

// Equal-width bins over [-s, s]. Bin i covers [-s + i*w, -s + (i+1)*w) with
// the top edge folded into the last bin; centers are computed as an exact
// ratio so the middle bin of an odd bin count decodes to exactly 0.
struct BinLayout {
    std::uint32_t bin_count;
    double s;

    explicit BinLayout(const TokenizerSpec& spec) : bin_count(spec.K - 1), s(spec.s) {}

    double bin_width() const { return 2.0 * s / static_cast<double>(bin_count); }

    std::uint32_t index_of(double x) const;
    double center_of(std::uint32_t index) const;
};

// Quantize, append the separator after each channel, concatenate channels,
// offset into the extended vocabulary. Output length is L*M + M.
TokenSequence encode(const TimeSeries& series, const TokenizerSpec& spec);

// Map each id back to its bin center and split channels at separators.
// Returns the normalized-space reconstruction.
TimeSeries decode(const TokenSequence& tokens, const TokenizerSpec& spec);
TimeSeries decode(const std::vector<std::uint64_t>& ids, const TokenizerSpec& spec);

enum class ErrorMetric { MAE, MSE, MaxAbs };

double reconstruction_error(const TimeSeries& original, const TimeSeries& reconstructed, ErrorMetric metric);

} // namespace tstok
