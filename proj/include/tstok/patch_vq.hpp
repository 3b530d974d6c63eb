#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tstok/series.hpp"
#include "tstok/tokenizer.hpp"

namespace tstok {

// k-means codebook over fixed-length patches. One token encodes P values, so
// the compression ratio is P. Codewords are sorted lexicographically after
// training for reproducibility.
struct PatchCodebook {
    std::uint32_t patch_length = 0;                // P
    std::vector<std::vector<double>> codewords;    // K_vq rows of length P

    std::uint32_t size() const { return static_cast<std::uint32_t>(codewords.size()); }
    std::uint64_t separator_id() const { return codewords.size(); }

    std::string to_json() const;
    static PatchCodebook from_json(const std::string& text);
};

// Lloyd's algorithm with k-means++ seeding from the seeded generator. Empty
// clusters are re-seeded from the point farthest from its assigned centroid.
// Deterministic given the seed.
PatchCodebook train_patch_vq(const std::vector<TimeSeries>& corpus, std::uint32_t patch_length,
                             std::uint32_t codebook_size, std::uint32_t iterations, std::uint64_t rng_seed);

struct VqEncoding {
    TokenSequence tokens;
    std::vector<std::uint32_t> padding; // per channel, values appended to fill the last patch
};

// Nearest codeword per patch (Euclidean, ties to the lowest index); channels
// padded with their last value to a whole patch, separator appended per
// channel as in the discrete codec.
VqEncoding vq_encode(const TimeSeries& series, const PatchCodebook& codebook);

// Concatenate codewords per channel and trim the recorded padding.
TimeSeries vq_decode(const VqEncoding& encoding, const PatchCodebook& codebook);
TimeSeries vq_decode(const std::vector<std::uint64_t>& ids, const PatchCodebook& codebook);

} // namespace tstok
