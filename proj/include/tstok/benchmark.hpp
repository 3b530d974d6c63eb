#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tstok/series.hpp"

namespace tstok {

// Deterministic synthetic series: per-series mixture of trend, seasonal
// components, and noise. Used by the benchmark and tests when no user corpus
// is supplied.
std::vector<TimeSeries> make_synthetic_corpus(std::size_t count, std::size_t length, std::size_t channels,
                                              std::uint64_t seed);

enum class CodecKind { Discrete, PatchVq, Text };

struct BenchmarkConfig {
    CodecKind codec = CodecKind::Discrete;
    std::uint32_t K = 8192;          // codebook size (discrete K or K_vq)
    std::uint32_t patch_length = 8;  // patch VQ only
    std::uint32_t precision = 2;     // text codec only
    std::uint32_t vq_iterations = 50;
};

struct BenchmarkRow {
    std::string codec;
    std::uint32_t K = 0;
    double compression_ratio = 0.0; // original values per emitted token
    double mae = 0.0;
    double mse = 0.0;
    double max_abs = 0.0;
    double tokens_per_value = 0.0;
};

// Runs each config over the normalized corpus and reports reconstruction
// error plus token accounting. Deterministic given the seed.
std::vector<BenchmarkRow> benchmark_codecs(const std::vector<TimeSeries>& corpus,
                                           const std::vector<BenchmarkConfig>& configs, std::uint64_t seed);

std::string benchmark_csv(const std::vector<BenchmarkRow>& rows);

} // namespace tstok
