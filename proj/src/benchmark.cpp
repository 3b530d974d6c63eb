#include "tstok/benchmark.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "tstok/errors.hpp"
#include "tstok/patch_vq.hpp"
#include "tstok/rng.hpp"
#include "tstok/text_codec.hpp"
#include "tstok/tokenizer.hpp"

namespace tstok {

std::vector<TimeSeries> make_synthetic_corpus(std::size_t count, std::size_t length, std::size_t channels,
                                              std::uint64_t seed) {
    std::vector<TimeSeries> corpus;
    corpus.reserve(count);
    for (std::size_t n = 0; n < count; ++n) {
        Rng rng(derive_seed(seed, "synthetic-" + std::to_string(n)));
        std::vector<std::vector<double>> chans(channels);
        for (std::size_t c = 0; c < channels; ++c) {
            double trend = rng.uniform_real(-0.01, 0.01);
            double amp1 = rng.uniform_real(0.2, 2.0);
            double amp2 = rng.uniform_real(0.0, 0.8);
            double period1 = rng.uniform_real(16.0, 128.0);
            double period2 = rng.uniform_real(4.0, 32.0);
            double phase = rng.uniform_real(0.0, 2.0 * std::numbers::pi);
            double noise = rng.uniform_real(0.02, 0.3);
            double offset = rng.uniform_real(-5.0, 5.0);
            chans[c].resize(length);
            for (std::size_t t = 0; t < length; ++t) {
                double x = static_cast<double>(t);
                // sum of 12 uniforms, shifted: cheap approximate gaussian
                double g = 0.0;
                for (int k = 0; k < 12; ++k) g += rng.uniform_real(0.0, 1.0);
                g -= 6.0;
                chans[c][t] = offset + trend * x + amp1 * std::sin(2.0 * std::numbers::pi * x / period1 + phase) +
                              amp2 * std::sin(2.0 * std::numbers::pi * x / period2) + noise * g;
            }
        }
        corpus.push_back(TimeSeries::from_channels(chans));
    }
    return corpus;
}

namespace {

struct ErrorAccum {
    double abs_sum = 0.0;
    double sq_sum = 0.0;
    double max_abs = 0.0;
    std::size_t n = 0;

    void add(const TimeSeries& a, const TimeSeries& b) {
        const auto& x = a.values();
        const auto& y = b.values();
        for (std::size_t i = 0; i < x.size(); ++i) {
            double d = std::abs(x[i] - y[i]);
            abs_sum += d;
            sq_sum += d * d;
            if (d > max_abs) max_abs = d;
        }
        n += x.size();
    }
};

} // namespace

std::vector<BenchmarkRow> benchmark_codecs(const std::vector<TimeSeries>& corpus,
                                           const std::vector<BenchmarkConfig>& configs, std::uint64_t seed) {
    if (corpus.empty()) fail(errc::insufficient_data, "benchmark needs a non-empty corpus");
    std::vector<TimeSeries> normalized;
    normalized.reserve(corpus.size());
    for (const auto& s : corpus) normalized.push_back(normalize(s).series);

    std::vector<BenchmarkRow> rows;
    for (const auto& cfg : configs) {
        BenchmarkRow row;
        row.K = cfg.K;
        ErrorAccum err;
        std::size_t value_count = 0;
        std::size_t token_count = 0;
        switch (cfg.codec) {
            case CodecKind::Discrete: {
                row.codec = "discrete";
                row.compression_ratio = 1.0;
                TokenizerSpec spec{cfg.K, 3.0, 0, true};
                for (const auto& s : normalized) {
                    auto tokens = encode(s, spec);
                    err.add(s, decode(tokens, spec));
                    token_count += tokens.ids.size();
                    value_count += s.size();
                }
                break;
            }
            case CodecKind::PatchVq: {
                row.codec = "patch_vq";
                row.compression_ratio = static_cast<double>(cfg.patch_length);
                auto book = train_patch_vq(normalized, cfg.patch_length, cfg.K, cfg.vq_iterations,
                                           derive_seed(seed, "vq-" + std::to_string(cfg.K)));
                for (const auto& s : normalized) {
                    auto enc = vq_encode(s, book);
                    err.add(s, vq_decode(enc, book));
                    token_count += enc.tokens.ids.size();
                    value_count += s.size();
                }
                break;
            }
            case CodecKind::Text: {
                row.codec = "text";
                TextCodecSpec spec{cfg.precision};
                for (const auto& s : normalized) {
                    std::string text = text_encode(s, spec);
                    err.add(s, text_decode(text, spec));
                    token_count += text_symbol_count(text);
                    value_count += s.size();
                }
                row.compression_ratio = static_cast<double>(value_count) / static_cast<double>(token_count);
                break;
            }
        }
        row.mae = err.abs_sum / static_cast<double>(err.n);
        row.mse = err.sq_sum / static_cast<double>(err.n);
        row.max_abs = err.max_abs;
        row.tokens_per_value = static_cast<double>(token_count) / static_cast<double>(value_count);
        rows.push_back(row);
    }
    return rows;
}

std::string benchmark_csv(const std::vector<BenchmarkRow>& rows) {
    std::ostringstream out;
    out << "codec,K,compression_ratio,mae,mse,max_abs,tokens_per_value\n";
    out.precision(12);
    for (const auto& r : rows) {
        out << r.codec << ',' << r.K << ',' << r.compression_ratio << ',' << r.mae << ',' << r.mse << ','
            << r.max_abs << ',' << r.tokens_per_value << '\n';
    }
    return out.str();
}

} // namespace tstok
