#include "tstok/patch_vq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"
#include "tstok/errors.hpp"
#include "tstok/rng.hpp"

namespace tstok {

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double t = a[i] - b[i];
        d += t * t;
    }
    return d;
}

std::size_t nearest(const std::vector<double>& p, const std::vector<std::vector<double>>& centers) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < centers.size(); ++k) {
        double d = sq_dist(p, centers[k]);
        if (d < best_d) { // strict: ties stay at the lowest index
            best_d = d;
            best = k;
        }
    }
    return best;
}

std::vector<std::vector<double>> cut_patches(const std::vector<TimeSeries>& corpus, std::uint32_t P) {
    std::vector<std::vector<double>> patches;
    for (const auto& series : corpus) {
        for (std::size_t c = 0; c < series.channels(); ++c) {
            auto ch = series.channel(c);
            for (std::size_t start = 0; start + P <= ch.size(); start += P)
                patches.emplace_back(ch.begin() + static_cast<std::ptrdiff_t>(start),
                                     ch.begin() + static_cast<std::ptrdiff_t>(start + P));
        }
    }
    return patches;
}

} // namespace

std::string PatchCodebook::to_json() const {
    nlohmann::json j;
    j["P"] = patch_length;
    j["K_vq"] = codewords.size();
    j["codewords"] = codewords;
    return j.dump();
}

PatchCodebook PatchCodebook::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.contains("P") || !j.contains("codewords"))
        fail(errc::parse_error, "malformed codebook JSON");
    PatchCodebook book;
    book.patch_length = j["P"].get<std::uint32_t>();
    book.codewords = j["codewords"].get<std::vector<std::vector<double>>>();
    for (const auto& cw : book.codewords) {
        if (cw.size() != book.patch_length) fail(errc::parse_error, "codeword length does not match P");
        for (double v : cw)
            if (!std::isfinite(v)) fail(errc::non_finite_input, "codeword contains non-finite value");
    }
    if (book.codewords.empty()) fail(errc::parse_error, "empty codebook");
    return book;
}

PatchCodebook train_patch_vq(const std::vector<TimeSeries>& corpus, std::uint32_t patch_length,
                             std::uint32_t codebook_size, std::uint32_t iterations, std::uint64_t rng_seed) {
    if (patch_length < 1 || codebook_size < 1) fail(errc::spec_invalid, "P and K_vq must be >= 1");
    auto patches = cut_patches(corpus, patch_length);
    if (patches.size() < codebook_size)
        fail(errc::insufficient_data, "corpus yields " + std::to_string(patches.size()) + " patches, need " +
                                          std::to_string(codebook_size));
    Rng rng(rng_seed);

    // k-means++ seeding
    std::vector<std::vector<double>> centers;
    centers.reserve(codebook_size);
    centers.push_back(patches[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(patches.size()) - 1))]);
    std::vector<double> dist(patches.size());
    while (centers.size() < codebook_size) {
        double total = 0.0;
        for (std::size_t i = 0; i < patches.size(); ++i) {
            dist[i] = sq_dist(patches[i], centers[nearest(patches[i], centers)]);
            total += dist[i];
        }
        std::size_t pick;
        if (total <= 0.0) {
            pick = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(patches.size()) - 1));
        } else {
            double r = rng.uniform_real(0.0, total);
            pick = patches.size() - 1;
            double acc = 0.0;
            for (std::size_t i = 0; i < patches.size(); ++i) {
                acc += dist[i];
                if (r < acc) {
                    pick = i;
                    break;
                }
            }
        }
        centers.push_back(patches[pick]);
    }

    // Lloyd iterations
    std::vector<std::size_t> assign(patches.size(), 0);
    for (std::uint32_t it = 0; it < iterations; ++it) {
        bool changed = false;
        for (std::size_t i = 0; i < patches.size(); ++i) {
            std::size_t a = nearest(patches[i], centers);
            if (a != assign[i]) changed = true;
            assign[i] = a;
        }
        std::vector<std::vector<double>> sums(centers.size(), std::vector<double>(patch_length, 0.0));
        std::vector<std::size_t> counts(centers.size(), 0);
        for (std::size_t i = 0; i < patches.size(); ++i) {
            for (std::uint32_t d = 0; d < patch_length; ++d) sums[assign[i]][d] += patches[i][d];
            ++counts[assign[i]];
        }
        for (std::size_t k = 0; k < centers.size(); ++k) {
            if (counts[k] == 0) {
                // re-seed from the point farthest from its assigned centroid
                std::size_t far = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < patches.size(); ++i) {
                    double d = sq_dist(patches[i], centers[assign[i]]);
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                centers[k] = patches[far];
                assign[far] = k;
                changed = true;
                continue;
            }
            for (std::uint32_t d = 0; d < patch_length; ++d)
                centers[k][d] = sums[k][d] / static_cast<double>(counts[k]);
        }
        if (!changed && it > 0) break;
    }

    std::sort(centers.begin(), centers.end());
    PatchCodebook book;
    book.patch_length = patch_length;
    book.codewords = std::move(centers);
    return book;
}

VqEncoding vq_encode(const TimeSeries& series, const PatchCodebook& codebook) {
    if (codebook.codewords.empty() || codebook.patch_length < 1) fail(errc::spec_invalid, "empty codebook");
    const std::uint32_t P = codebook.patch_length;
    VqEncoding out;
    out.tokens.spec_fingerprint = "vq-" + std::to_string(codebook.size()) + "-" + std::to_string(P);
    for (std::size_t c = 0; c < series.channels(); ++c) {
        auto ch = series.channel(c);
        std::vector<double> padded(ch.begin(), ch.end());
        std::uint32_t pad = static_cast<std::uint32_t>((P - padded.size() % P) % P);
        for (std::uint32_t i = 0; i < pad; ++i) padded.push_back(padded.back());
        out.padding.push_back(pad);
        std::vector<double> patch(P);
        for (std::size_t start = 0; start < padded.size(); start += P) {
            std::copy(padded.begin() + static_cast<std::ptrdiff_t>(start),
                      padded.begin() + static_cast<std::ptrdiff_t>(start + P), patch.begin());
            out.tokens.ids.push_back(nearest(patch, codebook.codewords));
        }
        out.tokens.ids.push_back(codebook.separator_id());
    }
    return out;
}

TimeSeries vq_decode(const std::vector<std::uint64_t>& ids, const PatchCodebook& codebook) {
    VqEncoding enc;
    enc.tokens.ids = ids;
    return vq_decode(enc, codebook);
}

TimeSeries vq_decode(const VqEncoding& encoding, const PatchCodebook& codebook) {
    std::vector<std::vector<double>> channels;
    std::vector<double> current;
    bool terminated = false;
    for (std::uint64_t id : encoding.tokens.ids) {
        terminated = false;
        if (id == codebook.separator_id()) {
            channels.push_back(std::move(current));
            current.clear();
            terminated = true;
            continue;
        }
        if (id > codebook.separator_id()) fail(errc::unknown_token, "vq id " + std::to_string(id) + " out of range");
        const auto& cw = codebook.codewords[static_cast<std::size_t>(id)];
        current.insert(current.end(), cw.begin(), cw.end());
    }
    if (!current.empty() || channels.empty()) {
        if (!terminated) channels.push_back(std::move(current)); // tolerate missing final separator
    }
    for (std::size_t c = 0; c < channels.size() && c < encoding.padding.size(); ++c) {
        std::uint32_t pad = encoding.padding[c];
        if (pad > 0 && channels[c].size() >= pad) channels[c].resize(channels[c].size() - pad);
    }
    return TimeSeries::from_channels(channels);
}

} // namespace tstok
