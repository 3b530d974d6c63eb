#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace tstok {

// Portable seedable generator. splitmix64 has a single 64-bit word of state
// and a fixed output function, so streams are reproducible across compilers
// and platforms. The algorithm id is written into output manifests.
class Rng {
public:
    static constexpr const char* kAlgorithm = "splitmix64";

    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform integer in [lo, hi], both endpoints inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        if (lo > hi) return lo;
        std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        if (span == 0) return static_cast<std::int64_t>(next_u64()); // full 64-bit range
        // masked rejection keeps the draw unbiased and deterministic
        std::uint64_t mask = span - 1;
        mask |= mask >> 1;
        mask |= mask >> 2;
        mask |= mask >> 4;
        mask |= mask >> 8;
        mask |= mask >> 16;
        mask |= mask >> 32;
        std::uint64_t v;
        do {
            v = next_u64() & mask;
        } while (v >= span);
        return lo + static_cast<std::int64_t>(v);
    }

    // Uniform double in [lo, hi); returns lo exactly when lo == hi.
    double uniform_real(double lo, double hi) {
        double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        return lo + u * (hi - lo);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i) - 1));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

// FNV-1a, used for spec fingerprints, fixture keys, and seed derivation.
inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Per-source stream: sampling over many sources can run in parallel without
// the call order changing any stream.
inline std::uint64_t derive_seed(std::uint64_t master, std::string_view stream_id) {
    return fnv1a64(stream_id, master ^ 0xcbf29ce484222325ULL);
}

std::string uuid_v4(Rng& rng);
bool is_valid_uuid(std::string_view s);

} // namespace tstok
