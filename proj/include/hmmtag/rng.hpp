#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace hmmtag {

// splitmix64, used to derive per-task seeds from one run seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::string_view stream) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a over the stream label
    for (unsigned char c : stream) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return splitmix64(base ^ h);
}

// All sampling goes through this wrapper. mt19937_64 is fully specified by
// the standard, and the uniform mapping below avoids std::uniform_real_distribution,
// whose output may differ between standard library implementations.
class SampleRng {
public:
    explicit SampleRng(std::uint64_t seed) : gen_(seed) {}

    // Uniform double in [0, 1), 53 random bits.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    // Index into a cumulative weight array. cumulative must be non-empty,
    // non-decreasing, with cumulative.back() > 0.
    std::size_t categorical(std::span<const double> cumulative) {
        double u = uniform() * cumulative.back();
        std::size_t lo = 0;
        std::size_t hi = cumulative.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (cumulative[mid] > u) hi = mid; else lo = mid + 1;
        }
        return lo;
    }

    // Geometric sentence length with the given mean, truncated to [1, 10*mean].
    int geometric_length(int mean) {
        if (mean <= 1) return 1;
        double p = 1.0 / static_cast<double>(mean);
        double u = uniform();
        double raw = 1.0 + std::floor(std::log1p(-u) / std::log1p(-p));
        double cap = 10.0 * static_cast<double>(mean);
        if (!(raw >= 1.0)) raw = 1.0;
        if (raw > cap) raw = cap;
        return static_cast<int>(raw);
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace hmmtag
