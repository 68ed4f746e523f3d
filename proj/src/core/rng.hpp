#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace markcorr {

// SplitMix64 finalizer; bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

// Draw i of stream `key` depends only on (key, i). Independent streams never
// share state, so replicates and permutations can be evaluated in any order
// (or concurrently) with identical results.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    std::uint64_t next_u64() { return mix64(key_ + (++counter_) * kGoldenGamma); }

    // uniform on [0, 1)
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform on (0, 1]
    double next_positive() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    // unbiased uniform integer on [0, n)
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t limit = n * ((~std::uint64_t{0}) / n);
        std::uint64_t v;
        do {
            v = next_u64();
        } while (v >= limit);
        return v % n;
    }

    // Box-Muller; two uniforms per draw, no cached state.
    double next_normal() {
        const double u1 = next_positive();
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    // Exact Poisson draw. Knuth's product method for small means; larger means
    // are split into independent chunks (a sum of Poissons is Poisson).
    long next_poisson(double mean) {
        long total = 0;
        while (mean > 12.0) {
            total += poisson_knuth(12.0);
            mean -= 12.0;
        }
        if (mean > 0.0) total += poisson_knuth(mean);
        return total;
    }

    // Fisher-Yates
    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    long poisson_knuth(double mean) {
        const double threshold = std::exp(-mean);
        long k = 0;
        double product = 1.0;
        do {
            ++k;
            product *= next_double();
        } while (product > threshold);
        return k - 1;
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Stream tags for deriving independent sub-keys from one run seed.
enum class RngStream : std::uint64_t {
    permutation = 1,
    replicate = 2,
    thinning = 3,
    marks = 4,
    field = 5,
    placement = 6,
    pattern = 7,
    null_marks = 8,
};

inline std::uint64_t derive_key(std::uint64_t key, RngStream stream, std::uint64_t index) {
    const std::uint64_t a = mix64(key + static_cast<std::uint64_t>(stream) * kGoldenGamma);
    return mix64(a + (index + 1) * kGoldenGamma);
}

} // namespace markcorr
