#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "unicone/errors.hpp"
#include "unicone/vec.hpp"

namespace unicone {

/// Reproducibility contract: a (master seed, stream id) pair fully determines
/// every random draw. Distinct streams are statistically independent.
struct Seed {
    std::uint64_t master = 0;
    std::uint64_t stream = 0;
};

namespace detail {

// SplitMix64 finalizer (Steele, Lea & Flood 2014). All constants below are
// the published ones; the generator is counter-based so the k-th output is a
// pure function of (key, k), which makes results reproducible across
// implementations and trivially parallelizable.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

} // namespace detail

/// Counter-mode SplitMix64. Output k is mix64(key + k * GoldenGamma) where
/// key is derived from (master, stream) by two finalizer rounds.
class CounterRng {
public:
    explicit CounterRng(Seed seed)
        : key_(detail::mix64(detail::mix64(seed.master) ^
                             (detail::mix64(seed.stream + detail::kGoldenGamma)))) {}

    std::uint64_t next_u64() { return detail::mix64(key_ + (++counter_) * detail::kGoldenGamma); }

    /// Uniform in [0, 1) with 53 random bits.
    double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_uniform(); }

    bool next_bernoulli(double p) { return next_uniform() < p; }

    /// Standard normal via Box-Muller; the second value of each pair is cached.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - next_uniform(); // (0, 1]
        const double u2 = next_uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Unbiased integer in [0, bound) by rejection.
    std::uint64_t next_index(std::uint64_t bound) {
        if (bound == 0) throw ContractViolation("next_index: bound must be positive");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % bound;
    }

    Vec gaussian_vector(std::size_t n) {
        Vec v(n);
        for (double& x : v) x = next_gaussian();
        return v;
    }

    /// k distinct indices from [0, n), by partial Fisher-Yates. Sorted output.
    std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k) {
        if (k > n) throw ContractViolation("sample_without_replacement: k > n");
        std::vector<std::size_t> pool(n);
        for (std::size_t i = 0; i < n; ++i) pool[i] = i;
        for (std::size_t i = 0; i < k; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(next_index(n - i));
            std::swap(pool[i], pool[j]);
        }
        std::vector<std::size_t> out(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// Derive a child stream for a (trial, purpose) pair. Children of distinct
/// (a, b) pairs are independent streams under the same master seed.
inline Seed derive_stream(Seed base, std::uint64_t a, std::uint64_t b = 0) {
    Seed s;
    s.master = base.master;
    s.stream = detail::mix64(base.stream + detail::kGoldenGamma * (a + 1) +
                             0xD1B54A32D192ED03ull * (b + 1));
    return s;
}

} // namespace unicone
