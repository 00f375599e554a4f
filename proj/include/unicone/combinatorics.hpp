#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "unicone/errors.hpp"

namespace unicone {

/// C(n, k), saturating at the guard ceiling instead of overflowing.
inline std::uint64_t subset_count(std::size_t n, std::size_t k, std::uint64_t cap = UINT64_MAX) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t c = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        // c * (n - k + i) / i, watching for overflow against the cap
        const std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
        if (c > cap / num) return cap;
        c = c * num / static_cast<std::uint64_t>(i);
        if (c >= cap) return cap;
    }
    return c;
}

constexpr std::uint64_t kEnumerationGuard = 1000000;

inline void enforce_enumeration_guard(std::size_t n, std::size_t k, const char* who) {
    if (subset_count(n, k, kEnumerationGuard) >= kEnumerationGuard)
        throw GuardExceeded(std::string(who) + ": subset enumeration above the 1e6 guard");
}

/// Visit every k-subset of {0..n-1} in lexicographic order. The visitor
/// returns false to stop early.
template <typename F>
void for_each_subset(std::size_t n, std::size_t k, F&& visit) {
    if (k > n) return;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    if (k == 0) {
        visit(idx);
        return;
    }
    for (;;) {
        if (!visit(static_cast<const std::vector<std::size_t>&>(idx))) return;
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

} // namespace unicone
