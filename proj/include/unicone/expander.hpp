#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "unicone/combinatorics.hpp"
#include "unicone/dense_matrix.hpp"
#include "unicone/errors.hpp"
#include "unicone/rng.hpp"

namespace unicone {

/// (sqrt(5) - 1) / 2: the threshold the delta * rho product must clear.
inline constexpr double kExpanderGoldenThreshold = 0.61803398874989484820;

struct DegreeProfile {
    std::size_t d_min = 0;
    std::size_t d_max = 0;
    double rho = 0.0; // d_min / d_max, in (0, 1]
};

/// Column sums of the 0-1 adjacency matrix: left degrees. A zero column is a
/// degenerate graph and an error.
inline DegreeProfile degree_profile(const DenseMatrix& a) {
    const std::size_t n = a.cols();
    if (n == 0) throw ContractViolation("degree_profile: no left nodes");
    DegreeProfile p;
    p.d_min = a.rows() + 1;
    for (std::size_t j = 0; j < n; ++j) {
        std::size_t deg = 0;
        for (std::size_t i = 0; i < a.rows(); ++i) {
            const double v = a(i, j);
            if (v != 0.0 && v != 1.0)
                throw ContractViolation("degree_profile: matrix must be 0-1");
            if (v == 1.0) ++deg;
        }
        if (deg == 0) throw ContractViolation("degree_profile: zero-degree left node");
        p.d_min = std::min(p.d_min, deg);
        p.d_max = std::max(p.d_max, deg);
    }
    p.rho = static_cast<double>(p.d_min) / static_cast<double>(p.d_max);
    return p;
}

enum class ExpansionMode { Exhaustive, Sampled };

struct ExpansionCheck {
    bool certified = false;                  // only the exhaustive mode can set this
    bool violation_found = false;
    std::vector<std::size_t> violating_set;  // left nodes with |Gamma(S)| < delta |E(S)|
    std::uint64_t subsets_checked = 0;
};

namespace detail {

/// Right-neighbor bitmask per left node.
struct BipartiteMasks {
    std::vector<std::vector<std::uint64_t>> mask; // per left node
    std::vector<std::size_t> degree;
    std::size_t words = 0;

    explicit BipartiteMasks(const DenseMatrix& a) {
        const std::size_t m = a.rows(), n = a.cols();
        words = (m + 63) / 64;
        mask.assign(n, std::vector<std::uint64_t>(words, 0));
        degree.assign(n, 0);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < m; ++i)
                if (a(i, j) == 1.0) {
                    mask[j][i / 64] |= (std::uint64_t{1} << (i % 64));
                    ++degree[j];
                }
    }

    /// |Gamma(S)| and |E(S)| for a left subset.
    std::pair<std::size_t, std::size_t> neighborhood(const std::vector<std::size_t>& s) const {
        std::vector<std::uint64_t> u(words, 0);
        std::size_t edges = 0;
        for (std::size_t j : s) {
            for (std::size_t w = 0; w < words; ++w) u[w] |= mask[j][w];
            edges += degree[j];
        }
        std::size_t gamma = 0;
        for (std::uint64_t w : u) gamma += static_cast<std::size_t>(std::popcount(w));
        return {gamma, edges};
    }
};

inline bool expansion_ok(std::size_t gamma, std::size_t edges, double delta) {
    return static_cast<double>(gamma) + 1e-9 >= delta * static_cast<double>(edges);
}

} // namespace detail

/// Check |Gamma(S)| >= delta |E(S)| for left sets S with |S| <= floor(alpha n).
/// Exhaustive mode visits every such subset (size-ordered, first violation
/// wins) and is the only mode that can certify. Sampled mode can refute or
/// report that no violation was seen; it never certifies.
inline ExpansionCheck verify_expansion(const DenseMatrix& a, double alpha, double delta,
                                       ExpansionMode mode = ExpansionMode::Exhaustive,
                                       std::size_t samples = 0, Seed seed = {}) {
    if (!(alpha > 0.0 && alpha <= 1.0) || !(delta > 0.0 && delta <= 1.0))
        throw ContractViolation("verify_expansion: alpha, delta must lie in (0, 1]");
    const std::size_t n = a.cols();
    const detail::BipartiteMasks g(a);
    const std::size_t max_size =
        std::min(n, static_cast<std::size_t>(std::floor(alpha * static_cast<double>(n) + 1e-12)));

    ExpansionCheck res;
    if (mode == ExpansionMode::Exhaustive) {
        std::uint64_t total = 0;
        for (std::size_t s = 1; s <= max_size; ++s) total += subset_count(n, s, kEnumerationGuard);
        if (total >= kEnumerationGuard)
            throw GuardExceeded("verify_expansion: exhaustive enumeration above the 1e6 guard");

        for (std::size_t s = 1; s <= max_size && !res.violation_found; ++s) {
            for_each_subset(n, s, [&](const std::vector<std::size_t>& subset) {
                ++res.subsets_checked;
                const auto [gamma, edges] = g.neighborhood(subset);
                if (!detail::expansion_ok(gamma, edges, delta)) {
                    res.violation_found = true;
                    res.violating_set = subset;
                    return false;
                }
                return true;
            });
        }
        res.certified = !res.violation_found;
        return res;
    }

    CounterRng rng(seed);
    for (std::size_t t = 0; t < samples; ++t) {
        const std::size_t s = 1 + static_cast<std::size_t>(rng.next_index(max_size));
        const auto subset = rng.sample_without_replacement(n, s);
        ++res.subsets_checked;
        const auto [gamma, edges] = g.neighborhood(subset);
        if (!detail::expansion_ok(gamma, edges, delta)) {
            res.violation_found = true;
            res.violating_set = subset;
            return res;
        }
    }
    return res; // certified stays false: sampling cannot certify
}

/// Largest delta that an exhaustive check would certify at this alpha
/// (the worst |Gamma(S)| / |E(S)| ratio over the guarded subset range).
inline double best_certifiable_delta(const DenseMatrix& a, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw ContractViolation("best_certifiable_delta: alpha must lie in (0, 1]");
    const std::size_t n = a.cols();
    const detail::BipartiteMasks g(a);
    const std::size_t max_size =
        std::min(n, static_cast<std::size_t>(std::floor(alpha * static_cast<double>(n) + 1e-12)));
    std::uint64_t total = 0;
    for (std::size_t s = 1; s <= max_size; ++s) total += subset_count(n, s, kEnumerationGuard);
    if (total >= kEnumerationGuard)
        throw GuardExceeded("best_certifiable_delta: enumeration above the 1e6 guard");

    double best = 1.0;
    for (std::size_t s = 1; s <= max_size; ++s) {
        for_each_subset(n, s, [&](const std::vector<std::size_t>& subset) {
            const auto [gamma, edges] = g.neighborhood(subset);
            best = std::min(best, static_cast<double>(gamma) / static_cast<double>(edges));
            return true;
        });
    }
    return best;
}

struct ThresholdResult {
    bool condition_met = false; // delta * rho above the golden-ratio threshold
    std::size_t k = 0;          // certified sparsity when the condition holds
};

/// Sparsity certified by an (alpha, delta) expansion certificate with degree
/// ratio rho: k = floor(alpha n / (1 + delta rho)), available only when
/// delta * rho exceeds (sqrt(5)-1)/2. Floor, not round: the bound is an
/// upper limit on k.
inline ThresholdResult uniqueness_threshold(double alpha, double delta, double rho,
                                            std::size_t n) {
    if (!(alpha > 0.0 && alpha <= 1.0) || !(delta > 0.0 && delta <= 1.0) ||
        !(rho > 0.0 && rho <= 1.0) || n < 1)
        throw ContractViolation("uniqueness_threshold: parameters out of range");
    ThresholdResult res;
    const double product = delta * rho;
    if (product <= kExpanderGoldenThreshold) return res;
    res.condition_met = true;
    res.k = static_cast<std::size_t>(
        std::floor(alpha * static_cast<double>(n) / (1.0 + product) + 1e-12));
    return res;
}

/// Full report for one graph at one (alpha, delta) pair.
struct ExpanderReport {
    std::size_t d_min = 0;
    std::size_t d_max = 0;
    double rho = 0.0;
    double alpha = 0.0;
    double delta = 0.0;
    bool certified = false;
    bool violation_found = false;
    std::vector<std::size_t> violating_set;
    bool threshold_met = false;
    std::size_t threshold_k = 0;
    std::uint64_t subsets_checked = 0;
    bool sampled = false;
};

inline ExpanderReport make_expander_report(const DenseMatrix& a, double alpha, double delta,
                                           ExpansionMode mode = ExpansionMode::Exhaustive,
                                           std::size_t samples = 0, Seed seed = {}) {
    const DegreeProfile prof = degree_profile(a);
    const ExpansionCheck check = verify_expansion(a, alpha, delta, mode, samples, seed);
    ExpanderReport rep;
    rep.d_min = prof.d_min;
    rep.d_max = prof.d_max;
    rep.rho = prof.rho;
    rep.alpha = alpha;
    rep.delta = delta;
    rep.certified = check.certified;
    rep.violation_found = check.violation_found;
    rep.violating_set = check.violating_set;
    rep.subsets_checked = check.subsets_checked;
    rep.sampled = mode == ExpansionMode::Sampled;
    const ThresholdResult thr = uniqueness_threshold(alpha, delta, prof.rho, a.cols());
    rep.threshold_met = thr.condition_met;
    rep.threshold_k = thr.k;
    return rep;
}

} // namespace unicone
