#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "unicone/combinatorics.hpp"
#include "unicone/dense_matrix.hpp"
#include "unicone/eig.hpp"
#include "unicone/errors.hpp"
#include "unicone/lp.hpp"
#include "unicone/nullspace.hpp"
#include "unicone/rng.hpp"
#include "unicone/sym_matrix.hpp"
#include "unicone/vec.hpp"

namespace unicone {

// ---------------------------------------------------------------------------
// verdict types

enum class SingletonKind { CertifiedSingleton, ProbableSingleton, Refuted };

struct SingletonVerdict {
    SingletonKind kind = SingletonKind::ProbableSingleton;
    Vec witness;                 // second feasible point, set iff Refuted
    std::size_t probes_used = 0; // objectives examined
    double gap = 0.0;            // max observed objective spread
};

/// One of the two certificates is always present: h strictly positive on the
/// column span (member) or convex weights putting 0 in the column hull.
struct MPlusCertificate {
    bool member = false;
    Vec h;
    Vec lambda;
};

namespace detail {

inline double spread_tol(double vmin) { return 1e-6 * (1.0 + std::abs(vmin)); }

constexpr double kWitnessDistinct = 1e-6; // infinity-norm floor for witnesses

inline void require_nonneg(const Vec& x0, const char* who) {
    for (double v : x0)
        if (!(v >= -1e-12) || !std::isfinite(v))
            throw ContractViolation(std::string(who) + ": x0 must be nonnegative and finite");
}

/// Witness from an unbounded objective: walk out along the certified ray
/// until clearly distinct from x0.
inline Vec ray_witness(const Vec& base, const Vec& ray, const Vec& x0) {
    Vec w = base;
    double t = 1.0;
    for (int attempt = 0; attempt < 40; ++attempt) {
        w = base;
        axpy(t, ray, w);
        if (norm_inf(sub(w, x0)) >= kWitnessDistinct) return w;
        t *= 10.0;
    }
    return w;
}

/// Pick the optimizer farther from x0 (both achieve the spread, at least one
/// must be distinct when the spread is real).
inline Vec farther_from(const Vec& a, const Vec& b, const Vec& x0) {
    return norm_inf(sub(a, x0)) >= norm_inf(sub(b, x0)) ? a : b;
}

} // namespace detail

// ---------------------------------------------------------------------------
// M+ membership

/// Decide whether the row span of A meets the strictly positive orthant.
/// A margin LP maximizes t subject to h^T a_i >= t with h box-bounded;
/// membership is exactly t* > 0, and the complementary certificate (convex
/// weights for 0) comes from a feasibility solve on the column hull.
inline MPlusCertificate mplus_membership(const DenseMatrix& a, const SimplexOptions& opts = {}) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (!a.is_finite()) throw ContractViolation("mplus_membership: matrix must be finite");
    if (a.max_abs() == 0.0) throw ContractViolation("mplus_membership: all-zero matrix");

    // variables: h+ (m), h- (m), t+, t-, s (n), box slacks u,v (2m), w (1)
    const std::size_t nv = 2 * m + 2 + n + 2 * m + 1;
    LinearProgram lp;
    lp.sense = Sense::Maximize;
    lp.constraints = DenseMatrix(n + 2 * m + 1, nv);
    lp.rhs.assign(n + 2 * m + 1, 0.0);
    lp.objective.assign(nv, 0.0);
    const std::size_t t_plus = 2 * m, t_minus = 2 * m + 1, s0 = 2 * m + 2, u0 = s0 + n,
                      v0 = u0 + m, w0 = v0 + m;
    lp.objective[t_plus] = 1.0;
    lp.objective[t_minus] = -1.0;

    for (std::size_t i = 0; i < n; ++i) { // h^T a_i - t - s_i = 0
        for (std::size_t j = 0; j < m; ++j) {
            lp.constraints(i, j) = a(j, i);
            lp.constraints(i, m + j) = -a(j, i);
        }
        lp.constraints(i, t_plus) = -1.0;
        lp.constraints(i, t_minus) = 1.0;
        lp.constraints(i, s0 + i) = -1.0;
    }
    for (std::size_t j = 0; j < m; ++j) { // -1 <= h_j <= 1
        lp.constraints(n + j, j) = 1.0;
        lp.constraints(n + j, m + j) = -1.0;
        lp.constraints(n + j, u0 + j) = 1.0;
        lp.rhs[n + j] = 1.0;
        lp.constraints(n + m + j, j) = -1.0;
        lp.constraints(n + m + j, m + j) = 1.0;
        lp.constraints(n + m + j, v0 + j) = 1.0;
        lp.rhs[n + m + j] = 1.0;
    }
    lp.constraints(n + 2 * m, t_plus) = 1.0; // t <= 1
    lp.constraints(n + 2 * m, t_minus) = -1.0;
    lp.constraints(n + 2 * m, w0) = 1.0;
    lp.rhs[n + 2 * m] = 1.0;

    const LpOutcome out = solve_lp(lp, opts);
    if (out.status != LpStatus::Optimal)
        throw NumericalError("mplus_membership: margin LP did not solve", 0.0);

    MPlusCertificate cert;
    if (out.value > 1e-7) {
        cert.member = true;
        cert.h.resize(m);
        for (std::size_t j = 0; j < m; ++j)
            cert.h[j] = (out.solution[j] - out.solution[m + j]) / out.value;
        return cert;
    }

    // 0 lies in the hull: recover the convex weights
    DenseMatrix hull(m + 1, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) hull(i, j) = a(i, j);
    for (std::size_t j = 0; j < n; ++j) hull(m, j) = 1.0;
    Vec rhs(m + 1, 0.0);
    rhs[m] = 1.0;
    const FeasibilityResult feas =
        check_feasible(hull, rhs, std::vector<VarSign>(n, VarSign::NonNeg), opts);
    if (!feas.feasible)
        throw NumericalError("mplus_membership: contradictory certificates", out.value);
    cert.member = false;
    cert.lambda = feas.witness;
    return cert;
}

// ---------------------------------------------------------------------------
// singleton probes and the exact oracle

/// Randomized singleton test over {x : Ax = Ax0, x >= 0}: minimize and
/// maximize random objectives; any spread refutes, agreement everywhere is
/// only probabilistic evidence.
inline SingletonVerdict probe_singleton(const DenseMatrix& a, const Vec& x0, std::size_t probes,
                                        Seed seed, const SimplexOptions& opts = {}) {
    detail::require_nonneg(x0, "probe_singleton");
    if (x0.size() != a.cols()) throw ContractViolation("probe_singleton: x0 size mismatch");
    const Vec b = a.apply(x0);
    CounterRng rng(seed);

    SingletonVerdict verdict;
    for (std::size_t p = 0; p < probes; ++p) {
        const Vec d = rng.gaussian_vector(a.cols());
        verdict.probes_used = p + 1;

        const LpOutcome lo = solve_lp(LinearProgram{d, a, b, Sense::Minimize}, opts);
        if (lo.status == LpStatus::Infeasible)
            throw NumericalError("probe_singleton: feasible instance reported infeasible", 0.0);
        if (lo.status == LpStatus::Unbounded) {
            verdict.kind = SingletonKind::Refuted;
            verdict.witness = detail::ray_witness(lo.solution, lo.ray, x0);
            verdict.gap = std::numeric_limits<double>::infinity();
            return verdict;
        }
        const LpOutcome hi = solve_lp(LinearProgram{d, a, b, Sense::Maximize}, opts);
        if (hi.status == LpStatus::Unbounded) {
            verdict.kind = SingletonKind::Refuted;
            verdict.witness = detail::ray_witness(hi.solution, hi.ray, x0);
            verdict.gap = std::numeric_limits<double>::infinity();
            return verdict;
        }

        const double spread = hi.value - lo.value;
        verdict.gap = std::max(verdict.gap, spread);
        if (spread > detail::spread_tol(lo.value)) {
            verdict.kind = SingletonKind::Refuted;
            verdict.witness = detail::farther_from(hi.solution, lo.solution, x0);
            return verdict;
        }
    }
    verdict.kind = SingletonKind::ProbableSingleton;
    return verdict;
}

/// Deterministic singleton decision: the coordinate functionals span, so a
/// convex set on which each coordinate has zero range is a point. 2n solves.
inline SingletonVerdict exact_singleton(const DenseMatrix& a, const Vec& x0,
                                        const SimplexOptions& opts = {}) {
    detail::require_nonneg(x0, "exact_singleton");
    if (x0.size() != a.cols()) throw ContractViolation("exact_singleton: x0 size mismatch");
    const Vec b = a.apply(x0);
    const std::size_t n = a.cols();

    SingletonVerdict verdict;
    for (std::size_t i = 0; i < n; ++i) {
        Vec e(n, 0.0);
        e[i] = 1.0;
        verdict.probes_used = i + 1;

        const LpOutcome lo = solve_lp(LinearProgram{e, a, b, Sense::Minimize}, opts);
        if (lo.status != LpStatus::Optimal)
            throw NumericalError("exact_singleton: coordinate minimum did not solve", 0.0);
        const LpOutcome hi = solve_lp(LinearProgram{e, a, b, Sense::Maximize}, opts);
        if (hi.status == LpStatus::Unbounded) {
            verdict.kind = SingletonKind::Refuted;
            verdict.witness = detail::ray_witness(hi.solution, hi.ray, x0);
            verdict.gap = std::numeric_limits<double>::infinity();
            return verdict;
        }

        const double spread = hi.value - lo.value;
        verdict.gap = std::max(verdict.gap, spread);
        if (spread > detail::spread_tol(lo.value)) {
            verdict.kind = SingletonKind::Refuted;
            verdict.witness = detail::farther_from(hi.solution, lo.solution, x0);
            return verdict;
        }
    }
    verdict.kind = SingletonKind::CertifiedSingleton;
    return verdict;
}

// ---------------------------------------------------------------------------
// L1 recovery

struct L1Result {
    LpStatus status = LpStatus::Optimal;
    Vec x;
    double value = 0.0;
    bool unique_minimizer = false;
};

/// min 1^T x subject to Ax = y, x >= 0, plus a randomized uniqueness flag for
/// the optimal face (deterministic: the probe objective has a fixed seed).
inline L1Result l1_recover(const DenseMatrix& a, const Vec& y, const SimplexOptions& opts = {}) {
    L1Result res;
    LinearProgram lp{Vec(a.cols(), 1.0), a, y, Sense::Minimize};
    const LpOutcome out = solve_lp(lp, opts);
    res.status = out.status;
    if (out.status != LpStatus::Optimal) return res;
    res.x = out.solution;
    res.value = out.value;

    // probe the optimal face {Ax = y, 1^T x = value, x >= 0}
    double face_value = 0.0;
    for (double v : res.x) face_value += v;
    DenseMatrix face(a.rows() + 1, a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) face(i, j) = a(i, j);
    for (std::size_t j = 0; j < a.cols(); ++j) face(a.rows(), j) = 1.0;
    Vec face_rhs = y;
    face_rhs.push_back(face_value);

    CounterRng rng(Seed{0x756e69636f6e65ull, 1}); // fixed probe stream
    const Vec g = rng.gaussian_vector(a.cols());
    const LpOutcome lo = solve_lp(LinearProgram{g, face, face_rhs, Sense::Minimize}, opts);
    const LpOutcome hi = solve_lp(LinearProgram{g, face, face_rhs, Sense::Maximize}, opts);
    if (lo.status != LpStatus::Optimal || hi.status != LpStatus::Optimal)
        throw NumericalError("l1_recover: face probe did not solve", 0.0);
    res.unique_minimizer = (hi.value - lo.value) <= detail::spread_tol(lo.value);
    return res;
}

// ---------------------------------------------------------------------------
// null-space support property (Thm-2-style bullet three)

struct SupportPropertyResult {
    bool holds = true;
    Vec violating_vector;                      // nonzero null vector, set iff !holds
    std::vector<std::size_t> violating_subset; // support candidate that failed
};

namespace detail {

/// Feasibility of a null vector whose positive support lies inside P:
/// u supported on P, v on the complement, A(u - v) = 0, 1^T u = 1.
inline std::optional<Vec> small_positive_support_vector(const DenseMatrix& a,
                                                        const std::vector<std::size_t>& p,
                                                        const SimplexOptions& opts) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    std::vector<bool> in_p(n, false);
    for (std::size_t j : p) in_p[j] = true;

    DenseMatrix sys(m + 1, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) sys(i, j) = in_p[j] ? a(i, j) : -a(i, j);
    for (std::size_t j = 0; j < n; ++j) sys(m, j) = in_p[j] ? 1.0 : 0.0;
    Vec rhs(m + 1, 0.0);
    rhs[m] = 1.0;

    const FeasibilityResult feas =
        check_feasible(sys, rhs, std::vector<VarSign>(n, VarSign::NonNeg), opts);
    if (!feas.feasible) return std::nullopt;
    Vec w(n);
    for (std::size_t j = 0; j < n; ++j) w[j] = in_p[j] ? feas.witness[j] : -feas.witness[j];
    return w;
}

} // namespace detail

/// Does every nonzero null vector of A have positive and negative supports of
/// size at least k+1? The null space is symmetric under negation, so checking
/// small positive supports (plus the one-sided special case) covers both
/// sides of the property.
inline SupportPropertyResult null_space_support_property(const DenseMatrix& a, std::size_t k,
                                                         const SimplexOptions& opts = {}) {
    const std::size_t n = a.cols();
    SupportPropertyResult res;

    const DenseMatrix basis = null_space_basis(a);
    if (basis.cols() == 0) return res; // trivial null space: holds for every k

    // one-sided null vectors violate the property at every k
    {
        DenseMatrix sys(a.rows() + 1, n);
        for (std::size_t i = 0; i < a.rows(); ++i)
            for (std::size_t j = 0; j < n; ++j) sys(i, j) = a(i, j);
        for (std::size_t j = 0; j < n; ++j) sys(a.rows(), j) = 1.0;
        Vec rhs(a.rows() + 1, 0.0);
        rhs[a.rows()] = 1.0;
        const FeasibilityResult feas =
            check_feasible(sys, rhs, std::vector<VarSign>(n, VarSign::NonNeg), opts);
        if (feas.feasible) {
            res.holds = false;
            res.violating_vector = feas.witness;
            return res;
        }
    }

    if (k == 0) return res;

    if (k >= n) { // supports of size >= n+1 are impossible, any null vector violates
        res.holds = false;
        res.violating_vector = basis.column(0);
        return res;
    }

    enforce_enumeration_guard(n, k, "null_space_support_property");
    for_each_subset(n, k, [&](const std::vector<std::size_t>& p) {
        if (auto w = detail::small_positive_support_vector(a, p, opts)) {
            res.holds = false;
            res.violating_vector = std::move(*w);
            res.violating_subset = p;
            return false;
        }
        return true;
    });
    return res;
}

// ---------------------------------------------------------------------------
// neighborliness (Thm-2-style bullet two)

struct NeighborlinessResult {
    bool holds = true;
    bool vertex_check_failed = false;
    std::vector<std::size_t> violating_vertices; // column set that failed
};

/// (a) every column is a vertex of the column hull; (b) every k-subset spans
/// a face. Both are margin-form feasibility systems: the face system is
/// homogeneous in (alpha, c), so a unit margin loses no generality.
inline NeighborlinessResult neighborliness_check(const DenseMatrix& a, std::size_t k,
                                                 const SimplexOptions& opts = {}) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    NeighborlinessResult res;

    const std::vector<VarSign> alpha_signs(m, VarSign::Free);
    for (std::size_t i = 0; i < n; ++i) {
        // alpha^T (a_i - a_j) - s_j = 1 for all j != i
        DenseMatrix sys(n - 1, m + n - 1);
        Vec rhs(n - 1, 1.0);
        std::size_t row = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            for (std::size_t col = 0; col < m; ++col) sys(row, col) = a(col, i) - a(col, j);
            sys(row, m + row) = -1.0;
            ++row;
        }
        std::vector<VarSign> signs = alpha_signs;
        signs.insert(signs.end(), n - 1, VarSign::NonNeg);
        if (!check_feasible(sys, rhs, signs, opts).feasible) {
            res.holds = false;
            res.vertex_check_failed = true;
            res.violating_vertices = {i};
            return res;
        }
    }

    if (k == 0) return res;
    enforce_enumeration_guard(n, k, "neighborliness_check");

    for_each_subset(n, k, [&](const std::vector<std::size_t>& subset) {
        std::vector<bool> in_set(n, false);
        for (std::size_t j : subset) in_set[j] = true;

        // alpha^T a_i = c on the subset, alpha^T a_j <= c - 1 off it
        const std::size_t slack = n - subset.size();
        DenseMatrix sys(n, m + 1 + slack);
        Vec rhs(n, 0.0);
        std::size_t srow = 0;
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t col = 0; col < m; ++col) sys(j, col) = a(col, j);
            sys(j, m) = -1.0; // -c
            if (!in_set[j]) {
                sys(j, m + 1 + srow) = 1.0;
                rhs[j] = -1.0;
                ++srow;
            }
        }
        std::vector<VarSign> signs(m + 1, VarSign::Free);
        signs.insert(signs.end(), slack, VarSign::NonNeg);
        if (!check_feasible(sys, rhs, signs, opts).feasible) {
            res.holds = false;
            res.violating_vertices = subset;
            return false;
        }
        return true;
    });
    return res;
}

// ---------------------------------------------------------------------------
// small closed forms

/// Least row count compatible with the all-p-sparse singleton property.
inline std::size_t min_rows_bound(std::size_t p) { return 2 * p + 1; }

/// Probability that 0 lies in the convex hull of n independent centered
/// Gaussian points in R^m: 1 - 2^{-(n-1)} * sum_{k<m} C(n-1, k).
/// Exact 128-bit integer arithmetic up to n = 127, log-domain beyond.
inline double wendel_probability(std::size_t m, std::size_t n) {
    if (m < 1 || n < 1) throw ContractViolation("wendel_probability: need m, n >= 1");
    if (m >= n) return 0.0;

    if (n <= 127) {
        unsigned __int128 sum = 0;
        unsigned __int128 binom = 1; // C(n-1, 0)
        for (std::size_t j = 0; j < m; ++j) {
            sum += binom;
            binom = binom * (n - 1 - j) / (j + 1);
        }
        const unsigned __int128 total = static_cast<unsigned __int128>(1) << (n - 1);
        const long double p =
            static_cast<long double>(total - sum) / static_cast<long double>(total);
        return std::clamp(static_cast<double>(p), 0.0, 1.0);
    }

    // log-domain: log sum_{k<m} C(n-1,k) via a running logsumexp
    double log_sum = -std::numeric_limits<double>::infinity();
    double log_binom = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        const double hi = std::max(log_sum, log_binom);
        log_sum = hi + std::log(std::exp(log_sum - hi) + std::exp(log_binom - hi));
        log_binom += std::log(static_cast<double>(n - 1 - j)) - std::log(static_cast<double>(j + 1));
    }
    const double log_total = static_cast<double>(n - 1) * std::log(2.0);
    return std::clamp(-std::expm1(log_sum - log_total), 0.0, 1.0);
}

/// Brute-force restricted-isometry constant at support size q under the
/// sqrt(m), non-squared normalization: the worst relative distortion of the
/// singular values of A_T / sqrt(m) over all supports |T| = q.
inline double rip_constant_brute(const DenseMatrix& a, std::size_t q) {
    const std::size_t n = a.cols();
    const std::size_t m = a.rows();
    if (q < 1 || q > std::min(m, n))
        throw ContractViolation("rip_constant_brute: need 1 <= q <= min(m, n)");
    enforce_enumeration_guard(n, q, "rip_constant_brute");

    const double root_m = std::sqrt(static_cast<double>(m));
    double delta = 0.0;
    for_each_subset(n, q, [&](const std::vector<std::size_t>& t) {
        SymMatrix gram(q);
        for (std::size_t i = 0; i < q; ++i)
            for (std::size_t j = i; j < q; ++j) {
                double s = 0.0;
                for (std::size_t r = 0; r < m; ++r) s += a(r, t[i]) * a(r, t[j]);
                gram.set(i, j, s);
            }
        const EigResult e = sym_eigs(gram);
        const double smin = std::sqrt(std::max(e.eigenvalues.front(), 0.0)) / root_m;
        const double smax = std::sqrt(std::max(e.eigenvalues.back(), 0.0)) / root_m;
        delta = std::max({delta, 1.0 - smin, smax - 1.0});
        return true;
    });
    return delta;
}

} // namespace unicone
