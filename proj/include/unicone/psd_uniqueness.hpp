#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "unicone/dense_matrix.hpp"
#include "unicone/eig.hpp"
#include "unicone/ensembles.hpp"
#include "unicone/errors.hpp"
#include "unicone/nullspace.hpp"
#include "unicone/rng.hpp"
#include "unicone/sdp.hpp"
#include "unicone/sym_matrix.hpp"
#include "unicone/sym_operator.hpp"
#include "unicone/vec.hpp"

namespace unicone {

// ---------------------------------------------------------------------------
// null space of the operator, in raw upper-triangle coordinates

/// Constraint matrix of the operator over raw svec coordinates: the row for
/// A_i carries (A_i)_jj on diagonal slots and 2 (A_i)_jk on off-diagonal
/// slots, so the flat dot product with svec(X) equals trace(X A_i).
inline DenseMatrix operator_constraint_matrix(const SymOperator& op) {
    const std::size_t n = op.dim();
    const std::size_t nsv = svec_length(n);
    DenseMatrix c(op.size(), nsv);
    for (std::size_t i = 0; i < op.size(); ++i) {
        const SymMatrix& a = op.coeff(i);
        std::size_t k = 0;
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t s = r; s < n; ++s, ++k) c(i, k) = (r == s) ? a(r, r) : 2.0 * a(r, s);
    }
    return c;
}

/// Orthonormal basis (raw svec coordinates) of {svec(Y) : A(Y) = 0}.
inline DenseMatrix operator_null_basis(const SymOperator& op) {
    return null_space_basis(operator_constraint_matrix(op));
}

// ---------------------------------------------------------------------------
// verdicts

enum class PsdSingletonKind { CertifiedSingleton, ProbableSingleton, Refuted, Inconclusive };

struct PsdSingletonVerdict {
    PsdSingletonKind kind = PsdSingletonKind::Inconclusive;
    SymMatrix witness; // second feasible point, set iff Refuted
    std::size_t probes_used = 0;
    std::size_t inconclusive_probes = 0;       // solves that hit the iteration cap
    std::size_t basis_directions_checked = 0;  // exact mode only
    double gap = 0.0;
};

namespace detail {

inline double psd_spread_tol(double vmin, double vmax) {
    return 1e-4 * (1.0 + std::max(std::abs(vmin), std::abs(vmax)));
}

constexpr double kPsdWitnessDistinct = 1e-5; // Frobenius floor for witnesses

inline const SymMatrix& psd_farther_from(const SymMatrix& a, const SymMatrix& b,
                                         const SymMatrix& x0) {
    return (a - x0).frobenius_norm() >= (b - x0).frobenius_norm() ? a : b;
}

/// One side of a min/max probe pair. A capped solve still yields a feasible
/// point whose objective value bounds the true optimum from the inside, so
/// it can support a refutation; it can never support a certificate.
struct ProbeSide {
    bool unbounded = false;
    bool optimal = false;
    bool usable = false; // value comes from a genuinely feasible point
    double value = 0.0;
    const SymMatrix* solution = nullptr;
};

/// The feasibility scale comes from the problem (x0 and b), never from the
/// candidate itself: a runaway iterate must not get to license its own
/// constraint violations.
inline ProbeSide classify_side(const SdpOutcome& out, double feas_scale) {
    ProbeSide s;
    s.solution = &out.solution;
    s.value = out.value;
    switch (out.status) {
    case SdpStatus::Unbounded: s.unbounded = true; break;
    case SdpStatus::Optimal:
        s.optimal = true;
        s.usable = true;
        break;
    case SdpStatus::MaxIterations:
        s.usable = out.residuals.affine <= 1e-5 * feas_scale &&
                   out.residuals.min_eigenvalue >= -1e-5 * feas_scale;
        break;
    case SdpStatus::Infeasible: break; // feasible instances never see this
    }
    return s;
}

} // namespace detail

// ---------------------------------------------------------------------------
// randomized and exact singleton decisions over {X : A(X) = b, X >= 0}

/// Randomized probe: min/max of <D, X> for symmetrized Gaussian D. A spread
/// (or an unbounded direction) refutes; agreement is probabilistic evidence.
/// Solves that hit the iteration cap are counted, never treated as equal.
inline PsdSingletonVerdict probe_singleton_psd(const SdpContext& ctx, const SymMatrix& x0,
                                               std::size_t probes, Seed seed,
                                               const SdpOptions& base_opts = {}) {
    const SymOperator& op = ctx.op();
    if (x0.dim() != op.dim()) throw ContractViolation("probe_singleton_psd: dimension mismatch");
    const Vec b = apply_operator(op, x0);
    const double feas_scale = 1.0 + x0.frobenius_norm() + norm2(b);
    CounterRng rng(seed);

    PsdSingletonVerdict verdict;
    SdpOptions opts = base_opts;
    opts.warm_start = &x0;

    for (std::size_t p = 0; p < probes; ++p) {
        const SymMatrix d = gaussian_sym_matrix(op.dim(), rng);
        verdict.probes_used = p + 1;

        const SdpOutcome lo = ctx.minimize(d, b, opts);
        const detail::ProbeSide ls = detail::classify_side(lo, feas_scale);
        if (ls.unbounded) {
            verdict.kind = PsdSingletonKind::Refuted;
            verdict.witness = lo.solution;
            verdict.gap = std::numeric_limits<double>::infinity();
            return verdict;
        }
        const SdpOutcome hi = ctx.maximize(d, b, opts);
        const detail::ProbeSide hs = detail::classify_side(hi, feas_scale);
        if (hs.unbounded) {
            verdict.kind = PsdSingletonKind::Refuted;
            verdict.witness = hi.solution;
            verdict.gap = std::numeric_limits<double>::infinity();
            return verdict;
        }

        if (ls.usable && hs.usable) {
            const double spread = hs.value - ls.value;
            verdict.gap = std::max(verdict.gap, spread);
            if (spread > detail::psd_spread_tol(ls.value, hs.value)) {
                verdict.kind = PsdSingletonKind::Refuted;
                verdict.witness = detail::psd_farther_from(hi.solution, lo.solution, x0);
                return verdict;
            }
        }
        if (!ls.optimal || !hs.optimal) ++verdict.inconclusive_probes;
    }
    verdict.kind = verdict.inconclusive_probes == 0 ? PsdSingletonKind::ProbableSingleton
                                                    : PsdSingletonKind::Inconclusive;
    return verdict;
}

inline PsdSingletonVerdict probe_singleton_psd(const SymOperator& op, const SymMatrix& x0,
                                               std::size_t probes, Seed seed,
                                               const SdpOptions& opts = {}) {
    return probe_singleton_psd(SdpContext(op), x0, probes, seed, opts);
}

/// Deterministic decision up to solver tolerance: range every canonical svec
/// functional over the feasible set. A convex set on which each functional
/// in a spanning family is constant is a point. Any capped solve downgrades
/// a would-be certificate to inconclusive; it never fakes one.
inline PsdSingletonVerdict exact_singleton_psd(const SdpContext& ctx, const SymMatrix& x0,
                                               const SdpOptions& base_opts = {}) {
    const SymOperator& op = ctx.op();
    const std::size_t n = op.dim();
    if (x0.dim() != n) throw ContractViolation("exact_singleton_psd: dimension mismatch");
    const Vec b = apply_operator(op, x0);
    const double feas_scale = 1.0 + x0.frobenius_norm() + norm2(b);

    PsdSingletonVerdict verdict;
    if (operator_null_basis(op).cols() == 0) {
        // the affine set is already a single point and x0 witnesses it
        verdict.kind = PsdSingletonKind::CertifiedSingleton;
        return verdict;
    }

    SdpOptions opts = base_opts;
    opts.warm_start = &x0;
    bool saw_inconclusive = false;

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            SymMatrix e(n);
            e.set(i, j, 1.0);
            ++verdict.basis_directions_checked;

            const SdpOutcome lo = ctx.minimize(e, b, opts);
            const detail::ProbeSide ls = detail::classify_side(lo, feas_scale);
            if (ls.unbounded) {
                verdict.kind = PsdSingletonKind::Refuted;
                verdict.witness = lo.solution;
                verdict.gap = std::numeric_limits<double>::infinity();
                return verdict;
            }
            const SdpOutcome hi = ctx.maximize(e, b, opts);
            const detail::ProbeSide hs = detail::classify_side(hi, feas_scale);
            if (hs.unbounded) {
                verdict.kind = PsdSingletonKind::Refuted;
                verdict.witness = hi.solution;
                verdict.gap = std::numeric_limits<double>::infinity();
                return verdict;
            }

            if (ls.usable && hs.usable) {
                const double spread = hs.value - ls.value;
                verdict.gap = std::max(verdict.gap, spread);
                if (spread > detail::psd_spread_tol(ls.value, hs.value)) {
                    verdict.kind = PsdSingletonKind::Refuted;
                    verdict.witness = detail::psd_farther_from(hi.solution, lo.solution, x0);
                    return verdict;
                }
            }
            if (!ls.optimal || !hs.optimal) saw_inconclusive = true;
        }
    }
    verdict.kind = saw_inconclusive ? PsdSingletonKind::Inconclusive
                                    : PsdSingletonKind::CertifiedSingleton;
    return verdict;
}

inline PsdSingletonVerdict exact_singleton_psd(const SymOperator& op, const SymMatrix& x0,
                                               const SdpOptions& opts = {}) {
    return exact_singleton_psd(SdpContext(op), x0, opts);
}

// ---------------------------------------------------------------------------
// eigenvalue condition on the null space

struct EigConditionReport {
    std::size_t r = 0;
    std::size_t samples = 0;
    bool vacuous = false; // trivial null space: the condition holds outright
    std::size_t min_negative_count = 0;
    std::optional<SymMatrix> refuting_matrix; // present iff min count <= r
};

/// Sample unit-Frobenius null-space matrices (Gaussian coefficients over the
/// orthonormal null basis) and count eigenvalues below -1e-8. Sampling can
/// refute the at-least-(r+1)-negative-eigenvalues condition, never certify it.
inline EigConditionReport eig_condition_sample(const SymOperator& op, std::size_t r,
                                               std::size_t samples, Seed seed) {
    EigConditionReport report;
    report.r = r;

    const DenseMatrix basis = operator_null_basis(op);
    const std::size_t dim = basis.cols();
    if (dim == 0) {
        report.vacuous = true;
        report.min_negative_count = op.dim() + 1;
        return report;
    }

    CounterRng rng(seed);
    report.min_negative_count = op.dim() + 1;
    for (std::size_t s = 0; s < samples; ++s) {
        const Vec g = rng.gaussian_vector(dim);
        Vec y(basis.rows(), 0.0);
        for (std::size_t j = 0; j < dim; ++j)
            for (std::size_t i = 0; i < basis.rows(); ++i) y[i] += basis(i, j) * g[j];
        SymMatrix m = smat(SvecCoords{op.dim(), y});
        const double nrm = m.frobenius_norm();
        if (nrm == 0.0) continue;
        m = (1.0 / nrm) * m;

        const EigResult e = sym_eigs(m);
        const std::size_t negatives = count_negative_eigenvalues(e.eigenvalues, 1e-8);
        ++report.samples;
        if (negatives < report.min_negative_count) {
            report.min_negative_count = negatives;
            if (negatives <= r) report.refuting_matrix = m;
        }
    }
    if (report.min_negative_count > r) report.refuting_matrix.reset();
    return report;
}

// ---------------------------------------------------------------------------
// constructive non-uniqueness from a shallow null direction

struct SecondSolution {
    SymMatrix x;        // PSD, rank at most r
    SymMatrix x_plus_y; // PSD as well, so both are feasible for b = A(x)
};

/// Given a nonzero symmetric Y with at most r negative eigenvalues, build a
/// PSD X of rank <= r such that X + Y is also PSD: diagonalize Y and lift
/// each negative eigenvalue by (-lambda + 1). X and X + Y then witness that
/// the feasible set of any operator annihilating Y is not a singleton at X.
inline SecondSolution construct_second_solution(const SymMatrix& y, std::size_t r) {
    const double scale = y.frobenius_norm();
    if (scale == 0.0) throw ContractViolation("construct_second_solution: Y must be nonzero");

    const EigResult e = sym_eigs(y);
    const double eig_tol = 1e-8 * scale;
    const std::size_t negatives = count_negative_eigenvalues(e.eigenvalues, eig_tol);
    if (negatives > r)
        throw ContractViolation(
            "construct_second_solution: Y has more than r negative eigenvalues");

    const std::size_t n = y.dim();
    DenseMatrix lifted(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const double l = e.eigenvalues[j];
        const double lift = (l < -eig_tol) ? (-l + 1.0) : 0.0;
        for (std::size_t i = 0; i < n; ++i) lifted(i, j) = e.eigenvectors(i, j) * lift;
    }
    SecondSolution out;
    out.x = SymMatrix::from_full(lifted * e.eigenvectors.transpose());
    out.x_plus_y = out.x + y;
    return out;
}

// ---------------------------------------------------------------------------
// semicircle quantile

namespace detail {

inline double semicircle_density(double x) {
    const double t = 2.0 - x * x;
    return t > 0.0 ? std::sqrt(t) / std::numbers::pi : 0.0;
}

inline double adaptive_simpson(double a, double b, double fa, double fm, double fb, double whole,
                               double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = semicircle_density(lm);
    const double frm = semicircle_density(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adaptive_simpson(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

inline double semicircle_integral(double a, double b) {
    if (a == b) return 0.0;
    const double fa = semicircle_density(a);
    const double fb = semicircle_density(b);
    const double fm = semicircle_density(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return adaptive_simpson(a, b, fa, fm, fb, whole, 1e-12, 48);
}

} // namespace detail

/// Fraction of the radius-sqrt(2) semicircle law lying below c. Exactly 0.5
/// at c = 0 by the signed-integral construction.
inline double semicircle_alpha(double c) {
    const double radius = std::sqrt(2.0);
    if (c <= -radius) return 0.0;
    if (c >= radius) return 1.0;
    return std::clamp(0.5 + detail::semicircle_integral(0.0, c), 0.0, 1.0);
}

/// Inverse quantile by bisection to 1e-10.
inline double semicircle_c(double alpha1) {
    if (!(alpha1 >= 0.0 && alpha1 <= 1.0))
        throw ContractViolation("semicircle_c: alpha must lie in [0, 1]");
    const double radius = std::sqrt(2.0);
    if (alpha1 <= 0.0) return -radius;
    if (alpha1 >= 1.0) return radius;
    double lo = -radius, hi = radius;
    while (hi - lo > 1e-10) {
        const double mid = 0.5 * (lo + hi);
        (semicircle_alpha(mid) < alpha1 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace unicone
