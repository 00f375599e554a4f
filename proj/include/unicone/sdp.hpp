#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "unicone/eig.hpp"
#include "unicone/errors.hpp"
#include "unicone/sym_matrix.hpp"
#include "unicone/sym_operator.hpp"
#include "unicone/vec.hpp"

namespace unicone {

/// Frobenius-nearest positive semidefinite matrix: clip negative eigenvalues.
inline SymMatrix project_psd(const SymMatrix& s) {
    const EigResult e = sym_eigs(s);
    return assemble_from_eigs(e, [](double l) { return l > 0.0 ? l : 0.0; });
}

enum class SdpStatus { Optimal, Infeasible, Unbounded, MaxIterations };

struct SdpResiduals {
    double affine = 0.0;        // ||A(X) - b||_2 of the returned matrix
    double min_eigenvalue = 0.0;
};

struct SdpOutcome {
    SdpStatus status = SdpStatus::MaxIterations;
    SymMatrix solution;
    double value = 0.0;
    SdpResiduals residuals;
    long iterations = 0;
};

struct SdpOptions {
    double primal_tol = 1e-6;           // ||x - z||_2 at convergence
    double obj_tol = 1e-7;              // objective change over the window
    int obj_window = 50;
    long max_iterations = 50000;
    double unbounded_threshold = -1e10; // objective below this => unbounded
    double rho = 1.0;
    const SymMatrix* warm_start = nullptr; // optional feasible starting point
    bool enable_ray_detection = true;      // off inside the recession-cone solve
    double stall_gap_floor = 1e-3;         // gap that counts as a stalled run
};

/// Solver context bound to one operator. The scaled-svec constraint matrix
/// and the factorization of its m x m Gram matrix are computed once and are
/// immutable afterwards, so one context can serve many solves (and threads)
/// with different objectives and right-hand sides.
class SdpContext {
public:
    explicit SdpContext(SymOperator op) : op_(std::move(op)), n_(op_.dim()) {
        nsv_ = svec_length(n_);
        const std::size_t m = op_.size();
        rows_ = DenseMatrix(m, nsv_);
        for (std::size_t i = 0; i < m; ++i) {
            const Vec r = svec_scaled(op_.coeff(i));
            for (std::size_t j = 0; j < nsv_; ++j) rows_(i, j) = r[j];
        }
        factor_gram();
    }

    const SymOperator& op() const noexcept { return op_; }
    std::size_t dim() const noexcept { return n_; }

    /// v - M^T G^{-1} M v : orthogonal projection onto {v : M v = 0}.
    Vec project_null(const Vec& v) const {
        Vec mv = rows_.apply(v);
        solve_gram(mv);
        Vec out = v;
        const Vec corr = rows_.apply_transpose(mv);
        for (std::size_t j = 0; j < nsv_; ++j) out[j] -= corr[j];
        return out;
    }

    /// Minimum-norm solution of M x = b (in scaled svec coordinates) and its
    /// consistency residual ||M x - b||.
    std::pair<Vec, double> affine_least_squares(const Vec& b) const {
        Vec y = b;
        solve_gram(y);
        Vec x = rows_.apply_transpose(y);
        const Vec mx = rows_.apply(x);
        double r = 0.0;
        for (std::size_t i = 0; i < mx.size(); ++i) r += (mx[i] - b[i]) * (mx[i] - b[i]);
        return {std::move(x), std::sqrt(r)};
    }

    SdpOutcome minimize(const SymMatrix& d, const Vec& b, const SdpOptions& opts = {}) const {
        return run(d, b, opts, /*negate=*/false);
    }

    /// Maximization is minimization of the negated objective.
    SdpOutcome maximize(const SymMatrix& d, const Vec& b, const SdpOptions& opts = {}) const {
        return run(d, b, opts, /*negate=*/true);
    }

    /// Alternating projections onto the affine set and the PSD cone, from a
    /// given start. Used to repair near-feasible iterates into witnesses.
    SymMatrix polish_feasible(const Vec& b, const SymMatrix& start, long iters = 2000) const {
        Vec x = svec_scaled(start);
        for (long k = 0; k < iters; ++k) {
            x = project_affine(x, b);
            const Vec z = svec_scaled(project_psd(smat_scaled(x, n_)));
            double gap = 0.0;
            for (std::size_t j = 0; j < nsv_; ++j) gap += (x[j] - z[j]) * (x[j] - z[j]);
            x = z;
            if (std::sqrt(gap) <= 1e-10) break;
        }
        return smat_scaled(project_affine(x, b), n_);
    }

private:
    Vec project_affine(const Vec& v, const Vec& b) const {
        Vec mv = rows_.apply(v);
        for (std::size_t i = 0; i < mv.size(); ++i) mv[i] -= b[i];
        solve_gram(mv);
        Vec out = v;
        const Vec corr = rows_.apply_transpose(mv);
        for (std::size_t j = 0; j < nsv_; ++j) out[j] -= corr[j];
        return out;
    }

    void factor_gram() {
        const std::size_t m = op_.size();
        SymMatrix gram(m);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = i; j < m; ++j)
                gram.set(i, j, dot(std::span<const double>(rows_.row_ptr(i), nsv_),
                                   std::span<const double>(rows_.row_ptr(j), nsv_)));

        // Cholesky; on rank deficiency fall back to an eigenvalue
        // pseudo-inverse so redundant measurement rows still project cleanly.
        chol_ = DenseMatrix(m, m);
        double max_diag = 0.0;
        for (std::size_t i = 0; i < m; ++i) max_diag = std::max(max_diag, gram(i, i));
        bool ok = m > 0;
        for (std::size_t i = 0; i < m && ok; ++i) {
            for (std::size_t j = 0; j <= i; ++j) {
                double s = gram(i, j);
                for (std::size_t k = 0; k < j; ++k) s -= chol_(i, k) * chol_(j, k);
                if (i == j) {
                    if (s <= 1e-12 * std::max(max_diag, 1e-300)) {
                        ok = false;
                        break;
                    }
                    chol_(i, i) = std::sqrt(s);
                } else {
                    chol_(i, j) = s / chol_(j, j);
                }
            }
        }
        chol_ok_ = ok;
        if (!ok && m > 0) {
            gram_eig_ = sym_eigs(gram);
            const double lmax = std::max(gram_eig_->eigenvalues.back(), 0.0);
            pinv_.assign(m, 0.0);
            for (std::size_t i = 0; i < m; ++i) {
                const double l = gram_eig_->eigenvalues[i];
                pinv_[i] = (l > 1e-12 * std::max(lmax, 1e-300)) ? 1.0 / l : 0.0;
            }
        }
    }

    /// y <- G^{-1} y (pseudo-inverse when the Gram matrix is singular).
    void solve_gram(Vec& y) const {
        const std::size_t m = y.size();
        if (m == 0) return;
        if (chol_ok_) {
            for (std::size_t i = 0; i < m; ++i) {
                double s = y[i];
                for (std::size_t k = 0; k < i; ++k) s -= chol_(i, k) * y[k];
                y[i] = s / chol_(i, i);
            }
            for (std::size_t i = m; i-- > 0;) {
                double s = y[i];
                for (std::size_t k = i + 1; k < m; ++k) s -= chol_(k, i) * y[k];
                y[i] = s / chol_(i, i);
            }
        } else {
            const DenseMatrix& v = gram_eig_->eigenvectors;
            Vec t(m, 0.0);
            for (std::size_t j = 0; j < m; ++j) {
                double s = 0.0;
                for (std::size_t i = 0; i < m; ++i) s += v(i, j) * y[i];
                t[j] = pinv_[j] * s;
            }
            for (std::size_t i = 0; i < m; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < m; ++j) s += v(i, j) * t[j];
                y[i] = s;
            }
        }
    }

    /// Certified unboundedness test: the recession cone of the feasible set
    /// is {Y >= 0 : A(Y) = 0}, so an improving ray exists exactly when
    ///     min <D, Y>  s.t.  A(Y) = 0, tr(Y) = 1, Y >= 0
    /// is strictly negative. That problem has a compact feasible set, which
    /// is the regime this solver is reliable in. Returns the ray on success.
    std::optional<SymMatrix> find_improving_ray(const SymMatrix& d_internal) const {
        // cone triviality is objective-independent and can be cached forever
        if (recession_trivial_.load(std::memory_order_relaxed) == 1) return std::nullopt;

        std::vector<SymMatrix> coeffs = op_.coeffs();
        coeffs.push_back(SymMatrix::identity(n_));
        const SymOperator augmented(n_, std::move(coeffs));
        Vec b_ray(op_.size() + 1, 0.0);
        b_ray.back() = 1.0;

        SdpOptions inner;
        inner.enable_ray_detection = false;
        inner.max_iterations = 3000;
        inner.stall_gap_floor = 1e-4;
        const SdpOutcome out = SdpContext(augmented).minimize(d_internal, b_ray, inner);
        if (out.status == SdpStatus::Infeasible) {
            recession_trivial_.store(1, std::memory_order_relaxed);
            return std::nullopt;
        }
        // tangential intersections make the last digits slow; a capped solve
        // with clean residuals and a clearly negative value still certifies
        if (out.status != SdpStatus::Optimal && out.status != SdpStatus::MaxIterations)
            return std::nullopt;
        if (out.value >= -1e-4 * (1.0 + d_internal.frobenius_norm())) return std::nullopt;
        if (out.residuals.affine > 1e-5 || out.residuals.min_eigenvalue < -1e-4)
            return std::nullopt;
        recession_trivial_.store(0, std::memory_order_relaxed);
        return out.solution;
    }

    SdpOutcome run(const SymMatrix& dmat, const Vec& b_in, const SdpOptions& opts,
                   bool negate) const {
        if (dmat.dim() != n_) throw ContractViolation("solve_sdp: objective dimension mismatch");
        if (b_in.size() != op_.size()) throw ContractViolation("solve_sdp: rhs size mismatch");

        // Normalize the problem: unit-Frobenius objective, unit rhs. ADMM is
        // scale sensitive and the stopping tolerances are meant for O(1)
        // data. Iterates live in X' = X / bscale; values are restored at
        // the end from the returned matrix.
        const double dscale = std::max(dmat.frobenius_norm(), 1e-12);
        const double bscale = std::max(norm2(b_in), 1.0);
        Vec b = b_in;
        for (double& v : b) v /= bscale;

        Vec d = svec_scaled(dmat);
        for (double& x : d) x /= (negate ? -dscale : dscale);

        SdpOutcome out;
        auto [x_ls, consistency] = affine_least_squares(b);
        if (consistency > 1e-6 * (1.0 + norm2(b))) {
            out.status = SdpStatus::Infeasible;
            return out;
        }

        Vec z(nsv_, 0.0);
        if (opts.warm_start) {
            z = svec_scaled(*opts.warm_start);
            for (double& v : z) v /= bscale;
        } else {
            z = svec_scaled(project_psd(smat_scaled(x_ls, n_)));
        }
        const Vec z_init = z;
        // a feasible warm start rules out infeasibility up front
        bool can_be_infeasible = true;
        if (opts.warm_start) {
            const Vec mz = rows_.apply(z_init);
            double r = 0.0;
            for (std::size_t i = 0; i < mz.size(); ++i) r += (mz[i] - b[i]) * (mz[i] - b[i]);
            can_be_infeasible = std::sqrt(r) > 1e-6 * (1.0 + norm2(b));
        }
        Vec u(nsv_, 0.0);
        Vec x(nsv_, 0.0);
        double rho = opts.rho;

        std::vector<double> obj_hist;
        obj_hist.reserve(4096);
        Vec z_prev = z;

        Vec x_snap;
        double obj_snap = 0.0;
        bool have_snap = false;
        long next_ray_check = 999;
        bool ray_failed = false; // the dive had no certified recession ray
        int restarts = 0;
        const double escape_budget = 10.0 * (1.0 + norm2(z_init));

        double gap = 0.0;
        double best_gap = std::numeric_limits<double>::infinity();
        double best_gap_prev_window = std::numeric_limits<double>::infinity();

        long it = 0;
        for (; it < opts.max_iterations; ++it) {
            // x-update: affine projection of z - u - d/rho
            Vec target(nsv_);
            for (std::size_t j = 0; j < nsv_; ++j) target[j] = z[j] - u[j] - d[j] / rho;
            x = project_affine(target, b);

            // z-update: PSD projection of x + u
            z_prev = z;
            Vec xu(nsv_);
            for (std::size_t j = 0; j < nsv_; ++j) xu[j] = x[j] + u[j];
            z = svec_scaled(project_psd(smat_scaled(xu, n_)));

            double g = 0.0, zmove = 0.0;
            for (std::size_t j = 0; j < nsv_; ++j) {
                const double pr = x[j] - z[j];
                u[j] += pr;
                g += pr * pr;
                const double dz = z[j] - z_prev[j];
                zmove += dz * dz;
            }
            gap = std::sqrt(g);
            zmove = std::sqrt(zmove);
            const double dualr = rho * zmove;

            const double obj = dot(d, x);
            obj_hist.push_back(obj);

            // convergence: primal residual, a settled z iterate, and a
            // stationary objective window (the movement test guards against
            // declaring optimality while the iterate still slides)
            if (gap <= opts.primal_tol && zmove <= opts.primal_tol * (1.0 + norm2(z)) &&
                obj_hist.size() > static_cast<std::size_t>(opts.obj_window)) {
                const double prev = obj_hist[obj_hist.size() - 1 -
                                             static_cast<std::size_t>(opts.obj_window)];
                if (std::abs(obj - prev) <= opts.obj_tol * (1.0 + std::abs(obj))) {
                    out.status = SdpStatus::Optimal;
                    break;
                }
            }

            if (obj < opts.unbounded_threshold) {
                out.status = SdpStatus::Unbounded;
                break;
            }

#ifdef UNICONE_SDP_TRACE
            if (it % 250 == 0)
                std::fprintf(stderr, "[sdp] it=%ld obj=%.6g gap=%.3g dualr=%.3g rho=%.3g nx=%.3g\n",
                             it, obj, gap, dualr, rho, norm2(x));
#endif
            // diving objective plus real drift: run the recession-cone test
            if (opts.enable_ray_detection && it % 500 == 499) {
                if (have_snap && it >= next_ray_check) {
                    next_ray_check = 2 * it; // failures back off exponentially
                    const double dobj = obj - obj_snap;
                    Vec drift = x;
                    for (std::size_t j = 0; j < nsv_; ++j) drift[j] -= x_snap[j];
                    if (dobj < -1e-3 * (1.0 + std::abs(obj)) &&
                        norm2(drift) > 1e-2 * (1.0 + norm2(x))) {
                        SymMatrix d_internal = dmat;
                        if (negate) d_internal = -1.0 * d_internal;
                        if (auto ray = find_improving_ray(d_internal)) {
                            Vec far = x;
                            for (double& v : far) v *= bscale; // back to original units
                            const double t = 1.0 + norm2(far);
                            const Vec rayv = svec_scaled(*ray);
                            for (std::size_t j = 0; j < nsv_; ++j) far[j] += t * rayv[j];
                            out.solution = polish_feasible(b_in, smat_scaled(far, n_));
                            out.status = SdpStatus::Unbounded;
                            break;
                        }
                        ray_failed = true;
                    }
                }
                if (!have_snap) next_ray_check = it + 500;
                x_snap = x;
                obj_snap = obj;
                have_snap = true;
            }

            // a dive with no recession ray means the set is bounded but the
            // penalty is too weak to hold the iterate: restart stiffer
            if (ray_failed && restarts < 4 && norm2(x) > escape_budget) {
                rho = std::min(rho * 32.0, 3e3);
                z = z_init;
                z_prev = z;
                std::fill(u.begin(), u.end(), 0.0);
                obj_hist.clear();
                have_snap = false;
                ray_failed = false;
                next_ray_check = it + 1000;
                best_gap = std::numeric_limits<double>::infinity();
                best_gap_prev_window = std::numeric_limits<double>::infinity();
                ++restarts;
                continue;
            }

            // infeasibility: the alternating gap stalls well above tolerance
            // while the objective has stopped moving
            if (it % 1000 == 999) {
                const double dobj_window =
                    obj_hist.size() > 1000
                        ? std::abs(obj - obj_hist[obj_hist.size() - 1001])
                        : std::numeric_limits<double>::infinity();
                if (can_be_infeasible && it > 3000 &&
                    best_gap > std::max(opts.stall_gap_floor, 100.0 * opts.primal_tol) &&
                    best_gap > 0.99 * best_gap_prev_window &&
                    dobj_window <= 1e-2 * (1.0 + std::abs(obj))) {
                    out.status = SdpStatus::Infeasible;
                    out.iterations = it + 1;
                    return out;
                }
                best_gap_prev_window = best_gap;
                best_gap = std::numeric_limits<double>::infinity();
            }
            best_gap = std::min(best_gap, gap);

            // residual balancing keeps rho in a productive range; after an
            // escape restart the stiff regime is deliberate, so rho may only
            // rise from there
            if (it % 50 == 49) {
                if (gap > 5.0 * dualr && rho < 1e3) {
                    rho *= 2.0;
                    for (double& v : u) v *= 0.5;
                } else if (restarts == 0 && dualr > 5.0 * gap && rho > 1e-3) {
                    rho *= 0.5;
                    for (double& v : u) v *= 2.0;
                }
            }
        }

        out.iterations = std::min(it + 1, opts.max_iterations);
        if (out.solution.dim() == 0) {
            Vec x_orig = x;
            for (double& v : x_orig) v *= bscale;
            // Optimal returns the affine-exact side; capped and
            // threshold-unbounded exits polish their iterates into honest
            // feasible points so callers can still use their values.
            out.solution = (out.status == SdpStatus::Optimal)
                               ? smat_scaled(x_orig, n_)
                               : polish_feasible(b_in, smat_scaled(x_orig, n_));
        }

        const Vec ax = apply_operator(op_, out.solution);
        double ar = 0.0;
        for (std::size_t i = 0; i < ax.size(); ++i) ar += (ax[i] - b_in[i]) * (ax[i] - b_in[i]);
        out.residuals.affine = std::sqrt(ar);
        const EigResult e = sym_eigs(out.solution);
        out.residuals.min_eigenvalue = e.eigenvalues.empty() ? 0.0 : e.eigenvalues.front();

        out.value = out.solution.inner(dmat);
        return out;
    }

    SymOperator op_;
    std::size_t n_ = 0;
    std::size_t nsv_ = 0;
    DenseMatrix rows_; // m x n(n+1)/2, scaled svec of the coefficients
    DenseMatrix chol_;
    bool chol_ok_ = false;
    std::optional<EigResult> gram_eig_;
    Vec pinv_;
    // -1 unknown, 0 nontrivial, 1 trivial; write-once so sharing is benign
    mutable std::atomic<int> recession_trivial_{-1};
};

/// One-shot convenience wrapper; builds a context per call.
inline SdpOutcome solve_sdp(const SymMatrix& d, const SymOperator& op, const Vec& b,
                            const SdpOptions& opts = {}) {
    return SdpContext(op).minimize(d, b, opts);
}

} // namespace unicone
