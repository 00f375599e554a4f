#pragma once

#include <algorithm>
#include <cstddef>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include "unicone/dense_matrix.hpp"
#include "unicone/errors.hpp"
#include "unicone/vec.hpp"

namespace unicone {

enum class LpStatus { Optimal, Infeasible, Unbounded };

enum class Sense { Minimize, Maximize };

/// Standard-form program: optimize c^T x subject to A x = b, x >= 0.
struct LinearProgram {
    Vec objective;
    DenseMatrix constraints;
    Vec rhs;
    Sense sense = Sense::Minimize;
};

struct LpOutcome {
    LpStatus status = LpStatus::Optimal;
    Vec solution;     // basic feasible point when Optimal (also set when Unbounded)
    double value = 0; // objective at solution (in the caller's sense) when Optimal
    Vec ray;          // nonempty iff Unbounded: feasible direction improving the objective
};

struct SimplexOptions {
    double tol = 1e-8;       // feasibility / optimality tolerance on residuals
    double pivot_tol = 1e-9; // entries below this never pivot
    long max_pivots = 0;     // 0: derived from problem size
    bool verbose = false;    // dump tableaus (debugging aid)
};

namespace detail {

/// Dense two-phase simplex tableau. Artificial variables are appended after
/// the n structural columns; once an artificial leaves the basis it is
/// discarded, which keeps phase one sound and cannot mask feasibility.
class SimplexTableau {
public:
    SimplexTableau(const LinearProgram& lp, const SimplexOptions& opts)
        : opts_(opts), m_(lp.constraints.rows()), n_(lp.constraints.cols()) {
        if (lp.objective.size() != n_ || lp.rhs.size() != m_)
            throw ContractViolation("solve_lp: inconsistent dimensions");
        if (!lp.constraints.is_finite() || !all_finite(lp.objective) || !all_finite(lp.rhs))
            throw ContractViolation("solve_lp: data must be finite");

        cost_ = lp.objective;
        if (lp.sense == Sense::Maximize)
            for (double& c : cost_) c = -c;

        width_ = n_ + m_ + 1; // structural + artificial + rhs
        tab_.assign(m_ * width_, 0.0);
        basis_.resize(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            const bool neg = lp.rhs[i] < 0.0;
            for (std::size_t j = 0; j < n_; ++j)
                at(i, j) = neg ? -lp.constraints(i, j) : lp.constraints(i, j);
            at(i, n_ + i) = 1.0;
            rhs(i) = neg ? -lp.rhs[i] : lp.rhs[i];
            basis_[i] = n_ + i;
        }

        max_pivots_ = opts.max_pivots > 0
                          ? opts.max_pivots
                          : 200000 + 400 * static_cast<long>(m_ + n_);
        warmup_ = 100 + 5 * static_cast<long>(m_ + n_);
    }

    LpOutcome run(Sense sense) {
        // Phase one: minimize the sum of artificials.
        reduced_.assign(n_, 0.0);
        obj_ = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < n_) continue;
            for (std::size_t j = 0; j < n_; ++j) reduced_[j] -= at(i, j);
            obj_ += rhs(i);
        }
        iterate(/*phase1=*/true);

        const double feas_tol = opts_.tol * (1.0 + phase1_scale());
        if (obj_ > feas_tol) return LpOutcome{LpStatus::Infeasible, {}, 0.0, {}};

        drive_out_artificials();

        // Phase two: the real objective, artificial columns banned.
        reduced_ = cost_;
        obj_ = 0.0;
        for (std::size_t i = 0; i < m_; ++i) {
            const double cb = cost_[basis_[i]];
            if (cb == 0.0) continue;
            for (std::size_t j = 0; j < n_; ++j) reduced_[j] -= cb * at(i, j);
            obj_ += cb * rhs(i);
        }
        const std::size_t entering = iterate(/*phase1=*/false);

        LpOutcome out;
        out.solution = extract_solution();
        if (entering != kNone) {
            out.status = LpStatus::Unbounded;
            out.ray = extract_ray(entering);
            return out;
        }
        out.status = LpStatus::Optimal;
        out.value = dot(cost_, out.solution);
        if (sense == Sense::Maximize) out.value = -out.value;
        return out;
    }

private:
    static constexpr std::size_t kNone = static_cast<std::size_t>(-1);

    double& at(std::size_t i, std::size_t j) { return tab_[i * width_ + j]; }
    double at(std::size_t i, std::size_t j) const { return tab_[i * width_ + j]; }
    double& rhs(std::size_t i) { return tab_[i * width_ + width_ - 1]; }
    double rhs(std::size_t i) const { return tab_[i * width_ + width_ - 1]; }

    double phase1_scale() const {
        double s = 0.0;
        for (std::size_t i = 0; i < m_; ++i) s = std::max(s, std::abs(rhs(i)));
        return s;
    }

    /// Pivot loop. Returns kNone on optimality, or the entering column that
    /// certified unboundedness.
    std::size_t iterate(bool phase1) {
        const double rc_tol = 1e-9;
        for (;;) {
            if (++pivots_ > max_pivots_)
                throw NumericalError("solve_lp: pivot limit exceeded", obj_);

            // Entering column: Dantzig while warm, then Bland. Artificials
            // never re-enter in either phase.
            std::size_t e = kNone;
            if (pivots_ <= warmup_) {
                double best = -rc_tol;
                for (std::size_t j = 0; j < n_; ++j)
                    if (reduced_[j] < best) { best = reduced_[j]; e = j; }
            } else {
                for (std::size_t j = 0; j < n_; ++j)
                    if (reduced_[j] < -rc_tol) { e = j; break; }
            }
            if (e == kNone) return kNone;

            // Ratio test; ties go to the smallest basis index (Bland-safe).
            std::size_t prow = kNone;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m_; ++i) {
                const double piv = at(i, e);
                if (piv <= opts_.pivot_tol) continue;
                const double ratio = rhs(i) / piv;
                if (ratio < best_ratio - 1e-12 ||
                    (ratio < best_ratio + 1e-12 &&
                     (prow == kNone || basis_[i] < basis_[prow]))) {
                    best_ratio = ratio;
                    prow = i;
                }
            }
            if (prow == kNone) {
                if (phase1)
                    throw NumericalError("solve_lp: phase-one column unbounded", obj_);
                return e;
            }
            pivot(prow, e);
            if (opts_.verbose) dump(phase1);
        }
    }

    void pivot(std::size_t prow, std::size_t e) {
        double* prowp = &tab_[prow * width_];
        const double piv = prowp[e];
        for (std::size_t j = 0; j < width_; ++j) prowp[j] /= piv;
        prowp[e] = 1.0;

        for (std::size_t i = 0; i < m_; ++i) {
            if (i == prow) continue;
            double* row = &tab_[i * width_];
            const double f = row[e];
            if (f == 0.0) continue;
            for (std::size_t j = 0; j < width_; ++j) row[j] -= f * prowp[j];
            row[e] = 0.0;
            if (row[width_ - 1] < 0.0 && row[width_ - 1] > -1e-11) row[width_ - 1] = 0.0;
        }

        const double f = reduced_[e];
        if (f != 0.0) {
            for (std::size_t j = 0; j < n_; ++j) reduced_[j] -= f * prowp[j];
            reduced_[e] = 0.0;
            obj_ += f * prowp[width_ - 1]; // entering by theta changes obj by f * theta
        }
        basis_[prow] = e;
    }

    /// After phase one: pivot basic artificials onto structural columns, or
    /// drop their rows entirely when redundant.
    void drive_out_artificials() {
        for (std::size_t i = 0; i < m_;) {
            if (basis_[i] < n_) { ++i; continue; }
            double row_scale = 0.0;
            for (std::size_t j = 0; j < n_; ++j) row_scale = std::max(row_scale, std::abs(at(i, j)));
            std::size_t e = kNone;
            for (std::size_t j = 0; j < n_; ++j) {
                if (std::abs(at(i, j)) > std::max(1e-7 * row_scale, opts_.pivot_tol)) { e = j; break; }
            }
            if (e == kNone) {
                erase_row(i); // redundant constraint
                continue;
            }
            // Degenerate pivot (rhs is zero here up to tolerance).
            double* prowp = &tab_[i * width_];
            const double piv = prowp[e];
            for (std::size_t j = 0; j < width_; ++j) prowp[j] /= piv;
            prowp[e] = 1.0;
            for (std::size_t k = 0; k < m_; ++k) {
                if (k == i) continue;
                double* row = &tab_[k * width_];
                const double f = row[e];
                if (f == 0.0) continue;
                for (std::size_t j = 0; j < width_; ++j) row[j] -= f * prowp[j];
                row[e] = 0.0;
            }
            basis_[i] = e;
            ++i;
        }
    }

    void erase_row(std::size_t i) {
        tab_.erase(tab_.begin() + static_cast<std::ptrdiff_t>(i * width_),
                   tab_.begin() + static_cast<std::ptrdiff_t>((i + 1) * width_));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
        --m_;
    }

    Vec extract_solution() const {
        Vec x(n_, 0.0);
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] < n_) x[basis_[i]] = std::max(0.0, rhs(i));
        return x;
    }

    Vec extract_ray(std::size_t e) const {
        Vec ray(n_, 0.0);
        ray[e] = 1.0;
        for (std::size_t i = 0; i < m_; ++i)
            if (basis_[i] < n_) ray[basis_[i]] = std::max(0.0, -at(i, e));
        return ray;
    }

    void dump(bool phase1) const {
        std::cerr << (phase1 ? "[phase1]" : "[phase2]") << " pivot " << pivots_
                  << " obj " << obj_ << '\n';
        for (std::size_t i = 0; i < m_; ++i) {
            std::cerr << "  b" << basis_[i] << " |";
            for (std::size_t j = 0; j < width_; ++j) std::cerr << ' ' << at(i, j);
            std::cerr << '\n';
        }
    }

    SimplexOptions opts_;
    std::size_t m_;
    std::size_t n_;
    std::size_t width_;
    Vec tab_;
    Vec cost_;
    Vec reduced_;
    double obj_ = 0.0;
    std::vector<std::size_t> basis_;
    long pivots_ = 0;
    long max_pivots_ = 0;
    long warmup_ = 0;
};

} // namespace detail

inline LpOutcome solve_lp(const LinearProgram& lp, const SimplexOptions& opts = {}) {
    detail::SimplexTableau tableau(lp, opts);
    return tableau.run(lp.sense);
}

/// Per-variable sign pattern for feasibility queries.
enum class VarSign { NonNeg, NonPos, Free };

struct FeasibilityResult {
    bool feasible = false;
    Vec witness; // satisfies A w = b and the sign pattern when feasible
};

/// Is {x : A x = b, x respects signs} nonempty? Nonpositive variables are
/// negated and free variables split into differences of nonnegatives, then a
/// phase-one solve decides. The witness is mapped back through the transform.
inline FeasibilityResult check_feasible(const DenseMatrix& a, const Vec& b,
                                        const std::vector<VarSign>& signs,
                                        const SimplexOptions& opts = {}) {
    if (signs.size() != a.cols()) throw ContractViolation("check_feasible: one sign per column");
    if (b.size() != a.rows()) throw ContractViolation("check_feasible: rhs size mismatch");

    // (original column, coefficient) per transformed column
    std::vector<std::pair<std::size_t, double>> map;
    for (std::size_t j = 0; j < a.cols(); ++j) {
        switch (signs[j]) {
        case VarSign::NonNeg: map.emplace_back(j, 1.0); break;
        case VarSign::NonPos: map.emplace_back(j, -1.0); break;
        case VarSign::Free:
            map.emplace_back(j, 1.0);
            map.emplace_back(j, -1.0);
            break;
        }
    }

    LinearProgram lp;
    lp.constraints = DenseMatrix(a.rows(), map.size());
    for (std::size_t col = 0; col < map.size(); ++col)
        for (std::size_t i = 0; i < a.rows(); ++i)
            lp.constraints(i, col) = map[col].second * a(i, map[col].first);
    lp.objective.assign(map.size(), 0.0);
    lp.rhs = b;

    const LpOutcome out = solve_lp(lp, opts);
    FeasibilityResult res;
    res.feasible = out.status == LpStatus::Optimal;
    if (res.feasible) {
        res.witness.assign(a.cols(), 0.0);
        for (std::size_t col = 0; col < map.size(); ++col)
            res.witness[map[col].first] += map[col].second * out.solution[col];
    }
    return res;
}

} // namespace unicone
