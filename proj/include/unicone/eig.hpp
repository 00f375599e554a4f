#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "unicone/dense_matrix.hpp"
#include "unicone/errors.hpp"
#include "unicone/sym_matrix.hpp"
#include "unicone/vec.hpp"

namespace unicone {

/// Eigendecomposition of a symmetric matrix. Eigenvalues are nondecreasing;
/// eigenvectors are the matching orthonormal columns.
struct EigResult {
    Vec eigenvalues;
    DenseMatrix eigenvectors;
};

namespace detail {

/// Sum of absolute values of the strict upper triangle.
inline double off_diag_sum(const Vec& a, std::size_t n) {
    double s = 0.0;
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = p + 1; q < n; ++q) s += std::abs(a[p * n + q]);
    return s;
}

} // namespace detail

/// Cyclic Jacobi rotations. Orthogonality of the eigenvector matrix is
/// guaranteed by construction (it is a product of plane rotations), which is
/// exactly why this solver was chosen over faster alternatives: every
/// certificate downstream leans on V^T V = I.
inline EigResult sym_eigs(const SymMatrix& s, int max_sweeps = 100) {
    const std::size_t n = s.dim();
    if (!s.is_finite()) throw ContractViolation("sym_eigs: matrix must be finite");

    Vec a = s.data();
    DenseMatrix v = DenseMatrix::identity(n);
    if (n <= 1) {
        return EigResult{Vec(a.begin(), a.end()), std::move(v)};
    }

    const double frob = norm2(a);
    const double target = 1e-14 * std::max(1.0, frob);

    int sweep = 0;
    for (; sweep < max_sweeps; ++sweep) {
        const double off = detail::off_diag_sum(a, n);
        if (off <= target) break;

        for (std::size_t p = 0; p < n - 1; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a[p * n + q];
                const double app = a[p * n + p];
                const double aqq = a[q * n + q];

                // Element too small to matter: zero it and move on. After a
                // few sweeps this also prevents chasing rounding noise.
                if (std::abs(apq) <= 1e-300 ||
                    (sweep > 3 && std::abs(apq) <= 1e-17 * (std::abs(app) + std::abs(aqq)))) {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }

                const double theta = 0.5 * (aqq - app) / apq;
                const double t = (theta >= 0.0)
                                     ? 1.0 / (theta + std::sqrt(1.0 + theta * theta))
                                     : 1.0 / (theta - std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double sn = t * c;
                const double tau = sn / (1.0 + c);

                a[p * n + p] = app - t * apq;
                a[q * n + q] = aqq + t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;

                double* rowp = a.data() + p * n;
                double* rowq = a.data() + q * n;
                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = rowp[k];
                    const double akq = rowq[k];
                    const double np = akp - sn * (akq + tau * akp);
                    const double nq = akq + sn * (akp - tau * akq);
                    rowp[k] = np;
                    rowq[k] = nq;
                    a[k * n + p] = np;
                    a[k * n + q] = nq;
                }

                for (std::size_t k = 0; k < n; ++k) {
                    double* rowk = v.row_ptr(k);
                    const double vkp = rowk[p];
                    const double vkq = rowk[q];
                    rowk[p] = vkp - sn * (vkq + tau * vkp);
                    rowk[q] = vkq + sn * (vkp - tau * vkq);
                }
            }
        }
    }

    const double off = detail::off_diag_sum(a, n);
    if (off > 1e-8 * std::max(1.0, frob))
        throw NumericalError("sym_eigs: Jacobi sweeps did not converge", off);

    Vec lambda(n);
    for (std::size_t i = 0; i < n; ++i) lambda[i] = a[i * n + i];

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t l, std::size_t r) { return lambda[l] < lambda[r]; });

    EigResult res;
    res.eigenvalues.resize(n);
    res.eigenvectors = DenseMatrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        res.eigenvalues[j] = lambda[order[j]];
        for (std::size_t i = 0; i < n; ++i) res.eigenvectors(i, j) = v(i, order[j]);
    }
    return res;
}

/// V diag(f(lambda)) V^T for an already computed decomposition.
template <typename F>
SymMatrix assemble_from_eigs(const EigResult& e, F&& f) {
    const std::size_t n = e.eigenvalues.size();
    DenseMatrix scaled(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            scaled(i, j) = e.eigenvectors(i, j) * f(e.eigenvalues[j]);
    DenseMatrix full = scaled * e.eigenvectors.transpose();
    return SymMatrix::from_full(full);
}

/// Number of eigenvalues strictly below -tol.
inline std::size_t count_negative_eigenvalues(const Vec& eigenvalues, double tol) {
    std::size_t c = 0;
    for (double l : eigenvalues)
        if (l < -tol) ++c;
    return c;
}

} // namespace unicone
