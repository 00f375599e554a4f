#pragma once

#include <cstddef>

#include "unicone/dense_matrix.hpp"
#include "unicone/eig.hpp"
#include "unicone/sym_matrix.hpp"

namespace unicone {

namespace detail {

/// Gram matrix A^T A as an exactly symmetric matrix.
inline SymMatrix gram(const DenseMatrix& a) {
    const std::size_t n = a.cols();
    SymMatrix g(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.rows(); ++k) s += a(k, i) * a(k, j);
            g.set(i, j, s);
        }
    }
    return g;
}

} // namespace detail

/// Orthonormal basis of {w : Aw = 0}, returned as the columns of an
/// n x nullity matrix (possibly zero columns).
///
/// Rank decisions are made on the eigenvalues of the Gram matrix A^T A:
/// an eigenvalue is treated as zero when it is below tol * lambda_max, with
/// the default tol = 1e-10 * max(rows, cols). Pass tol <= 0 for the default.
inline DenseMatrix null_space_basis(const DenseMatrix& a, double tol = 0.0) {
    if (!a.is_finite()) throw ContractViolation("null_space_basis: matrix must be finite");
    const std::size_t n = a.cols();
    if (n == 0) return DenseMatrix(0, 0);

    const EigResult e = sym_eigs(detail::gram(a));
    const double lambda_max = e.eigenvalues.empty() ? 0.0 : e.eigenvalues.back();
    const double rel = (tol > 0.0) ? tol : 1e-10 * static_cast<double>(std::max(a.rows(), n));
    const double threshold = rel * std::max(lambda_max, 0.0);

    std::size_t nullity = 0;
    while (nullity < n && e.eigenvalues[nullity] <= threshold) ++nullity;

    DenseMatrix basis(n, nullity);
    for (std::size_t j = 0; j < nullity; ++j)
        for (std::size_t i = 0; i < n; ++i) basis(i, j) = e.eigenvectors(i, j);
    return basis;
}

inline std::size_t numerical_rank(const DenseMatrix& a, double tol = 0.0) {
    return a.cols() - null_space_basis(a, tol).cols();
}

} // namespace unicone
