#pragma once

#include <cstddef>
#include <vector>

#include "unicone/dense_matrix.hpp"
#include "unicone/errors.hpp"
#include "unicone/nullspace.hpp"
#include "unicone/rng.hpp"
#include "unicone/sym_matrix.hpp"
#include "unicone/sym_operator.hpp"
#include "unicone/vec.hpp"

namespace unicone {

/// i.i.d. Bernoulli(p) 0-1 matrix. With append_ones_row set, one extra all-'1'
/// row is appended below the m random rows (total m+1 rows).
inline DenseMatrix bernoulli01(std::size_t m, std::size_t n, double p, bool append_ones_row,
                               Seed seed) {
    if (!(p > 0.0 && p < 1.0)) throw ContractViolation("bernoulli01: density must be in (0,1)");
    CounterRng rng(seed);
    DenseMatrix a(append_ones_row ? m + 1 : m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.next_bernoulli(p) ? 1.0 : 0.0;
    if (append_ones_row)
        for (std::size_t j = 0; j < n; ++j) a(m, j) = 1.0;
    return a;
}

/// i.i.d. standard normal entries.
inline DenseMatrix gaussian_matrix(std::size_t m, std::size_t n, Seed seed) {
    CounterRng rng(seed);
    DenseMatrix a(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = rng.next_gaussian();
    return a;
}

/// One draw of the Gaussian symmetric ensemble: (G + G^T)/2 for G with i.i.d.
/// N(0,1) entries, which puts N(0,1) on the diagonal and N(0,1/2) off it.
inline SymMatrix gaussian_sym_matrix(std::size_t n, CounterRng& rng) {
    DenseMatrix g(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) g(i, j) = rng.next_gaussian();
    return SymMatrix::from_full(g);
}

/// m independent draws of the Gaussian symmetric ensemble, packaged as a
/// linear operator on symmetric matrices.
inline SymOperator gaussian_sym_operator(std::size_t n, std::size_t m, Seed seed) {
    CounterRng rng(seed);
    std::vector<SymMatrix> coeffs;
    coeffs.reserve(m);
    for (std::size_t i = 0; i < m; ++i) coeffs.push_back(gaussian_sym_matrix(n, rng));
    return SymOperator(n, std::move(coeffs));
}

/// Adjacency matrix (m_right x n_left) of a random bipartite graph where each
/// left node picks exactly d distinct right neighbors uniformly at random.
/// A(i, j) = 1 iff right node i is connected to left node j.
inline DenseMatrix random_bipartite(std::size_t n_left, std::size_t m_right, std::size_t d,
                                    Seed seed) {
    if (d > m_right) throw ContractViolation("random_bipartite: left degree exceeds right side");
    CounterRng rng(seed);
    DenseMatrix a(m_right, n_left);
    for (std::size_t j = 0; j < n_left; ++j)
        for (std::size_t r : rng.sample_without_replacement(m_right, d)) a(r, j) = 1.0;
    return a;
}

/// Repeated sampling of unit null vectors of a fixed matrix. The basis is
/// computed once; directions are uniform on the null-space sphere (standard
/// Gaussian coefficients over an orthonormal basis, then normalized).
class NullSampler {
public:
    explicit NullSampler(const DenseMatrix& a) : basis_(null_space_basis(a)) {}

    std::size_t dimension() const noexcept { return basis_.cols(); }
    const DenseMatrix& basis() const noexcept { return basis_; }

    Vec sample(CounterRng& rng) const {
        if (basis_.cols() == 0) throw EmptyNullSpace("NullSampler: null space is trivial");
        const Vec g = rng.gaussian_vector(basis_.cols());
        Vec w(basis_.rows(), 0.0);
        for (std::size_t j = 0; j < basis_.cols(); ++j)
            for (std::size_t i = 0; i < basis_.rows(); ++i) w[i] += basis_(i, j) * g[j];
        const double nrm = norm2(w);
        if (nrm == 0.0) return sample(rng); // astronomically unlikely
        scale(w, 1.0 / nrm);
        return w;
    }

private:
    DenseMatrix basis_;
};

/// One-shot unit-norm null vector of A. Throws EmptyNullSpace when A has
/// full column rank.
inline Vec sample_null_vector(const DenseMatrix& a, Seed seed) {
    NullSampler sampler(a);
    CounterRng rng(seed);
    return sampler.sample(rng);
}

} // namespace unicone
