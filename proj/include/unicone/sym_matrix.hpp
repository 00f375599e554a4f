#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "unicone/dense_matrix.hpp"
#include "unicone/errors.hpp"
#include "unicone/vec.hpp"

namespace unicone {

/// Real symmetric matrix. Entries are stored as the full n x n array but are
/// kept exactly symmetric: every mutation writes both (i,j) and (j,i).
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(std::size_t dim) : dim_(dim), data_(dim * dim, 0.0) {}

    /// Symmetrize an arbitrary square matrix: S = (M + M^T) / 2, stored with
    /// bit-identical values in mirrored slots.
    static SymMatrix from_full(const DenseMatrix& m) {
        if (m.rows() != m.cols()) throw ContractViolation("SymMatrix: matrix must be square");
        SymMatrix s(m.rows());
        for (std::size_t i = 0; i < m.rows(); ++i)
            for (std::size_t j = i; j < m.cols(); ++j) s.set(i, j, 0.5 * (m(i, j) + m(j, i)));
        return s;
    }

    static SymMatrix identity(std::size_t n) {
        SymMatrix s(n);
        for (std::size_t i = 0; i < n; ++i) s.set(i, i, 1.0);
        return s;
    }

    static SymMatrix diag(const Vec& d) {
        SymMatrix s(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) s.set(i, i, d[i]);
        return s;
    }

    std::size_t dim() const noexcept { return dim_; }

    double operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }

    void set(std::size_t i, std::size_t j, double v) {
        data_[i * dim_ + j] = v;
        data_[j * dim_ + i] = v;
    }

    void add(std::size_t i, std::size_t j, double v) { set(i, j, (*this)(i, j) + v); }

    const Vec& data() const noexcept { return data_; }

    bool is_finite() const { return all_finite(data_); }

    double trace() const {
        double t = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
        return t;
    }

    double frobenius_norm() const { return norm2(data_); }

    /// trace(A * B), the Frobenius inner product of symmetric matrices.
    double inner(const SymMatrix& other) const {
        return dot(data_, other.data_);
    }

    Vec apply(std::span<const double> x) const {
        Vec y(dim_, 0.0);
        for (std::size_t i = 0; i < dim_; ++i) {
            const double* r = data_.data() + i * dim_;
            double s = 0.0;
            for (std::size_t j = 0; j < dim_; ++j) s += r[j] * x[j];
            y[i] = s;
        }
        return y;
    }

    DenseMatrix to_dense() const {
        DenseMatrix m(dim_, dim_);
        m.data() = data_;
        return m;
    }

    friend SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
        SymMatrix s(a.dim_);
        for (std::size_t i = 0; i < s.data_.size(); ++i) s.data_[i] = a.data_[i] + b.data_[i];
        return s;
    }

    friend SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
        SymMatrix s(a.dim_);
        for (std::size_t i = 0; i < s.data_.size(); ++i) s.data_[i] = a.data_[i] - b.data_[i];
        return s;
    }

    friend SymMatrix operator*(double c, const SymMatrix& a) {
        SymMatrix s(a.dim_);
        for (std::size_t i = 0; i < s.data_.size(); ++i) s.data_[i] = c * a.data_[i];
        return s;
    }

private:
    std::size_t dim_ = 0;
    Vec data_;
};

/// Flat index of upper-triangle slot (i,j), i <= j, under row-major ordering
/// over the upper triangle: (0,0),(0,1),...,(0,n-1),(1,1),...,(n-1,n-1).
inline std::size_t svec_index(std::size_t i, std::size_t j, std::size_t n) {
    if (j >= n || i > j) throw ContractViolation("svec_index: need 0 <= i <= j < n");
    return i * n - i * (i + 1) / 2 + j;
}

inline std::size_t svec_length(std::size_t n) { return n * (n + 1) / 2; }

/// Upper triangle of a symmetric matrix flattened into n(n+1)/2 coordinates.
struct SvecCoords {
    std::size_t dim = 0;
    Vec coords;
};

inline SvecCoords svec(const SymMatrix& s) {
    SvecCoords v{s.dim(), Vec(svec_length(s.dim()))};
    std::size_t k = 0;
    for (std::size_t i = 0; i < s.dim(); ++i)
        for (std::size_t j = i; j < s.dim(); ++j) v.coords[k++] = s(i, j);
    return v;
}

inline SymMatrix smat(const SvecCoords& v) {
    if (v.coords.size() != svec_length(v.dim))
        throw ContractViolation("smat: coordinate count does not match dimension");
    SymMatrix s(v.dim);
    std::size_t k = 0;
    for (std::size_t i = 0; i < v.dim; ++i)
        for (std::size_t j = i; j < v.dim; ++j) s.set(i, j, v.coords[k++]);
    return s;
}

// Scaled svec coordinates: off-diagonal entries multiplied by sqrt(2) so the
// flat Euclidean dot product equals the Frobenius inner product. Used by the
// SDP solver, where affine projections must be isometric to matrix space.

inline Vec svec_scaled(const SymMatrix& s) {
    static const double kRoot2 = std::sqrt(2.0);
    Vec v(svec_length(s.dim()));
    std::size_t k = 0;
    for (std::size_t i = 0; i < s.dim(); ++i)
        for (std::size_t j = i; j < s.dim(); ++j) v[k++] = (i == j) ? s(i, j) : kRoot2 * s(i, j);
    return v;
}

inline SymMatrix smat_scaled(std::span<const double> v, std::size_t n) {
    static const double kInvRoot2 = 1.0 / std::sqrt(2.0);
    SymMatrix s(n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j, ++k) s.set(i, j, (i == j) ? v[k] : kInvRoot2 * v[k]);
    return s;
}

} // namespace unicone
