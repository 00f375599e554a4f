#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "unicone/errors.hpp"
#include "unicone/vec.hpp"

namespace unicone {

/// Dense real matrix, row-major storage. The workhorse type for measurement
/// matrices and every piece of dense linear algebra in the library.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    double* row_ptr(std::size_t i) { return data_.data() + i * cols_; }
    const double* row_ptr(std::size_t i) const { return data_.data() + i * cols_; }

    const Vec& data() const noexcept { return data_; }
    Vec& data() noexcept { return data_; }

    bool is_finite() const { return all_finite(data_); }

    Vec column(std::size_t j) const {
        Vec c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    /// A * x
    Vec apply(std::span<const double> x) const {
        Vec y(rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i) {
            const double* r = row_ptr(i);
            double s = 0.0;
            for (std::size_t j = 0; j < cols_; ++j) s += r[j] * x[j];
            y[i] = s;
        }
        return y;
    }

    /// A^T * y
    Vec apply_transpose(std::span<const double> y) const {
        Vec x(cols_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i) {
            const double* r = row_ptr(i);
            axpy(y[i], std::span<const double>(r, cols_), x);
        }
        return x;
    }

    DenseMatrix transpose() const {
        DenseMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    double frobenius_norm() const { return norm2(data_); }
    double max_abs() const { return norm_inf(data_); }

    friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
        DenseMatrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const double aik = a(i, k);
                if (aik == 0.0) continue;
                const double* brow = b.row_ptr(k);
                double* crow = c.row_ptr(i);
                for (std::size_t j = 0; j < b.cols_; ++j) crow[j] += aik * brow[j];
            }
        }
        return c;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    Vec data_;
};

/// Repo-wide matrix text format: first line "rows cols", then one line of
/// whitespace-separated entries per row.
inline void write_matrix(std::ostream& os, const DenseMatrix& a) {
    os << a.rows() << ' ' << a.cols() << '\n';
    os.precision(17);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (j) os << ' ';
            os << a(i, j);
        }
        os << '\n';
    }
}

inline DenseMatrix read_matrix(std::istream& is) {
    std::size_t rows = 0, cols = 0;
    if (!(is >> rows >> cols)) throw ContractViolation("matrix header: expected 'rows cols'");
    DenseMatrix a(rows, cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            if (!(is >> a(i, j)))
                throw ContractViolation("matrix body: expected " + std::to_string(rows * cols) +
                                        " entries");
    if (!a.is_finite()) throw ContractViolation("matrix entries must be finite");
    return a;
}

inline void write_matrix_file(const std::string& path, const DenseMatrix& a) {
    std::ofstream os(path);
    if (!os) throw ContractViolation("cannot open for writing: " + path);
    write_matrix(os, a);
}

inline DenseMatrix read_matrix_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ContractViolation("cannot open for reading: " + path);
    return read_matrix(is);
}

} // namespace unicone
