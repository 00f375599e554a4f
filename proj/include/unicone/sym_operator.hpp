#pragma once

#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "unicone/errors.hpp"
#include "unicone/sym_matrix.hpp"
#include "unicone/vec.hpp"

namespace unicone {

/// Linear map on n x n symmetric matrices, given as m symmetric coefficient
/// matrices: the i-th measurement of X is trace(X * A_i).
class SymOperator {
public:
    SymOperator() = default;
    SymOperator(std::size_t dim, std::vector<SymMatrix> coeffs)
        : dim_(dim), coeffs_(std::move(coeffs)) {
        for (const SymMatrix& c : coeffs_) {
            if (c.dim() != dim_)
                throw ContractViolation("SymOperator: coefficient dimension mismatch");
            if (!c.is_finite()) throw ContractViolation("SymOperator: coefficients must be finite");
        }
    }

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return coeffs_.size(); }
    const SymMatrix& coeff(std::size_t i) const { return coeffs_[i]; }
    const std::vector<SymMatrix>& coeffs() const noexcept { return coeffs_; }

    /// True when m <= n(n+1)/2, the underdetermined regime this library is
    /// about. Larger m is allowed but flagged by callers that care.
    bool underdetermined() const noexcept { return size() <= svec_length(dim_); }

private:
    std::size_t dim_ = 0;
    std::vector<SymMatrix> coeffs_;
};

/// b_i = trace(X * A_i).
inline Vec apply_operator(const SymOperator& op, const SymMatrix& x) {
    if (x.dim() != op.dim()) throw ContractViolation("apply_operator: dimension mismatch");
    Vec b(op.size());
    for (std::size_t i = 0; i < op.size(); ++i) b[i] = op.coeff(i).inner(x);
    return b;
}

/// Operator text format: header "n m", then the m coefficient matrices in the
/// repo matrix format.
inline void write_operator(std::ostream& os, const SymOperator& op) {
    os << op.dim() << ' ' << op.size() << '\n';
    for (std::size_t i = 0; i < op.size(); ++i) write_matrix(os, op.coeff(i).to_dense());
}

inline SymOperator read_operator(std::istream& is) {
    std::size_t n = 0, m = 0;
    if (!(is >> n >> m)) throw ContractViolation("operator header: expected 'n m'");
    std::vector<SymMatrix> coeffs;
    coeffs.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        DenseMatrix d = read_matrix(is);
        if (d.rows() != n || d.cols() != n)
            throw ContractViolation("operator coefficient has wrong dimension");
        coeffs.push_back(SymMatrix::from_full(d));
    }
    return SymOperator(n, std::move(coeffs));
}

inline void write_operator_file(const std::string& path, const SymOperator& op) {
    std::ofstream os(path);
    if (!os) throw ContractViolation("cannot open for writing: " + path);
    write_operator(os, op);
}

inline SymOperator read_operator_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ContractViolation("cannot open for reading: " + path);
    return read_operator(is);
}

} // namespace unicone
