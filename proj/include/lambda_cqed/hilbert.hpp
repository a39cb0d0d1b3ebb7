#pragma once

#include <complex>
#include <stdexcept>

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <unsupported/Eigen/KroneckerProduct>

namespace lcqed {

using Complex = std::complex<double>;
/// Operator on the atomic, cavity, or composite Hilbert space. Sparse; the
/// dimension is carried by the matrix itself.
using QOperator = Eigen::SparseMatrix<Complex>;
using DenseMatrix = Eigen::MatrixXcd;

inline QOperator identity_op(int dim) {
    QOperator id(dim, dim);
    id.setIdentity();
    return id;
}

/// Cavity annihilation operator on the truncated space |0>..|n_fock>:
/// a[k, k+1] = sqrt(k+1).
inline QOperator annihilator(int n_fock) {
    if (n_fock < 0) throw std::invalid_argument("annihilator: n_fock must be >= 0");
    QOperator a(n_fock + 1, n_fock + 1);
    for (int k = 0; k < n_fock; ++k) a.insert(k, k + 1) = std::sqrt(double(k + 1));
    a.makeCompressed();
    return a;
}

/// Photon number operator, diag(0, 1, ..., n_fock).
inline QOperator number_op(int n_fock) {
    QOperator n(n_fock + 1, n_fock + 1);
    for (int k = 1; k <= n_fock; ++k) n.insert(k, k) = double(k);
    n.makeCompressed();
    return n;
}

/// Atomic transition operator sigma_ij = |i><j| in the basis |1>, |2>, |3>.
inline QOperator sigma(int i, int j) {
    if (i < 1 || i > 3 || j < 1 || j > 3)
        throw std::invalid_argument("sigma: levels must be in {1,2,3}");
    QOperator s(3, 3);
    s.insert(i - 1, j - 1) = 1.0;
    s.makeCompressed();
    return s;
}

inline QOperator adjoint(const QOperator& op) { return QOperator(op.adjoint()); }

/// Composite index of |level, n>: atom-major ordering, level in {1,2,3}.
inline int composite_index(int level, int n, int n_fock) {
    return (level - 1) * (n_fock + 1) + n;
}

/// Inverse of composite_index.
inline std::pair<int, int> composite_levels(int index, int n_fock) {
    const int per = n_fock + 1;
    return {index / per + 1, index % per};
}

/// Tensor-product embedding into the composite space, atom factor first.
/// Basis ordering |level> (x) |n|, index = (level-1)(n_fock+1) + n.
inline QOperator embed(const QOperator& atom_op, const QOperator& cavity_op) {
    if (atom_op.rows() != 3 || atom_op.cols() != 3)
        throw std::invalid_argument("embed: atom operator must be 3x3");
    if (cavity_op.rows() != cavity_op.cols())
        throw std::invalid_argument("embed: cavity operator must be square");
    return Eigen::kroneckerProduct(atom_op, cavity_op).eval();
}

inline QOperator embed_atom(const QOperator& atom_op, int n_fock) {
    return embed(atom_op, identity_op(n_fock + 1));
}

inline QOperator embed_cavity(const QOperator& cavity_op) {
    return embed(identity_op(3), cavity_op);
}

}  // namespace lcqed
