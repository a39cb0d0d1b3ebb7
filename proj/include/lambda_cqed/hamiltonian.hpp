#pragma once

#include <Eigen/Dense>

#include "lambda_cqed/hilbert.hpp"
#include "lambda_cqed/params.hpp"

namespace lcqed {

/// Rotating-frame Hamiltonian of the driven, coupled system (hbar = 1):
///   H = Dc a'a + D1 s33 + (D1-D2) s22 + (g s31 a + Omega s32 + eta a + H.c.)
/// The probe drive acts on the cavity as eta (a + a'), which is the only
/// Hermitian reading of the drive term.
inline QOperator build_hamiltonian(const SystemParams& p) {
    p.validate();
    const int N = p.n_fock;
    const QOperator a = annihilator(N);
    const QOperator n_cav = number_op(N);

    QOperator h = p.delta_c * embed_cavity(n_cav);
    h += p.delta_1 * embed_atom(sigma(3, 3), N);
    h += (p.delta_1 - p.delta_2) * embed_atom(sigma(2, 2), N);

    QOperator v = p.g * embed(sigma(3, 1), a);
    v += p.omega_free * embed_atom(sigma(3, 2), N);
    v += p.eta * embed_cavity(a);
    h += v + QOperator(v.adjoint());
    h.makeCompressed();
    return h;
}

/// 3x3 excitation-manifold block of the undriven (eta -> 0) Hamiltonian in
/// the basis (|1,n+1>, |2,n>, |3,n>):
///   diag((n+1)Dc, nDc + D1 - D2, nDc + D1),
///   couplings g sqrt(n+1) on 1<->3 and Omega on 2<->3.
inline Eigen::Matrix3cd block_matrix(int n, const SystemParams& p) {
    if (n < 0) throw std::invalid_argument("block_matrix: n must be >= 0");
    const double G = p.g * std::sqrt(double(n + 1));
    Eigen::Matrix3cd m = Eigen::Matrix3cd::Zero();
    m(0, 0) = (n + 1) * p.delta_c;
    m(1, 1) = n * p.delta_c + p.delta_1 - p.delta_2;
    m(2, 2) = n * p.delta_c + p.delta_1;
    m(0, 2) = G;
    m(2, 0) = G;
    m(1, 2) = p.omega_free;
    m(2, 1) = p.omega_free;
    return m;
}

}  // namespace lcqed
