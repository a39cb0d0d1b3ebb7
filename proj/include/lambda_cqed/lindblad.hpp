#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "lambda_cqed/hamiltonian.hpp"
#include "lambda_cqed/hilbert.hpp"
#include "lambda_cqed/params.hpp"

namespace lcqed {

/// Linear map on column-stacked density matrices, dimension d^2 x d^2.
using Superoperator = Eigen::SparseMatrix<Complex>;
using DensityMatrix = Eigen::MatrixXcd;

class SingularSystem : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CutoffNotConverged : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Column-stacking vectorization: vec(A X B) = (B^T kron A) vec(X).
inline Eigen::VectorXcd vec(const DensityMatrix& m) {
    return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

inline DensityMatrix unvec(const Eigen::VectorXcd& v, int d) {
    return Eigen::Map<const DensityMatrix>(v.data(), d, d);
}

/// Superoperator for left multiplication, X -> A X.
inline Superoperator spre(const QOperator& a) {
    return Eigen::kroneckerProduct(identity_op(int(a.rows())), a).eval();
}

/// Superoperator for right multiplication, X -> X B.
inline Superoperator spost(const QOperator& b) {
    return Eigen::kroneckerProduct(QOperator(b.transpose()), identity_op(int(b.rows())))
        .eval();
}

/// Lindblad dissipator of collapse operator C:
///   L_C rho = 2 C rho C' - C'C rho - rho C'C.
inline Superoperator dissipator(const QOperator& c) {
    if (c.rows() != c.cols()) throw std::invalid_argument("dissipator: operator not square");
    const QOperator cdag = adjoint(c);
    const QOperator cdc = QOperator(cdag * c);
    Superoperator out = 2.0 * Superoperator(spre(c) * spost(cdag));
    out -= spre(cdc);
    out -= spost(cdc);
    out.makeCompressed();
    return out;
}

/// Collapse channels of the master equation: (rate, operator) pairs for the
/// cavity and the atomic decay paths. gamma21 enters only when nonzero.
inline std::vector<std::pair<double, QOperator>> collapse_channels(const SystemParams& p) {
    const int N = p.n_fock;
    std::vector<std::pair<double, QOperator>> ch;
    ch.emplace_back(p.kappa, embed_cavity(annihilator(N)));
    ch.emplace_back(p.gamma31, embed_atom(sigma(1, 3), N));
    ch.emplace_back(p.gamma32, embed_atom(sigma(2, 3), N));
    if (p.gamma21 > 0.0) ch.emplace_back(p.gamma21, embed_atom(sigma(1, 2), N));
    return ch;
}

/// Full Liouvillian
///   L[rho] = -i [H, rho] + (kappa/2) L_a + (gamma31/2) L_s13
///            + (gamma32/2) L_s23 (+ (gamma21/2) L_s12).
/// The 1/2 prefactors pair with the 2 C rho C' convention, so kappa is the
/// energy decay rate and the amplitude decays at kappa/2.
inline Superoperator build_liouvillian(const SystemParams& p) {
    const QOperator h = build_hamiltonian(p);
    const Complex i_unit(0.0, 1.0);
    Superoperator L = Superoperator(-i_unit * (spre(h) - spost(h)).eval());
    for (const auto& [rate, c] : collapse_channels(p))
        if (rate > 0.0) L += Superoperator((0.5 * rate) * dissipator(c));
    L.makeCompressed();
    return L;
}

/// Dense evaluation of the master-equation right-hand side; the independent
/// route against which the superoperator composition is tested.
inline DensityMatrix apply_liouvillian_dense(const SystemParams& p, const DensityMatrix& rho) {
    const DenseMatrix h = DenseMatrix(build_hamiltonian(p));
    const Complex i_unit(0.0, 1.0);
    DensityMatrix out = -i_unit * (h * rho - rho * h);
    for (const auto& [rate, cs] : collapse_channels(p)) {
        if (rate <= 0.0) continue;
        const DenseMatrix c = DenseMatrix(cs);
        const DenseMatrix cdag = c.adjoint();
        const DenseMatrix cdc = cdag * c;
        out += (0.5 * rate) * (2.0 * c * rho * cdag - cdc * rho - rho * cdc);
    }
    return out;
}

inline Complex expectation(const DensityMatrix& rho, const QOperator& op) {
    if (rho.rows() != op.rows() || rho.cols() != op.cols())
        throw std::invalid_argument("expectation: dimension mismatch");
    // tr(rho op) via the sparse factor
    Complex tr = 0.0;
    for (int k = 0; k < op.outerSize(); ++k)
        for (QOperator::InnerIterator it(op, k); it; ++it)
            tr += rho(it.col(), it.row()) * it.value();
    return tr;
}

struct SteadyStateOptions {
    double residual_tol = 1e-10;   // on ||L[rho]||_inf relative to ||L||_inf
    double trace_tol = 1e-10;
    double herm_tol = 1e-10;
    double psd_tol = 1e-8;         // minimum eigenvalue >= -psd_tol
    bool check_uniqueness = true;  // second solve with a different pinned row
    double uniqueness_tol = 1e-7;  // max elementwise difference between solves
};

struct SteadyStateResult {
    DensityMatrix rho;
    double residual = 0.0;   // ||L[rho]||_inf / max(1, ||L||_inf)
    double trace_err = 0.0;
    double herm_err = 0.0;
    double min_eigenvalue = 0.0;
};

namespace detail {

inline double inf_norm_rows(const Superoperator& L) {
    Eigen::VectorXd rowsum = Eigen::VectorXd::Zero(L.rows());
    for (int k = 0; k < L.outerSize(); ++k)
        for (Superoperator::InnerIterator it(L, k); it; ++it)
            rowsum(it.row()) += std::abs(it.value());
    return rowsum.maxCoeff();
}

/// Solves the trace-constrained null-space problem with equation `row`
/// replaced by the vectorized trace functional.
inline Eigen::VectorXcd solve_pinned(const Superoperator& L, int d, int row) {
    Superoperator M = L;
    // Zero the chosen row, then write the trace row. Rebuild via triplets to
    // keep the matrix compressed.
    std::vector<Eigen::Triplet<Complex>> trip;
    trip.reserve(M.nonZeros() + d);
    for (int k = 0; k < M.outerSize(); ++k)
        for (Superoperator::InnerIterator it(M, k); it; ++it)
            if (it.row() != row) trip.emplace_back(int(it.row()), int(it.col()), it.value());
    for (int k = 0; k < d; ++k) trip.emplace_back(row, k * (d + 1), Complex(1.0, 0.0));
    Superoperator A(L.rows(), L.cols());
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();

    Eigen::SparseLU<Superoperator> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success)
        throw SingularSystem("steady_state: factorization failed (row " +
                             std::to_string(row) + ")");
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(L.rows());
    b(row) = 1.0;
    Eigen::VectorXcd x = lu.solve(b);
    // One step of iterative refinement.
    Eigen::VectorXcd r = b - A * x;
    x += lu.solve(r);
    return x;
}

}  // namespace detail

/// Exact steady state: the unit-trace null vector of L, via sparse LU on the
/// trace-replaced linear system. Verifies the physical invariants and, when
/// enabled, uniqueness of the null space (a second solve with a different
/// pinned row must agree; disagreement signals a degenerate steady state).
inline SteadyStateResult steady_state(const Superoperator& L,
                                      const SteadyStateOptions& opt = {}) {
    const int d2 = int(L.rows());
    const int d = int(std::lround(std::sqrt(double(d2))));
    if (d * d != d2 || L.cols() != d2)
        throw std::invalid_argument("steady_state: superoperator must be d^2 x d^2");

    Eigen::VectorXcd x = detail::solve_pinned(L, d, 0);
    if (opt.check_uniqueness) {
        const int row2 = d2 - 1;
        Eigen::VectorXcd x2 = detail::solve_pinned(L, d, row2);
        const double diff = (x - x2).cwiseAbs().maxCoeff();
        if (!(diff < opt.uniqueness_tol) || !x.allFinite() || !x2.allFinite())
            throw SingularSystem(
                "steady_state: null space appears multi-dimensional (solve mismatch " +
                std::to_string(diff) + ")");
    }

    SteadyStateResult res;
    DensityMatrix rho = unvec(x, d);
    res.trace_err = std::abs(rho.trace() - Complex(1.0, 0.0));
    res.herm_err = (rho - rho.adjoint().eval()).cwiseAbs().maxCoeff();
    rho = 0.5 * (rho + rho.adjoint().eval());
    rho /= rho.trace().real();

    const double scale = std::max(1.0, detail::inf_norm_rows(L));
    res.residual = (L * vec(rho)).cwiseAbs().maxCoeff() / scale;

    Eigen::SelfAdjointEigenSolver<DensityMatrix> es(rho, Eigen::EigenvaluesOnly);
    res.min_eigenvalue = es.eigenvalues().minCoeff();
    res.rho = std::move(rho);

    if (!(res.trace_err < opt.trace_tol))
        throw SingularSystem("steady_state: trace error " + std::to_string(res.trace_err));
    if (!(res.herm_err < opt.herm_tol))
        throw SingularSystem("steady_state: hermiticity error " +
                             std::to_string(res.herm_err));
    if (!(res.residual < opt.residual_tol))
        throw SingularSystem("steady_state: residual " + std::to_string(res.residual));
    if (!(res.min_eigenvalue > -opt.psd_tol))
        throw SingularSystem("steady_state: negative eigenvalue " +
                             std::to_string(res.min_eigenvalue));
    return res;
}

/// Convenience: steady state of the system described by p.
inline SteadyStateResult steady_state(const SystemParams& p,
                                      const SteadyStateOptions& opt = {}) {
    return steady_state(build_liouvillian(p), opt);
}

/// Steady-state observables at one parameter point.
struct PointObservables {
    double mean_n = 0.0;
    double s11 = 0.0, s22 = 0.0, s33 = 0.0;
    double top_fock = 0.0;  // total population of the |., n_fock> level
    SteadyStateResult solve;
};

inline PointObservables observables_at(const SystemParams& p,
                                       const SteadyStateOptions& opt = {}) {
    PointObservables out;
    out.solve = steady_state(p, opt);
    const DensityMatrix& rho = out.solve.rho;
    const int N = p.n_fock;
    out.mean_n = expectation(rho, embed_cavity(number_op(N))).real();
    out.s11 = expectation(rho, embed_atom(sigma(1, 1), N)).real();
    out.s22 = expectation(rho, embed_atom(sigma(2, 2), N)).real();
    out.s33 = expectation(rho, embed_atom(sigma(3, 3), N)).real();
    for (int level = 1; level <= 3; ++level) {
        const int idx = composite_index(level, N, N);
        out.top_fock += rho(idx, idx).real();
    }
    return out;
}

struct CutoffOptions {
    int ceiling = 40;
    int start = 1;
    SteadyStateOptions solve;
};

/// Smallest n_fock at which, for the parameter point p, (a) the steady-state
/// population of the top Fock level stays below tol and (b) the mean photon
/// number moves by less than tol * max(<n>, 1) when the cutoff grows by 2.
inline int choose_cutoff(const SystemParams& p, double tol, const CutoffOptions& opt = {}) {
    if (!(tol > 0.0)) throw std::invalid_argument("choose_cutoff: tol must be > 0");
    std::vector<double> mean_cache(opt.ceiling + 3, std::nan(""));
    std::vector<double> top_cache(opt.ceiling + 3, std::nan(""));
    auto eval = [&](int n) {
        if (std::isnan(mean_cache[n])) {
            SystemParams q = p;
            q.n_fock = n;
            const auto obs = observables_at(q, opt.solve);
            mean_cache[n] = obs.mean_n;
            top_cache[n] = obs.top_fock;
        }
        return std::pair<double, double>(mean_cache[n], top_cache[n]);
    };
    for (int n = std::max(1, opt.start); n <= opt.ceiling; ++n) {
        const auto [mean_n, top] = eval(n);
        if (!(top < tol)) continue;
        const auto [mean_n2, top2] = eval(n + 2);
        (void)top2;
        if (std::abs(mean_n - mean_n2) < tol * std::max(std::abs(mean_n2), 1.0)) return n;
    }
    throw CutoffNotConverged("choose_cutoff: no converged cutoff below ceiling " +
                             std::to_string(opt.ceiling));
}

}  // namespace lcqed
