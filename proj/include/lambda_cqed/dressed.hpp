#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "lambda_cqed/hamiltonian.hpp"
#include "lambda_cqed/params.hpp"

namespace lcqed {

enum class Branch { minus, zero, plus };

inline const char* branch_name(Branch b) {
    switch (b) {
        case Branch::minus: return "minus";
        case Branch::zero: return "zero";
        case Branch::plus: return "plus";
    }
    return "?";
}

/// One dressed level of excitation manifold n. Amplitudes are the
/// coefficients on (|1,n+1>, |2,n>, |3,n>); energies are rotating-frame,
/// consistent with block_matrix.
struct DressedLevel {
    int n = 0;
    Branch branch = Branch::zero;
    double energy = 0.0;
    std::array<Complex, 3> amplitudes{};
};

struct DressedTriple {
    DressedLevel zero, minus, plus;
};

struct ResonantEnergies {
    double omega0, omega_minus, omega_plus;
};

namespace detail {

inline void require_resonant_raman(const SystemParams& p) {
    if (std::abs(p.delta_2) > 1e-12)
        throw std::domain_error(
            "closed-form dressed states require delta_2 = 0 (|delta_2| <= 1e-12)");
}

/// Rotation angle of the decoupled (dark) manifold eigenvector between
/// |2,n> and |1,n+1>: tan = Omega / (g sqrt(n+1)). Derived from the block
/// matrix itself; differs from mixing_angles' theta, which follows the
/// conventional half-amplitude drive definition.
inline double dark_angle(int n, const SystemParams& p) {
    return std::atan2(p.omega_free, p.g * std::sqrt(double(n + 1)));
}

/// Angle of the bright/excited rotation: tan = 2W / (sqrt(4W^2+d^2) + d)
/// with W^2 = g^2(n+1) + Omega^2 and d = delta_1 - delta_c.
inline double bright_angle(int n, const SystemParams& p) {
    const double W2 = p.g * p.g * (n + 1) + p.omega_free * p.omega_free;
    const double d = p.delta_1 - p.delta_c;
    const double s = std::sqrt(4.0 * W2 + d * d);
    return std::atan2(2.0 * std::sqrt(W2), s + d);
}

}  // namespace detail

/// Closed-form dressed energies for delta_2 = 0, rotating frame:
///   omega0  = n Dc + D1                       (dark/decoupled branch)
///   omega+- = omega0 + (-d +- sqrt(4g^2(n+1) + 4 Omega^2 + d^2)) / 2,
/// with d = delta_1 - delta_c. Exact eigenvalues of block_matrix whenever
/// the dark state decouples (Omega = 0 or delta_1 = delta_c); in the mixed
/// regime the manifold trace is still exact but the individual levels pick
/// up O(Omega^2 d / g^2) corrections and dressed_states_general applies.
inline ResonantEnergies dressed_energies_resonant(int n, const SystemParams& p) {
    if (n < 0) throw std::invalid_argument("dressed_energies_resonant: n must be >= 0");
    detail::require_resonant_raman(p);
    const double d = p.delta_1 - p.delta_c;
    const double W2 = p.g * p.g * (n + 1) + p.omega_free * p.omega_free;
    const double split = std::sqrt(4.0 * W2 + d * d);
    const double omega0 = n * p.delta_c + p.delta_1;
    return {omega0, omega0 + 0.5 * (-d - split), omega0 + 0.5 * (-d + split)};
}

/// Mixing angles as conventionally written for this system:
///   tan(theta_n) = Omega / (2 g sqrt(n+1)),
///   tan(phi_n)   = sqrt(4g^2(n+1)+Omega^2)
///                  / (sqrt(4g^2(n+1)+Omega^2+d^2) - d),  d = delta_1 - delta_c.
/// theta in [0, pi/2), phi in (0, pi). These follow the half-amplitude
/// drive convention; the eigenvector construction below uses the angles of
/// the block matrix directly.
inline std::pair<double, double> mixing_angles(int n, const SystemParams& p) {
    if (p.g == 0.0 && p.omega_free == 0.0)
        throw std::domain_error("mixing_angles: degenerate at g = Omega = 0");
    const double G2 = 4.0 * p.g * p.g * (n + 1) + p.omega_free * p.omega_free;
    const double d = p.delta_1 - p.delta_c;
    const double theta = std::atan2(p.omega_free, 2.0 * p.g * std::sqrt(double(n + 1)));
    const double phi = std::atan2(std::sqrt(G2), std::sqrt(G2 + d * d) - d);
    return {theta, phi};
}

/// Closed-form dressed states for delta_2 = 0 (same validity domain as
/// dressed_energies_resonant). With t = dark_angle and f = bright_angle:
///   |n,0> = -cos t |2,n> + sin t |1,n+1>
///   |n,-> = -sin t cos f |2,n> - cos t cos f |1,n+1> + sin f |3,n>
///   |n,+> =  sin t sin f |2,n> + cos t sin f |1,n+1> + cos f |3,n>
inline DressedTriple dressed_states_resonant(int n, const SystemParams& p) {
    detail::require_resonant_raman(p);
    const auto e = dressed_energies_resonant(n, p);
    const double t = detail::dark_angle(n, p);
    const double f = detail::bright_angle(n, p);
    const double st = std::sin(t), ct = std::cos(t);
    const double sf = std::sin(f), cf = std::cos(f);

    DressedTriple out;
    out.zero = {n, Branch::zero, e.omega0, {st, -ct, 0.0}};
    out.minus = {n, Branch::minus, e.omega_minus, {-ct * cf, -st * cf, sf}};
    out.plus = {n, Branch::plus, e.omega_plus, {ct * sf, st * sf, cf}};
    return out;
}

/// Numerically diagonalized dressed states of manifold n for arbitrary
/// detunings. Levels sorted by ascending energy and labelled
/// (minus, zero, plus) in that order; under near-degeneracy the level with
/// the largest |<2,n|.>| amplitude claims the zero label.
inline DressedTriple dressed_states_general(int n, const SystemParams& p) {
    const Eigen::Matrix3cd m = block_matrix(n, p);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> solver(m);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("dressed_states_general: eigensolver failed");

    std::array<DressedLevel, 3> lv;
    for (int k = 0; k < 3; ++k) {
        lv[k].n = n;
        lv[k].energy = solver.eigenvalues()(k);
        Eigen::Vector3cd v = solver.eigenvectors().col(k);
        // Deterministic phase: largest-magnitude component real positive.
        int imax = 0;
        for (int i = 1; i < 3; ++i)
            if (std::abs(v(i)) > std::abs(v(imax))) imax = i;
        if (std::abs(v(imax)) > 0.0) v *= std::abs(v(imax)) / v(imax);
        for (int i = 0; i < 3; ++i) lv[k].amplitudes[i] = v(i);
    }

    // Eigenvalues come out ascending; resolve the zero label under ties.
    int zero_idx = 1;
    const double scale = std::max({1.0, std::abs(lv[0].energy), std::abs(lv[2].energy)});
    const double tie = 1e-9 * scale;
    std::vector<int> cands;
    for (int k = 0; k < 3; ++k)
        if (std::abs(lv[k].energy - lv[1].energy) <= tie) cands.push_back(k);
    if (cands.size() > 1) {
        zero_idx = *std::max_element(cands.begin(), cands.end(), [&](int a, int b) {
            return std::abs(lv[a].amplitudes[1]) < std::abs(lv[b].amplitudes[1]);
        });
    }
    // Keep energy order for minus/plus; swap contents so labels match.
    if (zero_idx != 1) std::swap(lv[1], lv[zero_idx]);

    lv[0].branch = Branch::minus;
    lv[1].branch = Branch::zero;
    lv[2].branch = Branch::plus;
    return {lv[1], lv[0], lv[2]};
}

/// Energies of the probe-dressed dark-state doublet at resonant coupling
/// (delta_1 = delta_c): (-eta sqrt(n+1), +eta sqrt(n+1)).
inline std::pair<double, double> raman_dressed_energies(int n, const SystemParams& p) {
    if (n < 0) throw std::invalid_argument("raman_dressed_energies: n must be >= 0");
    const double e = p.eta * std::sqrt(double(n + 1));
    return {-e, e};
}

/// Predicted multiphoton Raman transition positions +-eta/sqrt(n+1),
/// n = 0..n_max, sorted ascending.
inline std::vector<double> raman_peak_positions(int n_max, double eta) {
    if (n_max < 0) throw std::invalid_argument("raman_peak_positions: n_max must be >= 0");
    if (eta < 0.0) throw std::invalid_argument("raman_peak_positions: eta must be >= 0");
    std::vector<double> out;
    out.reserve(2 * (n_max + 1));
    for (int n = 0; n <= n_max; ++n) {
        const double v = eta / std::sqrt(double(n + 1));
        out.push_back(-v);
        out.push_back(v);
    }
    std::sort(out.begin(), out.end());
    return out;
}

enum class PeakModel { two_level, three_level };

/// Predicted multiphoton transition positions for diagonal scans,
///   +- sqrt(4 g^2 (n+1) + [Omega^2] + d^2) / (2(n+1)),  d = delta_1 - delta_c,
/// n = 0..n_max, sorted ascending. The Omega^2 term enters for the
/// three-level model only; at d = 0, Omega = 0 this reduces to
/// +- g / sqrt(n+1).
inline std::vector<double> multiphoton_peak_positions(int n_max, const SystemParams& p,
                                                      PeakModel model) {
    if (n_max < 0)
        throw std::invalid_argument("multiphoton_peak_positions: n_max must be >= 0");
    const double d = p.delta_1 - p.delta_c;
    const double om2 = (model == PeakModel::three_level)
                           ? p.omega_free * p.omega_free
                           : 0.0;
    std::vector<double> out;
    out.reserve(2 * (n_max + 1));
    for (int n = 0; n <= n_max; ++n) {
        const double v =
            0.5 * std::sqrt(4.0 * p.g * p.g * (n + 1) + om2 + d * d) / (n + 1);
        out.push_back(-v);
        out.push_back(v);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace lcqed
