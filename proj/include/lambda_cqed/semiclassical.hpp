#pragma once

#include <array>
#include <cmath>
#include <complex>

#include <boost/numeric/odeint.hpp>

#include <Eigen/Dense>

#include "lambda_cqed/hilbert.hpp"
#include "lambda_cqed/params.hpp"

namespace lcqed {

/// Factorized mean-field state: atomic populations and coherences plus the
/// cavity field amplitude, with every mixed moment <sigma a> replaced by
/// <sigma><a>.
struct MeanFieldState {
    double s11 = 1.0, s22 = 0.0, s33 = 0.0;
    Complex s12{}, s13{}, s23{};
    Complex a{};

    double population_sum() const { return s11 + s22 + s33; }
};

/// Time derivative of the factorized moments. The equations are obtained
/// from d<O>/dt = tr(O L[rho]) with the exact Liouvillian of this system and
/// then factorized, so signs and rates agree with the density-matrix solver
/// by construction:
///   d<s11>/dt = -2g Im(conj(s13) a) + g31 s33 + g21 s22
///   d<s22>/dt =  2W Im(s23) + g32 s33 - g21 s22
///   d<s33>/dt =  2g Im(conj(s13) a) - 2W Im(s23) - (g31+g32) s33
///   d<s12>/dt = -i((D1-D2) - i g21/2) s12 + i g conj(s23) a - i W s13
///   d<s13>/dt = -i(D1 - i(g31+g32)/2) s13 + i g (s33 - s11) a - i W s12
///   d<s23>/dt = -i(D2 - i(g31+g32+g21)/2) s23 - i g conj(s12) a + i W (s33 - s22)
///   d<a>/dt   = -i(Dc - i kappa/2) a - i g s13 - i eta
/// with W the classical drive strength.
inline MeanFieldState mean_field_rhs(const MeanFieldState& s, const SystemParams& p) {
    const Complex I(0.0, 1.0);
    const double W = p.omega_free;
    const double gamma13 = 0.5 * (p.gamma31 + p.gamma32);

    MeanFieldState d;
    const double pump13 = 2.0 * p.g * std::imag(std::conj(s.s13) * s.a);
    const double pump23 = 2.0 * W * std::imag(s.s23);
    d.s11 = -pump13 + p.gamma31 * s.s33 + p.gamma21 * s.s22;
    d.s22 = pump23 + p.gamma32 * s.s33 - p.gamma21 * s.s22;
    d.s33 = pump13 - pump23 - (p.gamma31 + p.gamma32) * s.s33;
    d.s12 = -I * (Complex(p.delta_1 - p.delta_2, -0.5 * p.gamma21)) * s.s12 +
            I * p.g * std::conj(s.s23) * s.a - I * W * s.s13;
    d.s13 = -I * (Complex(p.delta_1, -gamma13)) * s.s13 +
            I * p.g * (s.s33 - s.s11) * s.a - I * W * s.s12;
    d.s23 = -I * (Complex(p.delta_2, -(gamma13 + 0.5 * p.gamma21))) * s.s23 -
            I * p.g * std::conj(s.s12) * s.a + I * W * (s.s33 - s.s22);
    d.a = -I * (Complex(p.delta_c, -0.5 * p.kappa)) * s.a - I * p.g * s.s13 - I * p.eta;
    return d;
}

namespace detail {

using MfVector = std::array<double, 11>;

inline MfVector to_vector(const MeanFieldState& s) {
    return {s.s11, s.s22, s.s33,
            s.s12.real(), s.s12.imag(), s.s13.real(), s.s13.imag(),
            s.s23.real(), s.s23.imag(), s.a.real(), s.a.imag()};
}

inline MeanFieldState from_vector(const MfVector& v) {
    MeanFieldState s;
    s.s11 = v[0];
    s.s22 = v[1];
    s.s33 = v[2];
    s.s12 = {v[3], v[4]};
    s.s13 = {v[5], v[6]};
    s.s23 = {v[7], v[8]};
    s.a = {v[9], v[10]};
    return s;
}

inline double rhs_norm(const MeanFieldState& d) {
    const auto v = to_vector(d);
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace detail

/// Jacobian of mean_field_rhs in the real coordinates
/// (s11, s22, s33, Re s12, Im s12, Re s13, Im s13, Re s23, Im s23, Re a, Im a).
/// The right-hand side is bilinear, so a symmetric difference with any small
/// step is exact up to rounding; a fixed step keeps this reproducible.
inline Eigen::MatrixXd mean_field_jacobian(const MeanFieldState& s, const SystemParams& p) {
    const double h = 1e-6;
    Eigen::MatrixXd J(11, 11);
    const auto base = detail::to_vector(s);
    for (int j = 0; j < 11; ++j) {
        auto vp = base, vm = base;
        vp[j] += h;
        vm[j] -= h;
        const auto dp = detail::to_vector(mean_field_rhs(detail::from_vector(vp), p));
        const auto dm = detail::to_vector(mean_field_rhs(detail::from_vector(vm), p));
        for (int i = 0; i < 11; ++i) J(i, j) = (dp[i] - dm[i]) / (2.0 * h);
    }
    return J;
}

struct MeanFieldResult {
    MeanFieldState state;
    bool converged = false;
    double t_final = 0.0;
    double rhs_norm = 0.0;  // max-norm of the derivative at t_final
};

/// Integrates the factorized equations until the derivative norm drops below
/// tol or t_max is reached. Non-convergence is reported by flag, not error:
/// the nonlinear system may cycle in strong-coupling regimes.
inline MeanFieldResult integrate_to_steady(const SystemParams& p,
                                           const MeanFieldState& initial,
                                           double t_max, double tol) {
    if (!(t_max > 0.0)) throw std::invalid_argument("integrate_to_steady: t_max <= 0");
    if (!(tol > 0.0)) throw std::invalid_argument("integrate_to_steady: tol <= 0");
    namespace ode = boost::numeric::odeint;

    auto system = [&p](const detail::MfVector& v, detail::MfVector& dvdt, double) {
        dvdt = detail::to_vector(mean_field_rhs(detail::from_vector(v), p));
    };

    // step-error control two orders below the requested residual, so the
    // integrator can actually settle onto the fixed point at that accuracy
    const double eps = std::clamp(0.01 * tol, 1e-14, 1e-10);
    auto stepper = ode::make_controlled<ode::runge_kutta_dopri5<detail::MfVector>>(eps, eps);
    detail::MfVector v = detail::to_vector(initial);

    // Chunked integration with a steady-state check between chunks. The
    // chunk length adapts to the slowest rate present.
    const double slowest =
        std::max({p.kappa, p.gamma31, p.gamma32, p.gamma21, 1e-4});
    const double chunk = std::min(t_max, std::max(10.0, 0.5 / slowest));

    MeanFieldResult out;
    double t = 0.0;
    double dt = 1e-3;
    while (t < t_max) {
        const double t_next = std::min(t + chunk, t_max);
        ode::integrate_adaptive(stepper, system, v, t, t_next, dt);
        t = t_next;
        const MeanFieldState s = detail::from_vector(v);
        const double norm = detail::rhs_norm(mean_field_rhs(s, p));
        if (norm < tol) {
            out.state = s;
            out.converged = true;
            out.t_final = t;
            out.rhs_norm = norm;
            return out;
        }
    }
    out.state = detail::from_vector(v);
    out.converged = false;
    out.t_final = t;
    out.rhs_norm = detail::rhs_norm(mean_field_rhs(out.state, p));
    return out;
}

}  // namespace lcqed
