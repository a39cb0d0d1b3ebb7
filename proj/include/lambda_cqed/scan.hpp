#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "lambda_cqed/lindblad.hpp"
#include "lambda_cqed/params.hpp"
#include "lambda_cqed/semiclassical.hpp"

namespace lcqed {

enum class ScanScheme { diagonal, vertical, horizontal };
enum class ScanModel { exact, semiclassical };

inline const char* scheme_name(ScanScheme s) {
    switch (s) {
        case ScanScheme::diagonal: return "diagonal";
        case ScanScheme::vertical: return "vertical";
        case ScanScheme::horizontal: return "horizontal";
    }
    return "?";
}

inline const char* model_name(ScanModel m) {
    return m == ScanModel::exact ? "exact" : "semiclassical";
}

/// One probing trajectory over the (omega_31, omega_c) plane. `offset` is
/// the held combination of the scheme (absolute units):
///   diagonal:   omega_c - omega_31 held, probe = omega_l - omega_31
///   vertical:   omega_31 - omega_l held, probe = omega_l - omega_c
///   horizontal: omega_c - omega_l held,  probe = omega_l - omega_31
/// atomic_splitting = omega_31 - omega_32 (0 realizes the Raman-resonant
/// configuration along diagonal scans).
struct ScanSpec {
    ScanScheme scheme = ScanScheme::diagonal;
    double offset = 0.0;
    double atomic_splitting = 0.0;
    double probe_from = 0.0;
    double probe_to = 0.0;
    int points = 2;
    ScanModel model = ScanModel::exact;

    void validate() const {
        if (!(probe_from < probe_to))
            throw std::invalid_argument("scan: probe_from must be < probe_to");
        if (points < 2) throw std::invalid_argument("scan: points must be >= 2");
    }
};

struct Detunings {
    double delta_c, delta_1, delta_2;
};

/// Maps a probe value to the detuning triple of the scheme.
inline Detunings resolve_detunings(const ScanSpec& spec, double probe) {
    Detunings d{};
    switch (spec.scheme) {
        case ScanScheme::diagonal:
            d.delta_1 = -probe;
            d.delta_c = d.delta_1 + spec.offset;
            break;
        case ScanScheme::vertical:
            d.delta_1 = spec.offset;
            d.delta_c = -probe;
            break;
        case ScanScheme::horizontal:
            d.delta_c = spec.offset;
            d.delta_1 = -probe;
            break;
    }
    d.delta_2 = d.delta_1 - spec.atomic_splitting;
    return d;
}

struct SpectrumRecord {
    double probe = 0.0;
    double mean_n = 0.0;
    double s11 = 0.0, s22 = 0.0, s33 = 0.0;
    bool converged = false;
};

/// Worst-case steady-state quality metrics over all converged points.
struct ScanDiagnostics {
    int cutoff_used = 0;
    int failed_points = 0;
    double max_residual = 0.0;
    double max_trace_err = 0.0;
    double max_herm_err = 0.0;
    double min_eigenvalue = 0.0;
    double max_popsum_err = 0.0;
    double max_top_fock = 0.0;
};

struct Spectrum {
    std::vector<SpectrumRecord> records;
    ScanDiagnostics diagnostics;
};

struct ScanOptions {
    int jobs = 0;                 // 0 = hardware concurrency
    bool adaptive_cutoff = true;  // one cutoff search at the busiest point
    double cutoff_tol = 1e-6;
    int cutoff_ceiling = 40;
    int coarse_points = 129;      // pre-pass resolution for the cutoff search
    SteadyStateOptions solve;
    double sc_t_max = 2e5;        // semiclassical integration budget
    double sc_tol = 1e-9;
};

namespace detail {

inline SystemParams params_at(const ScanSpec& spec, const SystemParams& base, double probe) {
    SystemParams p = base;
    const Detunings d = resolve_detunings(spec, probe);
    p.delta_c = d.delta_c;
    p.delta_1 = d.delta_1;
    p.delta_2 = d.delta_2;
    return p;
}

inline int select_cutoff(const ScanSpec& spec, const SystemParams& base,
                         const ScanOptions& opt) {
    // Coarse pass at a moderate truncation to locate the most demanding
    // probe, then a full cutoff search there.
    SystemParams pre = base;
    pre.n_fock = std::clamp(base.n_fock, 6, 10);
    double best_probe = spec.probe_from;
    double best_mean = -1.0;
    const int m = std::max(3, std::min(opt.coarse_points, spec.points));
    for (int k = 0; k < m; ++k) {
        const double probe =
            spec.probe_from + (spec.probe_to - spec.probe_from) * k / double(m - 1);
        try {
            const auto obs = observables_at(params_at(spec, pre, probe), opt.solve);
            if (obs.mean_n > best_mean) {
                best_mean = obs.mean_n;
                best_probe = probe;
            }
        } catch (const SingularSystem&) {
            // skip; the full scan records such points as non-converged
        }
    }
    CutoffOptions copt;
    copt.ceiling = opt.cutoff_ceiling;
    copt.solve = opt.solve;
    return choose_cutoff(params_at(spec, base, best_probe), opt.cutoff_tol, copt);
}

}  // namespace detail

/// Runs the scan: for each of `points` equally spaced probe values, resolve
/// the detunings, solve for the steady state and record the observables.
/// Points are independent jobs; output order is by probe regardless of
/// execution order. A point whose solve fails becomes a non-converged record.
inline Spectrum run_scan(const ScanSpec& spec, const SystemParams& base,
                         const ScanOptions& opt = {}) {
    spec.validate();
    base.validate();

    SystemParams params = base;
    Spectrum out;
    out.records.resize(spec.points);

    if (spec.model == ScanModel::exact && opt.adaptive_cutoff)
        params.n_fock = detail::select_cutoff(spec, base, opt);
    out.diagnostics.cutoff_used = (spec.model == ScanModel::exact) ? params.n_fock : 0;
    out.diagnostics.min_eigenvalue = std::numeric_limits<double>::infinity();

    const int hw = int(std::thread::hardware_concurrency());
    const int jobs = std::max(1, opt.jobs > 0 ? opt.jobs : (hw > 0 ? hw : 1));

    std::atomic<int> next{0};
    std::vector<ScanDiagnostics> diags(jobs);
    for (auto& dg : diags) dg.min_eigenvalue = std::numeric_limits<double>::infinity();

    auto worker = [&](int wid) {
        ScanDiagnostics& dg = diags[wid];
        for (int k = next.fetch_add(1); k < spec.points; k = next.fetch_add(1)) {
            const double probe =
                spec.probe_from +
                (spec.probe_to - spec.probe_from) * k / double(spec.points - 1);
            SpectrumRecord rec;
            rec.probe = probe;
            const SystemParams p = detail::params_at(spec, params, probe);
            if (spec.model == ScanModel::exact) {
                try {
                    const auto obs = observables_at(p, opt.solve);
                    rec.mean_n = obs.mean_n;
                    rec.s11 = obs.s11;
                    rec.s22 = obs.s22;
                    rec.s33 = obs.s33;
                    rec.converged = true;
                    dg.max_residual = std::max(dg.max_residual, obs.solve.residual);
                    dg.max_trace_err = std::max(dg.max_trace_err, obs.solve.trace_err);
                    dg.max_herm_err = std::max(dg.max_herm_err, obs.solve.herm_err);
                    dg.min_eigenvalue = std::min(dg.min_eigenvalue, obs.solve.min_eigenvalue);
                    dg.max_popsum_err = std::max(
                        dg.max_popsum_err, std::abs(obs.s11 + obs.s22 + obs.s33 - 1.0));
                    dg.max_top_fock = std::max(dg.max_top_fock, obs.top_fock);
                } catch (const SingularSystem&) {
                    rec.mean_n = rec.s11 = rec.s22 = rec.s33 =
                        std::numeric_limits<double>::quiet_NaN();
                    rec.converged = false;
                    ++dg.failed_points;
                }
            } else {
                const auto mf = integrate_to_steady(p, MeanFieldState{}, opt.sc_t_max,
                                                    opt.sc_tol);
                rec.mean_n = std::norm(mf.state.a);
                rec.s11 = mf.state.s11;
                rec.s22 = mf.state.s22;
                rec.s33 = mf.state.s33;
                rec.converged = mf.converged;
                if (!mf.converged) ++dg.failed_points;
                dg.max_popsum_err = std::max(
                    dg.max_popsum_err, std::abs(mf.state.population_sum() - 1.0));
            }
            out.records[k] = rec;
        }
    };

    if (jobs == 1) {
        worker(0);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(jobs);
        for (int w = 0; w < jobs; ++w) pool.emplace_back(worker, w);
        for (auto& t : pool) t.join();
    }

    for (const auto& dg : diags) {
        auto& agg = out.diagnostics;
        agg.failed_points += dg.failed_points;
        agg.max_residual = std::max(agg.max_residual, dg.max_residual);
        agg.max_trace_err = std::max(agg.max_trace_err, dg.max_trace_err);
        agg.max_herm_err = std::max(agg.max_herm_err, dg.max_herm_err);
        agg.min_eigenvalue = std::min(agg.min_eigenvalue, dg.min_eigenvalue);
        agg.max_popsum_err = std::max(agg.max_popsum_err, dg.max_popsum_err);
        agg.max_top_fock = std::max(agg.max_top_fock, dg.max_top_fock);
    }
    return out;
}

}  // namespace lcqed
