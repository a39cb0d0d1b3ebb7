// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Scans run at desk scale; every tolerance is pinned here.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "lambda_cqed/analysis.hpp"
#include "lambda_cqed/dressed.hpp"
#include "lambda_cqed/lindblad.hpp"
#include "lambda_cqed/params.hpp"
#include "lambda_cqed/scan.hpp"
#include "lambda_cqed/semiclassical.hpp"

using namespace lcqed;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion,
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double now_s() {
    using clock = std::chrono::steady_clock;
    static const auto t0 = clock::now();
    return std::chrono::duration<double>(clock::now() - t0).count();
}

// Two-level limit of the published parameter point: classical drive off,
// kappa = gamma = 3.3e-4 g. The 3->2 leak is closed (with the drive off it
// would pump the steady state into the uncoupled |2> level) and a tiny 2->1
// rate keeps the steady state unique in the active sector.
SystemParams two_level_params() {
    SystemParams p = paper_defaults();
    p.omega_free = 0.0;
    p.gamma32 = 0.0;
    p.gamma31 = 3.3e-4 * p.g;
    p.gamma21 = 1e-6;
    return p;
}

bool has_peak_near(const std::vector<Peak>& peaks, double position, double tol,
                   double* found = nullptr) {
    for (const auto& p : peaks)
        if (std::abs(p.position - position) <= tol) {
            if (found) *found = p.position;
            return true;
        }
    return false;
}

struct ScanBundle {
    Spectrum spectrum;
    double grid = 0.0;
    double max_mean_n = 0.0;
};

ScanBundle run_bundle(const ScanSpec& spec, const SystemParams& p, const ScanOptions& opt) {
    ScanBundle b;
    b.spectrum = run_scan(spec, p, opt);
    b.grid = (spec.probe_to - spec.probe_from) / double(spec.points - 1);
    for (const auto& r : b.spectrum.records)
        if (std::isfinite(r.mean_n)) b.max_mean_n = std::max(b.max_mean_n, r.mean_n);
    return b;
}

void merge_diag(ScanDiagnostics& agg, const Spectrum& s) {
    agg.failed_points += s.diagnostics.failed_points;
    agg.max_residual = std::max(agg.max_residual, s.diagnostics.max_residual);
    agg.max_trace_err = std::max(agg.max_trace_err, s.diagnostics.max_trace_err);
    agg.max_herm_err = std::max(agg.max_herm_err, s.diagnostics.max_herm_err);
    agg.min_eigenvalue = std::min(agg.min_eigenvalue, s.diagnostics.min_eigenvalue);
    agg.max_popsum_err = std::max(agg.max_popsum_err, s.diagnostics.max_popsum_err);
}

}  // namespace

// ---------------------------------------------------------------------------
// 1. Dressed-state oracle equivalence: closed-form energies vs numerical
//    diagonalization of the manifold blocks, 100 random draws, n <= 4,
//    1e-10 relative, under 1 second.
static void criterion_1() {
    const double t0 = now_s();
    std::mt19937 rng(20260809);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int draw = 0; draw < 100; ++draw) {
        SystemParams p;
        p.g = 0.2 + 5.0 * u(rng);
        p.delta_2 = 0.0;
        // the closed form is an exact eigen-solution when the dark level
        // decouples: either no classical drive, or atom-cavity resonance
        if (u(rng) < 0.5) {
            p.omega_free = 0.0;
            p.delta_1 = -4.0 + 8.0 * u(rng);
            p.delta_c = -4.0 + 8.0 * u(rng);
        } else {
            p.omega_free = 3.0 * u(rng);
            p.delta_1 = p.delta_c = -4.0 + 8.0 * u(rng);
        }
        for (int n = 0; n <= 4; ++n) {
            const auto e = dressed_energies_resonant(n, p);
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(block_matrix(n, p));
            std::array<double, 3> closed{e.omega_minus, e.omega0, e.omega_plus};
            std::sort(closed.begin(), closed.end());
            const double scale = std::max({1.0, std::abs(closed[0]), std::abs(closed[2])});
            for (int k = 0; k < 3; ++k)
                worst = std::max(worst, std::abs(closed[k] - es.eigenvalues()(k)) / scale);
        }
    }
    const double dt = now_s() - t0;
    report(1, worst < 1e-10 && dt < 1.0,
           "closed form vs block eigensolve, worst rel dev " + std::to_string(worst) +
               ", " + std::to_string(dt) + " s");
}

// Shared scan results reused across criteria.
static ScanBundle g_diag_two_level;
static ScanDiagnostics g_all_diag{};

// ---------------------------------------------------------------------------
// 2. Two-level multiphoton ladder on the diagonal scan: peaks at +-g,
//    +-g/sqrt2, +-g/sqrt3 within 2 grid steps.
static void criterion_2() {
    const SystemParams p = two_level_params();
    ScanSpec spec;
    spec.scheme = ScanScheme::diagonal;
    spec.offset = 0.0;
    spec.probe_from = -1.2 * p.g;
    spec.probe_to = 1.2 * p.g;
    spec.points = 1001;
    ScanOptions opt;
    opt.cutoff_tol = 1e-6;
    g_diag_two_level = run_bundle(spec, p, opt);
    merge_diag(g_all_diag, g_diag_two_level.spectrum);

    const auto peaks = find_peaks(g_diag_two_level.spectrum, SpectrumColumn::mean_n,
                                  1e-3 * g_diag_two_level.max_mean_n);
    const double tol = 2.0 * g_diag_two_level.grid;
    bool ok = true;
    std::string detail = "cutoff " + std::to_string(g_diag_two_level.spectrum.diagnostics.cutoff_used);
    for (int n = 0; n < 3; ++n) {
        const double pred = p.g / std::sqrt(double(n + 1));
        for (double sgn : {1.0, -1.0}) {
            double found = 0.0;
            const bool hit = has_peak_near(peaks, sgn * pred, tol, &found);
            ok = ok && hit;
            if (hit)
                detail += ", " + std::to_string(sgn * pred).substr(0, 7) + "->" +
                          std::to_string(found).substr(0, 7);
            else
                detail += ", MISSING " + std::to_string(sgn * pred).substr(0, 7);
        }
    }
    report(2, ok, "diagonal two-level peaks within 2 grid steps (" + detail + ")");
}

// ---------------------------------------------------------------------------
// 3. Horizontal scan on cavity resonance: no peak with prominence above
//    1e-3 of the diagonal-scan maximum.
static void criterion_3() {
    const SystemParams p = two_level_params();
    ScanSpec spec;
    spec.scheme = ScanScheme::horizontal;
    spec.offset = 0.0;
    spec.probe_from = -1.2 * p.g;
    spec.probe_to = 1.2 * p.g;
    spec.points = 601;
    ScanOptions opt;
    const auto b = run_bundle(spec, p, opt);
    merge_diag(g_all_diag, b.spectrum);
    const double threshold = 1e-3 * g_diag_two_level.max_mean_n;
    const auto peaks = find_peaks(b.spectrum, SpectrumColumn::mean_n, threshold);
    report(3, peaks.empty(),
           "horizontal scan at delta_c = 0: " + std::to_string(peaks.size()) +
               " peaks above prominence " + std::to_string(threshold) +
               " (max mean_n " + std::to_string(b.max_mean_n) + ")");
}

// ---------------------------------------------------------------------------
// 4. Vertical-scan exclusion: the +-g/sqrt2 peaks are present, yet no peak
//    sits within 3 kappa of +-g.
static void criterion_4() {
    const SystemParams p = two_level_params();
    ScanSpec spec;
    spec.scheme = ScanScheme::vertical;
    spec.offset = 0.0;
    spec.probe_from = -1.2 * p.g;
    spec.probe_to = 1.2 * p.g;
    spec.points = 1001;
    ScanOptions opt;
    const auto full = run_bundle(spec, p, opt);
    merge_diag(g_all_diag, full.spectrum);
    const auto peaks = find_peaks(full.spectrum, SpectrumColumn::mean_n,
                                  1e-3 * full.max_mean_n);
    const double tol = 2.0 * full.grid;
    const bool sqrt2_present = has_peak_near(peaks, p.g / std::sqrt(2.0), tol) &&
                               has_peak_near(peaks, -p.g / std::sqrt(2.0), tol);

    // fine uniform windows around +-g, kappa/2 spacing, for the exclusion
    bool excluded = true;
    std::string where;
    for (double sgn : {1.0, -1.0}) {
        ScanSpec win = spec;
        win.probe_from = sgn * p.g - 0.02;
        win.probe_to = sgn * p.g + 0.02;
        win.points = 81;
        ScanOptions wopt;
        wopt.adaptive_cutoff = true;
        const auto wb = run_bundle(win, p, wopt);
        merge_diag(g_all_diag, wb.spectrum);
        const auto wpeaks =
            find_peaks(wb.spectrum, SpectrumColumn::mean_n, 1e-3 * full.max_mean_n);
        for (const auto& pk : wpeaks)
            if (std::abs(std::abs(pk.position) - p.g) <= 3.0 * p.kappa) {
                excluded = false;
                where += " peak at " + std::to_string(pk.position);
            }
    }
    report(4, sqrt2_present && excluded,
           std::string("vertical scan: +-g/sqrt2 ") +
               (sqrt2_present ? "present" : "MISSING") + ", +-g window " +
               (excluded ? "clear within 3 kappa" : ("violated:" + where)));
}

// ---------------------------------------------------------------------------
// 5. Raman structure on the resonant diagonal scan: outer dressed peaks at
//    +-eta/sqrt(n+1), n = 0,1, within 2 grid steps; innermost fringe spacing
//    grows monotonically with eta.
static void criterion_5() {
    const SystemParams p = paper_defaults();

    ScanSpec spec;
    spec.scheme = ScanScheme::diagonal;
    spec.offset = 0.0;
    spec.probe_from = -0.15;
    spec.probe_to = 0.15;
    spec.points = 1501;
    ScanOptions opt;
    opt.cutoff_tol = 1e-4;
    const auto b = run_bundle(spec, p, opt);
    merge_diag(g_all_diag, b.spectrum);
    const auto peaks = find_peaks(b.spectrum, SpectrumColumn::mean_n,
                                  1e-3 * b.max_mean_n);
    const double tol = 2.0 * b.grid;
    bool outer_ok = true;
    std::string outer_detail;
    for (int n = 0; n <= 1; ++n) {
        const double pred = p.eta / std::sqrt(double(n + 1));
        for (double sgn : {1.0, -1.0}) {
            double found = 0.0;
            const bool hit = has_peak_near(peaks, sgn * pred, tol, &found);
            outer_ok = outer_ok && hit;
            outer_detail += hit ? "" : (" MISSING " + std::to_string(sgn * pred));
        }
    }

    // fringe spacing vs drive strength
    bool fringes_ok = true;
    std::string fringe_detail = "spacing";
    double prev = 0.0;
    for (double scale : {0.5, 1.0, 2.0}) {
        SystemParams q = p;
        q.eta = scale * p.eta;
        ScanSpec fs = spec;
        fs.probe_from = -0.05;
        fs.probe_to = 0.05;
        fs.points = 801;
        const auto fb = run_bundle(fs, q, opt);
        merge_diag(g_all_diag, fb.spectrum);
        try {
            const auto f = fringe_spacing(fb.spectrum, {-0.045, 0.045},
                                          SpectrumColumn::mean_n,
                                          1e-3 * fb.max_mean_n);
            fringe_detail += " " + std::to_string(f.mean);
            if (!(f.mean > prev)) fringes_ok = false;
            prev = f.mean;
        } catch (const InsufficientPeaks& e) {
            fringes_ok = false;
            fringe_detail += std::string(" [") + e.what() + "]";
        }
    }
    report(5, outer_ok && fringes_ok,
           std::string("raman: outer peaks ") + (outer_ok ? "ok" : outer_detail) +
               "; " + fringe_detail + (fringes_ok ? " monotone" : " NOT monotone"));
}

// ---------------------------------------------------------------------------
// 6. Steady-state validity over every scan point produced above.
static void criterion_6() {
    const auto& d = g_all_diag;
    const bool ok = d.max_trace_err < 1e-10 && d.max_herm_err < 1e-10 &&
                    d.min_eigenvalue > -1e-8 && d.max_residual < 1e-10 &&
                    d.max_popsum_err < 1e-8;
    report(6, ok,
           "all scan points: trace " + std::to_string(d.max_trace_err) + ", herm " +
               std::to_string(d.max_herm_err) + ", min eig " +
               std::to_string(d.min_eigenvalue) + ", residual " +
               std::to_string(d.max_residual) + ", popsum " +
               std::to_string(d.max_popsum_err));
}

// ---------------------------------------------------------------------------
// 7. Analytic driven-cavity oracle at five detunings, 0.1%.
static void criterion_7() {
    SystemParams p;
    p.g = 0.0;
    p.omega_free = 0.0;
    p.kappa = 1.0;
    p.gamma31 = 0.1;
    p.gamma32 = 0.05;
    p.gamma21 = 1e-4;  // pins the decoupled atom
    p.eta = 0.25;
    bool ok = true;
    double worst = 0.0;
    for (double dc : {0.0, 0.2, -0.4, 0.9, -1.5}) {
        p.delta_c = dc;
        p.n_fock = choose_cutoff(p, 1e-7);
        const auto obs = observables_at(p);
        const double expect = p.eta * p.eta / (dc * dc + 0.25 * p.kappa * p.kappa);
        const double rel = std::abs(obs.mean_n - expect) / expect;
        worst = std::max(worst, rel);
        ok = ok && rel < 1e-3;
    }
    report(7, ok, "driven cavity vs eta^2/(dc^2+kappa^2/4), worst rel " +
                      std::to_string(worst));
}

// ---------------------------------------------------------------------------
// 8. Semiclassical contrast: 5% agreement in the weak-coupling regime; in
//    the strong-coupling regime the factorized model misses the n >= 1
//    multiphoton peaks the exact spectrum shows.
static void criterion_8() {
    // weak coupling: g^2 << gamma kappa
    SystemParams w;
    w.g = 0.05;
    w.omega_free = 0.2;
    w.eta = 0.15;
    w.kappa = 1.0;
    w.gamma31 = 0.4;
    w.gamma32 = 0.3;
    w.n_fock = 6;
    bool weak_ok = true;
    double worst = 0.0;
    for (double dc : {0.0, 0.3, -0.5}) {
        w.delta_c = dc;
        w.delta_1 = 0.2;
        w.delta_2 = -0.1;
        const auto mf = integrate_to_steady(w, MeanFieldState{}, 5000.0, 1e-11);
        const auto obs = observables_at(w);
        const double rel = std::abs(std::norm(mf.state.a) - obs.mean_n) /
                           std::max(obs.mean_n, 1e-12);
        worst = std::max(worst, rel);
        weak_ok = weak_ok && mf.converged && rel < 0.05;
    }

    // strong coupling: semiclassical diagonal scan of the two-level system
    const SystemParams p = two_level_params();
    ScanSpec spec;
    spec.scheme = ScanScheme::diagonal;
    spec.model = ScanModel::semiclassical;
    spec.probe_from = -1.2 * p.g;
    spec.probe_to = 1.2 * p.g;
    spec.points = 401;
    ScanOptions opt;
    opt.sc_t_max = 5e4;
    opt.sc_tol = 1e-8;
    const auto sc = run_bundle(spec, p, opt);
    const auto sc_peaks =
        find_peaks(sc.spectrum, SpectrumColumn::mean_n,
                   1e-3 * std::max(sc.max_mean_n, g_diag_two_level.max_mean_n));
    // multiphoton positions exist in the exact scan (criterion 2) and must
    // be absent from the factorized one
    const double tol = 2.0 * g_diag_two_level.grid;
    bool absent = true;
    std::string found;
    for (int n = 1; n < 3; ++n) {
        const double pred = p.g / std::sqrt(double(n + 1));
        for (double sgn : {1.0, -1.0})
            if (has_peak_near(sc_peaks, sgn * pred, tol)) {
                absent = false;
                found += " " + std::to_string(sgn * pred);
            }
    }
    const auto exact_peaks = find_peaks(g_diag_two_level.spectrum, SpectrumColumn::mean_n,
                                        1e-3 * g_diag_two_level.max_mean_n);
    const bool exact_has = has_peak_near(exact_peaks, p.g / std::sqrt(2.0), tol) &&
                           has_peak_near(exact_peaks, p.g / std::sqrt(3.0), tol);
    report(8, weak_ok && absent && exact_has,
           "weak-coupling worst rel " + std::to_string(worst) +
               (absent ? "; multiphoton absent in factorized spectrum"
                       : "; factorized spectrum shows" + found) +
               (exact_has ? "" : "; EXACT LADDER MISSING"));
}

// ---------------------------------------------------------------------------
// 9. Cooperativity against the published 4.5e6, within a factor of 3.
static void criterion_9() {
    const double c = cooperativity(paper_defaults());
    const double ratio = c / 4.5e6;
    report(9, ratio < 3.0 && ratio > 1.0 / 3.0,
           "C = " + std::to_string(c) + ", ratio to 4.5e6 = " + std::to_string(ratio));
}

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    std::printf("%d criterion(s) failed\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
