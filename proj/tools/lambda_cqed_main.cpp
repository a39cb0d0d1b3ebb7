// Command-line driver: steady-state scans, dressed-level tables, peak reports.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lambda_cqed/analysis.hpp"
#include "lambda_cqed/dressed.hpp"
#include "lambda_cqed/io.hpp"
#include "lambda_cqed/params.hpp"
#include "lambda_cqed/scan.hpp"

namespace {

using namespace lcqed;

constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

struct Preset {
    std::string name;
    std::string description;
    ScanScheme scheme;
    double offset_g;     // in units of g
    double from_g;       // in units of g
    double to_g;
    int points;
    double omega_free;   // negative = keep configured value
    double gamma32;      // negative = keep configured value
    double gamma21;      // negative = keep configured value
    std::vector<double> roi_g;  // regions of interest (centers, units of g)
};

// Two-level presets pin gamma32 = 0 (with the classical drive off, any
// 3->2 leak pumps the steady state into the uncoupled |2> level) and use a
// tiny 2->1 rate to keep the steady state unique in the active sector.
const std::vector<Preset> kPresets = {
    {"two-level-diagonal", "undriven 2<->3, scan along omega_c = omega_31",
     ScanScheme::diagonal, 0.0, -1.2, 1.2, 1001, 0.0, 0.0, 1e-6,
     {1.0, 0.7071067811865476, 0.5773502691896258}},
    {"two-level-diagonal-shifted", "undriven 2<->3, omega_c - omega_31 = -g/3",
     ScanScheme::diagonal, -1.0 / 3.0, -1.4, 1.4, 1001, 0.0, 0.0, 1e-6, {}},
    {"two-level-vertical", "undriven 2<->3, omega_31 - omega_l held at 0",
     ScanScheme::vertical, 0.0, -1.2, 1.2, 1001, 0.0, 0.0, 1e-6,
     {1.0, 0.7071067811865476}},
    {"two-level-horizontal", "undriven 2<->3, omega_c - omega_l held at 0",
     ScanScheme::horizontal, 0.0, -1.2, 1.2, 601, 0.0, 0.0, 1e-6, {}},
    {"three-level-diagonal", "driven 2<->3, scan along omega_c = omega_31",
     ScanScheme::diagonal, 0.0, -1.2, 1.2, 1001, -1.0, -1.0, -1.0, {}},
    {"three-level-vertical", "driven 2<->3, omega_31 - omega_l held at 0",
     ScanScheme::vertical, 0.0, -1.2, 1.2, 1001, -1.0, -1.0, -1.0, {}},
    {"three-level-horizontal", "driven 2<->3, omega_c - omega_l held at 0",
     ScanScheme::horizontal, 0.0, -1.2, 1.2, 601, -1.0, -1.0, -1.0, {}},
    {"raman-diagonal", "central Raman feature, resonant diagonal scan",
     ScanScheme::diagonal, 0.0, -0.06, 0.06, 1201, -1.0, -1.0, -1.0, {}},
    {"raman-horizontal", "central Raman feature, cavity held on resonance",
     ScanScheme::horizontal, 0.0, -0.06, 0.06, 1201, -1.0, -1.0, -1.0, {}},
    {"raman-diagonal-detuned", "Raman feature at omega_c - omega_31 = -g/3",
     ScanScheme::diagonal, -1.0 / 3.0, -0.06, 0.06, 1201, -1.0, -1.0, -1.0, {}},
};

const Preset* find_preset(const std::string& name) {
    for (const auto& p : kPresets)
        if (p.name == name) return &p;
    return nullptr;
}

SystemParams load_config(const std::string& path) {
    return parse_config(io::read_file(path), paper_defaults());
}

int cutoff_ceiling_from_env() {
    if (const char* env = std::getenv("LAMBDA_CQED_MAX_CUTOFF")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
        std::cerr << "warning: ignoring invalid LAMBDA_CQED_MAX_CUTOFF='" << env << "'\n";
    }
    return 40;
}

std::string manifest_path_for(const std::string& out) {
    const auto dot = out.rfind(".csv");
    if (dot != std::string::npos && dot == out.size() - 4)
        return out.substr(0, dot) + ".json";
    return out + ".json";
}

int cmd_scan(const std::string& config_path, const std::string& preset_name,
             std::optional<std::string> scheme, std::optional<std::string> offset,
             std::optional<std::string> from, std::optional<std::string> to,
             std::optional<int> points, std::optional<std::string> model,
             const std::string& out_path, int jobs) {
    SystemParams params;
    try {
        params = config_path.empty() ? paper_defaults() : load_config(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    ScanSpec spec;
    std::vector<double> roi;
    if (!preset_name.empty()) {
        const Preset* pre = find_preset(preset_name);
        if (!pre) {
            std::cerr << "config error: unknown preset '" << preset_name << "'\n";
            return kExitConfig;
        }
        spec.scheme = pre->scheme;
        spec.offset = pre->offset_g * params.g;
        spec.probe_from = pre->from_g * params.g;
        spec.probe_to = pre->to_g * params.g;
        spec.points = pre->points;
        if (pre->omega_free >= 0.0) params.omega_free = pre->omega_free;
        if (pre->gamma32 >= 0.0) params.gamma32 = pre->gamma32;
        if (pre->gamma21 >= 0.0) params.gamma21 = pre->gamma21;
        for (double c : pre->roi_g) roi.push_back(c * params.g);
    }

    try {
        if (scheme) {
            if (*scheme == "diagonal") spec.scheme = ScanScheme::diagonal;
            else if (*scheme == "vertical") spec.scheme = ScanScheme::vertical;
            else if (*scheme == "horizontal") spec.scheme = ScanScheme::horizontal;
            else throw std::invalid_argument("unknown scheme '" + *scheme + "'");
        }
        if (offset) spec.offset = parse_value_with_g(*offset, params.g);
        if (from) spec.probe_from = parse_value_with_g(*from, params.g);
        if (to) spec.probe_to = parse_value_with_g(*to, params.g);
        if (points) spec.points = *points;
        if (model) {
            if (*model == "exact") spec.model = ScanModel::exact;
            else if (*model == "semiclassical") spec.model = ScanModel::semiclassical;
            else throw std::invalid_argument("unknown model '" + *model + "'");
        }
        spec.validate();
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    const double spacing = (spec.probe_to - spec.probe_from) / (spec.points - 1);
    if (!roi.empty() && params.kappa > 0.0 && spacing > 0.5 * params.kappa) {
        for (double c : roi)
            if (c >= spec.probe_from && c <= spec.probe_to) {
                std::cerr << "warning: grid spacing " << spacing << " exceeds kappa/2 = "
                          << 0.5 * params.kappa
                          << " inside a region of interest; peaks near " << c
                          << " may be under-resolved\n";
                break;
            }
    }

    ScanOptions opt;
    opt.jobs = jobs;
    opt.cutoff_ceiling = cutoff_ceiling_from_env();

    const auto t0 = std::chrono::steady_clock::now();
    Spectrum spectrum;
    try {
        spectrum = run_scan(spec, params, opt);
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    }
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const double fail_frac =
        double(spectrum.diagnostics.failed_points) / double(spec.points);

    try {
        io::write_file(out_path, spectrum_to_csv(spectrum));
        nlohmann::ordered_json manifest =
            nlohmann::ordered_json::parse(scan_to_json(spec, params, spectrum));
        manifest["wall_time_s"] = wall;
        manifest["tool_version"] = LAMBDA_CQED_VERSION;
        manifest["outputs"] = {out_path};
        if (!preset_name.empty()) manifest["preset"] = preset_name;
        if (!config_path.empty()) manifest["config_echo"] = io::read_file(config_path);
        io::write_file(manifest_path_for(out_path), manifest.dump(2) + "\n");
    } catch (const std::exception& e) {
        std::cerr << "output error: " << e.what() << "\n";
        return kExitConfig;
    }

    std::cout << "wrote " << out_path << " (" << spec.points << " points, cutoff "
              << spectrum.diagnostics.cutoff_used << ", " << wall << " s)\n";
    if (fail_frac > 0.01) {
        std::cerr << "solver error: " << spectrum.diagnostics.failed_points << " of "
                  << spec.points << " points failed\n";
        return kExitSolver;
    }
    return 0;
}

int cmd_dressed(const std::string& config_path, int n_max, const std::string& out_path) {
    SystemParams params;
    try {
        params = config_path.empty() ? paper_defaults() : load_config(config_path);
        if (n_max < 0) throw std::invalid_argument("n-max must be >= 0");
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
    try {
        io::write_file(out_path, dressed_to_csv(n_max, params));
    } catch (const std::exception& e) {
        std::cerr << "output error: " << e.what() << "\n";
        return kExitConfig;
    }
    std::cout << "wrote " << out_path << " (" << 3 * (n_max + 1) << " levels)\n";
    return 0;
}

int cmd_analyze(const std::string& spectrum_path, const std::string& formula,
                const std::string& config_path, double min_prominence, double tol_arg,
                const std::string& out_path) {
    Spectrum spectrum;
    SystemParams params = paper_defaults();
    try {
        spectrum = spectrum_from_csv(io::read_file(spectrum_path));
        if (spectrum.records.empty())
            throw std::runtime_error("spectrum file has no data rows");
        if (!config_path.empty()) {
            params = load_config(config_path);
        } else {
            // prefer the scan manifest next to the spectrum, if present
            try {
                const auto j =
                    nlohmann::json::parse(io::read_file(manifest_path_for(spectrum_path)));
                const auto& jp = j.at("params");
                SystemParams m;
                m.g = jp.at("g");
                m.omega_free = jp.at("omega_free");
                m.eta = jp.at("eta");
                m.kappa = jp.at("kappa");
                m.gamma31 = jp.at("gamma31");
                m.gamma32 = jp.at("gamma32");
                m.gamma21 = jp.at("gamma21");
                m.n_fock = jp.at("n_fock");
                params = m;
            } catch (...) {
                // fall back to defaults; formulas only need g, Omega, eta
            }
        }
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    std::vector<double> predictions;
    std::vector<int> orders;
    const int n_max = 5;
    if (formula == "raman") {
        for (int n = 0; n <= n_max; ++n) {
            const double v = params.eta / std::sqrt(double(n + 1));
            predictions.push_back(v);
            orders.push_back(n);
            predictions.push_back(-v);
            orders.push_back(n);
        }
    } else if (formula == "two_level" || formula == "three_level") {
        const auto model =
            formula == "two_level" ? PeakModel::two_level : PeakModel::three_level;
        for (int n = 0; n <= n_max; ++n) {
            SystemParams q = params;
            const auto v = multiphoton_peak_positions(n, q, model);
            predictions.push_back(v.back());
            orders.push_back(n);
            predictions.push_back(v.front());
            orders.push_back(n);
        }
    } else {
        std::cerr << "config error: unknown formula '" << formula << "'\n";
        return kExitConfig;
    }

    const double span =
        spectrum.records.back().probe - spectrum.records.front().probe;
    const double grid = span / double(spectrum.records.size() - 1);
    const double tol = tol_arg > 0.0 ? tol_arg : 2.0 * grid;
    const double max_n = [&] {
        double m = 0.0;
        for (const auto& r : spectrum.records)
            if (std::isfinite(r.mean_n)) m = std::max(m, r.mean_n);
        return m;
    }();
    const double prom = min_prominence > 0.0 ? min_prominence
                                             : std::max(1e-3 * max_n, 1e-12);

    try {
        const auto peaks = find_peaks(spectrum, SpectrumColumn::mean_n, prom);
        const auto assignments = assign_orders(peaks, predictions, tol);
        io::write_file(out_path, peaks_to_csv(assignments, orders));
        std::cout << "wrote " << out_path << " (" << peaks.size() << " peaks)\n";
    } catch (const std::exception& e) {
        std::cerr << "analysis error: " << e.what() << "\n";
        return kExitConfig;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"steady-state spectra of a driven three-level atom strongly "
                 "coupled to a dissipative cavity mode"};
    app.require_subcommand(1);
    app.set_version_flag("--version", LAMBDA_CQED_VERSION);

    // scan
    auto* scan = app.add_subcommand("scan", "run a steady-state scan");
    std::string config, out = "spectrum.csv", preset;
    std::optional<std::string> scheme, offset, from, to, model;
    std::optional<int> points;
    int jobs = 0;
    scan->add_option("--config", config, "flat key = value parameter file");
    scan->add_option("--scheme", scheme, "diagonal|vertical|horizontal");
    scan->add_option("--offset", offset, "held combination (suffix *g allowed)");
    scan->add_option("--from", from, "probe start (suffix *g allowed)");
    scan->add_option("--to", to, "probe end (suffix *g allowed)");
    scan->add_option("--points", points, "number of probe values");
    scan->add_option("--model", model, "exact|semiclassical");
    scan->add_option("--out", out, "output CSV path");
    scan->add_option("--jobs", jobs, "worker cap (0 = all cores)");
    scan->add_option("--preset", preset, "named experiment preset");

    // dressed
    auto* dressed = app.add_subcommand("dressed", "dump dressed-level table");
    std::string dconfig, dout = "dressed.csv";
    int n_max = 3;
    dressed->add_option("--config", dconfig, "flat key = value parameter file");
    dressed->add_option("--n-max", n_max, "highest manifold index");
    dressed->add_option("--out", dout, "output CSV path");

    // analyze
    auto* analyze = app.add_subcommand("analyze", "peak detection and order assignment");
    std::string spath, aformula = "two_level", aconfig, aout = "peaks.csv";
    double aprom = 0.0, atol = 0.0;
    analyze->add_option("--spectrum", spath, "spectrum CSV from a scan")->required();
    analyze->add_option("--formula", aformula, "two_level|three_level|raman");
    analyze->add_option("--config", aconfig, "parameter file for the formulas");
    analyze->add_option("--min-prominence", aprom, "peak prominence threshold");
    analyze->add_option("--tol", atol, "assignment tolerance (default 2 grid steps)");
    analyze->add_option("--out", aout, "output CSV path");

    // presets listing
    auto* presets = app.add_subcommand("presets", "list named experiment presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    if (scan->parsed())
        return cmd_scan(config, preset, scheme, offset, from, to, points, model, out, jobs);
    if (dressed->parsed()) return cmd_dressed(dconfig, n_max, dout);
    if (analyze->parsed())
        return cmd_analyze(spath, aformula, aconfig, aprom, atol, aout);
    if (presets->parsed()) {
        for (const auto& p : kPresets)
            std::cout << p.name << "\t" << p.description << "\n";
        return 0;
    }
    return kExitConfig;
}
