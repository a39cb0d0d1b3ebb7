#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lambda_cqed/analysis.hpp"
#include "lambda_cqed/dressed.hpp"
#include "lambda_cqed/params.hpp"
#include "lambda_cqed/scan.hpp"

namespace lcqed {

namespace io {

/// Shortest decimal form that round-trips a double; byte-deterministic.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    double back = 0.0;
    std::sscanf(buf, "%lg", &back);
    if (back == v) {
        for (int prec = 1; prec <= 16; ++prec) {
            char shorter[40];
            std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
            std::sscanf(shorter, "%lg", &back);
            if (back == v) return shorter;
        }
    }
    return buf;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
}

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace io

inline std::string spectrum_to_csv(const Spectrum& s) {
    std::string out = "probe,mean_n,s11,s22,s33,converged\n";
    for (const auto& r : s.records) {
        out += io::format_double(r.probe);
        out += ',';
        out += io::format_double(r.mean_n);
        out += ',';
        out += io::format_double(r.s11);
        out += ',';
        out += io::format_double(r.s22);
        out += ',';
        out += io::format_double(r.s33);
        out += ',';
        out += r.converged ? '1' : '0';
        out += '\n';
    }
    return out;
}

inline Spectrum spectrum_from_csv(const std::string& csv) {
    Spectrum s;
    std::istringstream in(csv);
    std::string line;
    if (!std::getline(in, line) || line.rfind("probe,mean_n,s11,s22,s33,converged", 0) != 0)
        throw std::runtime_error("spectrum csv: bad or missing header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = io::split(line, ',');
        if (cells.size() != 6) throw std::runtime_error("spectrum csv: bad row: " + line);
        SpectrumRecord r;
        try {
            r.probe = std::stod(cells[0]);
            r.mean_n = std::stod(cells[1]);
            r.s11 = std::stod(cells[2]);
            r.s22 = std::stod(cells[3]);
            r.s33 = std::stod(cells[4]);
            r.converged = cells[5] == "1";
        } catch (const std::exception&) {
            throw std::runtime_error("spectrum csv: bad row: " + line);
        }
        s.records.push_back(r);
    }
    return s;
}

inline nlohmann::ordered_json params_to_json(const SystemParams& p) {
    return nlohmann::ordered_json{
        {"g", p.g},           {"omega_free", p.omega_free}, {"eta", p.eta},
        {"kappa", p.kappa},   {"gamma31", p.gamma31},       {"gamma32", p.gamma32},
        {"gamma21", p.gamma21}, {"delta_c", p.delta_c},     {"delta_1", p.delta_1},
        {"delta_2", p.delta_2}, {"n_fock", p.n_fock},
    };
}

/// JSON mirror of a scan: metadata plus the spectrum records.
inline std::string scan_to_json(const ScanSpec& spec, const SystemParams& params,
                                const Spectrum& s) {
    nlohmann::ordered_json j;
    j["scheme"] = scheme_name(spec.scheme);
    j["offset"] = spec.offset;
    j["atomic_splitting"] = spec.atomic_splitting;
    j["probe_from"] = spec.probe_from;
    j["probe_to"] = spec.probe_to;
    j["points"] = spec.points;
    j["model"] = model_name(spec.model);
    j["params"] = params_to_json(params);
    j["cutoff_used"] = s.diagnostics.cutoff_used;
    j["failed_points"] = s.diagnostics.failed_points;
    j["max_residual"] = s.diagnostics.max_residual;
    j["max_popsum_err"] = s.diagnostics.max_popsum_err;
    auto rows = nlohmann::ordered_json::array();
    for (const auto& r : s.records)
        rows.push_back({{"probe", r.probe},
                        {"mean_n", r.mean_n},
                        {"s11", r.s11},
                        {"s22", r.s22},
                        {"s33", r.s33},
                        {"converged", r.converged}});
    j["records"] = std::move(rows);
    return j.dump(2) + "\n";
}

/// Dressed-level table. The closed-form energy column is present only when
/// delta_2 = 0; otherwise the flag column reads "general".
inline std::string dressed_to_csv(int n_max, const SystemParams& p) {
    const bool closed = std::abs(p.delta_2) <= 1e-12;
    std::string out = "n,branch,energy,c1_re,c1_im,c2_re,c2_im,c3_re,c3_im,flag";
    if (closed) out += ",closed_energy";
    out += '\n';
    for (int n = 0; n <= n_max; ++n) {
        const auto tri = dressed_states_general(n, p);
        ResonantEnergies ce{};
        if (closed) ce = dressed_energies_resonant(n, p);
        const DressedLevel* levels[3] = {&tri.minus, &tri.zero, &tri.plus};
        const double closed_e[3] = {ce.omega_minus, ce.omega0, ce.omega_plus};
        for (int k = 0; k < 3; ++k) {
            const auto& lv = *levels[k];
            out += std::to_string(n);
            out += ',';
            out += branch_name(lv.branch);
            out += ',';
            out += io::format_double(lv.energy);
            for (const auto& c : lv.amplitudes) {
                out += ',';
                out += io::format_double(c.real());
                out += ',';
                out += io::format_double(c.imag());
            }
            out += ',';
            out += closed ? "closed_form" : "general";
            if (closed) {
                out += ',';
                out += io::format_double(closed_e[k]);
            }
            out += '\n';
        }
    }
    return out;
}

/// Peak report rows. Unassigned peaks carry empty prediction cells.
inline std::string peaks_to_csv(const std::vector<PeakAssignment>& assignments,
                                const std::vector<int>& orders) {
    std::string out = "position,height,width,prominence,n_assigned,predicted,residual\n";
    for (const auto& a : assignments) {
        out += io::format_double(a.peak.position);
        out += ',';
        out += io::format_double(a.peak.height);
        out += ',';
        out += io::format_double(a.peak.width);
        out += ',';
        out += io::format_double(a.peak.prominence);
        out += ',';
        if (a.n >= 0) {
            out += std::to_string(a.n < int(orders.size()) ? orders[a.n] : a.n);
            out += ',';
            out += io::format_double(a.predicted);
            out += ',';
            out += io::format_double(a.residual);
        } else {
            out += ",,";
        }
        out += '\n';
    }
    return out;
}

}  // namespace lcqed
