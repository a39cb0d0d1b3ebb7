#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace lcqed {

/// Thrown when a parameter fails validation; `field` names the offender.
class InvalidParameter : public std::invalid_argument {
public:
    InvalidParameter(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Physical parameter set of the driven three-level system coupled to one
/// cavity mode. All rates and frequencies share one arbitrary unit (hbar = 1);
/// detunings are stored directly because the rotating-frame Hamiltonian
/// depends only on them. Immutable after validate().
struct SystemParams {
    double g = 0.0;           // atom-cavity coupling (1<->3 transition)
    double omega_free = 0.0;  // classical drive strength on 2<->3
    double eta = 0.0;         // cavity probe drive strength
    double kappa = 0.0;       // cavity energy decay rate
    double gamma31 = 0.0;     // |3> -> |1> decay rate
    double gamma32 = 0.0;     // |3> -> |2> decay rate
    double gamma21 = 0.0;     // |2> -> |1> decay rate (default off)
    double delta_c = 0.0;     // cavity-probe detuning  omega_c  - omega_l
    double delta_1 = 0.0;     // 1<->3-probe detuning   omega_31 - omega_l
    double delta_2 = 0.0;     // 2<->3-probe detuning   omega_32 - omega_l
    int n_fock = 1;           // Fock truncation: photon states |0>..|n_fock>

    /// Composite Hilbert-space dimension, 3 atomic levels x (n_fock+1).
    int dim() const { return 3 * (n_fock + 1); }

    void validate() const {
        auto require_finite = [](double v, const char* name) {
            if (!std::isfinite(v)) throw InvalidParameter(name, "must be finite");
        };
        auto require_rate = [&](double v, const char* name) {
            require_finite(v, name);
            if (v < 0.0) throw InvalidParameter(name, "must be non-negative");
        };
        require_rate(g, "g");
        require_rate(omega_free, "omega_free");
        require_rate(eta, "eta");
        require_rate(kappa, "kappa");
        require_rate(gamma31, "gamma31");
        require_rate(gamma32, "gamma32");
        require_rate(gamma21, "gamma21");
        require_finite(delta_c, "delta_c");
        require_finite(delta_1, "delta_1");
        require_finite(delta_2, "delta_2");
        if (n_fock < 1) throw InvalidParameter("n_fock", "must be >= 1");
    }
};

/// Baseline parameter set used throughout: g = 3, Omega = 0.05,
/// eta/g = 0.0426, kappa/g = 3.3e-4, gamma31 = gamma32 = 3.3e-4,
/// no dephasing, all detunings zero. n_fock = 12 is a typical converged
/// truncation for this drive strength; scans re-select it adaptively.
inline SystemParams paper_defaults() {
    SystemParams p;
    p.g = 3.0;
    p.omega_free = 0.05;
    p.eta = 0.0426 * p.g;
    p.kappa = 3.3e-4 * p.g;
    p.gamma31 = 3.3e-4;
    p.gamma32 = 3.3e-4;
    p.gamma21 = 0.0;
    p.n_fock = 12;
    return p;
}

/// Strong-coupling figure of merit C = g^2 / (2 gamma kappa), with gamma the
/// total excited-state decay gamma31 + gamma32. Order-of-magnitude quantity.
inline double cooperativity(const SystemParams& p) {
    const double gamma = p.gamma31 + p.gamma32;
    if (gamma * p.kappa == 0.0)
        throw std::domain_error("cooperativity: gamma * kappa is zero");
    return p.g * p.g / (2.0 * gamma * p.kappa);
}

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Parses flat `key = value` config text. `#` starts a comment; values may
/// carry the suffix `*g` to express multiples of the coupling (e.g.
/// `kappa = 3.3e-4*g`). Unknown keys are rejected with the key name.
/// Missing keys keep the values from `base`.
inline SystemParams parse_config(const std::string& text,
                                 const SystemParams& base = SystemParams{}) {
    SystemParams p = base;
    std::map<std::string, double*> real_keys = {
        {"g", &p.g},           {"omega_free", &p.omega_free},
        {"eta", &p.eta},       {"kappa", &p.kappa},
        {"gamma31", &p.gamma31}, {"gamma32", &p.gamma32},
        {"gamma21", &p.gamma21}, {"delta_c", &p.delta_c},
        {"delta_1", &p.delta_1}, {"delta_2", &p.delta_2},
    };

    // Two passes so that `*g` suffixes resolve against the configured g no
    // matter where the `g = ...` line appears.
    struct Entry {
        std::string key, value;
        int line;
    };
    std::vector<Entry> entries;
    int lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string line = text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
        pos = (nl == std::string::npos) ? text.size() + 1 : nl + 1;
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidParameter(line, "config line " + std::to_string(lineno) +
                                             " is not of the form key = value");
        entries.push_back({detail::trim(line.substr(0, eq)),
                           detail::trim(line.substr(eq + 1)), lineno});
    }

    auto parse_number = [](const std::string& s, const std::string& key) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw InvalidParameter(key, "cannot parse value '" + s + "'");
        }
        if (used != s.size())
            throw InvalidParameter(key, "trailing characters in value '" + s + "'");
        return v;
    };

    for (const auto& e : entries)
        if (e.key == "g") p.g = parse_number(e.value, e.key);

    for (const auto& e : entries) {
        if (e.key == "g") continue;
        if (e.key == "n_fock") {
            const double v = parse_number(e.value, e.key);
            if (v != std::floor(v))
                throw InvalidParameter("n_fock", "must be an integer");
            p.n_fock = static_cast<int>(v);
            continue;
        }
        const auto it = real_keys.find(e.key);
        if (it == real_keys.end())
            throw InvalidParameter(e.key, "unknown config key");
        std::string v = e.value;
        bool times_g = false;
        if (v.size() > 2 && v.substr(v.size() - 2) == "*g") {
            times_g = true;
            v = detail::trim(v.substr(0, v.size() - 2));
        }
        double num = parse_number(v, e.key);
        *it->second = times_g ? num * p.g : num;
    }

    p.validate();
    return p;
}

/// Parses a standalone numeric CLI value that may carry the `*g` suffix.
inline double parse_value_with_g(const std::string& s, double g) {
    std::string v = detail::trim(s);
    bool times_g = false;
    if (v.size() > 2 && v.substr(v.size() - 2) == "*g") {
        times_g = true;
        v = detail::trim(v.substr(0, v.size() - 2));
    }
    std::size_t used = 0;
    double num = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("cannot parse value '" + s + "'");
    return times_g ? num * g : num;
}

}  // namespace lcqed
