#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"

namespace phasekit {

enum class Method { tw, positive_p, oracle };
enum class ThetaMode { rotating, fixed };

/// CSV `method` column value.
inline const char* method_name(Method m) {
    switch (m) {
        case Method::tw: return "tw";
        case Method::positive_p: return "positivep";
        case Method::oracle: return "oracle";
    }
    return "unknown";
}

/// Largest accepted tau_stop.
inline constexpr double kMaxTau = 25.0;

struct SimulationConfig {
    Method method = Method::tw;
    double N = 0.0;
    std::size_t n_paths = 100000;
    std::size_t batches = 100;
    double tau_start = 0.0;
    double tau_stop = 10.0;
    std::size_t tau_points = 41;
    double dtau = 1e-3;
    ThetaMode theta_mode = ThetaMode::rotating;
    double theta_value = 0.0;
    double divergence_threshold = 1e-3;

    // supplied by command-line flags
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string output;

    std::vector<std::string> warnings;

    bool stochastic() const { return method != Method::oracle; }

    std::vector<double> tau_grid() const {
        std::vector<double> out;
        if (tau_points == 1) return {tau_start};
        for (std::size_t k = 0; k < tau_points; ++k)
            out.push_back(tau_start + (tau_stop - tau_start) * static_cast<double>(k) /
                                          static_cast<double>(tau_points - 1));
        return out;
    }

    double theta_for(double tau) const { return theta_mode == ThetaMode::rotating ? 2.0 * tau : theta_value; }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

inline double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size() || !std::isfinite(d)) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(ConfigError::Kind::invalid_value, key, "'" + v + "' is not a finite number");
    }
}

/// Accepts plain integers and integral scientific notation such as 1e5.
inline std::size_t parse_count(const std::string& key, const std::string& v) {
    const double d = parse_double(key, v);
    if (d < 0 || d != std::floor(d) || d > 1e15)
        throw ConfigError(ConfigError::Kind::invalid_value, key, "'" + v + "' is not a nonnegative integer");
    return static_cast<std::size_t>(d);
}

}  // namespace detail

inline Method parse_method(const std::string& text) {
    const std::string v = detail::lower(detail::trim(text));
    if (v == "tw" || v == "wigner") return Method::tw;
    if (v == "positivep" || v == "positive_p" || v == "pp") return Method::positive_p;
    if (v == "oracle") return Method::oracle;
    throw ConfigError(ConfigError::Kind::invalid_value, "method", "'" + text + "' (expected TW, PositiveP or Oracle)");
}

/// Parses flat `key = value` text; `#` starts a comment.
///
/// `method_override` replaces (and makes optional) the `method` key, as the
/// `oracle` subcommand does.
inline SimulationConfig parse_config(const std::string& text, std::optional<Method> method_override = {}) {
    static const std::set<std::string> known{"method",     "N",          "n_paths",    "batches",
                                             "tau_start",  "tau_stop",   "tau_points", "dtau",
                                             "theta_mode", "theta_value", "divergence_threshold"};
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(ConfigError::Kind::invalid_value, line,
                              "line " + std::to_string(lineno) + " is not key=value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (!known.count(key)) throw ConfigError(ConfigError::Kind::unknown_key, key, "");
        if (value.empty()) throw ConfigError(ConfigError::Kind::invalid_value, key, "empty value");
        kv[key] = value;
    }

    SimulationConfig c;
    if (method_override) {
        c.method = *method_override;
    } else {
        if (!kv.count("method")) throw ConfigError(ConfigError::Kind::missing_key, "method", "");
        c.method = parse_method(kv["method"]);
    }
    if (!kv.count("N")) throw ConfigError(ConfigError::Kind::missing_key, "N", "");
    c.N = detail::parse_double("N", kv["N"]);
    if (!(c.N > 0)) throw ConfigError(ConfigError::Kind::invalid_value, "N", "must be positive");

    if (kv.count("n_paths")) c.n_paths = detail::parse_count("n_paths", kv["n_paths"]);
    if (kv.count("batches")) c.batches = detail::parse_count("batches", kv["batches"]);
    if (kv.count("tau_start")) c.tau_start = detail::parse_double("tau_start", kv["tau_start"]);
    if (kv.count("tau_stop")) c.tau_stop = detail::parse_double("tau_stop", kv["tau_stop"]);
    if (kv.count("tau_points")) c.tau_points = detail::parse_count("tau_points", kv["tau_points"]);
    if (kv.count("dtau")) c.dtau = detail::parse_double("dtau", kv["dtau"]);
    if (kv.count("theta_value")) c.theta_value = detail::parse_double("theta_value", kv["theta_value"]);
    if (kv.count("divergence_threshold"))
        c.divergence_threshold = detail::parse_double("divergence_threshold", kv["divergence_threshold"]);
    if (kv.count("theta_mode")) {
        const std::string m = detail::lower(kv["theta_mode"]);
        if (m == "rotating")
            c.theta_mode = ThetaMode::rotating;
        else if (m == "fixed")
            c.theta_mode = ThetaMode::fixed;
        else
            throw ConfigError(ConfigError::Kind::invalid_value, "theta_mode",
                              "'" + kv["theta_mode"] + "' (expected rotating or fixed)");
    } else if (kv.count("theta_value")) {
        c.theta_mode = ThetaMode::fixed;
    }
    if (c.theta_mode == ThetaMode::fixed && !kv.count("theta_value"))
        throw ConfigError(ConfigError::Kind::missing_key, "theta_value", "required when theta_mode=fixed");

    using K = ConfigError::Kind;
    if (c.tau_start < 0) throw ConfigError(K::invalid_value, "tau_start", "must be nonnegative");
    if (c.tau_stop < c.tau_start) throw ConfigError(K::invalid_value, "tau_stop", "must not precede tau_start");
    if (c.tau_stop > kMaxTau)
        throw ConfigError(K::invalid_value, "tau_stop", "exceeds the maximum of " + std::to_string(kMaxTau));
    if (c.tau_points == 0) throw ConfigError(K::invalid_value, "tau_points", "must be at least 1");
    if (c.tau_points == 1 && c.tau_stop != c.tau_start)
        throw ConfigError(K::invalid_value, "tau_points", "a single point needs tau_start == tau_stop");
    if (!(c.dtau > 0)) throw ConfigError(K::invalid_value, "dtau", "must be positive");
    if (!(c.divergence_threshold >= 0 && c.divergence_threshold <= 1))
        throw ConfigError(K::invalid_value, "divergence_threshold", "must lie in [0, 1]");

    if (c.stochastic()) {
        if (c.batches < 10) throw ConfigError(K::invalid_value, "batches", "at least 10 batches are required");
        if (c.n_paths < c.batches)
            throw ConfigError(K::invalid_value, "n_paths",
                              std::to_string(c.n_paths) + " paths < " + std::to_string(c.batches) + " batches");
        if (c.method == Method::positive_p && c.tau_points > 1) {
            const double gap = (c.tau_stop - c.tau_start) / static_cast<double>(c.tau_points - 1);
            const double steps = gap / c.dtau;
            if (std::abs(steps - std::round(steps)) > 1e-6)
                c.warnings.push_back("dtau does not divide the output spacing; output times snap to the nearest step");
        }
    } else {
        for (const char* ignored : {"n_paths", "batches", "dtau", "divergence_threshold"})
            if (kv.count(ignored)) c.warnings.push_back(std::string("method=Oracle ignores ") + ignored);
    }
    return c;
}

}  // namespace phasekit
