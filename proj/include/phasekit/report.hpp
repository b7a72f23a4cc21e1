#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"

namespace phasekit {

inline constexpr const char* kCsvHeader = "tau,theta,k3,k3_sigma,k4,k4_sigma,n_paths,n_diverged,method";

struct CsvRow {
    double tau = 0.0;
    double theta = 0.0;
    double k3 = 0.0;
    double k3_sigma = 0.0;
    double k4 = 0.0;
    double k4_sigma = 0.0;
    std::size_t n_paths = 0;
    std::size_t n_diverged = 0;
    std::string method;
};

inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string to_csv(const std::vector<CsvRow>& rows) {
    std::string out = std::string(kCsvHeader) + "\n";
    for (const auto& r : rows) {
        out += format_g17(r.tau) + "," + format_g17(r.theta) + "," + format_g17(r.k3) + "," + format_g17(r.k3_sigma) +
               "," + format_g17(r.k4) + "," + format_g17(r.k4_sigma) + "," + std::to_string(r.n_paths) + "," +
               std::to_string(r.n_diverged) + "," + r.method + "\n";
    }
    return out;
}

inline std::vector<CsvRow> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw Error("empty CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kCsvHeader) throw Error("unexpected CSV header: '" + line + "'");
    std::vector<CsvRow> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) f.push_back(cell);
        if (f.size() != 9) throw Error("CSV line " + std::to_string(lineno) + " has " + std::to_string(f.size()) + " fields");
        try {
            CsvRow r;
            r.tau = std::stod(f[0]);
            r.theta = std::stod(f[1]);
            r.k3 = std::stod(f[2]);
            r.k3_sigma = std::stod(f[3]);
            r.k4 = std::stod(f[4]);
            r.k4_sigma = std::stod(f[5]);
            r.n_paths = std::stoull(f[6]);
            r.n_diverged = std::stoull(f[7]);
            r.method = f[8];
            rows.push_back(r);
        } catch (const std::exception&) {
            throw Error("CSV line " + std::to_string(lineno) + " is malformed");
        }
    }
    return rows;
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw Error("failed writing '" + path + "'");
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// Comparison

/// A row passes when |delta| <= max(n_sigma * sigma, peak_fraction * peak, absolute_slack),
/// where sigma combines both inputs' errors in quadrature and peak is the
/// largest |value| of the reference (second) input over the compared rows.
struct ComparisonPolicy {
    double n_sigma = 4.0;
    double k3_peak_fraction = 0.0;
    double k4_peak_fraction = 0.0;
    /// Rows with tau above this are reported but not judged.
    double tau_max = std::numeric_limits<double>::infinity();
    /// Absolute slack for rows where both inputs are exact. Cumulants built from
    /// raw moments keep a rounding residue near 1e-15 (2 sqrt(N))^4, so
    /// deterministic rows at large N need more than the default.
    double absolute_slack = 1e-9;
};

struct ComparisonRow {
    double tau = 0.0;
    double theta = 0.0;
    double k3_delta = 0.0;
    double k4_delta = 0.0;
    double k3_sigma = 0.0;
    double k4_sigma = 0.0;
    /// |delta| / sigma; 0 when both are zero, infinity when only sigma is.
    double k3_ratio = 0.0;
    double k4_ratio = 0.0;
    bool judged = true;
    bool k3_pass = true;
    bool k4_pass = true;

    bool pass() const { return !judged || (k3_pass && k4_pass); }
};

struct ComparisonReport {
    std::vector<ComparisonRow> rows;
    double k3_peak = 0.0;
    double k4_peak = 0.0;
    std::size_t worst_k3 = 0;
    std::size_t worst_k4 = 0;

    bool pass() const {
        return std::all_of(rows.begin(), rows.end(), [](const ComparisonRow& r) { return r.pass(); });
    }

    std::size_t failures() const {
        return static_cast<std::size_t>(
            std::count_if(rows.begin(), rows.end(), [](const ComparisonRow& r) { return !r.pass(); }));
    }
};

inline ComparisonReport compare(const std::vector<CsvRow>& a, const std::vector<CsvRow>& b,
                                const ComparisonPolicy& policy = {}) {
    if (a.size() != b.size())
        throw GridMismatch("row counts differ: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    auto close = [](double x, double y) { return std::abs(x - y) <= 1e-9 * std::max(1.0, std::abs(y)); };
    ComparisonReport rep;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!close(a[i].tau, b[i].tau) || !close(a[i].theta, b[i].theta))
            throw GridMismatch("row " + std::to_string(i) + ": (tau, theta) = (" + format_g17(a[i].tau) + ", " +
                               format_g17(a[i].theta) + ") vs (" + format_g17(b[i].tau) + ", " +
                               format_g17(b[i].theta) + ")");
        if (b[i].tau <= policy.tau_max) {
            rep.k3_peak = std::max(rep.k3_peak, std::abs(b[i].k3));
            rep.k4_peak = std::max(rep.k4_peak, std::abs(b[i].k4));
        }
    }
    auto ratio = [](double delta, double sigma) {
        if (sigma > 0) return std::abs(delta) / sigma;
        return delta == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    };
    double worst3 = -1, worst4 = -1;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ComparisonRow r;
        r.tau = b[i].tau;
        r.theta = b[i].theta;
        r.k3_delta = a[i].k3 - b[i].k3;
        r.k4_delta = a[i].k4 - b[i].k4;
        r.k3_sigma = std::hypot(a[i].k3_sigma, b[i].k3_sigma);
        r.k4_sigma = std::hypot(a[i].k4_sigma, b[i].k4_sigma);
        r.k3_ratio = ratio(r.k3_delta, r.k3_sigma);
        r.k4_ratio = ratio(r.k4_delta, r.k4_sigma);
        r.judged = r.tau <= policy.tau_max;
        const double tol3 = std::max({policy.n_sigma * r.k3_sigma, policy.k3_peak_fraction * rep.k3_peak,
                                      policy.absolute_slack});
        const double tol4 = std::max({policy.n_sigma * r.k4_sigma, policy.k4_peak_fraction * rep.k4_peak,
                                      policy.absolute_slack});
        r.k3_pass = std::abs(r.k3_delta) <= tol3;
        r.k4_pass = std::abs(r.k4_delta) <= tol4;
        // exact rows within the slack have no meaningful ratio
        const bool exact3 = r.k3_sigma == 0.0 && r.k3_pass;
        const bool exact4 = r.k4_sigma == 0.0 && r.k4_pass;
        if (r.judged && !exact3 && r.k3_ratio > worst3) {
            worst3 = r.k3_ratio;
            rep.worst_k3 = i;
        }
        if (r.judged && !exact4 && r.k4_ratio > worst4) {
            worst4 = r.k4_ratio;
            rep.worst_k4 = i;
        }
        rep.rows.push_back(r);
    }
    return rep;
}

inline std::string render_comparison(const ComparisonReport& rep) {
    std::ostringstream out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%10s %10s %14s %10s %14s %10s %s\n", "tau", "theta", "dk3", "dk3/sig", "dk4",
                  "dk4/sig", "verdict");
    out << buf;
    for (const auto& r : rep.rows) {
        std::snprintf(buf, sizeof buf, "%10.4g %10.4g %14.6g %10.3g %14.6g %10.3g %s\n", r.tau, r.theta, r.k3_delta,
                      r.k3_ratio, r.k4_delta, r.k4_ratio, !r.judged ? "skip" : (r.pass() ? "pass" : "FAIL"));
        out << buf;
    }
    if (!rep.rows.empty()) {
        const auto& w3 = rep.rows[rep.worst_k3];
        const auto& w4 = rep.rows[rep.worst_k4];
        std::snprintf(buf, sizeof buf, "worst k3: tau=%g |d|/sig=%.3g   worst k4: tau=%g |d|/sig=%.3g\n", w3.tau,
                      w3.k3_ratio, w4.tau, w4.k4_ratio);
        out << buf;
    }
    out << (rep.pass() ? "PASS" : "FAIL") << " (" << rep.failures() << " failing rows of " << rep.rows.size()
        << ")\n";
    return out.str();
}

}  // namespace phasekit
