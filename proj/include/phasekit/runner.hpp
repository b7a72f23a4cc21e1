#pragma once

#include <cmath>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "ensemble.hpp"
#include "fock_oracle.hpp"
#include "hamiltonian_parser.hpp"
#include "moments.hpp"
#include "phase_space_model.hpp"
#include "report.hpp"

namespace phasekit {

inline EnsembleConfig ensemble_config(const SimulationConfig& c) {
    EnsembleConfig e;
    e.representation = c.method == Method::positive_p ? Representation::positive_p : Representation::wigner;
    e.particle_number = c.N;
    e.n_paths = c.n_paths;
    e.batches = c.batches;
    e.taus = c.tau_grid();
    e.dtau = c.dtau;
    e.seed = c.seed;
    e.threads = c.threads;
    e.divergence_threshold = c.divergence_threshold;
    return e;
}

/// Exact reference rows on the configured grid (sigma and path columns zero).
inline std::vector<CsvRow> run_oracle(const SimulationConfig& c) {
    const OracleState initial = init_coherent(Complex(std::sqrt(c.N), 0.0));
    std::vector<CsvRow> rows;
    for (double tau : c.tau_grid()) {
        const QuadratureSpec spec{c.theta_for(tau)};
        const CumulantReport k = oracle_cumulants(evolve(initial, tau / c.N), spec);
        rows.push_back({tau, spec.theta, k.k3, 0.0, k.k4, 0.0, 0, 0, method_name(Method::oracle)});
    }
    return rows;
}

/// Cumulant rows of a finished ensemble.
inline std::vector<CsvRow> summarize(const SimulationConfig& c, const EnsembleResult& result) {
    std::vector<CsvRow> rows;
    for (std::size_t k = 0; k < result.taus.size(); ++k) {
        const double tau = result.taus[k];
        const QuadratureSpec spec{c.theta_for(tau)};
        const auto& acc = result.moments[k];
        if (acc.representation() == Representation::positive_p)
            quadrature_moments_positive_p(acc, spec);  // throws OrderingViolation on biased ensembles
        const CumulantReport r = batch_error(acc, spec);
        rows.push_back({tau, spec.theta, r.k3, r.k3_sigma, r.k4, r.k4_sigma, r.n_paths, r.n_diverged,
                        method_name(c.method)});
    }
    return rows;
}

/// Runs the configured method and returns its CSV rows.
inline std::vector<CsvRow> run(const SimulationConfig& c,
                               std::function<void(std::size_t, std::size_t)> progress = {}) {
    if (c.method == Method::oracle) return run_oracle(c);
    EnsembleConfig e = ensemble_config(c);
    e.progress = std::move(progress);
    return summarize(c, evolve_ensemble(e));
}

// ---------------------------------------------------------------------------
// Symbolic reports

namespace detail {

inline std::string derivative_label(const DiscardedTerm& t, const std::string& amp, const std::string& bar) {
    std::string s = "d^" + std::to_string(t.total_order()) + "/";
    if (t.order_alpha) s += "d" + amp + "^" + std::to_string(t.order_alpha);
    if (t.order_alpha_bar) s += "d" + bar + "^" + std::to_string(t.order_alpha_bar);
    return s;
}

inline void render_model(std::ostringstream& out, const std::string& title, const DriftDiffusionModel& m) {
    const std::string amp = m.variables[0], bar = m.variables[1];
    out << title << "\n";
    for (std::size_t j = 0; j < 2; ++j)
        out << "  drift[" << m.variables[j] << "] = " << render(m.drift[j], bar, amp) << "\n";
    for (std::size_t j = 0; j < m.noise.size(); ++j) {
        const auto& g = m.noise[j];
        out << "  noise[" << m.variables[j] << "] = ";
        if (g.is_zero()) {
            out << "0\n";
            continue;
        }
        out << "(" << format_complex(g.prefactor) << ") * (" << render(g.root, bar, amp) << ")";
        if (!g.residual_is_unit()) out << " * sqrt(" << render(g.residual, bar, amp) << ")";
        out << " dW" << (j + 1) << "   [noise^2 = " << render(g.square(), bar, amp) << "]\n";
    }
}

}  // namespace detail

/// Text report of the Wigner and positive-P equations derived from `hamiltonian_text`.
inline std::string derive_report(const std::string& hamiltonian_text) {
    const Polynomial h = parse_hamiltonian(hamiltonian_text);
    std::ostringstream out;
    out << "hamiltonian: " << hamiltonian_text << "\n";
    out << "normal-ordered symbol: H = " << render(h) << "\n\n";

    const DriftDiffusionModel w = derive_wigner_model(h);
    detail::render_model(out, "truncated Wigner (drift only)", w);
    out << "  discarded Liouville terms:";
    if (w.discarded.empty()) out << " none";
    out << "\n";
    for (const auto& t : w.discarded)
        out << "    order " << t.total_order() << ": " << detail::derivative_label(t, "a", "a*") << " [ ("
            << render(t.coefficient) << ") W ]\n";
    out << "  drift divergence: " << render(drift_divergence(w)) << "\n\n";

    try {
        const DriftDiffusionModel ito = derive_positive_p_model(h);
        detail::render_model(out, "positive-P (Ito)", ito);
        detail::render_model(out, "positive-P (Stratonovich)", ito_to_stratonovich(ito));
        out << "  noise realisation: xi_j dt = (1+1i) dW_j, <xi_j xi_j'> = 0+2i delta_jj' delta(t-t')\n";
    } catch (const HigherOrderDerivatives& e) {
        out << "positive-P: not available (" << e.what() << ")\n";
    }
    return out.str();
}

struct PurityVerdict {
    Polynomial divergence;
    bool preserves = false;
    std::string text;
};

/// Divergence of the truncated Wigner drift, optionally with an added
/// damping-like drift (-g alpha, -g alpha*). Zero divergence preserves purity.
inline PurityVerdict purity_check(const Polynomial& hamiltonian, double damping = 0.0) {
    DriftDiffusionModel m = derive_wigner_model(hamiltonian);
    if (damping != 0.0) {
        m.drift[0] += Polynomial::monomial(0, 1, -damping);
        m.drift[1] += Polynomial::monomial(1, 0, -damping);
    }
    PurityVerdict v;
    v.divergence = drift_divergence(m);
    v.preserves = v.divergence.is_zero();
    std::ostringstream out;
    out << "drift[a]  = " << render(m.drift[0]) << "\n";
    out << "drift[a*] = " << render(m.drift[1]) << "\n";
    out << "divergence = " << render(v.divergence) << "\n";
    out << (v.preserves ? "PRESERVES_PURITY" : "VIOLATES_PURITY") << "\n";
    v.text = out.str();
    return v;
}

}  // namespace phasekit
