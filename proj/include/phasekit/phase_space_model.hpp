#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "errors.hpp"
#include "polynomial.hpp"

namespace phasekit {

enum class Representation { wigner, positive_p };
enum class Calculus { ito, stratonovich };

inline const char* to_string(Representation r) {
    return r == Representation::wigner ? "wigner" : "positive_p";
}

/// Noise amplitude g = prefactor * root(x) * sqrt(residual(x)).
///
/// Built from g^2. When g^2 is a single monomial with even exponents it is
/// factored exactly (prefactor is the principal square root of the
/// coefficient), so no square root of a phase-space variable is taken along
/// trajectories. Otherwise the residual keeps the whole radicand.
struct NoiseCoefficient {
    Complex prefactor{};
    Polynomial root = Polynomial::constant(1.0);
    Polynomial residual = Polynomial::constant(1.0);

    static NoiseCoefficient from_square(const Polynomial& square) {
        NoiseCoefficient g;
        const Polynomial sq = square.pruned();
        if (sq.empty()) return g;
        if (sq.terms().size() == 1) {
            const auto& [e, c] = *sq.terms().begin();
            if (e.p % 2 == 0 && e.q % 2 == 0) {
                g.prefactor = std::sqrt(c);
                g.root = Polynomial::monomial(e.p / 2, e.q / 2);
                return g;
            }
        }
        g.prefactor = 1.0;
        g.residual = sq;
        return g;
    }

    bool is_zero() const { return prefactor == Complex{} || root.empty() || residual.empty(); }

    bool residual_is_unit() const { return residual == Polynomial::constant(1.0); }

    /// g^2 as a polynomial.
    Polynomial square() const {
        if (is_zero()) return {};
        return (root * root) * residual * (prefactor * prefactor);
    }
};

/// One neglected Liouville term: d^u/d alpha^u d^v/d alpha-bar^v [coefficient * W].
struct DiscardedTerm {
    int order_alpha = 0;
    int order_alpha_bar = 0;
    Polynomial coefficient;

    int total_order() const { return order_alpha + order_alpha_bar; }
};

/// Drift vector and noise amplitudes over the two phase-space slots.
///
/// Slot 0 is alpha (Wigner) or alpha1 (positive-P); slot 1 is alpha* or
/// alpha2*. `noise[j]` multiplies an independent real Wiener increment dW_j
/// acting on slot j only. Wigner models carry no noise.
struct DriftDiffusionModel {
    Representation representation = Representation::wigner;
    std::array<std::string, 2> variables{"a", "a*"};
    std::array<Polynomial, 2> drift;
    std::vector<NoiseCoefficient> noise;
    Calculus calculus = Calculus::ito;
    std::vector<DiscardedTerm> discarded;

    bool has_noise() const {
        for (const auto& g : noise)
            if (!g.is_zero()) return true;
        return false;
    }
};

inline Variable slot_variable(std::size_t slot) { return slot == 0 ? Variable::alpha : Variable::alpha_bar; }

namespace detail {

inline void require_hermitian(const Polynomial& h) {
    if (!h.is_hermitian()) throw InvalidHamiltonian("Hamiltonian symbol is not Hermitian");
}

}  // namespace detail

/// Ito positive-P equations for a normal-ordered Hamiltonian symbol.
///
///   d alpha1  = -i dH/d alpha*  dt + sqrt(-i d2H/d alpha*^2) dW1
///   d alpha2* = +i dH/d alpha   dt + sqrt(+i d2H/d alpha^2)  dW2
inline DriftDiffusionModel derive_positive_p_model(const Polynomial& hamiltonian) {
    detail::require_hermitian(hamiltonian);
    const Complex i{0.0, 1.0};

    std::string offending;
    for (int u = 3; u <= std::max(hamiltonian.max_p(), hamiltonian.max_q()); ++u) {
        const Polynomial dp = differentiate(hamiltonian, Variable::alpha_bar, u).pruned();
        const Polynomial dq = differentiate(hamiltonian, Variable::alpha, u).pruned();
        if (!dp.empty()) offending += " d^" + std::to_string(u) + "H/da*^" + std::to_string(u) + " = " + render(dp) + ";";
        if (!dq.empty()) offending += " d^" + std::to_string(u) + "H/da^" + std::to_string(u) + " = " + render(dq) + ";";
    }
    if (!offending.empty())
        throw HigherOrderDerivatives("positive-P Liouville equation has derivatives above second order:" +
                                     offending);

    DriftDiffusionModel m;
    m.representation = Representation::positive_p;
    m.variables = {"a1", "a2*"};
    m.calculus = Calculus::ito;
    m.drift[0] = differentiate(hamiltonian, Variable::alpha_bar) * (-i);
    m.drift[1] = differentiate(hamiltonian, Variable::alpha) * i;
    m.noise.push_back(NoiseCoefficient::from_square(differentiate(hamiltonian, Variable::alpha_bar, 2) * (-i)));
    m.noise.push_back(NoiseCoefficient::from_square(differentiate(hamiltonian, Variable::alpha, 2) * i));
    return m;
}

/// Adds the Ito-to-Stratonovich drift shift -(1/2) g_j dg_j/dx_j = -(1/4) d(g_j^2)/dx_j.
inline DriftDiffusionModel ito_to_stratonovich(const DriftDiffusionModel& model) {
    DriftDiffusionModel out = model;
    out.calculus = Calculus::stratonovich;
    if (model.calculus == Calculus::stratonovich) return out;
    for (std::size_t j = 0; j < model.noise.size() && j < 2; ++j) {
        const Polynomial shift = differentiate(model.noise[j].square(), slot_variable(j)) * 0.25;
        out.drift[j] = (out.drift[j] - shift).pruned(0.0);
    }
    return out;
}

/// Truncated-Wigner model: drift from the first-order terms of the full
/// Wigner Liouville sum, every nonzero term of order >= 3 recorded as
/// discarded. Even orders cancel identically.
///
/// Liouville sum: dW/dt = sum_{u,v} d_alpha^u d_alpha*^v [C_uv W] with
///   C_uv = -i (1/2)^(u+v) / (u! v!) ((-1)^u - (-1)^v)
///          * sum_w (-1/2)^w / w! d^(u+w)_alpha* d^(v+w)_alpha H
/// and drift A = -C for the first-order terms.
inline DriftDiffusionModel derive_wigner_model(const Polynomial& hamiltonian) {
    detail::require_hermitian(hamiltonian);
    const Complex i{0.0, 1.0};

    DriftDiffusionModel m;
    m.representation = Representation::wigner;
    m.variables = {"a", "a*"};
    m.calculus = Calculus::stratonovich;  // noise-free: conventions coincide

    const int deg = std::max(hamiltonian.degree(), 0);
    for (int u = 0; u <= deg; ++u) {
        for (int v = 0; u + v <= deg; ++v) {
            const int sign_diff = (u % 2 == 0 ? 1 : -1) - (v % 2 == 0 ? 1 : -1);
            if (sign_diff == 0) continue;
            const Complex weight =
                -i * std::pow(0.5, u + v) / (detail::factorial(u) * detail::factorial(v)) * double(sign_diff);
            Polynomial inner;
            for (int w = 0; u + v + 2 * w <= deg; ++w) {
                const Polynomial d = differentiate(differentiate(hamiltonian, Variable::alpha_bar, u + w),
                                                   Variable::alpha, v + w);
                inner += d * (std::pow(-0.5, w) / detail::factorial(w));
            }
            const Polynomial c = (inner * weight).pruned(0.0);
            if (c.empty()) continue;
            if (u + v == 1) {
                m.drift[u == 1 ? 0 : 1] = -c;
            } else {
                m.discarded.push_back(DiscardedTerm{u, v, c});
            }
        }
    }
    return m;
}

/// Symbolic sum_j dA_j/dx_j over both slots.
inline Polynomial drift_divergence(const DriftDiffusionModel& model) {
    Polynomial div = differentiate(model.drift[0], Variable::alpha) +
                     differentiate(model.drift[1], Variable::alpha_bar);
    return div.pruned();
}

}  // namespace phasekit
