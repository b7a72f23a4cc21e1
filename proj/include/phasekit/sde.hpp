#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "errors.hpp"
#include "phase_space_model.hpp"
#include "random.hpp"
#include "sampler.hpp"

namespace phasekit {

/// Fixed-point iterations of the semi-implicit midpoint scheme.
inline constexpr int kMidpointIterations = 4;

/// Exact flow of d alpha/dt = -i(2|alpha|^2 - 1) alpha: |alpha| is conserved,
/// so the step is a pure phase rotation. The rotation and the rescaling back
/// to the input modulus are done in long double; a double-precision unit
/// factor carries a last-bit modulus error that is identical at every step
/// of a fixed dt and compounds over many steps.
inline PhaseState step_tw_exact(const PhaseState& state, double dt) {
    using Wide = std::complex<long double>;
    const Wide a(state.alpha.real(), state.alpha.imag());
    const long double r = std::abs(a);
    const long double phase = -(2.0L * r * r - 1.0L) * static_cast<long double>(dt);
    Wide b = a * Wide(std::cos(phase), std::sin(phase));
    if (const long double rb = std::abs(b); rb > 0.0L) b *= r / rb;
    PhaseState out = state;
    out.alpha = Complex(static_cast<double>(b.real()), static_cast<double>(b.imag()));
    out.alpha_bar = std::conj(out.alpha);
    out.t = state.t + dt;
    return out;
}

/// Real Wiener increments dW_j = sqrt(dt) w_j, one per noise slot.
///
/// The positive-P noise of the Stratonovich equations is recovered as
/// xi_j dt = (1+i) dW_j, giving <(xi dt)^2> = 2i dt.
struct NoiseIncrement {
    std::array<double, 2> dW{0.0, 0.0};
    std::size_t count = 0;

    Complex xi_dt(std::size_t j) const { return Complex(1.0, 1.0) * dW[j]; }
};

inline NoiseIncrement build_noise(RandomStream& stream, const DriftDiffusionModel& model, double dt) {
    NoiseIncrement inc;
    inc.count = std::min<std::size_t>(model.noise.size(), 2);
    const double s = std::sqrt(dt);
    for (std::size_t j = 0; j < inc.count; ++j) inc.dW[j] = s * stream.gaussian();
    return inc;
}

/// Flat polynomial representation for the inner stepping loop.
class CompiledPolynomial {
public:
    CompiledPolynomial() = default;

    explicit CompiledPolynomial(const Polynomial& poly) {
        for (const auto& [e, c] : poly.terms()) {
            terms_.push_back({e.p, e.q, c});
            max_p_ = std::max(max_p_, e.p);
            max_q_ = std::max(max_q_, e.q);
        }
    }

    bool empty() const { return terms_.empty(); }
    int max_p() const { return max_p_; }
    int max_q() const { return max_q_; }

    template <std::size_t K>
    Complex operator()(const std::array<Complex, K>& bar_pow, const std::array<Complex, K>& amp_pow) const {
        Complex sum{};
        for (const auto& t : terms_) sum += t.c * bar_pow[t.p] * amp_pow[t.q];
        return sum;
    }

private:
    struct Term {
        int p;
        int q;
        Complex c;
    };
    std::vector<Term> terms_;
    int max_p_ = 0;
    int max_q_ = 0;
};

/// Stratonovich model prepared for repeated evaluation.
class CompiledModel {
public:
    static constexpr int kMaxPower = 8;

    explicit CompiledModel(const DriftDiffusionModel& model) : representation_(model.representation) {
        if (model.calculus != Calculus::stratonovich && model.has_noise())
            throw std::invalid_argument("stepping requires a Stratonovich model");
        for (std::size_t j = 0; j < 2; ++j) drift_[j] = CompiledPolynomial(model.drift[j]);
        for (std::size_t j = 0; j < model.noise.size() && j < 2; ++j) {
            const auto& g = model.noise[j];
            if (g.is_zero()) continue;
            noise_[j].active = true;
            noise_[j].prefactor = g.prefactor;
            noise_[j].root = CompiledPolynomial(g.root);
            noise_[j].unit_residual = g.residual_is_unit();
            noise_[j].residual = CompiledPolynomial(g.residual);
            noisy_ = true;
        }
        int mp = 0;
        auto bump = [&](const CompiledPolynomial& p) { mp = std::max({mp, p.max_p(), p.max_q()}); };
        for (const auto& d : drift_) bump(d);
        for (const auto& g : noise_) {
            bump(g.root);
            bump(g.residual);
        }
        if (mp > kMaxPower) throw std::invalid_argument("polynomial degree too high for the stepper");
        max_power_ = mp;
    }

    Representation representation() const { return representation_; }
    bool noisy() const { return noisy_; }

    /// Drift and noise amplitude per slot at (alpha, alpha_bar).
    void evaluate(Complex alpha, Complex alpha_bar, std::array<Complex, 2>& drift,
                  std::array<Complex, 2>& noise) const {
        std::array<Complex, kMaxPower + 1> bar_pow, amp_pow;
        bar_pow[0] = amp_pow[0] = 1.0;
        for (int k = 1; k <= max_power_; ++k) {
            bar_pow[k] = bar_pow[k - 1] * alpha_bar;
            amp_pow[k] = amp_pow[k - 1] * alpha;
        }
        for (std::size_t j = 0; j < 2; ++j) {
            drift[j] = drift_[j](bar_pow, amp_pow);
            const auto& g = noise_[j];
            if (!g.active) {
                noise[j] = 0.0;
                continue;
            }
            Complex v = g.prefactor * g.root(bar_pow, amp_pow);
            if (!g.unit_residual) v *= std::sqrt(g.residual(bar_pow, amp_pow));
            noise[j] = v;
        }
    }

private:
    struct Noise {
        bool active = false;
        Complex prefactor{};
        CompiledPolynomial root;
        bool unit_residual = true;
        CompiledPolynomial residual;
    };

    Representation representation_;
    std::array<CompiledPolynomial, 2> drift_;
    std::array<Noise, 2> noise_;
    bool noisy_ = false;
    int max_power_ = 0;
};

/// Semi-implicit Stratonovich midpoint step.
///
///   m_{k+1} = x + (dt/2) A(m_k) + (1/2) g(m_k) dW,   m_0 = x,
///   x_new   = 2 m_K - x,  K = kMidpointIterations,
/// with the same increment dW for every iteration. Throws DivergedTrajectory
/// when a component leaves the escape radius or becomes non-finite.
inline PhaseState step_stratonovich_midpoint(const PhaseState& state, const CompiledModel& model, double dt,
                                             const NoiseIncrement& noise,
                                             double escape_radius = std::numeric_limits<double>::infinity()) {
    const bool wigner = state.representation == Representation::wigner;
    const Complex x0 = state.alpha;
    const Complex y0 = wigner ? std::conj(state.alpha) : state.alpha_bar;
    Complex xm = x0, ym = y0;
    std::array<Complex, 2> a, g;
    for (int it = 0; it < kMidpointIterations; ++it) {
        model.evaluate(xm, ym, a, g);
        xm = x0 + 0.5 * (a[0] * dt + g[0] * noise.dW[0]);
        ym = wigner ? std::conj(xm) : y0 + 0.5 * (a[1] * dt + g[1] * noise.dW[1]);
    }
    PhaseState out = state;
    out.alpha = 2.0 * xm - x0;
    out.alpha_bar = wigner ? std::conj(out.alpha) : 2.0 * ym - y0;
    out.t = state.t + dt;
    if (!out.finite() || std::abs(out.alpha) > escape_radius || std::abs(out.alpha_bar) > escape_radius)
        throw DivergedTrajectory("trajectory left escape radius at t=" + std::to_string(out.t));
    return out;
}

}  // namespace phasekit
