#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include "phase_space_model.hpp"
#include "random.hpp"

namespace phasekit {

/// One trajectory's phase-space coordinates.
///
/// Wigner: `alpha` holds the amplitude and `alpha_bar` is kept equal to its
/// conjugate. Positive-P: the independent pair (alpha1, alpha2*).
struct PhaseState {
    Representation representation = Representation::wigner;
    Complex alpha{};
    Complex alpha_bar{};
    double t = 0.0;

    std::size_t size() const { return representation == Representation::wigner ? 1 : 2; }

    bool finite() const {
        return std::isfinite(alpha.real()) && std::isfinite(alpha.imag()) && std::isfinite(alpha_bar.real()) &&
               std::isfinite(alpha_bar.imag());
    }
};

struct InitialStateSpec {
    Complex amplitude{};
    Representation representation = Representation::wigner;

    /// Real amplitude sqrt(N), the benchmark default.
    static InitialStateSpec coherent(double particle_number, Representation rep) {
        return {Complex(std::sqrt(particle_number), 0.0), rep};
    }

    double particle_number() const { return std::norm(amplitude); }
};

/// alpha(0) = alpha0 + zeta with Re/Im zeta independent, variance 1/4 each,
/// so <|zeta|^2> = 1/2.
inline PhaseState sample_wigner_coherent(const InitialStateSpec& spec, RandomStream& stream) {
    if (spec.representation != Representation::wigner)
        throw std::invalid_argument("sample_wigner_coherent needs a Wigner state spec");
    const double re = 0.5 * stream.gaussian();
    const double im = 0.5 * stream.gaussian();
    PhaseState s;
    s.representation = Representation::wigner;
    s.alpha = spec.amplitude + Complex(re, im);
    s.alpha_bar = std::conj(s.alpha);
    return s;
}

/// Delta-function initial condition alpha1 = alpha2 = alpha0; consumes no randomness.
inline PhaseState sample_positive_p_coherent(const InitialStateSpec& spec) {
    if (spec.representation != Representation::positive_p)
        throw std::invalid_argument("sample_positive_p_coherent needs a positive-P state spec");
    PhaseState s;
    s.representation = Representation::positive_p;
    s.alpha = spec.amplitude;
    s.alpha_bar = std::conj(spec.amplitude);
    return s;
}

}  // namespace phasekit
