#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"
#include "moments.hpp"

namespace phasekit {

/// Coherent state evolved exactly under H = (ad a)^2 on a window of Fock levels.
///
/// Amplitudes are stored at t = 0; `amplitude(n)` applies the spectral
/// phase exp(-i n^2 t) for the current time, so repeated evolution never
/// accumulates rounding.
class OracleState {
public:
    std::int64_t n_min() const { return n_min_; }
    std::int64_t n_max() const { return n_max_; }
    std::size_t size() const { return initial_.size(); }
    double particle_number() const { return particle_number_; }
    Complex alpha0() const { return alpha0_; }
    double time() const { return time_; }

    Complex amplitude(std::int64_t n) const {
        if (n < n_min_ || n > n_max_) return {};
        return current_[static_cast<std::size_t>(n - n_min_)];
    }

    const std::vector<Complex>& amplitudes() const { return current_; }

    double norm() const {
        double s = 0.0;
        for (const auto& c : current_) s += std::norm(c);
        return s;
    }

private:
    friend OracleState init_coherent(Complex, double, std::size_t);
    friend OracleState evolve(const OracleState&, double);

    void refresh() {
        current_.resize(initial_.size());
        const long double two_pi = 2.0L * std::numbers::pi_v<long double>;
        for (std::size_t k = 0; k < initial_.size(); ++k) {
            const long double n = static_cast<long double>(n_min_ + static_cast<std::int64_t>(k));
            const long double phase = std::fmod(n * n * static_cast<long double>(time_), two_pi);
            current_[k] = initial_[k] * std::polar(1.0, -static_cast<double>(phase));
        }
    }

    std::int64_t n_min_ = 0;
    std::int64_t n_max_ = -1;
    double particle_number_ = 0.0;
    Complex alpha0_{};
    double time_ = 0.0;
    std::vector<Complex> initial_;
    std::vector<Complex> current_;
};

inline constexpr std::size_t kDefaultWindowBudget = std::size_t{1} << 24;

/// Poisson-windowed coherent amplitudes c_n = e^{-N/2} alpha0^n / sqrt(n!).
///
/// Log-weights come from the ratio recursion log w_{n+1} - log w_n =
/// log(N/(n+1)) anchored at the mode, and are normalised against the
/// Poisson mass summed out to where terms fall below 1e-40 of the mode.
/// The half-width k sqrt(N) starts at k = 8 and doubles until the captured
/// mass reaches 1 - mass_tolerance.
inline OracleState init_coherent(Complex alpha0, double mass_tolerance = 1e-12,
                                 std::size_t window_budget = kDefaultWindowBudget) {
    const double N = std::norm(alpha0);
    if (!(N > 0.0)) throw std::invalid_argument("coherent amplitude must be nonzero");
    if (!(mass_tolerance > 0.0 && mass_tolerance <= 1e-6))
        throw std::invalid_argument("mass tolerance must lie in (0, 1e-6]");

    const auto mode = static_cast<std::int64_t>(std::floor(N));
    const double log_cut = std::log(1e-40);

    // log-weights relative to the mode, on the full numerically relevant support
    std::vector<double> upper{0.0};
    for (std::int64_t n = mode; upper.back() > log_cut; ++n)
        upper.push_back(upper.back() + std::log(N / static_cast<double>(n + 1)));
    std::vector<double> lower{0.0};
    for (std::int64_t n = mode; n > 0 && lower.back() > log_cut; --n)
        lower.push_back(lower.back() - std::log(N / static_cast<double>(n)));

    auto log_weight = [&](std::int64_t n) {
        const std::int64_t d = n - mode;
        if (d >= 0) return static_cast<std::size_t>(d) < upper.size() ? upper[static_cast<std::size_t>(d)] : -1e300;
        return static_cast<std::size_t>(-d) < lower.size() ? lower[static_cast<std::size_t>(-d)] : -1e300;
    };
    const std::int64_t support_lo = mode - static_cast<std::int64_t>(lower.size()) + 1;
    const std::int64_t support_hi = mode + static_cast<std::int64_t>(upper.size()) - 1;

    double total = 0.0;
    for (std::int64_t n = support_lo; n <= support_hi; ++n) total += std::exp(log_weight(n));

    const double sigma = std::sqrt(N);
    for (double k = 8.0;; k *= 2.0) {
        const auto lo = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(N - k * sigma)));
        const auto hi = static_cast<std::int64_t>(std::ceil(N + k * sigma));
        if (static_cast<std::size_t>(hi - lo + 1) > window_budget)
            throw WindowOverflow("Fock window [" + std::to_string(lo) + ", " + std::to_string(hi) +
                                 "] exceeds budget of " + std::to_string(window_budget) + " levels");
        double captured = 0.0;
        for (std::int64_t n = std::max(lo, support_lo); n <= std::min(hi, support_hi); ++n)
            captured += std::exp(log_weight(n));
        if (captured / total >= 1.0 - mass_tolerance || (lo <= support_lo && hi >= support_hi)) {
            OracleState s;
            s.n_min_ = lo;
            s.n_max_ = hi;
            s.particle_number_ = N;
            s.alpha0_ = alpha0;
            s.initial_.resize(static_cast<std::size_t>(hi - lo + 1));
            const double arg = std::arg(alpha0);
            const double log_total = std::log(total);
            for (std::int64_t n = lo; n <= hi; ++n) {
                const double lw = log_weight(n);
                const double mag = lw < -1e299 ? 0.0 : std::exp(0.5 * (lw - log_total));
                s.initial_[static_cast<std::size_t>(n - lo)] = std::polar(mag, arg * static_cast<double>(n));
            }
            s.refresh();
            return s;
        }
    }
}

/// Advances the state by t: c_n -> c_n exp(-i n^2 t).
inline OracleState evolve(const OracleState& state, double t) {
    OracleState out = state;
    out.time_ = state.time_ + t;
    out.refresh();
    return out;
}

namespace detail {

/// sqrt(n (n-1) ... (n-k+1)); zero when n < k.
inline double sqrt_falling(std::int64_t n, int k) {
    if (n < k) return 0.0;
    double r = 1.0;
    for (int j = 0; j < k; ++j) r *= static_cast<double>(n - j);
    return std::sqrt(r);
}

}  // namespace detail

/// <ad^p a^q> = sum_n conj(c_{n-q+p}) c_n sqrt(n!/(n-q)!) sqrt((n-q+p)!/(n-q)!).
inline Complex ladder_moment(const OracleState& s, int p, int q) {
    if (p < 0 || q < 0 || p + q > 4) throw std::invalid_argument("ladder_moment supports 0 <= p+q <= 4");
    Complex sum{};
    for (std::int64_t n = std::max<std::int64_t>(s.n_min(), q); n <= s.n_max(); ++n) {
        const std::int64_t m = n - q + p;
        if (m < s.n_min() || m > s.n_max()) continue;
        const double w = detail::sqrt_falling(n, q) * detail::sqrt_falling(m, p);
        sum += std::conj(s.amplitude(m)) * s.amplitude(n) * w;
    }
    return sum;
}

/// Raw quadrature moments <X^k> assembled from ladder moments.
inline MomentVector oracle_moments(const OracleState& s, const QuadratureSpec& spec) {
    std::array<Complex, 4> normal{};
    for (int k = 1; k <= 4; ++k) {
        Complex acc{};
        for (int j = 0; j <= k; ++j)
            acc += detail::binomial(k, j) * std::polar(1.0, spec.theta * (2 * j - k)) * ladder_moment(s, j, k - j);
        normal[static_cast<std::size_t>(k - 1)] = acc;
    }
    return detail::real_part(detail::assemble_from_normal(normal));
}

/// Exact cumulants at the state's current time (sigma fields zero).
///
/// Evaluated on the displaced quadrature Y = X - <X> through
/// b = e^{-i theta} a - <e^{-i theta} a>, with <bd^j b^k> = <b^j psi, b^k psi>.
/// Cumulants are shift invariant, and the displaced route avoids the
/// cancellation between raw moments of order N^2 at large N.
///
/// (b v)_n needs v_n and v_{n+1}, so b^k psi is kept only on
/// [n_min, n_max - k]. Entries past that range would pair a window amplitude
/// with an amplitude outside the window, leaving an uncancelled |beta| c_edge
/// that b^k amplifies by |beta|^k.
inline CumulantReport oracle_cumulants(const OracleState& s, const QuadratureSpec& spec) {
    const Complex rot = std::polar(1.0, -spec.theta);
    const Complex beta = rot * ladder_moment(s, 0, 1);

    const std::int64_t lo = s.n_min();
    const auto len = static_cast<std::size_t>(s.n_max() - lo + 1);
    std::array<std::vector<Complex>, 5> v;
    v[0] = s.amplitudes();
    for (std::size_t k = 1; k <= 4; ++k) {
        v[k].assign(len, Complex{});
        const std::size_t valid = len > k ? len - k : 0;
        for (std::size_t i = 0; i < valid; ++i) {
            const double root = std::sqrt(static_cast<double>(lo + static_cast<std::int64_t>(i) + 1));
            v[k][i] = rot * root * v[k - 1][i + 1] - beta * v[k - 1][i];
        }
    }
    auto inner = [&](std::size_t j, std::size_t k) {
        Complex acc{};
        for (std::size_t i = 0; i < len; ++i) acc += std::conj(v[j][i]) * v[k][i];
        return acc;
    };
    std::array<Complex, 4> normal{};
    for (int k = 1; k <= 4; ++k) {
        Complex acc{};
        for (int j = 0; j <= k; ++j)
            acc += detail::binomial(k, j) * inner(static_cast<std::size_t>(j), static_cast<std::size_t>(k - j));
        normal[static_cast<std::size_t>(k - 1)] = acc;
    }
    return cumulants(detail::real_part(detail::assemble_from_normal(normal)));
}

/// Dense-matrix reference: builds a, ad and H = (ad a)^2 on a `cutoff`-level
/// space, evolves the truncated coherent vector in the eigenbasis of the
/// diagonal H, and takes <psi|X^k|psi> from explicit matrix powers.
inline MomentVector dense_brute_force(Complex alpha0, int cutoff, double t, const QuadratureSpec& spec) {
    if (cutoff < 2 || cutoff > 200) throw std::invalid_argument("dense cutoff must lie in [2, 200]");
    if (std::norm(alpha0) > cutoff / 3.0) throw std::invalid_argument("|alpha0|^2 must not exceed cutoff/3");

    using Matrix = Eigen::MatrixXcd;
    using Vector = Eigen::VectorXcd;
    const Eigen::Index D = cutoff;
    Matrix a = Matrix::Zero(D, D);
    for (Eigen::Index n = 1; n < D; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    const Matrix ad = a.adjoint();
    const Matrix number = ad * a;
    const Matrix H = number * number;

    Vector psi(D);
    psi(0) = std::exp(-0.5 * std::norm(alpha0));
    for (Eigen::Index n = 1; n < D; ++n) psi(n) = psi(n - 1) * alpha0 / std::sqrt(static_cast<double>(n));
    const double loss = 1.0 - psi.squaredNorm();
    if (loss > 1e-10)
        throw CutoffInsufficient("truncated coherent state loses norm " + std::to_string(loss) + " at cutoff " +
                                 std::to_string(cutoff));

    for (Eigen::Index n = 0; n < D; ++n) psi(n) *= std::exp(Complex(0.0, -1.0) * H(n, n).real() * t);

    const Matrix X = std::polar(1.0, -spec.theta) * a + std::polar(1.0, spec.theta) * ad;
    MomentVector out;
    Matrix power = Matrix::Identity(D, D);
    for (std::size_t k = 0; k < 4; ++k) {
        power = power * X;
        out.m[k] = psi.dot(power * psi).real();  // dot conjugates the first argument
    }
    return out;
}

}  // namespace phasekit
