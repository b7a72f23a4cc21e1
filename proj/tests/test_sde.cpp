// Exact truncated Wigner rotation, noise increments and the midpoint integrator.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <numbers>

#include "phasekit/ensemble.hpp"
#include "phasekit/sde.hpp"
#include "support/integrator_checks.hpp"

using namespace phasekit;

namespace {

PhaseState wigner_state(Complex a) { return {Representation::wigner, a, std::conj(a), 0.0}; }

}  // namespace

TEST_CASE("exact truncated Wigner rotation", "[sde][tw_exact]") {
    SECTION("unit amplitude over dt = pi flips sign") {
        const PhaseState s = step_tw_exact(wigner_state(1.0), std::numbers::pi);
        REQUIRE(std::abs(s.alpha - Complex(-1.0, 0.0)) < 1e-15);
        REQUIRE(s.alpha_bar == std::conj(s.alpha));
        REQUIRE(s.t == std::numbers::pi);
    }
    SECTION("phase advance per unit scaled time is -(2N-1)/N") {
        const double N = 1000.0;
        const PhaseState s = step_tw_exact(wigner_state(std::sqrt(N)), 1.0 / N);
        REQUIRE(std::arg(s.alpha) == Catch::Approx(-1.999).margin(1e-12));
    }
    SECTION("zero amplitude stays at the origin") {
        REQUIRE(step_tw_exact(wigner_state(0.0), 1.0).alpha == Complex{});
    }
}

TEST_CASE("exact rotation conserves the modulus over 10^6 steps", "[sde][tw_exact][conservation]") {
    auto drift_after = [](Complex a0, double dt) {
        PhaseState s = wigner_state(a0);
        for (int k = 0; k < 1000000; ++k) s = step_tw_exact(s, dt);
        return std::abs(s.alpha) - std::abs(a0);
    };
    for (Complex a0 : {Complex(1.0, 0.0), Complex(0.8, 0.6), Complex(3.0, -4.0)})
        for (double dt : {1e-6, 1e-3, 0.37}) {
            INFO("alpha0 = " << a0 << ", dt = " << dt);
            CHECK(std::abs(drift_after(a0, dt)) < 1e-12);
        }
    // at |alpha| = sqrt(1000) the rounding random walk is about one part in 10^13
    const double big = std::sqrt(1000.0);
    CHECK(std::abs(drift_after(big, 1e-3)) < 1e-13 * big);
}

TEST_CASE("truncated Wigner one-step map is volume preserving", "[sde][tw_exact][purity]") {
    const double h = 1e-5;
    for (Complex a0 : {Complex(1.0, 0.5), Complex(-2.0, 3.0), Complex(std::sqrt(1000.0), 0.0)})
        for (double dt : {1e-4, 1e-5}) {
            auto map = [&](double x, double y) { return step_tw_exact(wigner_state({x, y}), dt).alpha; };
            const Complex dx = (map(a0.real() + h, a0.imag()) - map(a0.real() - h, a0.imag())) / (2 * h);
            const Complex dy = (map(a0.real(), a0.imag() + h) - map(a0.real(), a0.imag() - h)) / (2 * h);
            const double det = dx.real() * dy.imag() - dx.imag() * dy.real();
            INFO("alpha0 = " << a0 << ", dt = " << dt);
            CHECK(std::abs(det - 1.0) < 1e-8);
        }
}

TEST_CASE("noise-free midpoint scheme is second order on Eq. (3)", "[sde][midpoint]") {
    const Complex a0(2.0, 1.0);
    double previous = testing::deterministic_midpoint_error(a0, 1.0, 50);
    for (std::size_t steps : {100, 200, 400}) {
        const double e = testing::deterministic_midpoint_error(a0, 1.0, steps);
        INFO("steps = " << steps);
        CHECK(previous / e >= 3.5);
        previous = e;
    }
}

TEST_CASE("midpoint scheme on harmonic drift conserves the modulus to O(dt^2)", "[sde][midpoint]") {
    const CompiledModel model(derive_wigner_model(parse_hamiltonian("ad a")));
    const double dt = 1e-2;
    PhaseState s = wigner_state(Complex(0.6, 0.8));
    for (int k = 0; k < 100; ++k) {
        const double before = std::abs(s.alpha);
        s = step_stratonovich_midpoint(s, model, dt, NoiseIncrement{});
        REQUIRE(std::abs(std::abs(s.alpha) - before) < dt * dt);
    }
}

TEST_CASE("positive-P midpoint scheme converges strongly under step halving", "[sde][midpoint][positive_p]") {
    const auto r = testing::positive_p_strong_errors(100, 2024, Complex(1.0, 0.0), 0.25, 16, 4);
    INFO("errors " << r.error_coarse << " -> " << r.error_fine);
    REQUIRE(r.ratio() >= 1.3);
}

TEST_CASE("noise increments realise <xi_j xi_j'> = 2i delta", "[sde][noise]") {
    const DriftDiffusionModel model = positive_p_stratonovich(anharmonic_hamiltonian());
    constexpr int n = 1000000;
    const double dt = 1e-3;
    RandomStream stream(5, 0);
    Complex s1{}, s11{}, s12{};
    bool two_slots = true;
    for (int k = 0; k < n; ++k) {
        const NoiseIncrement inc = build_noise(stream, model, dt);
        two_slots &= inc.count == 2;
        const Complex x1 = inc.xi_dt(0), x2 = inc.xi_dt(1);
        s1 += x1;
        s11 += x1 * x1;
        s12 += x1 * x2;
    }
    // (xi dt)^2 = 2i dW^2: mean 2i dt, standard deviation 2 sqrt(2) dt
    const double se_sq = 2.0 * std::sqrt(2.0) * dt / std::sqrt(double(n));
    CHECK(std::abs(s11 / double(n) - Complex(0.0, 2.0 * dt)) < 5 * se_sq);
    // xi1 xi2 = 2i dW1 dW2: mean 0, standard deviation 2 dt
    CHECK(std::abs(s12 / double(n)) < 5 * 2.0 * dt / std::sqrt(double(n)));
    // xi dt = (1+i) dW: mean 0, |.| standard deviation sqrt(2 dt)
    CHECK(std::abs(s1 / double(n)) < 5 * std::sqrt(2.0 * dt / n));
    CHECK(two_slots);
    REQUIRE(stream.draws() == 2u * n);
}

TEST_CASE("noise-free models draw no random numbers", "[sde][noise]") {
    RandomStream stream(1, 1);
    const NoiseIncrement inc = build_noise(stream, derive_wigner_model(anharmonic_hamiltonian()), 1e-3);
    REQUIRE(inc.count == 0);
    REQUIRE(stream.draws() == 0);
}

TEST_CASE("midpoint step flags trajectories leaving the escape radius", "[sde][divergence]") {
    const CompiledModel model(positive_p_stratonovich(anharmonic_hamiltonian()));
    PhaseState s{Representation::positive_p, Complex(10.0, 0.0), Complex(10.0, 0.0), 0.0};
    REQUIRE_THROWS_AS(step_stratonovich_midpoint(s, model, 1e-3, NoiseIncrement{}, 5.0), DivergedTrajectory);
    REQUIRE_NOTHROW(step_stratonovich_midpoint(s, model, 1e-6, NoiseIncrement{}, 100.0));

    PhaseState bad = s;
    bad.alpha = Complex(std::numeric_limits<double>::quiet_NaN(), 0.0);
    REQUIRE_THROWS_AS(step_stratonovich_midpoint(bad, model, 1e-3, NoiseIncrement{}), DivergedTrajectory);
}

TEST_CASE("CompiledModel rejects noisy Ito models", "[sde]") {
    REQUIRE_THROWS_AS(CompiledModel(derive_positive_p_model(anharmonic_hamiltonian())), std::invalid_argument);
    REQUIRE_NOTHROW(CompiledModel(positive_p_stratonovich(anharmonic_hamiltonian())));
}
