#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "errors.hpp"
#include "hamiltonian_parser.hpp"
#include "moments.hpp"
#include "phase_space_model.hpp"
#include "random.hpp"
#include "sampler.hpp"
#include "sde.hpp"

namespace phasekit {

/// Anharmonic oscillator H = ad a ad a = ad^2 a^2 + ad a.
inline Polynomial anharmonic_hamiltonian() { return parse_hamiltonian("ad a ad a"); }

/// Stratonovich positive-P model of a Hamiltonian.
inline DriftDiffusionModel positive_p_stratonovich(const Polynomial& hamiltonian) {
    return ito_to_stratonovich(derive_positive_p_model(hamiltonian));
}

/// Escape radius for divergence flagging: 10^3 sqrt(N).
inline double escape_radius(double particle_number) { return 1e3 * std::sqrt(particle_number); }

struct EnsembleConfig {
    Representation representation = Representation::wigner;
    double particle_number = 1000.0;
    /// Defaults to sqrt(N) when unset.
    std::optional<Complex> amplitude;
    std::size_t n_paths = 100000;
    std::size_t batches = 100;
    /// Output times in scaled units tau = N t.
    std::vector<double> taus;
    /// Integrator step in tau units (ignored by the exact Wigner stepper).
    double dtau = 1e-3;
    std::uint64_t seed = 0;
    /// 0 selects all hardware threads.
    unsigned threads = 0;
    /// Maximum allowed diverged fraction at any output time.
    double divergence_threshold = 1e-3;
    /// Custom Hamiltonian; the anharmonic oscillator when unset. The Wigner
    /// route uses the exact rotation stepper only for the default.
    std::optional<Polynomial> hamiltonian;
    /// Progress messages (e.g. to stderr); silent when empty.
    std::function<void(std::size_t done, std::size_t total)> progress;
};

struct EnsembleResult {
    /// Times actually reached (snapped to integrator steps).
    std::vector<double> taus;
    std::vector<MomentAccumulator> moments;
    std::size_t n_paths = 0;
};

namespace detail {

/// Per-output-time step counts after snapping to the integrator grid.
inline std::vector<std::int64_t> snapped_steps(const std::vector<double>& taus, double dtau) {
    std::vector<std::int64_t> steps;
    steps.reserve(taus.size());
    for (double tau : taus) steps.push_back(std::llround(tau / dtau));
    return steps;
}

}  // namespace detail

/// Runs every trajectory from its initial sample through all output times.
///
/// Trajectory i uses stream (seed, i) and belongs to batch floor(i B / n).
/// Whole batches are the unit of work, so each batch's sums are produced by
/// one worker in trajectory order and results do not depend on the worker
/// count. A trajectory that diverges is counted at every later output time
/// and contributes no further samples.
inline EnsembleResult evolve_ensemble(const EnsembleConfig& config) {
    if (!(config.particle_number > 0.0)) throw std::invalid_argument("particle number must be positive");
    if (config.batches == 0 || config.n_paths < config.batches)
        throw std::invalid_argument("need n_paths >= batches >= 1");
    if (config.taus.empty()) throw std::invalid_argument("no output times");
    for (std::size_t k = 0; k < config.taus.size(); ++k) {
        if (config.taus[k] < 0.0) throw std::invalid_argument("output times must be nonnegative");
        if (k > 0 && config.taus[k] < config.taus[k - 1])
            throw std::invalid_argument("output times must be increasing");
    }

    const double N = config.particle_number;
    const Complex alpha0 = config.amplitude.value_or(Complex(std::sqrt(N), 0.0));
    const InitialStateSpec spec{alpha0, config.representation};
    const Polynomial hamiltonian = config.hamiltonian.value_or(anharmonic_hamiltonian());
    const bool exact_wigner = config.representation == Representation::wigner && !config.hamiltonian;

    const DriftDiffusionModel model = config.representation == Representation::wigner
                                          ? derive_wigner_model(hamiltonian)
                                          : positive_p_stratonovich(hamiltonian);
    const CompiledModel compiled(model);
    const double radius = escape_radius(N);

    EnsembleResult result;
    std::vector<std::int64_t> steps;
    if (exact_wigner) {
        result.taus = config.taus;
    } else {
        if (!(config.dtau > 0.0)) throw std::invalid_argument("dtau must be positive");
        steps = detail::snapped_steps(config.taus, config.dtau);
        for (auto s : steps) result.taus.push_back(static_cast<double>(s) * config.dtau);
    }
    const double dt = config.dtau / N;

    result.n_paths = config.n_paths;
    result.moments.assign(config.taus.size(), MomentAccumulator(config.representation, config.batches));

    auto run_batch = [&](std::size_t b) {
        const std::size_t begin = b * config.n_paths / config.batches;
        const std::size_t end = (b + 1) * config.n_paths / config.batches;
        for (std::size_t i = begin; i < end; ++i) {
            RandomStream stream = stream_for_trajectory(config.seed, i);
            PhaseState state = config.representation == Representation::wigner
                                   ? sample_wigner_coherent(spec, stream)
                                   : sample_positive_p_coherent(spec);
            std::int64_t done = 0;
            std::size_t k = 0;
            try {
                for (; k < result.taus.size(); ++k) {
                    if (exact_wigner) {
                        state = step_tw_exact(state, result.taus[k] / N - state.t);
                    } else {
                        for (; done < steps[k]; ++done) {
                            const NoiseIncrement noise = build_noise(stream, model, dt);
                            state = step_stratonovich_midpoint(state, compiled, dt, noise, radius);
                        }
                    }
                    result.moments[k].accumulate(state, b);
                }
            } catch (const DivergedTrajectory&) {
                for (; k < result.taus.size(); ++k) result.moments[k].batch(b).mark_diverged();
            }
        }
    };

    unsigned workers = config.threads != 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, config.batches));

    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> finished{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t b = next.fetch_add(1);
            if (b >= config.batches) return;
            try {
                run_batch(b);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(config.batches);
                return;
            }
            const std::size_t n = finished.fetch_add(1) + 1;
            if (config.progress) {
                std::lock_guard lock(failure_mutex);
                config.progress(n, config.batches);
            }
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    for (const auto& acc : result.moments) {
        const std::size_t diverged = acc.total_diverged();
        if (static_cast<double>(diverged) > config.divergence_threshold * static_cast<double>(config.n_paths))
            throw DivergenceThresholdExceeded(diverged, config.n_paths, config.divergence_threshold);
    }
    return result;
}

}  // namespace phasekit
