// Command-line front end: derive, simulate, oracle, compare, purity.

#include <chrono>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "phasekit/phasekit.hpp"

namespace {

constexpr int kExitError = 1;
constexpr int kExitDivergence = 3;
constexpr int kExitCompareFailed = 4;

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty())
        std::cout << text;
    else
        phasekit::write_text_file(out_path, text);
}

phasekit::SimulationConfig load_config(const std::string& path, std::optional<phasekit::Method> method,
                                       std::uint64_t seed, unsigned threads, const std::string& out) {
    auto cfg = phasekit::parse_config(phasekit::read_text_file(path), method);
    cfg.seed = seed;
    cfg.threads = threads;
    cfg.output = out;
    for (const auto& w : cfg.warnings) std::cerr << "warning: " << w << "\n";
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Phase-space trajectory simulation of the anharmonic oscillator"};
    app.require_subcommand(1);

    std::string hamiltonian = "ad a ad a";
    std::string config_path, out_path, csv_a, csv_b;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    bool quiet = false;
    double damping = 0.0;
    phasekit::ComparisonPolicy policy;

    auto* derive = app.add_subcommand("derive", "Print phase-space equations derived from a Hamiltonian");
    derive->add_option("hamiltonian", hamiltonian, "Operator products over 'ad' and 'a', e.g. \"ad a ad a\"");
    derive->add_option("--out", out_path, "Write the report to this path");

    auto* simulate = app.add_subcommand("simulate", "Run a stochastic ensemble and write cumulants as CSV");
    simulate->add_option("--config", config_path, "key=value run configuration")->required()->check(CLI::ExistingFile);
    simulate->add_option("--seed", seed, "Master seed (decimal 64-bit)");
    simulate->add_option("--threads", threads, "Worker threads (0 = all available)");
    simulate->add_option("--out", out_path, "CSV output path (stdout if omitted)");
    simulate->add_flag("--quiet", quiet, "Suppress progress on stderr");

    auto* oracle = app.add_subcommand("oracle", "Exact Fock-space cumulants on the configured grid");
    oracle->add_option("--config", config_path, "key=value run configuration")->required()->check(CLI::ExistingFile);
    oracle->add_option("--out", out_path, "CSV output path (stdout if omitted)");

    auto* cmp = app.add_subcommand("compare", "Compare two cumulant CSVs row by row");
    cmp->add_option("candidate", csv_a, "CSV under test")->required()->check(CLI::ExistingFile);
    cmp->add_option("reference", csv_b, "Reference CSV (e.g. oracle)")->required()->check(CLI::ExistingFile);
    cmp->add_option("--sigma", policy.n_sigma, "Allowed deviation in combined batch sigmas");
    cmp->add_option("--k3-peak-frac", policy.k3_peak_fraction, "Allowed k3 deviation as a fraction of the reference peak |k3|");
    cmp->add_option("--k4-peak-frac", policy.k4_peak_fraction, "Allowed k4 deviation as a fraction of the reference peak |k4|");
    cmp->add_option("--tau-max", policy.tau_max, "Only judge rows with tau <= this");
    cmp->add_option("--abs-slack", policy.absolute_slack, "Absolute tolerance for rows with zero sigma");
    cmp->add_option("--out", out_path, "Write the report to this path");

    auto* purity = app.add_subcommand("purity", "Check whether the truncated Wigner drift preserves purity");
    purity->add_option("hamiltonian", hamiltonian, "Operator products over 'ad' and 'a'");
    purity->add_option("--damping", damping, "Add a damping-like drift -g a, -g a*");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*derive) {
            emit(phasekit::derive_report(hamiltonian), out_path);
        } else if (*purity) {
            std::cout << phasekit::purity_check(phasekit::parse_hamiltonian(hamiltonian), damping).text;
        } else if (*oracle) {
            const auto cfg = load_config(config_path, phasekit::Method::oracle, seed, threads, out_path);
            emit(phasekit::to_csv(phasekit::run_oracle(cfg)), out_path);
        } else if (*simulate) {
            const auto cfg = load_config(config_path, std::nullopt, seed, threads, out_path);
            const auto start = std::chrono::steady_clock::now();
            std::function<void(std::size_t, std::size_t)> progress;
            if (!quiet)
                progress = [](std::size_t done, std::size_t total) {
                    std::cerr << "\rbatches " << done << "/" << total << std::flush;
                    if (done == total) std::cerr << "\n";
                };
            const auto rows = phasekit::run(cfg, progress);
            emit(phasekit::to_csv(rows), out_path);
            if (!quiet)
                std::cerr << "finished in "
                          << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()
                          << " s\n";
        } else if (*cmp) {
            const auto a = phasekit::parse_csv(phasekit::read_text_file(csv_a));
            const auto b = phasekit::parse_csv(phasekit::read_text_file(csv_b));
            const auto report = phasekit::compare(a, b, policy);
            emit(phasekit::render_comparison(report), out_path);
            if (!report.pass()) return kExitCompareFailed;
        }
    } catch (const phasekit::DivergenceThresholdExceeded& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitDivergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return 0;
}
