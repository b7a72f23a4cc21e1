// Run configuration, CSV output, comparison and the symbolic reports.

#include <catch2/catch_amalgamated.hpp>

#include <chrono>
#include <string>

#include "phasekit/config.hpp"
#include "phasekit/report.hpp"
#include "phasekit/runner.hpp"

using namespace phasekit;

namespace {

ConfigError::Kind config_error_kind(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.kind();
    }
    FAIL("expected ConfigError for:\n" << text);
    return ConfigError::Kind::invalid_value;
}

std::vector<CsvRow> sample_rows() {
    return {{0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1000, 0, "tw"},
            {0.25, 0.5, -0.123456789012345678, 0.01, 2.5e-7, 3e-9, 1000, 2, "tw"},
            {0.5, 1.0, 1.0 / 3.0, 0.02, -4.0, 0.5, 998, 2, "tw"}};
}

}  // namespace

TEST_CASE("minimal configuration takes documented defaults", "[config]") {
    const SimulationConfig c = parse_config("method = TW\nN = 1000\n");
    REQUIRE(c.method == Method::tw);
    REQUIRE(c.N == 1000.0);
    REQUIRE(c.n_paths == 100000);
    REQUIRE(c.batches == 100);
    REQUIRE(c.seed == 0);
    REQUIRE(c.theta_mode == ThetaMode::rotating);
    REQUIRE(c.dtau == 1e-3);
    REQUIRE(c.divergence_threshold == 1e-3);
    REQUIRE(c.warnings.empty());
    const auto grid = c.tau_grid();
    REQUIRE(grid.size() == 41);
    REQUIRE(grid.front() == 0.0);
    REQUIRE(grid.back() == 10.0);
    REQUIRE(grid[1] == 0.25);
    REQUIRE(c.theta_for(1.5) == 3.0);
}

TEST_CASE("configuration parsing details", "[config]") {
    SECTION("comments, spacing, scientific counts and case-insensitive methods") {
        const auto c = parse_config("# run\n  method=positivep  # trailing\nN=1e6\nn_paths = 1e5\nbatches=20\n\n");
        REQUIRE(c.method == Method::positive_p);
        REQUIRE(c.N == 1e6);
        REQUIRE(c.n_paths == 100000);
        REQUIRE(c.batches == 20);
    }
    SECTION("fixed theta") {
        const auto c = parse_config("method=TW\nN=10\ntheta_value=0.75\n");
        REQUIRE(c.theta_mode == ThetaMode::fixed);
        REQUIRE(c.theta_for(3.0) == 0.75);
        REQUIRE(config_error_kind("method=TW\nN=10\ntheta_mode=fixed\n") == ConfigError::Kind::missing_key);
    }
    SECTION("method override makes the method key optional") {
        const auto c = parse_config("N=1000\n", Method::oracle);
        REQUIRE(c.method == Method::oracle);
    }
    SECTION("single output time") {
        const auto c = parse_config("method=TW\nN=10\ntau_start=2\ntau_stop=2\ntau_points=1\n");
        REQUIRE(c.tau_grid() == std::vector<double>{2.0});
    }
}

TEST_CASE("configuration validation", "[config]") {
    using K = ConfigError::Kind;
    SECTION("fewer paths than batches") {
        try {
            parse_config("method=TW\nN=1000\nn_paths=50\nbatches=100\n");
            FAIL("no error");
        } catch (const ConfigError& e) {
            REQUIRE(e.kind() == K::invalid_value);
            REQUIRE(e.key() == "n_paths");
        }
    }
    SECTION("missing and unknown keys") {
        REQUIRE(config_error_kind("N=1000\n") == K::missing_key);
        REQUIRE(config_error_kind("method=TW\n") == K::missing_key);
        REQUIRE(config_error_kind("method=TW\nN=1000\nseeds=3\n") == K::unknown_key);
    }
    SECTION("invalid values") {
        REQUIRE(config_error_kind("method=Magic\nN=1000\n") == K::invalid_value);
        REQUIRE(config_error_kind("method=TW\nN=-1\n") == K::invalid_value);
        REQUIRE(config_error_kind("method=TW\nN=abc\n") == K::invalid_value);
        REQUIRE(config_error_kind("method=TW\nN=1000\nbatches=5\nn_paths=100\n") == K::invalid_value);
        REQUIRE(config_error_kind("method=TW\nN=1000\ntau_stop=30\n") == K::invalid_value);
        REQUIRE(config_error_kind("method=TW\nN=1000\ntau_start=3\ntau_stop=2\n") == K::invalid_value);
        REQUIRE(config_error_kind("method=TW\nN=1000\nn_paths=1.5\n") == K::invalid_value);
        REQUIRE(config_error_kind("method=TW\nN=1000\ndtau=0\n") == K::invalid_value);
        REQUIRE(config_error_kind("method=TW\nN=1000\nnot a pair\n") == K::invalid_value);
    }
}

TEST_CASE("configuration warnings", "[config]") {
    SECTION("oracle ignores sampling keys") {
        const auto c = parse_config("method=Oracle\nN=1000\nn_paths=10\n");
        REQUIRE(c.warnings.size() == 1);
        REQUIRE(c.warnings[0].find("n_paths") != std::string::npos);
    }
    SECTION("positive-P step must divide the output spacing") {
        REQUIRE(parse_config("method=PositiveP\nN=1000\n").warnings.empty());
        const auto c = parse_config("method=PositiveP\nN=1000\ndtau=0.0007\n");
        REQUIRE(c.warnings.size() == 1);
    }
}

TEST_CASE("CSV round trip is lossless", "[report][csv]") {
    const auto rows = sample_rows();
    const std::string text = to_csv(rows);
    REQUIRE(text.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
    const auto back = parse_csv(text);
    REQUIRE(back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        REQUIRE(back[i].tau == rows[i].tau);
        REQUIRE(back[i].k3 == rows[i].k3);
        REQUIRE(back[i].k4_sigma == rows[i].k4_sigma);
        REQUIRE(back[i].n_paths == rows[i].n_paths);
        REQUIRE(back[i].n_diverged == rows[i].n_diverged);
        REQUIRE(back[i].method == rows[i].method);
    }
    REQUIRE(to_csv(back) == text);
}

TEST_CASE("CSV parser rejects malformed input", "[report][csv]") {
    REQUIRE_THROWS_AS(parse_csv(""), Error);
    REQUIRE_THROWS_AS(parse_csv("tau,theta\n1,2\n"), Error);
    REQUIRE_THROWS_AS(parse_csv(std::string(kCsvHeader) + "\n1,2,3\n"), Error);
    REQUIRE_THROWS_AS(parse_csv(std::string(kCsvHeader) + "\n1,2,x,0,0,0,1,0,tw\n"), Error);
    REQUIRE(parse_csv(std::string(kCsvHeader) + "\r\n0,0,0,0,0,0,1,0,tw\r\n").size() == 1);
}

TEST_CASE("compare", "[report][compare]") {
    const auto rows = sample_rows();
    SECTION("identical inputs have zero deltas") {
        const auto rep = compare(rows, rows);
        REQUIRE(rep.pass());
        for (const auto& r : rep.rows) {
            REQUIRE(r.k3_delta == 0.0);
            REQUIRE(r.k4_delta == 0.0);
        }
        REQUIRE(render_comparison(rep).find("PASS") != std::string::npos);
    }
    SECTION("grid mismatches are errors") {
        auto shifted = rows;
        shifted[1].tau += 1e-3;
        REQUIRE_THROWS_AS(compare(shifted, rows), GridMismatch);
        auto short_rows = rows;
        short_rows.pop_back();
        REQUIRE_THROWS_AS(compare(short_rows, rows), GridMismatch);
        auto other_theta = rows;
        other_theta[2].theta = 0.0;
        REQUIRE_THROWS_AS(compare(other_theta, rows), GridMismatch);
    }
    SECTION("tolerance combines sigma, peak fraction and tau window") {
        auto ref = rows;
        for (auto& r : ref) r.k3_sigma = r.k4_sigma = 0.0;
        auto cand = ref;
        cand[2].k3 += 0.05;
        cand[2].k3_sigma = 0.02;
        REQUIRE(compare(cand, ref).pass());  // 2.5 sigma
        cand[2].k3_sigma = 0.01;
        const auto fail = compare(cand, ref);  // 5 sigma
        REQUIRE_FALSE(fail.pass());
        REQUIRE(fail.failures() == 1);
        REQUIRE(fail.worst_k3 == 2);
        ComparisonPolicy wide;
        wide.k3_peak_fraction = 0.25;  // peak |k3| is 1/3
        REQUIRE(compare(cand, ref, wide).pass());
        ComparisonPolicy early;
        early.tau_max = 0.3;
        const auto skipped = compare(cand, ref, early);
        REQUIRE(skipped.pass());
        REQUIRE_FALSE(skipped.rows[2].judged);
    }
    SECTION("exact rows are judged by the absolute slack") {
        auto ref = rows;
        for (auto& r : ref) r.k3_sigma = r.k4_sigma = 0.0;
        auto cand = ref;
        cand[0].k4 += 1.5e-8;  // raw-moment rounding of a deterministic ensemble at N = 1e3
        cand[1].k4 += 1e-3;
        cand[1].k4_sigma = 1e-3;
        REQUIRE_FALSE(compare(cand, ref).pass());
        ComparisonPolicy slack;
        slack.absolute_slack = 1.6e-7;
        const auto rep = compare(cand, ref, slack);
        REQUIRE(rep.pass());
        REQUIRE(rep.worst_k4 == 1);
        REQUIRE(rep.rows[1].k4_ratio == Catch::Approx(1.0));
    }
}

TEST_CASE("derive report reproduces the equations of motion", "[runner][derive]") {
    const auto start = std::chrono::steady_clock::now();
    const std::string text = derive_report("ad a ad a");
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    REQUIRE(seconds < 1.0);
    REQUIRE(text.find("H = 1+0i * a*^1 a^1 + 1+0i * a*^2 a^2") != std::string::npos);
    REQUIRE(text.find("drift[a] = 0+1i * a*^0 a^1 + 0-2i * a*^1 a^2") != std::string::npos);
    REQUIRE(text.find("positive-P (Stratonovich)\n  drift[a1] = 0-2i * a2*^1 a1^2\n  drift[a2*] = 0+2i * a2*^2 a1^1") !=
            std::string::npos);
    REQUIRE(text.find("noise^2 = 0-2i * a2*^0 a1^2") != std::string::npos);
    REQUIRE(text.find("<xi_j xi_j'> = 0+2i") != std::string::npos);
    REQUIRE(text.find("drift divergence: 0") != std::string::npos);

    const std::string higher = derive_report("ad ad ad a a a");
    REQUIRE(higher.find("positive-P: not available") != std::string::npos);
}

TEST_CASE("purity verdicts", "[runner][purity]") {
    REQUIRE(purity_check(anharmonic_hamiltonian()).preserves);
    REQUIRE(purity_check(parse_hamiltonian("ad a")).preserves);
    REQUIRE(purity_check(anharmonic_hamiltonian()).text.find("PRESERVES_PURITY") != std::string::npos);
    const PurityVerdict damped = purity_check(parse_hamiltonian("ad a"), 0.5);
    REQUIRE_FALSE(damped.preserves);
    REQUIRE(damped.divergence == Polynomial::constant(-1.0));
    REQUIRE(damped.text.find("VIOLATES_PURITY") != std::string::npos);
}

TEST_CASE("oracle rows on a configured grid", "[runner][oracle]") {
    const auto c = parse_config("N=1000\ntau_stop=2\ntau_points=5\n", Method::oracle);
    const auto rows = run(c);
    REQUIRE(rows.size() == 5);
    for (const auto& r : rows) {
        REQUIRE(r.theta == 2.0 * r.tau);
        REQUIRE(r.k3_sigma == 0.0);
        REQUIRE(r.n_paths == 0);
        REQUIRE(r.method == "oracle");
    }
    REQUIRE(std::abs(rows[0].k3) < 1e-8);
    REQUIRE(std::abs(rows[4].k3) > 1e-3);
}

TEST_CASE("small stochastic runs produce complete rows", "[runner]") {
    SECTION("truncated Wigner") {
        auto c = parse_config("method=TW\nN=100\nn_paths=2000\nbatches=10\ntau_stop=1\ntau_points=3\n");
        const auto rows = run(c);
        REQUIRE(rows.size() == 3);
        for (const auto& r : rows) {
            REQUIRE(r.n_paths == 2000);
            REQUIRE(r.n_diverged == 0);
            REQUIRE(r.method == "tw");
            REQUIRE(r.k3_sigma > 0.0);
        }
    }
    SECTION("positive-P") {
        auto c = parse_config("method=PositiveP\nN=100\nn_paths=200\nbatches=10\ntau_stop=0.5\ntau_points=3\ndtau=0.01\n");
        const auto rows = run(c);
        REQUIRE(rows.size() == 3);
        REQUIRE(rows[0].k3_sigma == 0.0);
        REQUIRE(rows[2].method == "positivep");
        REQUIRE(rows[2].tau == Catch::Approx(0.5).margin(1e-12));
    }
}
