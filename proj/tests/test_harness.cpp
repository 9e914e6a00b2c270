#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "distest/error.hpp"
#include "distest/harness.hpp"

using namespace distest;
using namespace distest::harness;
using estimation::RunReport;

namespace {

GaussianModel small_model() {
    GaussianModel g;
    g.theta = {0.1, -0.3};
    g.d = 2;
    g.sigma = 1.0;
    g.n = 4;
    g.m = 50;
    return g;
}

}  // namespace

TEST_CASE("monte carlo mse") {
    const auto g = small_model();
    const GmeRunner exact = [](const GaussianModel& m, numerics::RngStream&) {
        RunReport r;
        r.estimate = m.theta;
        r.bits_used = 7;
        return r;
    };
    const auto zero = mse_monte_carlo(exact, g, 30, 1);
    CHECK(zero.mse == 0.0);
    CHECK(zero.bits == 7);
    CHECK(zero.trials == 30);

    const double v = 0.04;
    const GmeRunner noisy = [v](const GaussianModel& m, numerics::RngStream& rng) {
        RunReport r;
        for (double t : m.theta) r.estimate.push_back(t + std::sqrt(v) * rng.normal());
        return r;
    };
    const auto res = mse_monte_carlo(noisy, g, 4000, 2);
    CHECK(std::abs(res.mse - 2 * v) <= 4 * res.std_error);

    SUBCASE("thread count does not change the result") {
        const auto one = mse_monte_carlo(noisy, g, 200, 3, 1);
        const auto four = mse_monte_carlo(noisy, g, 200, 3, 4);
        CHECK(one.mse == four.mse);
        CHECK(one.std_error == four.std_error);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(mse_monte_carlo(exact, g, 29, 1), ConfigError);
        const GmeRunner flaky = [](const GaussianModel& m, numerics::RngStream& rng) -> RunReport {
            if (rng.stream_id() == 17) throw PreconditionError("boom");
            RunReport r;
            r.estimate = m.theta;
            return r;
        };
        try {
            mse_monte_carlo(flaky, g, 40, 1);
            FAIL("expected an error");
        } catch (const PreconditionError& e) {
            CHECK(std::string(e.what()).find("trial 17") != std::string::npos);
        }
    }
}

TEST_CASE("tradeoff sweep") {
    auto g = small_model();
    g.m = 80;
    const auto curve = tradeoff_sweep(g, {1.0, 0.5, 0.125}, 60, 4);
    REQUIRE(curve.rows.size() == 3);
    CHECK(curve.rows[0].bits_total == 160);
    CHECK(curve.rows[1].bits_total == 80);
    CHECK(curve.rows[2].bits_total == 20);
    for (const auto& r : curve.rows) CHECK(r.trials == 60);

    const auto csv = to_csv(curve);
    CHECK(csv.rfind("alpha,bits_total,mse,mse_stderr,trials\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
    CHECK(to_csv(TradeoffCurve{}) == "alpha,bits_total,mse,mse_stderr,trials\n");

    SUBCASE("stderr shrinks with more trials") {
        GaussianModel one = small_model();
        const auto a = tradeoff_sweep(one, {1.0}, 400, 5).rows[0];
        const auto b = tradeoff_sweep(one, {1.0}, 1600, 5).rows[0];
        CHECK(b.mse_stderr / a.mse_stderr == doctest::Approx(0.5).epsilon(0.25));
    }
}

TEST_CASE("check rows") {
    const auto a = at_least("x", 1.0, 2.0, 0.5, "r");
    CHECK_FALSE(a.pass);
    CHECK(a.slack == -1.0);
    CHECK(at_least("x", 1.9, 2.0, 0.5, "r").pass);
    const auto b = at_most("y", 1.0, 2.0, 0.0, "r");
    CHECK(b.pass);
    CHECK(b.slack == 1.0);
    CHECK_FALSE(at_most("y", std::nan(""), 2.0, 0.0, "r").pass);
    const auto n = note("z", 3.0, "r");
    CHECK(n.pass);
    CHECK(n.informational);
    VerificationReport rep;
    rep.rows = {b, n};
    CHECK(rep.passed());
    rep.rows.push_back(a);
    CHECK_FALSE(rep.passed());
}

TEST_CASE("verification suites") {
    CHECK(suite_names().size() == 7);
    CHECK_THROWS_AS(verify_suite("nope", 1), ConfigError);
    const auto r = verify_suite("cutpaste", 9, 10);
    CHECK(r.suite == "cutpaste");
    CHECK(r.passed());
    CHECK_FALSE(r.rows.empty());

    SUBCASE("json is deterministic and round-trips") {
        const auto a = to_json(verify_suite("toolbox", 3, 50)).dump(2);
        const auto b = to_json(verify_suite("toolbox", 3, 50)).dump(2);
        CHECK(a == b);
        const auto parsed = nlohmann::json::parse(a);
        CHECK(parsed.at("seed") == 3);
        CHECK(parsed.at("budget") == 50);
        CHECK(parsed.dump(2) == a);
    }
    SUBCASE("corpus floor is reproduced") {
        CHECK(hellinger_corpus_floor() == doctest::Approx(kHellingerRatioFloor).epsilon(1e-12));
    }
}

TEST_CASE("real formatting") {
    CHECK(format_real(0.0) == "0");
    CHECK(format_real(1.5) == "1.5");
    CHECK(format_real(0.1) == "0.10000000000000001");
    CHECK(format_real(-2e-300) == "-2.0000000000000001e-300");
    CHECK(format_real(std::nan("")) == "nan");
    CHECK(format_real(HUGE_VAL) == "inf");
    CHECK(format_real(-HUGE_VAL) == "-inf");
    for (double v : {0.1, 1.0 / 3, 1e-17, 123456789.123, -0.0}) CHECK(std::stod(format_real(v)) == v);
}

TEST_CASE("output files") {
    const std::string path = "distest_test_output.tmp";
    write_output(path, "a,b\n1,2\n");
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    CHECK(ss.str() == "a,b\n1,2\n");
    std::remove(path.c_str());
    CHECK_THROWS_AS(write_output("/nonexistent-dir/x.csv", "x"), IoError);
}

TEST_CASE("reduction experiments") {
    estimation::SparseDetectionConfig cfg;
    cfg.delta = 0.0;
    cfg.k = 2;
    cfg.d = 6;
    cfg.n = 4;
    cfg.m = 40;
    cfg.sigma = 1.0;
    const auto e = sparse_reduction_experiment(cfg, 50, 11);
    CHECK(e.base_risk == doctest::Approx(6.0 / 160.0));
    CHECK(e.config.delta == doctest::Approx(std::sqrt(16 * e.base_risk / 2)));
    CHECK(e.trials == 50);
    CHECK((e.success_v0 >= 0.0 && e.success_v0 <= 1.0));
    const auto again = sparse_reduction_experiment(cfg, 50, 11);
    CHECK(again.success_v1 == e.success_v1);

    const auto s = slr_experiment(4, 8, 1.0, 500, 12);
    CHECK(s.rejects_violation);
    CHECK(s.sigma0 == doctest::Approx(1.0 / (s.lambda * 2.0)));
}
