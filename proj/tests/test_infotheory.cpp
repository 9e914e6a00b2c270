#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "distest/error.hpp"
#include "distest/infotheory.hpp"
#include "distest/numerics.hpp"
#include "oracles.hpp"

using namespace distest;
using namespace distest::info;
using numerics::RngStream;

namespace {

DiscreteDistribution random_law(RngStream& rng, std::size_t s) {
    std::vector<double> w(s);
    for (double& x : w) x = 0.01 + rng.uniform();
    return DiscreteDistribution::normalized(std::move(w));
}

// Bernoulli KL in long double; near p = q the double sum cancels badly.
double kl_bin(long double a, long double b) {
    long double s = 0.0L;
    if (a > 0) s += a * std::log1p((a - b) / b);
    if (a < 1) s += (1 - a) * std::log1p((b - a) / (1 - b));
    return static_cast<double>(s);
}

// sup over nu = B_p of D(nu K || mu K) / D(nu || mu) for the pair
// B_{1/2 - eps}, B_{1/2 + eps}, scanned densely.
double bsc_scan_oracle(double eps) {
    const long double f1_0 = 0.5L - eps;  // Pr[V = 1 | X = 0]
    const long double f1_1 = 0.5L + eps;
    double best = 0.0;
    for (int i = 1; i < 200000; ++i) {
        const long double p = i / 200000.0L;
        if (i == 100000) continue;
        const long double out = (1 - p) * f1_0 + p * f1_1;
        best = std::max(best, kl_bin(out, 0.5) / kl_bin(p, 0.5));
    }
    return best;
}

}  // namespace

TEST_CASE("divergence examples") {
    const auto half = DiscreteDistribution::bernoulli(0.5);
    const auto one = DiscreteDistribution::indexed({1.0, 0.0});
    const auto p64 = DiscreteDistribution::indexed({0.6, 0.4});
    const auto h = DiscreteDistribution::indexed({0.5, 0.5});

    CHECK(kl_divergence(p64, p64) == 0.0);
    CHECK(kl_divergence(one, h) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(std::abs(kl_divergence(p64, h) - oracle::kl({0.6, 0.4}, {0.5, 0.5})) <= 1e-15);
    CHECK(kl_divergence(p64, h) == doctest::Approx(0.020136).epsilon(1e-4));
    CHECK(chi_squared(p64, p64) == 0.0);
    CHECK(chi_squared(one, h) == doctest::Approx(1.0));
    CHECK(total_variation(p64, h) == doctest::Approx(0.1));
    CHECK(total_variation(one, DiscreteDistribution::indexed({0.0, 1.0})) == 1.0);
    CHECK(hellinger_sq(one, DiscreteDistribution::indexed({0.0, 1.0})) == doctest::Approx(1.0));
    CHECK(hellinger_sq(one, h) == doctest::Approx(1.0 - 1.0 / std::numbers::sqrt2).epsilon(1e-14));
    CHECK(hellinger_sq(p64, p64) == doctest::Approx(0.0));

    CHECK_THROWS_AS(kl_divergence(h, one), ContinuityError);
    CHECK_THROWS_AS(kl_divergence(half, DiscreteDistribution::indexed({0.2, 0.3, 0.5})), PreconditionError);
    // Same sizes, different labels.
    CHECK_THROWS_AS(total_variation(half, DiscreteDistribution({"a", "b"}, {0.5, 0.5})), PreconditionError);
    CHECK_THROWS_AS(DiscreteDistribution::indexed({0.5, 0.6}), PreconditionError);
    CHECK_THROWS_AS(DiscreteDistribution::indexed({1.5, -0.5}), PreconditionError);
}

TEST_CASE("divergence orderings on random pairs") {
    RngStream rng(101, 0);
    for (int t = 0; t < 2000; ++t) {
        const std::size_t s = 2 + rng.uniform_index(7);
        const auto p = random_law(rng, s);
        const auto q = random_law(rng, s);
        const double tv = total_variation(p, q);
        const double h2 = hellinger_sq(p, q);
        const double kl = kl_divergence(p, q);
        CHECK(kl <= chi_squared(p, q) + 1e-12);
        CHECK(h2 <= tv + 1e-12);
        CHECK(tv <= std::sqrt(2.0 * h2) + 1e-12);
        CHECK(2.0 * tv * tv <= kl + 1e-12);  // Pinsker
        CHECK(kl == doctest::Approx(oracle::kl(p.probs(), q.probs())).epsilon(1e-12));
    }
}

TEST_CASE("mutual information") {
    JointDistribution indep{{"0", "1"}, {"0", "1", "2"}, {}};
    const double a[2] = {0.3, 0.7};
    const double b[3] = {0.2, 0.5, 0.3};
    for (double x : a) for (double y : b) indep.probs.push_back(x * y);
    CHECK(std::abs(mutual_information(indep)) <= 1e-12);

    JointDistribution copy{{"0", "1"}, {"0", "1"}, {0.5, 0.0, 0.0, 0.5}};
    CHECK(mutual_information(copy) == doctest::Approx(std::log(2.0)).epsilon(1e-14));

    JointDistribution flip{{"0", "1"}, {"0", "1"}, {0.375, 0.125, 0.125, 0.375}};
    const double expected = std::log(2.0) - oracle::binary_entropy(0.25);
    CHECK(std::abs(mutual_information(flip) - expected) <= 1e-14);
    CHECK(mutual_information(flip) == doctest::Approx(0.13081).epsilon(1e-4));

    JointDistribution bad{{"0", "1"}, {"0", "1"}, {0.5, 0.5, 0.5, 0.0}};
    CHECK_THROWS_AS(mutual_information(bad), PreconditionError);
    CHECK(binary_entropy(0.0) == 0.0);
    CHECK(binary_entropy(0.5) == doctest::Approx(std::log(2.0)));
    CHECK_THROWS_AS(binary_entropy(1.5), DomainError);
}

TEST_CASE("reverse channel") {
    const auto mu = DiscreteDistribution::indexed({0.2, 0.3, 0.5});
    const auto same = reverse_channel(make_channel_pair(mu, mu), 0.3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(same.f1[i] == doctest::Approx(0.3));
        CHECK(same.f0[i] == doctest::Approx(0.7));
    }
    const auto disjoint = reverse_channel(
        make_channel_pair(DiscreteDistribution::indexed({1.0, 0.0}), DiscreteDistribution::indexed({0.0, 1.0})),
        0.5);
    CHECK(disjoint.f1[0] == 0.0);
    CHECK(disjoint.f1[1] == 1.0);

    const auto cp = make_channel_pair(DiscreteDistribution::bernoulli(0.4), DiscreteDistribution::bernoulli(0.6));
    const auto t = reverse_channel(cp, 0.5);
    CHECK(t.f1[1] == doctest::Approx(0.6 / (0.4 + 0.6)));
    CHECK(cp.domination_ratio == doctest::Approx(1.5));
    CHECK_THROWS_AS(reverse_channel(cp, 0.0), DomainError);
}

TEST_CASE("sdpi constant of the binary symmetric pair") {
    const double eps = 0.1;
    const auto cp = make_channel_pair(DiscreteDistribution::bernoulli(0.5 - eps),
                                      DiscreteDistribution::bernoulli(0.5 + eps));
    const double scan = bsc_scan_oracle(eps);
    CHECK(scan <= 4 * eps * eps + 1e-12);
    CHECK(scan >= 0.9 * 4 * eps * eps);

    const auto est = sdpi_constant(cp, 64, 40);
    CHECK_FALSE(est.degenerate);
    CHECK(est.beta_lower <= 4 * eps * eps + 1e-12);
    CHECK(est.beta_lower >= 0.9 * 4 * eps * eps);
    CHECK(est.beta_lower <= scan + 1e-9);
    // The reported argmax reproduces the estimate.
    CHECK(sdpi_ratio(cp, est.argmax_nu) == doctest::Approx(est.beta_lower).epsilon(1e-12));

    SUBCASE("ratio agrees with the direct formula") {
        for (double p : {0.01, 0.2, 0.45, 0.7, 0.99}) {
            const double out = (1 - p) * (0.5 - eps) + p * (0.5 + eps);
            CHECK(sdpi_ratio(cp, DiscreteDistribution::bernoulli(p)) ==
                  doctest::Approx(kl_bin(out, 0.5) / kl_bin(p, 0.5)).epsilon(1e-10));
        }
    }
    SUBCASE("nondecreasing in the grid") {
        RngStream rng(102, 0);
        for (int t = 0; t < 10; ++t) {
            const auto pair = make_channel_pair(random_law(rng, 4), random_law(rng, 4));
            double prev = 0.0;
            for (int g : {1, 2, 4, 8}) {
                const double b = sdpi_constant(pair, g, 4).beta_lower;
                CHECK(b >= prev - 1e-15);
                CHECK(b <= 1.0);
                prev = b;
            }
        }
    }
}

TEST_CASE("sdpi degenerate and error cases") {
    const auto mu = DiscreteDistribution::indexed({0.2, 0.3, 0.5});
    const auto est = sdpi_constant(make_channel_pair(mu, mu), 8, 2);
    CHECK(est.degenerate);
    CHECK(est.beta_lower == 0.0);
    CHECK_THROWS_AS(sdpi_constant(make_channel_pair(mu, mu), 0, 2), DomainError);
    CHECK_THROWS_AS(sdpi_constant(make_channel_pair(mu, mu), 4, -1), DomainError);
}

TEST_CASE("truncated gaussian discretization") {
    const auto flat = discretize_truncated_gaussian(0.0, 1.0, 6.0, 101);
    CHECK(flat.mu0.probs() == flat.mu1.probs());

    const auto cp = discretize_truncated_gaussian(0.1, 1.0, 20.0, 2000);
    double s0 = 0.0, s1 = 0.0;
    for (std::size_t i = 0; i < cp.mu0.size(); ++i) {
        s0 += cp.mu0[i];
        s1 += cp.mu1[i];
    }
    CHECK(std::abs(s0 - 1.0) <= 1e-12);
    CHECK(std::abs(s1 - 1.0) <= 1e-12);
    // Density ratio e^{(2 x delta - delta^2)/2} peaks at x = tau; the
    // normalizing constants differ by at most the mass cut at the edges.
    const double edge = std::exp((2 * 20.0 * 0.1 + 0.01) / 2.0);
    CHECK(std::isfinite(cp.domination_ratio));
    CHECK(cp.domination_ratio <= edge * (1 + 1e-9));
    CHECK(cp.domination_ratio >= std::exp((2 * 20.0 * 0.1 - 0.01) / 2.0) * (1 - 1e-9));

    CHECK_THROWS_AS(discretize_truncated_gaussian(0.1, 1.0, 20.0, 4), DomainError);
    CHECK_THROWS_AS(discretize_truncated_gaussian(0.1, 0.0, 20.0, 100), DomainError);
}

TEST_CASE("gaussian sdpi bound") {
    const auto cp = discretize_truncated_gaussian(0.1, 1.0, 20.0, 2000);
    const auto est = sdpi_constant(cp, 2, 10);
    CHECK(est.beta_lower > 0.0);
    CHECK(est.beta_lower <= 0.01);
}

TEST_CASE("wasserstein distance on a grid") {
    std::vector<double> x(101);
    for (int i = 0; i <= 100; ++i) x[i] = i / 100.0;
    const auto uni = DiscreteDistribution::on_grid(x, std::vector<double>(101, 1.0));
    std::vector<double> mid(101, 0.0);
    mid[50] = 1.0;
    const auto centre = DiscreteDistribution::on_grid(x, mid);
    CHECK(wasserstein1_grid(uni, uni) == 0.0);

    // Oracle: sum over points of |x_i - 1/2| / 101.
    double ref = 0.0;
    for (double xi : x) ref += std::abs(xi - 0.5) / 101.0;
    CHECK(wasserstein1_grid(uni, centre) == doctest::Approx(ref).epsilon(1e-12));
    CHECK(std::abs(wasserstein1_grid(uni, centre) - 0.25) <= 0.01);

    std::vector<double> a(101, 0.0), b(101, 0.0);
    a[10] = 1.0;
    b[73] = 1.0;
    CHECK(wasserstein1_grid(DiscreteDistribution::on_grid(x, a), DiscreteDistribution::on_grid(x, b)) ==
          doctest::Approx(0.63));
    CHECK_THROWS_AS(wasserstein1_grid(DiscreteDistribution::indexed({0.5, 0.5}), uni), PreconditionError);
}

TEST_CASE("transportation inequality for a log-concave grid law") {
    const auto mu = discretize_truncated_gaussian(0.0, 1.0, 6.0, 601).mu0;
    CHECK(transportation_slack(mu, mu, 1.0) == doctest::Approx(0.0));
    RngStream rng(103, 0);
    double worst = 1.0;
    for (int t = 0; t < 200; ++t) {
        std::vector<double> w(mu.size());
        const double lam = rng.uniform() * 4 - 2;
        const double shift = rng.uniform() * 2 - 1;
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double x = mu.positions()[i];
            w[i] = mu[i] * std::exp(lam * (x - shift) * (t % 2 ? 1.0 : x)) * (0.5 + rng.uniform());
        }
        worst = std::min(worst, transportation_slack(DiscreteDistribution::on_grid(mu.positions(), w), mu, 1.0));
    }
    CHECK(worst >= -1e-6);
    std::vector<double> edge(mu.size(), 0.0);
    edge.back() = 1.0;
    CHECK(transportation_slack(DiscreteDistribution::on_grid(mu.positions(), edge), mu, 1.0) >= -1e-6);
    CHECK_THROWS_AS(transportation_slack(mu, mu, 0.0), DomainError);
}

TEST_CASE("posterior lipschitz scan") {
    CHECK(posterior_lipschitz_scan(discretize_truncated_gaussian(0.0, 1.0, 20.0, 2000)) == 0.0);
    const auto cp = discretize_truncated_gaussian(0.1, 1.0, 20.0, 2000);
    CHECK(posterior_lipschitz_bound(0.1, 1.0) == doctest::Approx(0.025));
    CHECK(posterior_lipschitz_scan(cp) <= 0.025 * 1.01);
    CHECK(posterior_lipschitz_scan(cp) > 0.02);
}

TEST_CASE("log-concavity margin") {
    std::vector<double> x(401), quad(401), lin(401);
    const double sigma = 1.5;
    for (int i = 0; i <= 400; ++i) {
        x[i] = -4 + i / 50.0;
        quad[i] = x[i] * x[i] / (2 * sigma * sigma);
        lin[i] = 3 * x[i] + 1;
    }
    CHECK(log_concavity_margin(x, quad) == doctest::Approx(1 / (sigma * sigma)).epsilon(1e-8));
    CHECK(std::abs(log_concavity_margin(x, lin)) <= 1e-9);

    const auto cp = discretize_truncated_gaussian(0.1, 1.0, 20.0, 2000);
    CHECK(log_concavity_margin(cp.mu0.positions(), mixture_potential(cp)) >= 0.5 - 0.01);
    CHECK_THROWS_AS(log_concavity_margin(std::vector<double>{0, 1}, std::vector<double>{0, 1}), PreconditionError);
}

TEST_CASE("distribution json round trip") {
    const auto d = DiscreteDistribution::on_grid({-1.0, 0.0, 2.5}, {1.0, 2.0, 1.0});
    const auto back = DiscreteDistribution::from_json(d.to_json());
    CHECK(back.support() == d.support());
    CHECK(back.probs() == d.probs());
    CHECK(back.positions() == d.positions());
    const auto plain = DiscreteDistribution::indexed({0.25, 0.75});
    CHECK_FALSE(DiscreteDistribution::from_json(plain.to_json()).has_positions());
}
