#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "distest/error.hpp"
#include "distest/numerics.hpp"
#include "oracles.hpp"

using namespace distest;
using namespace distest::numerics;

TEST_CASE("erf against the series oracle") {
    CHECK(numerics::erf(0.0) == 0.0);
    CHECK(std::abs(numerics::erf(1.0 / std::numbers::sqrt2) - 0.6826894921) <= 1e-10);
    CHECK(std::abs(numerics::erf(1.0 / std::numbers::sqrt2) - 0.6826894921370859) <= 1e-12);

    double worst = 0.0;
    double prev = -2.0;
    for (int i = -6000; i <= 6000; ++i) {
        const double x = i / 1000.0;
        const double v = numerics::erf(x);
        worst = std::max(worst, std::abs(v - static_cast<double>(oracle::erf(x))));
        CHECK(v + numerics::erf(-x) == 0.0);
        CHECK(v >= prev);
        CHECK(std::abs(v) <= 1.0);
        prev = v;
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("erf_inv") {
    CHECK(erf_inv(0.0) == 0.0);
    CHECK(std::abs(erf_inv(numerics::erf(0.5)) - 0.5) <= 1e-10);
    // Bisection on the oracle erf gives 0.70710678113236.
    CHECK(std::abs(erf_inv(0.6826894921) - 0.7071067812) <= 1e-8);
    CHECK(std::abs(erf_inv(0.6826894921) - 0.70710678113235979) <= 1e-12);
    CHECK_THROWS_AS(erf_inv(1.0), DomainError);
    CHECK_THROWS_AS(erf_inv(-1.0), DomainError);
    CHECK_THROWS_AS(erf_inv(1.5), DomainError);
    CHECK_THROWS_AS(erf_inv(std::nan("")), DomainError);

    SUBCASE("round trip on random arguments") {
        RngStream rng(7, 1);
        double worst = 0.0;
        for (int i = 0; i < 10000; ++i) {
            const double y = -0.999 + 1.998 * rng.uniform();
            worst = std::max(worst, std::abs(numerics::erf(erf_inv(y)) - y));
        }
        CHECK(worst <= 1e-12);
    }
    SUBCASE("tails against bisection") {
        for (double y : {0.9, 0.99, 0.999999, -0.75, 0.3}) {
            const double ref = static_cast<double>(oracle::erf_inv(y));
            CHECK(std::abs(erf_inv(y) - ref) <= 1e-12 * std::max(1.0, std::abs(ref)));
        }
        // Closer to 1 the bisection itself is ill conditioned; compare erfc instead.
        for (double t : {1e-12, 1e-15}) {
            CHECK(numerics::erfc(erf_inv(1.0 - t)) == doctest::Approx(1.0 - (1.0 - t)).epsilon(1e-10));
        }
    }
}

TEST_CASE("normal tails and quantiles") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
    for (double q : {1e-300, 1e-20, 1e-5, 0.1, 0.5, 0.9, 1 - 1e-9}) {
        CHECK(normal_upper_tail(normal_upper_quantile(q)) == doctest::Approx(q).epsilon(1e-10));
    }
    CHECK_THROWS_AS(normal_upper_quantile(0.0), DomainError);
}

TEST_CASE("gaussian sampling") {
    SUBCASE("standard normal mean") {
        RngStream rng(11, 0);
        double s = 0.0;
        for (int i = 0; i < 1000000; ++i) s += sample_gaussian(0.0, 1.0, rng);
        CHECK(std::abs(s / 1e6) <= 0.005);
    }
    SUBCASE("variance of N(3, 4)") {
        RngStream rng(12, 0);
        std::vector<double> v(1000000);
        for (double& x : v) x = sample_gaussian(3.0, 2.0, rng);
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= v.size();
        double var = 0.0;
        for (double x : v) var += (x - mean) * (x - mean);
        var /= (v.size() - 1);
        CHECK(std::abs(var - 4.0) <= 0.05);
    }
    SUBCASE("same stream, same draws") {
        RngStream a(5, 9), b(5, 9), c(5, 10);
        bool differs = false;
        for (int i = 0; i < 100; ++i) {
            const double x = sample_gaussian(0.0, 1.0, a);
            CHECK(x == sample_gaussian(0.0, 1.0, b));
            differs |= x != sample_gaussian(0.0, 1.0, c);
        }
        CHECK(differs);
    }
    SUBCASE("substreams are reproducible") {
        RngStream a(5, 9);
        auto s1 = a.substream(3);
        auto s2 = RngStream(5, 9).substream(3);
        CHECK(s1.stream_id() == s2.stream_id());
        CHECK(s1.uniform() == s2.uniform());
        CHECK(a.substream(4).stream_id() != s1.stream_id());
    }
    RngStream rng(1, 1);
    CHECK_THROWS_AS(sample_gaussian(0.0, 0.0, rng), DomainError);
}

TEST_CASE("truncated gaussian sampling") {
    SUBCASE("wide interval matches the untruncated law") {
        RngStream rng(21, 0);
        std::vector<double> v(100000);
        for (double& x : v) x = sample_truncated_gaussian(0.0, 1.0, -20.0, 20.0, rng);
        std::sort(v.begin(), v.end());
        double ks = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double f = 0.5 * (1.0 + static_cast<double>(oracle::erf(v[i] / std::sqrt(2.0L))));
            ks = std::max({ks, std::abs(f - double(i) / v.size()), std::abs(f - double(i + 1) / v.size())});
        }
        CHECK(ks <= 0.01);
    }
    SUBCASE("support and direction") {
        RngStream rng(22, 0);
        double s = 0.0;
        for (int i = 0; i < 10000; ++i) {
            const double x = sample_truncated_gaussian(0.0, 1.0, 0.0, 1.0, rng);
            CHECK((x >= 0.0 && x <= 1.0));
            const double y = sample_truncated_gaussian(5.0, 1.0, -1.0, 1.0, rng);
            CHECK((y >= -1.0 && y <= 1.0));
            s += y;
        }
        CHECK(s > 0.0);
    }
    SUBCASE("far tail uses the inverse CDF and stays in range") {
        RngStream rng(23, 0);
        for (int i = 0; i < 1000; ++i) {
            const double x = sample_truncated_gaussian(0.0, 1.0, 6.0, 7.0, rng);
            CHECK((x >= 6.0 && x <= 7.0));
        }
    }
    RngStream rng(24, 0);
    CHECK_THROWS_AS(sample_truncated_gaussian(0.0, 1.0, 40.0, 41.0, rng), RejectionFailure);
    CHECK_THROWS_AS(sample_truncated_gaussian(0.0, 1.0, 1.0, 1.0, rng), DomainError);
}

TEST_CASE("sawtooth series") {
    CHECK(sawtooth_h(0.0) == 0.0);
    CHECK(std::abs(sawtooth_h(0.5)) <= 1e-30);
    // e^{-2 pi^2} - e^{-18 pi^2}/3, summed directly: 2.6752879910742397e-9
    CHECK(sawtooth_h(0.25) == doctest::Approx(2.6752879910742397e-9).epsilon(1e-12));
    CHECK(sawtooth_h_prime(0.0) == doctest::Approx(1.6809330197991655e-8).epsilon(1e-12));
    CHECK(std::abs(sawtooth_h_prime(0.25)) <= 1e-33);

    double worst_h = 0.0, worst_hp = 0.0, max_hp = 0.0;
    for (int i = 0; i < 1000000; ++i) {
        const double x = i / 1e6;
        const double hp = sawtooth_h_prime(x);
        max_hp = std::max(max_hp, std::abs(hp));
        if (i % 97 == 0) {
            worst_h = std::max(worst_h, std::abs(sawtooth_h(x) - static_cast<double>(oracle::sawtooth_h(x))));
            worst_hp = std::max(worst_hp, std::abs(hp - static_cast<double>(oracle::sawtooth_h_prime(x))));
        }
    }
    CHECK(max_hp <= 1.0);
    CHECK(worst_h <= 1e-22);
    CHECK(worst_hp <= 1e-22);

    SUBCASE("periodic and odd") {
        // Dyadic grid, so x + 1 and -x are exact.
        double worst = 0.0, odd = 0.0;
        for (int i = 0; i < 10000; ++i) {
            const double x = -5.0 + i / 1024.0;
            worst = std::max(worst, std::abs(sawtooth_h(x + 1.0) - sawtooth_h(x)));
            odd = std::max(odd, std::abs(sawtooth_h(-x) + sawtooth_h(x)));
        }
        CHECK(worst <= 1e-30);
        CHECK(odd <= 1e-30);
    }
    SUBCASE("mean fractional part of a unit gaussian") {
        for (double tb : {0.3, 2.75}) {
            RngStream rng(31, static_cast<std::uint64_t>(tb * 100));
            constexpr int kDraws = 10000000;
            double s = 0.0, s2 = 0.0;
            for (int i = 0; i < kDraws; ++i) {
                const double f = frac(tb + rng.normal());
                s += f;
                s2 += f * f;
            }
            const double mean = s / kDraws;
            const double se = std::sqrt((s2 / kDraws - mean * mean) / kDraws);
            CHECK(std::abs(mean - (0.5 - sawtooth_h(tb) / std::numbers::pi)) <= 4.0 * se);
        }
    }
}

TEST_CASE("frac and median") {
    CHECK(frac(3.7) == doctest::Approx(0.7));
    CHECK(frac(-0.2) == doctest::Approx(0.8));
    CHECK(frac(5.0) == 0.0);
    CHECK(frac(-1e-18) == 0.0);
    CHECK(frac(-1e-18) < 1.0);
    const std::vector<double> one{3}, three{1, 2, 100}, four{1, 2, 3, 4};
    CHECK(median(one) == 3.0);
    CHECK(median(three) == 2.0);
    CHECK(median(four) == 2.5);
    CHECK_THROWS_AS(median(std::vector<double>{}), DomainError);
}

TEST_CASE("fixed point codes") {
    const auto zero = encode_fixed_point(0.0, 16.0, 20);
    CHECK(zero.bits.size() == 21);
    CHECK(decode_fixed_point(zero) == 0.0);
    CHECK(std::abs(decode_fixed_point(encode_fixed_point(7.3, 16.0, 24)) - 7.3) <= 16.0 * std::ldexp(1.0, -23));
    CHECK(decode_fixed_point(encode_fixed_point(1000.0, 16.0, 24)) == 16.0);
    CHECK(decode_fixed_point(encode_fixed_point(-1000.0, 16.0, 24)) == -16.0);
    CHECK(encode_fixed_point(-0.0, 4.0, 8).bits == encode_fixed_point(0.0, 4.0, 8).bits);

    SUBCASE("quantization bound and reproducibility") {
        RngStream rng(41, 0);
        for (int i = 0; i < 20000; ++i) {
            const int p = 1 + static_cast<int>(rng.uniform_index(40));
            const double u = 0.01 + 100.0 * rng.uniform();
            const double x = (rng.uniform() * 3.0 - 1.5) * u;
            const auto code = encode_fixed_point(x, u, p);
            CHECK(code.bits.size() == static_cast<std::size_t>(p + 1));
            CHECK(code.bits == encode_fixed_point(x, u, p).bits);
            CHECK(std::abs(decode_fixed_point(code) - std::clamp(x, -u, u)) <= u * std::ldexp(1.0, 1 - p));
            CHECK(decode_fixed_point(code.bits, u, p) == decode_fixed_point(code));
        }
    }
    CHECK_THROWS_AS(encode_fixed_point(1.0, 0.0, 8), DomainError);
    CHECK_THROWS_AS(encode_fixed_point(1.0, 1.0, 0), DomainError);
}
