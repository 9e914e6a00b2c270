#pragma once
// Reference computations used only by the tests. Nothing here calls into the
// library: each oracle takes a different route (series, bisection, brute
// force) from the code it checks.

#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

inline constexpr long double kPi = 3.141592653589793238462643383279502884L;

// Maclaurin series for |x| <= 3, Lentz continued fraction for erfc beyond.
inline long double erf(long double x) {
    if (x < 0) return -erf(-x);
    if (x <= 3.0L) {
        long double term = x, sum = x;
        for (int k = 1; k < 200; ++k) {
            term *= -x * x / k;
            const long double add = term / (2 * k + 1);
            sum += add;
            if (std::fabs(add) < 1e-22L * std::fabs(sum)) break;
        }
        return 2.0L / std::sqrt(kPi) * sum;
    }
    // erfc(x) = exp(-x^2)/sqrt(pi) * 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...))))
    const long double tiny = 1e-300L;
    long double f = x, c = x, d = 0.0L;
    for (int k = 1; k < 500; ++k) {
        const long double a = k / 2.0L;
        d = x + a * d;
        if (std::fabs(d) < tiny) d = tiny;
        c = x + a / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0L / d;
        const long double delta = c * d;
        f *= delta;
        if (std::fabs(delta - 1.0L) < 1e-22L) break;
    }
    return 1.0L - std::exp(-x * x) / (std::sqrt(kPi) * f);
}

inline long double erf_inv(long double y) {
    long double lo = -7.0L, hi = 7.0L;
    for (int it = 0; it < 200; ++it) {
        const long double mid = (lo + hi) / 2;
        (erf(mid) < y ? lo : hi) = mid;
    }
    return (lo + hi) / 2;
}

inline long double sawtooth_h(long double x) {
    long double s = 0.0L;
    for (int k = 1; k <= 6; ++k) s += std::exp(-2.0L * k * k * kPi * kPi) * std::sin(2 * k * kPi * x) / k;
    return s;
}

inline long double sawtooth_h_prime(long double x) {
    long double s = 0.0L;
    for (int k = 1; k <= 6; ++k) s += 2 * kPi * std::exp(-2.0L * k * k * kPi * kPi) * std::cos(2 * k * kPi * x);
    return s;
}

inline double binary_entropy(double p) {
    double h = 0.0;
    if (p > 0.0) h -= p * std::log(p);
    if (p < 1.0) h -= (1.0 - p) * std::log(1.0 - p);
    return h;
}

inline double kl(const std::vector<double>& p, const std::vector<double>& q) {
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) s += p[i] * std::log(p[i] / q[i]);
    }
    return s;
}

// P[Bin(k, p) >= t] by summing the pmf in log space.
inline double binomial_upper_tail(int k, double p, int t) {
    if (p <= 0.0) return t <= 0 ? 1.0 : 0.0;
    if (p >= 1.0) return t <= k ? 1.0 : 0.0;
    double total = 0.0;
    for (int j = t; j <= k; ++j) {
        const double lg = std::lgamma(k + 1.0) - std::lgamma(j + 1.0) - std::lgamma(k - j + 1.0) +
                          j * std::log(p) + (k - j) * std::log1p(-p);
        total += std::exp(lg);
    }
    return total;
}

}  // namespace oracle
