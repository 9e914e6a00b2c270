#include "distest/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "distest/error.hpp"

namespace distest::numerics {

namespace {

constexpr double kTwoOverSqrtPi = 2.0 / 1.7724538509055160273;
constexpr double kSeriesCutoff = 1e-40;

// splitmix64 finalizer; only used to spread (stream, child) into a new id.
std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream_id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream_id),
                      static_cast<std::uint32_t>(stream_id >> 32), 0x64697374u};
    return std::mt19937_64(seq);
}

// Single-precision starting point for erf^-1 (Giles' polynomial). The argument
// is w = -log((1 - y)(1 + y)), passed in so callers can form it without
// cancellation.
double erf_inv_guess(double y, double w) {
    double p;
    if (w < 5.0) {
        w -= 2.5;
        p = 2.81022636e-08;
        p = 3.43273939e-07 + p * w;
        p = -3.5233877e-06 + p * w;
        p = -4.39150654e-06 + p * w;
        p = 0.00021858087 + p * w;
        p = -0.00125372503 + p * w;
        p = -0.00417768164 + p * w;
        p = 0.246640727 + p * w;
        p = 1.50140941 + p * w;
    } else {
        w = std::sqrt(w) - 3.0;
        p = -0.000200214257;
        p = 0.000100950558 + p * w;
        p = 0.00134934322 + p * w;
        p = -0.00367342844 + p * w;
        p = 0.00573950773 + p * w;
        p = -0.0076224613 + p * w;
        p = 0.00943887047 + p * w;
        p = 1.00167406 + p * w;
        p = 2.83297682 + p * w;
    }
    return p * y;
}

// Solves erfc(x) = z for z in (0, 1], x >= 0. Newton on log erfc keeps the
// iteration well conditioned deep in the tail.
double erfc_inv_upper(double z) {
    if (z == 1.0) return 0.0;
    double x = erf_inv_guess(1.0 - z, -std::log(z * (2.0 - z)));
    const double log_z = std::log(z);
    for (int it = 0; it < 50; ++it) {
        const double ec = std::erfc(x);
        const double g = std::log(ec) - log_z;
        const double dg = -kTwoOverSqrtPi * std::exp(-x * x) / ec;
        const double step = g / dg;
        x -= step;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(x))) break;
    }
    return x;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id), engine_(make_engine(seed, stream_id)) {}

RngStream RngStream::substream(std::uint64_t child) const {
    return RngStream(seed_, mix64(stream_id_ ^ mix64(child + 1)));
}

double RngStream::uniform() { return std::generate_canonical<double, 64>(engine_); }

double RngStream::normal() { return normal_(engine_); }

bool RngStream::bernoulli(double p) { return uniform() < p; }

std::size_t RngStream::uniform_index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
}

double erf(double x) { return std::erf(x); }

double erfc(double x) { return std::erfc(x); }

double erf_inv(double y) {
    if (!(std::abs(y) < 1.0)) throw DomainError("erf_inv: argument must lie in (-1, 1)");
    if (y == 0.0) return 0.0;
    const double ay = std::abs(y);
    if (ay > 0.5) return std::copysign(erfc_inv_upper(1.0 - ay), y);

    // Central region: Halley iterations on erf directly.
    double x = erf_inv_guess(y, -std::log((1.0 - y) * (1.0 + y)));
    for (int it = 0; it < 20; ++it) {
        const double f = std::erf(x) - y;
        if (f == 0.0) break;
        const double df = kTwoOverSqrtPi * std::exp(-x * x);
        const double step = f / (df * (1.0 + x * f / df));
        x -= step;
        if (std::abs(step) <= 1e-16 * std::abs(x)) break;
    }
    return x;
}

double normal_upper_tail(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_upper_quantile(double q) {
    if (!(q > 0.0 && q < 1.0)) throw DomainError("normal_upper_quantile: q must lie in (0, 1)");
    if (q <= 0.5) return std::numbers::sqrt2 * erfc_inv_upper(2.0 * q);
    return -std::numbers::sqrt2 * erfc_inv_upper(2.0 * (1.0 - q));
}

double sample_gaussian(double mean, double stddev, RngStream& rng) {
    if (!(stddev > 0.0)) throw DomainError("sample_gaussian: stddev must be positive");
    return mean + stddev * rng.normal();
}

double sample_truncated_gaussian(double mean, double stddev, double lo, double hi,
                                 RngStream& rng) {
    if (!(stddev > 0.0)) throw DomainError("sample_truncated_gaussian: stddev must be positive");
    if (!(lo < hi)) throw DomainError("sample_truncated_gaussian: need lo < hi");
    const double a = (lo - mean) / stddev;
    const double b = (hi - mean) / stddev;

    double mass;
    if (a >= 0.0) {
        mass = normal_upper_tail(a) - normal_upper_tail(b);
    } else if (b <= 0.0) {
        mass = normal_upper_tail(-b) - normal_upper_tail(-a);
    } else {
        mass = 1.0 - normal_upper_tail(b) - normal_upper_tail(-a);
    }
    if (!(mass >= 1e-12)) {
        throw RejectionFailure("sample_truncated_gaussian: interval mass below 1e-12");
    }

    if (mass >= 0.05) {
        for (;;) {
            const double z = rng.normal();
            if (z >= a && z <= b) return mean + stddev * z;
        }
    }

    const double u = rng.uniform();
    double z;
    if (a >= 0.0) {
        const double qa = normal_upper_tail(a);
        const double qb = normal_upper_tail(b);
        z = normal_upper_quantile(qb + u * (qa - qb));
    } else if (b <= 0.0) {
        const double qa = normal_upper_tail(-a);
        const double qb = normal_upper_tail(-b);
        z = -normal_upper_quantile(qb + u * (qa - qb));
    } else {
        const double pa = normal_upper_tail(-a);  // = Phi(a)
        z = -normal_upper_quantile(pa + u * mass);
    }
    z = std::clamp(z, a, b);
    return std::clamp(mean + stddev * z, lo, hi);
}

namespace {

// sin(2 pi t) and cos(2 pi t) with the argument reduced to [-1/8, 1/8] turns
// before scaling by 2 pi, so quarter turns give exact zeros.
void sincos_turns(double t, double& s, double& c) {
    const double u = t - std::floor(t);
    const double q = std::nearbyint(4.0 * u);
    const double v = 2.0 * std::numbers::pi * (u - q / 4.0);
    const double sv = std::sin(v);
    const double cv = std::cos(v);
    switch (static_cast<int>(q) % 4) {
        case 0: s = sv; c = cv; break;
        case 1: s = cv; c = -sv; break;
        case 2: s = -sv; c = -cv; break;
        default: s = -cv; c = sv; break;
    }
}

}  // namespace

double sawtooth_h(double x) {
    const double r = frac(x);
    const double pi = std::numbers::pi;
    double sum = 0.0;
    for (int k = 1;; ++k) {
        const double bound = std::exp(-2.0 * k * k * pi * pi) / k;
        if (bound < kSeriesCutoff) break;
        double s, c;
        sincos_turns(k * r, s, c);
        sum += bound * s;
    }
    return sum;
}

double sawtooth_h_prime(double x) {
    const double r = frac(x);
    const double pi = std::numbers::pi;
    double sum = 0.0;
    for (int k = 1;; ++k) {
        const double bound = 2.0 * pi * std::exp(-2.0 * k * k * pi * pi);
        if (bound < kSeriesCutoff) break;
        double s, c;
        sincos_turns(k * r, s, c);
        sum += bound * c;
    }
    return sum;
}

double frac(double x) {
    const double r = x - std::floor(x);
    // x slightly below an integer can round up to exactly 1.
    return r >= 1.0 ? 0.0 : r;
}

double median(std::span<const double> values) {
    if (values.empty()) throw DomainError("median: empty input");
    std::vector<double> v(values.begin(), values.end());
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    const double upper = v[mid];
    if (v.size() % 2 == 1) return upper;
    const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

FixedPointCode encode_fixed_point(double x, double range_bound, int precision_bits) {
    if (!(range_bound > 0.0)) throw DomainError("encode_fixed_point: range_bound must be positive");
    if (precision_bits < 1 || precision_bits > 52) {
        throw DomainError("encode_fixed_point: precision_bits must be in [1, 52]");
    }
    if (std::isnan(x)) throw DomainError("encode_fixed_point: NaN input");

    const double clamped = std::clamp(x, -range_bound, range_bound);
    const auto levels = (std::uint64_t{1} << precision_bits) - 1;
    const auto q = static_cast<std::uint64_t>(
        std::llround(std::abs(clamped) / range_bound * static_cast<double>(levels)));

    FixedPointCode code;
    code.range_bound = range_bound;
    code.precision_bits = precision_bits;
    code.bits.reserve(static_cast<std::size_t>(precision_bits) + 1);
    code.bits.push_back(clamped < 0.0 && q > 0 ? '1' : '0');
    for (int b = precision_bits - 1; b >= 0; --b) code.bits.push_back(((q >> b) & 1U) ? '1' : '0');
    return code;
}

double decode_fixed_point(std::string_view bits, double range_bound, int precision_bits) {
    if (bits.size() != static_cast<std::size_t>(precision_bits) + 1) {
        throw DomainError("decode_fixed_point: code length does not match precision");
    }
    std::uint64_t q = 0;
    for (std::size_t i = 1; i < bits.size(); ++i) q = (q << 1) | (bits[i] == '1' ? 1U : 0U);
    const auto levels = (std::uint64_t{1} << precision_bits) - 1;
    const double magnitude = range_bound * (static_cast<double>(q) / static_cast<double>(levels));
    return bits[0] == '1' ? -magnitude : magnitude;
}

double decode_fixed_point(const FixedPointCode& code) {
    return decode_fixed_point(code.bits, code.range_bound, code.precision_bits);
}

}  // namespace distest::numerics
