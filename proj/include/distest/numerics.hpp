#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace distest {

// Bit strings travel as '0'/'1' characters. Readable in fixtures and usable
// directly as map keys for transcript distributions.
using BitString = std::string;

namespace numerics {

/// Seeded random stream. Two streams with the same (seed, stream_id) produce
/// the same draws; different stream ids are decorrelated through seed_seq.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    /// Child stream keyed by (stream_id, child). Used for per-machine or
    /// per-purpose randomness that must not depend on draw order elsewhere.
    RngStream substream(std::uint64_t child) const;

    double uniform();                 // [0, 1)
    double normal();                  // N(0, 1)
    bool bernoulli(double p);
    std::size_t uniform_index(std::size_t n);  // {0, ..., n-1}

    std::mt19937_64& engine() { return engine_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

double erf(double x);
double erfc(double x);

/// Inverse of erf on (-1, 1). Throws DomainError for |y| >= 1 or NaN.
double erf_inv(double y);

/// Standard normal CDF and its upper tail, both accurate in the far tails.
double normal_cdf(double x);
double normal_upper_tail(double x);

/// x with normal_upper_tail(x) == q, for q in (0, 1).
double normal_upper_quantile(double q);

double sample_gaussian(double mean, double stddev, RngStream& rng);

/// N(mean, stddev^2) conditioned on [lo, hi]. Rejection from the untruncated
/// sampler when the interval holds at least 5% of the mass, otherwise
/// inverse-CDF on the side of the interval nearest the mean. Throws
/// RejectionFailure when the interval mass is below 1e-12.
double sample_truncated_gaussian(double mean, double stddev, double lo, double hi,
                                 RngStream& rng);

/// h(x) = sum_k (1/k) exp(-2 k^2 pi^2) sin(2 k pi x), the attenuated sawtooth
/// series. Terms are added until their magnitude bound drops below 1e-40.
double sawtooth_h(double x);
double sawtooth_h_prime(double x);

/// Fractional part with floor semantics: frac(-0.2) == 0.8. Always in [0, 1).
double frac(double x);

/// Order-statistic median; mean of the two middle values for even sizes.
double median(std::span<const double> values);

/// Sign-magnitude fixed point code: one sign bit then precision_bits
/// magnitude bits (MSB first), uniform on [-range_bound, range_bound].
struct FixedPointCode {
    BitString bits;
    double range_bound = 0.0;
    int precision_bits = 0;
};

FixedPointCode encode_fixed_point(double x, double range_bound, int precision_bits);
double decode_fixed_point(const FixedPointCode& code);
/// Decode a raw bit string that is known to use (range_bound, precision_bits).
double decode_fixed_point(std::string_view bits, double range_bound, int precision_bits);

}  // namespace numerics
}  // namespace distest
