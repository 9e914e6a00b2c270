#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "distest/numerics.hpp"
#include "distest/protocol.hpp"

namespace distest::estimation {

using numerics::RngStream;

/// N(theta, sigma^2 I_d) observed by m machines, n samples each.
struct GaussianModel {
    std::vector<double> theta;
    double sigma = 1.0;
    int n = 1;
    int m = 1;
    int d = 1;

    void validate() const;
    /// theta_l * sqrt(n) / sigma: the mean of a machine's normalized sum.
    double normalized(int coord) const;
};

/// One machine's samples, stored coordinate-major: values[l * n + j] is
/// sample j of coordinate l.
struct SampleMatrix {
    int n = 0;
    int d = 0;
    std::vector<double> values;

    std::span<const double> coordinate(int l) const {
        return {values.data() + static_cast<std::size_t>(l) * static_cast<std::size_t>(n),
                static_cast<std::size_t>(n)};
    }
};

using MachineData = std::vector<SampleMatrix>;

/// Draws samples for the first `machines` machines of the model, machine by
/// machine, coordinate by coordinate.
MachineData draw_machine_data(const GaussianModel& model, int machines, RngStream& rng);

struct RunReport {
    std::vector<double> estimate;
    std::size_t bits_used = 0;
    std::map<std::string, double> diagnostics;
};

/// A full estimation run on a freshly drawn instance.
using GmeRunner = std::function<RunReport(const GaussianModel&, RngStream&)>;
/// A protocol applied to already prepared per-machine data.
using DataProtocol = std::function<RunReport(const MachineData&, RngStream&)>;

// ---------------------------------------------------------------------------
// One-bit sign protocol

/// 1 when sum(samples) / (sigma sqrt(n)) >= 0, else 0.
int sign_encode(std::span<const double> samples, double sigma);

/// (sigma / sqrt(n)) * clamp(sqrt(2) erf^-1(mean of +-1 bits), -1, 1).
double sign_decode(std::string_view bits, double sigma, int n);

/// Every machine in `data` writes one sign bit per coordinate. Wire format:
/// for each coordinate in order, one bit per machine in machine order.
RunReport run_sign_protocol(const MachineData& data, double sigma, RngStream& rng);

/// Sign protocol on the first ceil(alpha m) machines. ConfigError when some
/// |theta_l| exceeds sigma / sqrt(n).
RunReport run_gme_dense(const GaussianModel& model, double alpha, RngStream& rng);

int participating_machines(int m, double alpha);

// ---------------------------------------------------------------------------
// Two-bit sawtooth protocol for general range

struct Protocol3Params {
    int m = 2;
    int r = 1;
    int precision_bits = 1;
    double magnitude_bound = 1.0;  // U, in normalized units
    double grid_step = 1.0;        // 1 / sqrt(m - r)

    /// r = ceil(10 log2(max(m d n / sigma, 2))) capped at m / 2,
    /// precision_bits = ceil(log2(U sqrt(m))) + 8.
    static Protocol3Params make(int m, int d, int n, double sigma, double magnitude_bound);
    void validate() const;
    std::size_t bits_per_coordinate() const;
};

/// Message of machine i (0-based) for one coordinate, given its normalized
/// value x = sum / (sigma sqrt(n)). Reporters (i < r) send the fixed-point
/// code of x; the others send Bernoulli(frac(x)) then Bernoulli(frac(x + 1/5)).
BitString protocol3_machine(int i, double x, const Protocol3Params& params, RngStream& rng);

/// 1 or 2. ImpossibleState when neither condition holds.
int protocol3_condition_select(double gamma);

/// Estimate of the normalized mean from one coordinate's messages.
/// Diagnostics: gamma, case, fallback, guess_index.
RunReport protocol3_decode(std::span<const BitString> reporter_codes,
                           std::span<const BitString> bit_pairs, const Protocol3Params& params);

/// Full blackboard run over all coordinates. Estimates are in the original
/// units. Wire format per coordinate: r codes, then (m - r) bit pairs.
RunReport run_sawtooth_protocol(const MachineData& data, double sigma, const Protocol3Params& params,
                                RngStream& rng);

RunReport run_gme_sawtooth(const GaussianModel& model, double magnitude_bound, RngStream& rng);

// ---------------------------------------------------------------------------
// Reference averaging protocol

/// Each machine writes the fixed-point code of its sample mean, coordinate by
/// coordinate; the coordinator averages the decoded values.
RunReport run_averaging_protocol(const MachineData& data, double range_bound, int precision_bits,
                                 RngStream& rng);

// ---------------------------------------------------------------------------
// Sparse direct-sum reduction

struct SparseDetectionConfig {
    double delta = 1.0;
    int k = 1;
    int d = 2;
    int n = 1;
    int m = 1;
    double sigma = 1.0;

    void validate() const;
};

struct EmbeddedData {
    MachineData data;
    std::vector<int> coordinates;  // I_1, ..., I_k
};

/// Publicly samples I_1..I_k without replacement, places each machine's
/// detection samples at I_1, private N(delta, sigma^2) draws at I_2..I_k and
/// N(0, sigma^2) draws elsewhere.
EmbeddedData prepare_embedded_data(std::span<const std::vector<double>> detector_input,
                                   const SparseDetectionConfig& cfg, RngStream& public_rng,
                                   RngStream& private_rng);

/// 1 when |theta_hat(I_1)| >= delta / 2. Diagnostics carry I_1 and the estimate.
RunReport sparse_reduction_protocol1(std::span<const std::vector<double>> detector_input,
                                     const DataProtocol& base_protocol,
                                     const SparseDetectionConfig& cfg, RngStream& public_rng,
                                     RngStream& private_rng);

/// Per-machine detection samples from N(v delta, sigma^2).
std::vector<std::vector<double>> draw_detection_input(const SparseDetectionConfig& cfg, int v,
                                                      RngStream& rng);

// ---------------------------------------------------------------------------
// Gap majority

struct GapMajorityInstance {
    int k = 0;
    int hidden_bit = 0;
    std::vector<int> z;
};

struct GapMajorityOutcome {
    int decision = 0;
    std::size_t bits_used = 0;
    double info_cost_nats = 0.0;
};

/// Bias 1/2 - 10/sqrt(k) under B = 0 and 1/2 + 10/sqrt(k) under B = 1.
double gap_majority_bias(int k, int hidden_bit);

/// z_i iid Bernoulli(gap_majority_bias(k, B)). DomainError when the bias
/// leaves [0, 1], which happens for every k < 400.
GapMajorityInstance gap_majority_make(int k, int hidden_bit, RngStream& rng);

/// Every party writes z_i; the decision is [sum z >= k/2].
GapMajorityOutcome gap_majority_broadcast(const GapMajorityInstance& inst, RngStream& rng);

// ---------------------------------------------------------------------------
// Sparse linear regression reduction

/// ||A||_2 / sqrt(n) for an n x d design.
double design_lambda(const Eigen::MatrixXd& a);

/// Sampler for N(0, sigma^2 I - sigma0^2 A A^T). SpectralBoundError when the
/// covariance has an LDL^T pivot below -1e-10 (relative to sigma^2).
class SlrNoise {
public:
    SlrNoise(const Eigen::MatrixXd& a, double sigma, double sigma0);
    Eigen::VectorXd sample(RngStream& rng) const;

private:
    Eigen::MatrixXd factor_;  // P^T L sqrt(D)
};

/// y = A x + b with b ~ N(0, sigma^2 I - sigma0^2 A A^T).
Eigen::VectorXd slr_reduce(const Eigen::VectorXd& x, const Eigen::MatrixXd& a, double sigma,
                           double sigma0, RngStream& rng);

}  // namespace distest::estimation
