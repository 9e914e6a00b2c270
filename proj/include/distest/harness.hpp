#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "distest/estimation.hpp"

namespace distest::harness {

using estimation::GaussianModel;
using estimation::GmeRunner;

// ---------------------------------------------------------------------------
// Monte Carlo

struct MseResult {
    double mse = 0.0;
    double std_error = 0.0;  // sample std of the squared error / sqrt(trials)
    std::size_t bits = 0;    // bits of a single run (identical across trials)
    int trials = 0;
};

/// Trial t runs on RngStream(seed, t). Results are reduced in trial order, so
/// the output does not depend on `threads`. Runner errors are rethrown with
/// the failing trial index in the message.
MseResult mse_monte_carlo(const GmeRunner& runner, const GaussianModel& model, int trials,
                          std::uint64_t seed, int threads = 1);

struct TradeoffRow {
    double alpha = 0.0;
    std::size_t bits_total = 0;
    double mse = 0.0;
    double mse_stderr = 0.0;
    int trials = 0;
};

struct TradeoffCurve {
    std::vector<TradeoffRow> rows;
};

/// Sign protocol on the first ceil(alpha m) machines for every alpha.
TradeoffCurve tradeoff_sweep(const GaussianModel& model, const std::vector<double>& alphas, int trials,
                             std::uint64_t seed, int threads = 1);

// ---------------------------------------------------------------------------
// Verification suites

struct CheckRow {
    std::string name;
    double measured = 0.0;
    double bound = 0.0;
    double slack = 0.0;      // positive when the inequality holds with room
    double tolerance = 0.0;  // pass iff slack >= -tolerance
    bool pass = false;
    std::string reference;
    bool informational = false;  // reported only, always passes
};

/// measured >= bound
CheckRow at_least(std::string name, double measured, double bound, double tolerance, std::string reference);
/// measured <= bound
CheckRow at_most(std::string name, double measured, double bound, double tolerance, std::string reference);
CheckRow note(std::string name, double measured, std::string reference);

struct VerificationReport {
    std::string suite;
    std::uint64_t seed = 0;
    int budget = 0;
    std::vector<CheckRow> rows;

    bool passed() const;
};

const std::vector<std::string>& suite_names();

/// budget 0 uses each suite's default instance count. ConfigError for an
/// unknown suite.
VerificationReport verify_suite(const std::string& name, std::uint64_t seed, int budget = 0);

/// Minimum of sum_i h^2(Pi_0, Pi_{e_i}) / h^2(Pi_0, Pi_1) over the fixed
/// regression corpus, recorded from a previous run of the enumerator.
inline constexpr double kHellingerRatioFloor = 0.90809633388450828;
inline constexpr std::uint64_t kCorpusSeed = 20240611;
inline constexpr int kCorpusSize = 50;

/// Ratio over the fixed corpus, recomputed.
double hellinger_corpus_floor();

// ---------------------------------------------------------------------------
// Reduction experiments

struct SparseExperiment {
    estimation::SparseDetectionConfig config;
    double base_risk = 0.0;  // d sigma^2 / (n m) of the averaging protocol
    double success_v0 = 0.0;
    double success_v1 = 0.0;
    std::size_t bits = 0;
    int trials = 0;
};

/// Sizes delta = sqrt(16 R / k) from the averaging protocol's risk R when
/// cfg.delta <= 0, then runs the reduction `trials` times for each v.
SparseExperiment sparse_reduction_experiment(estimation::SparseDetectionConfig cfg, int trials,
                                             std::uint64_t seed);

struct SlrExperiment {
    int n = 0;
    int d = 0;
    double sigma = 1.0;
    double lambda = 0.0;
    double sigma0 = 0.0;
    double max_relative_deviation = 0.0;  // max_ij |S_ij - sigma^2 delta_ij| / sigma^2
    bool rejects_violation = false;       // 1.05 sigma0 raises SpectralBoundError
    int trials = 0;
};

SlrExperiment slr_experiment(int n, int d, double sigma, int trials, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Output

/// Shortest text with 17 significant digits, locale independent.
std::string format_real(double v);

std::string to_csv(const VerificationReport& r);
std::string to_csv(const TradeoffCurve& c);
nlohmann::json to_json(const VerificationReport& r);
nlohmann::json to_json(const TradeoffCurve& c);
nlohmann::json to_json(const MseResult& r);

/// Writes `content` to `path`, or to stdout for "-". IoError on failure.
void write_output(const std::string& path, const std::string& content);

}  // namespace distest::harness
