#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace distest::info {

inline constexpr double kLn2 = 0.69314718055994530942;
inline constexpr double kNormalizationTolerance = 1e-12;

/// Information quantities are computed in nats; this converts at the edges.
inline double nats_to_bits(double nats) { return nats / kLn2; }

/// Probability vector over a finite, labeled support. Grid positions are
/// optional and only needed for the 1-D transport and Lipschitz checks.
class DiscreteDistribution {
public:
    DiscreteDistribution() = default;
    DiscreteDistribution(std::vector<std::string> support, std::vector<double> probs,
                         std::optional<std::vector<double>> positions = std::nullopt);

    /// Labels "0", "1", ..., taken from the index.
    static DiscreteDistribution indexed(std::vector<double> probs);
    /// Same, after dividing nonnegative weights by their sum.
    static DiscreteDistribution normalized(std::vector<double> weights);
    /// Bernoulli(p) on {"0", "1"}.
    static DiscreteDistribution bernoulli(double p);
    /// Point masses at sorted grid positions; weights are normalized.
    static DiscreteDistribution on_grid(std::vector<double> positions, std::vector<double> weights);

    std::size_t size() const { return probs_.size(); }
    const std::vector<std::string>& support() const { return support_; }
    const std::vector<double>& probs() const { return probs_; }
    double operator[](std::size_t i) const { return probs_[i]; }
    bool has_positions() const { return positions_.has_value(); }
    const std::vector<double>& positions() const;

    bool same_support(const DiscreteDistribution& other) const;

    /// Copy with new probabilities on the same support (and positions).
    DiscreteDistribution with_probs(std::vector<double> probs) const;

    nlohmann::json to_json() const;
    static DiscreteDistribution from_json(const nlohmann::json& j);

private:
    std::vector<std::string> support_;
    std::vector<double> probs_;
    std::optional<std::vector<double>> positions_;
};

/// Binary-input channel V -> X described by X | V=v ~ mu_v.
struct ChannelPair {
    DiscreteDistribution mu0;
    DiscreteDistribution mu1;
    /// Smallest c with mu1 <= c * mu0 pointwise (+inf when mu0 misses mass of mu1).
    double domination_ratio = 1.0;
};

ChannelPair make_channel_pair(DiscreteDistribution mu0, DiscreteDistribution mu1);

/// Joint law of two finite variables, row-major.
struct JointDistribution {
    std::vector<std::string> rows;
    std::vector<std::string> cols;
    std::vector<double> probs;

    double at(std::size_t r, std::size_t c) const { return probs[r * cols.size() + c]; }
};

void validate(const JointDistribution& j);

double kl_divergence(const DiscreteDistribution& p, const DiscreteDistribution& q);
double chi_squared(const DiscreteDistribution& p, const DiscreteDistribution& q);
double total_variation(const DiscreteDistribution& p, const DiscreteDistribution& q);
double hellinger_sq(const DiscreteDistribution& p, const DiscreteDistribution& q);
double mutual_information(const JointDistribution& j);

/// Same quantities on bare probability vectors of equal length. No support
/// labels are checked; the distributions layer does that.
namespace raw {
double kl(std::span<const double> p, std::span<const double> q);
double chi_squared(std::span<const double> p, std::span<const double> q);
double total_variation(std::span<const double> p, std::span<const double> q);
double hellinger_sq(std::span<const double> p, std::span<const double> q);
double entropy(std::span<const double> p);
}  // namespace raw

/// Binary entropy in nats.
double binary_entropy(double p);

/// Bayes posterior f_v(x) = Pr[V = v | X = x] under Pr[V = 1] = prior.
struct PosteriorTable {
    std::vector<double> f0;
    std::vector<double> f1;
};

PosteriorTable reverse_channel(const ChannelPair& cp, double prior);

struct SdpiEstimate {
    double beta_lower = 0.0;
    DiscreteDistribution argmax_nu;
    double resolution = 0.0;
    bool degenerate = false;
};

/// D(nu K || mu K) / D(nu || mu) for the uniform-prior reverse channel K.
/// Returns 0 when nu == mu.
double sdpi_ratio(const ChannelPair& cp, const DiscreteDistribution& nu);

/// Certified lower bound on the SDPI constant: the best ratio over a family of
/// candidate inputs nu, then coordinate refinement. Candidates are the simplex
/// lattice of every resolution up to grid_points (support size <= 8 only), the
/// segments from mu toward and away from each vertex, small moves along the
/// posterior direction, and exponential tilts when positions are known.
/// Nondecreasing in grid_points.
SdpiEstimate sdpi_constant(const ChannelPair& cp, int grid_points, int refine_iters);

/// N(0, sigma^2) and N(delta, sigma^2) as point masses on grid_size uniformly
/// spaced points spanning [-tau, tau], each renormalized.
ChannelPair discretize_truncated_gaussian(double delta, double sigma, double tau, int grid_size);

/// Exact 1-D Wasserstein-1 distance between two laws on the same grid.
double wasserstein1_grid(const DiscreteDistribution& nu, const DiscreteDistribution& mu);

/// (2/c) KL(nu || mu) - w1(nu, mu)^2. Nonnegative when mu is c-log-concave.
double transportation_slack(const DiscreteDistribution& nu, const DiscreteDistribution& mu,
                            double c);

/// Largest finite-difference slope of the posteriors f_0 and f_1 between
/// adjacent grid cells (uniform prior).
double posterior_lipschitz_scan(const ChannelPair& cp);

/// delta / (4 sigma^2)
double posterior_lipschitz_bound(double delta, double sigma);

/// Minimum second finite difference of u over the grid.
double log_concavity_margin(std::span<const double> positions, std::span<const double> u);

/// -log of the equal mixture (mu0 + mu1) / 2, cell by cell, up to an additive
/// constant.
std::vector<double> mixture_potential(const ChannelPair& cp);

}  // namespace distest::info
