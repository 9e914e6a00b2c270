#include "distest/infotheory.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <set>

#include "distest/error.hpp"

namespace distest::info {

namespace {

constexpr double kDensityFloor = 1e-300;

void require_same_length(std::span<const double> p, std::span<const double> q, const char* what) {
    if (p.size() != q.size()) throw PreconditionError(std::string(what) + ": support mismatch");
}

void require_same_support(const DiscreteDistribution& p, const DiscreteDistribution& q,
                          const char* what) {
    if (!p.same_support(q)) throw PreconditionError(std::string(what) + ": support mismatch");
}

// r log r - r + 1, the per-cell integrand of KL written so every term is
// nonnegative and the first-order parts cancel analytically.
double kl_integrand(double r) {
    if (r == 0.0) return 1.0;
    const double d = r - 1.0;
    if (std::abs(d) < 0.5) return r * std::log1p(d) - d;
    return r * std::log(r) - d;
}

// KL(Bernoulli(p1) || Bernoulli(1/2)).
double kl_from_half(double p1) {
    return 0.5 * kl_integrand(2.0 * p1) + 0.5 * kl_integrand(2.0 * (1.0 - p1));
}

std::vector<double> mixture(const ChannelPair& cp) {
    std::vector<double> mu(cp.mu0.size());
    for (std::size_t i = 0; i < mu.size(); ++i) mu[i] = 0.5 * (cp.mu0[i] + cp.mu1[i]);
    return mu;
}

std::vector<double> uniform_posterior_one(const ChannelPair& cp) {
    std::vector<double> f1(cp.mu0.size());
    for (std::size_t i = 0; i < f1.size(); ++i) {
        const double s = cp.mu0[i] + cp.mu1[i];
        f1[i] = s > 0.0 ? cp.mu1[i] / s : 0.5;
    }
    return f1;
}

// Working state for the SDPI search on the support of mu.
class SdpiSearch {
public:
    SdpiSearch(std::vector<double> mu, std::vector<double> f1)
        : mu_(std::move(mu)), f1_(std::move(f1)) {
        for (std::size_t i = 0; i < mu_.size(); ++i) {
            if (mu_[i] > 0.0) active_.push_back(i);
        }
    }

    const std::vector<std::size_t>& active() const { return active_; }
    const std::vector<double>& mu() const { return mu_; }
    const std::vector<double>& f1() const { return f1_; }

    double ratio(std::span<const double> nu) const {
        double div = 0.0;
        double p1 = 0.0;
        for (std::size_t i : active_) {
            div += mu_[i] * kl_integrand(nu[i] / mu_[i]);
            p1 += nu[i] * f1_[i];
        }
        if (!(div > 0.0)) return 0.0;
        return kl_from_half(std::clamp(p1, 0.0, 1.0)) / div;
    }

    // Offer a candidate; keeps it when it beats the best so far.
    void offer(std::vector<double> nu) {
        const double r = ratio(nu);
        if (r > best_ratio_) {
            best_ratio_ = r;
            best_ = std::move(nu);
        }
    }

    void reset_best() {
        best_ratio_ = -1.0;
        best_.clear();
    }
    double best_ratio() const { return best_ratio_; }
    const std::vector<double>& best() const { return best_; }

    // Segments mu -> vertex j, scored in O(1) each.
    void offer_segments(int resolution) {
        for (std::size_t j : active_) {
            for (int k = 1; k <= resolution; ++k) {
                const double t = static_cast<double>(k) / resolution;
                score_segment(j, t);
                // Away from the vertex while nu_j stays nonnegative.
                const double t_max = mu_[j] < 1.0 ? mu_[j] / (1.0 - mu_[j]) : 0.0;
                score_segment(j, -t * t_max);
            }
        }
    }

    // Coordinate refinement from the current best.
    void refine(int sweeps, double initial_step) {
        if (best_.empty()) return;
        std::vector<double> nu = best_;
        double cur = ratio(nu);
        double div = plain_kl(nu);
        double p1 = 0.0;
        for (std::size_t i : active_) p1 += nu[i] * f1_[i];
        double step = initial_step;

        for (int sweep = 0; sweep < sweeps; ++sweep) {
            bool improved = false;
            for (std::size_t i : active_) {
                const double ni = nu[i];
                const double ti = ni > 0.0 ? ni * std::log(ni / mu_[i]) : 0.0;
                for (int dir : {+1, -1}) {
                    double s = step;
                    if (dir < 0) {
                        if (ni >= 1.0) continue;
                        s = std::min(s, ni / (1.0 - ni));
                        if (!(s > 0.0)) continue;
                    } else if (ni >= 1.0) {
                        continue;
                    }
                    const double scale = 1.0 + dir * -s;  // (1 - s) toward, (1 + s) away
                    const double new_i = scale * ni + dir * s;
                    if (new_i < 0.0) continue;
                    double cand_div = scale * (div - ti) + scale * (1.0 - ni) * std::log(scale);
                    if (new_i > 0.0) cand_div += new_i * std::log(new_i / mu_[i]);
                    if (!(cand_div > 0.0)) continue;
                    const double cand_p1 = std::clamp(scale * p1 + dir * s * f1_[i], 0.0, 1.0);
                    const double cand = kl_from_half(cand_p1) / cand_div;
                    if (!(cand > cur * (1.0 + 1e-12))) continue;

                    std::vector<double> next = nu;
                    for (std::size_t k : active_) next[k] *= scale;
                    next[i] = new_i;
                    const double exact = ratio(next);
                    if (exact > cur) {
                        nu = std::move(next);
                        cur = exact;
                        div = plain_kl(nu);
                        p1 = 0.0;
                        for (std::size_t k : active_) p1 += nu[k] * f1_[k];
                        improved = true;
                        break;
                    }
                }
            }
            if (!improved) step *= 0.5;
        }
        if (cur > best_ratio_) {
            best_ratio_ = cur;
            best_ = std::move(nu);
        }
    }

private:
    void score_segment(std::size_t j, double t) {
        if (t == 0.0) return;
        // nu = (1 - t) mu + t e_j
        const double scale = 1.0 - t;
        const double nj = scale * mu_[j] + t;
        if (nj < 0.0 || scale <= 0.0) return;
        double div = scale * (1.0 - mu_[j]) * std::log(scale);
        if (nj > 0.0) div += nj * std::log(nj / mu_[j]);
        if (!(div > 1e-14)) return;
        const double p1 = std::clamp(scale * 0.5 + t * f1_[j], 0.0, 1.0);
        const double approx = kl_from_half(p1) / div;
        if (approx > best_ratio_) {
            std::vector<double> nu(mu_.size(), 0.0);
            for (std::size_t k : active_) nu[k] = scale * mu_[k];
            nu[j] = nj;
            offer(std::move(nu));
        }
    }

    double plain_kl(std::span<const double> nu) const {
        double s = 0.0;
        for (std::size_t i : active_) {
            if (nu[i] > 0.0) s += nu[i] * std::log(nu[i] / mu_[i]);
        }
        return s;
    }

    std::vector<double> mu_;
    std::vector<double> f1_;
    std::vector<std::size_t> active_;
    std::vector<double> best_;
    double best_ratio_ = -1.0;
};

// Calls visit(point) for every composition of `total` into parts.size() parts.
void for_each_composition(std::vector<int>& parts, std::size_t idx, int remaining,
                          const std::function<void(const std::vector<int>&)>& visit) {
    if (idx + 1 == parts.size()) {
        parts[idx] = remaining;
        visit(parts);
        return;
    }
    for (int k = 0; k <= remaining; ++k) {
        parts[idx] = k;
        for_each_composition(parts, idx + 1, remaining - k, visit);
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// DiscreteDistribution

DiscreteDistribution::DiscreteDistribution(std::vector<std::string> support,
                                           std::vector<double> probs,
                                           std::optional<std::vector<double>> positions)
    : support_(std::move(support)), probs_(std::move(probs)), positions_(std::move(positions)) {
    if (support_.size() != probs_.size()) {
        throw PreconditionError("DiscreteDistribution: support and probs differ in length");
    }
    if (probs_.empty()) throw PreconditionError("DiscreteDistribution: empty support");
    double total = 0.0;
    for (double p : probs_) {
        if (!(p >= 0.0) || !std::isfinite(p)) {
            throw PreconditionError("DiscreteDistribution: probabilities must be finite and >= 0");
        }
        total += p;
    }
    if (std::abs(total - 1.0) > kNormalizationTolerance) {
        throw PreconditionError("DiscreteDistribution: probabilities do not sum to 1");
    }
    if (std::set<std::string>(support_.begin(), support_.end()).size() != support_.size()) {
        throw PreconditionError("DiscreteDistribution: duplicate support labels");
    }
    if (positions_ && positions_->size() != probs_.size()) {
        throw PreconditionError("DiscreteDistribution: positions and probs differ in length");
    }
}

DiscreteDistribution DiscreteDistribution::indexed(std::vector<double> probs) {
    std::vector<std::string> labels(probs.size());
    for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = std::to_string(i);
    return DiscreteDistribution(std::move(labels), std::move(probs));
}

DiscreteDistribution DiscreteDistribution::normalized(std::vector<double> weights) {
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    if (!(total > 0.0)) throw PreconditionError("DiscreteDistribution: weights sum to zero");
    for (double& w : weights) w /= total;
    return indexed(std::move(weights));
}

DiscreteDistribution DiscreteDistribution::bernoulli(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("bernoulli: p must lie in [0, 1]");
    return DiscreteDistribution({"0", "1"}, {1.0 - p, p});
}

DiscreteDistribution DiscreteDistribution::on_grid(std::vector<double> positions,
                                                   std::vector<double> weights) {
    if (!std::is_sorted(positions.begin(), positions.end())) {
        throw PreconditionError("on_grid: positions must be sorted");
    }
    auto d = normalized(std::move(weights));
    d.positions_ = std::move(positions);
    if (d.positions_->size() != d.probs_.size()) {
        throw PreconditionError("on_grid: positions and weights differ in length");
    }
    return d;
}

const std::vector<double>& DiscreteDistribution::positions() const {
    if (!positions_) throw PreconditionError("DiscreteDistribution: no grid positions");
    return *positions_;
}

bool DiscreteDistribution::same_support(const DiscreteDistribution& other) const {
    return support_ == other.support_;
}

DiscreteDistribution DiscreteDistribution::with_probs(std::vector<double> probs) const {
    return DiscreteDistribution(support_, std::move(probs), positions_);
}

nlohmann::json DiscreteDistribution::to_json() const {
    nlohmann::json j;
    j["support"] = support_;
    j["probs"] = probs_;
    if (positions_) j["positions"] = *positions_;
    return j;
}

DiscreteDistribution DiscreteDistribution::from_json(const nlohmann::json& j) {
    std::optional<std::vector<double>> positions;
    if (j.contains("positions")) positions = j.at("positions").get<std::vector<double>>();
    return DiscreteDistribution(j.at("support").get<std::vector<std::string>>(),
                                j.at("probs").get<std::vector<double>>(), std::move(positions));
}

ChannelPair make_channel_pair(DiscreteDistribution mu0, DiscreteDistribution mu1) {
    require_same_support(mu0, mu1, "make_channel_pair");
    double ratio = 0.0;
    for (std::size_t i = 0; i < mu0.size(); ++i) {
        const double a = mu0[i];
        const double b = mu1[i];
        if (a < kDensityFloor && b < kDensityFloor) continue;
        if (a == 0.0) {
            ratio = std::numeric_limits<double>::infinity();
            break;
        }
        ratio = std::max(ratio, b / std::max(a, kDensityFloor));
    }
    return ChannelPair{std::move(mu0), std::move(mu1), ratio};
}

void validate(const JointDistribution& j) {
    if (j.probs.size() != j.rows.size() * j.cols.size() || j.probs.empty()) {
        throw PreconditionError("JointDistribution: shape mismatch");
    }
    double total = 0.0;
    for (double p : j.probs) {
        if (!(p >= 0.0)) throw PreconditionError("JointDistribution: negative entry");
        total += p;
    }
    if (std::abs(total - 1.0) > kNormalizationTolerance) {
        throw PreconditionError("JointDistribution: entries do not sum to 1");
    }
}

// ---------------------------------------------------------------------------
// Divergences

namespace raw {

double kl(std::span<const double> p, std::span<const double> q) {
    require_same_length(p, q, "kl_divergence");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) {
            s += q[i];  // q * kl_integrand(0)
            continue;
        }
        if (q[i] == 0.0) throw ContinuityError("kl_divergence: q(x) = 0 where p(x) > 0");
        s += q[i] * kl_integrand(p[i] / q[i]);
    }
    return s;
}

double chi_squared(std::span<const double> p, std::span<const double> q) {
    require_same_length(p, q, "chi_squared");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (q[i] == 0.0) {
            if (p[i] > 0.0) throw ContinuityError("chi_squared: q(x) = 0 where p(x) > 0");
            continue;
        }
        const double d = p[i] - q[i];
        s += d * d / q[i];
    }
    return s;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
    require_same_length(p, q, "total_variation");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::abs(p[i] - q[i]);
    return std::min(1.0, 0.5 * s);
}

double hellinger_sq(std::span<const double> p, std::span<const double> q) {
    require_same_length(p, q, "hellinger_sq");
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = std::sqrt(p[i]) - std::sqrt(q[i]);
        s += d * d;
    }
    return std::clamp(0.5 * s, 0.0, 1.0);
}

double entropy(std::span<const double> p) {
    double s = 0.0;
    for (double x : p) {
        if (x > 0.0) s -= x * std::log(x);
    }
    return s;
}

}  // namespace raw

double kl_divergence(const DiscreteDistribution& p, const DiscreteDistribution& q) {
    require_same_support(p, q, "kl_divergence");
    return raw::kl(p.probs(), q.probs());
}

double chi_squared(const DiscreteDistribution& p, const DiscreteDistribution& q) {
    require_same_support(p, q, "chi_squared");
    return raw::chi_squared(p.probs(), q.probs());
}

double total_variation(const DiscreteDistribution& p, const DiscreteDistribution& q) {
    require_same_support(p, q, "total_variation");
    return raw::total_variation(p.probs(), q.probs());
}

double hellinger_sq(const DiscreteDistribution& p, const DiscreteDistribution& q) {
    require_same_support(p, q, "hellinger_sq");
    return raw::hellinger_sq(p.probs(), q.probs());
}

double mutual_information(const JointDistribution& j) {
    validate(j);
    const std::size_t nr = j.rows.size();
    const std::size_t nc = j.cols.size();
    std::vector<double> pr(nr, 0.0);
    std::vector<double> pc(nc, 0.0);
    for (std::size_t r = 0; r < nr; ++r) {
        for (std::size_t c = 0; c < nc; ++c) {
            pr[r] += j.at(r, c);
            pc[c] += j.at(r, c);
        }
    }
    double s = 0.0;
    for (std::size_t r = 0; r < nr; ++r) {
        for (std::size_t c = 0; c < nc; ++c) {
            const double p = j.at(r, c);
            if (p > 0.0) s += p * std::log(p / (pr[r] * pc[c]));
        }
    }
    return std::max(0.0, s);
}

double binary_entropy(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("binary_entropy: p must lie in [0, 1]");
    const double q = 1.0 - p;
    double h = 0.0;
    if (p > 0.0) h -= p * std::log(p);
    if (q > 0.0) h -= q * std::log(q);
    return h;
}

// ---------------------------------------------------------------------------
// Reverse channel and SDPI

PosteriorTable reverse_channel(const ChannelPair& cp, double prior) {
    if (!(prior > 0.0 && prior < 1.0)) throw DomainError("reverse_channel: prior must lie in (0, 1)");
    PosteriorTable t;
    t.f0.resize(cp.mu0.size());
    t.f1.resize(cp.mu0.size());
    for (std::size_t i = 0; i < cp.mu0.size(); ++i) {
        const double w0 = (1.0 - prior) * cp.mu0[i];
        const double w1 = prior * cp.mu1[i];
        const double s = w0 + w1;
        t.f1[i] = s > 0.0 ? w1 / s : prior;
        t.f0[i] = 1.0 - t.f1[i];
    }
    return t;
}

double sdpi_ratio(const ChannelPair& cp, const DiscreteDistribution& nu) {
    require_same_support(cp.mu0, nu, "sdpi_ratio");
    const auto mu = mixture(cp);
    for (std::size_t i = 0; i < mu.size(); ++i) {
        if (mu[i] == 0.0 && nu[i] > 0.0) {
            throw ContinuityError("sdpi_ratio: nu is not absolutely continuous w.r.t. mu");
        }
    }
    SdpiSearch search(mu, uniform_posterior_one(cp));
    return search.ratio(nu.probs());
}

SdpiEstimate sdpi_constant(const ChannelPair& cp, int grid_points, int refine_iters) {
    if (grid_points < 1) throw DomainError("sdpi_constant: grid_points must be >= 1");
    if (refine_iters < 0) throw DomainError("sdpi_constant: refine_iters must be >= 0");
    require_same_support(cp.mu0, cp.mu1, "sdpi_constant");

    auto mu = mixture(cp);
    SdpiEstimate est;
    est.resolution = 1.0 / grid_points;
    if (cp.mu0.probs() == cp.mu1.probs()) {
        est.degenerate = true;
        est.argmax_nu = cp.mu0.with_probs(mu);
        return est;
    }

    SdpiSearch search(mu, uniform_posterior_one(cp));
    const auto& active = search.active();
    const std::size_t s = mu.size();

    // Resolution-independent probes close to mu, where the supremum is often
    // approached only in the limit.
    std::vector<std::vector<double>> probes;
    {
        std::vector<double> g(s, 0.0);
        for (std::size_t i : active) g[i] = search.f1()[i] - 0.5;
        for (double t : {1e-3, 1e-2, 0.1, 0.5, 1.0, 1.9}) {
            for (double sign : {1.0, -1.0}) {
                std::vector<double> nu(s, 0.0);
                for (std::size_t i : active) nu[i] = mu[i] * (1.0 + sign * t * g[i]);
                probes.push_back(std::move(nu));
            }
        }
        if (cp.mu0.has_positions()) {
            const auto& x = cp.mu0.positions();
            const double span = std::max(1e-12, x.back() - x.front());
            for (double lam : {1e-3, 1e-2, 0.1, 1.0, 10.0}) {
                for (double sign : {1.0, -1.0}) {
                    const double l = sign * lam / span;
                    double mx = -std::numeric_limits<double>::infinity();
                    for (std::size_t i : active) mx = std::max(mx, l * x[i]);
                    std::vector<double> nu(s, 0.0);
                    double total = 0.0;
                    for (std::size_t i : active) {
                        nu[i] = mu[i] * std::exp(l * x[i] - mx);
                        total += nu[i];
                    }
                    for (double& v : nu) v /= total;
                    probes.push_back(std::move(nu));
                }
            }
        }
    }

    double overall = -1.0;
    std::vector<double> overall_nu = mu;
    for (int level = 1; level <= grid_points; ++level) {
        search.reset_best();
        if (level == 1) {
            for (auto& p : probes) search.offer(p);
        }
        if (active.size() <= 8) {
            std::vector<int> parts(active.size(), 0);
            for_each_composition(parts, 0, level, [&](const std::vector<int>& c) {
                std::vector<double> nu(s, 0.0);
                for (std::size_t k = 0; k < active.size(); ++k) {
                    nu[active[k]] = static_cast<double>(c[k]) / level;
                }
                search.offer(std::move(nu));
            });
        }
        search.offer_segments(level);
        search.refine(refine_iters, 0.5 / level);
        if (search.best_ratio() > overall) {
            overall = search.best_ratio();
            overall_nu = search.best();
        }
    }

    // The stored nu must be a valid distribution; renormalize away rounding.
    const double total = std::accumulate(overall_nu.begin(), overall_nu.end(), 0.0);
    for (double& v : overall_nu) v /= total;
    est.argmax_nu = cp.mu0.with_probs(overall_nu);
    est.beta_lower = std::clamp(search.ratio(overall_nu), 0.0, 1.0);
    return est;
}

// ---------------------------------------------------------------------------
// Truncated Gaussians, transport, log-concavity

ChannelPair discretize_truncated_gaussian(double delta, double sigma, double tau, int grid_size) {
    if (grid_size < 16) throw DomainError("discretize_truncated_gaussian: grid_size must be >= 16");
    if (!(tau > 0.0)) throw DomainError("discretize_truncated_gaussian: tau must be positive");
    if (!(sigma > 0.0)) throw DomainError("discretize_truncated_gaussian: sigma must be positive");
    std::vector<double> x(static_cast<std::size_t>(grid_size));
    std::vector<double> w0(x.size());
    std::vector<double> w1(x.size());
    const double step = 2.0 * tau / (grid_size - 1);
    for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = -tau + step * static_cast<double>(i);
        w0[i] = std::exp(-x[i] * x[i] / (2.0 * sigma * sigma));
        const double y = x[i] - delta;
        w1[i] = std::exp(-y * y / (2.0 * sigma * sigma));
    }
    auto mu0 = DiscreteDistribution::on_grid(x, std::move(w0));
    auto mu1 = DiscreteDistribution::on_grid(std::move(x), std::move(w1));
    return make_channel_pair(std::move(mu0), std::move(mu1));
}

double wasserstein1_grid(const DiscreteDistribution& nu, const DiscreteDistribution& mu) {
    if (!nu.has_positions() || !mu.has_positions()) {
        throw PreconditionError("wasserstein1_grid: both laws need grid positions");
    }
    const auto& x = nu.positions();
    const auto& y = mu.positions();
    if (x.size() != y.size()) throw PreconditionError("wasserstein1_grid: grid mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (std::abs(x[i] - y[i]) > 1e-12 * std::max(1.0, std::abs(x[i]))) {
            throw PreconditionError("wasserstein1_grid: grid mismatch");
        }
    }
    double fn = 0.0;
    double fm = 0.0;
    double w = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        fn += nu[i];
        fm += mu[i];
        w += std::abs(fn - fm) * (x[i + 1] - x[i]);
    }
    return w;
}

double transportation_slack(const DiscreteDistribution& nu, const DiscreteDistribution& mu,
                            double c) {
    if (!(c > 0.0)) throw DomainError("transportation_slack: c must be positive");
    const double w = wasserstein1_grid(nu, mu);
    return (2.0 / c) * kl_divergence(nu, mu) - w * w;
}

double posterior_lipschitz_scan(const ChannelPair& cp) {
    const auto& x = cp.mu0.positions();
    const auto post = reverse_channel(cp, 0.5);
    double best = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
        const double dx = x[i + 1] - x[i];
        if (!(dx > 0.0)) continue;
        best = std::max(best, std::abs(post.f0[i + 1] - post.f0[i]) / dx);
        best = std::max(best, std::abs(post.f1[i + 1] - post.f1[i]) / dx);
    }
    return best;
}

double posterior_lipschitz_bound(double delta, double sigma) {
    return std::abs(delta) / (4.0 * sigma * sigma);
}

double log_concavity_margin(std::span<const double> positions, std::span<const double> u) {
    if (positions.size() != u.size()) throw PreconditionError("log_concavity_margin: size mismatch");
    if (u.size() < 3) throw PreconditionError("log_concavity_margin: need at least 3 grid points");
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < u.size(); ++i) {
        const double h0 = positions[i] - positions[i - 1];
        const double h1 = positions[i + 1] - positions[i];
        const double second =
            2.0 * ((u[i + 1] - u[i]) / h1 - (u[i] - u[i - 1]) / h0) / (h0 + h1);
        margin = std::min(margin, second);
    }
    return margin;
}

std::vector<double> mixture_potential(const ChannelPair& cp) {
    std::vector<double> u(cp.mu0.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double m = 0.5 * (cp.mu0[i] + cp.mu1[i]);
        if (!(m > 0.0)) throw DomainError("mixture_potential: zero mixture mass on the grid");
        u[i] = -std::log(m);
    }
    return u;
}

}  // namespace distest::info
