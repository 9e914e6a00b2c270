#include "distest/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <iostream>
#include <limits>
#include <numbers>
#include <numeric>
#include <thread>
#include <utility>

#include "distest/error.hpp"
#include "distest/infotheory.hpp"
#include "distest/numerics.hpp"
#include "distest/protocol.hpp"

namespace distest::harness {

namespace {

using estimation::RunReport;
using info::DiscreteDistribution;
using numerics::RngStream;

constexpr double kInf = std::numeric_limits<double>::infinity();

[[noreturn]] void rethrow_with_trial(const std::exception_ptr& err, int trial) {
    const std::string where = "trial " + std::to_string(trial) + ": ";
    try {
        std::rethrow_exception(err);
    } catch (const ConfigError& e) {
        throw ConfigError(where + e.what());
    } catch (const PreconditionError& e) {
        throw PreconditionError(where + e.what());
    } catch (const std::exception& e) {
        throw Error(where + e.what());
    }
}

std::vector<double> random_weights(std::size_t s, RngStream& rng) {
    std::vector<double> w(s);
    for (double& v : w) v = std::exp(2.0 * rng.normal());
    return w;
}

DiscreteDistribution random_distribution(std::size_t s, RngStream& rng) {
    return DiscreteDistribution::normalized(random_weights(s, rng));
}

info::ChannelPair bsc_pair(double eps) {
    return info::make_channel_pair(DiscreteDistribution::bernoulli(0.5 - eps),
                                   DiscreteDistribution::bernoulli(0.5 + eps));
}

// I(input; output) for input law `px` through the row-stochastic matrix `channel`.
double channel_information(const std::vector<double>& px, const std::vector<std::vector<double>>& channel) {
    info::JointDistribution j;
    const std::size_t rows = px.size();
    const std::size_t cols = channel.front().size();
    j.rows.resize(rows);
    j.cols.resize(cols);
    for (std::size_t r = 0; r < rows; ++r) j.rows[r] = std::to_string(r);
    for (std::size_t c = 0; c < cols; ++c) j.cols[c] = std::to_string(c);
    j.probs.resize(rows * cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) j.probs[r * cols + c] = px[r] * channel[r][c];
    }
    return info::mutual_information(j);
}

// ---------------------------------------------------------------------------

VerificationReport suite_toolbox(std::uint64_t seed, int budget) {
    const int count = budget > 0 ? budget : 1000;
    RngStream rng(seed, 0x746f6f6c);
    double tv_lower = kInf, tv_upper = kInf, kl_chi = kInf, info_lower = kInf, info_upper = kInf;
    double continuity = kInf, additivity = kInf;

    for (int t = 0; t < count; ++t) {
        const std::size_t s = 2 + rng.uniform_index(7);
        const auto p = random_distribution(s, rng);
        const auto q = random_distribution(s, rng);
        const double h2 = info::hellinger_sq(p, q);
        const double tv = info::total_variation(p, q);
        tv_lower = std::min(tv_lower, tv - h2);
        tv_upper = std::min(tv_upper, std::numbers::sqrt2 * std::sqrt(h2) - tv);
        kl_chi = std::min(kl_chi, info::chi_squared(p, q) - info::kl_divergence(p, q));

        // Z uniform on two points, phi(Z) with law p or q.
        info::JointDistribution joint;
        joint.rows = {"0", "1"};
        joint.cols = p.support();
        joint.probs.resize(2 * s);
        for (std::size_t i = 0; i < s; ++i) {
            joint.probs[i] = 0.5 * p[i];
            joint.probs[s + i] = 0.5 * q[i];
        }
        const double mi_bits = info::nats_to_bits(info::mutual_information(joint));
        info_lower = std::min(info_lower, mi_bits - h2);
        info_upper = std::min(info_upper, 2.0 * h2 - mi_bits);

        // mu = c mu' + (1 - c) w dominates c mu'; information is concave in the input.
        const double c = 0.05 + 0.9 * rng.uniform();
        const auto mu_prime = random_distribution(s, rng);
        const auto w = random_distribution(s, rng);
        std::vector<double> mu(s);
        for (std::size_t i = 0; i < s; ++i) mu[i] = c * mu_prime[i] + (1.0 - c) * w[i];
        const std::size_t outputs = 2 + rng.uniform_index(5);
        std::vector<std::vector<double>> channel(s);
        for (auto& row : channel) {
            row = random_weights(outputs, rng);
            const double z = std::accumulate(row.begin(), row.end(), 0.0);
            for (double& v : row) v /= z;
        }
        continuity = std::min(continuity, channel_information(mu, channel) -
                                              c * channel_information(mu_prime.probs(), channel));

        // Sum of per-machine informations against the joint information.
        const int m = 2 + static_cast<int>(rng.uniform_index(2));
        const int depth = 1 + static_cast<int>(rng.uniform_index(6));
        const int alphabet = 2 + static_cast<int>(rng.uniform_index(2));
        const auto proto = protocol::random_enumerable_protocol(m, depth, rng, alphabet);
        const auto laws = protocol::random_input_laws(proto, rng);
        double sum = 0.0;
        for (int i = 0; i < m; ++i) sum += protocol::conditional_mutual_info_input(proto, laws.mu0, i);
        additivity = std::min(additivity, protocol::mutual_info_all_inputs(proto, laws.mu0) - sum);
    }

    VerificationReport rep{"toolbox", seed, count, {}};
    rep.rows.push_back(at_least("tv - hellinger_sq", tv_lower, 0.0, 1e-10, "Hellinger/TV sandwich, lower side"));
    rep.rows.push_back(at_least("sqrt2 hellinger - tv", tv_upper, 0.0, 1e-10, "Hellinger/TV sandwich, upper side"));
    rep.rows.push_back(at_least("chi_squared - kl", kl_chi, 0.0, 1e-10, "KL below chi-squared"));
    rep.rows.push_back(at_least("I(Z;phi) - hellinger_sq [bits]", info_lower, 0.0, 1e-10,
                                "information/Hellinger sandwich, lower side"));
    rep.rows.push_back(at_least("2 hellinger_sq - I(Z;phi) [bits]", info_upper, 0.0, 1e-10,
                                "information/Hellinger sandwich, upper side"));
    rep.rows.push_back(at_least("I(X;Pi) - c I(X';Pi)", continuity, 0.0, 1e-10, "continuity under domination"));
    rep.rows.push_back(at_least("I(X;Pi) - sum_i I(X_i;Pi)", additivity, 0.0, 1e-10,
                                "superadditivity of information over independent inputs"));
    return rep;
}

VerificationReport suite_cutpaste(std::uint64_t seed, int budget) {
    const int count = budget > 0 ? budget : 100;
    RngStream rng(seed, 0x63757470);
    double cut = 0.0, factor = 0.0, routes = 0.0, norm = 0.0;
    for (int t = 0; t < count; ++t) {
        const int m = 2 + t % 3;
        const auto p = protocol::random_enumerable_protocol(m, 6, rng);
        const auto laws = protocol::random_input_laws(p, rng);
        cut = std::max(cut, protocol::cut_paste_sweep(p, laws));
        if (t < 20) factor = std::max(factor, protocol::factorization_deviation(p));

        std::vector<int> b(static_cast<std::size_t>(m));
        for (int& v : b) v = static_cast<int>(rng.uniform_index(2));
        const auto direct = protocol::transcript_distribution(p, laws, b).aligned(p);
        const auto fact = protocol::factorized_transcript_distribution(p, laws, b).aligned(p);
        double total = 0.0;
        for (std::size_t k = 0; k < direct.size(); ++k) {
            routes = std::max(routes, std::abs(direct[k] - fact[k]));
            total += direct[k];
        }
        norm = std::max(norm, std::abs(total - 1.0));
    }
    VerificationReport rep{"cutpaste", seed, count, {}};
    rep.rows.push_back(at_most("cut-paste deviation", cut, 1e-12, 0.0, "cut-paste property"));
    rep.rows.push_back(at_most("path product vs machine factors", factor, 1e-12, 0.0,
                               "transcript probability factorizes over machines"));
    rep.rows.push_back(at_most("enumerated vs factorized Pi_b", routes, 1e-12, 0.0,
                               "transcript law as product of per-machine terms"));
    rep.rows.push_back(at_most("|sum Pi_b - 1|", norm, 1e-12, 0.0, "transcript distributions are normalized"));
    return rep;
}

VerificationReport suite_sdpi(std::uint64_t seed, int /*budget*/) {
    VerificationReport rep{"sdpi", seed, 0, {}};

    const auto bsc = bsc_pair(0.1);
    const auto est = info::sdpi_constant(bsc, 64, 40);
    rep.rows.push_back(at_least("bsc(0.1) beta_hat lower", est.beta_lower, 0.036, 0.0, "dense scan of the BSC ratio"));
    rep.rows.push_back(at_most("bsc(0.1) beta_hat upper", est.beta_lower, 0.0401, 0.0, "BSC contraction 4 eps^2"));
    rep.rows.push_back(at_most("argmax reproduces beta_hat",
                               std::abs(info::sdpi_ratio(bsc, est.argmax_nu) - est.beta_lower), 1e-10, 0.0,
                               "estimate is attained by its witness"));

    double previous = 0.0, drop = 0.0;
    for (int g : {1, 2, 4, 8, 16}) {
        const double b = info::sdpi_constant(bsc, g, 4).beta_lower;
        drop = std::max(drop, previous - b);
        previous = b;
    }
    rep.rows.push_back(at_most("monotone in grid_points (largest drop)", drop, 0.0, 0.0, "more candidates never lower the max"));

    const auto same = info::make_channel_pair(DiscreteDistribution::bernoulli(0.3), DiscreteDistribution::bernoulli(0.3));
    rep.rows.push_back(at_most("identical pair beta_hat", info::sdpi_constant(same, 8, 4).beta_lower, 0.0, 0.0,
                               "no contraction to measure when mu0 = mu1"));

    const auto gauss = info::discretize_truncated_gaussian(0.1, 1.0, 20.0, 2000);
    const auto g_est = info::sdpi_constant(gauss, 2, 20);
    rep.rows.push_back(at_most("truncated gaussian beta_hat", g_est.beta_lower, 0.01, 0.0,
                               "truncated Gaussian SDPI delta^2/sigma^2"));
    rep.rows.push_back(at_least("truncated gaussian beta_hat positive", g_est.beta_lower,
                                std::numeric_limits<double>::min(), 0.0, "contraction coefficient is nonzero"));
    rep.rows.push_back(note("truncated gaussian domination ratio", gauss.domination_ratio, "density ratio bound"));
    rep.rows.push_back(at_most("posterior lipschitz scan", info::posterior_lipschitz_scan(gauss),
                               info::posterior_lipschitz_bound(0.1, 1.0) * 1.01, 0.0,
                               "posterior is delta/(4 sigma^2)-Lipschitz"));
    return rep;
}

std::vector<protocol::EnumerableProtocol> corpus(RngStream& rng, int count) {
    std::vector<protocol::EnumerableProtocol> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int t = 0; t < count; ++t) out.push_back(protocol::random_enumerable_protocol(2 + t % 3, 6, rng));
    return out;
}

struct CorpusStats {
    double lemma_slack = kInf;
    double min_ratio = kInf;
    double implied_k = 0.0;
    int finite = 0;
};

CorpusStats corpus_stats(const std::vector<protocol::EnumerableProtocol>& protos) {
    constexpr double eps = 0.1;
    constexpr double c = (0.5 + eps) / (0.5 - eps);
    constexpr double beta = 4.0 * eps * eps;
    const auto bsc = bsc_pair(eps);
    CorpusStats s;
    for (const auto& p : protos) {
        const auto laws = protocol::identical_laws(p.machines(), bsc.mu0, bsc.mu1);
        for (int i = 0; i < p.machines(); ++i) {
            s.lemma_slack = std::min(s.lemma_slack, protocol::lemma32_check(p, laws, c, beta, i));
        }
        const auto rep = protocol::hellinger_decomposition_report(p, laws);
        if (rep.ratio_infinite) continue;
        ++s.finite;
        s.min_ratio = std::min(s.min_ratio, rep.ratio);
        const auto zero = laws.product(std::vector<int>(static_cast<std::size_t>(p.machines()), 0));
        const double info_bits = info::nats_to_bits(protocol::mutual_info_all_inputs(p, zero));
        if (info_bits > 0.0) s.implied_k = std::max(s.implied_k, rep.end_to_end / (beta * info_bits));
    }
    return s;
}

VerificationReport suite_distributed(std::uint64_t seed, int budget) {
    const int count = budget > 0 ? budget : kCorpusSize;
    RngStream fixed_rng(kCorpusSeed, 0);
    const auto fixed = corpus_stats(corpus(fixed_rng, kCorpusSize));
    RngStream rng(seed, 0x64736470);
    const auto fresh = corpus_stats(corpus(rng, count));

    VerificationReport rep{"distributed-sdpi", seed, count, {}};
    rep.rows.push_back(at_least("per-machine hellinger vs information (fixed corpus)", fixed.lemma_slack, 0.0, 1e-9,
                                "h^2(Pi_ei, Pi_0) <= ((c+1) beta/2) I(X_i;Pi|V=0)"));
    rep.rows.push_back(at_least("per-machine hellinger vs information (seeded corpus)", fresh.lemma_slack, 0.0, 1e-9,
                                "h^2(Pi_ei, Pi_0) <= ((c+1) beta/2) I(X_i;Pi|V=0)"));
    rep.rows.push_back(at_least("hellinger sum ratio vs frozen floor", fixed.min_ratio, kHellingerRatioFloor, 1e-12,
                                "sum_i h^2(Pi_0, Pi_ei) >= const h^2(Pi_0, Pi_1), corpus regression value"));
    rep.rows.push_back(at_least("hellinger sum ratio positive (seeded corpus)", fresh.min_ratio,
                                std::numeric_limits<double>::min(), 0.0, "direction of the Hellinger decomposition"));
    rep.rows.push_back(note("implied constant K (fixed corpus)", fixed.implied_k,
                            "h^2(Pi_0, Pi_1) / (beta I(X;Pi|V=0)), reported only"));
    rep.rows.push_back(note("instances with nonzero end-to-end distance", fixed.finite, "fixed corpus"));
    return rep;
}

VerificationReport suite_transport(std::uint64_t seed, int budget) {
    const int count = budget > 0 ? budget : 200;
    RngStream rng(seed, 0x74726e73);
    const auto mu = info::discretize_truncated_gaussian(0.0, 1.0, 6.0, 601).mu0;
    const auto& x = mu.positions();
    const std::size_t s = mu.size();

    double worst = kInf;
    for (int t = 0; t < count; ++t) {
        std::vector<double> w(s);
        switch (t % 4) {
            case 0:
                for (std::size_t i = 0; i < s; ++i) w[i] = mu[i] * (0.01 + rng.uniform());
                break;
            case 1: {
                const double a = 6.0 * rng.uniform() - 3.0;
                for (std::size_t i = 0; i < s; ++i) w[i] = mu[i] * std::exp(a * x[i]);
                break;
            }
            case 2: {
                const double a = 4.0 * rng.uniform() - 2.0;
                const double b = 0.8 * rng.uniform() - 0.4;
                for (std::size_t i = 0; i < s; ++i) w[i] = mu[i] * std::exp(a * x[i] + b * x[i] * x[i]);
                break;
            }
            default:
                w[rng.uniform_index(s)] = 1.0;
                break;
        }
        const auto nu = mu.with_probs(DiscreteDistribution::normalized(std::move(w)).probs());
        worst = std::min(worst, info::transportation_slack(nu, mu, 1.0));
    }
    for (std::size_t edge : {std::size_t{0}, s - 1}) {
        std::vector<double> w(s, 0.0);
        w[edge] = 1.0;
        worst = std::min(worst, info::transportation_slack(mu.with_probs(w), mu, 1.0));
    }

    const auto mix = info::discretize_truncated_gaussian(0.1, 1.0, 20.0, 2000);
    const auto u = info::mixture_potential(mix);
    const double margin = info::log_concavity_margin(mix.mu0.positions(), u);

    VerificationReport rep{"transport", seed, count, {}};
    rep.rows.push_back(at_least("(2/c) KL - w1^2", worst, 0.0, 1e-6, "transportation inequality, c = 1"));
    rep.rows.push_back(at_least("mixture log-concavity margin", margin, 0.5 - 0.01, 0.0,
                                "mixture potential curvature >= c/2"));
    return rep;
}

VerificationReport suite_sawtooth(std::uint64_t seed, int budget) {
    const int trials = budget > 0 ? budget : 1000;
    VerificationReport rep{"sawtooth", seed, trials, {}};

    // Derivative scan on a 1e6-point grid of [0, 1).
    constexpr int kGrid = 1000000;
    double min_abs = kInf, max_abs = 0.0, min_abs_wide = kInf;
    for (int i = 0; i < kGrid; ++i) {
        const double f = static_cast<double>(i) / kGrid;
        const double a = std::abs(f - 0.25);
        const double b = std::abs(f - 0.75);
        if (a < 1.0 / 50.0 || b < 1.0 / 50.0) continue;
        const double hp = std::abs(numerics::sawtooth_h_prime(f));
        min_abs = std::min(min_abs, hp);
        max_abs = std::max(max_abs, hp);
        if (a >= 3.0 / 100.0 && b >= 3.0 / 100.0) min_abs_wide = std::min(min_abs_wide, hp);
    }
    rep.rows.push_back(at_least("min |h'| away from 1/4, 3/4 (1/50)", min_abs, 3e-9, 0.0, "C <= h'(x)"));
    rep.rows.push_back(at_most("max |h'|", max_abs, 1.0, 0.0, "h'(x) <= 1"));
    rep.rows.push_back(note("min |h'| away from 1/4, 3/4 (3/100)", min_abs_wide, "same scan, wider exclusion"));

    int failures = 0;
    for (int i = 0; i < 100000; ++i) {
        try {
            estimation::protocol3_condition_select(10.0 * i / 100000.0);
        } catch (const ImpossibleState&) {
            ++failures;
        }
    }
    rep.rows.push_back(at_most("condition select failures in 1e5 gammas", failures, 0.0, 0.0,
                               "one of the two conditions always holds"));

    // Bit means at three normalized means; machines hold n = 4 samples each.
    RngStream rng(seed, 0x73617774);
    constexpr int kMachines = 1000000;
    const auto params = estimation::Protocol3Params::make(kMachines, 1, 4, 1.0, 16.0);
    const std::pair<double, const char*> means[] = {{0.5, "0.5"}, {3.3, "3.3"}, {7.45, "7.45"}};
    for (const auto& [tb, label] : means) {
        long long ones = 0, ones_shift = 0;
        for (int i = 0; i < kMachines; ++i) {
            double sum = 0.0;
            for (int j = 0; j < 4; ++j) sum += tb / 2.0 + rng.normal();
            const auto bits = estimation::protocol3_machine(params.r, sum / 2.0, params, rng);
            ones += bits[0] == '1';
            ones_shift += bits[1] == '1';
        }
        auto zscore = [](long long k, double expect) {
            const double mean = static_cast<double>(k) / kMachines;
            return std::abs(mean - expect) / std::sqrt(expect * (1.0 - expect) / kMachines);
        };
        const double e1 = 0.5 - numerics::sawtooth_h(tb) / std::numbers::pi;
        const double e2 = 0.5 - numerics::sawtooth_h(tb + 0.2) / std::numbers::pi;
        const std::string tag = label;
        rep.rows.push_back(at_most("E[B] z-score at theta_bar=" + tag, zscore(ones, e1), 4.0, 0.0,
                                   "E[B_i] = 1/2 - h(theta_bar)/pi"));
        rep.rows.push_back(at_most("E[B'] z-score at theta_bar=" + tag, zscore(ones_shift, e2), 4.0, 0.0,
                                   "E[B'_i] = 1/2 - h(theta_bar + 1/5)/pi"));
    }

    // Full runs at m = 1e4: accuracy and exact bit count.
    GaussianModel model{{1.65}, 1.0, 4, 10000, 1};
    constexpr double kU = 16.0;
    const auto p3 = estimation::Protocol3Params::make(model.m, model.d, model.n, model.sigma, kU);
    const double theta_bar = model.normalized(0);
    const double radius = 0.01 + p3.grid_step;
    int within = 0, event = 0, within_event = 0, bit_errors = 0, range_errors = 0;
    for (int t = 0; t < trials; ++t) {
        RngStream trial(seed, static_cast<std::uint64_t>(t));
        const auto rep3 = estimation::run_gme_sawtooth(model, kU, trial);
        const double est = rep3.estimate[0] * std::sqrt(static_cast<double>(model.n)) / model.sigma;
        const bool ok = std::abs(est - theta_bar) <= radius;
        within += ok;
        if (std::abs(rep3.diagnostics.at("gamma") - theta_bar) < 0.01) {
            ++event;
            within_event += ok;
        }
        bit_errors += rep3.bits_used != p3.bits_per_coordinate();
        range_errors += std::abs(est) > kU;
    }
    rep.rows.push_back(at_least("fraction within 1/100 + grid_step", static_cast<double>(within) / trials, 0.99, 0.0,
                                "final estimate accuracy, unconditional"));
    rep.rows.push_back(at_least("fraction within 1/100 + grid_step given |gamma - theta_bar| < 1/100",
                                event ? static_cast<double>(within_event) / event : 1.0, 1.0, 0.0,
                                "final estimate accuracy on the median event"));
    rep.rows.push_back(note("fraction of trials with |gamma - theta_bar| < 1/100", static_cast<double>(event) / trials,
                            "median event frequency"));
    rep.rows.push_back(at_most("runs with wrong bit count", bit_errors, 0.0, 0.0, "r (P+1) + 2 (m - r) bits"));
    rep.rows.push_back(note("bits per coordinate", static_cast<double>(p3.bits_per_coordinate()), "r (P+1) + 2 (m - r)"));

    // Random messages never push the decoder outside [-U, U].
    RngStream fuzz(seed, 0x66757a7a);
    estimation::Protocol3Params small = estimation::Protocol3Params::make(64, 1, 1, 1.0, 4.0);
    for (int t = 0; t < 2000; ++t) {
        std::vector<BitString> codes(static_cast<std::size_t>(small.r));
        for (auto& c : codes) {
            c.resize(static_cast<std::size_t>(small.precision_bits + 1));
            for (char& ch : c) ch = fuzz.bernoulli(0.5) ? '1' : '0';
        }
        std::vector<BitString> pairs(static_cast<std::size_t>(small.m - small.r));
        for (auto& p : pairs) p = {fuzz.bernoulli(0.5) ? '1' : '0', fuzz.bernoulli(0.5) ? '1' : '0'};
        const auto out = estimation::protocol3_decode(codes, pairs, small);
        range_errors += std::abs(out.estimate[0]) > small.magnitude_bound;
    }
    rep.rows.push_back(at_most("estimates outside [-U, U]", range_errors, 0.0, 0.0, "cap at U"));
    return rep;
}

VerificationReport suite_gapmajority(std::uint64_t seed, int budget) {
    const int trials = budget > 0 ? budget : 1000;
    VerificationReport rep{"gapmajority", seed, trials, {}};
    for (int k : {400, 1600}) {
        int errors = 0, bit_errors = 0;
        double cost = 0.0;
        for (int t = 0; t < trials; ++t) {
            RngStream rng(seed, static_cast<std::uint64_t>(k) * 1000003ULL + static_cast<std::uint64_t>(t));
            const int b = t % 2;
            const auto inst = estimation::gap_majority_make(k, b, rng);
            const auto out = estimation::gap_majority_broadcast(inst, rng);
            errors += out.decision != b;
            bit_errors += out.bits_used != static_cast<std::size_t>(k);
            cost = out.info_cost_nats;
        }
        const double p0 = estimation::gap_majority_bias(k, 0);
        const std::vector<double> law{p0, 1.0 - p0};
        const double closed = k * info::raw::entropy(law);
        const std::string tag = "k=" + std::to_string(k);
        rep.rows.push_back(at_most("decision error rate " + tag, static_cast<double>(errors) / trials, 0.25, 0.0,
                                   "broadcast solves gap majority"));
        rep.rows.push_back(at_most("|info cost - k H(1/2 - 10/sqrt k)| " + tag, std::abs(cost - closed), 1e-12, 0.0,
                                   "transcript reveals every input"));
        rep.rows.push_back(at_most("runs with bits != k " + tag, bit_errors, 0.0, 0.0, "one bit per party"));
        rep.rows.push_back(note("info cost nats " + tag, cost, "k H(1/2 - 10/sqrt k)"));
    }
    return rep;
}

}  // namespace

// ---------------------------------------------------------------------------

MseResult mse_monte_carlo(const GmeRunner& runner, const GaussianModel& model, int trials, std::uint64_t seed,
                          int threads) {
    if (trials < 30) throw ConfigError("mse_monte_carlo: need at least 30 trials");
    model.validate();
    std::vector<double> sq(static_cast<std::size_t>(trials), 0.0);
    std::vector<std::size_t> bits(static_cast<std::size_t>(trials), 0);
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(trials));

    auto work = [&](int begin, int end) {
        for (int t = begin; t < end; ++t) {
            const auto idx = static_cast<std::size_t>(t);
            try {
                RngStream rng(seed, static_cast<std::uint64_t>(t));
                const RunReport rep = runner(model, rng);
                if (rep.estimate.size() != model.theta.size()) {
                    throw ProtocolViolation("runner returned " + std::to_string(rep.estimate.size()) +
                                            " coordinates, expected " + std::to_string(model.theta.size()));
                }
                double e = 0.0;
                for (std::size_t l = 0; l < rep.estimate.size(); ++l) {
                    const double diff = rep.estimate[l] - model.theta[l];
                    e += diff * diff;
                }
                sq[idx] = e;
                bits[idx] = rep.bits_used;
            } catch (...) {
                errors[idx] = std::current_exception();
                return;
            }
        }
    };

    const int workers = std::clamp(threads, 1, trials);
    if (workers == 1) {
        work(0, trials);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back(work, trials * w / workers, trials * (w + 1) / workers);
        }
        for (auto& th : pool) th.join();
    }
    for (int t = 0; t < trials; ++t) {
        if (errors[static_cast<std::size_t>(t)]) rethrow_with_trial(errors[static_cast<std::size_t>(t)], t);
    }

    double mean = 0.0;
    for (double v : sq) mean += v;
    mean /= trials;
    double var = 0.0;
    for (double v : sq) var += (v - mean) * (v - mean);
    var /= (trials - 1);

    MseResult out;
    out.mse = mean;
    out.std_error = std::sqrt(var / trials);
    out.bits = *std::max_element(bits.begin(), bits.end());
    out.trials = trials;
    return out;
}

TradeoffCurve tradeoff_sweep(const GaussianModel& model, const std::vector<double>& alphas, int trials,
                             std::uint64_t seed, int threads) {
    TradeoffCurve curve;
    for (double alpha : alphas) {
        estimation::participating_machines(model.m, alpha);  // validates alpha
        const GmeRunner runner = [alpha](const GaussianModel& mdl, RngStream& rng) {
            return estimation::run_gme_dense(mdl, alpha, rng);
        };
        const auto r = mse_monte_carlo(runner, model, trials, seed, threads);
        curve.rows.push_back({alpha, r.bits, r.mse, r.std_error, r.trials});
    }
    return curve;
}

CheckRow at_least(std::string name, double measured, double bound, double tolerance, std::string reference) {
    CheckRow r{std::move(name), measured, bound, measured - bound, tolerance, false, std::move(reference), false};
    r.pass = r.slack >= -tolerance;
    return r;
}

CheckRow at_most(std::string name, double measured, double bound, double tolerance, std::string reference) {
    CheckRow r{std::move(name), measured, bound, bound - measured, tolerance, false, std::move(reference), false};
    r.pass = r.slack >= -tolerance;
    return r;
}

CheckRow note(std::string name, double measured, std::string reference) {
    return CheckRow{std::move(name), measured, measured, 0.0, 0.0, true, std::move(reference), true};
}

bool VerificationReport::passed() const {
    return std::all_of(rows.begin(), rows.end(), [](const CheckRow& r) { return r.pass; });
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"toolbox", "cutpaste", "sdpi", "distributed-sdpi",
                                                "transport", "sawtooth", "gapmajority"};
    return names;
}

VerificationReport verify_suite(const std::string& name, std::uint64_t seed, int budget) {
    if (budget < 0) throw ConfigError("budget must be nonnegative");
    if (name == "toolbox") return suite_toolbox(seed, budget);
    if (name == "cutpaste") return suite_cutpaste(seed, budget);
    if (name == "sdpi") return suite_sdpi(seed, budget);
    if (name == "distributed-sdpi") return suite_distributed(seed, budget);
    if (name == "transport") return suite_transport(seed, budget);
    if (name == "sawtooth") return suite_sawtooth(seed, budget);
    if (name == "gapmajority") return suite_gapmajority(seed, budget);
    throw ConfigError("unknown suite '" + name + "'");
}

double hellinger_corpus_floor() {
    RngStream rng(kCorpusSeed, 0);
    return corpus_stats(corpus(rng, kCorpusSize)).min_ratio;
}

// ---------------------------------------------------------------------------

SparseExperiment sparse_reduction_experiment(estimation::SparseDetectionConfig cfg, int trials,
                                             std::uint64_t seed) {
    if (trials < 1) throw ConfigError("sparse experiment: trials must be >= 1");
    SparseExperiment out;
    out.base_risk = cfg.d * cfg.sigma * cfg.sigma / (static_cast<double>(cfg.n) * cfg.m);
    if (!(cfg.delta > 0.0)) cfg.delta = std::sqrt(16.0 * out.base_risk / cfg.k);
    cfg.validate();
    out.config = cfg;
    out.trials = trials;

    const double range = cfg.delta + 10.0 * cfg.sigma;
    const estimation::DataProtocol base = [range](const estimation::MachineData& data, RngStream& rng) {
        return estimation::run_averaging_protocol(data, range, 24, rng);
    };
    for (int v : {0, 1}) {
        int correct = 0;
        for (int t = 0; t < trials; ++t) {
            RngStream rng(seed, 2 * static_cast<std::uint64_t>(t) + static_cast<std::uint64_t>(v));
            RngStream pub = rng.substream(protocol::kPublicStream);
            const auto input = estimation::draw_detection_input(cfg, v, rng);
            const auto rep = estimation::sparse_reduction_protocol1(input, base, cfg, pub, rng);
            correct += static_cast<int>(rep.estimate[0]) == v;
            out.bits = rep.bits_used;
        }
        (v ? out.success_v1 : out.success_v0) = static_cast<double>(correct) / trials;
    }
    return out;
}

SlrExperiment slr_experiment(int n, int d, double sigma, int trials, std::uint64_t seed) {
    if (n < 1 || d < 1 || trials < 2 || !(sigma > 0.0)) throw ConfigError("slr experiment: bad parameters");
    SlrExperiment out;
    out.n = n;
    out.d = d;
    out.sigma = sigma;
    out.trials = trials;

    RngStream setup(seed, 0x736c72);
    Eigen::MatrixXd a(n, d);
    for (Eigen::Index i = 0; i < a.size(); ++i) a(i) = setup.normal();
    Eigen::VectorXd theta(d);
    for (Eigen::Index i = 0; i < d; ++i) theta(i) = setup.normal();
    out.lambda = estimation::design_lambda(a);
    out.sigma0 = sigma / (out.lambda * std::sqrt(static_cast<double>(n)));

    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
    for (int t = 0; t < trials; ++t) {
        RngStream rng(seed, static_cast<std::uint64_t>(t));
        Eigen::VectorXd x(d);
        for (Eigen::Index i = 0; i < d; ++i) x(i) = theta(i) + out.sigma0 * rng.normal();
        const Eigen::VectorXd e = estimation::slr_reduce(x, a, sigma, out.sigma0, rng) - a * theta;
        s += e * e.transpose();
    }
    s /= trials;
    const Eigen::MatrixXd dev = (s - sigma * sigma * Eigen::MatrixXd::Identity(n, n)) / (sigma * sigma);
    out.max_relative_deviation = dev.cwiseAbs().maxCoeff();

    try {
        estimation::SlrNoise(a, sigma, 1.05 * out.sigma0);
    } catch (const SpectralBoundError&) {
        out.rejects_violation = true;
    }
    return out;
}

// ---------------------------------------------------------------------------

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

nlohmann::json json_real(double v) {
    if (std::isfinite(v)) return v;
    return format_real(v);
}

}  // namespace

std::string to_csv(const VerificationReport& r) {
    std::string out = "suite,name,measured,bound,slack,tolerance,pass,informational,reference\n";
    for (const auto& row : r.rows) {
        out += csv_field(r.suite) + ',' + csv_field(row.name) + ',' + format_real(row.measured) + ',' +
               format_real(row.bound) + ',' + format_real(row.slack) + ',' + format_real(row.tolerance) + ',' +
               (row.pass ? "1" : "0") + ',' + (row.informational ? "1" : "0") + ',' + csv_field(row.reference) + '\n';
    }
    return out;
}

std::string to_csv(const TradeoffCurve& c) {
    std::string out = "alpha,bits_total,mse,mse_stderr,trials\n";
    for (const auto& row : c.rows) {
        out += format_real(row.alpha) + ',' + std::to_string(row.bits_total) + ',' + format_real(row.mse) + ',' +
               format_real(row.mse_stderr) + ',' + std::to_string(row.trials) + '\n';
    }
    return out;
}

nlohmann::json to_json(const VerificationReport& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows) {
        rows.push_back({{"name", row.name},
                        {"measured", json_real(row.measured)},
                        {"bound", json_real(row.bound)},
                        {"slack", json_real(row.slack)},
                        {"tolerance", json_real(row.tolerance)},
                        {"pass", row.pass},
                        {"informational", row.informational},
                        {"reference", row.reference}});
    }
    return {{"suite", r.suite}, {"seed", r.seed}, {"budget", r.budget}, {"pass", r.passed()}, {"rows", rows}};
}

nlohmann::json to_json(const TradeoffCurve& c) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : c.rows) {
        rows.push_back({{"alpha", row.alpha},
                        {"bits_total", row.bits_total},
                        {"mse", row.mse},
                        {"mse_stderr", row.mse_stderr},
                        {"trials", row.trials}});
    }
    return {{"rows", rows}};
}

nlohmann::json to_json(const MseResult& r) {
    return {{"mse", r.mse}, {"mse_stderr", r.std_error}, {"bits", r.bits}, {"trials", r.trials}};
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        std::cout.flush();
        if (!std::cout) throw IoError("failed writing to stdout");
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f << content;
    f.close();
    if (!f) throw IoError("failed writing '" + path + "'");
}

}  // namespace distest::harness
