#include "distest/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "distest/error.hpp"
#include "distest/infotheory.hpp"

namespace distest::estimation {

namespace {

using protocol::BitTranscript;
using protocol::Machine;
using protocol::Schedule;
using protocol::Slot;

// Slots of `pattern` in order, the whole pattern repeated `repeats` times.
// Returns the pattern period in bits through `period`.
Schedule periodic_schedule(const std::vector<Slot>& pattern, std::size_t repeats, std::size_t& period) {
    std::vector<std::size_t> offsets;
    offsets.reserve(pattern.size() + 1);
    offsets.push_back(0);
    for (const auto& s : pattern) offsets.push_back(offsets.back() + s.length);
    period = offsets.back();
    const std::size_t total = period * repeats;
    const std::size_t per = period;
    return [pattern, offsets = std::move(offsets), total, per](const BitTranscript& t) -> std::optional<Slot> {
        const std::size_t pos = t.length();
        if (pos >= total) return std::nullopt;
        const std::size_t off = pos % per;
        const auto it = std::upper_bound(offsets.begin(), offsets.end(), off);
        return pattern[static_cast<std::size_t>(it - offsets.begin()) - 1];
    };
}

double normalized_sum(std::span<const double> samples, double sigma) {
    double s = 0.0;
    for (double v : samples) s += v;
    return s / (sigma * std::sqrt(static_cast<double>(samples.size())));
}

void require_data(const MachineData& data) {
    if (data.empty()) throw PreconditionError("protocol needs at least one machine");
    const int n = data.front().n;
    const int d = data.front().d;
    if (n < 1 || d < 1) throw PreconditionError("machine data must have n, d >= 1");
    for (const auto& x : data) {
        if (x.n != n || x.d != d || x.values.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(d)) {
            throw PreconditionError("all machines need n x d samples");
        }
    }
}

// Evaluated in extended precision: near the band edges, forming gamma + 1/5
// in double can round a point that satisfies the second condition onto the
// excluded edge.
bool condition_holds(long double x) {
    const long double f = x - std::floor(x);
    return f > 1.0L / 50 && f < 49.0L / 50 && std::abs(f - 0.25L) >= 3.0L / 100 &&
           std::abs(f - 0.75L) >= 3.0L / 100;
}

}  // namespace

void GaussianModel::validate() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError("model: sigma must be positive");
    if (n < 1 || m < 1 || d < 1) throw ConfigError("model: n, m, d must be >= 1");
    if (theta.size() != static_cast<std::size_t>(d)) {
        throw ConfigError("model: theta has " + std::to_string(theta.size()) + " entries, d = " +
                          std::to_string(d));
    }
    for (double t : theta) {
        if (!std::isfinite(t)) throw ConfigError("model: theta must be finite");
    }
}

double GaussianModel::normalized(int coord) const {
    return theta[static_cast<std::size_t>(coord)] * std::sqrt(static_cast<double>(n)) / sigma;
}

MachineData draw_machine_data(const GaussianModel& model, int machines, RngStream& rng) {
    model.validate();
    MachineData data(static_cast<std::size_t>(machines));
    for (auto& x : data) {
        x.n = model.n;
        x.d = model.d;
        x.values.resize(static_cast<std::size_t>(model.n) * static_cast<std::size_t>(model.d));
        std::size_t idx = 0;
        for (int l = 0; l < model.d; ++l) {
            const double mean = model.theta[static_cast<std::size_t>(l)];
            for (int j = 0; j < model.n; ++j) x.values[idx++] = mean + model.sigma * rng.normal();
        }
    }
    return data;
}

// ---------------------------------------------------------------------------

int sign_encode(std::span<const double> samples, double sigma) {
    if (samples.empty()) throw PreconditionError("sign_encode: need at least one sample");
    return normalized_sum(samples, sigma) >= 0.0 ? 1 : 0;
}

double sign_decode(std::string_view bits, double sigma, int n) {
    if (bits.empty()) throw PreconditionError("sign_decode: need at least one bit");
    long long total = 0;
    for (char c : bits) total += c == '1' ? 1 : -1;
    const double mean = static_cast<double>(total) / static_cast<double>(bits.size());
    const double scale = sigma / std::sqrt(static_cast<double>(n));
    // Past erf(1/sqrt(2)) the clamp saturates, which also covers mean = +-1.
    static const double saturation = numerics::erf(1.0 / std::numbers::sqrt2);
    if (mean >= saturation) return scale;
    if (mean <= -saturation) return -scale;
    const double t = std::numbers::sqrt2 * numerics::erf_inv(mean);
    return scale * std::clamp(t, -1.0, 1.0);
}

RunReport run_sign_protocol(const MachineData& data, double sigma, RngStream& rng) {
    require_data(data);
    const int d = data.front().d;
    const int n = data.front().n;
    const std::size_t m = data.size();

    std::vector<Slot> pattern(m);
    for (std::size_t i = 0; i < m; ++i) pattern[i] = Slot{static_cast<int>(i), 1};
    std::size_t period = 0;
    const Schedule schedule = periodic_schedule(pattern, static_cast<std::size_t>(d), period);

    std::vector<Machine<SampleMatrix>> machines(m);
    for (std::size_t i = 0; i < m; ++i) {
        machines[i].index = static_cast<int>(i);
        machines[i].behavior = [sigma, period](const SampleMatrix& x, const BitTranscript& so_far,
                                               RngStream&, RngStream&) -> BitString {
            const auto coord = static_cast<int>(so_far.length() / period);
            return sign_encode(x.coordinate(coord), sigma) ? "1" : "0";
        };
    }
    const auto run = protocol::run_protocol<SampleMatrix>(machines, data, schedule, rng);

    RunReport out;
    out.bits_used = run.bit_count;
    out.estimate.resize(static_cast<std::size_t>(d));
    const std::string_view bits = run.transcript.bits;
    for (int l = 0; l < d; ++l) {
        out.estimate[static_cast<std::size_t>(l)] =
            sign_decode(bits.substr(static_cast<std::size_t>(l) * m, m), sigma, n);
    }
    return out;
}

int participating_machines(int m, double alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
    const auto k = static_cast<int>(std::ceil(alpha * static_cast<double>(m) - 1e-9));
    return std::clamp(k, 1, m);
}

RunReport run_gme_dense(const GaussianModel& model, double alpha, RngStream& rng) {
    model.validate();
    const int active = participating_machines(model.m, alpha);
    const double bound = model.sigma / std::sqrt(static_cast<double>(model.n));
    for (double t : model.theta) {
        if (std::abs(t) > bound) {
            throw ConfigError("sign protocol needs |theta_l| <= sigma/sqrt(n) = " + std::to_string(bound) +
                              "; use the sawtooth protocol for a wider range");
        }
    }
    const auto data = draw_machine_data(model, active, rng);
    auto report = run_sign_protocol(data, model.sigma, rng);
    report.diagnostics["machines"] = active;
    return report;
}

// ---------------------------------------------------------------------------

Protocol3Params Protocol3Params::make(int m, int d, int n, double sigma, double magnitude_bound) {
    if (m < 2) throw ConfigError("sawtooth protocol needs m >= 2");
    if (d < 1 || n < 1 || !(sigma > 0.0)) throw ConfigError("sawtooth protocol: bad model");
    if (!(magnitude_bound >= 1.0)) throw ConfigError("sawtooth protocol: magnitude bound must be >= 1");
    Protocol3Params p;
    p.m = m;
    p.magnitude_bound = magnitude_bound;
    const double scale = std::max(static_cast<double>(m) * d * n / sigma, 2.0);
    const int r = static_cast<int>(std::ceil(10.0 * std::log2(scale)));
    p.r = std::clamp(r, 1, m / 2);
    p.precision_bits =
        static_cast<int>(std::ceil(std::log2(magnitude_bound * std::sqrt(static_cast<double>(m))))) + 8;
    p.precision_bits = std::min(p.precision_bits, 52);
    p.grid_step = 1.0 / std::sqrt(static_cast<double>(m - p.r));
    return p;
}

void Protocol3Params::validate() const {
    if (r < 1 || r >= m) throw ConfigError("sawtooth protocol: need 1 <= r < m");
    if (!(magnitude_bound >= 1.0)) throw ConfigError("sawtooth protocol: magnitude bound must be >= 1");
    if (!(grid_step > 0.0)) throw ConfigError("sawtooth protocol: grid step must be positive");
    if (precision_bits < 1 || precision_bits > 52) throw ConfigError("sawtooth protocol: precision out of range");
}

std::size_t Protocol3Params::bits_per_coordinate() const {
    return static_cast<std::size_t>(r) * static_cast<std::size_t>(precision_bits + 1) +
           2 * static_cast<std::size_t>(m - r);
}

BitString protocol3_machine(int i, double x, const Protocol3Params& params, RngStream& rng) {
    if (i < params.r) {
        return numerics::encode_fixed_point(x, params.magnitude_bound, params.precision_bits).bits;
    }
    BitString out(2, '0');
    if (rng.bernoulli(numerics::frac(x))) out[0] = '1';
    if (rng.bernoulli(numerics::frac(x + 0.2))) out[1] = '1';
    return out;
}

int protocol3_condition_select(double gamma) {
    if (!std::isfinite(gamma)) throw ImpossibleState("condition select: gamma is not finite");
    const long double g = gamma;
    if (condition_holds(g)) return 1;
    if (condition_holds(g + 1.0L / 5)) return 2;
    throw ImpossibleState("condition select: neither case holds for gamma = " + std::to_string(gamma));
}

RunReport protocol3_decode(std::span<const BitString> reporter_codes,
                           std::span<const BitString> bit_pairs, const Protocol3Params& params) {
    params.validate();
    if (reporter_codes.empty()) throw PreconditionError("sawtooth decode: need at least one reporter");
    if (bit_pairs.empty()) throw PreconditionError("sawtooth decode: need at least one bit pair");

    std::vector<double> values;
    values.reserve(reporter_codes.size());
    for (const auto& code : reporter_codes) {
        values.push_back(numerics::decode_fixed_point(code, params.magnitude_bound, params.precision_bits));
    }
    const double gamma = numerics::median(values);
    const int which = protocol3_condition_select(gamma);
    const double shift = which == 1 ? 0.0 : 0.2;
    const double centre = gamma + shift;
    const double z = std::floor(centre);

    std::size_t ones = 0;
    const std::size_t slot = which == 1 ? 0 : 1;
    for (const auto& pair : bit_pairs) {
        if (pair.size() != 2) throw ProtocolViolation("sawtooth decode: bit pairs must have 2 bits");
        if (pair[slot] == '1') ++ones;
    }
    const double b_mean = static_cast<double>(ones) / static_cast<double>(bit_pairs.size());
    const double target = std::numbers::pi * (0.5 - b_mean);
    const double tol = 1.0 / std::sqrt(static_cast<double>(params.m));

    double estimate = gamma;
    double fallback = 1.0;
    double guess_index = -1.0;
    const double lo = centre - z - 0.01;
    auto i = static_cast<long long>(std::max(0.0, std::floor(lo / params.grid_step)));
    for (;; ++i) {
        const double g = static_cast<double>(i) * params.grid_step;
        const double gap = z + g - centre;
        if (gap >= 0.01) break;
        if (std::abs(gap) >= 0.01) continue;
        if (std::abs(numerics::sawtooth_h(g) - target) <= tol) {
            estimate = z + g - shift;
            fallback = 0.0;
            guess_index = static_cast<double>(i);
            break;
        }
    }
    estimate = std::clamp(estimate, -params.magnitude_bound, params.magnitude_bound);

    RunReport out;
    out.estimate = {estimate};
    out.diagnostics = {{"gamma", gamma}, {"case", which}, {"fallback", fallback}, {"guess_index", guess_index}};
    return out;
}

RunReport run_sawtooth_protocol(const MachineData& data, double sigma, const Protocol3Params& params,
                                RngStream& rng) {
    require_data(data);
    params.validate();
    if (data.size() != static_cast<std::size_t>(params.m)) {
        throw PreconditionError("sawtooth protocol: data must cover all m machines");
    }
    const int d = data.front().d;
    const int n = data.front().n;
    const auto m = static_cast<std::size_t>(params.m);
    const auto r = static_cast<std::size_t>(params.r);
    const auto code_len = static_cast<std::size_t>(params.precision_bits + 1);

    std::vector<Slot> pattern(m);
    for (std::size_t i = 0; i < m; ++i) pattern[i] = Slot{static_cast<int>(i), i < r ? code_len : 2};
    std::size_t period = 0;
    const Schedule schedule = periodic_schedule(pattern, static_cast<std::size_t>(d), period);

    std::vector<Machine<SampleMatrix>> machines(m);
    for (std::size_t i = 0; i < m; ++i) {
        machines[i].index = static_cast<int>(i);
        machines[i].behavior = [i, sigma, period, &params](const SampleMatrix& x, const BitTranscript& so_far,
                                                           RngStream& priv, RngStream&) -> BitString {
            const auto coord = static_cast<int>(so_far.length() / period);
            return protocol3_machine(static_cast<int>(i), normalized_sum(x.coordinate(coord), sigma), params, priv);
        };
    }
    const auto run = protocol::run_protocol<SampleMatrix>(machines, data, schedule, rng);

    RunReport out;
    out.bits_used = run.bit_count;
    const double scale = sigma / std::sqrt(static_cast<double>(n));
    double fallbacks = 0.0;
    std::vector<BitString> codes(r);
    std::vector<BitString> pairs(m - r);
    for (int l = 0; l < d; ++l) {
        std::size_t pos = static_cast<std::size_t>(l) * period;
        for (auto& c : codes) {
            c = run.transcript.bits.substr(pos, code_len);
            pos += code_len;
        }
        for (auto& p : pairs) {
            p = run.transcript.bits.substr(pos, 2);
            pos += 2;
        }
        const auto coord = protocol3_decode(codes, pairs, params);
        out.estimate.push_back(coord.estimate.front() * scale);
        fallbacks += coord.diagnostics.at("fallback");
        if (l == 0) out.diagnostics = coord.diagnostics;
    }
    out.diagnostics["fallback_count"] = fallbacks;
    out.diagnostics["reporters"] = static_cast<double>(r);
    return out;
}

RunReport run_gme_sawtooth(const GaussianModel& model, double magnitude_bound, RngStream& rng) {
    model.validate();
    const auto params = Protocol3Params::make(model.m, model.d, model.n, model.sigma, magnitude_bound);
    for (int l = 0; l < model.d; ++l) {
        if (std::abs(model.normalized(l)) > magnitude_bound) {
            throw ConfigError("sawtooth protocol: |theta_l| sqrt(n)/sigma exceeds the magnitude bound");
        }
    }
    const auto data = draw_machine_data(model, model.m, rng);
    return run_sawtooth_protocol(data, model.sigma, params, rng);
}

// ---------------------------------------------------------------------------

RunReport run_averaging_protocol(const MachineData& data, double range_bound, int precision_bits,
                                 RngStream& rng) {
    require_data(data);
    const int d = data.front().d;
    const std::size_t m = data.size();
    const auto code_len = static_cast<std::size_t>(precision_bits + 1);

    std::vector<Slot> pattern(m);
    for (std::size_t i = 0; i < m; ++i) pattern[i] = Slot{static_cast<int>(i), code_len};
    std::size_t period = 0;
    const Schedule schedule = periodic_schedule(pattern, static_cast<std::size_t>(d), period);

    std::vector<Machine<SampleMatrix>> machines(m);
    for (std::size_t i = 0; i < m; ++i) {
        machines[i].index = static_cast<int>(i);
        machines[i].behavior = [range_bound, precision_bits, period](
                                   const SampleMatrix& x, const BitTranscript& so_far, RngStream&,
                                   RngStream&) -> BitString {
            const auto coord = static_cast<int>(so_far.length() / period);
            const auto s = x.coordinate(coord);
            const double mean = std::accumulate(s.begin(), s.end(), 0.0) / static_cast<double>(s.size());
            return numerics::encode_fixed_point(mean, range_bound, precision_bits).bits;
        };
    }
    const auto run = protocol::run_protocol<SampleMatrix>(machines, data, schedule, rng);

    RunReport out;
    out.bits_used = run.bit_count;
    const std::string_view bits = run.transcript.bits;
    for (int l = 0; l < d; ++l) {
        double total = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const std::size_t pos = static_cast<std::size_t>(l) * period + i * code_len;
            total += numerics::decode_fixed_point(bits.substr(pos, code_len), range_bound, precision_bits);
        }
        out.estimate.push_back(total / static_cast<double>(m));
    }
    return out;
}

// ---------------------------------------------------------------------------

void SparseDetectionConfig::validate() const {
    if (k < 1) throw ConfigError("sparse detection: k must be >= 1");
    if (d < 2 * k) throw ConfigError("sparse detection: need d >= 2k");
    if (!(delta > 0.0)) throw ConfigError("sparse detection: delta must be positive");
    if (n < 1 || m < 1) throw ConfigError("sparse detection: n, m must be >= 1");
    if (!(sigma > 0.0)) throw ConfigError("sparse detection: sigma must be positive");
}

EmbeddedData prepare_embedded_data(std::span<const std::vector<double>> detector_input,
                                   const SparseDetectionConfig& cfg, RngStream& public_rng,
                                   RngStream& private_rng) {
    cfg.validate();
    if (detector_input.size() != static_cast<std::size_t>(cfg.m)) {
        throw PreconditionError("sparse reduction: need detection samples for every machine");
    }
    // Partial Fisher-Yates on the shared stream: every machine sees the same I.
    std::vector<int> perm(static_cast<std::size_t>(cfg.d));
    std::iota(perm.begin(), perm.end(), 0);
    for (int r = 0; r < cfg.k; ++r) {
        const auto j = static_cast<std::size_t>(r) +
                       public_rng.uniform_index(static_cast<std::size_t>(cfg.d - r));
        std::swap(perm[static_cast<std::size_t>(r)], perm[j]);
    }
    EmbeddedData out;
    out.coordinates.assign(perm.begin(), perm.begin() + cfg.k);

    std::vector<double> mean(static_cast<std::size_t>(cfg.d), 0.0);
    for (int r = 1; r < cfg.k; ++r) mean[static_cast<std::size_t>(out.coordinates[static_cast<std::size_t>(r)])] = cfg.delta;
    const auto first = static_cast<std::size_t>(out.coordinates.front());

    out.data.resize(static_cast<std::size_t>(cfg.m));
    for (std::size_t j = 0; j < out.data.size(); ++j) {
        const auto& own = detector_input[j];
        if (own.size() != static_cast<std::size_t>(cfg.n)) {
            throw PreconditionError("sparse reduction: every machine needs n detection samples");
        }
        auto& x = out.data[j];
        x.n = cfg.n;
        x.d = cfg.d;
        x.values.resize(static_cast<std::size_t>(cfg.n) * static_cast<std::size_t>(cfg.d));
        for (std::size_t l = 0; l < static_cast<std::size_t>(cfg.d); ++l) {
            for (std::size_t s = 0; s < static_cast<std::size_t>(cfg.n); ++s) {
                x.values[l * static_cast<std::size_t>(cfg.n) + s] =
                    l == first ? own[s] : mean[l] + cfg.sigma * private_rng.normal();
            }
        }
    }
    return out;
}

RunReport sparse_reduction_protocol1(std::span<const std::vector<double>> detector_input,
                                     const DataProtocol& base_protocol,
                                     const SparseDetectionConfig& cfg, RngStream& public_rng,
                                     RngStream& private_rng) {
    const auto embedded = prepare_embedded_data(detector_input, cfg, public_rng, private_rng);
    const auto base = base_protocol(embedded.data, private_rng);
    const auto first = static_cast<std::size_t>(embedded.coordinates.front());
    if (base.estimate.size() != static_cast<std::size_t>(cfg.d)) {
        throw ProtocolViolation("sparse reduction: base protocol returned the wrong dimension");
    }
    const double value = base.estimate[first];
    RunReport out;
    out.estimate = {std::abs(value) >= cfg.delta / 2.0 ? 1.0 : 0.0};
    out.bits_used = base.bits_used;
    out.diagnostics = {{"coordinate", static_cast<double>(first)}, {"theta_hat", value}};
    return out;
}

std::vector<std::vector<double>> draw_detection_input(const SparseDetectionConfig& cfg, int v,
                                                      RngStream& rng) {
    cfg.validate();
    const double mean = v ? cfg.delta : 0.0;
    std::vector<std::vector<double>> out(static_cast<std::size_t>(cfg.m),
                                         std::vector<double>(static_cast<std::size_t>(cfg.n)));
    for (auto& machine : out) {
        for (double& s : machine) s = mean + cfg.sigma * rng.normal();
    }
    return out;
}

// ---------------------------------------------------------------------------

double gap_majority_bias(int k, int hidden_bit) {
    if (k < 1) throw DomainError("gap majority: k must be positive");
    const double gap = 10.0 / std::sqrt(static_cast<double>(k));
    return hidden_bit ? 0.5 + gap : 0.5 - gap;
}

GapMajorityInstance gap_majority_make(int k, int hidden_bit, RngStream& rng) {
    if (k < 16) throw PreconditionError("gap majority: k must be >= 16");
    const double p = gap_majority_bias(k, hidden_bit);
    if (p < 0.0 || p > 1.0) {
        throw DomainError("gap majority: 1/2 +- 10/sqrt(k) leaves [0, 1] for k = " + std::to_string(k));
    }
    GapMajorityInstance inst{k, hidden_bit ? 1 : 0, std::vector<int>(static_cast<std::size_t>(k))};
    for (int& z : inst.z) z = rng.bernoulli(p) ? 1 : 0;
    return inst;
}

GapMajorityOutcome gap_majority_broadcast(const GapMajorityInstance& inst, RngStream& rng) {
    std::vector<Machine<int>> machines(static_cast<std::size_t>(inst.k));
    for (int i = 0; i < inst.k; ++i) {
        machines[static_cast<std::size_t>(i)].index = i;
        machines[static_cast<std::size_t>(i)].behavior = [](const int& z, const BitTranscript&, RngStream&,
                                                            RngStream&) -> BitString { return z ? "1" : "0"; };
    }
    const auto run = protocol::run_protocol<int>(machines, inst.z, protocol::round_robin_schedule(inst.k), rng);
    const auto ones = static_cast<double>(std::count(run.transcript.bits.begin(), run.transcript.bits.end(), '1'));

    GapMajorityOutcome out;
    out.decision = ones >= static_cast<double>(inst.k) / 2.0 ? 1 : 0;
    out.bits_used = run.bit_count;
    out.info_cost_nats = static_cast<double>(inst.k) * info::binary_entropy(gap_majority_bias(inst.k, 0));
    return out;
}

// ---------------------------------------------------------------------------

double design_lambda(const Eigen::MatrixXd& a) {
    if (a.rows() < 1) throw PreconditionError("design_lambda: empty design");
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    const double top = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
    return top / std::sqrt(static_cast<double>(a.rows()));
}

SlrNoise::SlrNoise(const Eigen::MatrixXd& a, double sigma, double sigma0) {
    if (!(sigma > 0.0) || !(sigma0 >= 0.0)) throw PreconditionError("slr: need sigma > 0, sigma0 >= 0");
    const Eigen::Index n = a.rows();
    const Eigen::MatrixXd cov =
        sigma * sigma * Eigen::MatrixXd::Identity(n, n) - sigma0 * sigma0 * (a * a.transpose());
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(cov);
    if (ldlt.info() != Eigen::Success) throw SpectralBoundError("slr: covariance factorization failed");
    Eigen::VectorXd dvec = ldlt.vectorD();
    const double tol = 1e-10 * sigma * sigma;
    for (Eigen::Index i = 0; i < dvec.size(); ++i) {
        if (dvec(i) < -tol) {
            throw SpectralBoundError("slr: sigma^2 I - sigma0^2 A A^T is not PSD (pivot " +
                                     std::to_string(dvec(i)) + "); the spectral bound on A is violated");
        }
        dvec(i) = std::sqrt(std::max(dvec(i), 0.0));
    }
    const Eigen::MatrixXd l = ldlt.matrixL();
    factor_ = ldlt.transpositionsP().transpose() * (l * dvec.asDiagonal());
}

Eigen::VectorXd SlrNoise::sample(RngStream& rng) const {
    Eigen::VectorXd z(factor_.cols());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = rng.normal();
    return factor_ * z;
}

Eigen::VectorXd slr_reduce(const Eigen::VectorXd& x, const Eigen::MatrixXd& a, double sigma,
                           double sigma0, RngStream& rng) {
    if (x.size() != a.cols()) throw PreconditionError("slr: x must have one entry per design column");
    return a * x + SlrNoise(a, sigma, sigma0).sample(rng);
}

}  // namespace distest::estimation
