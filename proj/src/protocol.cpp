#include "distest/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace distest::protocol {

namespace {

std::size_t tuple_count(const std::vector<int>& alphabet) {
    std::size_t n = 1;
    for (int a : alphabet) n *= static_cast<std::size_t>(a);
    return n;
}

// Visits every input tuple in mixed-radix order.
template <class Fn>
void for_each_tuple(const std::vector<int>& alphabet, Fn&& fn) {
    std::vector<int> x(alphabet.size(), 0);
    const std::size_t total = tuple_count(alphabet);
    for (std::size_t t = 0; t < total; ++t) {
        fn(std::span<const int>(x));
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (++x[i] < alphabet[i]) break;
            x[i] = 0;
        }
    }
}

void check_laws(const EnumerableProtocol& p, std::span<const info::DiscreteDistribution> laws) {
    if (laws.size() != static_cast<std::size_t>(p.machines())) {
        throw PreconditionError("protocol: need one input law per machine");
    }
    for (std::size_t i = 0; i < laws.size(); ++i) {
        if (laws[i].size() != static_cast<std::size_t>(p.alphabet()[i])) {
            throw PreconditionError("protocol: input law does not match the machine alphabet");
        }
    }
}

void check_budget(const EnumerableProtocol& p) {
    const double work =
        static_cast<double>(p.leaves().size()) * static_cast<double>(tuple_count(p.alphabet()));
    if (work > kEnumerationBudget) {
        throw BudgetExceeded("protocol: enumeration needs " + std::to_string(work) +
                             " leaf-tuples, budget is 1e7");
    }
}

// Calls fn(tuple, leaf_index, Pr[X = x, Pi = leaf]) for every reachable pair.
template <class Fn>
void enumerate_joint(const EnumerableProtocol& p, std::span<const info::DiscreteDistribution> laws,
                     Fn&& fn) {
    check_laws(p, laws);
    check_budget(p);
    std::map<BitString, std::size_t> leaf_index;
    for (std::size_t k = 0; k < p.leaves().size(); ++k) leaf_index[p.leaves()[k]] = k;

    for_each_tuple(p.alphabet(), [&](std::span<const int> x) {
        double w = 1.0;
        for (std::size_t i = 0; i < x.size(); ++i) w *= laws[i][static_cast<std::size_t>(x[i])];
        if (w == 0.0) return;
        // Iterative DFS over the trie.
        std::vector<std::pair<BitString, double>> stack{{BitString{}, w}};
        while (!stack.empty()) {
            auto [prefix, prob] = std::move(stack.back());
            stack.pop_back();
            const ProtocolNode* node = p.node(prefix);
            if (node == nullptr) {
                fn(x, leaf_index.at(prefix), prob);
                continue;
            }
            const double q = node->p_one[static_cast<std::size_t>(x[static_cast<std::size_t>(node->speaker)])];
            stack.emplace_back(prefix + '0', prob * (1.0 - q));
            stack.emplace_back(prefix + '1', prob * q);
        }
    });
}

std::vector<int> unit_vector(int m, int i) {
    std::vector<int> e(static_cast<std::size_t>(m), 0);
    if (i >= 0) e[static_cast<std::size_t>(i)] = 1;
    return e;
}

}  // namespace

Schedule round_robin_schedule(int machines, std::size_t length, std::size_t rounds) {
    const std::size_t total = static_cast<std::size_t>(machines) * length * rounds;
    return [machines, length, total](const BitTranscript& t) -> std::optional<Slot> {
        if (t.length() >= total) return std::nullopt;
        const std::size_t turn = t.length() / length;
        return Slot{static_cast<int>(turn % static_cast<std::size_t>(machines)), length};
    };
}

// ---------------------------------------------------------------------------

EnumerableProtocol::EnumerableProtocol(int machines, std::vector<int> alphabet, int max_depth,
                                       std::map<BitString, ProtocolNode> nodes)
    : machines_(machines),
      alphabet_(std::move(alphabet)),
      max_depth_(max_depth),
      nodes_(std::move(nodes)) {
    if (machines_ < 1) throw PreconditionError("EnumerableProtocol: need at least one machine");
    if (alphabet_.size() != static_cast<std::size_t>(machines_)) {
        throw PreconditionError("EnumerableProtocol: one alphabet size per machine");
    }
    for (int a : alphabet_) {
        if (a < 1) throw PreconditionError("EnumerableProtocol: alphabet sizes must be >= 1");
    }
    if (max_depth_ < 0) throw PreconditionError("EnumerableProtocol: negative depth");
    for (const auto& [prefix, node] : nodes_) {
        if (prefix.find_first_not_of("01") != BitString::npos) {
            throw PreconditionError("EnumerableProtocol: prefixes must be binary");
        }
        if (static_cast<int>(prefix.size()) >= max_depth_) {
            throw PreconditionError("EnumerableProtocol: node deeper than max_depth");
        }
        if (!prefix.empty() && !nodes_.contains(prefix.substr(0, prefix.size() - 1))) {
            throw PreconditionError("EnumerableProtocol: schedule is not prefix-closed");
        }
        if (node.speaker < 0 || node.speaker >= machines_) {
            throw PreconditionError("EnumerableProtocol: speaker out of range");
        }
        if (node.p_one.size() != static_cast<std::size_t>(alphabet_[static_cast<std::size_t>(node.speaker)])) {
            throw PreconditionError("EnumerableProtocol: message law does not cover the alphabet");
        }
        for (double q : node.p_one) {
            if (!(q >= 0.0 && q <= 1.0)) {
                throw PreconditionError("EnumerableProtocol: message probabilities must be in [0, 1]");
            }
        }
    }
    if (nodes_.empty()) {
        leaves_.push_back(BitString{});
    } else {
        for (const auto& [prefix, node] : nodes_) {
            for (char c : {'0', '1'}) {
                BitString child = prefix + c;
                if (!nodes_.contains(child)) leaves_.push_back(std::move(child));
            }
        }
        std::sort(leaves_.begin(), leaves_.end());
    }
}

const ProtocolNode* EnumerableProtocol::node(const BitString& prefix) const {
    auto it = nodes_.find(prefix);
    return it == nodes_.end() ? nullptr : &it->second;
}

double EnumerableProtocol::path_probability(const BitString& leaf, std::span<const int> inputs) const {
    double prob = 1.0;
    BitString prefix;
    for (char bit : leaf) {
        const ProtocolNode* n = node(prefix);
        if (n == nullptr) return 0.0;
        const double q = n->p_one[static_cast<std::size_t>(inputs[static_cast<std::size_t>(n->speaker)])];
        prob *= bit == '1' ? q : 1.0 - q;
        prefix.push_back(bit);
    }
    return node(prefix) == nullptr ? prob : 0.0;
}

double EnumerableProtocol::machine_factor(const BitString& leaf, int machine, int symbol) const {
    double prob = 1.0;
    BitString prefix;
    for (char bit : leaf) {
        const ProtocolNode* n = node(prefix);
        if (n == nullptr) return 0.0;
        if (n->speaker == machine) {
            const double q = n->p_one[static_cast<std::size_t>(symbol)];
            prob *= bit == '1' ? q : 1.0 - q;
        }
        prefix.push_back(bit);
    }
    return prob;
}

nlohmann::json EnumerableProtocol::to_json() const {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& [prefix, node] : nodes_) {
        nodes.push_back({{"prefix", prefix}, {"speaker", node.speaker}, {"p_one", node.p_one}});
    }
    return {{"machines", machines_},
            {"alphabet", alphabet_},
            {"max_depth", max_depth_},
            {"nodes", std::move(nodes)}};
}

EnumerableProtocol EnumerableProtocol::from_json(const nlohmann::json& j) {
    std::map<BitString, ProtocolNode> nodes;
    for (const auto& n : j.at("nodes")) {
        nodes[n.at("prefix").get<std::string>()] =
            ProtocolNode{n.at("speaker").get<int>(), n.at("p_one").get<std::vector<double>>()};
    }
    return EnumerableProtocol(j.at("machines").get<int>(), j.at("alphabet").get<std::vector<int>>(),
                              j.at("max_depth").get<int>(), std::move(nodes));
}

// ---------------------------------------------------------------------------

std::vector<info::DiscreteDistribution> InputLaws::product(std::span<const int> b) const {
    if (b.size() != mu0.size() || mu0.size() != mu1.size()) {
        throw PreconditionError("InputLaws: label length does not match machine count");
    }
    std::vector<info::DiscreteDistribution> out;
    out.reserve(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) out.push_back(b[i] ? mu1[i] : mu0[i]);
    return out;
}

InputLaws identical_laws(int machines, const info::DiscreteDistribution& mu0,
                         const info::DiscreteDistribution& mu1) {
    InputLaws laws;
    laws.mu0.assign(static_cast<std::size_t>(machines), mu0);
    laws.mu1.assign(static_cast<std::size_t>(machines), mu1);
    return laws;
}

double TranscriptDistribution::prob(const BitString& t) const {
    auto it = entries.find(t);
    return it == entries.end() ? 0.0 : it->second;
}

std::vector<double> TranscriptDistribution::aligned(const EnumerableProtocol& p) const {
    std::vector<double> out;
    out.reserve(p.leaves().size());
    for (const auto& leaf : p.leaves()) out.push_back(prob(leaf));
    return out;
}

TranscriptDistribution transcript_distribution(const EnumerableProtocol& p,
                                               std::span<const info::DiscreteDistribution> laws) {
    std::vector<double> probs(p.leaves().size(), 0.0);
    enumerate_joint(p, laws, [&](std::span<const int>, std::size_t leaf, double w) { probs[leaf] += w; });
    TranscriptDistribution out;
    for (std::size_t k = 0; k < probs.size(); ++k) out.entries[p.leaves()[k]] = probs[k];
    return out;
}

TranscriptDistribution transcript_distribution(const EnumerableProtocol& p, const InputLaws& laws,
                                               std::span<const int> b) {
    auto out = transcript_distribution(p, laws.product(b));
    out.input_vector_label.assign(b.begin(), b.end());
    return out;
}

TranscriptDistribution factorized_transcript_distribution(const EnumerableProtocol& p,
                                                          const InputLaws& laws,
                                                          std::span<const int> b) {
    const auto marginals = laws.product(b);
    check_laws(p, marginals);
    TranscriptDistribution out;
    out.input_vector_label.assign(b.begin(), b.end());
    for (const auto& leaf : p.leaves()) {
        double prob = 1.0;
        for (int i = 0; i < p.machines(); ++i) {
            const auto& law = marginals[static_cast<std::size_t>(i)];
            double q = 0.0;
            for (int x = 0; x < p.alphabet()[static_cast<std::size_t>(i)]; ++x) {
                q += law[static_cast<std::size_t>(x)] * p.machine_factor(leaf, i, x);
            }
            prob *= q;
        }
        out.entries[leaf] = prob;
    }
    return out;
}

double factorization_deviation(const EnumerableProtocol& p) {
    check_budget(p);
    double worst = 0.0;
    for_each_tuple(p.alphabet(), [&](std::span<const int> x) {
        for (const auto& leaf : p.leaves()) {
            double prod = 1.0;
            for (int i = 0; i < p.machines(); ++i) prod *= p.machine_factor(leaf, i, x[static_cast<std::size_t>(i)]);
            worst = std::max(worst, std::abs(p.path_probability(leaf, x) - prod));
        }
    });
    return worst;
}

double cut_paste_check(const EnumerableProtocol& p, const InputLaws& laws, std::span<const int> a,
                       std::span<const int> b, std::span<const int> c, std::span<const int> d) {
    const auto m = static_cast<std::size_t>(p.machines());
    if (a.size() != m || b.size() != m || c.size() != m || d.size() != m) {
        throw PreconditionError("cut_paste_check: vectors must have one entry per machine");
    }
    for (std::size_t i = 0; i < m; ++i) {
        const bool same = (std::min(a[i], b[i]) == std::min(c[i], d[i])) &&
                          (std::max(a[i], b[i]) == std::max(c[i], d[i]));
        if (!same) throw PreconditionError("cut_paste_check: {a_i, b_i} != {c_i, d_i}");
    }
    const auto pa = transcript_distribution(p, laws, a).aligned(p);
    const auto pb = transcript_distribution(p, laws, b).aligned(p);
    const auto pc = transcript_distribution(p, laws, c).aligned(p);
    const auto pd = transcript_distribution(p, laws, d).aligned(p);
    double worst = 0.0;
    for (std::size_t k = 0; k < pa.size(); ++k) {
        worst = std::max(worst, std::abs(pa[k] * pb[k] - pc[k] * pd[k]));
    }
    return worst;
}

double cut_paste_sweep(const EnumerableProtocol& p, const InputLaws& laws) {
    const int m = p.machines();
    const std::size_t cube = std::size_t{1} << m;
    auto bits_of = [m](std::size_t v) {
        std::vector<int> out(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) out[static_cast<std::size_t>(i)] = static_cast<int>((v >> i) & 1U);
        return out;
    };
    std::vector<std::vector<double>> dist(cube);
    for (std::size_t v = 0; v < cube; ++v) dist[v] = transcript_distribution(p, laws, bits_of(v)).aligned(p);

    double worst = 0.0;
    for (std::size_t a = 0; a < cube; ++a) {
        for (std::size_t b = 0; b < cube; ++b) {
            const std::size_t diff = a ^ b;
            // Each subset of the differing coordinates is swapped between a and b.
            for (std::size_t swap = diff;; swap = (swap - 1) & diff) {
                const std::size_t c = a ^ swap;
                const std::size_t d = b ^ swap;
                for (std::size_t k = 0; k < dist[a].size(); ++k) {
                    worst = std::max(worst,
                                     std::abs(dist[a][k] * dist[b][k] - dist[c][k] * dist[d][k]));
                }
                if (swap == 0) break;
            }
        }
    }
    return worst;
}

double conditional_mutual_info_input(const EnumerableProtocol& p,
                                     std::span<const info::DiscreteDistribution> laws, int machine) {
    if (machine < 0 || machine >= p.machines()) {
        throw PreconditionError("conditional_mutual_info_input: machine index out of range");
    }
    const auto rows = static_cast<std::size_t>(p.alphabet()[static_cast<std::size_t>(machine)]);
    const std::size_t cols = p.leaves().size();
    info::JointDistribution joint;
    joint.rows.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) joint.rows[r] = std::to_string(r);
    joint.cols = p.leaves();
    joint.probs.assign(rows * cols, 0.0);
    enumerate_joint(p, laws, [&](std::span<const int> x, std::size_t leaf, double w) {
        joint.probs[static_cast<std::size_t>(x[static_cast<std::size_t>(machine)]) * cols + leaf] += w;
    });
    return info::mutual_information(joint);
}

double mutual_info_all_inputs(const EnumerableProtocol& p,
                              std::span<const info::DiscreteDistribution> laws) {
    const std::size_t rows = tuple_count(p.alphabet());
    const std::size_t cols = p.leaves().size();
    info::JointDistribution joint;
    joint.rows.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) joint.rows[r] = std::to_string(r);
    joint.cols = p.leaves();
    joint.probs.assign(rows * cols, 0.0);
    enumerate_joint(p, laws, [&](std::span<const int> x, std::size_t leaf, double w) {
        std::size_t row = 0;
        for (std::size_t i = x.size(); i-- > 0;) {
            row = row * static_cast<std::size_t>(p.alphabet()[i]) + static_cast<std::size_t>(x[i]);
        }
        joint.probs[row * cols + leaf] += w;
    });
    return info::mutual_information(joint);
}

HellingerReport hellinger_decomposition_report(const EnumerableProtocol& p, const InputLaws& laws) {
    const int m = p.machines();
    const auto zero = transcript_distribution(p, laws, unit_vector(m, -1)).aligned(p);
    const auto one =
        transcript_distribution(p, laws, std::vector<int>(static_cast<std::size_t>(m), 1)).aligned(p);
    HellingerReport rep;
    for (int i = 0; i < m; ++i) {
        const auto ei = transcript_distribution(p, laws, unit_vector(m, i)).aligned(p);
        rep.per_machine.push_back(info::raw::hellinger_sq(zero, ei));
    }
    rep.end_to_end = info::raw::hellinger_sq(zero, one);
    const double sum = std::accumulate(rep.per_machine.begin(), rep.per_machine.end(), 0.0);
    if (rep.end_to_end < 1e-15) {
        rep.ratio_infinite = true;
        rep.ratio = std::numeric_limits<double>::infinity();
    } else {
        rep.ratio = sum / rep.end_to_end;
    }
    return rep;
}

double lemma32_check(const EnumerableProtocol& p, const InputLaws& laws, double c, double beta,
                     int machine) {
    const int m = p.machines();
    const auto zero_laws = laws.product(unit_vector(m, -1));
    const double info_bits =
        info::nats_to_bits(conditional_mutual_info_input(p, zero_laws, machine));
    const auto zero = transcript_distribution(p, zero_laws).aligned(p);
    const auto ei = transcript_distribution(p, laws, unit_vector(m, machine)).aligned(p);
    return (c + 1.0) * beta / 2.0 * info_bits - info::raw::hellinger_sq(ei, zero);
}

EnumerableProtocol random_enumerable_protocol(int machines, int max_depth, RngStream& rng,
                                              int alphabet_size) {
    if (machines < 1 || machines > 5) throw PreconditionError("random_enumerable_protocol: m in [1, 5]");
    if (max_depth < 0 || max_depth > 8) {
        throw PreconditionError("random_enumerable_protocol: depth in [0, 8]");
    }
    std::vector<int> alphabet(static_cast<std::size_t>(machines), alphabet_size);
    std::map<BitString, ProtocolNode> nodes;
    std::vector<BitString> frontier;
    if (max_depth > 0) frontier.push_back(BitString{});
    while (!frontier.empty()) {
        BitString prefix = std::move(frontier.back());
        frontier.pop_back();
        ProtocolNode node;
        node.speaker = static_cast<int>(rng.uniform_index(static_cast<std::size_t>(machines)));
        node.p_one.resize(static_cast<std::size_t>(alphabet_size));
        for (double& q : node.p_one) q = rng.uniform();
        for (char c : {'0', '1'}) {
            BitString child = prefix + c;
            if (static_cast<int>(child.size()) < max_depth && rng.uniform() < 0.75) {
                frontier.push_back(std::move(child));
            }
        }
        nodes.emplace(std::move(prefix), std::move(node));
    }
    return EnumerableProtocol(machines, std::move(alphabet), max_depth, std::move(nodes));
}

InputLaws random_input_laws(const EnumerableProtocol& p, RngStream& rng) {
    InputLaws laws;
    for (int a : p.alphabet()) {
        for (auto* target : {&laws.mu0, &laws.mu1}) {
            std::vector<double> w(static_cast<std::size_t>(a));
            for (double& v : w) v = 0.05 + rng.uniform();
            target->push_back(info::DiscreteDistribution::normalized(std::move(w)));
        }
    }
    return laws;
}

}  // namespace distest::protocol
