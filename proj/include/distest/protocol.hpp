#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "distest/error.hpp"
#include "distest/infotheory.hpp"
#include "distest/numerics.hpp"

namespace distest::protocol {

using numerics::RngStream;

// ---------------------------------------------------------------------------
// Blackboard execution

struct Authorship {
    int machine = 0;
    std::size_t bit_index = 0;
};

/// Everything written on the blackboard, with the author of every bit.
struct BitTranscript {
    BitString bits;
    std::vector<Authorship> authorship;

    std::size_t length() const { return bits.size(); }
};

/// Next speaker and the exact number of bits it may write.
struct Slot {
    int machine = 0;
    std::size_t length = 1;
};

/// Who speaks next, as a function of the public transcript only. nullopt halts.
using Schedule = std::function<std::optional<Slot>(const BitTranscript&)>;

template <class Input>
struct Machine {
    int index = 0;
    std::function<BitString(const Input& own_input, const BitTranscript& so_far,
                            RngStream& private_rng, RngStream& public_rng)>
        behavior;
};

struct RunResult {
    BitTranscript transcript;
    std::size_t bit_count = 0;
};

inline constexpr std::uint64_t kPublicStream = 0x7075626cULL;

/// Runs a blackboard protocol. Each scheduled machine sees its own input, the
/// transcript so far, its private stream and the shared public stream
/// (rng.substream(kPublicStream)). A message whose length differs from the
/// slot is a write outside the schedule and raises ProtocolViolation.
template <class Input>
RunResult run_protocol(std::span<const Machine<Input>> machines, std::span<const Input> inputs,
                       const Schedule& schedule, RngStream& rng) {
    if (machines.size() != inputs.size()) {
        throw PreconditionError("run_protocol: need exactly one input per machine");
    }
    RngStream public_rng = rng.substream(kPublicStream);
    RunResult out;
    while (auto slot = schedule(out.transcript)) {
        if (slot->machine < 0 || static_cast<std::size_t>(slot->machine) >= machines.size()) {
            throw ProtocolViolation("run_protocol: schedule named an unknown machine");
        }
        const auto idx = static_cast<std::size_t>(slot->machine);
        BitString msg = machines[idx].behavior(inputs[idx], out.transcript, rng, public_rng);
        if (msg.size() != slot->length) {
            throw ProtocolViolation("run_protocol: machine " + std::to_string(idx) + " wrote " +
                                    std::to_string(msg.size()) + " bits into a slot of " +
                                    std::to_string(slot->length));
        }
        for (char c : msg) {
            if (c != '0' && c != '1') throw ProtocolViolation("run_protocol: non-binary message");
            out.transcript.authorship.push_back({slot->machine, out.transcript.bits.size()});
            out.transcript.bits.push_back(c);
        }
    }
    out.bit_count = out.transcript.bits.size();
    return out;
}

/// Schedule in which machines 0..m-1 each write `length` bits in order,
/// repeated `rounds` times.
Schedule round_robin_schedule(int machines, std::size_t length = 1, std::size_t rounds = 1);

// ---------------------------------------------------------------------------
// Exactly enumerable protocols

/// Internal node of the schedule trie: the speaker and, for every symbol of
/// the speaker's input alphabet, the probability of writing a 1.
struct ProtocolNode {
    int speaker = 0;
    std::vector<double> p_one;
};

class EnumerableProtocol {
public:
    EnumerableProtocol(int machines, std::vector<int> alphabet, int max_depth,
                       std::map<BitString, ProtocolNode> nodes);

    int machines() const { return machines_; }
    const std::vector<int>& alphabet() const { return alphabet_; }
    int max_depth() const { return max_depth_; }
    const std::map<BitString, ProtocolNode>& nodes() const { return nodes_; }

    /// nullptr when the prefix is a halted leaf.
    const ProtocolNode* node(const BitString& prefix) const;
    /// Halted leaves in lexicographic order.
    const std::vector<BitString>& leaves() const { return leaves_; }

    /// Pr[Pi = leaf | X = x], the product of the message probabilities on
    /// the path.
    double path_probability(const BitString& leaf, std::span<const int> inputs) const;
    /// p_{i,leaf}(x_i): the factor of the path product contributed by machine i.
    double machine_factor(const BitString& leaf, int machine, int symbol) const;

    nlohmann::json to_json() const;
    static EnumerableProtocol from_json(const nlohmann::json& j);

private:
    int machines_;
    std::vector<int> alphabet_;
    int max_depth_;
    std::map<BitString, ProtocolNode> nodes_;
    std::vector<BitString> leaves_;
};

/// Per-machine input laws mu_0 and mu_1 (on each machine's alphabet).
struct InputLaws {
    std::vector<info::DiscreteDistribution> mu0;
    std::vector<info::DiscreteDistribution> mu1;

    /// mu_b = mu_{b_1} x ... x mu_{b_m}, one marginal per machine.
    std::vector<info::DiscreteDistribution> product(std::span<const int> b) const;
};

/// Same (mu0, mu1) pair for all m machines.
InputLaws identical_laws(int machines, const info::DiscreteDistribution& mu0,
                         const info::DiscreteDistribution& mu1);

struct TranscriptDistribution {
    std::map<BitString, double> entries;
    std::vector<int> input_vector_label;

    double prob(const BitString& t) const;
    /// Probabilities aligned with the protocol's leaf order.
    std::vector<double> aligned(const EnumerableProtocol& p) const;
};

inline constexpr double kEnumerationBudget = 1e7;

/// Exact law of the transcript under the product input law, by summing path
/// products over every input tuple. BudgetExceeded above 1e7 leaf-tuples.
TranscriptDistribution transcript_distribution(const EnumerableProtocol& p,
                                               std::span<const info::DiscreteDistribution> laws);
TranscriptDistribution transcript_distribution(const EnumerableProtocol& p, const InputLaws& laws,
                                               std::span<const int> b);

/// Pi_b(pi) assembled from per-machine marginalized factors q_{i,pi}(b_i).
TranscriptDistribution factorized_transcript_distribution(const EnumerableProtocol& p,
                                                          const InputLaws& laws,
                                                          std::span<const int> b);

/// Max over leaves and input tuples of |path product - product of machine factors|.
double factorization_deviation(const EnumerableProtocol& p);

/// max_pi |Pi_a(pi) Pi_b(pi) - Pi_c(pi) Pi_d(pi)|. The vectors must satisfy
/// {a_i, b_i} = {c_i, d_i} as multisets, else PreconditionError.
double cut_paste_check(const EnumerableProtocol& p, const InputLaws& laws, std::span<const int> a,
                       std::span<const int> b, std::span<const int> c, std::span<const int> d);

/// Largest cut_paste_check value over every admissible (a, b, c, d).
double cut_paste_sweep(const EnumerableProtocol& p, const InputLaws& laws);

/// I(X_i; Pi) in nats under the product law `laws`.
double conditional_mutual_info_input(const EnumerableProtocol& p,
                                     std::span<const info::DiscreteDistribution> laws, int machine);
/// I(X; Pi) in nats for the full input vector.
double mutual_info_all_inputs(const EnumerableProtocol& p,
                              std::span<const info::DiscreteDistribution> laws);

struct HellingerReport {
    std::vector<double> per_machine;  // h^2(Pi_0, Pi_{e_i})
    double end_to_end = 0.0;          // h^2(Pi_0, Pi_1)
    double ratio = 0.0;               // sum(per_machine) / end_to_end
    bool ratio_infinite = false;      // end_to_end below 1e-15
};

HellingerReport hellinger_decomposition_report(const EnumerableProtocol& p, const InputLaws& laws);

/// ((c + 1) beta / 2) * I(X_i; Pi | V = 0) - h^2(Pi_{e_i}, Pi_0), with the
/// information measured in bits (the information/Hellinger lower bound is a
/// base-2 statement).
double lemma32_check(const EnumerableProtocol& p, const InputLaws& laws, double c, double beta,
                     int machine);

/// Random protocol with a prefix-closed schedule of depth at most max_depth.
/// Message probabilities are uniform on [0, 1].
EnumerableProtocol random_enumerable_protocol(int machines, int max_depth, RngStream& rng,
                                              int alphabet_size = 2);

/// Random (mu0, mu1) per machine with full support on the alphabet.
InputLaws random_input_laws(const EnumerableProtocol& p, RngStream& rng);

}  // namespace distest::protocol
