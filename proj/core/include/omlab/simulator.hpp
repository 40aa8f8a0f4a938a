#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "omlab/omission.hpp"

namespace omlab {

inline constexpr std::uint64_t default_run_budget = std::uint64_t{1} << 22;

struct Message {
    int value = 0;
    // Interned full-information view, for protocols that forward views.
    std::uint32_t view = 0;

    bool operator==(const Message&) const = default;
};

struct LocalState {
    int input = 0;
    // Originator's value, once it has arrived.
    std::optional<int> carried;
    std::uint32_t view = 0;
    std::optional<int> decision;

    bool operator==(const LocalState&) const = default;
};

// What a node finds on the link from one in-neighbour of the base graph.
struct Delivery {
    NodeId from = 0;
    std::optional<Message> message;  // empty when lost or not sent
};

/// A deterministic synchronous protocol. Each round every node sends to
/// each out-neighbour of the base graph, then updates its state from the
/// messages delivered by that round's event.
class Protocol {
public:
    virtual ~Protocol() = default;

    virtual std::string name() const = 0;
    // Throws InvalidInput when the protocol cannot run over `family`.
    virtual void check_compatible(const EventFamily& family) const;
    virtual LocalState initial(NodeId self, int input) const;
    virtual std::optional<Message> send(const LocalState& state, NodeId self, NodeId to,
                                        std::size_t round) const = 0;
    // `round` is 1-based; `inbox` has one entry per base in-neighbour.
    virtual LocalState receive(const LocalState& state, NodeId self, std::span<const Delivery> inbox,
                               std::size_t round) const = 0;
    virtual std::optional<int> decision(const LocalState& state) const { return state.decision; }
    // No sends or state changes after this round.
    virtual std::optional<std::size_t> halting_round() const { return std::nullopt; }
};

using ProtocolPtr = std::shared_ptr<const Protocol>;

struct SimulationTrace {
    Scenario scenario;
    InitialConfig init;
    // configurations[r] is the configuration at the end of round r; [0] is initial.
    std::vector<std::vector<LocalState>> configurations;
    // Arcs whose message was delivered in each round.
    std::vector<std::vector<Arc>> delivered;
    std::vector<std::optional<int>> decisions;
    std::vector<std::optional<std::size_t>> decision_rounds;
    // A node's decision changed after it was first made.
    bool decision_changed = false;

    std::size_t rounds() const { return delivered.size(); }
    const std::vector<LocalState>& final_configuration() const { return configurations.back(); }
};

SimulationTrace run(const Protocol& protocol, const EventFamily& family, const Scenario& scenario,
                    const InitialConfig& init);

// Nodes holding the originator's value.
NodeSet informed(std::span<const LocalState> configuration);

ProtocolPtr flooding(NodeId originator, std::size_t rounds);
// Floods the originator's input, then every node decides what it holds,
// falling back to its own input when nothing arrived.
ProtocolPtr broadcast_consensus(NodeId originator, std::size_t rounds);
// Send the input; decide the received value if any, otherwise the input.
ProtocolPtr one_round_exchange();
// Each node identifies the round-1 event from which in-neighbours reached
// it and decides the value of that event's designated originator.
ProtocolPtr event_detection_consensus(const EventFamily& family,
                                      const std::map<std::size_t, NodeId>& decision_map);

enum class ViolationKind { termination, validity, agreement, unstable_decision };

std::string_view to_string(ViolationKind k);

struct Violation {
    ViolationKind kind = ViolationKind::termination;
    Scenario scenario;
    InitialConfig init;
    std::string detail;
};

struct ConsensusReport {
    std::string protocol;
    std::size_t horizon = 0;
    std::size_t scenarios = 0;
    std::size_t inits = 0;
    std::size_t runs = 0;
    std::size_t failed_runs = 0;
    std::map<ViolationKind, std::size_t> counts;
    std::vector<Violation> examples;  // first few violations

    bool passed() const { return failed_runs == 0; }
};

// Checks termination, validity and agreement of one finished run.
std::vector<Violation> check_consensus_run(const SimulationTrace& trace);

/// Runs every scenario of length `horizon` against every binary initial
/// configuration. Throws BudgetExceeded when |R|^horizon * 2^|V| exceeds
/// `max_runs`.
ConsensusReport exhaustive_check(const Protocol& protocol, const EventFamily& family, std::size_t horizon,
                                 std::uint64_t max_runs = default_run_budget);

// Same as exhaustive_check over an explicit scenario list.
ConsensusReport check_scenarios(const Protocol& protocol, const EventFamily& family,
                                std::span<const Scenario> scenarios,
                                std::uint64_t max_runs = default_run_budget);

// All words of length `horizon` over the family, in lexicographic order.
std::vector<Scenario> all_scenarios(std::size_t family_size, std::size_t horizon,
                                    std::uint64_t max_words = default_run_budget);

} // namespace omlab
