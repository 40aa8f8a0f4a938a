#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "omlab/simulator.hpp"

namespace omlab {

inline constexpr std::uint64_t default_execution_budget = std::uint64_t{1} << 21;

/// Hash-consed full-information views. A depth-0 view is (node, input);
/// a depth-t view is (node, own view at t-1, and for each in-neighbour
/// whose message arrived, that neighbour's view at t-1). Ids are dense and
/// assigned in first-seen order; equal views get equal ids.
class ViewTable {
public:
    using Id = std::uint32_t;

    Id initial(NodeId node, int input);
    // `heard` lists (in-neighbour, its previous view), sorted by neighbour.
    Id extend(NodeId node, Id own, std::span<const std::pair<NodeId, Id>> heard);
    std::optional<Id> find_initial(NodeId node, int input) const;

    std::size_t size() const { return offsets_.size(); }
    NodeId node_of(Id id) const { return arena_[offsets_[id] + 1]; }
    std::size_t depth_of(Id id) const;
    // Nested text form, e.g. "a[0]" or "b(b[1]|a:a[0])".
    std::string describe(Id id, const Digraph& g) const;

private:
    Id intern(std::span<const std::uint32_t> key);
    std::span<const std::uint32_t> key_of(Id id) const;

    std::vector<std::uint32_t> arena_;
    std::vector<std::size_t> offsets_;
    std::vector<std::uint32_t> lengths_;
    std::vector<Id> slots_;  // open addressing, id+1, 0 = empty
    std::vector<std::uint32_t> scratch_;
};

/// One execution: an initial configuration run under a scenario word.
struct Execution {
    InitialConfig init;
    Scenario scenario;

    bool operator==(const Execution&) const = default;
};

/// Executions linked pairwise by a node whose views coincide, from an
/// all-0 input to an all-1 input.
struct IndistinguishabilityChain {
    std::vector<Execution> executions;
    // shared_node[i] cannot tell executions[i] and executions[i+1] apart.
    std::vector<NodeId> shared_node;
};

/// Decision-table protocol over full-information views: after `rounds`
/// rounds each node looks its view up and decides the stored value.
class DecisionTableProtocol : public Protocol {
public:
    DecisionTableProtocol(GraphPtr base, std::size_t rounds, ViewTable views,
                          std::unordered_map<ViewTable::Id, int> decisions);

    std::string name() const override;
    void check_compatible(const EventFamily& family) const override;
    LocalState initial(NodeId self, int input) const override;
    std::optional<Message> send(const LocalState& state, NodeId self, NodeId to,
                                std::size_t round) const override;
    LocalState receive(const LocalState& state, NodeId self, std::span<const Delivery> inbox,
                       std::size_t round) const override;
    std::optional<std::size_t> halting_round() const override { return rounds_; }

    std::size_t rounds() const { return rounds_; }
    std::size_t table_size() const { return decisions_.size(); }
    // Decision table as (view text, value), sorted by view text.
    std::vector<std::pair<std::string, int>> describe() const;

private:
    GraphPtr base_;
    std::size_t rounds_;
    mutable std::mutex mutex_;
    mutable ViewTable views_;
    std::unordered_map<ViewTable::Id, int> decisions_;
};

struct HorizonResult {
    std::size_t rounds = 0;
    std::uint64_t executions = 0;
    std::size_t components = 0;
    bool solvable = false;
};

struct OracleResult {
    // Smallest horizon with a consensus protocol, if any up to max_horizon.
    std::optional<std::size_t> rounds;
    std::shared_ptr<const DecisionTableProtocol> protocol;
    // Set when no horizon up to max_horizon works; chain for max_horizon.
    std::optional<IndistinguishabilityChain> witness;
    std::size_t max_horizon = 0;
    std::vector<HorizonResult> horizons;

    bool solvable() const { return rounds.has_value(); }
};

/// Decides, for r = 0..max_horizon, whether some deterministic protocol
/// solves consensus in r rounds over every scenario of the family: link
/// executions in which some node has the same depth-r view; r works iff no
/// linked component contains both an all-0 and an all-1 input.
OracleResult min_consensus_rounds(const EventFamily& family, std::size_t max_horizon,
                                  std::uint64_t max_executions = default_execution_budget);

// Recomputes both executions of every link and checks the shared views and
// the uniform endpoints, without using ViewTable.
bool verify_chain(const IndistinguishabilityChain& chain, const EventFamily& family);

struct AuditReport {
    std::optional<std::size_t> broadcast_rounds;
    std::optional<std::size_t> consensus_rounds;
    std::size_t horizon = 0;
    bool agrees = false;
};

/// Compares the oracle's minimum consensus rounds with the optimal
/// adversarial broadcast time on a convex family. For non-broadcastable
/// families the oracle is run up to `fallback_horizon` and must find no
/// protocol. Throws InvalidInput on non-convex input.
AuditReport equal_rounds_audit(const EventFamily& family, std::size_t fallback_horizon,
                               std::uint64_t max_executions = default_execution_budget);

} // namespace omlab
