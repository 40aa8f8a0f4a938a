#pragma once

#include <optional>
#include <string>
#include <vector>

#include "omlab/equivalence.hpp"
#include "omlab/omission.hpp"

namespace omlab {

inline constexpr std::size_t default_game_node_cap = 20;

enum class Problem { broadcast, consensus };
enum class Answer { solvable, unsolvable, necessary_condition_holds };

std::string_view to_string(Problem p);
std::string_view to_string(Answer a);

/// Events that each have a source but share none.
struct IncompatibilityWitness {
    std::vector<std::size_t> events;
    std::vector<NodeSet> sources;
};

// The rule a verdict rests on.
enum class Rule {
    common_source,        // broadcast: a node is a source of every event
    source_incompatible,  // broadcast: no common source
    no_source,            // an event has no source
    broadcast_reduction,  // consensus by broadcasting a common source's value
    convex_broadcast,     // consensus on a convex family follows broadcast
    beta_class_blocked,   // a beta class is not broadcastable
    beta_classes_clear,   // every beta class is broadcastable
};

std::string_view to_string(Rule r);

struct Verdict {
    Problem problem = Problem::broadcast;
    Answer answer = Answer::unsolvable;
    Rule rule = Rule::source_incompatible;

    // Populated according to `rule`.
    NodeSet common_sources;
    std::optional<std::size_t> sourceless_event;
    std::optional<IncompatibilityWitness> incompatible;
    std::optional<std::size_t> blocked_class;
    std::optional<BetaPartition> beta;
    bool convex = false;
    std::optional<ConvexityViolation> convexity_violation;

    // Optimal worst-case broadcast rounds when broadcastable.
    std::optional<std::size_t> rounds;
    std::optional<NodeId> originator;
};

// Intersection of the source sets of all events.
NodeSet common_sources(const EventFamily& family);

/// Smallest source-incompatible subset, searched by increasing size over
/// distinct source sets. Requires every event to have a source and the
/// family to have no common source.
IncompatibilityWitness minimal_incompatible_subset(const EventFamily& family);

Verdict check_broadcastable(const EventFamily& family,
                            std::size_t node_cap = default_game_node_cap);
Verdict check_consensus(const EventFamily& family,
                        std::size_t node_cap = default_game_node_cap);

/// Worst-case number of rounds for flooding from `u` to inform every node
/// when an adversary picks each round's event from the family. nullopt
/// means the adversary can stall forever.
std::optional<std::size_t> broadcast_rounds(const EventFamily& family, NodeId u,
                                            std::size_t node_cap = default_game_node_cap);

struct BroadcastOptimum {
    NodeId originator = 0;
    std::size_t rounds = 0;
    // Every originator attaining the optimum.
    NodeSet optimal_originators;
};

std::optional<BroadcastOptimum> optimal_broadcast_rounds(const EventFamily& family,
                                                         std::size_t node_cap = default_game_node_cap);

struct ThresholdRow {
    std::size_t f = 0;
    std::size_t family_size = 0;
    Answer answer = Answer::unsolvable;
    bool predicted_solvable = false;  // f < c(G)
    bool agrees = false;
};

struct ThresholdTable {
    std::size_t connectivity = 0;
    std::vector<ThresholdRow> rows;
};

/// check_consensus on the global bounded-omission family for f = 0..f_max,
/// compared with the prediction f < c(G).
ThresholdTable connectivity_threshold_check(const GraphPtr& g, std::size_t f_max,
                                            std::size_t family_cap = default_family_cap,
                                            std::size_t node_cap = default_game_node_cap);

} // namespace omlab
