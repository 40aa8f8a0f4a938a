#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "omlab/digraph.hpp"

namespace omlab {

// Subset of the base graph's arcs, indexed by position in Digraph::arcs().
using ArcMask = std::uint64_t;

inline constexpr std::size_t max_base_arcs = 64;
inline constexpr std::size_t default_family_cap = std::size_t{1} << 20;

using GraphPtr = std::shared_ptr<const Digraph>;

GraphPtr share(Digraph g);

// Arcs of `base` whose head lies in `nodes`.
ArcMask head_mask(const Digraph& base, NodeSet nodes);

/// A communication event: the spanning sub-digraph of the base graph whose
/// arcs deliver their messages in one round.
class Event {
public:
    Event(GraphPtr base, ArcMask present);

    static Event full(GraphPtr base);
    // Throws InvalidInput when an arc is not an arc of `base`.
    static Event from_arcs(GraphPtr base, std::span<const Arc> arcs);

    const Digraph& base() const { return *base_; }
    const GraphPtr& base_ptr() const { return base_; }
    ArcMask mask() const { return mask_; }
    std::size_t node_count() const { return base_->node_count(); }
    std::size_t arc_count() const;

    std::vector<Arc> arcs() const;
    bool contains(Arc a) const;
    Event with_arc(std::size_t base_arc_index) const { return Event(base_, mask_ | (ArcMask{1} << base_arc_index)); }

    // Out-neighbours of each node along present arcs.
    std::span<const NodeSet> successors() const { return succ_; }
    // In-neighbours of `v` whose message to `v` is delivered.
    NodeSet delivered_to(NodeId v) const { return pred_.at(v); }

    Digraph as_digraph() const;

    bool operator==(const Event& o) const { return mask_ == o.mask_ && *base_ == *o.base_; }

private:
    GraphPtr base_;
    ArcMask mask_ = 0;
    std::vector<NodeSet> succ_;
    std::vector<NodeSet> pred_;
};

NodeSet sources(const Event& e);
NodeSet reachable_from(const Event& e, NodeId u);

/// A finite set R of events over a common base graph, defining the mobile
/// scheme R^omega. Order is preserved; duplicates are rejected.
class EventFamily {
public:
    EventFamily(GraphPtr base, std::vector<Event> events, std::vector<std::string> names = {});

    const Digraph& base() const { return *base_; }
    const GraphPtr& base_ptr() const { return base_; }
    std::size_t size() const { return events_.size(); }
    bool empty() const { return events_.empty(); }
    const std::vector<Event>& events() const { return events_; }
    const Event& event(std::size_t i) const { return events_.at(i); }
    const std::string& name(std::size_t i) const { return names_.at(i); }
    const std::vector<std::string>& names() const { return names_; }

    std::optional<std::size_t> find(std::string_view name) const;
    std::optional<std::size_t> index_of(ArcMask mask) const;
    bool contains(ArcMask mask) const { return index_of(mask).has_value(); }

    bool operator==(const EventFamily& o) const;

private:
    GraphPtr base_;
    std::vector<Event> events_;
    std::vector<std::string> names_;
    std::vector<std::pair<ArcMask, std::size_t>> sorted_;
};

struct ScenarioRecipe {
    enum class Kind { constant, round_robin, seeded_random, eventually_constant };

    Kind kind = Kind::constant;
    // Event repeated by `constant`, and the tail event of `eventually_constant`.
    std::size_t event = 0;
    // Finite head of an `eventually_constant` scenario.
    std::vector<std::size_t> prefix;
    std::uint64_t seed = 0;
};

/// Finite prefix of an omission scenario: letter r (0-based) is the index
/// of the event governing round r+1.
struct Scenario {
    std::vector<std::size_t> word;
    std::optional<ScenarioRecipe> generator;

    std::size_t size() const { return word.size(); }
    bool operator==(const Scenario& o) const { return word == o.word; }
};

// Prefix of length `length` of the infinite scenario described by `recipe`.
Scenario expand(const ScenarioRecipe& recipe, std::size_t family_size, std::size_t length);

void validate(const Scenario& s, const EventFamily& family);

Scenario subword(const Scenario& w, std::span<const std::size_t> positions);

// Parses a comma-separated list of event names.
Scenario parse_scenario(std::string_view text, const EventFamily& family);
std::string format_scenario(const Scenario& s, const EventFamily& family);

/// Binary initial value per node.
class InitialConfig {
public:
    InitialConfig() = default;
    explicit InitialConfig(std::vector<int> values);

    static InitialConfig from_bits(std::size_t n, std::uint64_t ones);
    static InitialConfig uniform(std::size_t n, int value);

    std::size_t size() const { return values_.size(); }
    int value(NodeId v) const { return values_.at(v); }
    const std::vector<int>& values() const { return values_; }
    NodeSet ones() const;
    // The common value when every node starts with the same one.
    std::optional<int> uniform_value() const;

    bool operator==(const InitialConfig&) const = default;

private:
    std::vector<int> values_;
};

// Parses "a=0,b=1,..."; every node must be assigned exactly once.
InitialConfig parse_init(std::string_view text, const Digraph& g);
std::string format_init(const InitialConfig& init, const Digraph& g);

struct ConvexityViolation {
    std::size_t event = 0;   // H
    std::size_t donor = 0;   // H', which holds the arc
    Arc arc;                 // a in H' with H + a outside the family
};

struct ConvexityResult {
    bool convex = true;
    std::optional<ConvexityViolation> violation;
};

ConvexityResult is_convex(const EventFamily& family);

enum class OmissionMetric { global, per_node_send, per_node_receive };

std::string_view to_string(OmissionMetric m);
std::optional<OmissionMetric> parse_metric(std::string_view text);

/// All events whose omitted arcs, counted under `metric`, number at most
/// `f`. The full graph comes first, then events by increasing omission
/// count. Throws BudgetExceeded when the family would exceed `cap`.
EventFamily generate_bounded_omissions(const GraphPtr& g, std::size_t f, OmissionMetric metric,
                                       std::size_t cap = default_family_cap);

// Smallest convex family containing `family`.
EventFamily convex_closure(const EventFamily& family, std::size_t cap = default_family_cap);

struct CrashPrefixes {
    EventFamily family;   // OK followed by one event per crashed node
    std::vector<Scenario> prefixes;
};

/// All length-`horizon` prefixes of the scheme in which at most one node
/// crashes: OK^omega, or OK^k followed forever by the event in which the
/// crashed node's messages are lost. Not a mobile scheme; simulation only.
CrashPrefixes crash_scheme_prefixes(const GraphPtr& g, std::size_t horizon);

} // namespace omlab
