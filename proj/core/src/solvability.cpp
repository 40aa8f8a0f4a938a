#include "omlab/solvability.hpp"

#include <algorithm>
#include <cstdint>
#include <map>

#include "omlab/error.hpp"

namespace omlab {

std::string_view to_string(Problem p) {
    return p == Problem::broadcast ? "broadcast" : "consensus";
}

std::string_view to_string(Answer a) {
    switch (a) {
    case Answer::solvable:
        return "solvable";
    case Answer::unsolvable:
        return "unsolvable";
    case Answer::necessary_condition_holds:
        return "necessary-condition-holds";
    }
    return "unsolvable";
}

std::string_view to_string(Rule r) {
    switch (r) {
    case Rule::common_source:
        return "common-source";
    case Rule::source_incompatible:
        return "source-incompatible";
    case Rule::no_source:
        return "no-source-event";
    case Rule::broadcast_reduction:
        return "broadcast-reduction";
    case Rule::convex_broadcast:
        return "convex-equivalence";
    case Rule::beta_class_blocked:
        return "beta-class-not-broadcastable";
    case Rule::beta_classes_clear:
        return "beta-classes-broadcastable";
    }
    return "";
}

NodeSet common_sources(const EventFamily& family) {
    NodeSet common = family.base().all_nodes();
    for (const Event& e : family.events()) {
        common &= sources(e);
    }
    return common;
}

namespace {

constexpr std::size_t subset_search_limit = 5'000'000;

bool next_combination(std::vector<std::size_t>& idx, std::size_t n) {
    const std::size_t k = idx.size();
    for (std::size_t i = k; i-- > 0;) {
        if (idx[i] < n - k + i) {
            ++idx[i];
            for (std::size_t j = i + 1; j < k; ++j) {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    return false;
}

} // namespace

IncompatibilityWitness minimal_incompatible_subset(const EventFamily& family) {
    // Lowest event index for every distinct source set.
    std::map<std::uint64_t, std::size_t> first_with;
    for (std::size_t i = 0; i < family.size(); ++i) {
        NodeSet b = sources(family.event(i));
        if (b.empty()) {
            throw InvalidInput("event '" + family.name(i) + "' has no source");
        }
        first_with.emplace(b.bits(), i);
    }
    std::vector<std::pair<std::size_t, NodeSet>> distinct;
    for (auto [bits, i] : first_with) {
        distinct.emplace_back(i, NodeSet(bits));
    }
    std::sort(distinct.begin(), distinct.end(), [](auto a, auto b) { return a.first < b.first; });
    const std::size_t n = distinct.size();

    auto make = [&](const std::vector<std::size_t>& idx) {
        IncompatibilityWitness w;
        for (std::size_t i : idx) {
            w.events.push_back(distinct[i].first);
            w.sources.push_back(distinct[i].second);
        }
        return w;
    };

    std::size_t work = 0;
    for (std::size_t k = 2; k <= n && work < subset_search_limit; ++k) {
        std::vector<std::size_t> idx(k);
        for (std::size_t i = 0; i < k; ++i) {
            idx[i] = i;
        }
        do {
            NodeSet common = distinct[idx[0]].second;
            for (std::size_t i = 1; i < k && !common.empty(); ++i) {
                common &= distinct[idx[i]].second;
            }
            if (common.empty()) {
                return make(idx);
            }
        } while (++work < subset_search_limit && next_combination(idx, n));
    }

    // Search budget spent: shrink the full set greedily to an inclusion-minimal one.
    std::vector<std::size_t> keep(n);
    for (std::size_t i = 0; i < n; ++i) {
        keep[i] = i;
    }
    auto intersect = [&](const std::vector<std::size_t>& idx) {
        NodeSet common = NodeSet::all(family.base().node_count());
        for (std::size_t i : idx) {
            common &= distinct[i].second;
        }
        return common;
    };
    if (!intersect(keep).empty()) {
        throw InvalidInput("family has a common source; no incompatible subset exists");
    }
    for (std::size_t pos = keep.size(); pos-- > 0;) {
        auto trial = keep;
        trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(pos));
        if (!trial.empty() && intersect(trial).empty()) {
            keep = std::move(trial);
        }
    }
    return make(keep);
}

std::optional<std::size_t> broadcast_rounds(const EventFamily& family, NodeId u, std::size_t node_cap) {
    const std::size_t n = family.base().node_count();
    if (u >= n) {
        throw InvalidInput("originator " + std::to_string(u) + " out of range");
    }
    if (n > node_cap) {
        throw BudgetExceeded("broadcast game over " + std::to_string(n) + " nodes exceeds the cap of " +
                             std::to_string(node_cap));
    }
    if (family.empty()) {
        throw InvalidInput("broadcast game over an empty family");
    }
    const NodeSet everyone = NodeSet::all(n);
    constexpr std::int32_t unknown = -2;
    constexpr std::int32_t unbounded = -1;
    std::vector<std::int32_t> memo(std::size_t{1} << n, unknown);

    // value(S) = 0 if S = V, else 1 + max over events of value(S + heads out of S);
    // an event that adds nothing lets the adversary stall forever.
    auto value = [&](auto&& self, NodeSet informed) -> std::int32_t {
        if (informed == everyone) {
            return 0;
        }
        std::int32_t& slot = memo[informed.bits()];
        if (slot != unknown) {
            return slot;
        }
        std::int32_t worst = 0;
        for (const Event& e : family.events()) {
            NodeSet next = informed;
            informed.for_each([&](NodeId v) { next |= e.successors()[v]; });
            if (next == informed) {
                worst = unbounded;
                break;
            }
            std::int32_t sub = self(self, next);
            if (sub == unbounded) {
                worst = unbounded;
                break;
            }
            worst = std::max(worst, sub + 1);
        }
        slot = worst;
        return worst;
    };
    std::int32_t v = value(value, NodeSet::single(u));
    if (v == unbounded) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(v);
}

std::optional<BroadcastOptimum> optimal_broadcast_rounds(const EventFamily& family, std::size_t node_cap) {
    const NodeSet common = common_sources(family);
    std::optional<BroadcastOptimum> best;
    common.for_each([&](NodeId u) {
        auto r = broadcast_rounds(family, u, node_cap);
        if (!r) {
            return;
        }
        if (!best || *r < best->rounds) {
            best = BroadcastOptimum{u, *r, NodeSet::single(u)};
        } else if (*r == best->rounds) {
            best->optimal_originators.insert(u);
        }
    });
    return best;
}

namespace {

std::optional<std::size_t> first_sourceless(const EventFamily& family) {
    for (std::size_t i = 0; i < family.size(); ++i) {
        if (sources(family.event(i)).empty()) {
            return i;
        }
    }
    return std::nullopt;
}

} // namespace

Verdict check_broadcastable(const EventFamily& family, std::size_t node_cap) {
    if (family.empty()) {
        throw InvalidInput("broadcastability of an empty family is undefined");
    }
    Verdict v;
    v.problem = Problem::broadcast;
    if (auto bad = first_sourceless(family)) {
        v.answer = Answer::unsolvable;
        v.rule = Rule::no_source;
        v.sourceless_event = bad;
        return v;
    }
    v.common_sources = common_sources(family);
    if (v.common_sources.empty()) {
        v.answer = Answer::unsolvable;
        v.rule = Rule::source_incompatible;
        v.incompatible = minimal_incompatible_subset(family);
        return v;
    }
    v.answer = Answer::solvable;
    v.rule = Rule::common_source;
    v.originator = v.common_sources.first();
    if (family.base().node_count() <= node_cap) {
        auto best = optimal_broadcast_rounds(family, node_cap);
        if (best) {
            v.originator = best->originator;
            v.rounds = best->rounds;
        }
    }
    return v;
}

Verdict check_consensus(const EventFamily& family, std::size_t node_cap) {
    if (family.empty()) {
        throw InvalidInput("consensus on an empty family is undefined");
    }
    Verdict v;
    v.problem = Problem::consensus;
    const ConvexityResult convexity = is_convex(family);
    v.convex = convexity.convex;
    v.convexity_violation = convexity.violation;
    if (auto bad = first_sourceless(family)) {
        v.answer = Answer::unsolvable;
        v.rule = Rule::no_source;
        v.sourceless_event = bad;
        return v;
    }

    const Verdict broadcast = check_broadcastable(family, node_cap);
    v.common_sources = broadcast.common_sources;
    if (broadcast.answer == Answer::solvable) {
        v.answer = Answer::solvable;
        v.rule = convexity.convex ? Rule::convex_broadcast : Rule::broadcast_reduction;
        v.rounds = broadcast.rounds;
        v.originator = broadcast.originator;
        return v;
    }
    if (convexity.convex) {
        v.answer = Answer::unsolvable;
        v.rule = Rule::convex_broadcast;
        v.incompatible = broadcast.incompatible;
        return v;
    }

    BetaPartition beta = beta_partition(family);
    for (std::size_t c = 0; c < beta.classes.size(); ++c) {
        const auto& members = beta.classes[c];
        std::vector<Event> events;
        std::vector<std::string> names;
        for (std::size_t h : members) {
            events.push_back(family.event(h));
            names.push_back(family.name(h));
        }
        EventFamily sub(family.base_ptr(), std::move(events), std::move(names));
        Verdict cv = check_broadcastable(sub, node_cap);
        if (cv.answer != Answer::solvable) {
            v.answer = Answer::unsolvable;
            v.rule = Rule::beta_class_blocked;
            v.blocked_class = c;
            if (cv.incompatible) {
                IncompatibilityWitness w = *cv.incompatible;
                for (auto& e : w.events) {
                    e = members[e];
                }
                v.incompatible = std::move(w);
            }
            v.beta = std::move(beta);
            return v;
        }
    }
    v.answer = Answer::necessary_condition_holds;
    v.rule = Rule::beta_classes_clear;
    v.beta = std::move(beta);
    return v;
}

ThresholdTable connectivity_threshold_check(const GraphPtr& g, std::size_t f_max, std::size_t family_cap,
                                            std::size_t node_cap) {
    ThresholdTable table;
    table.connectivity = vertex_connectivity(*g);
    for (std::size_t f = 0; f <= f_max; ++f) {
        EventFamily family = generate_bounded_omissions(g, f, OmissionMetric::global, family_cap);
        Verdict v = check_consensus(family, node_cap);
        ThresholdRow row;
        row.f = f;
        row.family_size = family.size();
        row.answer = v.answer;
        row.predicted_solvable = f < table.connectivity;
        row.agrees = (v.answer == Answer::solvable) == row.predicted_solvable;
        table.rows.push_back(row);
    }
    return table;
}

} // namespace omlab
