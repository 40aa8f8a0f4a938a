#include "omlab/simulator.hpp"

#include <algorithm>

#include "omlab/error.hpp"

namespace omlab {

void Protocol::check_compatible(const EventFamily&) const {}

LocalState Protocol::initial(NodeId, int input) const {
    LocalState s;
    s.input = input;
    return s;
}

SimulationTrace run(const Protocol& protocol, const EventFamily& family, const Scenario& scenario,
                    const InitialConfig& init) {
    const Digraph& g = family.base();
    const std::size_t n = g.node_count();
    validate(scenario, family);
    if (init.size() != n) {
        throw InvalidInput("initial configuration covers " + std::to_string(init.size()) +
                           " nodes, graph has " + std::to_string(n));
    }
    protocol.check_compatible(family);

    SimulationTrace trace;
    trace.scenario = scenario;
    trace.init = init;
    trace.decisions.assign(n, std::nullopt);
    trace.decision_rounds.assign(n, std::nullopt);

    std::vector<LocalState> states;
    states.reserve(n);
    for (NodeId v = 0; v < n; ++v) {
        states.push_back(protocol.initial(v, init.value(v)));
    }
    auto record_decisions = [&](std::size_t round) {
        for (NodeId v = 0; v < n; ++v) {
            std::optional<int> d = protocol.decision(states[v]);
            if (trace.decisions[v]) {
                if (d != trace.decisions[v]) {
                    trace.decision_changed = true;
                }
            } else if (d) {
                trace.decisions[v] = d;
                trace.decision_rounds[v] = round;
            }
        }
    };
    record_decisions(0);
    trace.configurations.push_back(states);

    const auto halt = protocol.halting_round();
    std::vector<std::vector<Delivery>> inbox(n);
    for (std::size_t round = 1; round <= scenario.size(); ++round) {
        std::vector<Arc> delivered;
        if (!halt || round <= *halt) {
            const Event& event = family.event(scenario.word[round - 1]);
            for (NodeId v = 0; v < n; ++v) {
                inbox[v].clear();
                const NodeSet present = event.delivered_to(v);
                g.in_neighbors(v).for_each([&](NodeId u) {
                    std::optional<Message> m = protocol.send(states[u], u, v, round);
                    if (!present.contains(u)) {
                        m.reset();
                    }
                    if (m) {
                        delivered.push_back({u, v});
                    }
                    inbox[v].push_back({u, m});
                });
            }
            std::vector<LocalState> next;
            next.reserve(n);
            for (NodeId v = 0; v < n; ++v) {
                next.push_back(protocol.receive(states[v], v, inbox[v], round));
            }
            states = std::move(next);
        }
        std::sort(delivered.begin(), delivered.end());
        trace.delivered.push_back(std::move(delivered));
        record_decisions(round);
        trace.configurations.push_back(states);
    }
    return trace;
}

NodeSet informed(std::span<const LocalState> configuration) {
    NodeSet s;
    for (std::size_t v = 0; v < configuration.size(); ++v) {
        if (configuration[v].carried) {
            s.insert(static_cast<NodeId>(v));
        }
    }
    return s;
}

namespace {

void require_node(const EventFamily& family, NodeId v, const std::string& who) {
    if (v >= family.base().node_count()) {
        throw InvalidInput(who + " references unknown node " + std::to_string(v));
    }
}

class Flooding : public Protocol {
public:
    Flooding(NodeId originator, std::size_t rounds, bool decide)
        : originator_(originator), rounds_(rounds), decide_(decide) {}

    std::string name() const override {
        return std::string(decide_ ? "broadcast-consensus" : "flooding") + "(" +
               std::to_string(originator_) + "," + std::to_string(rounds_) + ")";
    }

    void check_compatible(const EventFamily& family) const override {
        require_node(family, originator_, name());
    }

    LocalState initial(NodeId self, int input) const override {
        LocalState s;
        s.input = input;
        if (self == originator_) {
            s.carried = input;
        }
        if (decide_ && rounds_ == 0) {
            s.decision = s.carried.value_or(input);
        }
        return s;
    }

    std::optional<Message> send(const LocalState& state, NodeId, NodeId, std::size_t) const override {
        if (!state.carried) {
            return std::nullopt;
        }
        return Message{*state.carried, 0};
    }

    LocalState receive(const LocalState& state, NodeId, std::span<const Delivery> inbox,
                       std::size_t round) const override {
        LocalState s = state;
        if (!s.carried) {
            for (const Delivery& d : inbox) {
                if (d.message) {
                    s.carried = d.message->value;
                    break;
                }
            }
        }
        if (decide_ && round == rounds_ && !s.decision) {
            s.decision = s.carried.value_or(s.input);
        }
        return s;
    }

    std::optional<std::size_t> halting_round() const override { return rounds_; }

private:
    NodeId originator_;
    std::size_t rounds_;
    bool decide_;
};

class OneRoundExchange : public Protocol {
public:
    std::string name() const override { return "one-round-exchange"; }

    std::optional<Message> send(const LocalState& state, NodeId, NodeId, std::size_t) const override {
        return Message{state.input, 0};
    }

    LocalState receive(const LocalState& state, NodeId, std::span<const Delivery> inbox,
                       std::size_t round) const override {
        LocalState s = state;
        if (round == 1) {
            s.decision = s.input;
            for (const Delivery& d : inbox) {
                if (d.message) {
                    s.decision = d.message->value;
                    break;
                }
            }
        }
        return s;
    }

    std::optional<std::size_t> halting_round() const override { return 1; }
};

class EventDetection : public Protocol {
public:
    EventDetection(const EventFamily& family, const std::map<std::size_t, NodeId>& decision_map)
        : base_(family.base_ptr()) {
        const std::size_t n = family.base().node_count();
        for (const auto& [event, originator] : decision_map) {
            if (event >= family.size()) {
                throw InvalidInput("decision map names an event outside the family");
            }
            require_node(family, originator, "decision map");
        }
        for (std::size_t e = 0; e < family.size(); ++e) {
            auto it = decision_map.find(e);
            if (it == decision_map.end()) {
                throw InvalidInput("decision map has no originator for event '" + family.name(e) + "'");
            }
            const NodeId o = it->second;
            const Event& ev = family.event(e);
            for (NodeId v = 0; v < n; ++v) {
                if (v != o && !ev.delivered_to(v).contains(o)) {
                    throw InvalidInput("originator " + family.base().label(o) + " does not reach " +
                                       family.base().label(v) + " in one round of '" + family.name(e) + "'");
                }
            }
        }
        for (std::size_t e = 0; e < family.size(); ++e) {
            originator_of_.push_back(decision_map.at(e));
        }
        patterns_.assign(n, {});
        for (NodeId v = 0; v < n; ++v) {
            for (std::size_t e = 0; e < family.size(); ++e) {
                const std::uint64_t pattern = family.event(e).delivered_to(v).bits();
                auto [it, fresh] = patterns_[v].emplace(pattern, e);
                if (!fresh) {
                    throw InvalidInput("node " + family.base().label(v) + " cannot tell '" +
                                       family.name(it->second) + "' from '" + family.name(e) + "'");
                }
            }
        }
    }

    std::string name() const override { return "event-detection"; }

    void check_compatible(const EventFamily& family) const override {
        if (!(family.base() == *base_)) {
            throw InvalidInput("event-detection protocol was built for a different graph");
        }
    }

    std::optional<Message> send(const LocalState& state, NodeId, NodeId, std::size_t) const override {
        return Message{state.input, 0};
    }

    LocalState receive(const LocalState& state, NodeId self, std::span<const Delivery> inbox,
                       std::size_t round) const override {
        LocalState s = state;
        if (round != 1) {
            return s;
        }
        NodeSet heard;
        for (const Delivery& d : inbox) {
            if (d.message) {
                heard.insert(d.from);
            }
        }
        auto it = patterns_[self].find(heard.bits());
        if (it == patterns_[self].end()) {
            return s;  // not an event of the family: stay undecided
        }
        const NodeId originator = originator_of_.at(it->second);
        if (originator == self) {
            s.decision = s.input;
            return s;
        }
        for (const Delivery& d : inbox) {
            if (d.from == originator && d.message) {
                s.decision = d.message->value;
            }
        }
        return s;
    }

    std::optional<std::size_t> halting_round() const override { return 1; }

private:
    GraphPtr base_;
    // Per node: delivered in-neighbour pattern -> event.
    std::vector<std::map<std::uint64_t, std::size_t>> patterns_;
    std::vector<NodeId> originator_of_;
};

std::uint64_t checked_power(std::uint64_t base, std::size_t exp, std::uint64_t limit) {
    std::uint64_t r = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        if (base != 0 && r > limit / base) {
            return limit + 1;
        }
        r *= base;
    }
    return r;
}

} // namespace

ProtocolPtr flooding(NodeId originator, std::size_t rounds) {
    return std::make_shared<Flooding>(originator, rounds, false);
}

ProtocolPtr broadcast_consensus(NodeId originator, std::size_t rounds) {
    return std::make_shared<Flooding>(originator, rounds, true);
}

ProtocolPtr one_round_exchange() {
    return std::make_shared<OneRoundExchange>();
}

ProtocolPtr event_detection_consensus(const EventFamily& family,
                                      const std::map<std::size_t, NodeId>& decision_map) {
    return std::make_shared<EventDetection>(family, decision_map);
}

std::string_view to_string(ViolationKind k) {
    switch (k) {
    case ViolationKind::termination:
        return "termination";
    case ViolationKind::validity:
        return "validity";
    case ViolationKind::agreement:
        return "agreement";
    case ViolationKind::unstable_decision:
        return "unstable-decision";
    }
    return "";
}

std::vector<Violation> check_consensus_run(const SimulationTrace& trace) {
    std::vector<Violation> out;
    auto add = [&](ViolationKind k, std::string detail) {
        out.push_back({k, trace.scenario, trace.init, std::move(detail)});
    };
    if (trace.decision_changed) {
        add(ViolationKind::unstable_decision, "a node changed its decision");
    }
    std::optional<int> seen;
    bool disagree = false;
    for (std::size_t v = 0; v < trace.decisions.size(); ++v) {
        const auto& d = trace.decisions[v];
        if (!d) {
            add(ViolationKind::termination, "node " + std::to_string(v) + " did not decide");
            continue;
        }
        if (seen && *seen != *d) {
            disagree = true;
        }
        seen = seen.value_or(*d);
    }
    if (disagree) {
        add(ViolationKind::agreement, "nodes decided different values");
    }
    if (auto u = trace.init.uniform_value()) {
        for (std::size_t v = 0; v < trace.decisions.size(); ++v) {
            if (trace.decisions[v] && *trace.decisions[v] != *u) {
                add(ViolationKind::validity,
                    "node " + std::to_string(v) + " decided " + std::to_string(*trace.decisions[v]) +
                        " on uniform input " + std::to_string(*u));
                break;
            }
        }
    }
    return out;
}

std::vector<Scenario> all_scenarios(std::size_t family_size, std::size_t horizon, std::uint64_t max_words) {
    const std::uint64_t count = checked_power(family_size, horizon, max_words);
    if (count > max_words) {
        throw BudgetExceeded("enumerating all scenarios of length " + std::to_string(horizon) +
                             " exceeds the budget of " + std::to_string(max_words));
    }
    std::vector<Scenario> out;
    out.reserve(count);
    std::vector<std::size_t> word(horizon, 0);
    for (std::uint64_t i = 0; i < count; ++i) {
        out.push_back(Scenario{word, std::nullopt});
        for (std::size_t pos = horizon; pos-- > 0;) {
            if (++word[pos] < family_size) {
                break;
            }
            word[pos] = 0;
        }
    }
    return out;
}

ConsensusReport check_scenarios(const Protocol& protocol, const EventFamily& family,
                                std::span<const Scenario> scenarios, std::uint64_t max_runs) {
    const std::size_t n = family.base().node_count();
    const std::uint64_t inits = checked_power(2, n, max_runs);
    if (inits > max_runs || (scenarios.size() != 0 && scenarios.size() > max_runs / inits)) {
        throw BudgetExceeded("exhaustive check exceeds the run budget of " + std::to_string(max_runs));
    }
    constexpr std::size_t kept_examples = 8;
    ConsensusReport report;
    report.protocol = protocol.name();
    report.horizon = scenarios.empty() ? 0 : scenarios.front().size();
    report.scenarios = scenarios.size();
    report.inits = static_cast<std::size_t>(inits);
    for (const Scenario& s : scenarios) {
        for (std::uint64_t bits = 0; bits < inits; ++bits) {
            SimulationTrace trace = run(protocol, family, s, InitialConfig::from_bits(n, bits));
            ++report.runs;
            auto violations = check_consensus_run(trace);
            if (violations.empty()) {
                continue;
            }
            ++report.failed_runs;
            for (auto& v : violations) {
                ++report.counts[v.kind];
                if (report.examples.size() < kept_examples) {
                    report.examples.push_back(std::move(v));
                }
            }
        }
    }
    return report;
}

ConsensusReport exhaustive_check(const Protocol& protocol, const EventFamily& family, std::size_t horizon,
                                 std::uint64_t max_runs) {
    const std::uint64_t inits = checked_power(2, family.base().node_count(), max_runs);
    if (inits > max_runs) {
        throw BudgetExceeded("exhaustive check exceeds the run budget of " + std::to_string(max_runs));
    }
    auto scenarios = all_scenarios(family.size(), horizon, max_runs / inits);
    ConsensusReport report = check_scenarios(protocol, family, scenarios, max_runs);
    report.horizon = horizon;
    return report;
}

} // namespace omlab
