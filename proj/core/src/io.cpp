#include "omlab/io.hpp"

#include <fstream>
#include <sstream>

#include "omlab/error.hpp"

namespace omlab {

namespace {

json node_list(const Digraph& g, NodeSet s) {
    json out = json::array();
    s.for_each([&](NodeId v) { out.push_back(g.label(v)); });
    return out;
}

json arc_list(const Digraph& g, const std::vector<Arc>& arcs) {
    json out = json::array();
    for (const Arc& a : arcs) {
        out.push_back({g.label(a.tail), g.label(a.head)});
    }
    return out;
}

NodeId node_from_json(const Digraph& g, const json& j) {
    if (!j.is_string()) {
        throw InvalidInput("node reference must be a string label");
    }
    auto v = g.find(j.get<std::string>());
    if (!v) {
        throw InvalidInput("unknown node '" + j.get<std::string>() + "'");
    }
    return *v;
}

std::vector<Arc> arcs_from_json(const Digraph& g, const json& j) {
    if (!j.is_array()) {
        throw InvalidInput("arcs must be an array of [tail, head] pairs");
    }
    std::vector<Arc> arcs;
    for (const json& a : j) {
        if (!a.is_array() || a.size() != 2) {
            throw InvalidInput("arc must be a [tail, head] pair");
        }
        arcs.push_back({node_from_json(g, a[0]), node_from_json(g, a[1])});
    }
    return arcs;
}

template <typename F>
auto guarded(F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("malformed JSON: ") + e.what());
    }
}

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') {
            out += '\\';
        }
        out += c;
    }
    return out;
}

int exit_code(Answer a) {
    switch (a) {
    case Answer::solvable:
        return 0;
    case Answer::unsolvable:
        return 2;
    case Answer::necessary_condition_holds:
        return 3;
    }
    return 2;
}

} // namespace

json to_json(const Digraph& g) {
    json nodes = json::array();
    for (NodeId v = 0; v < g.node_count(); ++v) {
        nodes.push_back(g.label(v));
    }
    return {{"nodes", nodes}, {"arcs", arc_list(g, {g.arcs().begin(), g.arcs().end()})}};
}

Digraph digraph_from_json(const json& j) {
    return guarded([&] {
        if (!j.is_object() || !j.contains("nodes") || !j.contains("arcs")) {
            throw InvalidInput("digraph needs \"nodes\" and \"arcs\"");
        }
        std::vector<std::string> labels;
        bool index_labels = true;
        for (const json& n : j.at("nodes")) {
            labels.push_back(n.get<std::string>());
            index_labels = index_labels && labels.back() == std::to_string(labels.size() - 1);
        }
        if (index_labels) {
            labels.clear();
        }
        const std::size_t n = j.at("nodes").size();
        Digraph nodes_only(n, {}, labels);
        return Digraph(n, arcs_from_json(nodes_only, j.at("arcs")), labels);
    });
}

json to_json(const EventFamily& family) {
    json events = json::array();
    for (std::size_t i = 0; i < family.size(); ++i) {
        events.push_back({{"name", family.name(i)}, {"arcs", arc_list(family.base(), family.event(i).arcs())}});
    }
    return {{"graph", to_json(family.base())}, {"events", events}};
}

EventFamily family_from_json(const json& j) {
    return guarded([&] {
        if (!j.is_object() || !j.contains("graph") || !j.contains("events")) {
            throw InvalidInput("event family needs \"graph\" and \"events\"");
        }
        const GraphPtr g = share(digraph_from_json(j.at("graph")));
        std::vector<Event> events;
        std::vector<std::string> names;
        for (const json& e : j.at("events")) {
            auto arcs = arcs_from_json(*g, e.at("arcs"));
            events.push_back(Event::from_arcs(g, arcs));
            names.push_back(e.contains("name") ? e.at("name").get<std::string>()
                                               : "E" + std::to_string(names.size()));
        }
        return EventFamily(g, std::move(events), std::move(names));
    });
}

EventFamily load_family(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidInput("cannot open " + path.string());
    }
    json j = guarded([&] { return json::parse(in); });
    return family_from_json(j);
}

void save_json(const json& j, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    out << j.dump(2) << '\n';
}

json to_json(const IncompatibilityWitness& w, const EventFamily& family) {
    json events = json::array();
    for (std::size_t i = 0; i < w.events.size(); ++i) {
        events.push_back({{"event", family.name(w.events[i])},
                          {"sources", node_list(family.base(), w.sources[i])}});
    }
    return {{"events", events}};
}

json to_json(const BetaPartition& beta, const EventFamily& family) {
    json classes = json::array();
    json chains = json::array();
    for (const auto& c : beta.classes) {
        json names = json::array();
        for (std::size_t h : c) {
            names.push_back(family.name(h));
        }
        classes.push_back(names);
        for (std::size_t k = 1; k < c.size(); ++k) {
            json steps = json::array();
            for (const AlphaWitness& w : beta.chain(c.front(), c[k])) {
                steps.push_back({family.name(w.left), family.name(w.right), family.name(w.witness)});
            }
            chains.push_back({{"from", family.name(c.front())}, {"to", family.name(c[k])}, {"steps", steps}});
        }
    }
    json sourceless = json::array();
    for (std::size_t h : beta.sourceless) {
        sourceless.push_back(family.name(h));
    }
    auto problem = check_closure(beta, family);
    json out = {{"classes", classes},
                {"chains", chains},
                {"iterations", beta.iterations},
                {"sourceless_events", sourceless},
                {"closure_verified", !problem.has_value()}};
    if (problem) {
        out["closure_problem"] = *problem;
    }
    if (!beta.sourceless.empty()) {
        out["note"] = "events without a source are never used as alpha witnesses";
    }
    return out;
}

json to_json(const Verdict& v, const EventFamily& family) {
    const Digraph& g = family.base();
    json out = {{"problem", to_string(v.problem)},
                {"answer", to_string(v.answer)},
                {"rule", to_string(v.rule)},
                {"exit_code", exit_code(v.answer)},
                {"family_size", family.size()},
                {"common_sources", node_list(g, v.common_sources)}};
    if (v.problem == Problem::consensus) {
        out["convex"] = v.convex;
    }
    if (v.convexity_violation) {
        const auto& cv = *v.convexity_violation;
        out["convexity_violation"] = {{"event", family.name(cv.event)},
                                      {"donor", family.name(cv.donor)},
                                      {"arc", {g.label(cv.arc.tail), g.label(cv.arc.head)}}};
    }
    if (v.sourceless_event) {
        out["sourceless_event"] = family.name(*v.sourceless_event);
    }
    if (v.incompatible) {
        out["incompatible"] = to_json(*v.incompatible, family);
    }
    if (v.blocked_class) {
        out["blocked_class"] = *v.blocked_class;
    }
    if (v.beta) {
        out["beta"] = to_json(*v.beta, family);
    }
    if (v.rounds) {
        out["rounds"] = *v.rounds;
    }
    if (v.originator) {
        out["originator"] = g.label(*v.originator);
    }
    return out;
}

json to_json(const SimulationTrace& trace, const EventFamily& family) {
    const Digraph& g = family.base();
    auto states = [&](const std::vector<LocalState>& config) {
        json out = json::array();
        for (NodeId v = 0; v < config.size(); ++v) {
            const LocalState& s = config[v];
            json item = {{"node", g.label(v)}, {"input", s.input}};
            item["carried"] = s.carried ? json(*s.carried) : json(nullptr);
            item["decision"] = s.decision ? json(*s.decision) : json(nullptr);
            out.push_back(item);
        }
        return out;
    };
    json scenario = json::array();
    for (std::size_t e : trace.scenario.word) {
        scenario.push_back(family.name(e));
    }
    json init = json::object();
    for (NodeId v = 0; v < trace.init.size(); ++v) {
        init[g.label(v)] = trace.init.value(v);
    }
    json rounds = json::array();
    for (std::size_t r = 0; r < trace.rounds(); ++r) {
        rounds.push_back({{"round", r + 1},
                          {"event", family.name(trace.scenario.word[r])},
                          {"delivered", arc_list(g, trace.delivered[r])},
                          {"states", states(trace.configurations[r + 1])}});
    }
    json decisions = json::object();
    for (NodeId v = 0; v < trace.decisions.size(); ++v) {
        if (trace.decisions[v]) {
            decisions[g.label(v)] = {{"value", *trace.decisions[v]}, {"round", *trace.decision_rounds[v]}};
        } else {
            decisions[g.label(v)] = nullptr;
        }
    }
    return {{"scenario", scenario},
            {"init", init},
            {"initial_states", states(trace.configurations.front())},
            {"rounds", rounds},
            {"decisions", decisions},
            {"decision_changed", trace.decision_changed}};
}

json to_json(const ConsensusReport& report, const EventFamily& family) {
    json counts = json::object();
    for (const auto& [kind, n] : report.counts) {
        counts[std::string(to_string(kind))] = n;
    }
    json examples = json::array();
    for (const Violation& v : report.examples) {
        examples.push_back({{"kind", to_string(v.kind)},
                            {"scenario", format_scenario(v.scenario, family)},
                            {"init", format_init(v.init, family.base())},
                            {"detail", v.detail}});
    }
    return {{"protocol", report.protocol},
            {"horizon", report.horizon},
            {"scenarios", report.scenarios},
            {"inits", report.inits},
            {"runs", report.runs},
            {"failed_runs", report.failed_runs},
            {"passed", report.passed()},
            {"violations", counts},
            {"examples", examples}};
}

json to_json(const IndistinguishabilityChain& chain, const EventFamily& family) {
    json executions = json::array();
    for (const Execution& e : chain.executions) {
        json word = json::array();
        for (std::size_t l : e.scenario.word) {
            word.push_back(family.name(l));
        }
        executions.push_back({{"init", format_init(e.init, family.base())}, {"scenario", word}});
    }
    json shared = json::array();
    for (NodeId v : chain.shared_node) {
        shared.push_back(family.base().label(v));
    }
    return {{"executions", executions}, {"shared_node", shared}};
}

IndistinguishabilityChain chain_from_json(const json& j, const EventFamily& family) {
    return guarded([&] {
        IndistinguishabilityChain chain;
        for (const json& e : j.at("executions")) {
            Execution ex;
            ex.init = parse_init(e.at("init").get<std::string>(), family.base());
            for (const json& name : e.at("scenario")) {
                auto idx = family.find(name.get<std::string>());
                if (!idx) {
                    throw InvalidInput("unknown event '" + name.get<std::string>() + "' in chain");
                }
                ex.scenario.word.push_back(*idx);
            }
            chain.executions.push_back(std::move(ex));
        }
        for (const json& v : j.at("shared_node")) {
            chain.shared_node.push_back(node_from_json(family.base(), v));
        }
        return chain;
    });
}

json to_json(const OracleResult& result, const EventFamily& family) {
    json horizons = json::array();
    for (const HorizonResult& h : result.horizons) {
        horizons.push_back({{"rounds", h.rounds},
                            {"executions", h.executions},
                            {"components", h.components},
                            {"solvable", h.solvable}});
    }
    json out = {{"max_horizon", result.max_horizon}, {"solvable", result.solvable()}, {"horizons", horizons}};
    if (result.rounds) {
        out["rounds"] = *result.rounds;
    }
    if (result.protocol) {
        json table = json::array();
        for (const auto& [view, value] : result.protocol->describe()) {
            table.push_back({{"view", view}, {"decision", value}});
        }
        out["protocol"] = {{"name", result.protocol->name()},
                           {"rounds", result.protocol->rounds()},
                           {"table", table}};
    }
    if (result.witness) {
        out["witness"] = to_json(*result.witness, family);
        out["note"] = "no deterministic protocol decides within " + std::to_string(result.max_horizon) +
                      " rounds; a finite family that admits consensus admits it within some uniform "
                      "bound, so this result says nothing beyond the horizon";
    }
    return out;
}

json to_json(const AuditReport& report) {
    json out = {{"horizon", report.horizon}, {"agrees", report.agrees}};
    out["broadcast_rounds"] = report.broadcast_rounds ? json(*report.broadcast_rounds) : json(nullptr);
    out["consensus_rounds"] = report.consensus_rounds ? json(*report.consensus_rounds) : json(nullptr);
    return out;
}

json to_json(const ThresholdTable& table) {
    json rows = json::array();
    for (const ThresholdRow& r : table.rows) {
        rows.push_back({{"f", r.f},
                        {"family_size", r.family_size},
                        {"answer", to_string(r.answer)},
                        {"predicted_solvable", r.predicted_solvable},
                        {"agrees", r.agrees}});
    }
    return {{"connectivity", table.connectivity}, {"rows", rows}};
}

std::string to_dot(const Digraph& g, const std::string& name, NodeSet highlight) {
    std::ostringstream out;
    out << "digraph \"" << dot_escape(name) << "\" {\n";
    for (NodeId v = 0; v < g.node_count(); ++v) {
        out << "  n" << v << " [label=\"" << dot_escape(g.label(v)) << "\"";
        if (highlight.contains(v)) {
            out << ", style=filled, fillcolor=lightblue";
        }
        out << "];\n";
    }
    for (const Arc& a : g.arcs()) {
        out << "  n" << a.tail << " -> n" << a.head << ";\n";
    }
    out << "}\n";
    return out.str();
}

std::string to_dot(const Event& e, const std::string& name) {
    return to_dot(e.as_digraph(), name, sources(e));
}

std::string alpha_graph_dot(const EventFamily& family, const BetaPartition& beta) {
    static const char* palette[] = {"lightblue", "lightpink", "palegreen", "khaki", "plum", "lightsalmon",
                                    "lightcyan", "wheat"};
    std::ostringstream out;
    out << "graph alpha {\n";
    for (std::size_t i = 0; i < family.size(); ++i) {
        out << "  e" << i << " [label=\"" << dot_escape(family.name(i)) << "\", style=filled, fillcolor="
            << palette[beta.class_of[i] % std::size(palette)] << "];\n";
    }
    for (const AlphaWitness& w : alpha_edges(family)) {
        out << "  e" << w.left << " -- e" << w.right << " [label=\"" << dot_escape(family.name(w.witness))
            << "\"];\n";
    }
    out << "}\n";
    return out.str();
}

std::string verdict_dot(const Verdict& v, const EventFamily& family) {
    std::vector<std::size_t> shown;
    if (v.sourceless_event) {
        shown.push_back(*v.sourceless_event);
    } else if (v.incompatible) {
        shown = v.incompatible->events;
    } else {
        for (std::size_t i = 0; i < family.size(); ++i) {
            shown.push_back(i);
        }
    }
    std::string out;
    for (std::size_t i : shown) {
        out += to_dot(family.event(i), family.name(i));
    }
    return out;
}

std::string describe(const Verdict& v, const EventFamily& family) {
    const Digraph& g = family.base();
    auto nodes = [&](NodeSet s) {
        std::string out = "{";
        bool first = true;
        s.for_each([&](NodeId x) {
            out += (first ? "" : ",") + g.label(x);
            first = false;
        });
        return out + "}";
    };
    std::ostringstream out;
    out << to_string(v.problem) << ": " << to_string(v.answer) << '\n';
    switch (v.rule) {
    case Rule::common_source:
        out << "  every event has the common sources " << nodes(v.common_sources)
            << "; flooding from one of them always completes\n";
        break;
    case Rule::source_incompatible:
        out << "  no node is a source of every event\n";
        break;
    case Rule::no_source:
        out << "  event " << family.name(*v.sourceless_event)
            << " has no source: under it repeated forever, two groups of nodes never hear from each other\n";
        break;
    case Rule::broadcast_reduction:
        out << "  broadcasting the input of a common source " << nodes(v.common_sources)
            << " and deciding it solves consensus\n";
        break;
    case Rule::convex_broadcast:
        out << "  the family is convex, so consensus is solvable exactly when broadcast is\n";
        break;
    case Rule::beta_class_blocked:
        out << "  beta class " << *v.blocked_class
            << " is not broadcastable, which rules out consensus\n";
        break;
    case Rule::beta_classes_clear:
        out << "  every beta class is broadcastable; this is necessary for consensus but not known "
               "to be sufficient\n";
        break;
    }
    if (v.incompatible) {
        out << "  source-incompatible events:";
        for (std::size_t i = 0; i < v.incompatible->events.size(); ++i) {
            out << ' ' << family.name(v.incompatible->events[i]) << nodes(v.incompatible->sources[i]);
        }
        out << '\n';
    }
    if (v.convexity_violation) {
        const auto& cv = *v.convexity_violation;
        out << "  not convex: " << family.name(cv.event) << " + " << g.label(cv.arc.tail) << "->"
            << g.label(cv.arc.head) << " (from " << family.name(cv.donor) << ") is not in the family\n";
    }
    if (v.beta) {
        out << "  beta classes: " << v.beta->classes.size() << '\n';
    }
    if (v.rounds) {
        out << "  optimal broadcast: " << *v.rounds << " rounds from " << g.label(*v.originator) << '\n';
    }
    return out.str();
}

} // namespace omlab
