#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>

#include "CLI11.hpp"

#include "omlab/bundled.hpp"
#include "omlab/error.hpp"
#include "omlab/io.hpp"

namespace omlab::cli {

namespace {

int verdict_exit(Answer a) {
    switch (a) {
    case Answer::solvable:
        return exit_ok;
    case Answer::unsolvable:
        return exit_unsolvable;
    case Answer::necessary_condition_holds:
        return exit_condition_only;
    }
    return exit_unsolvable;
}

void write_text(const std::string& text, const RunConfig& config, std::ostream& out) {
    if (config.out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(config.out_path);
    if (!f) {
        throw Error("cannot write " + config.out_path);
    }
    f << text;
}

void emit(const json& j, const RunConfig& config, std::ostream& out) {
    write_text(j.dump(2) + "\n", config, out);
}

void write_dot(const std::string& dot, const RunConfig& config) {
    if (config.dot_path.empty()) {
        return;
    }
    std::ofstream f(config.dot_path);
    if (!f) {
        throw Error("cannot write " + config.dot_path);
    }
    f << dot;
}

GraphPtr load_graph(const RunConfig& c) {
    int chosen = (!c.graph_path.empty() ? 1 : 0) + (c.hypercube ? 1 : 0) + (c.complete ? 1 : 0) +
                 (c.cycle ? 1 : 0);
    if (chosen > 1) {
        throw InvalidInput("choose one of --graph, --hypercube, --complete, --cycle");
    }
    if (c.hypercube) {
        return share(hypercube(*c.hypercube));
    }
    if (c.complete) {
        return share(complete_digraph(*c.complete));
    }
    if (c.cycle) {
        return share(cycle_graph(*c.cycle));
    }
    if (!c.graph_path.empty()) {
        std::ifstream in(c.graph_path);
        if (!in) {
            throw InvalidInput("cannot open " + c.graph_path);
        }
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            throw InvalidInput(std::string("malformed JSON: ") + e.what());
        }
        return share(digraph_from_json(j.contains("graph") ? j.at("graph") : j));
    }
    return nullptr;
}

EventFamily load(const RunConfig& c) {
    int sources = (!c.family_path.empty() ? 1 : 0) + (!c.bundled.empty() ? 1 : 0);
    if (sources > 1) {
        throw InvalidInput("choose one of --family and --bundled");
    }
    if (!c.family_path.empty()) {
        return load_family(c.family_path);
    }
    if (!c.bundled.empty()) {
        return bundled_family(c.bundled);
    }
    GraphPtr g = load_graph(c);
    if (!g) {
        throw InvalidInput("no family given: use --family, --bundled, or a graph with --bounded");
    }
    auto metric = parse_metric(c.metric);
    if (!metric) {
        throw InvalidInput("unknown metric '" + c.metric + "' (global, send, recv)");
    }
    return generate_bounded_omissions(g, c.bounded.value_or(0), *metric, c.budget.family_size);
}

NodeId resolve_node(const Digraph& g, const std::string& label) {
    auto v = g.find(label);
    if (!v) {
        throw InvalidInput("unknown node '" + label + "'");
    }
    return *v;
}

int cmd_check(const RunConfig& c, std::ostream& out) {
    EventFamily family = load(c);
    Verdict v;
    if (c.problem == "broadcast") {
        v = check_broadcastable(family, c.budget.game_nodes);
    } else if (c.problem == "consensus") {
        v = check_consensus(family, c.budget.game_nodes);
    } else {
        throw InvalidInput("unknown problem '" + c.problem + "'");
    }
    if (c.format == Format::text) {
        write_text(describe(v, family), c, out);
    } else if (c.format == Format::dot) {
        write_text(verdict_dot(v, family), c, out);
    } else {
        emit(to_json(v, family), c, out);
    }
    write_dot(verdict_dot(v, family), c);
    return verdict_exit(v.answer);
}

int cmd_gen(const RunConfig& c, std::ostream& out) {
    if (c.bundled == "crash-C1") {
        CrashPrefixes crash = bundled_crash_scheme(c.max_horizon);
        json j = to_json(crash.family);
        j["horizon"] = c.max_horizon;
        j["scenarios"] = json::array();
        for (const Scenario& s : crash.prefixes) {
            j["scenarios"].push_back(format_scenario(s, crash.family));
        }
        emit(j, c, out);
        return exit_ok;
    }
    EventFamily family = load(c);
    if (c.format == Format::dot) {
        std::string dot;
        for (std::size_t i = 0; i < family.size(); ++i) {
            dot += to_dot(family.event(i), family.name(i));
        }
        write_text(dot, c, out);
    } else {
        emit(to_json(family), c, out);
    }
    return exit_ok;
}

std::map<std::size_t, NodeId> one_round_originators(const EventFamily& family) {
    std::map<std::size_t, NodeId> map;
    const std::size_t n = family.base().node_count();
    for (std::size_t e = 0; e < family.size(); ++e) {
        for (NodeId o = 0; o < n; ++o) {
            bool reaches = true;
            for (NodeId v = 0; v < n && reaches; ++v) {
                reaches = v == o || family.event(e).delivered_to(v).contains(o);
            }
            if (reaches) {
                map[e] = o;
                break;
            }
        }
        if (map.count(e) == 0) {
            throw InvalidInput("no node reaches every other node in one round of '" + family.name(e) + "'");
        }
    }
    return map;
}

ProtocolPtr make_protocol(const RunConfig& c, const EventFamily& family) {
    const std::string& p = c.protocol;
    if (p == "h-one-round" || p == "one-round-exchange") {
        return one_round_exchange();
    }
    if (p == "event-detection") {
        return event_detection_consensus(family, one_round_originators(family));
    }
    if (p == "flooding" || p == "broadcast-consensus") {
        NodeId u = 0;
        std::size_t rounds = c.rounds.value_or(family.base().node_count());
        if (!c.originator.empty()) {
            u = resolve_node(family.base(), c.originator);
        } else if (auto best = optimal_broadcast_rounds(family, c.budget.game_nodes)) {
            u = best->originator;
            rounds = c.rounds.value_or(best->rounds);
        }
        return p == "flooding" ? flooding(u, rounds) : broadcast_consensus(u, rounds);
    }
    if (p == "oracle") {
        OracleResult r = min_consensus_rounds(family, c.max_horizon, c.budget.executions);
        if (!r.protocol) {
            throw InvalidInput("the oracle found no protocol up to horizon " + std::to_string(c.max_horizon));
        }
        return r.protocol;
    }
    throw InvalidInput("unknown protocol '" + p +
                       "' (flooding, broadcast-consensus, h-one-round, event-detection, oracle)");
}

int cmd_simulate(const RunConfig& c, std::ostream& out) {
    if (c.protocol.empty()) {
        throw InvalidInput("simulate needs --protocol");
    }
    std::optional<CrashPrefixes> crash;
    EventFamily family = [&] {
        if (c.bundled == "crash-C1") {
            crash = bundled_crash_scheme(c.all_scenarios.value_or(c.random_scenario.value_or(1)));
            return crash->family;
        }
        return load(c);
    }();
    ProtocolPtr protocol = make_protocol(c, family);

    if (c.all_scenarios) {
        ConsensusReport report = crash ? check_scenarios(*protocol, family, crash->prefixes, c.budget.runs)
                                       : exhaustive_check(*protocol, family, *c.all_scenarios, c.budget.runs);
        emit(to_json(report, family), c, out);
        return report.passed() ? exit_ok : exit_failed;
    }

    Scenario scenario;
    if (c.random_scenario) {
        if (crash) {
            throw InvalidInput("crash-C1 is not mobile; give --scenario or --all-scenarios");
        }
        ScenarioRecipe recipe;
        recipe.kind = ScenarioRecipe::Kind::seeded_random;
        recipe.seed = c.seed;
        scenario = expand(recipe, family.size(), *c.random_scenario);
    } else {
        scenario = parse_scenario(c.scenario, family);
    }
    if (crash) {
        auto allowed = bundled_crash_scheme(scenario.word.size()).prefixes;
        if (std::find(allowed.begin(), allowed.end(), scenario) == allowed.end()) {
            throw InvalidInput("scenario is not a prefix of the crash scheme");
        }
    }
    if (c.init.empty()) {
        throw InvalidInput("simulate needs --init (or --all-scenarios)");
    }
    InitialConfig init = parse_init(c.init, family.base());
    SimulationTrace trace = run(*protocol, family, scenario, init);
    json j = to_json(trace, family);
    j["protocol"] = protocol->name();
    auto violations = check_consensus_run(trace);
    json v = json::array();
    for (const auto& x : violations) {
        v.push_back({{"kind", to_string(x.kind)}, {"detail", x.detail}});
    }
    j["violations"] = v;
    emit(j, c, out);
    return exit_ok;
}

int cmd_oracle(const RunConfig& c, std::ostream& out) {
    EventFamily family = load(c);
    OracleResult r = min_consensus_rounds(family, c.max_horizon, c.budget.executions);
    json j = to_json(r, family);
    if (r.protocol) {
        ConsensusReport check = exhaustive_check(*r.protocol, family, *r.rounds, c.budget.runs);
        j["protocol_check"] = to_json(check, family);
    }
    if (r.witness) {
        j["witness_verified"] = verify_chain(*r.witness, family);
    }
    Verdict theory = check_consensus(family, c.budget.game_nodes);
    j["theory"] = {{"answer", to_string(theory.answer)}, {"rule", to_string(theory.rule)}};
    emit(j, c, out);
    return r.solvable() ? exit_ok : exit_unsolvable;
}

int cmd_audit(const RunConfig& c, std::ostream& out) {
    if (c.threshold) {
        GraphPtr g = load_graph(c);
        if (!g) {
            throw InvalidInput("--threshold needs a graph (--graph, --hypercube, --complete, --cycle)");
        }
        ThresholdTable t = connectivity_threshold_check(g, *c.threshold, c.budget.family_size, c.budget.game_nodes);
        emit(to_json(t), c, out);
        bool ok = std::all_of(t.rows.begin(), t.rows.end(), [](const ThresholdRow& r) { return r.agrees; });
        return ok ? exit_ok : exit_failed;
    }
    EventFamily family = load(c);
    AuditReport report = equal_rounds_audit(family, c.max_horizon, c.budget.executions);
    emit(to_json(report), c, out);
    return report.agrees ? exit_ok : exit_failed;
}

} // namespace

int execute(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        switch (config.command) {
        case Command::check:
            return cmd_check(config, out);
        case Command::gen:
            return cmd_gen(config, out);
        case Command::simulate:
            return cmd_simulate(config, out);
        case Command::oracle:
            return cmd_oracle(config, out);
        case Command::audit:
            return cmd_audit(config, out);
        }
    } catch (const BudgetExceeded& e) {
        err << "omlab: budget exceeded: " << e.what() << '\n';
        return exit_budget;
    } catch (const InvalidInput& e) {
        err << "omlab: " << e.what() << '\n';
        return exit_usage;
    } catch (const Error& e) {
        err << "omlab: " << e.what() << '\n';
        return exit_failed;
    }
    return exit_failed;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig config;
    try {
        config.budget = Budget::from_environment();
    } catch (const InvalidInput& e) {
        err << "omlab: OMLAB_BUDGET: " << e.what() << '\n';
        return exit_usage;
    }

    CLI::App app{"Consensus and broadcast solvability under mobile omission faults"};
    app.require_subcommand(1);

    auto add_family = [&](CLI::App* sub) {
        sub->add_option("--family", config.family_path, "Event family JSON file");
        sub->add_option("--bundled", config.bundled, "Bundled example family");
        sub->add_option("--graph", config.graph_path, "Base graph JSON file");
        sub->add_option("--hypercube", config.hypercube, "Base graph: hypercube of this dimension");
        sub->add_option("--complete", config.complete, "Base graph: complete digraph on n nodes");
        sub->add_option("--cycle", config.cycle, "Base graph: symmetric cycle on n nodes");
        sub->add_option("--bounded", config.bounded, "Allow at most f omissions per round");
        sub->add_option("--metric", config.metric, "How omissions are counted: global, send, recv");
        sub->add_option("--out", config.out_path, "Write the report here instead of stdout");
    };
    std::map<std::string, Format> formats{{"json", Format::json}, {"dot", Format::dot}, {"text", Format::text}};

    auto* check = app.add_subcommand("check", "Broadcast/consensus verdict with witness");
    add_family(check);
    check->add_option("--problem", config.problem, "consensus or broadcast");
    check->add_option("--format", config.format, "json, dot or text")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
    check->add_option("--emit-dot", config.dot_path, "Also write witness events as DOT");

    auto* gen = app.add_subcommand("gen", "Write a generated or bundled family as JSON");
    add_family(gen);
    gen->add_option("--max-horizon", config.max_horizon, "Scenario length for crash-C1");
    gen->add_option("--format", config.format, "json or dot")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));

    auto* simulate = app.add_subcommand("simulate", "Run a protocol under scenarios");
    add_family(simulate);
    simulate->add_option("--protocol", config.protocol, "Protocol name")->required();
    simulate->add_option("--originator", config.originator, "Originator for flooding protocols");
    simulate->add_option("--rounds", config.rounds, "Rounds for flooding protocols");
    simulate->add_option("--scenario", config.scenario, "Comma-separated event names");
    simulate->add_option("--init", config.init, "Initial values, e.g. a=0,b=1");
    simulate->add_option("--all-scenarios", config.all_scenarios,
                         "Check every scenario of this length against every input");
    simulate->add_option("--random-scenario", config.random_scenario, "Random scenario of this length");
    simulate->add_option("--seed", config.seed, "Seed for --random-scenario");
    simulate->add_option("--max-horizon", config.max_horizon, "Horizon for --protocol oracle");

    auto* oracle = app.add_subcommand("oracle", "Brute-force minimum consensus rounds");
    add_family(oracle);
    oracle->add_option("--max-horizon", config.max_horizon, "Largest horizon to try");

    auto* audit = app.add_subcommand("audit", "Compare consensus and broadcast rounds");
    add_family(audit);
    audit->add_option("--max-horizon", config.max_horizon, "Horizon for non-broadcastable families");
    audit->add_option("--threshold", config.threshold, "Sweep f = 0..F against the connectivity bound");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return exit_ok;
        }
        err << "omlab: " << e.what() << '\n';
        return exit_usage;
    }

    if (check->parsed()) {
        config.command = Command::check;
    } else if (gen->parsed()) {
        config.command = Command::gen;
    } else if (simulate->parsed()) {
        config.command = Command::simulate;
    } else if (oracle->parsed()) {
        config.command = Command::oracle;
    } else {
        config.command = Command::audit;
    }
    return execute(config, out, err);
}

} // namespace omlab::cli
