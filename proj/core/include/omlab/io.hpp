#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "omlab/equivalence.hpp"
#include "omlab/oracle.hpp"
#include "omlab/simulator.hpp"
#include "omlab/solvability.hpp"

namespace omlab {

using json = nlohmann::json;

// {"nodes": ["a", ...], "arcs": [["a", "b"], ...]}
json to_json(const Digraph& g);
Digraph digraph_from_json(const json& j);

// {"graph": <digraph>, "events": [{"name": "H1", "arcs": [...]}, ...]}
json to_json(const EventFamily& family);
EventFamily family_from_json(const json& j);

EventFamily load_family(const std::filesystem::path& path);
void save_json(const json& j, const std::filesystem::path& path);

json to_json(const IncompatibilityWitness& w, const EventFamily& family);
json to_json(const BetaPartition& beta, const EventFamily& family);
json to_json(const Verdict& v, const EventFamily& family);
json to_json(const SimulationTrace& trace, const EventFamily& family);
json to_json(const ConsensusReport& report, const EventFamily& family);
json to_json(const IndistinguishabilityChain& chain, const EventFamily& family);
IndistinguishabilityChain chain_from_json(const json& j, const EventFamily& family);
json to_json(const OracleResult& result, const EventFamily& family);
json to_json(const AuditReport& report);
json to_json(const ThresholdTable& table);

std::string to_dot(const Digraph& g, const std::string& name, NodeSet highlight = {});
std::string to_dot(const Event& e, const std::string& name);
// Alpha edges between events, events filled by beta class.
std::string alpha_graph_dot(const EventFamily& family, const BetaPartition& beta);
// The events a verdict's witness refers to, sources highlighted.
std::string verdict_dot(const Verdict& v, const EventFamily& family);

// Multi-line human-readable verdict citing the rule applied.
std::string describe(const Verdict& v, const EventFamily& family);

} // namespace omlab
