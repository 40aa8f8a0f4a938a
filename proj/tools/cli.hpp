#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "omlab/budget.hpp"

namespace omlab::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_failed = 1;
inline constexpr int exit_unsolvable = 2;
inline constexpr int exit_condition_only = 3;
inline constexpr int exit_usage = 64;
inline constexpr int exit_budget = 65;

enum class Command { check, simulate, oracle, gen, audit };
enum class Format { json, dot, text };

struct RunConfig {
    Command command = Command::check;

    // Family source: a file, a bundled name, or a generator.
    std::string family_path;
    std::string bundled;
    std::string graph_path;
    std::optional<std::size_t> hypercube;
    std::optional<std::size_t> complete;
    std::optional<std::size_t> cycle;
    std::optional<std::size_t> bounded;
    std::string metric = "global";

    std::string problem = "consensus";
    std::string protocol;
    std::string originator;
    std::optional<std::size_t> rounds;
    std::string scenario;
    std::string init;
    std::optional<std::size_t> all_scenarios;
    std::optional<std::size_t> random_scenario;
    std::uint64_t seed = 0;

    std::size_t max_horizon = 3;
    std::optional<std::size_t> threshold;

    Format format = Format::json;
    std::string out_path;
    std::string dot_path;
    Budget budget;
};

// Parses argv and runs the command; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

int execute(const RunConfig& config, std::ostream& out, std::ostream& err);

} // namespace omlab::cli
