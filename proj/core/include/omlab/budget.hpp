#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

#include "omlab/oracle.hpp"
#include "omlab/simulator.hpp"
#include "omlab/solvability.hpp"

namespace omlab {

// State-space caps shared by the enumerating operations.
struct Budget {
    std::size_t family_size = default_family_cap;
    std::size_t game_nodes = default_game_node_cap;
    std::uint64_t executions = default_execution_budget;
    std::uint64_t runs = default_run_budget;

    /// Overrides from text such as "executions=1e6,family=5000". Keys are
    /// family, nodes, executions and runs; a bare number sets every cap
    /// except nodes. Throws InvalidInput on malformed text.
    static Budget parse(std::string_view text, const Budget& base);
    static Budget parse(std::string_view text) { return parse(text, Budget{}); }
    // Defaults overridden by $OMLAB_BUDGET when it is set.
    static Budget from_environment();
};

} // namespace omlab
