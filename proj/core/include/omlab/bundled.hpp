#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "omlab/omission.hpp"

namespace omlab {

// Complete digraph on nodes W (white) and B (black).
GraphPtr two_node_graph();

// OK, OMIT_W (W's message lost) and OMIT_B (B's message lost).
Event two_node_event(std::string_view name);

/// Named example families:
///   reliable-2node  {OK}
///   O1-2node        {OK, OMIT_W, OMIT_B}, at most one omission per round
///   H-2node         {OMIT_W, OMIT_B}, at most one message gets through
///   fig12           {H1, H2} on nodes a, b, c, d
EventFamily bundled_family(std::string_view name);
std::vector<std::string> bundled_names();

// Crash scheme on the two-node graph: simulation-only prefixes.
CrashPrefixes bundled_crash_scheme(std::size_t horizon);

// The four-node events H1 and H2 over the union of their arcs.
EventFamily fig12_family();

} // namespace omlab
