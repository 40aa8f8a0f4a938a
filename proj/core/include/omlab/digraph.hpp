#pragma once

#include <compare>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "omlab/node_set.hpp"

namespace omlab {

struct Arc {
    NodeId tail = 0;
    NodeId head = 0;

    auto operator<=>(const Arc&) const = default;
};

struct DigraphOptions {
    bool allow_self_loops = false;
};

/// Directed graph on dense node indices 0..node_count-1.
///
/// The arc list is kept sorted by (tail, head) and deduplicated, so two
/// digraphs with the same arc set compare equal. Labels are optional; when
/// given there must be one per node and they must be unique. Self-loops are
/// rejected unless `allow_self_loops` is set.
class Digraph {
public:
    Digraph() = default;
    Digraph(std::size_t node_count, std::vector<Arc> arcs,
            std::vector<std::string> labels = {}, DigraphOptions options = {});

    std::size_t node_count() const { return node_count_; }
    std::span<const Arc> arcs() const { return arcs_; }
    std::size_t arc_count() const { return arcs_.size(); }

    bool has_labels() const { return !labels_.empty(); }
    const std::vector<std::string>& labels() const { return labels_; }
    // Label of `v`, or its decimal index when the graph is unlabeled.
    std::string label(NodeId v) const;
    std::optional<NodeId> find(std::string_view label) const;

    NodeSet out_neighbors(NodeId u) const { return out_.at(u); }
    NodeSet in_neighbors(NodeId v) const { return in_.at(v); }
    NodeSet all_nodes() const { return NodeSet::all(node_count_); }
    bool has_arc(Arc a) const;
    // Position of `a` in arcs(), if present.
    std::optional<std::size_t> arc_index(Arc a) const;
    bool is_symmetric() const;

    bool operator==(const Digraph& o) const {
        return node_count_ == o.node_count_ && arcs_ == o.arcs_ && labels_ == o.labels_;
    }

private:
    std::size_t node_count_ = 0;
    std::vector<Arc> arcs_;
    std::vector<std::string> labels_;
    std::vector<NodeSet> out_;
    std::vector<NodeSet> in_;
};

// Nodes reachable from `start` following the per-node successor sets.
NodeSet reach_closure(std::span<const NodeSet> successors, NodeSet start);

NodeSet reachable_from(const Digraph& g, NodeId u);

// B(g): nodes from which every node is reachable. May be empty.
NodeSet sources(const Digraph& g);

NodeSet heads(std::span<const Arc> arcs);

// Tarjan SCCs; components are listed in reverse topological order of the
// condensation (sinks first). Each component is sorted.
std::vector<std::vector<NodeId>> strongly_connected_components(const Digraph& g);

/// Vertex connectivity of a symmetric digraph: the minimum number of nodes
/// whose removal disconnects it, or |V|-1 when every pair is adjacent.
/// Computed as the minimum over non-adjacent pairs of the unit-capacity
/// node-split max-flow.
std::size_t vertex_connectivity(const Digraph& g);

// Standard graph families, unlabeled unless noted.
Digraph complete_digraph(std::size_t n);
Digraph cycle_graph(std::size_t n);             // symmetric cycle
Digraph directed_cycle(std::size_t n);
Digraph path_graph(std::size_t n);              // symmetric path
Digraph hypercube(std::size_t dimension);       // symmetric Q_n, labels are bit strings
Digraph symmetric_closure(const Digraph& g);

} // namespace omlab
