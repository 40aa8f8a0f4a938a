#include "omlab/digraph.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <unordered_set>

#include "omlab/error.hpp"

namespace omlab {

Digraph::Digraph(std::size_t node_count, std::vector<Arc> arcs,
                 std::vector<std::string> labels, DigraphOptions options)
    : node_count_(node_count), arcs_(std::move(arcs)), labels_(std::move(labels)) {
    if (node_count_ > max_nodes) {
        throw InvalidInput("digraph has " + std::to_string(node_count_) +
                           " nodes; at most 64 are supported");
    }
    if (!labels_.empty()) {
        if (labels_.size() != node_count_) {
            throw InvalidInput("label count does not match node count");
        }
        std::unordered_set<std::string> seen;
        for (const auto& l : labels_) {
            if (!seen.insert(l).second) {
                throw InvalidInput("duplicate node label '" + l + "'");
            }
        }
    }
    for (const Arc& a : arcs_) {
        if (a.tail >= node_count_ || a.head >= node_count_) {
            throw InvalidInput("arc endpoint out of range");
        }
        if (a.tail == a.head && !options.allow_self_loops) {
            throw InvalidInput("self-loop on node " + label(a.tail));
        }
    }
    std::sort(arcs_.begin(), arcs_.end());
    arcs_.erase(std::unique(arcs_.begin(), arcs_.end()), arcs_.end());

    out_.assign(node_count_, NodeSet{});
    in_.assign(node_count_, NodeSet{});
    for (const Arc& a : arcs_) {
        out_[a.tail].insert(a.head);
        in_[a.head].insert(a.tail);
    }
}

std::string Digraph::label(NodeId v) const {
    if (v < labels_.size()) {
        return labels_[v];
    }
    return std::to_string(v);
}

std::optional<NodeId> Digraph::find(std::string_view label) const {
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] == label) {
            return static_cast<NodeId>(i);
        }
    }
    if (labels_.empty()) {
        NodeId v = 0;
        if (label.empty()) {
            return std::nullopt;
        }
        for (char c : label) {
            if (c < '0' || c > '9') {
                return std::nullopt;
            }
            v = v * 10 + static_cast<NodeId>(c - '0');
        }
        if (v < node_count_) {
            return v;
        }
    }
    return std::nullopt;
}

bool Digraph::has_arc(Arc a) const {
    return a.tail < node_count_ && out_[a.tail].contains(a.head);
}

std::optional<std::size_t> Digraph::arc_index(Arc a) const {
    auto it = std::lower_bound(arcs_.begin(), arcs_.end(), a);
    if (it == arcs_.end() || *it != a) {
        return std::nullopt;
    }
    return static_cast<std::size_t>(it - arcs_.begin());
}

bool Digraph::is_symmetric() const {
    return std::all_of(arcs_.begin(), arcs_.end(),
                       [this](const Arc& a) { return has_arc({a.head, a.tail}); });
}

NodeSet reach_closure(std::span<const NodeSet> successors, NodeSet start) {
    NodeSet seen = start;
    NodeSet frontier = start;
    while (!frontier.empty()) {
        NodeSet next;
        frontier.for_each([&](NodeId v) { next |= successors[v]; });
        frontier = next - seen;
        seen |= frontier;
    }
    return seen;
}

namespace {

std::vector<NodeSet> successor_table(const Digraph& g) {
    std::vector<NodeSet> out(g.node_count());
    for (NodeId v = 0; v < g.node_count(); ++v) {
        out[v] = g.out_neighbors(v);
    }
    return out;
}

} // namespace

NodeSet reachable_from(const Digraph& g, NodeId u) {
    if (u >= g.node_count()) {
        throw InvalidInput("node " + std::to_string(u) + " out of range");
    }
    auto succ = successor_table(g);
    return reach_closure(succ, NodeSet::single(u));
}

NodeSet sources(const Digraph& g) {
    auto succ = successor_table(g);
    const NodeSet everyone = g.all_nodes();
    NodeSet result;
    for (NodeId u = 0; u < g.node_count(); ++u) {
        if (reach_closure(succ, NodeSet::single(u)) == everyone) {
            result.insert(u);
        }
    }
    return result;
}

NodeSet heads(std::span<const Arc> arcs) {
    NodeSet h;
    for (const Arc& a : arcs) {
        h.insert(a.head);
    }
    return h;
}

namespace {

struct Tarjan {
    const Digraph& g;
    std::vector<int> index, low;
    std::vector<bool> on_stack;
    std::vector<NodeId> stack;
    std::vector<std::vector<NodeId>> components;
    int counter = 0;

    explicit Tarjan(const Digraph& graph)
        : g(graph), index(graph.node_count(), -1), low(graph.node_count(), 0),
          on_stack(graph.node_count(), false) {}

    void visit(NodeId v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        g.out_neighbors(v).for_each([&](NodeId w) {
            if (index[w] == -1) {
                visit(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        });
        if (low[v] == index[v]) {
            std::vector<NodeId> comp;
            NodeId w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                comp.push_back(w);
            } while (w != v);
            std::sort(comp.begin(), comp.end());
            components.push_back(std::move(comp));
        }
    }
};

// Edmonds-Karp on a dense capacity matrix; graphs here have at most 128 nodes.
int max_flow(std::vector<std::vector<int>> cap, std::size_t s, std::size_t t) {
    const std::size_t n = cap.size();
    int flow = 0;
    while (true) {
        std::vector<int> parent(n, -1);
        parent[s] = static_cast<int>(s);
        std::queue<std::size_t> q;
        q.push(s);
        while (!q.empty() && parent[t] == -1) {
            std::size_t x = q.front();
            q.pop();
            for (std::size_t y = 0; y < n; ++y) {
                if (parent[y] == -1 && cap[x][y] > 0) {
                    parent[y] = static_cast<int>(x);
                    q.push(y);
                }
            }
        }
        if (parent[t] == -1) {
            return flow;
        }
        int push = std::numeric_limits<int>::max();
        for (std::size_t y = t; y != s; y = static_cast<std::size_t>(parent[y])) {
            push = std::min(push, cap[static_cast<std::size_t>(parent[y])][y]);
        }
        for (std::size_t y = t; y != s; y = static_cast<std::size_t>(parent[y])) {
            auto x = static_cast<std::size_t>(parent[y]);
            cap[x][y] -= push;
            cap[y][x] += push;
        }
        flow += push;
    }
}

} // namespace

std::vector<std::vector<NodeId>> strongly_connected_components(const Digraph& g) {
    Tarjan t(g);
    for (NodeId v = 0; v < g.node_count(); ++v) {
        if (t.index[v] == -1) {
            t.visit(v);
        }
    }
    return std::move(t.components);
}

std::size_t vertex_connectivity(const Digraph& g) {
    const std::size_t n = g.node_count();
    if (n < 2) {
        throw InvalidInput("vertex connectivity needs at least two nodes");
    }
    if (!g.is_symmetric()) {
        throw InvalidInput("vertex connectivity requires a symmetric digraph");
    }
    const int inf = static_cast<int>(n) + 1;
    // Node v splits into v_in = 2v and v_out = 2v+1.
    std::vector<std::vector<int>> base(2 * n, std::vector<int>(2 * n, 0));
    for (const Arc& a : g.arcs()) {
        if (a.tail != a.head) {
            base[2 * a.tail + 1][2 * a.head] = inf;
        }
    }
    std::size_t best = n - 1;
    for (NodeId s = 0; s < n; ++s) {
        for (NodeId t = s + 1; t < n; ++t) {
            if (g.has_arc({s, t})) {
                continue;
            }
            auto cap = base;
            for (NodeId v = 0; v < n; ++v) {
                cap[2 * v][2 * v + 1] = (v == s || v == t) ? inf : 1;
            }
            best = std::min(best, static_cast<std::size_t>(max_flow(std::move(cap), 2 * s + 1, 2 * t)));
        }
    }
    return best;
}

Digraph complete_digraph(std::size_t n) {
    std::vector<Arc> arcs;
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v = 0; v < n; ++v) {
            if (u != v) {
                arcs.push_back({u, v});
            }
        }
    }
    return Digraph(n, std::move(arcs));
}

Digraph cycle_graph(std::size_t n) {
    std::vector<Arc> arcs;
    for (NodeId u = 0; u < n; ++u) {
        auto v = static_cast<NodeId>((u + 1) % n);
        if (u != v) {
            arcs.push_back({u, v});
            arcs.push_back({v, u});
        }
    }
    return Digraph(n, std::move(arcs));
}

Digraph directed_cycle(std::size_t n) {
    std::vector<Arc> arcs;
    for (NodeId u = 0; u < n; ++u) {
        auto v = static_cast<NodeId>((u + 1) % n);
        if (u != v) {
            arcs.push_back({u, v});
        }
    }
    return Digraph(n, std::move(arcs));
}

Digraph path_graph(std::size_t n) {
    std::vector<Arc> arcs;
    for (NodeId u = 0; u + 1 < n; ++u) {
        arcs.push_back({u, u + 1});
        arcs.push_back({u + 1, u});
    }
    return Digraph(n, std::move(arcs));
}

Digraph hypercube(std::size_t dimension) {
    if (dimension > 6) {
        throw InvalidInput("hypercube dimension above 6 exceeds the 64-node limit");
    }
    const std::size_t n = std::size_t{1} << dimension;
    std::vector<Arc> arcs;
    std::vector<std::string> labels;
    for (NodeId u = 0; u < n; ++u) {
        std::string l;
        for (std::size_t b = dimension; b-- > 0;) {
            l.push_back(((u >> b) & 1U) != 0 ? '1' : '0');
        }
        labels.push_back(dimension == 0 ? "0" : l);
        for (std::size_t b = 0; b < dimension; ++b) {
            arcs.push_back({u, static_cast<NodeId>(u ^ (1U << b))});
        }
    }
    return Digraph(n, std::move(arcs), std::move(labels));
}

Digraph symmetric_closure(const Digraph& g) {
    std::vector<Arc> arcs(g.arcs().begin(), g.arcs().end());
    for (const Arc& a : g.arcs()) {
        arcs.push_back({a.head, a.tail});
    }
    return Digraph(g.node_count(), std::move(arcs), g.labels());
}

} // namespace omlab
