#include "omlab/equivalence.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <unordered_map>

#include "omlab/error.hpp"

namespace omlab {

ArcMask in_x_mask(const Event& e, NodeSet nodes) {
    return e.mask() & head_mask(e.base(), nodes);
}

std::vector<Arc> in_x(const Event& e, NodeSet nodes) {
    std::vector<Arc> out;
    for (const Arc& a : e.arcs()) {
        if (nodes.contains(a.head)) {
            out.push_back(a);
        }
    }
    return out;
}

bool alpha_related(const Event& left, const Event& right, const Event& k) {
    const NodeSet b = sources(k);
    return in_x_mask(left, b) == in_x_mask(right, b);
}

namespace {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) {
            return false;
        }
        if (b < a) {
            std::swap(a, b);
        }
        parent_[b] = a;
        return true;
    }

private:
    std::vector<std::size_t> parent_;
};

struct SourceInfo {
    std::vector<NodeSet> sources;
    std::vector<std::size_t> sourceless;
};

SourceInfo compute_sources(const EventFamily& family) {
    SourceInfo info;
    for (std::size_t i = 0; i < family.size(); ++i) {
        info.sources.push_back(sources(family.event(i)));
        if (info.sources.back().empty()) {
            info.sourceless.push_back(i);
        }
    }
    return info;
}

// Connected components of `members` under alpha edges witnessed by
// `witnesses`. Spanning edges are appended to `edges`.
std::vector<std::vector<std::size_t>> split_class(const EventFamily& family, const SourceInfo& info,
                                                  const std::vector<std::size_t>& members,
                                                  const std::vector<std::size_t>& witnesses,
                                                  std::vector<AlphaWitness>* edges) {
    UnionFind uf(family.size());
    // One representative witness per distinct source set, lowest index first.
    std::map<std::uint64_t, std::size_t> by_source;
    for (std::size_t k : witnesses) {
        if (!info.sources[k].empty()) {
            by_source.emplace(info.sources[k].bits(), k);
        }
    }
    std::vector<std::pair<std::size_t, std::size_t>> reps(by_source.begin(), by_source.end());
    std::sort(reps.begin(), reps.end(), [](auto a, auto b) { return a.second < b.second; });

    for (const auto& [bits, k] : reps) {
        const ArcMask view = head_mask(family.base(), NodeSet(bits));
        std::unordered_map<ArcMask, std::size_t> first_with;
        for (std::size_t h : members) {
            auto [it, fresh] = first_with.emplace(family.event(h).mask() & view, h);
            if (!fresh && uf.unite(it->second, h) && edges != nullptr) {
                edges->push_back({it->second, h, k});
            }
        }
    }
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t h : members) {
        groups[uf.find(h)].push_back(h);
    }
    std::vector<std::vector<std::size_t>> out;
    for (auto& [root, g] : groups) {
        std::sort(g.begin(), g.end());
        out.push_back(std::move(g));
    }
    return out;
}

void sort_classes(std::vector<std::vector<std::size_t>>& classes) {
    std::sort(classes.begin(), classes.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

std::vector<std::size_t> class_index(const std::vector<std::vector<std::size_t>>& classes, std::size_t n) {
    std::vector<std::size_t> of(n, 0);
    for (std::size_t c = 0; c < classes.size(); ++c) {
        for (std::size_t h : classes[c]) {
            of[h] = c;
        }
    }
    return of;
}

} // namespace

std::vector<AlphaWitness> BetaPartition::chain(std::size_t from, std::size_t to) const {
    if (from >= class_of.size() || to >= class_of.size()) {
        throw InvalidInput("event index out of range");
    }
    if (class_of[from] != class_of[to]) {
        throw InvalidInput("events lie in different beta classes");
    }
    if (from == to) {
        return {};
    }
    const auto& edges = spanning_edges[class_of[from]];
    std::unordered_map<std::size_t, std::vector<std::pair<std::size_t, std::size_t>>> adj;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        adj[edges[i].left].emplace_back(edges[i].right, i);
        adj[edges[i].right].emplace_back(edges[i].left, i);
    }
    std::unordered_map<std::size_t, std::pair<std::size_t, std::size_t>> came_from;
    std::deque<std::size_t> queue{from};
    came_from[from] = {from, 0};
    while (!queue.empty()) {
        std::size_t x = queue.front();
        queue.pop_front();
        if (x == to) {
            break;
        }
        for (auto [y, edge] : adj[x]) {
            if (came_from.emplace(y, std::pair{x, edge}).second) {
                queue.push_back(y);
            }
        }
    }
    std::vector<AlphaWitness> path;
    for (std::size_t x = to; x != from;) {
        auto [prev, edge] = came_from.at(x);
        path.push_back({prev, x, edges[edge].witness});
        x = prev;
    }
    std::reverse(path.begin(), path.end());
    return path;
}

std::vector<AlphaWitness> alpha_edges(const EventFamily& family) {
    const SourceInfo info = compute_sources(family);
    std::vector<std::pair<ArcMask, std::size_t>> views;
    for (std::size_t k = 0; k < family.size(); ++k) {
        if (!info.sources[k].empty()) {
            views.emplace_back(head_mask(family.base(), info.sources[k]), k);
        }
    }
    std::vector<AlphaWitness> out;
    for (std::size_t i = 0; i < family.size(); ++i) {
        for (std::size_t j = i + 1; j < family.size(); ++j) {
            const ArcMask diff = family.event(i).mask() ^ family.event(j).mask();
            for (const auto& [view, k] : views) {
                if ((diff & view) == 0) {
                    out.push_back({i, j, k});
                    break;
                }
            }
        }
    }
    return out;
}

Partition alpha_star(const EventFamily& family) {
    const SourceInfo info = compute_sources(family);
    std::vector<std::size_t> all(family.size());
    std::iota(all.begin(), all.end(), 0);
    Partition p;
    p.classes = split_class(family, info, all, all, nullptr);
    sort_classes(p.classes);
    p.class_of = class_index(p.classes, family.size());
    return p;
}

BetaPartition beta_partition(const EventFamily& family) {
    const SourceInfo info = compute_sources(family);
    std::vector<std::size_t> all(family.size());
    std::iota(all.begin(), all.end(), 0);

    BetaPartition beta;
    beta.sourceless = info.sourceless;
    std::vector<std::vector<std::size_t>> classes = split_class(family, info, all, all, nullptr);

    // Greatest fixed point: within each class keep only edges witnessed by a
    // member of the class, split into components, repeat until stable.
    while (true) {
        ++beta.iterations;
        std::vector<std::vector<std::size_t>> next;
        std::vector<std::vector<AlphaWitness>> edges;
        for (const auto& c : classes) {
            std::vector<AlphaWitness> class_edges;
            auto parts = split_class(family, info, c, c, &class_edges);
            if (parts.size() == 1) {
                edges.push_back(std::move(class_edges));
            } else {
                edges.emplace_back();
            }
            for (auto& p : parts) {
                next.push_back(std::move(p));
            }
        }
        const bool stable = next.size() == classes.size();
        classes = std::move(next);
        if (stable) {
            beta.spanning_edges = std::move(edges);
            break;
        }
    }
    // Order classes canonically and keep the edge lists aligned.
    std::vector<std::size_t> order(classes.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return classes[a].front() < classes[b].front(); });
    for (std::size_t i : order) {
        beta.classes.push_back(std::move(classes[i]));
    }
    std::vector<std::vector<AlphaWitness>> aligned;
    for (std::size_t i : order) {
        aligned.push_back(std::move(beta.spanning_edges[i]));
    }
    beta.spanning_edges = std::move(aligned);
    beta.class_of = class_index(beta.classes, family.size());
    return beta;
}

std::optional<std::string> check_closure(const BetaPartition& beta, const EventFamily& family) {
    const std::size_t n = family.size();
    if (beta.class_of.size() != n || beta.spanning_edges.size() != beta.classes.size()) {
        return "partition shape does not match the family";
    }
    std::vector<int> seen(n, 0);
    for (std::size_t c = 0; c < beta.classes.size(); ++c) {
        if (beta.classes[c].empty()) {
            return "empty class " + std::to_string(c);
        }
        for (std::size_t h : beta.classes[c]) {
            if (h >= n || ++seen[h] != 1 || beta.class_of[h] != c) {
                return "classes do not partition the family";
            }
        }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) {
        return "classes do not cover the family";
    }
    for (std::size_t c = 0; c < beta.classes.size(); ++c) {
        UnionFind uf(n);
        std::size_t joins = 0;
        for (const AlphaWitness& w : beta.spanning_edges[c]) {
            for (std::size_t x : {w.left, w.right, w.witness}) {
                if (x >= n || beta.class_of[x] != c) {
                    return "edge " + family.name(w.left) + "~" + family.name(w.right) +
                           " leaves class " + std::to_string(c);
                }
            }
            const Event& k = family.event(w.witness);
            if (sources(k).empty()) {
                return "witness " + family.name(w.witness) + " has no source";
            }
            if (!alpha_related(family.event(w.left), family.event(w.right), k)) {
                return "edge " + family.name(w.left) + "~" + family.name(w.right) +
                       " is not alpha-related through " + family.name(w.witness);
            }
            joins += uf.unite(w.left, w.right) ? 1 : 0;
        }
        if (joins + 1 != beta.classes[c].size()) {
            return "class " + std::to_string(c) + " is not connected by its edges";
        }
    }
    return std::nullopt;
}

} // namespace omlab
