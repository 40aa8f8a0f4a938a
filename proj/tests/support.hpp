#pragma once

// Independent reference implementations used as test oracles. These are
// deliberately naive: matrices, explicit enumeration, string views.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "omlab/bundled.hpp"
#include "omlab/digraph.hpp"
#include "omlab/equivalence.hpp"
#include "omlab/omission.hpp"

namespace testing {

using namespace omlab;

using Matrix = std::vector<std::vector<bool>>;

inline Matrix adjacency(std::size_t n, const std::vector<Arc>& arcs) {
    Matrix m(n, std::vector<bool>(n, false));
    for (const Arc& a : arcs) {
        m[a.tail][a.head] = true;
    }
    return m;
}

// Reflexive-transitive closure by Floyd-Warshall.
inline Matrix closure(Matrix m) {
    const std::size_t n = m.size();
    for (std::size_t i = 0; i < n; ++i) {
        m[i][i] = true;
    }
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (m[i][k] && m[k][j]) {
                    m[i][j] = true;
                }
            }
        }
    }
    return m;
}

inline std::set<NodeId> matrix_sources(std::size_t n, const std::vector<Arc>& arcs) {
    Matrix c = closure(adjacency(n, arcs));
    std::set<NodeId> out;
    for (NodeId s = 0; s < n; ++s) {
        if (std::all_of(c[s].begin(), c[s].end(), [](bool b) { return b; })) {
            out.insert(s);
        }
    }
    return out;
}

inline std::set<NodeId> to_set(NodeSet s) {
    std::set<NodeId> out;
    s.for_each([&](NodeId v) { out.insert(v); });
    return out;
}

// Smallest set of nodes whose removal leaves the rest disconnected, found by
// trying every subset in order of size; n-1 for complete graphs.
inline std::size_t brute_connectivity(const Digraph& g) {
    const std::size_t n = g.node_count();
    std::vector<Arc> arcs(g.arcs().begin(), g.arcs().end());
    for (std::size_t k = 0; k + 2 <= n; ++k) {
        for (std::uint64_t removed = 0; removed < (std::uint64_t{1} << n); ++removed) {
            if (static_cast<std::size_t>(__builtin_popcountll(removed)) != k) {
                continue;
            }
            std::vector<NodeId> keep;
            for (NodeId v = 0; v < n; ++v) {
                if (((removed >> v) & 1U) == 0) {
                    keep.push_back(v);
                }
            }
            Matrix m(n, std::vector<bool>(n, false));
            for (const Arc& a : arcs) {
                if (((removed >> a.tail) & 1U) == 0 && ((removed >> a.head) & 1U) == 0) {
                    m[a.tail][a.head] = true;
                }
            }
            Matrix c = closure(m);
            for (NodeId u : keep) {
                for (NodeId v : keep) {
                    if (!c[u][v]) {
                        return k;
                    }
                }
            }
        }
    }
    return n - 1;
}

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) {
        return 0;
    }
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
    }
    return r;
}

// Informed set after flooding from u along a word, updating a plain bool
// vector arc by arc.
inline std::vector<bool> flood(const EventFamily& family, NodeId u, const std::vector<std::size_t>& word) {
    std::vector<bool> informed(family.base().node_count(), false);
    informed[u] = true;
    for (std::size_t e : word) {
        std::vector<bool> next = informed;
        for (const Arc& a : family.event(e).arcs()) {
            if (informed[a.tail]) {
                next[a.head] = true;
            }
        }
        informed = next;
    }
    return informed;
}

inline void for_each_word(std::size_t letters, std::size_t length,
                          const std::function<void(const std::vector<std::size_t>&)>& fn) {
    std::vector<std::size_t> w(length, 0);
    while (true) {
        fn(w);
        std::size_t i = length;
        while (i > 0 && ++w[i - 1] == letters) {
            w[--i] = 0;
        }
        if (i == 0) {
            return;
        }
    }
}

// Worst-case flooding time by enumerating every word of each length; the
// informed set grows each round unless stalled, so n-1 rounds bound any
// finite answer.
inline std::optional<std::size_t> brute_broadcast_rounds(const EventFamily& family, NodeId u) {
    const std::size_t n = family.base().node_count();
    for (std::size_t r = 0; r < n; ++r) {
        bool all = true;
        for_each_word(family.size(), r, [&](const std::vector<std::size_t>& w) {
            if (!all) {
                return;
            }
            auto inf = flood(family, u, w);
            all = std::all_of(inf.begin(), inf.end(), [](bool b) { return b; });
        });
        if (all) {
            return r;
        }
    }
    return std::nullopt;
}

// Alpha relation straight from the definition, on arc lists.
inline bool naive_alpha(const Event& h, const Event& hp, const Event& k) {
    auto src = matrix_sources(k.node_count(), k.arcs());
    auto in_x = [&](const Event& e) {
        std::set<Arc> out;
        for (const Arc& a : e.arcs()) {
            if (src.count(a.head) != 0) {
                out.insert(a);
            }
        }
        return out;
    };
    return in_x(h) == in_x(hp);
}

// Every set partition of {0..m-1}, as restricted growth strings.
inline void for_each_partition(std::size_t m, const std::function<void(const std::vector<std::size_t>&)>& fn) {
    std::vector<std::size_t> label(m, 0);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t i, std::size_t used) {
        if (i == m) {
            fn(label);
            return;
        }
        for (std::size_t c = 0; c <= used && c < m; ++c) {
            label[i] = c;
            rec(i + 1, std::max(used, c + 1));
        }
    };
    if (m == 0) {
        fn(label);
        return;
    }
    rec(0, 0);
}

// Whether each class of `label` is connected by alpha edges whose witness
// has a source and lies in the same class.
inline bool closed_partition(const EventFamily& family, const std::vector<std::size_t>& label) {
    const std::size_t m = family.size();
    std::vector<bool> has_source(m);
    for (std::size_t i = 0; i < m; ++i) {
        has_source[i] = !matrix_sources(family.base().node_count(), family.event(i).arcs()).empty();
    }
    std::vector<std::size_t> parent(m);
    for (std::size_t i = 0; i < m; ++i) {
        parent[i] = i;
    }
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        return parent[x] == x ? x : parent[x] = find(parent[x]);
    };
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            if (label[i] != label[j]) {
                continue;
            }
            for (std::size_t k = 0; k < m; ++k) {
                if (label[k] == label[i] && has_source[k] &&
                    naive_alpha(family.event(i), family.event(j), family.event(k))) {
                    parent[find(i)] = find(j);
                    break;
                }
            }
        }
    }
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (label[i] == label[j] && find(i) != find(j)) {
                return false;
            }
        }
    }
    return true;
}

// Canonical class list: each class sorted, classes ordered by first member.
inline std::vector<std::vector<std::size_t>> classes_of(const std::vector<std::size_t>& label) {
    std::map<std::size_t, std::vector<std::size_t>> by;
    for (std::size_t i = 0; i < label.size(); ++i) {
        by[label[i]].push_back(i);
    }
    std::vector<std::vector<std::size_t>> out;
    for (auto& [k, v] : by) {
        out.push_back(v);
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline bool refines(const std::vector<std::size_t>& fine, const std::vector<std::size_t>& coarse) {
    for (std::size_t i = 0; i < fine.size(); ++i) {
        for (std::size_t j = 0; j < fine.size(); ++j) {
            if (fine[i] == fine[j] && coarse[i] != coarse[j]) {
                return false;
            }
        }
    }
    return true;
}

// Random digraph on n nodes with arc probability p, no self-loops.
inline Digraph random_digraph(std::mt19937_64& rng, std::size_t n, double p, bool symmetric = false) {
    std::bernoulli_distribution coin(p);
    std::vector<Arc> arcs;
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v = symmetric ? u + 1 : 0; v < n; ++v) {
            if (u != v && coin(rng)) {
                arcs.push_back({u, v});
                if (symmetric) {
                    arcs.push_back({v, u});
                }
            }
        }
    }
    return Digraph(n, std::move(arcs));
}

// Random family of distinct spanning subgraphs of `base`.
inline EventFamily random_family(std::mt19937_64& rng, const GraphPtr& base, std::size_t count) {
    const std::size_t m = base->arc_count();
    std::uniform_int_distribution<ArcMask> dist(0, m == 64 ? ~ArcMask{0} : (ArcMask{1} << m) - 1);
    std::set<ArcMask> masks;
    std::size_t tries = 0;
    while (masks.size() < count && tries++ < 1000) {
        masks.insert(dist(rng));
    }
    std::vector<Event> events;
    for (ArcMask mk : masks) {
        events.emplace_back(base, mk);
    }
    return EventFamily(base, std::move(events));
}

// Random spanning out-tree rooted at `root`: each other node attaches to an
// earlier node of a random order.
inline std::vector<Arc> random_out_tree(std::mt19937_64& rng, std::size_t n, NodeId root) {
    std::vector<NodeId> order;
    for (NodeId v = 0; v < n; ++v) {
        if (v != root) {
            order.push_back(v);
        }
    }
    std::shuffle(order.begin(), order.end(), rng);
    order.insert(order.begin(), root);
    std::vector<Arc> arcs;
    for (std::size_t i = 1; i < order.size(); ++i) {
        std::uniform_int_distribution<std::size_t> pick(0, i - 1);
        arcs.push_back({order[pick(rng)], order[i]});
    }
    return arcs;
}

} // namespace testing
