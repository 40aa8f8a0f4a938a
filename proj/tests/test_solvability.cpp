#include "doctest.h"
#include "support.hpp"

#include "omlab/error.hpp"
#include "omlab/oracle.hpp"
#include "omlab/simulator.hpp"
#include "omlab/solvability.hpp"

using namespace omlab;

namespace {

// Size of the smallest subset of events whose source sets share no node.
std::size_t brute_min_incompatible(const EventFamily& f) {
    std::size_t best = f.size() + 1;
    for (std::uint64_t s = 1; s < (std::uint64_t{1} << f.size()); ++s) {
        std::set<NodeId> common;
        bool first = true;
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (((s >> i) & 1U) == 0) {
                continue;
            }
            auto src = testing::matrix_sources(f.base().node_count(), f.event(i).arcs());
            if (first) {
                common = src;
                first = false;
            } else {
                std::set<NodeId> keep;
                for (NodeId v : common) {
                    if (src.count(v) != 0) {
                        keep.insert(v);
                    }
                }
                common = keep;
            }
        }
        if (common.empty()) {
            best = std::min<std::size_t>(best, static_cast<std::size_t>(__builtin_popcountll(s)));
        }
    }
    return best;
}

NodeId node(const EventFamily& f, const char* label) {
    return *f.base().find(label);
}

} // namespace

TEST_CASE("fig12 broadcast times") {
    EventFamily f = fig12_family();
    CHECK(broadcast_rounds(f, node(f, "c")) == std::size_t{2});
    CHECK(broadcast_rounds(f, node(f, "d")) == std::size_t{2});
    CHECK(broadcast_rounds(f, node(f, "a")) == std::size_t{3});
    CHECK(broadcast_rounds(f, node(f, "b")) == std::size_t{3});
    auto best = optimal_broadcast_rounds(f);
    REQUIRE(best);
    CHECK(best->rounds == 2);
    CHECK(best->optimal_originators == (NodeSet::single(node(f, "c")) | NodeSet::single(node(f, "d"))));
    Verdict v = check_broadcastable(f);
    CHECK(v.answer == Answer::solvable);
    CHECK(v.rule == Rule::common_source);
    CHECK(v.common_sources == NodeSet::all(4));
}

TEST_CASE("two-node verdicts") {
    Verdict o1 = check_consensus(bundled_family("O1-2node"));
    CHECK(o1.answer == Answer::unsolvable);
    CHECK(o1.convex);
    REQUIRE(o1.incompatible);
    CHECK(o1.incompatible->events.size() == 2);

    EventFamily h = bundled_family("H-2node");
    Verdict hb = check_broadcastable(h);
    CHECK(hb.answer == Answer::unsolvable);
    CHECK(hb.rule == Rule::source_incompatible);
    Verdict hc = check_consensus(h);
    CHECK(hc.answer == Answer::necessary_condition_holds);
    CHECK(hc.rule == Rule::beta_classes_clear);
    CHECK(!hc.convex);
    REQUIRE(hc.beta);
    CHECK(hc.beta->classes.size() == 2);

    Verdict rel = check_consensus(bundled_family("reliable-2node"));
    CHECK(rel.answer == Answer::solvable);
    CHECK(rel.rounds == std::size_t{1});
}

TEST_CASE("an event without a source rules out both problems") {
    GraphPtr g = two_node_graph();
    EventFamily f(g, {Event::full(g), Event(g, 0)});
    Verdict c = check_consensus(f);
    CHECK(c.answer == Answer::unsolvable);
    CHECK(c.rule == Rule::no_source);
    CHECK(c.sourceless_event == std::size_t{1});
    CHECK(check_broadcastable(f).rule == Rule::no_source);
    CHECK(!broadcast_rounds(f, 0));
}

TEST_CASE("broadcast game matches exhaustive word enumeration") {
    std::mt19937_64 rng(41);
    int finite = 0;
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t n = 2 + rng() % 3;
        GraphPtr g = share(testing::random_digraph(rng, n, 0.7));
        EventFamily f = testing::random_family(rng, g, 1 + rng() % 4);
        for (NodeId u = 0; u < n; ++u) {
            auto r = broadcast_rounds(f, u);
            REQUIRE(r == testing::brute_broadcast_rounds(f, u));
            finite += r ? 1 : 0;
        }
    }
    CHECK(finite > 50);
}

TEST_CASE("broadcastable exactly when a common source exists") {
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t n = 2 + rng() % 3;
        GraphPtr g = share(testing::random_digraph(rng, n, 0.7));
        EventFamily f = testing::random_family(rng, g, 1 + rng() % 5);
        Verdict v = check_broadcastable(f);
        bool any_finite = false;
        for (NodeId u = 0; u < n; ++u) {
            any_finite = any_finite || testing::brute_broadcast_rounds(f, u).has_value();
        }
        REQUIRE((v.answer == Answer::solvable) == any_finite);
        if (v.rule == Rule::source_incompatible) {
            REQUIRE(v.incompatible);
            REQUIRE(v.incompatible->events.size() == brute_min_incompatible(f));
            REQUIRE(minimal_incompatible_subset(f).events.size() == brute_min_incompatible(f));
        }
    }
}

TEST_CASE("consensus on convex families follows broadcast") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 100; ++trial) {
        GraphPtr g = share(testing::random_digraph(rng, 2 + rng() % 3, 0.6));
        EventFamily f = convex_closure(testing::random_family(rng, g, 1 + rng() % 3));
        Verdict b = check_broadcastable(f);
        Verdict c = check_consensus(f);
        REQUIRE(c.convex);
        REQUIRE(c.answer != Answer::necessary_condition_holds);
        REQUIRE((c.answer == Answer::solvable) == (b.answer == Answer::solvable));
    }
}

TEST_CASE("blocked beta class is reported with its own witness") {
    std::mt19937_64 rng(44);
    int blocked = 0;
    for (int trial = 0; trial < 400; ++trial) {
        GraphPtr g = share(testing::random_digraph(rng, 2 + rng() % 3, 0.7));
        EventFamily f = testing::random_family(rng, g, 2 + rng() % 5);
        Verdict c = check_consensus(f);
        if (c.rule != Rule::beta_class_blocked) {
            continue;
        }
        ++blocked;
        REQUIRE(c.blocked_class);
        REQUIRE(c.incompatible);
        const auto& cls = c.beta->classes[*c.blocked_class];
        NodeSet common = NodeSet::all(f.base().node_count());
        for (std::size_t e : c.incompatible->events) {
            REQUIRE(std::find(cls.begin(), cls.end(), e) != cls.end());
            common &= sources(f.event(e));
        }
        REQUIRE(common.empty());
    }
    CHECK(blocked > 0);
}

TEST_CASE("connectivity threshold on small graphs") {
    for (auto [g, c] : {std::pair{cycle_graph(4), std::size_t{2}}, std::pair{complete_digraph(4), std::size_t{3}}}) {
        ThresholdTable t = connectivity_threshold_check(share(g), c);
        CHECK(t.connectivity == c);
        REQUIRE(t.rows.size() == c + 1);
        for (const auto& row : t.rows) {
            CHECK(row.agrees);
            CHECK((row.answer == Answer::solvable) == (row.f < c));
        }
    }
}

TEST_CASE("game refuses graphs above the node cap") {
    EventFamily f = generate_bounded_omissions(share(hypercube(3)), 0, OmissionMetric::global);
    CHECK_THROWS_AS(broadcast_rounds(f, 0, 4), BudgetExceeded);
    CHECK(broadcast_rounds(f, 0) == std::size_t{3});
}

TEST_CASE("finite broadcast times stay below the node count") {
    std::mt19937_64 rng(45);
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t n = 2 + rng() % 4;
        GraphPtr g = share(testing::random_digraph(rng, n, 0.6));
        EventFamily f = testing::random_family(rng, g, 1 + rng() % 6);
        NodeSet common = common_sources(f);
        for (NodeId u = 0; u < n; ++u) {
            auto r = broadcast_rounds(f, u);
            REQUIRE(r.has_value() == common.contains(u));
            if (r) {
                REQUIRE(*r <= n - 1);
                REQUIRE(*r <= f.size() * n);
            }
        }
    }
}

TEST_CASE("adding an event never helps broadcast") {
    std::mt19937_64 rng(46);
    for (int trial = 0; trial < 200; ++trial) {
        GraphPtr g = share(testing::random_digraph(rng, 2 + rng() % 3, 0.6));
        EventFamily big = testing::random_family(rng, g, 2 + rng() % 5);
        if (big.size() < 2) {
            continue;
        }
        std::vector<Event> fewer(big.events().begin(), big.events().end() - 1);
        EventFamily small(g, fewer);
        REQUIRE(common_sources(big).subset_of(common_sources(small)));
        if (check_broadcastable(small).answer == Answer::unsolvable) {
            REQUIRE(check_broadcastable(big).answer == Answer::unsolvable);
        }
    }
}

TEST_CASE("broadcastable families are solved by broadcasting a source's input") {
    std::mt19937_64 rng(47);
    int solved = 0;
    for (int trial = 0; trial < 150; ++trial) {
        GraphPtr g = share(testing::random_digraph(rng, 2 + rng() % 3, 0.7));
        EventFamily f = testing::random_family(rng, g, 1 + rng() % 3);
        Verdict v = check_broadcastable(f);
        if (v.answer != Answer::solvable) {
            continue;
        }
        ++solved;
        auto p = broadcast_consensus(*v.originator, *v.rounds);
        REQUIRE(exhaustive_check(*p, f, *v.rounds).passed());
    }
    CHECK(solved > 20);
}

TEST_CASE("oracle agrees with the broadcast verdict on convex families") {
    std::mt19937_64 rng(48);
    for (int trial = 0; trial < 60; ++trial) {
        std::size_t n = 2 + rng() % 2;
        GraphPtr g = share(testing::random_digraph(rng, n, 0.7));
        EventFamily f = convex_closure(testing::random_family(rng, g, 1 + rng() % 2));
        if (f.size() > 12) {
            continue;
        }
        OracleResult r = min_consensus_rounds(f, n);
        REQUIRE(r.solvable() == (check_broadcastable(f).answer == Answer::solvable));
    }
}
