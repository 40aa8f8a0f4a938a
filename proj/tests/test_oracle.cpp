#include "doctest.h"
#include "support.hpp"

#include "omlab/error.hpp"
#include "omlab/oracle.hpp"
#include "omlab/simulator.hpp"
#include "omlab/solvability.hpp"

using namespace omlab;

namespace {

// Full-information views as strings, computed round by round.
std::vector<std::string> string_views(const EventFamily& f, const InitialConfig& init,
                                      const std::vector<std::size_t>& word) {
    const std::size_t n = f.base().node_count();
    std::vector<std::string> view(n);
    for (NodeId v = 0; v < n; ++v) {
        view[v] = std::to_string(v) + "=" + std::to_string(init.value(v));
    }
    for (std::size_t e : word) {
        std::vector<std::string> next(n);
        for (NodeId v = 0; v < n; ++v) {
            std::string s = "[" + view[v];
            for (NodeId u = 0; u < n; ++u) {
                if (f.event(e).contains({u, v})) {
                    s += "|" + view[u];
                }
            }
            next[v] = s + "]";
        }
        view = next;
    }
    return view;
}

// Whether some assignment of decisions to depth-r views solves consensus,
// by trying every assignment.
bool brute_solvable(const EventFamily& f, std::size_t r) {
    const std::size_t n = f.base().node_count();
    std::map<std::string, std::size_t> ids;
    std::vector<std::vector<std::size_t>> runs;
    std::vector<int> uniform;
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
        InitialConfig init = InitialConfig::from_bits(n, bits);
        testing::for_each_word(f.size(), r, [&](const std::vector<std::size_t>& w) {
            std::vector<std::size_t> row;
            for (const auto& s : string_views(f, init, w)) {
                row.push_back(ids.emplace(s, ids.size()).first->second);
            }
            runs.push_back(row);
            uniform.push_back(init.uniform_value().value_or(-1));
        });
    }
    REQUIRE(ids.size() <= 20);
    for (std::uint64_t table = 0; table < (std::uint64_t{1} << ids.size()); ++table) {
        bool ok = true;
        for (std::size_t i = 0; i < runs.size() && ok; ++i) {
            int first = static_cast<int>((table >> runs[i][0]) & 1U);
            for (std::size_t x : runs[i]) {
                ok = ok && static_cast<int>((table >> x) & 1U) == first;
            }
            ok = ok && (uniform[i] < 0 || uniform[i] == first);
        }
        if (ok) {
            return true;
        }
    }
    return false;
}

std::vector<EventFamily> all_two_node_families() {
    GraphPtr g = two_node_graph();
    std::vector<EventFamily> out;
    for (unsigned subset = 1; subset < 16; ++subset) {
        std::vector<Event> events;
        for (ArcMask m = 0; m < 4; ++m) {
            if (((subset >> m) & 1U) != 0) {
                events.emplace_back(g, m);
            }
        }
        out.emplace_back(g, std::move(events));
    }
    return out;
}

} // namespace

TEST_CASE("view table interns views") {
    ViewTable t;
    auto a0 = t.initial(0, 0);
    CHECK(t.initial(0, 0) == a0);
    CHECK(t.initial(0, 1) != a0);
    auto b1 = t.initial(1, 1);
    std::vector<std::pair<NodeId, ViewTable::Id>> heard{{1, b1}};
    auto x = t.extend(0, a0, heard);
    CHECK(t.extend(0, a0, heard) == x);
    CHECK(t.extend(0, a0, {}) != x);
    CHECK(t.depth_of(x) == 1);
    CHECK(t.node_of(x) == 0);
    CHECK(t.find_initial(1, 1) == b1);
    CHECK(!t.find_initial(1, 0));
    GraphPtr g = two_node_graph();
    CHECK(t.describe(x, *g) == "W(W[0]|B:B[1])");
}

TEST_CASE("H is solvable in one round and the protocol checks out") {
    EventFamily h = bundled_family("H-2node");
    OracleResult r = min_consensus_rounds(h, 3);
    REQUIRE(r.solvable());
    CHECK(*r.rounds == 1);
    CHECK(!r.horizons.front().solvable);
    REQUIRE(r.protocol);
    CHECK(exhaustive_check(*r.protocol, h, 1).passed());
    CHECK(!r.witness);
}

TEST_CASE("O_1 has no protocol and its witness chain verifies") {
    EventFamily o1 = bundled_family("O1-2node");
    OracleResult r = min_consensus_rounds(o1, 3);
    CHECK(!r.solvable());
    CHECK(r.horizons.size() == 4);
    REQUIRE(r.witness);
    CHECK(r.witness->executions.front().init.uniform_value() != r.witness->executions.back().init.uniform_value());
    CHECK(verify_chain(*r.witness, o1));
    CHECK(!exhaustive_check(*one_round_exchange(), o1, 1).passed());
}

TEST_CASE("fig12 is solvable in one round") {
    EventFamily f = fig12_family();
    OracleResult r = min_consensus_rounds(f, 2);
    REQUIRE(r.solvable());
    CHECK(*r.rounds == 1);
    CHECK(exhaustive_check(*r.protocol, f, 1).passed());
}

TEST_CASE("oracle matches exhaustive decision-table search on two nodes") {
    for (const EventFamily& f : all_two_node_families()) {
        OracleResult r = min_consensus_rounds(f, 1);
        for (std::size_t h = 0; h <= 1; ++h) {
            INFO("family of " << f.size() << " events, horizon " << h);
            REQUIRE(r.horizons[h].solvable == brute_solvable(f, h));
        }
    }
}

TEST_CASE("emitted protocols pass the simulator and chains verify") {
    std::mt19937_64 rng(61);
    int solved = 0, refuted = 0;
    for (int trial = 0; trial < 80; ++trial) {
        std::size_t n = 2 + rng() % 2;
        GraphPtr g = share(testing::random_digraph(rng, n, 0.7));
        EventFamily f = testing::random_family(rng, g, 1 + rng() % 4);
        OracleResult r = min_consensus_rounds(f, 2);
        if (r.solvable()) {
            ++solved;
            REQUIRE(exhaustive_check(*r.protocol, f, *r.rounds).passed());
            for (std::size_t h = 0; h < *r.rounds; ++h) {
                REQUIRE(!r.horizons[h].solvable);
            }
        } else {
            ++refuted;
            REQUIRE(r.witness);
            REQUIRE(verify_chain(*r.witness, f));
        }
    }
    CHECK(solved > 0);
    CHECK(refuted > 0);
}

TEST_CASE("verify_chain rejects tampered chains") {
    EventFamily o1 = bundled_family("O1-2node");
    OracleResult r = min_consensus_rounds(o1, 2);
    REQUIRE(r.witness);
    const IndistinguishabilityChain& good = *r.witness;
    REQUIRE(verify_chain(good, o1));

    CHECK(!verify_chain(IndistinguishabilityChain{}, o1));

    IndistinguishabilityChain shortened = good;
    shortened.executions.pop_back();
    shortened.shared_node.pop_back();
    CHECK(!verify_chain(shortened, o1));

    IndistinguishabilityChain flipped = good;
    flipped.shared_node[0] = 1 - flipped.shared_node[0];
    bool any_bad = !verify_chain(flipped, o1);
    for (std::size_t i = 1; i < good.shared_node.size() && !any_bad; ++i) {
        flipped = good;
        flipped.shared_node[i] = 1 - flipped.shared_node[i];
        any_bad = !verify_chain(flipped, o1);
    }
    CHECK(any_bad);

    IndistinguishabilityChain bad_letter = good;
    bad_letter.executions[0].scenario.word[0] = 17;
    CHECK(!verify_chain(bad_letter, o1));
}

TEST_CASE("oracle and theory never disagree on small families") {
    std::mt19937_64 rng(62);
    for (int trial = 0; trial < 100; ++trial) {
        GraphPtr g = share(testing::random_digraph(rng, 2 + rng() % 2, 0.7));
        EventFamily f = testing::random_family(rng, g, 1 + rng() % 4);
        Verdict v = check_consensus(f);
        OracleResult r = min_consensus_rounds(f, 2);
        if (v.answer == Answer::unsolvable) {
            REQUIRE(!r.solvable());
        }
        if (v.answer == Answer::solvable && v.rounds && *v.rounds <= 2) {
            REQUIRE(r.solvable());
            REQUIRE(*r.rounds <= *v.rounds);
        }
    }
}

TEST_CASE("equal-rounds audit") {
    AuditReport o1 = equal_rounds_audit(bundled_family("O1-2node"), 3);
    CHECK(o1.agrees);
    CHECK(!o1.broadcast_rounds);
    CHECK(!o1.consensus_rounds);

    EventFamily c4 = generate_bounded_omissions(share(cycle_graph(4)), 1, OmissionMetric::global);
    AuditReport a = equal_rounds_audit(c4, 3);
    CHECK(a.agrees);
    CHECK(a.broadcast_rounds == a.consensus_rounds);

    for (std::size_t f : {0, 1}) {
        AuditReport k3 = equal_rounds_audit(generate_bounded_omissions(share(complete_digraph(3)), f,
                                                                       OmissionMetric::global), 3);
        CHECK(k3.agrees);
        CHECK(k3.broadcast_rounds == k3.consensus_rounds);
        if (f == 0) {
            CHECK(k3.consensus_rounds == std::size_t{1});
        }
    }

    CHECK_THROWS_AS(equal_rounds_audit(bundled_family("H-2node"), 2), InvalidInput);
}

TEST_CASE("oracle budget") {
    EventFamily q3 = generate_bounded_omissions(share(hypercube(3)), 1, OmissionMetric::global);
    CHECK_THROWS_AS(min_consensus_rounds(q3, 3, 10000), BudgetExceeded);
}
