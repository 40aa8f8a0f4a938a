#include "doctest.h"
#include "support.hpp"

#include "omlab/error.hpp"
#include "omlab/simulator.hpp"

using namespace omlab;

namespace {

class ConstantDecider : public Protocol {
public:
    explicit ConstantDecider(std::optional<int> value) : value_(value) {}
    std::string name() const override { return "constant"; }
    std::optional<Message> send(const LocalState&, NodeId, NodeId, std::size_t) const override {
        return std::nullopt;
    }
    LocalState receive(const LocalState& state, NodeId, std::span<const Delivery>, std::size_t) const override {
        LocalState next = state;
        next.decision = value_;
        return next;
    }

private:
    std::optional<int> value_;
};

// Decides its input in round 1, then flips in round 2.
class Flipper : public Protocol {
public:
    std::string name() const override { return "flipper"; }
    std::optional<Message> send(const LocalState&, NodeId, NodeId, std::size_t) const override {
        return std::nullopt;
    }
    LocalState receive(const LocalState& state, NodeId, std::span<const Delivery>, std::size_t round) const override {
        LocalState next = state;
        next.decision = round == 1 ? state.input : 1 - state.input;
        return next;
    }
};

Scenario word(std::vector<std::size_t> w) {
    return Scenario{std::move(w), std::nullopt};
}

} // namespace

TEST_CASE("flooding informs exactly the reachable-by-rounds set") {
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t n = 2 + rng() % 4;
        GraphPtr g = share(testing::random_digraph(rng, n, 0.5));
        EventFamily f = testing::random_family(rng, g, 1 + rng() % 4);
        std::size_t len = rng() % 6;
        std::vector<std::size_t> w;
        for (std::size_t i = 0; i < len; ++i) {
            w.push_back(rng() % f.size());
        }
        NodeId u = static_cast<NodeId>(rng() % n);
        SimulationTrace t = run(*flooding(u, len), f, word(w), InitialConfig::uniform(n, 1));
        auto expected = testing::flood(f, u, w);
        NodeSet got = informed(t.final_configuration());
        for (NodeId v = 0; v < n; ++v) {
            REQUIRE(got.contains(v) == expected[v]);
        }
        REQUIRE(t.configurations.size() == len + 1);
    }
}

TEST_CASE("flooding along a subword informs no more nodes") {
    std::mt19937_64 rng(52);
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t n = 2 + rng() % 4;
        GraphPtr g = share(testing::random_digraph(rng, n, 0.5));
        EventFamily f = testing::random_family(rng, g, 1 + rng() % 4);
        std::size_t len = 1 + rng() % 6;
        std::vector<std::size_t> w, pos;
        for (std::size_t i = 0; i < len; ++i) {
            w.push_back(rng() % f.size());
            if (rng() % 2 == 0) {
                pos.push_back(i);
            }
        }
        Scenario sub = subword(word(w), pos);
        NodeId u = static_cast<NodeId>(rng() % n);
        NodeSet full = informed(run(*flooding(u, len), f, word(w), InitialConfig::uniform(n, 0)).final_configuration());
        NodeSet part = informed(run(*flooding(u, len), f, sub, InitialConfig::uniform(n, 0)).final_configuration());
        REQUIRE(part.subset_of(full));
    }
}

TEST_CASE("runs are deterministic") {
    EventFamily f = fig12_family();
    Scenario s = parse_scenario("H1,H2,H2", f);
    InitialConfig init = parse_init("a=1,b=0,c=1,d=0", f.base());
    auto p = broadcast_consensus(*f.base().find("c"), 2);
    SimulationTrace a = run(*p, f, s, init);
    SimulationTrace b = run(*p, f, s, init);
    CHECK(a.configurations == b.configurations);
    CHECK(a.decisions == b.decisions);
    CHECK(a.delivered == b.delivered);
}

TEST_CASE("one-round exchange solves H but not O_1") {
    EventFamily h = bundled_family("H-2node");
    ConsensusReport r = exhaustive_check(*one_round_exchange(), h, 1);
    CHECK(r.passed());
    CHECK(r.scenarios == 2);
    CHECK(r.inits == 4);
    CHECK(r.runs == 8);

    ConsensusReport o1 = exhaustive_check(*one_round_exchange(), bundled_family("O1-2node"), 1);
    CHECK(!o1.passed());
    CHECK(o1.counts[ViolationKind::agreement] > 0);
}

TEST_CASE("broadcast consensus on fig12 needs the right originator or more rounds") {
    EventFamily f = fig12_family();
    NodeId a = *f.base().find("a");
    NodeId c = *f.base().find("c");
    CHECK(exhaustive_check(*broadcast_consensus(c, 2), f, 2).passed());
    CHECK(!exhaustive_check(*broadcast_consensus(a, 2), f, 2).passed());
    CHECK(exhaustive_check(*broadcast_consensus(a, 3), f, 3).passed());
}

TEST_CASE("event detection on fig12") {
    EventFamily f = fig12_family();
    std::map<std::size_t, NodeId> map{{0, *f.base().find("c")}, {1, *f.base().find("d")}};
    ConsensusReport r = exhaustive_check(*event_detection_consensus(f, map), f, 1);
    CHECK(r.passed());
    CHECK(r.runs == 2 * 16);
}

TEST_CASE("event detection rejects families it cannot decode") {
    EventFamily o1 = bundled_family("O1-2node");
    std::map<std::size_t, NodeId> map{{0, 0}, {1, 1}, {2, 0}};
    CHECK_THROWS_AS(event_detection_consensus(o1, map), InvalidInput);
    EventFamily f = fig12_family();
    std::map<std::size_t, NodeId> missing{{0, 0}};
    CHECK_THROWS_AS(event_detection_consensus(f, missing), InvalidInput);
}

TEST_CASE("violations are classified") {
    EventFamily h = bundled_family("H-2node");
    ConsensusReport never = exhaustive_check(ConstantDecider(std::nullopt), h, 1);
    CHECK(never.failed_runs == never.runs);
    // One termination violation per undecided node.
    CHECK(never.counts[ViolationKind::termination] == 2 * never.runs);

    ConsensusReport ones = exhaustive_check(ConstantDecider(1), h, 1);
    // Only the all-0 input breaks validity.
    CHECK(ones.failed_runs == 2);
    CHECK(ones.counts[ViolationKind::validity] == 2);

    ConsensusReport flip = exhaustive_check(Flipper(), h, 2);
    CHECK(flip.counts[ViolationKind::unstable_decision] == flip.runs);
}

TEST_CASE("scenario enumeration") {
    auto words = all_scenarios(3, 2);
    CHECK(words.size() == 9);
    CHECK(words[1].word == std::vector<std::size_t>{0, 1});
    CHECK(words.back().word == std::vector<std::size_t>{2, 2});
    CHECK(all_scenarios(4, 0).size() == 1);
    CHECK_THROWS_AS(all_scenarios(10, 10, 1000), BudgetExceeded);
    CHECK_THROWS_AS(exhaustive_check(*one_round_exchange(), bundled_family("O1-2node"), 12, 1000), BudgetExceeded);
}

TEST_CASE("crash scheme prefixes run through explicit scenario lists") {
    CrashPrefixes crash = bundled_crash_scheme(2);
    NodeId w = *crash.family.base().find("W");
    ConsensusReport r = check_scenarios(*broadcast_consensus(w, 1), crash.family, crash.prefixes);
    CHECK(r.scenarios == 5);
    // W crashing from round one silences it, so B keeps its own input.
    CHECK(!r.passed());
}
