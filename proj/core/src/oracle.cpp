#include "omlab/oracle.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>

#include "omlab/error.hpp"
#include "omlab/solvability.hpp"

namespace omlab {

namespace {

constexpr std::uint32_t tag_initial = 0;
constexpr std::uint32_t tag_round = 1;

std::uint64_t hash_key(std::span<const std::uint32_t> key) {
    std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ key.size();
    for (std::uint32_t x : key) {
        h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        h *= 0xff51afd7ed558ccdULL;
    }
    return h ^ (h >> 33);
}

} // namespace

std::span<const std::uint32_t> ViewTable::key_of(Id id) const {
    return {arena_.data() + offsets_[id], lengths_[id]};
}

ViewTable::Id ViewTable::intern(std::span<const std::uint32_t> key) {
    if (slots_.empty() || 2 * (offsets_.size() + 1) > slots_.size()) {
        std::vector<Id> bigger(slots_.empty() ? 1024 : slots_.size() * 2, 0);
        const std::size_t mask = bigger.size() - 1;
        for (Id id = 0; id < offsets_.size(); ++id) {
            std::size_t pos = hash_key(key_of(id)) & mask;
            while (bigger[pos] != 0) {
                pos = (pos + 1) & mask;
            }
            bigger[pos] = id + 1;
        }
        slots_ = std::move(bigger);
    }
    const std::size_t mask = slots_.size() - 1;
    std::size_t pos = hash_key(key) & mask;
    while (slots_[pos] != 0) {
        const Id id = slots_[pos] - 1;
        auto existing = key_of(id);
        if (std::equal(existing.begin(), existing.end(), key.begin(), key.end())) {
            return id;
        }
        pos = (pos + 1) & mask;
    }
    if (offsets_.size() >= std::numeric_limits<Id>::max() - 1) {
        throw BudgetExceeded("view table is full");
    }
    const Id id = static_cast<Id>(offsets_.size());
    offsets_.push_back(arena_.size());
    lengths_.push_back(static_cast<std::uint32_t>(key.size()));
    arena_.insert(arena_.end(), key.begin(), key.end());
    slots_[pos] = id + 1;
    return id;
}

ViewTable::Id ViewTable::initial(NodeId node, int input) {
    const std::uint32_t key[] = {tag_initial, node, static_cast<std::uint32_t>(input)};
    return intern(key);
}

ViewTable::Id ViewTable::extend(NodeId node, Id own, std::span<const std::pair<NodeId, Id>> heard) {
    scratch_.clear();
    scratch_.push_back(tag_round);
    scratch_.push_back(node);
    scratch_.push_back(own);
    for (const auto& [from, view] : heard) {
        scratch_.push_back(from);
        scratch_.push_back(view);
    }
    return intern(scratch_);
}

std::optional<ViewTable::Id> ViewTable::find_initial(NodeId node, int input) const {
    const std::uint32_t key[] = {tag_initial, node, static_cast<std::uint32_t>(input)};
    if (slots_.empty()) {
        return std::nullopt;
    }
    const std::size_t mask = slots_.size() - 1;
    for (std::size_t pos = hash_key(key) & mask; slots_[pos] != 0; pos = (pos + 1) & mask) {
        auto existing = key_of(slots_[pos] - 1);
        if (std::equal(existing.begin(), existing.end(), std::begin(key), std::end(key))) {
            return slots_[pos] - 1;
        }
    }
    return std::nullopt;
}

std::size_t ViewTable::depth_of(Id id) const {
    std::size_t d = 0;
    while (key_of(id)[0] == tag_round) {
        id = key_of(id)[2];
        ++d;
    }
    return d;
}

std::string ViewTable::describe(Id id, const Digraph& g) const {
    auto key = key_of(id);
    if (key[0] == tag_initial) {
        return g.label(key[1]) + "[" + std::to_string(key[2]) + "]";
    }
    std::string out = g.label(key[1]) + "(" + describe(key[2], g) + "|";
    for (std::size_t i = 3; i + 1 < key.size(); i += 2) {
        if (i > 3) {
            out += ",";
        }
        out += g.label(key[i]) + ":" + describe(key[i + 1], g);
    }
    return out + ")";
}

DecisionTableProtocol::DecisionTableProtocol(GraphPtr base, std::size_t rounds, ViewTable views,
                                             std::unordered_map<ViewTable::Id, int> decisions)
    : base_(std::move(base)), rounds_(rounds), views_(std::move(views)), decisions_(std::move(decisions)) {}

std::string DecisionTableProtocol::name() const {
    return "decision-table(" + std::to_string(rounds_) + ")";
}

void DecisionTableProtocol::check_compatible(const EventFamily& family) const {
    if (!(family.base() == *base_)) {
        throw InvalidInput("decision-table protocol was built for a different graph");
    }
}

LocalState DecisionTableProtocol::initial(NodeId self, int input) const {
    LocalState s;
    s.input = input;
    std::lock_guard lock(mutex_);
    s.view = views_.initial(self, input);
    if (rounds_ == 0) {
        if (auto it = decisions_.find(s.view); it != decisions_.end()) {
            s.decision = it->second;
        }
    }
    return s;
}

std::optional<Message> DecisionTableProtocol::send(const LocalState& state, NodeId, NodeId,
                                                   std::size_t) const {
    return Message{state.input, state.view};
}

LocalState DecisionTableProtocol::receive(const LocalState& state, NodeId self, std::span<const Delivery> inbox,
                                          std::size_t round) const {
    std::vector<std::pair<NodeId, ViewTable::Id>> heard;
    for (const Delivery& d : inbox) {
        if (d.message) {
            heard.emplace_back(d.from, d.message->view);
        }
    }
    std::sort(heard.begin(), heard.end());
    LocalState s = state;
    std::lock_guard lock(mutex_);
    s.view = views_.extend(self, state.view, heard);
    if (round == rounds_) {
        if (auto it = decisions_.find(s.view); it != decisions_.end()) {
            s.decision = it->second;
        }
    }
    return s;
}

std::vector<std::pair<std::string, int>> DecisionTableProtocol::describe() const {
    std::vector<std::pair<std::string, int>> out;
    std::lock_guard lock(mutex_);
    for (const auto& [id, value] : decisions_) {
        out.emplace_back(views_.describe(id, *base_), value);
    }
    std::sort(out.begin(), out.end());
    return out;
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

    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent_[std::max(a, b)] = std::min(a, b);
        }
    }

private:
    std::vector<std::size_t> parent_;
};

std::uint64_t checked_pow(std::uint64_t base, std::size_t exp, std::uint64_t limit) {
    std::uint64_t r = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        if (base != 0 && r > limit / base) {
            return limit + 1;
        }
        r *= base;
    }
    return r;
}

// All executions of one horizon, with every node's final view.
struct ExecutionSpace {
    std::size_t nodes = 0;
    std::size_t rounds = 0;
    std::size_t family_size = 0;
    std::uint64_t inits = 0;
    std::uint64_t count = 0;
    ViewTable views;
    std::vector<ViewTable::Id> final_views;  // count * nodes

    // Execution id = word index * inits + init bits; words in lexicographic order.
    Execution execution(std::uint64_t id) const {
        std::uint64_t word = id / inits;
        Scenario s;
        s.word.assign(rounds, 0);
        for (std::size_t pos = rounds; pos-- > 0;) {
            s.word[pos] = static_cast<std::size_t>(word % family_size);
            word /= family_size;
        }
        return {InitialConfig::from_bits(nodes, id % inits), std::move(s)};
    }
};

ExecutionSpace enumerate(const EventFamily& family, std::size_t rounds, std::uint64_t max_executions) {
    ExecutionSpace space;
    const Digraph& g = family.base();
    space.nodes = g.node_count();
    space.rounds = rounds;
    space.family_size = family.size();
    if (space.nodes >= 40) {
        throw BudgetExceeded("too many nodes for the execution oracle");
    }
    space.inits = std::uint64_t{1} << space.nodes;
    const std::uint64_t words = checked_pow(family.size(), rounds, max_executions);
    if (words > max_executions || space.inits > max_executions / words) {
        throw BudgetExceeded("oracle at horizon " + std::to_string(rounds) + " needs more than " +
                             std::to_string(max_executions) + " executions");
    }
    space.count = words * space.inits;
    space.final_views.resize(space.count * space.nodes);

    const std::size_t n = space.nodes;
    std::vector<std::vector<ViewTable::Id>> level(rounds + 1, std::vector<ViewTable::Id>(n));
    std::vector<std::pair<NodeId, ViewTable::Id>> heard;
    std::uint64_t word_index = 0;
    std::uint64_t bits = 0;

    auto descend = [&](auto&& self, std::size_t depth) -> void {
        if (depth == rounds) {
            const std::uint64_t id = word_index * space.inits + bits;
            std::copy(level[depth].begin(), level[depth].end(), space.final_views.begin() +
                      static_cast<std::ptrdiff_t>(id * n));
            ++word_index;
            return;
        }
        for (std::size_t e = 0; e < family.size(); ++e) {
            const Event& event = family.event(e);
            for (NodeId v = 0; v < n; ++v) {
                heard.clear();
                event.delivered_to(v).for_each([&](NodeId u) { heard.emplace_back(u, level[depth][u]); });
                level[depth + 1][v] = space.views.extend(v, level[depth][v], heard);
            }
            self(self, depth + 1);
        }
    };
    for (bits = 0; bits < space.inits; ++bits) {
        for (NodeId v = 0; v < n; ++v) {
            level[0][v] = space.views.initial(v, static_cast<int>((bits >> v) & 1U));
        }
        word_index = 0;
        descend(descend, 0);
    }
    return space;
}

IndistinguishabilityChain extract_chain(const ExecutionSpace& space, UnionFind& uf,
                                        const std::vector<std::uint8_t>& mixed_root) {
    const std::size_t n = space.nodes;
    const std::uint64_t ones = space.inits - 1;
    // CSR index: view -> executions holding it.
    std::vector<std::uint64_t> start(space.views.size() + 1, 0);
    for (ViewTable::Id v : space.final_views) {
        ++start[v + 1];
    }
    std::partial_sum(start.begin(), start.end(), start.begin());
    std::vector<std::uint64_t> holders(space.final_views.size());
    {
        std::vector<std::uint64_t> fill(start.begin(), start.end() - 1);
        for (std::uint64_t i = 0; i < space.final_views.size(); ++i) {
            holders[fill[space.final_views[i]]++] = i / n;
        }
    }
    constexpr std::uint64_t none = ~std::uint64_t{0};
    std::vector<std::uint64_t> parent(space.count, none);
    std::vector<NodeId> via(space.count, 0);
    std::deque<std::uint64_t> queue;
    for (std::uint64_t id = 0; id < space.count; id += space.inits) {
        if (mixed_root[uf.find(id)] != 0) {
            parent[id] = id;
            queue.push_back(id);
        }
    }
    std::uint64_t target = none;
    while (!queue.empty() && target == none) {
        const std::uint64_t x = queue.front();
        queue.pop_front();
        for (NodeId v = 0; v < n && target == none; ++v) {
            const ViewTable::Id view = space.final_views[x * n + v];
            for (std::uint64_t k = start[view]; k < start[view + 1]; ++k) {
                const std::uint64_t y = holders[k];
                if (parent[y] != none) {
                    continue;
                }
                parent[y] = x;
                via[y] = v;
                if (y % space.inits == ones) {
                    target = y;
                    break;
                }
                queue.push_back(y);
            }
        }
    }
    IndistinguishabilityChain chain;
    if (target == none) {
        return chain;
    }
    std::vector<std::uint64_t> path{target};
    while (parent[path.back()] != path.back()) {
        chain.shared_node.push_back(via[path.back()]);
        path.push_back(parent[path.back()]);
    }
    std::reverse(path.begin(), path.end());
    std::reverse(chain.shared_node.begin(), chain.shared_node.end());
    for (std::uint64_t id : path) {
        chain.executions.push_back(space.execution(id));
    }
    return chain;
}

} // namespace

OracleResult min_consensus_rounds(const EventFamily& family, std::size_t max_horizon,
                                  std::uint64_t max_executions) {
    if (family.empty()) {
        throw InvalidInput("oracle over an empty family");
    }
    OracleResult result;
    result.max_horizon = max_horizon;
    for (std::size_t r = 0; r <= max_horizon; ++r) {
        ExecutionSpace space = enumerate(family, r, max_executions);
        const std::size_t n = space.nodes;
        const std::uint64_t ones = space.inits - 1;

        UnionFind uf(space.count);
        {
            constexpr std::uint64_t unseen = ~std::uint64_t{0};
            std::vector<std::uint64_t> first(space.views.size(), unseen);
            for (std::uint64_t i = 0; i < space.final_views.size(); ++i) {
                std::uint64_t& f = first[space.final_views[i]];
                if (f == unseen) {
                    f = i / n;
                } else {
                    uf.unite(f, i / n);
                }
            }
        }
        // bit 0: holds an all-0 execution, bit 1: holds an all-1 execution.
        std::vector<std::uint8_t> flags(space.count, 0);
        std::size_t components = 0;
        for (std::uint64_t id = 0; id < space.count; ++id) {
            const std::size_t root = uf.find(id);
            components += root == id ? 1 : 0;
            const std::uint64_t bits = id % space.inits;
            if (bits == 0) {
                flags[root] |= 1;
            }
            if (bits == ones) {
                flags[root] |= 2;
            }
        }
        std::vector<std::uint8_t> mixed(space.count, 0);
        bool solvable = true;
        for (std::uint64_t id = 0; id < space.count; ++id) {
            if (flags[id] == 3) {
                mixed[id] = 1;
                solvable = false;
            }
        }
        result.horizons.push_back({r, space.count, components, solvable});

        if (solvable) {
            // A component takes the value of the uniform input it contains, else 0.
            std::unordered_map<ViewTable::Id, int> decisions;
            decisions.reserve(space.views.size());
            for (std::uint64_t id = 0; id < space.count; ++id) {
                const int value = (flags[uf.find(id)] & 2) != 0 ? 1 : 0;
                for (std::size_t v = 0; v < n; ++v) {
                    decisions.emplace(space.final_views[id * n + v], value);
                }
            }
            result.rounds = r;
            result.protocol = std::make_shared<DecisionTableProtocol>(family.base_ptr(), r,
                                                                      std::move(space.views),
                                                                      std::move(decisions));
            return result;
        }
        if (r == max_horizon) {
            result.witness = extract_chain(space, uf, mixed);
        }
    }
    return result;
}

namespace {

std::vector<std::string> full_views(const Execution& ex, const EventFamily& family) {
    const Digraph& g = family.base();
    const std::size_t n = g.node_count();
    std::vector<std::string> views(n);
    for (NodeId v = 0; v < n; ++v) {
        views[v] = "<" + std::to_string(v) + "=" + std::to_string(ex.init.value(v)) + ">";
    }
    for (std::size_t letter : ex.scenario.word) {
        const Event& e = family.event(letter);
        std::vector<std::string> next(n);
        for (NodeId v = 0; v < n; ++v) {
            std::string s = "(" + views[v] + "|";
            for (const Arc& a : e.arcs()) {
                if (a.head == v) {
                    s += std::to_string(a.tail) + ":" + views[a.tail] + ";";
                }
            }
            next[v] = s + ")";
        }
        views = std::move(next);
    }
    return views;
}

} // namespace

bool verify_chain(const IndistinguishabilityChain& chain, const EventFamily& family) {
    const auto& ex = chain.executions;
    if (ex.size() < 2 || chain.shared_node.size() + 1 != ex.size()) {
        return false;
    }
    const std::size_t n = family.base().node_count();
    for (const Execution& e : ex) {
        if (e.init.size() != n || e.scenario.size() != ex.front().scenario.size()) {
            return false;
        }
        for (std::size_t letter : e.scenario.word) {
            if (letter >= family.size()) {
                return false;
            }
        }
    }
    const auto first = ex.front().init.uniform_value();
    const auto last = ex.back().init.uniform_value();
    if (!first || !last || *first == *last) {
        return false;
    }
    std::vector<std::string> prev = full_views(ex.front(), family);
    for (std::size_t i = 0; i + 1 < ex.size(); ++i) {
        std::vector<std::string> next = full_views(ex[i + 1], family);
        const NodeId v = chain.shared_node[i];
        if (v >= n || prev[v] != next[v]) {
            return false;
        }
        prev = std::move(next);
    }
    return true;
}

AuditReport equal_rounds_audit(const EventFamily& family, std::size_t fallback_horizon,
                               std::uint64_t max_executions) {
    if (!is_convex(family).convex) {
        throw InvalidInput("equal-rounds audit needs a convex family");
    }
    AuditReport report;
    auto best = optimal_broadcast_rounds(family);
    bool all_have_sources = std::all_of(family.events().begin(), family.events().end(),
                                        [](const Event& e) { return !sources(e).empty(); });
    if (best && all_have_sources) {
        report.broadcast_rounds = best->rounds;
        report.horizon = best->rounds;
    } else {
        report.horizon = fallback_horizon;
    }
    OracleResult oracle = min_consensus_rounds(family, report.horizon, max_executions);
    report.consensus_rounds = oracle.rounds;
    report.agrees = report.broadcast_rounds == report.consensus_rounds;
    return report;
}

} // namespace omlab
