#include "omlab/omission.hpp"

#include <algorithm>
#include <bit>
#include <random>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "omlab/error.hpp"

namespace omlab {

GraphPtr share(Digraph g) {
    return std::make_shared<const Digraph>(std::move(g));
}

ArcMask head_mask(const Digraph& base, NodeSet nodes) {
    ArcMask m = 0;
    auto arcs = base.arcs();
    for (std::size_t i = 0; i < arcs.size(); ++i) {
        if (nodes.contains(arcs[i].head)) {
            m |= ArcMask{1} << i;
        }
    }
    return m;
}

namespace {

ArcMask full_mask(const Digraph& g) {
    return g.arc_count() == 64 ? ~ArcMask{0} : (ArcMask{1} << g.arc_count()) - 1;
}

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\n");
    if (b == std::string_view::npos) {
        return {};
    }
    auto e = s.find_last_not_of(" \t\n");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto pos = text.find(sep, start);
        if (pos == std::string_view::npos) {
            pos = text.size();
        }
        out.push_back(trim(text.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

// "ok" for the full graph, otherwise the omitted arcs.
std::string omission_name(const Digraph& g, ArcMask present) {
    ArcMask omitted = full_mask(g) & ~present;
    if (omitted == 0) {
        return "ok";
    }
    std::string name = "omit:";
    bool first = true;
    auto arcs = g.arcs();
    for (std::size_t i = 0; i < arcs.size(); ++i) {
        if (((omitted >> i) & 1U) != 0) {
            if (!first) {
                name += '/';
            }
            first = false;
            name += g.label(arcs[i].tail) + ">" + g.label(arcs[i].head);
        }
    }
    return name;
}

// Lexicographic on the list of omitted arc indices, shorter lists first.
bool omission_order(ArcMask full, ArcMask a, ArcMask b) {
    ArcMask oa = full & ~a;
    ArcMask ob = full & ~b;
    int ca = std::popcount(oa);
    int cb = std::popcount(ob);
    if (ca != cb) {
        return ca < cb;
    }
    while (oa != 0 && ob != 0) {
        int ia = std::countr_zero(oa);
        int ib = std::countr_zero(ob);
        if (ia != ib) {
            return ia < ib;
        }
        oa &= oa - 1;
        ob &= ob - 1;
    }
    return false;
}

std::size_t saturating_mul(std::size_t a, std::size_t b) {
    if (a != 0 && b > SIZE_MAX / a) {
        return SIZE_MAX;
    }
    return a * b;
}

std::size_t bounded_subset_count(std::size_t m, std::size_t f) {
    std::size_t total = 0;
    std::size_t binom = 1;
    for (std::size_t k = 0; k <= std::min(f, m); ++k) {
        total = total > SIZE_MAX - binom ? SIZE_MAX : total + binom;
        binom = saturating_mul(binom, m - k) / (k + 1);
    }
    return total;
}

// Every subset of the set bits of `pool` with at most `f` elements.
std::vector<ArcMask> small_subsets(ArcMask pool, std::size_t f) {
    std::vector<ArcMask> out{0};
    std::vector<ArcMask> frontier{0};
    std::vector<int> bits;
    for (ArcMask b = pool; b != 0; b &= b - 1) {
        bits.push_back(std::countr_zero(b));
    }
    for (std::size_t k = 1; k <= f && k <= bits.size(); ++k) {
        std::vector<ArcMask> next;
        for (ArcMask s : frontier) {
            int top = s == 0 ? -1 : 63 - std::countl_zero(s);
            for (int b : bits) {
                if (b > top) {
                    next.push_back(s | (ArcMask{1} << b));
                }
            }
        }
        out.insert(out.end(), next.begin(), next.end());
        frontier = std::move(next);
    }
    return out;
}

EventFamily family_from_masks(const GraphPtr& g, std::vector<ArcMask> masks) {
    const ArcMask full = full_mask(*g);
    std::sort(masks.begin(), masks.end(),
              [full](ArcMask a, ArcMask b) { return omission_order(full, a, b); });
    masks.erase(std::unique(masks.begin(), masks.end()), masks.end());
    std::vector<Event> events;
    std::vector<std::string> names;
    events.reserve(masks.size());
    names.reserve(masks.size());
    for (ArcMask m : masks) {
        events.emplace_back(g, m);
        names.push_back(omission_name(*g, m));
    }
    return EventFamily(g, std::move(events), std::move(names));
}

} // namespace

Event::Event(GraphPtr base, ArcMask present) : base_(std::move(base)), mask_(present) {
    if (!base_) {
        throw InvalidInput("event without base graph");
    }
    if (base_->arc_count() > max_base_arcs) {
        throw InvalidInput("base graph has " + std::to_string(base_->arc_count()) +
                           " arcs; events support at most 64");
    }
    if ((mask_ & ~full_mask(*base_)) != 0) {
        throw InvalidInput("event arc mask exceeds the base graph");
    }
    succ_.assign(base_->node_count(), NodeSet{});
    pred_.assign(base_->node_count(), NodeSet{});
    auto arcs = base_->arcs();
    for (std::size_t i = 0; i < arcs.size(); ++i) {
        if (((mask_ >> i) & 1U) != 0) {
            succ_[arcs[i].tail].insert(arcs[i].head);
            pred_[arcs[i].head].insert(arcs[i].tail);
        }
    }
}

Event Event::full(GraphPtr base) {
    ArcMask m = full_mask(*base);
    return Event(std::move(base), m);
}

Event Event::from_arcs(GraphPtr base, std::span<const Arc> arcs) {
    ArcMask m = 0;
    for (const Arc& a : arcs) {
        auto idx = base->arc_index(a);
        if (!idx) {
            throw InvalidInput("arc " + base->label(a.tail) + "->" + base->label(a.head) +
                               " is not an arc of the base graph");
        }
        m |= ArcMask{1} << *idx;
    }
    return Event(std::move(base), m);
}

std::size_t Event::arc_count() const {
    return static_cast<std::size_t>(std::popcount(mask_));
}

std::vector<Arc> Event::arcs() const {
    std::vector<Arc> out;
    auto all = base_->arcs();
    for (std::size_t i = 0; i < all.size(); ++i) {
        if (((mask_ >> i) & 1U) != 0) {
            out.push_back(all[i]);
        }
    }
    return out;
}

bool Event::contains(Arc a) const {
    auto idx = base_->arc_index(a);
    return idx && ((mask_ >> *idx) & 1U) != 0;
}

Digraph Event::as_digraph() const {
    return Digraph(base_->node_count(), arcs(), base_->labels());
}

NodeSet sources(const Event& e) {
    const NodeSet everyone = NodeSet::all(e.node_count());
    NodeSet result;
    for (NodeId u = 0; u < e.node_count(); ++u) {
        if (reach_closure(e.successors(), NodeSet::single(u)) == everyone) {
            result.insert(u);
        }
    }
    return result;
}

NodeSet reachable_from(const Event& e, NodeId u) {
    if (u >= e.node_count()) {
        throw InvalidInput("node " + std::to_string(u) + " out of range");
    }
    return reach_closure(e.successors(), NodeSet::single(u));
}

EventFamily::EventFamily(GraphPtr base, std::vector<Event> events, std::vector<std::string> names)
    : base_(std::move(base)), events_(std::move(events)), names_(std::move(names)) {
    if (!base_) {
        throw InvalidInput("event family without base graph");
    }
    for (const Event& e : events_) {
        if (e.base_ptr() != base_ && !(e.base() == *base_)) {
            throw InvalidInput("event family mixes base graphs");
        }
    }
    if (names_.empty()) {
        for (std::size_t i = 0; i < events_.size(); ++i) {
            names_.push_back("E" + std::to_string(i));
        }
    }
    if (names_.size() != events_.size()) {
        throw InvalidInput("event name count does not match event count");
    }
    std::unordered_set<std::string> seen_names;
    for (const auto& n : names_) {
        if (n.empty() || !seen_names.insert(n).second) {
            throw InvalidInput("event names must be non-empty and unique ('" + n + "')");
        }
    }
    sorted_.reserve(events_.size());
    for (std::size_t i = 0; i < events_.size(); ++i) {
        sorted_.emplace_back(events_[i].mask(), i);
    }
    std::sort(sorted_.begin(), sorted_.end());
    for (std::size_t i = 1; i < sorted_.size(); ++i) {
        if (sorted_[i].first == sorted_[i - 1].first) {
            throw InvalidInput("duplicate events '" + names_[sorted_[i - 1].second] + "' and '" +
                               names_[sorted_[i].second] + "'");
        }
    }
}

std::optional<std::size_t> EventFamily::find(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == name) {
            return i;
        }
    }
    return std::nullopt;
}

std::optional<std::size_t> EventFamily::index_of(ArcMask mask) const {
    auto it = std::lower_bound(sorted_.begin(), sorted_.end(), std::pair<ArcMask, std::size_t>{mask, 0});
    if (it == sorted_.end() || it->first != mask) {
        return std::nullopt;
    }
    return it->second;
}

bool EventFamily::operator==(const EventFamily& o) const {
    if (!(*base_ == *o.base_) || names_ != o.names_ || events_.size() != o.events_.size()) {
        return false;
    }
    for (std::size_t i = 0; i < events_.size(); ++i) {
        if (events_[i].mask() != o.events_[i].mask()) {
            return false;
        }
    }
    return true;
}

Scenario expand(const ScenarioRecipe& recipe, std::size_t family_size, std::size_t length) {
    if (family_size == 0) {
        throw InvalidInput("scenario over an empty family");
    }
    Scenario s;
    s.generator = recipe;
    s.word.reserve(length);
    switch (recipe.kind) {
    case ScenarioRecipe::Kind::constant:
        s.word.assign(length, recipe.event);
        break;
    case ScenarioRecipe::Kind::round_robin:
        for (std::size_t r = 0; r < length; ++r) {
            s.word.push_back((recipe.event + r) % family_size);
        }
        break;
    case ScenarioRecipe::Kind::seeded_random: {
        std::mt19937_64 rng(recipe.seed);
        std::uniform_int_distribution<std::size_t> pick(0, family_size - 1);
        for (std::size_t r = 0; r < length; ++r) {
            s.word.push_back(pick(rng));
        }
        break;
    }
    case ScenarioRecipe::Kind::eventually_constant:
        for (std::size_t r = 0; r < length; ++r) {
            s.word.push_back(r < recipe.prefix.size() ? recipe.prefix[r] : recipe.event);
        }
        break;
    }
    for (std::size_t idx : s.word) {
        if (idx >= family_size) {
            throw InvalidInput("scenario recipe refers to event " + std::to_string(idx) +
                               " outside the family");
        }
    }
    return s;
}

void validate(const Scenario& s, const EventFamily& family) {
    for (std::size_t idx : s.word) {
        if (idx >= family.size()) {
            throw InvalidInput("scenario letter " + std::to_string(idx) +
                               " is not an event of the family");
        }
    }
}

Scenario subword(const Scenario& w, std::span<const std::size_t> positions) {
    Scenario out;
    for (std::size_t i = 0; i < positions.size(); ++i) {
        if (positions[i] >= w.word.size()) {
            throw InvalidInput("subword position " + std::to_string(positions[i]) + " out of range");
        }
        if (i > 0 && positions[i] <= positions[i - 1]) {
            throw InvalidInput("subword positions must be strictly increasing");
        }
        out.word.push_back(w.word[positions[i]]);
    }
    return out;
}

Scenario parse_scenario(std::string_view text, const EventFamily& family) {
    Scenario s;
    if (trim(text).empty()) {
        return s;
    }
    for (const auto& name : split(text, ',')) {
        auto idx = family.find(name);
        if (!idx) {
            throw InvalidInput("unknown event '" + name + "' in scenario");
        }
        s.word.push_back(*idx);
    }
    return s;
}

std::string format_scenario(const Scenario& s, const EventFamily& family) {
    std::string out;
    for (std::size_t i = 0; i < s.word.size(); ++i) {
        if (i > 0) {
            out += ',';
        }
        out += family.name(s.word[i]);
    }
    return out;
}

InitialConfig::InitialConfig(std::vector<int> values) : values_(std::move(values)) {
    for (int v : values_) {
        if (v != 0 && v != 1) {
            throw InvalidInput("initial values must be 0 or 1");
        }
    }
}

InitialConfig InitialConfig::from_bits(std::size_t n, std::uint64_t ones) {
    std::vector<int> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = static_cast<int>((ones >> i) & 1U);
    }
    return InitialConfig(std::move(v));
}

InitialConfig InitialConfig::uniform(std::size_t n, int value) {
    return InitialConfig(std::vector<int>(n, value));
}

NodeSet InitialConfig::ones() const {
    NodeSet s;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (values_[i] == 1) {
            s.insert(static_cast<NodeId>(i));
        }
    }
    return s;
}

std::optional<int> InitialConfig::uniform_value() const {
    if (values_.empty()) {
        return std::nullopt;
    }
    for (int v : values_) {
        if (v != values_.front()) {
            return std::nullopt;
        }
    }
    return values_.front();
}

InitialConfig parse_init(std::string_view text, const Digraph& g) {
    std::vector<int> values(g.node_count(), -1);
    for (const auto& item : split(text, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw InvalidInput("initial value '" + item + "' is not of the form node=value");
        }
        auto node = g.find(trim(std::string_view(item).substr(0, eq)));
        std::string value = trim(std::string_view(item).substr(eq + 1));
        if (!node) {
            throw InvalidInput("unknown node in '" + item + "'");
        }
        if (value != "0" && value != "1") {
            throw InvalidInput("initial value in '" + item + "' must be 0 or 1");
        }
        if (values[*node] != -1) {
            throw InvalidInput("node assigned twice in '" + item + "'");
        }
        values[*node] = value == "1" ? 1 : 0;
    }
    for (std::size_t v = 0; v < values.size(); ++v) {
        if (values[v] == -1) {
            throw InvalidInput("no initial value for node " + g.label(static_cast<NodeId>(v)));
        }
    }
    return InitialConfig(std::move(values));
}

std::string format_init(const InitialConfig& init, const Digraph& g) {
    std::string out;
    for (NodeId v = 0; v < init.size(); ++v) {
        if (v > 0) {
            out += ',';
        }
        out += g.label(v) + "=" + std::to_string(init.value(v));
    }
    return out;
}

ConvexityResult is_convex(const EventFamily& family) {
    const auto& events = family.events();
    ArcMask seen = 0;
    for (const Event& e : events) {
        seen |= e.mask();
    }
    for (std::size_t i = 0; i < events.size(); ++i) {
        ArcMask missing = seen & ~events[i].mask();
        for (ArcMask b = missing; b != 0; b &= b - 1) {
            const int bit = std::countr_zero(b);
            const ArcMask arc = ArcMask{1} << bit;
            if (family.contains(events[i].mask() | arc)) {
                continue;
            }
            std::size_t donor = 0;
            while ((events[donor].mask() & arc) == 0) {
                ++donor;
            }
            return {false, ConvexityViolation{i, donor, family.base().arcs()[static_cast<std::size_t>(bit)]}};
        }
    }
    return {};
}

std::string_view to_string(OmissionMetric m) {
    switch (m) {
    case OmissionMetric::global:
        return "global";
    case OmissionMetric::per_node_send:
        return "send";
    case OmissionMetric::per_node_receive:
        return "recv";
    }
    return "global";
}

std::optional<OmissionMetric> parse_metric(std::string_view text) {
    if (text == "global") {
        return OmissionMetric::global;
    }
    if (text == "send" || text == "per-node-send") {
        return OmissionMetric::per_node_send;
    }
    if (text == "recv" || text == "per-node-receive") {
        return OmissionMetric::per_node_receive;
    }
    return std::nullopt;
}

EventFamily generate_bounded_omissions(const GraphPtr& g, std::size_t f, OmissionMetric metric,
                                       std::size_t cap) {
    if (g->arc_count() > max_base_arcs) {
        throw InvalidInput("base graph has more than 64 arcs");
    }
    const ArcMask full = full_mask(*g);
    std::vector<ArcMask> masks;

    if (metric == OmissionMetric::global) {
        if (bounded_subset_count(g->arc_count(), f) > cap) {
            throw BudgetExceeded("bounded-omission family exceeds the cap of " + std::to_string(cap) +
                                 " events");
        }
        for (ArcMask omitted : small_subsets(full, f)) {
            masks.push_back(full & ~omitted);
        }
        return family_from_masks(g, std::move(masks));
    }

    // Per-node metrics: independent choice of omitted arcs at every node.
    std::vector<ArcMask> pools(g->node_count(), 0);
    auto arcs = g->arcs();
    for (std::size_t i = 0; i < arcs.size(); ++i) {
        NodeId owner = metric == OmissionMetric::per_node_send ? arcs[i].tail : arcs[i].head;
        pools[owner] |= ArcMask{1} << i;
    }
    std::size_t total = 1;
    for (ArcMask p : pools) {
        total = saturating_mul(total, bounded_subset_count(static_cast<std::size_t>(std::popcount(p)), f));
    }
    if (total > cap) {
        throw BudgetExceeded("bounded-omission family exceeds the cap of " + std::to_string(cap) +
                             " events");
    }
    std::vector<ArcMask> omitted{0};
    for (ArcMask p : pools) {
        std::vector<ArcMask> next;
        auto choices = small_subsets(p, f);
        next.reserve(omitted.size() * choices.size());
        for (ArcMask o : omitted) {
            for (ArcMask c : choices) {
                next.push_back(o | c);
            }
        }
        omitted = std::move(next);
    }
    for (ArcMask o : omitted) {
        masks.push_back(full & ~o);
    }
    return family_from_masks(g, std::move(masks));
}

EventFamily convex_closure(const EventFamily& family, std::size_t cap) {
    ArcMask seen = 0;
    for (const Event& e : family.events()) {
        seen |= e.mask();
    }
    std::unordered_set<ArcMask> members;
    std::vector<ArcMask> order;
    for (const Event& e : family.events()) {
        members.insert(e.mask());
        order.push_back(e.mask());
    }
    for (std::size_t i = 0; i < order.size(); ++i) {
        ArcMask m = order[i];
        for (ArcMask b = seen & ~m; b != 0; b &= b - 1) {
            ArcMask grown = m | (b & (~b + 1));
            if (members.insert(grown).second) {
                if (members.size() > cap) {
                    throw BudgetExceeded("convex closure exceeds the cap of " + std::to_string(cap) +
                                         " events");
                }
                order.push_back(grown);
            }
        }
    }
    std::vector<Event> events(family.events());
    std::vector<std::string> names(family.names());
    std::unordered_set<std::string> used(names.begin(), names.end());
    for (std::size_t i = family.size(); i < order.size(); ++i) {
        events.emplace_back(family.base_ptr(), order[i]);
        std::string name = omission_name(family.base(), order[i]);
        for (int k = 2; used.count(name) != 0; ++k) {
            name = omission_name(family.base(), order[i]) + "#" + std::to_string(k);
        }
        used.insert(name);
        names.push_back(std::move(name));
    }
    return EventFamily(family.base_ptr(), std::move(events), std::move(names));
}

CrashPrefixes crash_scheme_prefixes(const GraphPtr& g, std::size_t horizon) {
    std::vector<Event> events{Event::full(g)};
    std::vector<std::string> names{"OK"};
    // crashed[v]: index of the event in which v's messages are lost.
    std::vector<std::size_t> crashed(g->node_count(), 0);
    for (NodeId v = 0; v < g->node_count(); ++v) {
        ArcMask lost = 0;
        auto arcs = g->arcs();
        for (std::size_t i = 0; i < arcs.size(); ++i) {
            if (arcs[i].tail == v) {
                lost |= ArcMask{1} << i;
            }
        }
        Event e(g, full_mask(*g) & ~lost);
        auto it = std::find(events.begin(), events.end(), e);
        if (it != events.end()) {
            crashed[v] = static_cast<std::size_t>(it - events.begin());
            continue;
        }
        crashed[v] = events.size();
        events.push_back(std::move(e));
        names.push_back("OMIT_" + g->label(v));
    }
    EventFamily family(g, std::move(events), std::move(names));

    std::set<std::vector<std::size_t>> words;
    words.insert(std::vector<std::size_t>(horizon, 0));
    for (std::size_t k = 0; k < horizon; ++k) {
        for (NodeId v = 0; v < g->node_count(); ++v) {
            std::vector<std::size_t> w(horizon, crashed[v]);
            std::fill(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(k), std::size_t{0});
            words.insert(std::move(w));
        }
    }
    std::vector<Scenario> prefixes;
    for (const auto& w : words) {
        prefixes.push_back(Scenario{w, std::nullopt});
    }
    return {std::move(family), std::move(prefixes)};
}

} // namespace omlab
