#include "omlab/bundled.hpp"

#include "omlab/error.hpp"

namespace omlab {

GraphPtr two_node_graph() {
    static const GraphPtr g = share(Digraph(2, {{0, 1}, {1, 0}}, {"W", "B"}));
    return g;
}

Event two_node_event(std::string_view name) {
    const GraphPtr g = two_node_graph();
    constexpr NodeId white = 0;
    constexpr NodeId black = 1;
    if (name == "OK") {
        return Event::full(g);
    }
    if (name == "OMIT_W") {
        const Arc arcs[] = {{black, white}};
        return Event::from_arcs(g, arcs);
    }
    if (name == "OMIT_B") {
        const Arc arcs[] = {{white, black}};
        return Event::from_arcs(g, arcs);
    }
    if (name == "NONE") {
        return Event(g, 0);
    }
    throw InvalidInput("unknown two-node event '" + std::string(name) + "'");
}

namespace {

EventFamily two_node_family(std::vector<std::string> names) {
    std::vector<Event> events;
    for (const auto& n : names) {
        events.push_back(two_node_event(n));
    }
    return EventFamily(two_node_graph(), std::move(events), std::move(names));
}

} // namespace

EventFamily fig12_family() {
    enum : NodeId { a, b, c, d };
    const std::vector<Arc> h1 = {{c, a}, {c, b}, {d, a}, {d, b}, {a, b}, {c, d}, {b, c}};
    const std::vector<Arc> h2 = {{c, a}, {c, b}, {d, a}, {d, b}, {b, a}, {d, c}, {a, d}};
    std::vector<Arc> all = h1;
    all.insert(all.end(), h2.begin(), h2.end());
    const GraphPtr g = share(Digraph(4, all, {"a", "b", "c", "d"}));
    return EventFamily(g, {Event::from_arcs(g, h1), Event::from_arcs(g, h2)}, {"H1", "H2"});
}

EventFamily bundled_family(std::string_view name) {
    if (name == "reliable-2node") {
        return two_node_family({"OK"});
    }
    if (name == "O1-2node") {
        return two_node_family({"OK", "OMIT_W", "OMIT_B"});
    }
    if (name == "H-2node") {
        return two_node_family({"OMIT_W", "OMIT_B"});
    }
    if (name == "fig12") {
        return fig12_family();
    }
    if (name == "crash-C1") {
        throw InvalidInput("crash-C1 is not a mobile scheme; it only supports simulation");
    }
    throw InvalidInput("unknown bundled family '" + std::string(name) + "'");
}

std::vector<std::string> bundled_names() {
    return {"reliable-2node", "O1-2node", "H-2node", "fig12", "crash-C1"};
}

CrashPrefixes bundled_crash_scheme(std::size_t horizon) {
    return crash_scheme_prefixes(two_node_graph(), horizon);
}

} // namespace omlab
