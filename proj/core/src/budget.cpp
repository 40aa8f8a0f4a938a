#include "omlab/budget.hpp"

#include <cstdlib>
#include <string>

#include "omlab/error.hpp"

namespace omlab {

namespace {

std::uint64_t parse_count(std::string_view text) {
    const std::string s(text);
    std::size_t used = 0;
    double value = 0;
    try {
        value = std::stod(s, &used);
    } catch (const std::exception&) {
        throw InvalidInput("budget value '" + s + "' is not a number");
    }
    if (used != s.size() || value < 1 || value > 1e18) {
        throw InvalidInput("budget value '" + s + "' must be a positive count");
    }
    return static_cast<std::uint64_t>(value);
}

} // namespace

Budget Budget::parse(std::string_view text, const Budget& base) {
    Budget b = base;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find(',', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view item = text.substr(start, end - start);
        start = end + 1;
        if (item.empty()) {
            continue;
        }
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) {
            const std::uint64_t v = parse_count(item);
            b.family_size = static_cast<std::size_t>(v);
            b.executions = v;
            b.runs = v;
            continue;
        }
        const std::string_view key = item.substr(0, eq);
        const std::uint64_t v = parse_count(item.substr(eq + 1));
        if (key == "family") {
            b.family_size = static_cast<std::size_t>(v);
        } else if (key == "nodes") {
            b.game_nodes = static_cast<std::size_t>(v);
        } else if (key == "executions") {
            b.executions = v;
        } else if (key == "runs") {
            b.runs = v;
        } else {
            throw InvalidInput("unknown budget key '" + std::string(key) + "'");
        }
    }
    return b;
}

Budget Budget::from_environment() {
    const char* env = std::getenv("OMLAB_BUDGET");
    if (env == nullptr) {
        return {};
    }
    return parse(env);
}

} // namespace omlab
