#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <vector>

namespace omlab {

using NodeId = std::uint32_t;

inline constexpr std::size_t max_nodes = 64;

// Set of node indices, stored as a 64-bit mask.
class NodeSet {
public:
    constexpr NodeSet() = default;
    constexpr explicit NodeSet(std::uint64_t bits) : bits_(bits) {}

    static constexpr NodeSet single(NodeId v) { return NodeSet(std::uint64_t{1} << v); }
    static constexpr NodeSet all(std::size_t n) {
        return NodeSet(n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1);
    }

    constexpr std::uint64_t bits() const { return bits_; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
    constexpr bool contains(NodeId v) const { return v < 64 && ((bits_ >> v) & 1U) != 0; }
    constexpr bool subset_of(NodeSet other) const { return (bits_ & ~other.bits_) == 0; }

    constexpr void insert(NodeId v) { bits_ |= std::uint64_t{1} << v; }
    constexpr void erase(NodeId v) { bits_ &= ~(std::uint64_t{1} << v); }

    constexpr NodeSet operator|(NodeSet o) const { return NodeSet(bits_ | o.bits_); }
    constexpr NodeSet operator&(NodeSet o) const { return NodeSet(bits_ & o.bits_); }
    constexpr NodeSet operator-(NodeSet o) const { return NodeSet(bits_ & ~o.bits_); }
    constexpr NodeSet& operator|=(NodeSet o) { bits_ |= o.bits_; return *this; }
    constexpr NodeSet& operator&=(NodeSet o) { bits_ &= o.bits_; return *this; }

    constexpr auto operator<=>(const NodeSet&) const = default;

    // Smallest member; undefined on the empty set.
    constexpr NodeId first() const { return static_cast<NodeId>(std::countr_zero(bits_)); }

    std::vector<NodeId> members() const {
        std::vector<NodeId> out;
        for (std::uint64_t b = bits_; b != 0; b &= b - 1) {
            out.push_back(static_cast<NodeId>(std::countr_zero(b)));
        }
        return out;
    }

    template <typename F>
    constexpr void for_each(F&& f) const {
        for (std::uint64_t b = bits_; b != 0; b &= b - 1) {
            f(static_cast<NodeId>(std::countr_zero(b)));
        }
    }

private:
    std::uint64_t bits_ = 0;
};

} // namespace omlab
