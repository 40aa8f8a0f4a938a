#pragma once

#include <optional>
#include <string>
#include <vector>

#include "omlab/omission.hpp"

namespace omlab {

// Arcs of `e` whose head lies in `nodes`: what `nodes` jointly receive.
ArcMask in_x_mask(const Event& e, NodeSet nodes);
std::vector<Arc> in_x(const Event& e, NodeSet nodes);

// The sources of `k` receive the same arcs under `left` and `right`.
bool alpha_related(const Event& left, const Event& right, const Event& k);

/// One step of an indistinguishability chain: `left` and `right` are
/// alpha-related through the sources of `witness`. Indices into the family.
struct AlphaWitness {
    std::size_t left = 0;
    std::size_t right = 0;
    std::size_t witness = 0;

    bool operator==(const AlphaWitness&) const = default;
};

struct Partition {
    // Each class sorted; classes ordered by their smallest member.
    std::vector<std::vector<std::size_t>> classes;
    std::vector<std::size_t> class_of;
};

/// Coarsest closed equivalence inside alpha*, with a spanning tree of
/// alpha edges per class whose witnesses all lie in that class.
struct BetaPartition {
    std::vector<std::vector<std::size_t>> classes;
    std::vector<std::size_t> class_of;
    std::vector<std::vector<AlphaWitness>> spanning_edges;
    // Events without a source; never used as alpha witnesses.
    std::vector<std::size_t> sourceless;
    std::size_t iterations = 0;

    // Alpha chain from `from` to `to` along the class spanning tree. Both
    // must lie in the same class; empty when from == to.
    std::vector<AlphaWitness> chain(std::size_t from, std::size_t to) const;
};

// Every related pair (left < right) with one witness each, witnesses
// restricted to events that have a source.
std::vector<AlphaWitness> alpha_edges(const EventFamily& family);

Partition alpha_star(const EventFamily& family);

BetaPartition beta_partition(const EventFamily& family);

// Replays every spanning edge and checks that classes partition the family
// and that each class is connected by closure-compliant edges. Returns a
// description of the first failure.
std::optional<std::string> check_closure(const BetaPartition& beta, const EventFamily& family);

} // namespace omlab
