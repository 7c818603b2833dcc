#pragma once

#include <iosfwd>
#include <vector>

#include "core/rule.hpp"

namespace dpi {

// Names the four graphs of a rule.
enum class GraphTag { ng, ng2, rng, rng2 };
const char* to_string(GraphTag tag);

struct Deficit {
    GraphTag tag;
    NodeId node;

    bool operator<(const Deficit& o) const {
        return tag != o.tag ? tag < o.tag : node < o.node;
    }
    bool operator==(const Deficit& o) const { return tag == o.tag && node == o.node; }
};

// Singular nodes paired in p (plain graphs) or q (cast graphs) with a
// non-singular partner. Role-labelled nodes are never deficit: the objects
// they stand for are pinned to a single invocation role.
std::vector<Deficit> find_deficit(const Rule& r);

// Multiplicity repair after renesting: a one-mapping whose ends are both
// non-singular and whose source feeds no other mapping becomes many. Shared
// sources stay untouched; widening them could change what the rule claims.
Rule adjust_multiplicities(const Rule& r);

// The generalization pass. For every deficit node, searches the other rules'
// graphs for a non-singular node with an equivalent abstract object whose
// context subgraph embeds the deficit node's context; on a hit, the whole
// context is renested by its image, so repetition flags stay consistent
// along edges. Runs over all rules twice (extrapolated rules make new donors
// on the second sweep), repairs multiplicities, then prunes covered rules.
// Renestings that would break the singular-source closure are rejected and
// logged to `log` when given.
Dpi extrapolate(const Dpi& dpi, std::ostream* log = nullptr);

}  // namespace dpi
