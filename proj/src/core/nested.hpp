#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "core/heap.hpp"

namespace dpi {

// Abstract object plus repetition flags. pl marks a node standing for
// arbitrarily many equivalent objects with identical surroundings; nj marks
// one standing for arbitrarily many objects each with its own copy of the
// downstream context. Singular nodes stand for exactly one object.
struct NestedAbstractObject {
    int id = 0;
    AbstractObject ao;
    bool pl = false;
    bool nj = false;

    bool singular() const { return !pl && !nj; }
    bool equivalent(const NestedAbstractObject& o) const {
        return ao.equivalent(o.ao) && pl == o.pl && nj == o.nj;
    }
};

// Covering: equivalent, or same abstract object with n1 singular and n2 not.
bool nao_covers(const NestedAbstractObject& n1, const NestedAbstractObject& n2);

// n1 with n2's flags. Throws DomainViolation unless the aos are equivalent.
NestedAbstractObject renest(const NestedAbstractObject& n1, const NestedAbstractObject& n2);

// Nested object graph: at most one edge per (src,dst,label), acyclic, and
// singular-source closed (edges from singular nodes target singular nodes).
struct Nog {
    Multigraph graph;
    std::map<NodeId, NestedAbstractObject> naos;

    NodeId add(const NestedAbstractObject& n);
    void remove(NodeId v);
    const NestedAbstractObject& nao(NodeId v) const { return naos.at(v); }
    NestedAbstractObject& nao_mut(NodeId v) { return naos.at(v); }
    bool add_edge_dedup(NodeId src, NodeId dst, const std::string& label);
    NodeId fresh_id() const { return naos.empty() ? 1 : naos.rbegin()->first + 1; }
    bool empty() const { return naos.empty(); }
    int size() const { return static_cast<int>(naos.size()); }
};

// Role labelling: u maps nodes to the roles they house. Role-labelled nodes
// stay singular through every reduction (they are pinned).
struct CastNog {
    Nog nog;
    std::map<NodeId, std::set<std::string>> u;

    std::set<std::string> roles_of(NodeId v) const {
        auto it = u.find(v);
        return it == u.end() ? std::set<std::string>{} : it->second;
    }
    std::set<NodeId> role_nodes() const {
        std::set<NodeId> out;
        for (const auto& [v, roles] : u)
            if (!roles.empty()) out.insert(v);
        return out;
    }
};

// Throws DomainViolation when an invariant is broken.
void check_nog_invariants(const Nog& g);

struct NodeMap {
    std::map<NodeId, NodeId> to_nog;  // heap node -> NOG node
    std::map<NodeId, int> preimages;  // NOG node -> preimage count
};

using Partition = std::vector<std::set<NodeId>>;

// Node-for-node copy of the heap graph with all flags false.
Nog lift(const HeapGraph& hg);

// Maximal blocks of pairwise downward-consistent nodes within one topo
// layer; payload equivalence is full nao equivalence including flags.
// Pinned nodes are isolated in singleton blocks.
Partition find_similars(const Nog& g, const std::set<NodeId>& layer,
                        const std::set<NodeId>& pinned);

enum class LumpStyle {
    plural,   // |block| > 1 marks the representative pl
    final_,   // |block| > 1 and representative not pl marks it nj
    mergeds,  // a non-singular member is preferred as representative and
              // keeps its own flags; all-singular blocks stay singular
};

// Collapses each block onto one representative (smallest node id, which is
// the smallest underlying logical id; mergeds prefers non-singular members),
// re-targets edges and deduplicates per (src,dst,label). Updates nm when
// given. Returns old node -> representative for every universe node.
std::map<NodeId, NodeId> lump(Nog& g, const Partition& partition, LumpStyle style, NodeMap* nm);

struct PartitionConfig {
    // Condition (i): members agree on incoming (label, source block) pairs.
    // Source blocks matter: a Statement pointed at by an open ResultSet must
    // not share a block with one pointed at by a closed ResultSet, or the
    // singular-source closure breaks when the Statements lump.
    bool split_on_incoming = true;
    bool initial_flags_in_equiv = true;  // start from nao vs plain ao classes
};

// Coarsest refinement of the initial equivalence classes stable under:
// (i) members agree on incoming (label, source block) pairs, and
// (ii) members agree on outgoing (label, target block) pairs.
// Pinned nodes occupy singleton blocks.
Partition coarsest_partition(const Nog& g, const std::set<NodeId>& universe,
                             const std::set<NodeId>& pinned, const PartitionConfig& cfg = {});

// Full reduction: lift, per-layer find_similars + lump(plural), then
// coarsest_partition + lump(final_). Pinned concrete objects survive in
// singular, unmerged nodes. Node ids equal representative logical ids.
std::pair<Nog, NodeMap> transfer_to_nested(const HeapGraph& hg, const std::set<int>& pinned);

// Per-node nesting depth: max over out-neighbours, plus one on pl nodes.
std::map<NodeId, int> nesting_levels(const Nog& g);

// Witness that g1 is covered by g2 (g2 is at least as general): an induced
// subgraph isomorphism of g1 into g2 where every g1 node is nao-covered by
// its image. anchor pre-assigns g1 nodes to g2 nodes.
std::optional<IsoMapping> nog_covers(const Nog& g1, const Nog& g2,
                                     const std::map<NodeId, NodeId>& anchor = {});

// Graph isomorphism with exact nao equivalence (flags included).
bool nog_identical(const Nog& g1, const Nog& g2);

}  // namespace dpi
