#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "core/errors.hpp"

namespace dpi {

using NodeId = int;
using EdgeId = int;

struct Edge {
    NodeId src = 0;
    NodeId dst = 0;
    std::string label;
};

// Closure modes. context = backward closure, then forward closure of the
// result; it is the scope used when extrapolating a node's surroundings.
enum class ReachMode { forward, backward, undirected, context };

// Directed labelled multigraph. Node ids are caller-chosen; edges carry
// synthetic ids so parallel edges can coexist. Node payloads live with the
// callers, which inject payload equivalence where an operation needs it.
// Query operations never mutate; mutators exist for graph construction and
// for the lumping surgeries of the abstraction layer.
class Multigraph {
public:
    void add_node(NodeId v);
    EdgeId add_edge(NodeId src, NodeId dst, const std::string& label);
    void remove_node(NodeId v);  // drops incident edges
    void remove_edge(EdgeId e);

    bool has_node(NodeId v) const { return nodes_.count(v) != 0; }
    bool has_edge(EdgeId e) const { return edges_.count(e) != 0; }
    const std::set<NodeId>& nodes() const { return nodes_; }
    const std::map<EdgeId, Edge>& edges() const { return edges_; }
    const Edge& edge(EdgeId e) const;
    const std::vector<EdgeId>& out_edges(NodeId v) const;
    const std::vector<EdgeId>& in_edges(NodeId v) const;
    int node_count() const { return static_cast<int>(nodes_.size()); }
    int edge_count() const { return static_cast<int>(edges_.size()); }

    // Multiset of labels on edges u -> v; drives induced-image matching.
    std::multiset<std::string> labels_between(NodeId u, NodeId v) const;
    // Set of (target, label) pairs over v's out-edges; drives coinciding.
    std::set<std::pair<NodeId, std::string>> out_pairs(NodeId v) const;
    bool has_edge_between(NodeId u, NodeId v, const std::string& label) const;

private:
    void require_node(NodeId v) const;

    std::set<NodeId> nodes_;
    std::map<EdgeId, Edge> edges_;
    std::map<NodeId, std::vector<EdgeId>> out_;
    std::map<NodeId, std::vector<EdgeId>> in_;
    EdgeId next_edge_ = 1;
};

using NodeCompat = std::function<bool(NodeId, NodeId)>;

struct IsoMapping {
    std::map<NodeId, NodeId> node_map;
    std::map<EdgeId, EdgeId> edge_map;
};

std::set<NodeId> reach(const Multigraph& g, const std::set<NodeId>& seeds, ReachMode mode);

Multigraph induced_subgraph(const Multigraph& g, const std::set<NodeId>& keep);

// Kahn peeling, sources (in-degree 0) first. Throws DomainViolation on cycles.
std::vector<std::set<NodeId>> topo_layers(const Multigraph& g);

// True iff u1 and u2 have identical (target, label) out-edge sets.
bool coinciding(const Multigraph& g, NodeId u1, NodeId u2);

// Coinciding, and the induced subgraphs over the backward closures of u1 and
// u2 are isomorphic under payload_eq with the isomorphism mapping u1 to u2.
bool downward_consistent(const Multigraph& g, NodeId u1, NodeId u2, const NodeCompat& payload_eq);

// Enumerates embeddings of h into g whose image is an induced subgraph of g,
// with every matched pair satisfying node_compat and anchor entries fixed.
// visit returning true stops the search; returns true iff stopped early.
bool for_each_embedding(const Multigraph& h, const Multigraph& g, const NodeCompat& node_compat,
                        const std::map<NodeId, NodeId>& anchor,
                        const std::function<bool(const IsoMapping&)>& visit);

std::optional<IsoMapping> subgraph_isomorphism(const Multigraph& h, const Multigraph& g,
                                               const NodeCompat& node_compat);

// Bijective variant: node and edge counts equal plus an induced embedding.
std::optional<IsoMapping> graph_isomorphism(const Multigraph& h, const Multigraph& g,
                                            const NodeCompat& node_compat,
                                            const std::map<NodeId, NodeId>& anchor = {});

}  // namespace dpi
