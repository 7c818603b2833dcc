#include "core/graph.hpp"

#include <algorithm>

namespace dpi {

void Multigraph::require_node(NodeId v) const {
    if (!has_node(v)) throw InputError("unknown node id " + std::to_string(v));
}

void Multigraph::add_node(NodeId v) {
    if (has_node(v)) throw InputError("duplicate node id " + std::to_string(v));
    nodes_.insert(v);
    out_[v];
    in_[v];
}

EdgeId Multigraph::add_edge(NodeId src, NodeId dst, const std::string& label) {
    require_node(src);
    require_node(dst);
    EdgeId e = next_edge_++;
    edges_[e] = Edge{src, dst, label};
    out_[src].push_back(e);
    in_[dst].push_back(e);
    return e;
}

void Multigraph::remove_edge(EdgeId e) {
    auto it = edges_.find(e);
    if (it == edges_.end()) throw InputError("unknown edge id " + std::to_string(e));
    auto erase_from = [e](std::vector<EdgeId>& v) {
        v.erase(std::remove(v.begin(), v.end(), e), v.end());
    };
    erase_from(out_[it->second.src]);
    erase_from(in_[it->second.dst]);
    edges_.erase(it);
}

void Multigraph::remove_node(NodeId v) {
    require_node(v);
    std::vector<EdgeId> incident = out_[v];
    incident.insert(incident.end(), in_[v].begin(), in_[v].end());
    std::sort(incident.begin(), incident.end());
    incident.erase(std::unique(incident.begin(), incident.end()), incident.end());
    for (EdgeId e : incident) remove_edge(e);
    out_.erase(v);
    in_.erase(v);
    nodes_.erase(v);
}

const Edge& Multigraph::edge(EdgeId e) const {
    auto it = edges_.find(e);
    if (it == edges_.end()) throw InputError("unknown edge id " + std::to_string(e));
    return it->second;
}

const std::vector<EdgeId>& Multigraph::out_edges(NodeId v) const {
    require_node(v);
    return out_.at(v);
}

const std::vector<EdgeId>& Multigraph::in_edges(NodeId v) const {
    require_node(v);
    return in_.at(v);
}

std::multiset<std::string> Multigraph::labels_between(NodeId u, NodeId v) const {
    std::multiset<std::string> out;
    for (EdgeId e : out_edges(u)) {
        const Edge& ed = edges_.at(e);
        if (ed.dst == v) out.insert(ed.label);
    }
    return out;
}

std::set<std::pair<NodeId, std::string>> Multigraph::out_pairs(NodeId v) const {
    std::set<std::pair<NodeId, std::string>> out;
    for (EdgeId e : out_edges(v)) {
        const Edge& ed = edges_.at(e);
        out.emplace(ed.dst, ed.label);
    }
    return out;
}

bool Multigraph::has_edge_between(NodeId u, NodeId v, const std::string& label) const {
    for (EdgeId e : out_edges(u)) {
        const Edge& ed = edges_.at(e);
        if (ed.dst == v && ed.label == label) return true;
    }
    return false;
}

namespace {

std::set<NodeId> closure(const Multigraph& g, const std::set<NodeId>& seeds, bool fwd, bool bwd) {
    std::set<NodeId> seen = seeds;
    std::vector<NodeId> work(seeds.begin(), seeds.end());
    while (!work.empty()) {
        NodeId v = work.back();
        work.pop_back();
        auto push = [&](NodeId w) {
            if (seen.insert(w).second) work.push_back(w);
        };
        if (fwd)
            for (EdgeId e : g.out_edges(v)) push(g.edge(e).dst);
        if (bwd)
            for (EdgeId e : g.in_edges(v)) push(g.edge(e).src);
    }
    return seen;
}

}  // namespace

std::set<NodeId> reach(const Multigraph& g, const std::set<NodeId>& seeds, ReachMode mode) {
    for (NodeId v : seeds)
        if (!g.has_node(v)) throw InputError("reach: unknown seed " + std::to_string(v));
    switch (mode) {
        case ReachMode::forward:
            return closure(g, seeds, true, false);
        case ReachMode::backward:
            return closure(g, seeds, false, true);
        case ReachMode::undirected:
            return closure(g, seeds, true, true);
        case ReachMode::context:
            return closure(g, closure(g, seeds, false, true), true, false);
    }
    throw InternalError("reach: bad mode");
}

Multigraph induced_subgraph(const Multigraph& g, const std::set<NodeId>& keep) {
    Multigraph out;
    for (NodeId v : keep) {
        if (!g.has_node(v)) throw InputError("induced_subgraph: unknown node " + std::to_string(v));
        out.add_node(v);
    }
    for (const auto& [e, ed] : g.edges()) {
        (void)e;
        if (keep.count(ed.src) && keep.count(ed.dst)) out.add_edge(ed.src, ed.dst, ed.label);
    }
    return out;
}

std::vector<std::set<NodeId>> topo_layers(const Multigraph& g) {
    std::map<NodeId, int> indeg;
    for (NodeId v : g.nodes()) indeg[v] = static_cast<int>(g.in_edges(v).size());
    std::vector<std::set<NodeId>> layers;
    std::set<NodeId> current;
    for (const auto& [v, d] : indeg)
        if (d == 0) current.insert(v);
    int placed = 0;
    while (!current.empty()) {
        placed += static_cast<int>(current.size());
        std::set<NodeId> next;
        for (NodeId v : current)
            for (EdgeId e : g.out_edges(v)) {
                NodeId w = g.edge(e).dst;
                if (--indeg[w] == 0) next.insert(w);
            }
        layers.push_back(std::move(current));
        current = std::move(next);
    }
    if (placed != g.node_count()) throw DomainViolation("topo_layers: graph has a cycle");
    return layers;
}

bool coinciding(const Multigraph& g, NodeId u1, NodeId u2) {
    return g.out_pairs(u1) == g.out_pairs(u2);
}

bool downward_consistent(const Multigraph& g, NodeId u1, NodeId u2, const NodeCompat& payload_eq) {
    if (!coinciding(g, u1, u2)) return false;
    std::set<NodeId> b1 = reach(g, {u1}, ReachMode::backward);
    std::set<NodeId> b2 = reach(g, {u2}, ReachMode::backward);
    if (b1.size() != b2.size()) return false;
    Multigraph h1 = induced_subgraph(g, b1);
    Multigraph h2 = induced_subgraph(g, b2);
    return graph_isomorphism(h1, h2, payload_eq, {{u1, u2}}).has_value();
}

namespace {

class EmbeddingSearch {
public:
    EmbeddingSearch(const Multigraph& h, const Multigraph& g, const NodeCompat& compat,
                    const std::map<NodeId, NodeId>& anchor,
                    const std::function<bool(const IsoMapping&)>& visit)
        : h_(h), g_(g), compat_(compat), anchor_(anchor), visit_(visit) {}

    // Returns true iff visit stopped the enumeration.
    bool run() {
        std::set<NodeId> anchor_images;
        for (const auto& [u, v] : anchor_) {
            if (!h_.has_node(u) || !g_.has_node(v)) return false;
            if (!anchor_images.insert(v).second) return false;  // non-injective anchor
        }
        build_order();
        return extend(0);
    }

private:
    // Anchored nodes first, then most-constrained-first: maximum adjacency to
    // already-ordered nodes, ties by higher degree then smaller id.
    void build_order() {
        std::set<NodeId> placed;
        for (const auto& [u, v] : anchor_) {
            (void)v;
            order_.push_back(u);
            placed.insert(u);
        }
        auto degree = [this](NodeId v) {
            return h_.out_edges(v).size() + h_.in_edges(v).size();
        };
        while (placed.size() < h_.nodes().size()) {
            NodeId best = 0;
            int best_adj = -1;
            size_t best_deg = 0;
            for (NodeId u : h_.nodes()) {
                if (placed.count(u)) continue;
                int adj = 0;
                for (EdgeId e : h_.out_edges(u)) adj += placed.count(h_.edge(e).dst) ? 1 : 0;
                for (EdgeId e : h_.in_edges(u)) adj += placed.count(h_.edge(e).src) ? 1 : 0;
                size_t deg = degree(u);
                if (adj > best_adj || (adj == best_adj && deg > best_deg)) {
                    best = u;
                    best_adj = adj;
                    best_deg = deg;
                }
            }
            order_.push_back(best);
            placed.insert(best);
        }
    }

    bool consistent(NodeId u, NodeId v) const {
        if (!compat_(u, v)) return false;
        if (g_.out_edges(v).size() < h_.out_edges(u).size()) return false;
        if (g_.in_edges(v).size() < h_.in_edges(u).size()) return false;
        if (h_.labels_between(u, u) != g_.labels_between(v, v)) return false;
        for (const auto& [w, x] : map_) {
            if (h_.labels_between(u, w) != g_.labels_between(v, x)) return false;
            if (h_.labels_between(w, u) != g_.labels_between(x, v)) return false;
        }
        return true;
    }

    bool extend(size_t depth) {
        if (depth == order_.size()) return emit();
        NodeId u = order_[depth];
        auto it = anchor_.find(u);
        if (it != anchor_.end()) {
            NodeId v = it->second;
            if (!used_.count(v) && consistent(u, v)) {
                map_[u] = v;
                used_.insert(v);
                if (extend(depth + 1)) return true;
                map_.erase(u);
                used_.erase(v);
            }
            return false;
        }
        for (NodeId v : g_.nodes()) {
            if (used_.count(v) || !consistent(u, v)) continue;
            map_[u] = v;
            used_.insert(v);
            if (extend(depth + 1)) return true;
            map_.erase(u);
            used_.erase(v);
        }
        return false;
    }

    // Pairs h edges with g edges per (mapped endpoints, label), ascending ids.
    bool emit() {
        IsoMapping iso;
        iso.node_map = map_;
        std::set<EdgeId> taken;
        for (const auto& [he, hed] : h_.edges()) {
            NodeId v = map_.at(hed.src);
            NodeId x = map_.at(hed.dst);
            bool found = false;
            for (EdgeId ge : g_.out_edges(v)) {
                const Edge& ged = g_.edge(ge);
                if (ged.dst != x || ged.label != hed.label || taken.count(ge)) continue;
                iso.edge_map[he] = ge;
                taken.insert(ge);
                found = true;
                break;
            }
            if (!found) throw InternalError("embedding emit: missing edge partner");
        }
        return visit_(iso);
    }

    const Multigraph& h_;
    const Multigraph& g_;
    const NodeCompat& compat_;
    const std::map<NodeId, NodeId>& anchor_;
    const std::function<bool(const IsoMapping&)>& visit_;
    std::vector<NodeId> order_;
    std::map<NodeId, NodeId> map_;
    std::set<NodeId> used_;
};

}  // namespace

bool for_each_embedding(const Multigraph& h, const Multigraph& g, const NodeCompat& node_compat,
                        const std::map<NodeId, NodeId>& anchor,
                        const std::function<bool(const IsoMapping&)>& visit) {
    EmbeddingSearch search(h, g, node_compat, anchor, visit);
    return search.run();
}

std::optional<IsoMapping> subgraph_isomorphism(const Multigraph& h, const Multigraph& g,
                                               const NodeCompat& node_compat) {
    std::optional<IsoMapping> found;
    for_each_embedding(h, g, node_compat, {}, [&](const IsoMapping& m) {
        found = m;
        return true;
    });
    return found;
}

std::optional<IsoMapping> graph_isomorphism(const Multigraph& h, const Multigraph& g,
                                            const NodeCompat& node_compat,
                                            const std::map<NodeId, NodeId>& anchor) {
    if (h.node_count() != g.node_count() || h.edge_count() != g.edge_count()) return std::nullopt;
    std::optional<IsoMapping> found;
    for_each_embedding(h, g, node_compat, anchor, [&](const IsoMapping& m) {
        found = m;
        return true;
    });
    return found;
}

}  // namespace dpi
