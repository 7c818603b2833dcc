#include "core/nested.hpp"

#include <algorithm>

namespace dpi {

bool nao_covers(const NestedAbstractObject& n1, const NestedAbstractObject& n2) {
    if (!n1.ao.equivalent(n2.ao)) return false;
    if (n1.pl == n2.pl && n1.nj == n2.nj) return true;
    return n1.singular() && !n2.singular();
}

NestedAbstractObject renest(const NestedAbstractObject& n1, const NestedAbstractObject& n2) {
    if (!n1.ao.equivalent(n2.ao))
        throw DomainViolation("renest across non-equivalent abstract objects");
    NestedAbstractObject out = n1;
    out.pl = n2.pl;
    out.nj = n2.nj;
    return out;
}

NodeId Nog::add(const NestedAbstractObject& n) {
    graph.add_node(n.id);
    naos[n.id] = n;
    return n.id;
}

void Nog::remove(NodeId v) {
    graph.remove_node(v);
    naos.erase(v);
}

bool Nog::add_edge_dedup(NodeId src, NodeId dst, const std::string& label) {
    if (graph.has_edge_between(src, dst, label)) return false;
    graph.add_edge(src, dst, label);
    return true;
}

void check_nog_invariants(const Nog& g) {
    std::set<std::tuple<NodeId, NodeId, std::string>> seen;
    for (const auto& [e, ed] : g.graph.edges()) {
        (void)e;
        if (!seen.insert({ed.src, ed.dst, ed.label}).second)
            throw DomainViolation("duplicate (src,dst,label) edge in nested object graph");
        if (g.nao(ed.src).singular() && !g.nao(ed.dst).singular())
            throw DomainViolation("singular-source closure broken");
    }
    topo_layers(g.graph);
}

Nog lift(const HeapGraph& hg) {
    Nog g;
    for (const auto& [id, ao] : hg.payload) g.add(NestedAbstractObject{id, ao, false, false});
    for (const auto& [e, ed] : hg.graph.edges()) {
        (void)e;
        g.graph.add_edge(ed.src, ed.dst, ed.label);
    }
    return g;
}

namespace {

NodeCompat nao_equivalence(const Nog& g) {
    return [&g](NodeId a, NodeId b) { return g.nao(a).equivalent(g.nao(b)); };
}

}  // namespace

Partition find_similars(const Nog& g, const std::set<NodeId>& layer,
                        const std::set<NodeId>& pinned) {
    NodeCompat eq = nao_equivalence(g);
    Partition blocks;
    for (NodeId v : layer) {
        if (pinned.count(v)) {
            blocks.push_back({v});
            continue;
        }
        bool placed = false;
        for (auto& block : blocks) {
            if (pinned.count(*block.begin())) continue;
            bool fits = true;
            for (NodeId w : block)
                if (pinned.count(w) || !downward_consistent(g.graph, w, v, eq)) {
                    fits = false;
                    break;
                }
            if (fits) {
                block.insert(v);
                placed = true;
                break;
            }
        }
        if (!placed) blocks.push_back({v});
    }
    return blocks;
}

std::map<NodeId, NodeId> lump(Nog& g, const Partition& partition, LumpStyle style, NodeMap* nm) {
    std::map<NodeId, NodeId> rep_of;
    for (const auto& block : partition) {
        if (block.empty()) throw InternalError("lump: empty block");
        NodeId rep = *block.begin();
        if (style == LumpStyle::mergeds) {
            for (NodeId v : block)
                if (!g.nao(v).singular()) {
                    rep = v;
                    break;
                }
        }
        for (NodeId v : block) rep_of[v] = rep;
        if (block.size() > 1) {
            NestedAbstractObject& r = g.nao_mut(rep);
            if (style == LumpStyle::plural) {
                r.pl = true;
            } else if (style == LumpStyle::final_) {
                if (!r.pl) r.nj = true;
            }
            // mergeds keeps the representative's own flags: a block of only
            // singular members stays singular.
        }
        for (NodeId v : block) {
            if (v == rep) continue;
            std::vector<Edge> moved;
            for (EdgeId e : g.graph.out_edges(v)) moved.push_back(g.graph.edge(e));
            for (EdgeId e : g.graph.in_edges(v)) moved.push_back(g.graph.edge(e));
            g.remove(v);
            for (const Edge& ed : moved) {
                NodeId s = ed.src == v ? rep : ed.src;
                NodeId d = ed.dst == v ? rep : ed.dst;
                if (s == d) throw InternalError("lump: edge inside a block");
                g.add_edge_dedup(s, d, ed.label);
            }
        }
    }
    if (nm) {
        for (auto& [heap_node, nog_node] : nm->to_nog) {
            (void)heap_node;
            auto it = rep_of.find(nog_node);
            if (it != rep_of.end()) nog_node = it->second;
        }
        nm->preimages.clear();
        for (const auto& [heap_node, nog_node] : nm->to_nog) {
            (void)heap_node;
            nm->preimages[nog_node] += 1;
        }
    }
    return rep_of;
}

Partition coarsest_partition(const Nog& g, const std::set<NodeId>& universe,
                             const std::set<NodeId>& pinned, const PartitionConfig& cfg) {
    Partition blocks;
    // Initial classes: pinned nodes isolated, others grouped by equivalence.
    for (NodeId v : universe) {
        if (pinned.count(v)) {
            blocks.push_back({v});
            continue;
        }
        bool placed = false;
        for (auto& block : blocks) {
            NodeId w = *block.begin();
            if (pinned.count(w)) continue;
            bool same = cfg.initial_flags_in_equiv ? g.nao(w).equivalent(g.nao(v))
                                                   : g.nao(w).ao.equivalent(g.nao(v).ao);
            if (same) {
                block.insert(v);
                placed = true;
                break;
            }
        }
        if (!placed) blocks.push_back({v});
    }

    bool changed = true;
    while (changed) {
        changed = false;
        std::map<NodeId, size_t> block_of;
        for (size_t i = 0; i < blocks.size(); ++i)
            for (NodeId v : blocks[i]) block_of[v] = i;

        Partition next;
        for (const auto& block : blocks) {
            if (block.size() == 1) {
                next.push_back(block);
                continue;
            }
            // Signature: incoming (label, source block) pairs (condition i)
            // and outgoing (label, target block) pairs (condition ii). Edges
            // crossing the universe boundary still contribute their labels.
            using Sig = std::set<std::pair<std::string, size_t>>;
            auto block_index = [&](NodeId v) {
                auto it = block_of.find(v);
                return it == block_of.end() ? static_cast<size_t>(-1) : it->second;
            };
            std::map<std::pair<Sig, Sig>, std::set<NodeId>> groups;
            for (NodeId v : block) {
                Sig in_pairs;
                if (cfg.split_on_incoming)
                    for (EdgeId e : g.graph.in_edges(v)) {
                        const Edge& ed = g.graph.edge(e);
                        in_pairs.insert({ed.label, block_index(ed.src)});
                    }
                Sig out_pairs;
                for (EdgeId e : g.graph.out_edges(v)) {
                    const Edge& ed = g.graph.edge(e);
                    out_pairs.insert({ed.label, block_index(ed.dst)});
                }
                groups[{in_pairs, out_pairs}].insert(v);
            }
            if (groups.size() > 1) changed = true;
            for (auto& [sig, members] : groups) {
                (void)sig;
                next.push_back(members);
            }
        }
        blocks = std::move(next);
    }
    std::sort(blocks.begin(), blocks.end(),
              [](const std::set<NodeId>& a, const std::set<NodeId>& b) {
                  return *a.begin() < *b.begin();
              });
    return blocks;
}

std::pair<Nog, NodeMap> transfer_to_nested(const HeapGraph& hg, const std::set<int>& pinned) {
    Nog g = lift(hg);
    NodeMap nm;
    for (NodeId v : g.graph.nodes()) {
        nm.to_nog[v] = v;
        nm.preimages[v] = 1;
    }
    std::set<NodeId> pinned_nodes(pinned.begin(), pinned.end());
    for (NodeId v : pinned_nodes)
        if (!g.graph.has_node(v)) throw InputError("pinned object not in heap graph");
    // A pinned node stays singular, so everything it references must stay
    // singular too or the singular-source closure breaks: pinning extends
    // over forward reachability.
    pinned_nodes = reach(g.graph, pinned_nodes, ReachMode::forward);

    // Layers are fixed on the lifted graph; lumping only merges nodes within
    // the layer being processed, so later layers are still intact.
    for (const auto& layer : topo_layers(g.graph)) {
        Partition similars = find_similars(g, layer, pinned_nodes);
        lump(g, similars, LumpStyle::plural, &nm);
    }
    Partition stable = coarsest_partition(g, g.graph.nodes(), pinned_nodes);
    lump(g, stable, LumpStyle::final_, &nm);
    check_nog_invariants(g);
    return {std::move(g), std::move(nm)};
}

std::map<NodeId, int> nesting_levels(const Nog& g) {
    std::map<NodeId, int> level;
    std::vector<std::set<NodeId>> layers = topo_layers(g.graph);
    for (auto it = layers.rbegin(); it != layers.rend(); ++it)
        for (NodeId v : *it) {
            int max_succ = 0;
            for (EdgeId e : g.graph.out_edges(v))
                max_succ = std::max(max_succ, level.at(g.graph.edge(e).dst));
            level[v] = g.nao(v).pl ? max_succ + 1 : max_succ;
        }
    return level;
}

std::optional<IsoMapping> nog_covers(const Nog& g1, const Nog& g2,
                                     const std::map<NodeId, NodeId>& anchor) {
    NodeCompat covers = [&](NodeId a, NodeId b) { return nao_covers(g1.nao(a), g2.nao(b)); };
    std::optional<IsoMapping> found;
    for_each_embedding(g1.graph, g2.graph, covers, anchor, [&](const IsoMapping& m) {
        found = m;
        return true;
    });
    return found;
}

bool nog_identical(const Nog& g1, const Nog& g2) {
    NodeCompat eq = [&](NodeId a, NodeId b) { return g1.nao(a).equivalent(g2.nao(b)); };
    return graph_isomorphism(g1.graph, g2.graph, eq).has_value();
}

}  // namespace dpi
