#include "core/merge.hpp"

#include <algorithm>
#include <functional>
#include <ostream>
#include <vector>

#include "core/errors.hpp"

namespace dpi {
namespace {

// Induced subgraph of the cast graph over the forward closure of its role
// nodes: the callee-and-ancestors spine every related invocation shares.
// Bystanders hang off the spine through incoming edges and stay outside.
Multigraph role_core(const CastNog& g) {
    std::set<NodeId> keep = reach(g.nog.graph, g.role_nodes(), ReachMode::forward);
    return induced_subgraph(g.nog.graph, keep);
}

// Enumerates bijections of a onto b; an induced embedding with equal node
// counts is exact on every pair's label multiset, hence an isomorphism.
bool for_each_isomorphism(const Multigraph& a, const Multigraph& b, const NodeCompat& compat,
                          const std::function<bool(const IsoMapping&)>& visit) {
    if (a.node_count() != b.node_count() || a.edge_count() != b.edge_count()) return false;
    return for_each_embedding(a, b, compat, {}, visit);
}

std::map<NodeId, NodeId> inverted(const std::map<NodeId, NodeId>& m) {
    std::map<NodeId, NodeId> out;
    for (const auto& [k, v] : m) out[v] = k;
    return out;
}

// Every role-sourced flow of r has a counterpart flow of r2 through (m1, m2).
bool flows_correspond(const Rule& r, const Rule& r2, const std::map<NodeId, NodeId>& m1,
                      const std::map<NodeId, NodeId>& m2) {
    for (const Mapping& m : r.q) {
        if (r.rng.roles_of(m.src).empty()) continue;
        auto s = m1.find(m.src);
        auto d = m2.find(m.dst);
        if (s == m1.end() || d == m2.end()) return false;
        bool found = false;
        for (const Mapping& cand : r2.q)
            if (cand.src == s->second && cand.dst == d->second) {
                found = true;
                break;
            }
        if (!found) return false;
    }
    return true;
}

// Union of two nested object graphs. Left keeps its node ids; right nodes
// matched by m collapse onto their left partner, which takes the right
// node's flags; unmatched right nodes join under fresh ids. Right edges
// between two matched nodes already exist on the left (the matched cores are
// induced and isomorphic), so they are skipped.
GraphMerge union_nogs(const Nog& left, const Nog& right, const std::map<NodeId, NodeId>& m) {
    GraphMerge out;
    out.nog = left;
    for (NodeId v : left.graph.nodes()) out.from_left[v] = v;
    std::map<NodeId, NodeId> matched = inverted(m);
    for (const auto& [l, rr] : m) out.nog.nao_mut(l) = renest(left.nao(l), right.nao(rr));
    out.from_right = matched;
    for (NodeId w : right.graph.nodes()) {
        if (out.from_right.count(w)) continue;
        NestedAbstractObject n = right.nao(w);
        n.id = out.nog.fresh_id();
        out.from_right[w] = out.nog.add(n);
    }
    for (const auto& [e, ed] : right.graph.edges()) {
        (void)e;
        if (matched.count(ed.src) && matched.count(ed.dst)) continue;
        out.nog.add_edge_dedup(out.from_right.at(ed.src), out.from_right.at(ed.dst), ed.label);
    }
    return out;
}

// Upward coarsening, lumping, role relocation and edge repair shared by
// merge_r and merge_n. Pins extend over forward reachability so the spine
// above a role node never lumps into a repeatable block.
void reduce_merged(GraphMerge& gm, const std::map<NodeId, std::set<std::string>>& left_u) {
    std::set<NodeId> pinned;
    for (const auto& [v, roles] : left_u)
        if (!roles.empty()) pinned.insert(v);
    pinned = reach(gm.nog.graph, pinned, ReachMode::forward);
    Partition blocks = coarsest_partition_upward(gm.nog, pinned);
    std::map<NodeId, NodeId> rep_of = lump(gm.nog, blocks, LumpStyle::mergeds, nullptr);
    for (auto& [orig, merged] : gm.from_left) {
        (void)orig;
        merged = rep_of.at(merged);
    }
    for (auto& [orig, merged] : gm.from_right) {
        (void)orig;
        merged = rep_of.at(merged);
    }
    for (const auto& [v, roles] : left_u)
        if (!roles.empty()) gm.u[rep_of.at(v)] = roles;
    repair_edges(gm.nog);
    check_nog_invariants(gm.nog);
}

}  // namespace

std::optional<std::pair<IsoMapping, IsoMapping>> role_consistent(const Rule& r, const Rule& r2) {
    Multigraph a1 = role_core(r.rng);
    Multigraph b1 = role_core(r2.rng);
    Multigraph a2 = role_core(r.rng2);
    Multigraph b2 = role_core(r2.rng2);
    NodeCompat compat1 = [&](NodeId a, NodeId b) {
        return r.rng.nog.nao(a).ao.equivalent(r2.rng.nog.nao(b).ao) &&
               r.rng.roles_of(a) == r2.rng.roles_of(b);
    };
    NodeCompat compat2 = [&](NodeId a, NodeId b) {
        return r.rng2.nog.nao(a).ao.equivalent(r2.rng2.nog.nao(b).ao) &&
               r.rng2.roles_of(a) == r2.rng2.roles_of(b);
    };
    std::optional<std::pair<IsoMapping, IsoMapping>> out;
    for_each_isomorphism(a1, b1, compat1, [&](const IsoMapping& m1) {
        std::map<NodeId, NodeId> inv1 = inverted(m1.node_map);
        for_each_isomorphism(a2, b2, compat2, [&](const IsoMapping& m2) {
            if (!flows_correspond(r, r2, m1.node_map, m2.node_map)) return false;
            if (!flows_correspond(r2, r, inv1, inverted(m2.node_map))) return false;
            out = {{m1, m2}};
            return true;
        });
        return out.has_value();
    });
    return out;
}

bool mergeable(const Rule& r, const Rule& r2) {
    return r.method == r2.method && r.exception == r2.exception && r.ret == r2.ret &&
           role_consistent(r, r2).has_value();
}

Partition coarsest_partition_upward(const Nog& g, const std::set<NodeId>& pinned) {
    PartitionConfig cfg;
    cfg.split_on_incoming = false;
    cfg.initial_flags_in_equiv = false;
    return coarsest_partition(g, g.graph.nodes(), pinned, cfg);
}

void repair_edges(Nog& g) {
    // Reverse topological order settles edge targets before their sources,
    // so a chain of violations heals in one sweep.
    std::vector<std::set<NodeId>> layers = topo_layers(g.graph);
    for (auto it = layers.rbegin(); it != layers.rend(); ++it)
        for (NodeId v : *it)
            for (EdgeId e : g.graph.out_edges(v)) {
                const NestedAbstractObject& dst = g.nao(g.graph.edge(e).dst);
                if (dst.singular()) continue;
                NestedAbstractObject& src = g.nao_mut(v);
                if (!src.singular()) continue;
                src.pl = dst.pl;
                src.nj = dst.nj;
            }
}

GraphMerge merge_r(const CastNog& left, const CastNog& right, const IsoMapping& m) {
    GraphMerge out = union_nogs(left.nog, right.nog, m.node_map);
    reduce_merged(out, left.u);
    return out;
}

GraphMerge merge_n(const Nog& left, const Nog& right) {
    GraphMerge out = union_nogs(left, right, {});
    reduce_merged(out, {});
    return out;
}

std::set<Mapping> combine_mappings(const std::set<Mapping>& ml, const std::set<Mapping>& mr,
                                   GraphMerge& src, GraphMerge& dst) {
    std::map<std::pair<NodeId, NodeId>, Mult> flows;
    auto add = [&](const Mapping& m, const std::map<NodeId, NodeId>& src_reloc,
                   const std::map<NodeId, NodeId>& dst_reloc) {
        auto s = src_reloc.find(m.src);
        auto d = dst_reloc.find(m.dst);
        if (s == src_reloc.end() || d == dst_reloc.end())
            throw InternalError("combine_mappings: flow endpoint lost in relocation");
        auto [it, fresh] = flows.emplace(std::pair<NodeId, NodeId>{s->second, d->second}, m.mult);
        if (!fresh && m.mult == Mult::many) it->second = Mult::many;
    };
    for (const Mapping& m : ml) add(m, src.from_left, dst.from_left);
    for (const Mapping& m : mr) add(m, src.from_right, dst.from_right);

    std::map<NodeId, int> fan_in;
    std::map<NodeId, int> fan_out;
    for (const auto& [key, mult] : flows) {
        (void)mult;
        fan_in[key.second] += 1;
        fan_out[key.first] += 1;
    }
    // A node receiving two flows stands for at least two objects.
    for (const auto& [key, mult] : flows) {
        (void)mult;
        if (fan_in.at(key.second) >= 2 && dst.nog.nao(key.second).singular())
            dst.nog.nao_mut(key.second).pl = true;
    }
    // A repeatable source flooding a single destination makes it repeatable.
    std::set<Mapping> out;
    for (auto& [key, mult] : flows) {
        if (fan_out.at(key.first) == 1 && !src.nog.nao(key.first).singular() &&
            dst.nog.nao(key.second).singular()) {
            dst.nog.nao_mut(key.second).pl = true;
            mult = Mult::many;
        }
        out.insert({key.first, key.second, mult});
    }
    return out;
}

Rule merge(const Rule& r, const Rule& r2) {
    std::optional<std::pair<IsoMapping, IsoMapping>> witness;
    if (r.method == r2.method && r.exception == r2.exception && r.ret == r2.ret)
        witness = role_consistent(r, r2);
    if (!witness) throw InputError("merge: rules are not mergeable");

    Rule out;
    out.id = r.id;
    out.method = r.method;
    out.exception = r.exception;
    out.ret = r.ret;
    out.trace = r.trace;
    out.context_objects = r.context_objects;

    GraphMerge cast_src = merge_r(r.rng, r2.rng, witness->first);
    GraphMerge cast_dst = merge_r(r.rng2, r2.rng2, witness->second);
    out.q = combine_mappings(r.q, r2.q, cast_src, cast_dst);

    GraphMerge plain_src = merge_n(r.ng, r2.ng);
    GraphMerge plain_dst = merge_n(r.ng2, r2.ng2);
    out.p = combine_mappings(r.p, r2.p, plain_src, plain_dst);

    // Mapping anomalies may have extended repetition flags.
    repair_edges(cast_src.nog);
    repair_edges(cast_dst.nog);
    repair_edges(plain_src.nog);
    repair_edges(plain_dst.nog);

    out.rng = CastNog{std::move(cast_src.nog), std::move(cast_src.u)};
    out.rng2 = CastNog{std::move(cast_dst.nog), std::move(cast_dst.u)};
    out.ng = std::move(plain_src.nog);
    out.ng2 = std::move(plain_dst.nog);
    check_nog_invariants(out.rng.nog);
    check_nog_invariants(out.rng2.nog);
    check_nog_invariants(out.ng);
    check_nog_invariants(out.ng2);
    return out;
}

Dpi merge_all(const Dpi& dpi, std::ostream* log) {
    Dpi out = dpi;
    out.stage = "merge";
    std::vector<Rule>& rules = out.rules;
    auto index_of = [&rules](int id) {
        for (size_t i = 0; i < rules.size(); ++i)
            if (rules[i].id == id) return static_cast<int>(i);
        return -1;
    };
    bool changed = true;
    while (changed) {
        changed = false;
        std::vector<int> ids;
        ids.reserve(rules.size());
        for (const Rule& r : rules) ids.push_back(r.id);
        for (int id : ids) {
            int i = index_of(id);
            if (i < 0) continue;  // already absorbed by an earlier rule
            bool absorbed = true;
            while (absorbed) {
                absorbed = false;
                for (size_t j = 0; j < rules.size(); ++j) {
                    if (rules[j].id == id) continue;
                    if (!mergeable(rules[static_cast<size_t>(i)], rules[j])) continue;
                    Rule merged = merge(rules[static_cast<size_t>(i)], rules[j]);
                    if (log && (!rule_covers(rules[static_cast<size_t>(i)], merged) ||
                                !rule_covers(rules[j], merged)))
                        *log << "merge: rule " << merged.id << " does not cover its inputs " << id
                             << " and " << rules[j].id << "\n";
                    rules[static_cast<size_t>(i)] = std::move(merged);
                    rules.erase(rules.begin() + static_cast<long>(j));
                    i = index_of(id);
                    changed = true;
                    absorbed = true;
                    break;
                }
            }
        }
    }
    rules = prune_redundant(rules);
    return out;
}

}  // namespace dpi
