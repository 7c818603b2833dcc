#include "core/rule.hpp"

#include <algorithm>
#include <map>
#include <utility>

#include "core/errors.hpp"

namespace dpi {

namespace {

// Role-carrying objects present in the given snapshot ("new" roles only exist
// on the destination side).
std::set<NodeId> present_role_ids(const Invocation& invoc, const Snapshot& sp) {
    std::set<NodeId> out;
    for (const Role& role : invoc.roles)
        if (sp.objects.count(role.logical_id)) out.insert(role.logical_id);
    return out;
}

HeapGraph induced_heap(const HeapGraph& hg, const std::set<NodeId>& keep) {
    HeapGraph out;
    out.graph = induced_subgraph(hg.graph, keep);
    for (NodeId v : keep) out.payload.emplace(v, hg.payload.at(v));
    return out;
}

// Cast universe: objects the call could observe or affect, i.e. everything
// the role objects reach forwards (referenced state) or backwards (owners).
std::set<NodeId> cast_universe(const Multigraph& g, const std::set<NodeId>& raos) {
    std::set<NodeId> out = reach(g, raos, ReachMode::forward);
    std::set<NodeId> back = reach(g, raos, ReachMode::backward);
    out.insert(back.begin(), back.end());
    return out;
}

// One mapping per (source node, destination node) pair an object flowed
// along; many when at least two objects took the same pair.
std::set<Mapping> flows(const std::set<NodeId>& objs_s, const std::set<NodeId>& objs_d,
                        const NodeMap& nm_s, const NodeMap& nm_d) {
    std::map<std::pair<NodeId, NodeId>, int> count;
    for (NodeId o : objs_s)
        if (objs_d.count(o)) ++count[{nm_s.to_nog.at(o), nm_d.to_nog.at(o)}];
    std::set<Mapping> out;
    for (const auto& [ends, n] : count)
        out.insert({ends.first, ends.second, n >= 2 ? Mult::many : Mult::one});
    return out;
}

std::set<NodeId> mapping_sources(const std::set<Mapping>& ms) {
    std::set<NodeId> out;
    for (const Mapping& m : ms) out.insert(m.src);
    return out;
}

std::set<NodeId> mapping_dests(const std::set<Mapping>& ms) {
    std::set<NodeId> out;
    for (const Mapping& m : ms) out.insert(m.dst);
    return out;
}

void check_flow_multiplicities(const Nog& src, const Nog& dst, const std::set<Mapping>& ms,
                               const char* what) {
    for (const Mapping& m : ms)
        if (m.mult == Mult::many && (src.nao(m.src).singular() || dst.nao(m.dst).singular()))
            throw InternalError(std::string("many-flow touching a singular node in ") + what);
}

// Structural invariants of a freshly built rule. noncast holds the context
// objects (used for ng/ng2 but outside the cast universes).
void validate_rule(const Rule& r, const NodeMap& nm_s, const NodeMap& nm_d,
                   const std::set<NodeId>& noncast_s, const std::set<NodeId>& noncast_d) {
    std::set<NodeId> q_src = mapping_sources(r.q);
    std::set<NodeId> q_dst = mapping_dests(r.q);
    for (NodeId v : r.rng.nog.graph.nodes())
        if (!q_src.count(v)) throw InternalError("cast source node without a q flow");
    for (NodeId v : r.rng2.nog.graph.nodes()) {
        if (q_dst.count(v)) continue;
        std::set<std::string> roles = r.rng2.roles_of(v);
        if (!roles.count("new") && !roles.count("return"))
            throw InternalError("cast destination node without a q flow or a new/return role");
    }

    std::set<NodeId> p_src = mapping_sources(r.p);
    std::set<NodeId> p_dst = mapping_dests(r.p);
    for (NodeId o : noncast_s)
        if (!p_src.count(nm_s.to_nog.at(o))) throw InternalError("context object without a p flow");
    for (NodeId o : noncast_d)
        if (!p_dst.count(nm_d.to_nog.at(o))) throw InternalError("context object without a p flow");

    check_flow_multiplicities(r.rng.nog, r.rng2.nog, r.q, "q");
    check_flow_multiplicities(r.ng, r.ng2, r.p, "p");
}

NodeCompat covering_compat(const Nog& a, const Nog& b) {
    return [&a, &b](NodeId x, NodeId y) { return nao_covers(a.nao(x), b.nao(y)); };
}

NodeCompat cast_covering_compat(const CastNog& a, const CastNog& b) {
    return [&a, &b](NodeId x, NodeId y) {
        return nao_covers(a.nog.nao(x), b.nog.nao(y)) && a.roles_of(x) == b.roles_of(y);
    };
}

NodeCompat exact_compat(const Nog& a, const Nog& b) {
    return [&a, &b](NodeId x, NodeId y) { return a.nao(x).equivalent(b.nao(y)); };
}

NodeCompat cast_exact_compat(const CastNog& a, const CastNog& b) {
    return [&a, &b](NodeId x, NodeId y) {
        return a.nog.nao(x).equivalent(b.nog.nao(y)) && a.roles_of(x) == b.roles_of(y);
    };
}

// Every flow of ms has a counterpart in ms2 between the witness images of its
// ends. exact demands equal multiplicity, otherwise many -> one is rejected.
bool flows_correspond(const std::set<Mapping>& ms, const std::set<Mapping>& ms2,
                      const std::map<NodeId, NodeId>& src_witness,
                      const std::map<NodeId, NodeId>& dst_witness, bool exact) {
    for (const Mapping& m : ms) {
        NodeId s2 = src_witness.at(m.src);
        NodeId d2 = dst_witness.at(m.dst);
        bool ok = false;
        for (const Mapping& m2 : ms2) {
            if (m2.src != s2 || m2.dst != d2) continue;
            if (exact ? m2.mult == m.mult : !(m.mult == Mult::many && m2.mult == Mult::one)) {
                ok = true;
                break;
            }
        }
        if (!ok) return false;
    }
    return true;
}

// Joint witness search shared by covering and isomorphism. Cast witnesses go
// first because role sets prune them hardest; the q check then gates the
// context search. Role-set equality on the cast witnesses subsumes the
// role-consistency condition on q flows, so flows_correspond needs no extra
// role check.
bool joint_witnesses(const Rule& r, const Rule& r2, bool exact) {
    const NodeCompat c_r1 = exact ? cast_exact_compat(r.rng, r2.rng) : cast_covering_compat(r.rng, r2.rng);
    const NodeCompat c_r2 = exact ? cast_exact_compat(r.rng2, r2.rng2) : cast_covering_compat(r.rng2, r2.rng2);
    const NodeCompat c_n1 = exact ? exact_compat(r.ng, r2.ng) : covering_compat(r.ng, r2.ng);
    const NodeCompat c_n2 = exact ? exact_compat(r.ng2, r2.ng2) : covering_compat(r.ng2, r2.ng2);
    return for_each_embedding(
        r.rng.nog.graph, r2.rng.nog.graph, c_r1, {}, [&](const IsoMapping& w_r1) {
            return for_each_embedding(
                r.rng2.nog.graph, r2.rng2.nog.graph, c_r2, {}, [&](const IsoMapping& w_r2) {
                    if (!flows_correspond(r.q, r2.q, w_r1.node_map, w_r2.node_map, exact))
                        return false;
                    return for_each_embedding(
                        r.ng.graph, r2.ng.graph, c_n1, {}, [&](const IsoMapping& w_n1) {
                            return for_each_embedding(
                                r.ng2.graph, r2.ng2.graph, c_n2, {},
                                [&](const IsoMapping& w_n2) {
                                    return flows_correspond(r.p, r2.p, w_n1.node_map,
                                                            w_n2.node_map, exact);
                                });
                        });
                });
        });
}

bool same_observation(const Rule& r, const Rule& r2) {
    return r.method == r2.method && r.exception == r2.exception && r.ret == r2.ret;
}

}  // namespace

std::string to_string(Mult m) { return m == Mult::one ? "one" : "many"; }

Mult mult_from_string(const std::string& s) {
    if (s == "one") return Mult::one;
    if (s == "many") return Mult::many;
    throw InputError("not a multiplicity: " + s);
}

Rule create_rule(const PackageModel& model, const Invocation& invoc, int id) {
    if (!invoc.m) throw InputError("invocation without a method");
    Rule r;
    r.id = id;
    r.method = invoc.m->name;
    r.exception = invoc.exception;
    if (invoc.m->returns_value_distinguished) r.ret = invoc.ret;
    r.trace = invoc.sp_d.trace;

    HeapGraph hg_s = evaluate(model, invoc.sp_s);
    HeapGraph hg_d = evaluate(model, invoc.sp_d);
    std::set<NodeId> raos_s = present_role_ids(invoc, invoc.sp_s);
    std::set<NodeId> raos_d = present_role_ids(invoc, invoc.sp_d);
    for (const Role& role : invoc.roles)
        if (!invoc.sp_d.objects.count(role.logical_id))
            throw InternalError("role object missing from the destination snapshot");

    // Context graphs over everything weakly connected to the role objects.
    std::set<NodeId> u_s = reach(hg_s.graph, raos_s, ReachMode::undirected);
    std::set<NodeId> u_d = reach(hg_d.graph, raos_d, ReachMode::undirected);
    auto [ng, nm_s] = transfer_to_nested(induced_heap(hg_s, u_s), {});
    auto [ng2, nm_d] = transfer_to_nested(induced_heap(hg_d, u_d), {});
    r.ng = std::move(ng);
    r.ng2 = std::move(ng2);

    // Cast graphs over the role objects' forward and backward closures, with
    // the role objects pinned so they survive singular and carry labels.
    std::set<NodeId> c_s = cast_universe(hg_s.graph, raos_s);
    std::set<NodeId> c_d = cast_universe(hg_d.graph, raos_d);
    auto [rg_s, nm_rs] = transfer_to_nested(induced_heap(hg_s, c_s), raos_s);
    auto [rg_d, nm_rd] = transfer_to_nested(induced_heap(hg_d, c_d), raos_d);
    r.rng.nog = std::move(rg_s);
    r.rng2.nog = std::move(rg_d);
    for (const Role& role : invoc.roles) {
        if (invoc.sp_s.objects.count(role.logical_id))
            r.rng.u[nm_rs.to_nog.at(role.logical_id)].insert(role.rname);
        r.rng2.u[nm_rd.to_nog.at(role.logical_id)].insert(role.rname);
    }

    r.context_objects = u_d;
    r.q = flows(c_s, c_d, nm_rs, nm_rd);
    std::set<NodeId> noncast_s, noncast_d;
    for (NodeId o : u_s)
        if (!c_s.count(o)) noncast_s.insert(o);
    for (NodeId o : u_d)
        if (!c_d.count(o)) noncast_d.insert(o);
    r.p = flows(noncast_s, noncast_d, nm_s, nm_d);

    validate_rule(r, nm_s, nm_d, noncast_s, noncast_d);
    return r;
}

bool mapping_covers(const Nog& src1, const Nog& dst1, const Mapping& m1,
                    const Nog& src2, const Nog& dst2, const Mapping& m2) {
    return nao_covers(src1.nao(m1.src), src2.nao(m2.src)) &&
           nao_covers(dst1.nao(m1.dst), dst2.nao(m2.dst)) &&
           !(m1.mult == Mult::many && m2.mult == Mult::one);
}

bool rule_covers(const Rule& r, const Rule& r2) {
    if (!same_observation(r, r2)) return false;
    return joint_witnesses(r, r2, /*exact=*/false);
}

bool rule_isomorphic(const Rule& r, const Rule& r2) {
    if (!same_observation(r, r2)) return false;
    if (r.ng.size() != r2.ng.size() || r.ng2.size() != r2.ng2.size() ||
        r.rng.nog.size() != r2.rng.nog.size() || r.rng2.nog.size() != r2.rng2.nog.size())
        return false;
    if (r.ng.graph.edge_count() != r2.ng.graph.edge_count() ||
        r.ng2.graph.edge_count() != r2.ng2.graph.edge_count() ||
        r.rng.nog.graph.edge_count() != r2.rng.nog.graph.edge_count() ||
        r.rng2.nog.graph.edge_count() != r2.rng2.nog.graph.edge_count())
        return false;
    if (r.p.size() != r2.p.size() || r.q.size() != r2.q.size()) return false;
    // Equal sizes turn induced embeddings into bijections, and injective
    // flow correspondence with equal multiplicities into flow equality.
    return joint_witnesses(r, r2, /*exact=*/true);
}

std::vector<Rule> prune_redundant(const std::vector<Rule>& rules) {
    const size_t n = rules.size();
    std::vector<std::vector<bool>> cov(n, std::vector<bool>(n, false));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            if (i != j) cov[i][j] = rule_covers(rules[i], rules[j]);
    std::vector<Rule> out;
    for (size_t i = 0; i < n; ++i) {
        bool drop = false;
        for (size_t j = 0; j < n && !drop; ++j) {
            if (i == j || !cov[i][j]) continue;
            // Strictly covered, or mutually covering with a smaller id.
            if (!cov[j][i] || rules[j].id < rules[i].id) drop = true;
        }
        if (!drop) out.push_back(rules[i]);
    }
    return out;
}

}  // namespace dpi
