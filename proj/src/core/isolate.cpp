#include "core/isolate.hpp"

#include <algorithm>
#include <ostream>
#include <set>
#include <tuple>
#include <utility>
#include <vector>

#include "core/merge.hpp"

namespace dpi {

namespace {

// Role sets index a cast graph's labelled nodes; one method call labels one
// node per role set, so the index is a bijection onto the role nodes.
std::map<std::set<std::string>, NodeId> role_index(const CastNog& g) {
    std::map<std::set<std::string>, NodeId> out;
    for (const auto& [v, roles] : g.u)
        if (!roles.empty()) out.emplace(roles, v);
    return out;
}

// Backtracking search for the best witness between two cast graphs: role
// nodes are pre-paired, unlabelled nodes pair with class-equal unlabelled
// targets under edge-label agreement against every pair already made, or
// stay unmatched. Scored by (equivalent pairs, total pairs); the first
// maximum in enumeration order wins, keeping the result deterministic.
struct WitnessSearch {
    const CastNog& a;
    const CastNog& b;

    std::vector<NodeId> a_nodes;  // unlabelled nodes of a, id order
    std::vector<NodeId> b_pool;   // all nodes of b, id order
    std::map<NodeId, NodeId> current;
    std::set<NodeId> used;
    int exact = 0;

    int best_exact = -1;
    int best_size = -1;
    std::map<NodeId, NodeId> best;

    bool structure_ok(NodeId x, NodeId y) const {
        for (const auto& [px, py] : current) {
            if (a.nog.graph.labels_between(x, px) != b.nog.graph.labels_between(y, py))
                return false;
            if (a.nog.graph.labels_between(px, x) != b.nog.graph.labels_between(py, y))
                return false;
        }
        return true;
    }

    void extend(size_t i) {
        if (i == a_nodes.size()) {
            int size = static_cast<int>(current.size());
            if (std::tie(exact, size) > std::tie(best_exact, best_size)) {
                best_exact = exact;
                best_size = size;
                best = current;
            }
            return;
        }
        NodeId x = a_nodes[i];
        for (NodeId y : b_pool) {
            if (used.count(y) != 0) continue;
            if (!b.roles_of(y).empty()) continue;  // role nodes are pre-paired
            if (a.nog.nao(x).ao.cls != b.nog.nao(y).ao.cls) continue;
            if (!structure_ok(x, y)) continue;
            int eq = a.nog.nao(x).ao.equivalent(b.nog.nao(y).ao) ? 1 : 0;
            current[x] = y;
            used.insert(y);
            exact += eq;
            extend(i + 1);
            current.erase(x);
            used.erase(y);
            exact -= eq;
        }
        extend(i + 1);  // leave x unmatched
    }
};

std::optional<IsoMapping> best_witness(const CastNog& a, const CastNog& b, bool callee_strict) {
    auto ra = role_index(a);
    auto rb = role_index(b);
    if (ra.size() != rb.size()) return std::nullopt;

    WitnessSearch s{a, b};
    for (const auto& [roles, x] : ra) {
        auto it = rb.find(roles);
        if (it == rb.end()) return std::nullopt;
        NodeId y = it->second;
        const AbstractObject& ax = a.nog.nao(x).ao;
        const AbstractObject& ay = b.nog.nao(y).ao;
        if (ax.cls != ay.cls) return std::nullopt;
        if (callee_strict && roles.count("callee") != 0 && !ax.equivalent(ay))
            return std::nullopt;
        if (!s.structure_ok(x, y)) return std::nullopt;
        s.current.emplace(x, y);
        s.used.insert(y);
        if (ax.equivalent(ay)) ++s.exact;
    }
    for (NodeId v : a.nog.graph.nodes())
        if (a.roles_of(v).empty()) s.a_nodes.push_back(v);
    for (NodeId v : b.nog.graph.nodes()) s.b_pool.push_back(v);
    s.extend(0);

    IsoMapping m;
    m.node_map = s.best;
    for (const auto& [e, ed] : a.nog.graph.edges()) {
        auto si = m.node_map.find(ed.src);
        auto di = m.node_map.find(ed.dst);
        if (si == m.node_map.end() || di == m.node_map.end()) continue;
        for (EdgeId e2 : b.nog.graph.out_edges(si->second)) {
            const Edge& ed2 = b.nog.graph.edge(e2);
            if (ed2.dst == di->second && ed2.label == ed.label) {
                m.edge_map.emplace(e, e2);
                break;
            }
        }
    }
    return m;
}

// Smallest target per outgoing label. Heap objects reference at most one
// object per attribute and lumping unifies targets, so the map is exact for
// miner-produced graphs.
std::map<std::string, NodeId> out_refs(const CastNog& g, NodeId v) {
    std::map<std::string, NodeId> out;
    for (EdgeId e : g.nog.graph.out_edges(v)) {
        const Edge& ed = g.nog.graph.edge(e);
        auto it = out.find(ed.label);
        if (it == out.end() || ed.dst < it->second) out[ed.label] = ed.dst;
    }
    return out;
}

// No predicate both sides decide carries different values.
bool stated_agree(const AbstractObject& a, const AbstractObject& b) {
    for (const auto& [k, v] : a.preds) {
        auto it = b.preds.find(k);
        if (it != b.preds.end() && it->second != v) return false;
    }
    return true;
}

std::set<Mapping> identity_flows(const Nog& g) {
    std::set<Mapping> out;
    for (NodeId v : g.graph.nodes())
        out.insert({v, v, g.nao(v).singular() ? Mult::one : Mult::many});
    return out;
}

// Reduces an exception rule to its source cast graph: the call raised before
// changing anything, so the destination is a copy of the source and every
// object flows to itself.
Rule cast_summary(const Rule& r) {
    Rule out = r;
    out.rng2 = r.rng;
    out.ng = r.rng.nog;
    out.ng2 = r.rng.nog;
    out.q = identity_flows(r.rng.nog);
    out.p.clear();
    out.context_objects.clear();
    return out;
}

Rule joined_rule(const Rule& left, const Rule& right, const IsoMapping& m) {
    Rule out = left;
    out.rng = three_valued_join(left.rng, right.rng, m);
    out.rng2 = out.rng;
    out.ng = out.rng.nog;
    out.ng2 = out.rng.nog;
    out.q = identity_flows(out.rng.nog);
    out.p.clear();
    out.context_objects.clear();
    return out;
}

// Merging first grows the graphs, which keeps the witness search from
// pairing an object with a disagreeing partner for lack of context.
std::vector<Rule> isolate_family(const Dpi& dpi, const std::vector<Rule>& family,
                                 bool callee_strict, std::ostream* log) {
    Dpi group;
    group.model = dpi.model;
    group.seed = dpi.seed;
    group.rules = family;
    std::vector<Rule> rs;
    for (const Rule& r : merge_all(group, log).rules) rs.push_back(cast_summary(r));

    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i < rs.size() && !changed; ++i)
            for (size_t j = i + 1; j < rs.size() && !changed; ++j)
                if (auto m = joinable(rs[i], rs[j], callee_strict)) {
                    rs[i] = joined_rule(rs[i], rs[j], *m);
                    rs.erase(rs.begin() + static_cast<long>(j));
                    changed = true;
                }
    }
    return rs;
}

}  // namespace

std::map<std::string, bool> join_valuations(const std::map<std::string, bool>& a,
                                            const std::map<std::string, bool>& b) {
    std::map<std::string, bool> out;
    for (const auto& [k, v] : a) {
        auto it = b.find(k);
        if (it != b.end() && it->second == v) out.emplace(k, v);
    }
    return out;
}

std::optional<IsoMapping> joinable(const Rule& r, const Rule& r2, bool callee_strict) {
    if (r.method != r2.method) return std::nullopt;
    if (!r.exception || r.exception != r2.exception) return std::nullopt;
    if (r.ret != r2.ret) return std::nullopt;
    return best_witness(r.rng, r2.rng, callee_strict);
}

CastNog three_valued_join(const CastNog& cng, const CastNog& cng2, const IsoMapping& m) {
    CastNog out;
    for (const auto& [x, y] : m.node_map) {
        NestedAbstractObject n = cng.nog.nao(x);
        const NestedAbstractObject& n2 = cng2.nog.nao(y);
        n.ao.preds = join_valuations(n.ao.preds, n2.ao.preds);
        n.pl = n.pl || n2.pl;
        n.nj = (n.nj || n2.nj) && !n.pl;
        out.nog.add(n);
        std::set<std::string> roles = cng.roles_of(x);
        if (!roles.empty()) out.u[n.id] = roles;
    }
    for (const auto& [e, ed] : cng.nog.graph.edges()) {
        (void)e;
        auto si = m.node_map.find(ed.src);
        auto di = m.node_map.find(ed.dst);
        if (si == m.node_map.end() || di == m.node_map.end()) continue;
        if (!cng2.nog.graph.has_edge_between(si->second, di->second, ed.label)) continue;
        out.nog.add_edge_dedup(ed.src, ed.dst, ed.label);
    }
    check_nog_invariants(out.nog);
    return out;
}

bool wildcard_match(const CastNog& pattern, const CastNog& g) {
    auto rp = role_index(pattern);
    auto rg = role_index(g);
    if (rp.size() != rg.size()) return false;

    std::map<NodeId, NodeId> fwd;
    std::map<NodeId, NodeId> back;
    std::vector<std::pair<NodeId, NodeId>> work;
    auto pair_up = [&](NodeId x, NodeId y) -> bool {
        auto it = fwd.find(x);
        if (it != fwd.end()) return it->second == y;
        auto bt = back.find(y);
        if (bt != back.end()) return false;
        const AbstractObject& ax = pattern.nog.nao(x).ao;
        const AbstractObject& ay = g.nog.nao(y).ao;
        if (ax.cls != ay.cls) return false;
        if (!stated_agree(ax, ay)) return false;
        fwd.emplace(x, y);
        back.emplace(y, x);
        work.emplace_back(x, y);
        return true;
    };

    for (const auto& [roles, x] : rp) {
        auto it = rg.find(roles);
        if (it == rg.end() || !pair_up(x, it->second)) return false;
    }
    while (!work.empty()) {
        auto [x, y] = work.back();
        work.pop_back();
        std::map<std::string, NodeId> px = out_refs(pattern, x);
        std::map<std::string, NodeId> py = out_refs(g, y);
        for (const auto& [label, nx] : px) {
            auto it = py.find(label);
            if (it == py.end()) continue;  // reference recorded on one side only
            if (!pair_up(nx, it->second)) return false;
        }
    }
    return true;
}

std::string to_string(CalleeJoin m) {
    switch (m) {
        case CalleeJoin::strict: return "off";
        case CalleeJoin::combined: return "on";
        case CalleeJoin::automatic: return "auto";
    }
    throw InternalError("unhandled callee join mode");
}

CalleeJoin callee_join_from_string(const std::string& s) {
    if (s == "off") return CalleeJoin::strict;
    if (s == "on") return CalleeJoin::combined;
    if (s == "auto") return CalleeJoin::automatic;
    throw InputError("not a callee join mode: " + s);
}

Dpi isolate_all(const Dpi& dpi, CalleeJoin mode, std::ostream* log) {
    Dpi out;
    out.model = dpi.model;
    out.seed = dpi.seed;
    out.stage = "isolate";

    std::map<std::pair<std::string, std::string>, std::vector<Rule>> families;
    for (const Rule& r : dpi.rules) {
        if (r.exception)
            families[{r.method, *r.exception}].push_back(r);
        else
            out.rules.push_back(r);
    }

    for (const auto& [key, family] : families) {
        std::vector<Rule> isolated =
            isolate_family(dpi, family, mode == CalleeJoin::strict, log);
        if (mode == CalleeJoin::automatic) {
            // Over-isolation check: a summary that also matches a state in
            // which the method completes normally is too coarse.
            const Rule* clash = nullptr;
            for (const Rule& iso : isolated) {
                for (const Rule& ok : out.rules) {
                    if (ok.exception || ok.method != key.first) continue;
                    if (wildcard_match(iso.rng, ok.rng)) {
                        clash = &ok;
                        break;
                    }
                }
                if (clash) break;
            }
            if (clash) {
                if (log)
                    *log << "isolate: " << key.first << " / " << key.second
                         << ": combined summary also matches no-exception rule " << clash->id
                         << ", retrying with equivalent callees\n";
                isolated = isolate_family(dpi, family, true, log);
            }
        }
        for (Rule& r : isolated) out.rules.push_back(std::move(r));
    }

    std::sort(out.rules.begin(), out.rules.end(),
              [](const Rule& a, const Rule& b) { return a.id < b.id; });
    return out;
}

}  // namespace dpi
