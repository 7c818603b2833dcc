#include "core/extrapolate.hpp"

#include <map>
#include <ostream>
#include <set>
#include <string>
#include <utility>

#include "core/errors.hpp"
#include "core/nested.hpp"

namespace dpi {

namespace {

Nog& graph_of(Rule& r, GraphTag tag) {
    switch (tag) {
        case GraphTag::ng: return r.ng;
        case GraphTag::ng2: return r.ng2;
        case GraphTag::rng: return r.rng.nog;
        case GraphTag::rng2: return r.rng2.nog;
    }
    throw InternalError("graph_of: bad tag");
}

bool is_cast(GraphTag tag) { return tag == GraphTag::rng || tag == GraphTag::rng2; }

std::set<std::string> roles_at(const Rule& r, GraphTag tag, NodeId v) {
    if (tag == GraphTag::rng) return r.rng.roles_of(v);
    if (tag == GraphTag::rng2) return r.rng2.roles_of(v);
    return {};
}

Nog induced_nog(const Nog& g, const std::set<NodeId>& keep) {
    Nog out;
    out.graph = induced_subgraph(g.graph, keep);
    for (NodeId v : keep) out.naos.emplace(v, g.nao(v));
    return out;
}

// The structure a node is embedded in: everything it reaches plus everything
// reachable from what reaches it.
Nog context_nog(const Nog& g, NodeId v) {
    return induced_nog(g, reach(g.graph, {v}, ReachMode::context));
}

// Renests every matched node by its image; role-labelled nodes stay put.
// Rejects the whole group if the result breaks a graph invariant.
bool apply_group(Rule& r, GraphTag tag, const Nog& h, const IsoMapping& iso, std::ostream* log) {
    Nog& g = graph_of(r, tag);
    Nog cand = g;
    for (const auto& [a, b] : iso.node_map) {
        if (!roles_at(r, tag, a).empty()) continue;
        cand.nao_mut(a) = renest(cand.nao(a), h.nao(b));
    }
    try {
        check_nog_invariants(cand);
    } catch (const DomainViolation& e) {
        if (log)
            *log << "extrapolate: rule " << r.id << " " << to_string(tag)
                 << ": group renesting rejected: " << e.what() << "\n";
        return false;
    }
    g = std::move(cand);
    return true;
}

// Searches the other rules' graphs (same family as the deficit graph,
// sources before destinations, rules in list order) for a non-singular node
// with an equivalent abstract object whose context embeds the deficit
// context. A rule never donates to itself.
bool try_donors(std::vector<Rule>& rules, size_t i, const Deficit& d, std::ostream* log) {
    Rule& r = rules[i];
    const Nog gctx = context_nog(graph_of(r, d.tag), d.node);
    const AbstractObject want = graph_of(r, d.tag).nao(d.node).ao;
    const bool cast = is_cast(d.tag);
    const GraphTag side[2] = {cast ? GraphTag::rng : GraphTag::ng,
                              cast ? GraphTag::rng2 : GraphTag::ng2};
    for (size_t j = 0; j < rules.size(); ++j) {
        if (j == i) continue;
        for (GraphTag ht : side) {
            const Nog& h = graph_of(rules[j], ht);
            for (const auto& [w, nw] : h.naos) {
                if (nw.singular() || !nw.ao.equivalent(want)) continue;
                const Nog hctx = context_nog(h, w);
                auto iso = nog_covers(gctx, hctx, {{d.node, w}});
                if (!iso) continue;
                if (apply_group(r, d.tag, h, *iso, log)) return true;
            }
        }
    }
    return false;
}

void extrapolate_rule(std::vector<Rule>& rules, size_t i, std::ostream* log) {
    for (const Deficit& d : find_deficit(rules[i])) {
        // An earlier group in this rule may have renested this node already.
        if (!graph_of(rules[i], d.tag).nao(d.node).singular()) continue;
        try_donors(rules, i, d, log);
    }
}

std::set<Mapping> widen_unique_sources(const std::set<Mapping>& ms, const Nog& src,
                                       const Nog& dst) {
    std::map<NodeId, int> fanout;
    for (const Mapping& m : ms) ++fanout[m.src];
    std::set<Mapping> out;
    for (Mapping m : ms) {
        if (m.mult == Mult::one && !src.nao(m.src).singular() && !dst.nao(m.dst).singular() &&
            fanout[m.src] == 1)
            m.mult = Mult::many;
        out.insert(m);
    }
    return out;
}

}  // namespace

const char* to_string(GraphTag tag) {
    switch (tag) {
        case GraphTag::ng: return "ng";
        case GraphTag::ng2: return "ng2";
        case GraphTag::rng: return "rng";
        case GraphTag::rng2: return "rng2";
    }
    throw InternalError("to_string: bad tag");
}

std::vector<Deficit> find_deficit(const Rule& r) {
    std::set<Deficit> out;
    for (const Mapping& m : r.p) {
        const bool s1 = r.ng.nao(m.src).singular();
        const bool s2 = r.ng2.nao(m.dst).singular();
        if (s1 && !s2) out.insert({GraphTag::ng, m.src});
        if (s2 && !s1) out.insert({GraphTag::ng2, m.dst});
    }
    for (const Mapping& m : r.q) {
        const bool s1 = r.rng.nog.nao(m.src).singular();
        const bool s2 = r.rng2.nog.nao(m.dst).singular();
        if (s1 && !s2 && r.rng.roles_of(m.src).empty()) out.insert({GraphTag::rng, m.src});
        if (s2 && !s1 && r.rng2.roles_of(m.dst).empty()) out.insert({GraphTag::rng2, m.dst});
    }
    return {out.begin(), out.end()};
}

Rule adjust_multiplicities(const Rule& r) {
    Rule out = r;
    out.p = widen_unique_sources(r.p, r.ng, r.ng2);
    out.q = widen_unique_sources(r.q, r.rng.nog, r.rng2.nog);
    return out;
}

Dpi extrapolate(const Dpi& dpi, std::ostream* log) {
    Dpi out = dpi;
    out.stage = "extrapolate";
    // Second sweep: rules extrapolated in the first can donate to rules that
    // found no donor before.
    for (int pass = 0; pass < 2; ++pass)
        for (size_t i = 0; i < out.rules.size(); ++i) extrapolate_rule(out.rules, i, log);
    for (Rule& r : out.rules) r = adjust_multiplicities(r);
    out.rules = prune_redundant(out.rules);
    return out;
}

}  // namespace dpi
