#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <utility>

#include "core/rule.hpp"

namespace dpi {

// Witnesses that two rules rest on similar invocations: graph isomorphisms
// between the role-reachable cores of the source cast graphs (M1) and of the
// destination cast graphs (M2), matching abstract objects and role labels,
// with every role-sourced flow of one rule corresponding through (M1, M2) to
// a flow of the other. Repetition flags are free to differ.
std::optional<std::pair<IsoMapping, IsoMapping>> role_consistent(const Rule& r, const Rule& r2);

// Same observation (method, exception, distinguished result) and role
// consistent.
bool mergeable(const Rule& r, const Rule& r2);

// Coarsening that splits only on outgoing structure: equivalent objects kept
// apart merely by who points at them fall into one block. Role-labelled
// (pinned) nodes stay alone.
Partition coarsest_partition_upward(const Nog& g, const std::set<NodeId>& pinned);

// Restores the singular-source closure by copying destination flags onto
// offending sources, parents first so chains settle in one sweep.
void repair_edges(Nog& g);

// A merged graph plus where every input node ended up.
struct GraphMerge {
    Nog nog;
    std::map<NodeId, std::set<std::string>> u;  // role labels after relocation
    std::map<NodeId, NodeId> from_left;
    std::map<NodeId, NodeId> from_right;
};

// Union of two cast graphs: right nodes matched by m collapse onto their
// left partner (which takes the right node's flags), the rest join with
// fresh ids; then upward lumping with non-singular representatives and role
// relabelling.
GraphMerge merge_r(const CastNog& left, const CastNog& right, const IsoMapping& m);

// Plain union of two nested object graphs with the same upward lumping.
GraphMerge merge_n(const Nog& left, const Nog& right);

// Union of both rules' mappings relocated onto the merged graphs. Duplicate
// pairs keep the many multiplicity. Two anomalies are repaired in place on
// the merged graphs: a destination fed by two sources cannot stay singular,
// and a singular sole destination of a non-singular source becomes
// non-singular with a many mapping.
std::set<Mapping> combine_mappings(const std::set<Mapping>& ml, const std::set<Mapping>& mr,
                                   GraphMerge& src, GraphMerge& dst);

// Folds two mergeable rules into one summary rule keeping the left id and
// trace. Throws InputError when the rules are not mergeable.
Rule merge(const Rule& r, const Rule& r2);

// Pairwise merging, sweeping until no mergeable pair remains, then an
// antichain prune. stage becomes "merge". Merges that fail to cover one of
// their inputs are reported to `log` when given.
Dpi merge_all(const Dpi& dpi, std::ostream* log = nullptr);

}  // namespace dpi
