#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "core/rule.hpp"

namespace dpi {

struct ExploreConfig {
    uint64_t seed = 1;
    // Budget of redundant (already covered) rules; exploration stops once the
    // count exceeds it, so a zero budget stops at the first redundant hit.
    int max_redundant = 2000;
    int repeat_creation_n = 3;      // consecutive calls per drawn creator
    int max_snapshot_objects = 16;  // larger destination snapshots are not stored
};

// Per-model budgets: jdbc saturates with fewer redundants than the
// collection models.
ExploreConfig default_explore_config(const std::string& model_name);

struct ExploreResult {
    Dpi dpi;
    std::vector<Snapshot> store;
    int steps = 0;
    int redundants = 0;
};

// The randomized universal client. One seeded generator drives every pick in
// a fixed order (method, snapshot, callee, params, data), so runs replay
// exactly. A drawn method repeating the previous call of the snapshot is
// skipped half the time, and never re-runs on the same callee back to back.
// log, when given, receives lines "explore: steps=N rules=K redundants=R".
ExploreResult explore(const PackageModel& model, const ExploreConfig& cfg,
                      std::ostream* log = nullptr);

// Closes the rule set under modifier calls: for every rule, replays its
// trace and invokes each modifier on each represented object with every
// parameter and data combination, adding rules not covered yet. Added rules
// are swept too, up to `generations` sweeps past the input rules; the cap
// keeps completion bounded, since derived rules grow their heaps call by
// call and models whose modifiers allocate can differentiate contexts
// forever.
Dpi completify(const Dpi& dpi, const PackageModel& model, int generations = 2);

// DPI-level antichain extraction.
Dpi prune_redundant(const Dpi& dpi);

}  // namespace dpi
