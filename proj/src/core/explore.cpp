#include "core/explore.hpp"

#include <algorithm>
#include <ostream>
#include <random>

#include "core/errors.hpp"

namespace dpi {

namespace {

// Guards against a runaway snapshot store; per-snapshot size is bounded by
// ExploreConfig, the store count by this.
constexpr size_t kMaxStoredSnapshots = 20000;

bool snapshots_equal(const Snapshot& a, const Snapshot& b) {
    if (a.next_logical != b.next_logical || a.objects.size() != b.objects.size()) return false;
    for (const auto& [id, obj] : a.objects) {
        auto it = b.objects.find(id);
        if (it == b.objects.end()) return false;
        if (obj.cls != it->second.cls || obj.scalars != it->second.scalars ||
            obj.refs != it->second.refs)
            return false;
    }
    return true;
}

// Executes the creator n times consecutively; the synthesized invocation
// spans the whole burst, with every created object carrying its role.
Invocation creator_burst(const PackageModel& model, const Snapshot& sp, const Call& call, int n) {
    Invocation acc = execute(model, sp, call);
    if (acc.exception) throw InternalError("creator raised during repeated creation");
    for (int i = 1; i < n; ++i) {
        Invocation step = execute(model, acc.sp_d, call);
        if (step.exception) throw InternalError("creator raised during repeated creation");
        acc.roles.insert(acc.roles.end(), step.roles.begin(), step.roles.end());
        acc.sp_d = std::move(step.sp_d);
    }
    return acc;
}

void progress(std::ostream* log, int steps, size_t rules, int redundants) {
    if (log)
        *log << "explore: steps=" << steps << " rules=" << rules << " redundants=" << redundants
             << "\n";
}

bool covered_by_any(const Rule& cand, const std::vector<Rule>& rules) {
    for (const Rule& have : rules)
        if (rule_covers(cand, have)) return true;
    return false;
}

// Every call of modifier m on callee o in sp: full cartesian product over
// object parameters and data values. Rule completion applies no filters.
std::vector<Call> all_modifier_calls(const PackageModel& model, const Snapshot& sp,
                                     const MethodSpec& m, int o) {
    std::vector<std::vector<int>> pools;
    for (const std::string& pc : m.param_classes) {
        std::vector<int> pool;
        for (const auto& [pid, pobj] : sp.objects)
            if (pobj.cls == pc) pool.push_back(pid);
        if (pool.empty()) return {};
        pools.push_back(std::move(pool));
    }
    const size_t n_params = pools.size();
    for (int i = 0; i < m.data_arity; ++i) {
        std::vector<int> domain = model.data_domain(m, i);
        if (domain.empty()) throw InputError("empty data domain for " + m.name);
        pools.push_back(std::move(domain));
    }
    std::vector<Call> out;
    std::vector<size_t> pick(pools.size(), 0);
    while (true) {
        Call c{m.name, o, {}, {}};
        for (size_t i = 0; i < pools.size(); ++i)
            (i < n_params ? c.params : c.data).push_back(pools[i][pick[i]]);
        out.push_back(std::move(c));
        size_t i = 0;
        for (; i < pools.size(); ++i) {
            if (++pick[i] < pools[i].size()) break;
            pick[i] = 0;
        }
        if (i == pools.size()) break;
    }
    return out;
}

}  // namespace

ExploreConfig default_explore_config(const std::string& model_name) {
    ExploreConfig cfg;
    cfg.max_redundant = model_name == "jdbc" ? 1200 : 2000;
    return cfg;
}

ExploreResult explore(const PackageModel& model, const ExploreConfig& cfg, std::ostream* log) {
    if (cfg.repeat_creation_n < 1) throw InputError("repeat_creation_n must be at least 1");
    std::mt19937_64 rng(cfg.seed);
    auto below = [&rng](size_t n) { return n == 0 ? size_t{0} : static_cast<size_t>(rng() % n); };

    const std::vector<MethodSpec>& methods = model.methods();
    if (methods.empty()) throw InputError("model has no methods");

    ExploreResult res;
    res.dpi.model = model.name();
    res.dpi.seed = cfg.seed;
    res.dpi.stage = "explore";
    res.store.push_back(Snapshot{});
    int next_id = 1;

    while (res.redundants <= cfg.max_redundant) {
        ++res.steps;
        if (log && res.steps % 2000 == 0)
            progress(log, res.steps, res.dpi.rules.size(), res.redundants);

        const MethodSpec& m = methods[below(methods.size())];
        const Snapshot sp = res.store[below(res.store.size())];
        const Call* last = sp.trace.empty() ? nullptr : &sp.trace.back();
        // Seeded skip: avoid hammering the method that just ran.
        if (last && last->method == m.name && below(2) == 0) continue;

        Call call{m.name, std::nullopt, {}, {}};
        if (m.kind != MethodKind::creator) {
            std::vector<int> callees;
            for (const auto& [id, obj] : sp.objects)
                if (obj.cls == m.owner) callees.push_back(id);
            if (callees.empty()) continue;
            call.callee = callees[below(callees.size())];
            // Never the same method on the same callee twice in a row.
            if (last && last->method == m.name && last->callee && *last->callee == *call.callee)
                continue;
            bool satisfiable = true;
            for (const std::string& pc : m.param_classes) {
                std::vector<int> pool;
                for (const auto& [pid, pobj] : sp.objects)
                    if (pobj.cls == pc) pool.push_back(pid);
                if (pool.empty()) {
                    satisfiable = false;
                    break;
                }
                call.params.push_back(pool[below(pool.size())]);
            }
            if (!satisfiable) continue;
        }
        for (int i = 0; i < m.data_arity; ++i) {
            std::vector<int> domain = model.data_domain(m, i);
            if (domain.empty()) throw InputError("empty data domain for " + m.name);
            call.data.push_back(domain[below(domain.size())]);
        }

        Invocation invoc = m.kind == MethodKind::creator
                               ? creator_burst(model, sp, call, cfg.repeat_creation_n)
                               : execute(model, sp, call);
        Rule cand = create_rule(model, invoc, next_id);
        if (covered_by_any(cand, res.dpi.rules)) {
            ++res.redundants;
            continue;
        }
        res.dpi.rules.push_back(std::move(cand));
        ++next_id;
        if (static_cast<int>(invoc.sp_d.objects.size()) <= cfg.max_snapshot_objects) {
            if (res.store.size() >= kMaxStoredSnapshots) {
                if (log) *log << "explore: snapshot store full, stopping early\n";
                break;
            }
            // Spot-check reproducibility: the stored trace must replay to the
            // snapshot it came from.
            if (below(8) == 0 && !snapshots_equal(replay(model, invoc.sp_d.trace), invoc.sp_d))
                throw InternalError("stored snapshot does not replay");
            res.store.push_back(std::move(invoc.sp_d));
        }
    }
    progress(log, res.steps, res.dpi.rules.size(), res.redundants);
    return res;
}

Dpi completify(const Dpi& dpi, const PackageModel& model, int generations) {
    Dpi out = dpi;
    int next_id = 0;
    for (const Rule& r : out.rules) next_id = std::max(next_id, r.id);
    ++next_id;
    // Rules added during completion are kept and swept themselves, but only
    // up to the generation cap: unbounded resweeping diverges, because each
    // derived rule extends its trace by one call and ever-larger contexts
    // never become covered by the smaller rules already present.
    std::vector<int> gen(out.rules.size(), 0);
    for (size_t idx = 0; idx < out.rules.size(); ++idx) {
        if (gen[idx] >= generations) continue;
        const Rule r = out.rules[idx];
        Snapshot sp = replay(model, r.trace);
        for (const MethodSpec& m : model.methods()) {
            if (m.kind != MethodKind::modifier) continue;
            for (int o : r.context_objects) {
                auto it = sp.objects.find(o);
                if (it == sp.objects.end()) throw InternalError("context object lost in replay");
                if (it->second.cls != m.owner) continue;
                for (const Call& call : all_modifier_calls(model, sp, m, o)) {
                    Rule cand = create_rule(model, execute(model, sp, call), next_id);
                    if (covered_by_any(cand, out.rules)) continue;
                    out.rules.push_back(std::move(cand));
                    gen.push_back(gen[idx] + 1);
                    ++next_id;
                }
            }
        }
    }
    return out;
}

Dpi prune_redundant(const Dpi& dpi) {
    Dpi out = dpi;
    out.rules = prune_redundant(dpi.rules);
    return out;
}

}  // namespace dpi
