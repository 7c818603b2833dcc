#include "core/heap.hpp"

#include <algorithm>

namespace dpi {

std::vector<int> PackageModel::data_domain(const MethodSpec&, int) const { return {}; }

const MethodSpec& PackageModel::method(const std::string& mname) const {
    for (const MethodSpec& m : methods())
        if (m.name == mname) return m;
    throw InputError("unknown method " + mname);
}

const ClassSpec& PackageModel::class_spec(const std::string& cname) const {
    for (const ClassSpec& c : classes())
        if (c.name == cname) return c;
    throw InputError("unknown class " + cname);
}

std::vector<const ScalarPredicate*> class_predicates(const PredicateSet& preds,
                                                     const std::string& cls) {
    std::vector<const ScalarPredicate*> out;
    for (const ScalarPredicate& p : preds.scalar)
        if (p.cls == cls) out.push_back(&p);
    std::sort(out.begin(), out.end(),
              [](const ScalarPredicate* a, const ScalarPredicate* b) { return a->name < b->name; });
    return out;
}

namespace {

std::map<int, AbstractObject> valuations(const PackageModel& model, const Snapshot& sp) {
    std::map<int, AbstractObject> out;
    for (const auto& [id, obj] : sp.objects) {
        AbstractObject ao;
        ao.logical_id = id;
        ao.cls = obj.cls;
        for (const ScalarPredicate* p : class_predicates(model.predicates(), obj.cls))
            ao.preds[p->name] = p->eval(sp, obj);
        out[id] = std::move(ao);
    }
    return out;
}

}  // namespace

Invocation execute(const PackageModel& model, const Snapshot& sp, const Call& call) {
    const MethodSpec& m = model.method(call.method);
    if (m.kind == MethodKind::creator && call.callee)
        throw InputError("creator call with callee: " + m.name);
    if (m.kind == MethodKind::modifier) {
        if (!call.callee) throw InputError("modifier call without callee: " + m.name);
        if (!sp.objects.count(*call.callee))
            throw InputError("unresolvable callee logical id " + std::to_string(*call.callee));
    }
    for (int p : call.params)
        if (!sp.objects.count(p))
            throw InputError("unresolvable param logical id " + std::to_string(p));

    Invocation inv;
    inv.m = &m;
    inv.sp_s = sp;
    inv.sp_d = sp;
    Outcome outcome = model.apply(inv.sp_d, call);
    inv.exception = outcome.exception;
    inv.ret = outcome.ret;

    if (call.callee) inv.roles.push_back({*call.callee, "callee"});
    for (size_t i = 0; i < call.params.size(); ++i)
        inv.roles.push_back({call.params[i], "param_" + std::to_string(i)});
    for (int fresh : outcome.created) inv.roles.push_back({fresh, "new"});
    if (outcome.returned_object) inv.roles.push_back({*outcome.returned_object, "return"});

    if (inv.exception) {
        // Exception purity: a raising call must leave every predicate
        // valuation untouched (holds for all shipped models).
        auto before = valuations(model, inv.sp_s);
        auto after = valuations(model, inv.sp_d);
        if (before.size() != after.size()) throw InternalError("exception created objects");
        for (const auto& [id, ao] : before)
            if (!ao.equivalent(after.at(id)) || ao.logical_id != after.at(id).logical_id)
                throw InternalError("exception mutated state of object " + std::to_string(id));
    }
    return inv;
}

Snapshot replay(const PackageModel& model, const std::vector<Call>& trace) {
    Snapshot sp;
    for (const Call& call : trace) {
        Invocation inv = execute(model, sp, call);
        sp = std::move(inv.sp_d);
    }
    return sp;
}

HeapGraph evaluate(const PackageModel& model, const Snapshot& sp) {
    HeapGraph hg;
    hg.payload = valuations(model, sp);
    for (const auto& [id, ao] : hg.payload) {
        (void)ao;
        hg.graph.add_node(id);
    }
    for (const auto& [id, obj] : sp.objects)
        for (const ReferencePredicate& rp : model.predicates().reference) {
            if (rp.cls != obj.cls) continue;
            auto it = obj.refs.find(rp.attr);
            if (it == obj.refs.end()) continue;
            if (!sp.objects.count(it->second))
                throw InternalError("dangling reference " + rp.attr);
            hg.graph.add_edge(id, it->second, rp.name);
        }
    topo_layers(hg.graph);  // rejects cyclic reference structure
    return hg;
}

std::vector<Call> list_calls(const PackageModel& model, const Snapshot& sp,
                             const std::function<int(int)>& draw) {
    std::vector<Call> out;
    const Call* last = sp.trace.empty() ? nullptr : &sp.trace.back();

    auto with_data = [&](Call c) {
        const MethodSpec& m = model.method(c.method);
        for (int i = 0; i < m.data_arity; ++i) {
            std::vector<int> domain = model.data_domain(m, i);
            if (domain.empty()) throw InputError("empty data domain for " + m.name);
            c.data.push_back(domain[static_cast<size_t>(draw(static_cast<int>(domain.size())))]);
        }
        out.push_back(std::move(c));
    };

    for (const MethodSpec& m : model.methods()) {
        if (m.kind == MethodKind::creator) {
            with_data(Call{m.name, std::nullopt, {}, {}});
            continue;
        }
        for (const auto& [id, obj] : sp.objects) {
            if (obj.cls != m.owner) continue;
            if (last && last->method == m.name && last->callee && *last->callee == id)
                continue;  // no immediate repeat of the same method on the same object
            // Enumerate object-parameter combinations from the snapshot;
            // candidates with unsatisfiable parameter classes are skipped.
            std::vector<std::vector<int>> pools;
            bool ok = true;
            for (const std::string& pc : m.param_classes) {
                std::vector<int> pool;
                for (const auto& [pid, pobj] : sp.objects)
                    if (pobj.cls == pc) pool.push_back(pid);
                if (pool.empty()) {
                    ok = false;
                    break;
                }
                pools.push_back(std::move(pool));
            }
            if (!ok) continue;
            std::vector<int> pick(pools.size(), 0);
            while (true) {
                Call c{m.name, id, {}, {}};
                for (size_t i = 0; i < pools.size(); ++i)
                    c.params.push_back(pools[i][static_cast<size_t>(pick[i])]);
                with_data(std::move(c));
                size_t i = 0;
                for (; i < pools.size(); ++i) {
                    if (++pick[i] < static_cast<int>(pools[i].size())) break;
                    pick[i] = 0;
                }
                if (i == pools.size()) break;
            }
        }
    }
    return out;
}

}  // namespace dpi
