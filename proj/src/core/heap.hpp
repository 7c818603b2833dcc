#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "core/graph.hpp"

namespace dpi {

enum class MethodKind { creator, modifier };

struct MethodSpec {
    std::string name;  // unique within a model, e.g. "Statement.executeQuery"
    MethodKind kind = MethodKind::modifier;
    std::string owner;  // callee class for modifiers, created class for creators
    std::vector<std::string> param_classes;
    std::vector<std::string> declared_exceptions;
    bool returns_value_distinguished = false;
    int data_arity = 0;
};

struct ClassSpec {
    std::string name;
    std::vector<std::string> primitive_attrs;
    // attr name (doubles as the heap edge label) -> target class
    std::vector<std::pair<std::string, std::string>> reference_attrs;
};

// Logical ids are assigned in creation order, so replayed snapshots
// correspond to their originals positionally.
struct ConcreteObject {
    int logical_id = 0;
    std::string cls;
    std::map<std::string, int> scalars;
    std::map<std::string, int> refs;  // attr -> target logical id; absent = null
};

struct Call {
    std::string method;
    std::optional<int> callee;  // creator calls have no callee
    std::vector<int> params;    // logical ids of object parameters
    std::vector<int> data;      // scalar data arguments
};

struct Snapshot {
    std::map<int, ConcreteObject> objects;  // keyed by logical id
    std::vector<Call> trace;
    int next_logical = 1;
};

struct Role {
    int logical_id = 0;
    std::string rname;  // callee | new | return | param_<i>
};

// Scalar predicates evaluate over the full snapshot so validity-style
// predicates can read transitively referenced objects.
struct ScalarPredicate {
    std::string name;
    std::string cls;
    std::function<bool(const Snapshot&, const ConcreteObject&)> eval;
};

struct ReferencePredicate {
    std::string name;  // edge label; equals the underlying attribute
    std::string cls;
    std::string attr;
};

struct PredicateSet {
    std::vector<ScalarPredicate> scalar;
    std::vector<ReferencePredicate> reference;
};

// Result of applying one call to a snapshot.
struct Outcome {
    std::optional<std::string> exception;
    std::vector<int> created;             // logical ids in creation order
    std::optional<int> returned_object;   // pre-existing object handed back
    std::optional<bool> ret;              // set when returns_value_distinguished
};

struct Invocation {
    const MethodSpec* m = nullptr;
    std::optional<std::string> exception;
    std::optional<bool> ret;
    Snapshot sp_s;
    Snapshot sp_d;
    std::vector<Role> roles;
};

// A deterministic in-memory simulation of a package under study. Instances
// are stateless between calls; all state lives in Snapshot values.
class PackageModel {
public:
    virtual ~PackageModel() = default;
    virtual std::string name() const = 0;
    virtual const std::vector<ClassSpec>& classes() const = 0;
    virtual const std::vector<MethodSpec>& methods() const = 0;
    virtual const PredicateSet& predicates() const = 0;
    // Candidate values for the given data argument of m.
    virtual std::vector<int> data_domain(const MethodSpec& m, int arg_index) const;
    // Applies the call in place, assigning fresh logical ids in creation
    // order and appending the call to the trace. Exception checks run before
    // any mutation; a raising call changes nothing but is still recorded.
    virtual Outcome apply(Snapshot& sp, const Call& call) const = 0;

    const MethodSpec& method(const std::string& name) const;
    const ClassSpec& class_spec(const std::string& name) const;
};

struct AbstractObject {
    int logical_id = 0;  // representative; not part of equivalence
    std::string cls;
    std::map<std::string, bool> preds;

    bool equivalent(const AbstractObject& o) const { return cls == o.cls && preds == o.preds; }
};

// Heap graph for one snapshot: nodes are logical ids, payloads the abstract
// objects, edges the non-null reference-predicate valuations.
struct HeapGraph {
    Multigraph graph;
    std::map<NodeId, AbstractObject> payload;
};

// Executes call over a copy of sp; sp itself is never mutated.
Invocation execute(const PackageModel& model, const Snapshot& sp, const Call& call);

Snapshot replay(const PackageModel& model, const std::vector<Call>& trace);

// Throws DomainViolation if the reference edges form a cycle.
HeapGraph evaluate(const PackageModel& model, const Snapshot& sp);

// Per-class scalar predicate names, sorted; used to build full valuations.
std::vector<const ScalarPredicate*> class_predicates(const PredicateSet& preds,
                                                     const std::string& cls);

// Candidate calls over sp: every creator, every (modifier, callee, object
// parameter combination) drawable from sp. Excludes a candidate whose
// (method, callee) equals the snapshot's last call. Data arguments are drawn
// from the model's data domains via draw.
std::vector<Call> list_calls(const PackageModel& model, const Snapshot& sp,
                             const std::function<int(int)>& draw);

}  // namespace dpi
