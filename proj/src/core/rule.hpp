#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "core/heap.hpp"
#include "core/nested.hpp"

namespace dpi {

enum class Mult { one, many };

std::string to_string(Mult m);
Mult mult_from_string(const std::string& s);

// Object flow between one node of a source-side graph and one node of the
// destination-side graph. many records that at least two concrete objects
// flowed along the same pair.
struct Mapping {
    NodeId src = 0;
    NodeId dst = 0;
    Mult mult = Mult::one;

    friend bool operator<(const Mapping& a, const Mapping& b) {
        return std::tie(a.src, a.dst, a.mult) < std::tie(b.src, b.dst, b.mult);
    }
    friend bool operator==(const Mapping& a, const Mapping& b) {
        return a.src == b.src && a.dst == b.dst && a.mult == b.mult;
    }
};

// One observed rewrite: the method takes heaps shaped like ng to heaps shaped
// like ng2, with the role-labelled cast graphs rng/rng2 pinning the objects
// the call touched. q tracks flows between cast nodes, p the flows between
// the remaining context nodes. ret is only set for methods whose boolean
// result distinguishes behaviours. The generating trace replays to the
// destination snapshot, which rule completion relies on.
struct Rule {
    int id = 0;
    std::string method;
    std::optional<std::string> exception;
    std::optional<bool> ret;
    Nog ng;
    Nog ng2;
    CastNog rng;
    CastNog rng2;
    std::set<Mapping> p;
    std::set<Mapping> q;
    std::vector<Call> trace;
    // Concrete objects the context graphs represent in the destination
    // snapshot; rule completion invokes every modifier on each of them.
    std::set<int> context_objects;
};

// A dynamic package interface: the rule set mined for one package model.
// stage records which pipeline stage produced this snapshot of the rules.
struct Dpi {
    std::string model;
    uint64_t seed = 0;
    std::string stage;
    std::vector<Rule> rules;
};

// Builds the rule observed by one invocation. The synthesized invocation of a
// repeated creator (several "new" roles) is accepted as-is. Throws
// InternalError when a structural invariant fails (flow totality, mapping
// multiplicity against node flags).
Rule create_rule(const PackageModel& model, const Invocation& invoc, int id);

// m1 (living in src1/dst1) is covered by m2 (living in src2/dst2): both ends
// covered node-wise and not many -> one.
bool mapping_covers(const Nog& src1, const Nog& dst1, const Mapping& m1,
                    const Nog& src2, const Nog& dst2, const Mapping& m2);

// r is covered by r2: same method, exception and distinguished result; joint
// witnesses embed every graph of r into the matching graph of r2 under nao
// covering (cast witnesses also preserve role sets); every q flow of r has a
// corresponding q flow of r2 through the cast witnesses and every p flow a
// counterpart through the context witnesses.
bool rule_covers(const Rule& r, const Rule& r2);

// Equality up to node renaming: exact nao equivalence, exact roles, exact
// mappings and multiplicities. Ignores ids and traces.
bool rule_isomorphic(const Rule& r, const Rule& r2);

// Antichain extraction: drops every rule strictly covered by another and
// keeps only the smallest id of each mutually-covering class.
std::vector<Rule> prune_redundant(const std::vector<Rule>& rules);

}  // namespace dpi
