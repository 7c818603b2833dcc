#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "core/rule.hpp"

namespace dpi {

// Exception isolation works on three-valued predicates: true, false, or
// "either value". A valuation map stores only the decided predicates; an
// absent key reads as "either value". Joining two valuations keeps exactly
// the entries both sides state identically, so the representation is closed
// under join and join is associative, commutative and idempotent.
std::map<std::string, bool> join_valuations(const std::map<std::string, bool>& a,
                                            const std::map<std::string, bool>& b);

// Witness pairing nodes of the source cast graphs of two exception rules for
// the same method and exception (and the same distinguished result). Matched
// pairs agree on class, on role sets, and on the edge labels between every
// two matched pairs; role-labelled nodes must all be paired. Among the valid
// witnesses the search maximises first the number of pairs whose abstract
// objects are equivalent, then the number of pairs overall, so a node is
// never paired with a disagreeing partner while an agreeing one is free.
// When callee_strict, the callee nodes only pair if their abstract objects
// are equivalent. Returns the best witness, or nullopt when the rules do not
// describe the same observation or the role nodes cannot be paired.
std::optional<IsoMapping> joinable(const Rule& r, const Rule& r2, bool callee_strict);

// Intersection of two cast graphs under a joinable witness: nodes outside
// the witness are dropped, matched nodes keep the predicate entries both
// sides agree on (a disagreement reads "either value"), repetition flags are
// unioned, and only edges present on both sides survive. Node ids and role
// labels follow cng.
CastNog three_valued_join(const CastNog& cng, const CastNog& cng2, const IsoMapping& m);

// Does the partially-valued pattern describe a state the concrete cast graph
// g can be in? The role nodes of the two graphs are paired by role set and
// the pairing is propagated upward along the reference chains both sides
// share (each node references at most one object per label). Every pair
// produced this way must agree on class and on every predicate both sides
// decide. Nodes outside the shared chains, such as repetition context only
// one side records, are ignored; so are repetition flags, which never decide
// an exception here.
bool wildcard_match(const CastNog& pattern, const CastNog& g);

// Whether a callee node may pair with a non-equivalent callee and have the
// disagreements starred out. automatic tries combined first and falls back
// to strict for a family whose combined summary also matches a state in
// which the method completes normally.
enum class CalleeJoin { strict, combined, automatic };

// Flag vocabulary: "off" forbids three-valued callee joins, "on" allows
// them, "auto" decides per family.
std::string to_string(CalleeJoin m);
CalleeJoin callee_join_from_string(const std::string& s);

// Folds every family of exception rules for one (method, exception) into its
// minimal cast-graph summary. Each family is first merged, then reduced to
// source cast graphs plus role labels (the destination graph of an exception
// rule is a copy of its source: the call changed nothing), then pairwise
// joined to fixpoint. Rules without an exception pass through untouched.
// When log is given, automatic fallbacks are reported on it.
Dpi isolate_all(const Dpi& dpi, CalleeJoin mode = CalleeJoin::automatic,
                std::ostream* log = nullptr);

}  // namespace dpi
