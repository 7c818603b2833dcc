#include "core/models/models_impl.hpp"

namespace dpi {

namespace {

constexpr int kDomain = 5;  // element values 0..4; small so duplicates occur

int lowest_bit_at_least(int mask, int from) {
    for (int v = from; v < kDomain; ++v)
        if (mask & (1 << v)) return v;
    return -1;
}

// Set/iterator simulation over a tiny element domain. A Set stores its
// elements as a bitmask plus modCount; a SetItr walks elements in ascending
// order via nextElem and tracks the last returned element in current.
// Predicates:
//   empty      ==  size > 0
//   mover      ==  nextElem != -1
//   nextCalled ==  current != -1
//   sync       ==  set.modCount == expectedModCount
// Adding a duplicate returns false and changes nothing (modCount included);
// add outcomes are distinguished by their return value.
class HashSetModel final : public PackageModel {
public:
    std::string name() const override { return "hashset"; }

    const std::vector<ClassSpec>& classes() const override {
        static const std::vector<ClassSpec> kClasses = {
            {"Set", {"elems", "modCount"}, {}},
            {"SetItr", {"nextElem", "current", "expectedModCount"}, {{"iter_of", "Set"}}},
        };
        return kClasses;
    }

    const std::vector<MethodSpec>& methods() const override {
        static const std::vector<MethodSpec> kMethods = {
            {"Set.create", MethodKind::creator, "Set", {}, {}, false, 0},
            {"Set.add", MethodKind::modifier, "Set", {}, {}, true, 1},
            {"Set.iterator", MethodKind::modifier, "Set", {}, {}, false, 0},
            {"SetItr.next", MethodKind::modifier, "SetItr", {},
             {"ConcurrentModificationException", "NoSuchElementException"}, false, 0},
            {"SetItr.remove", MethodKind::modifier, "SetItr", {},
             {"IllegalStateException", "ConcurrentModificationException"}, false, 0},
        };
        return kMethods;
    }

    const PredicateSet& predicates() const override {
        static const PredicateSet kPreds = {
            {
                {"empty", "Set",
                 [](const Snapshot&, const ConcreteObject& o) { return o.scalars.at("elems") != 0; }},
                {"mover", "SetItr",
                 [](const Snapshot&, const ConcreteObject& o) {
                     return o.scalars.at("nextElem") != -1;
                 }},
                {"nextCalled", "SetItr",
                 [](const Snapshot&, const ConcreteObject& o) {
                     return o.scalars.at("current") != -1;
                 }},
                {"sync", "SetItr",
                 [](const Snapshot& sp, const ConcreteObject& o) {
                     return sp.objects.at(o.refs.at("iter_of")).scalars.at("modCount") ==
                            o.scalars.at("expectedModCount");
                 }},
            },
            {
                {"iter_of", "SetItr", "iter_of"},
            },
        };
        return kPreds;
    }

    std::vector<int> data_domain(const MethodSpec& m, int) const override {
        if (m.name == "Set.add") return {0, 1, 2, 3, 4};
        return {};
    }

    Outcome apply(Snapshot& sp, const Call& call) const override {
        sp.trace.push_back(call);
        Outcome out;
        const std::string& m = call.method;

        if (m == "Set.create") {
            int id = sp.next_logical++;
            sp.objects[id] = ConcreteObject{id, "Set", {{"elems", 0}, {"modCount", 0}}, {}};
            out.created.push_back(id);
            return out;
        }

        ConcreteObject& callee = sp.objects.at(call.callee.value());
        if (m == "Set.add") {
            int v = call.data.at(0);
            if (callee.scalars.at("elems") & (1 << v)) {
                out.ret = false;
            } else {
                callee.scalars["elems"] |= 1 << v;
                callee.scalars["modCount"] += 1;
                out.ret = true;
            }
        } else if (m == "Set.iterator") {
            int id = sp.next_logical++;
            sp.objects[id] = ConcreteObject{
                id,
                "SetItr",
                {{"nextElem", lowest_bit_at_least(callee.scalars.at("elems"), 0)},
                 {"current", -1},
                 {"expectedModCount", callee.scalars.at("modCount")}},
                {{"iter_of", callee.logical_id}}};
            out.created.push_back(id);
        } else if (m == "SetItr.next") {
            ConcreteObject& set = sp.objects.at(callee.refs.at("iter_of"));
            if (set.scalars.at("modCount") != callee.scalars.at("expectedModCount")) {
                out.exception = "ConcurrentModificationException";
            } else if (callee.scalars.at("nextElem") == -1) {
                out.exception = "NoSuchElementException";
            } else {
                int cur = callee.scalars.at("nextElem");
                callee.scalars["current"] = cur;
                callee.scalars["nextElem"] = lowest_bit_at_least(set.scalars.at("elems"), cur + 1);
            }
        } else if (m == "SetItr.remove") {
            ConcreteObject& set = sp.objects.at(callee.refs.at("iter_of"));
            if (callee.scalars.at("current") == -1) {
                out.exception = "IllegalStateException";
            } else if (set.scalars.at("modCount") != callee.scalars.at("expectedModCount")) {
                out.exception = "ConcurrentModificationException";
            } else {
                set.scalars["elems"] &= ~(1 << callee.scalars.at("current"));
                set.scalars["modCount"] += 1;
                callee.scalars["expectedModCount"] = set.scalars.at("modCount");
                callee.scalars["current"] = -1;
            }
        } else {
            throw InputError("hashset: unknown method " + m);
        }
        return out;
    }
};

}  // namespace

std::unique_ptr<PackageModel> make_hashset_model() { return std::make_unique<HashSetModel>(); }

}  // namespace dpi
