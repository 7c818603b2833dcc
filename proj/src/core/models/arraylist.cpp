#include "core/models/models_impl.hpp"

namespace dpi {

namespace {

// Array/iterator simulation. An Array carries size and modCount; an Itr
// carries cursor, lastRet and expectedModCount plus a reference to its
// array. Predicate formulas (names kept as published, including the inverted
// reading of "empty"):
//   empty      ==  size > 0
//   nextCalled ==  lastRet != -1
//   mover      ==  array.size > cursor
//   sync       ==  array.modCount == expectedModCount
class ArrayListModel final : public PackageModel {
public:
    std::string name() const override { return "arraylist"; }

    const std::vector<ClassSpec>& classes() const override {
        static const std::vector<ClassSpec> kClasses = {
            {"Array", {"size", "modCount"}, {}},
            {"Itr", {"cursor", "lastRet", "expectedModCount"}, {{"iter_of", "Array"}}},
        };
        return kClasses;
    }

    const std::vector<MethodSpec>& methods() const override {
        static const std::vector<MethodSpec> kMethods = {
            {"Array.create", MethodKind::creator, "Array", {}, {}, false, 0},
            {"Array.add", MethodKind::modifier, "Array", {}, {}, false, 1},
            {"Array.iterator", MethodKind::modifier, "Array", {}, {}, false, 0},
            {"Itr.next", MethodKind::modifier, "Itr", {},
             {"ConcurrentModificationException", "NoSuchElementException"}, false, 0},
            {"Itr.remove", MethodKind::modifier, "Itr", {},
             {"IllegalStateException", "ConcurrentModificationException"}, false, 0},
        };
        return kMethods;
    }

    const PredicateSet& predicates() const override {
        static const PredicateSet kPreds = {
            {
                {"empty", "Array",
                 [](const Snapshot&, const ConcreteObject& o) { return o.scalars.at("size") > 0; }},
                {"nextCalled", "Itr",
                 [](const Snapshot&, const ConcreteObject& o) {
                     return o.scalars.at("lastRet") != -1;
                 }},
                {"mover", "Itr",
                 [](const Snapshot& sp, const ConcreteObject& o) {
                     return array_of(sp, o).scalars.at("size") > o.scalars.at("cursor");
                 }},
                {"sync", "Itr",
                 [](const Snapshot& sp, const ConcreteObject& o) {
                     return array_of(sp, o).scalars.at("modCount") ==
                            o.scalars.at("expectedModCount");
                 }},
            },
            {
                {"iter_of", "Itr", "iter_of"},
            },
        };
        return kPreds;
    }

    std::vector<int> data_domain(const MethodSpec& m, int) const override {
        if (m.name == "Array.add") return {0, 1, 2, 3, 4};
        return {};
    }

    Outcome apply(Snapshot& sp, const Call& call) const override {
        sp.trace.push_back(call);
        Outcome out;
        const std::string& m = call.method;

        if (m == "Array.create") {
            int id = sp.next_logical++;
            sp.objects[id] = ConcreteObject{id, "Array", {{"size", 0}, {"modCount", 0}}, {}};
            out.created.push_back(id);
            return out;
        }

        ConcreteObject& callee = sp.objects.at(call.callee.value());
        if (m == "Array.add") {
            // Stored values never influence the predicates, only the count.
            callee.scalars["size"] += 1;
            callee.scalars["modCount"] += 1;
        } else if (m == "Array.iterator") {
            int id = sp.next_logical++;
            sp.objects[id] = ConcreteObject{
                id,
                "Itr",
                {{"cursor", 0}, {"lastRet", -1}, {"expectedModCount", callee.scalars.at("modCount")}},
                {{"iter_of", callee.logical_id}}};
            out.created.push_back(id);
        } else if (m == "Itr.next") {
            ConcreteObject& arr = sp.objects.at(callee.refs.at("iter_of"));
            if (arr.scalars.at("modCount") != callee.scalars.at("expectedModCount")) {
                out.exception = "ConcurrentModificationException";
            } else if (callee.scalars.at("cursor") >= arr.scalars.at("size")) {
                out.exception = "NoSuchElementException";
            } else {
                callee.scalars["lastRet"] = callee.scalars.at("cursor");
                callee.scalars["cursor"] += 1;
            }
        } else if (m == "Itr.remove") {
            ConcreteObject& arr = sp.objects.at(callee.refs.at("iter_of"));
            if (callee.scalars.at("lastRet") < 0) {
                out.exception = "IllegalStateException";
            } else if (arr.scalars.at("modCount") != callee.scalars.at("expectedModCount")) {
                out.exception = "ConcurrentModificationException";
            } else {
                arr.scalars["size"] -= 1;
                arr.scalars["modCount"] += 1;
                callee.scalars["cursor"] = callee.scalars.at("lastRet");
                callee.scalars["lastRet"] = -1;
                callee.scalars["expectedModCount"] = arr.scalars.at("modCount");
            }
        } else {
            throw InputError("arraylist: unknown method " + m);
        }
        return out;
    }

private:
    static const ConcreteObject& array_of(const Snapshot& sp, const ConcreteObject& itr) {
        return sp.objects.at(itr.refs.at("iter_of"));
    }
};

}  // namespace

std::unique_ptr<PackageModel> make_arraylist_model() {
    return std::make_unique<ArrayListModel>();
}

}  // namespace dpi
