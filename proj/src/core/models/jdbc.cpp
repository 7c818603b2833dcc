#include "core/models/models_impl.hpp"

namespace dpi {

namespace {

// Connection/Statement/ResultSet simulation. Scalar predicates expose each
// object's own open flag; method guards additionally require every
// transitively referenced object to be open ("validity"). Closing a
// Statement cascades to its open ResultSets only while its Connection is
// still open; closing a Connection touches nothing else. Together with
// executeQuery's closing of the callee's previous open ResultSet this makes
// exactly these (r_open, s_open, c_open) combinations reachable for a
// ResultSet: (T,T,T), (T,T,F), (T,F,F) and all four with r_open = F.
class JdbcModel final : public PackageModel {
public:
    std::string name() const override { return "jdbc"; }

    const std::vector<ClassSpec>& classes() const override {
        static const std::vector<ClassSpec> kClasses = {
            {"Connection", {"active"}, {}},
            {"Statement", {"active"}, {{"conn", "Connection"}}},
            {"ResultSet", {"active"}, {{"stmt", "Statement"}}},
        };
        return kClasses;
    }

    const std::vector<MethodSpec>& methods() const override {
        static const std::vector<MethodSpec> kMethods = {
            {"getConnection", MethodKind::creator, "Connection", {}, {}, false, 0},
            {"Connection.createStatement", MethodKind::modifier, "Connection", {},
             {"Connection not open"}, false, 0},
            {"Statement.executeQuery", MethodKind::modifier, "Statement", {},
             {"Statement not open"}, false, 0},
            {"Statement.execute", MethodKind::modifier, "Statement", {},
             {"Statement not open"}, false, 0},
            {"ResultSet.next", MethodKind::modifier, "ResultSet", {},
             {"ResultSet not open"}, false, 0},
            {"ResultSet.close", MethodKind::modifier, "ResultSet", {}, {}, false, 0},
            {"Statement.close", MethodKind::modifier, "Statement", {}, {}, false, 0},
            {"Connection.close", MethodKind::modifier, "Connection", {}, {}, false, 0},
        };
        return kMethods;
    }

    const PredicateSet& predicates() const override {
        static const PredicateSet kPreds = {
            {
                {"c_open", "Connection", own_active()},
                {"s_open", "Statement", own_active()},
                {"r_open", "ResultSet", own_active()},
            },
            {
                {"conn", "Statement", "conn"},
                {"stmt", "ResultSet", "stmt"},
            },
        };
        return kPreds;
    }

    Outcome apply(Snapshot& sp, const Call& call) const override {
        sp.trace.push_back(call);
        Outcome out;
        const std::string& m = call.method;

        if (m == "getConnection") {
            out.created.push_back(create(sp, "Connection", {{"active", 1}}, {}));
            return out;
        }

        ConcreteObject& callee = sp.objects.at(call.callee.value());
        if (m == "Connection.createStatement") {
            if (!valid(sp, callee)) return raise(out, "Connection not open");
            out.created.push_back(
                create(sp, "Statement", {{"active", 1}}, {{"conn", callee.logical_id}}));
        } else if (m == "Statement.executeQuery") {
            if (!valid(sp, callee)) return raise(out, "Statement not open");
            close_open_result_sets(sp, callee.logical_id);
            out.created.push_back(
                create(sp, "ResultSet", {{"active", 1}}, {{"stmt", callee.logical_id}}));
        } else if (m == "Statement.execute") {
            if (!valid(sp, callee)) return raise(out, "Statement not open");
            close_open_result_sets(sp, callee.logical_id);
        } else if (m == "ResultSet.next") {
            if (!valid(sp, callee)) return raise(out, "ResultSet not open");
        } else if (m == "ResultSet.close") {
            callee.scalars["active"] = 0;
        } else if (m == "Statement.close") {
            if (conn_open(sp, callee)) close_open_result_sets(sp, callee.logical_id);
            callee.scalars["active"] = 0;
        } else if (m == "Connection.close") {
            callee.scalars["active"] = 0;
        } else {
            throw InputError("jdbc: unknown method " + m);
        }
        return out;
    }

private:
    static std::function<bool(const Snapshot&, const ConcreteObject&)> own_active() {
        return [](const Snapshot&, const ConcreteObject& o) { return o.scalars.at("active") == 1; };
    }

    static bool valid(const Snapshot& sp, const ConcreteObject& o) {
        if (o.scalars.at("active") != 1) return false;
        for (const auto& [attr, target] : o.refs) {
            (void)attr;
            if (!valid(sp, sp.objects.at(target))) return false;
        }
        return true;
    }

    static bool conn_open(const Snapshot& sp, const ConcreteObject& stmt) {
        return sp.objects.at(stmt.refs.at("conn")).scalars.at("active") == 1;
    }

    static void close_open_result_sets(Snapshot& sp, int stmt_id) {
        for (auto& [id, obj] : sp.objects) {
            (void)id;
            if (obj.cls == "ResultSet" && obj.refs.at("stmt") == stmt_id)
                obj.scalars["active"] = 0;
        }
    }

    static int create(Snapshot& sp, const std::string& cls, std::map<std::string, int> scalars,
                      std::map<std::string, int> refs) {
        int id = sp.next_logical++;
        sp.objects[id] = ConcreteObject{id, cls, std::move(scalars), std::move(refs)};
        return id;
    }

    static Outcome& raise(Outcome& out, const std::string& e) {
        out.exception = e;
        return out;
    }
};

}  // namespace

std::unique_ptr<PackageModel> make_jdbc_model() { return std::make_unique<JdbcModel>(); }

}  // namespace dpi
