#include "support/sessions.hpp"

namespace dpi::testing {

std::vector<Call> nine_object_trace() {
    return {
        {"getConnection", std::nullopt, {}, {}},
        {"Connection.createStatement", 1, {}, {}},
        {"Connection.createStatement", 1, {}, {}},
        {"Connection.createStatement", 1, {}, {}},
        {"Statement.executeQuery", 2, {}, {}},
        {"Statement.executeQuery", 2, {}, {}},
        {"Statement.executeQuery", 2, {}, {}},
        {"Statement.close", 2, {}, {}},
        {"Statement.executeQuery", 4, {}, {}},
        {"Statement.executeQuery", 4, {}, {}},
    };
}

std::vector<Call> ten_object_trace() {
    std::vector<Call> t = nine_object_trace();
    t.push_back({"Statement.executeQuery", 4, {}, {}});
    return t;
}

}  // namespace dpi::testing
