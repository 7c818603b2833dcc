#include "support/scenarios.hpp"

namespace dpi::testing {

namespace {

void add(LabelledGraph& s, NodeId v, const std::string& payload) {
    s.graph.add_node(v);
    s.payload[v] = payload;
}

}  // namespace

LabelledGraph nine_object_session() {
    LabelledGraph s;
    add(s, 1, "Connection:open");
    add(s, 2, "Statement:closed");
    add(s, 3, "Statement:open");
    add(s, 4, "Statement:open");
    add(s, 5, "ResultSet:closed");
    add(s, 6, "ResultSet:closed");
    add(s, 7, "ResultSet:closed");
    add(s, 8, "ResultSet:closed");
    add(s, 9, "ResultSet:open");
    s.graph.add_edge(2, 1, "conn");
    s.graph.add_edge(3, 1, "conn");
    s.graph.add_edge(4, 1, "conn");
    s.graph.add_edge(5, 2, "stmt");
    s.graph.add_edge(6, 2, "stmt");
    s.graph.add_edge(7, 2, "stmt");
    s.graph.add_edge(8, 4, "stmt");
    s.graph.add_edge(9, 4, "stmt");
    return s;
}

LabelledGraph ten_object_session() {
    LabelledGraph s = nine_object_session();
    s.payload[9] = "ResultSet:closed";
    add(s, 10, "ResultSet:open");
    s.graph.add_edge(10, 4, "stmt");
    return s;
}

LabelledGraph nested_chain() {
    LabelledGraph s;
    add(s, 1, "Connection:open");
    add(s, 2, "Statement:closed");
    add(s, 3, "ResultSet:closed");
    s.graph.add_edge(2, 1, "conn");
    s.graph.add_edge(3, 2, "stmt");
    return s;
}

}  // namespace dpi::testing
