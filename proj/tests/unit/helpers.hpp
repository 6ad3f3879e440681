#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dcs/graph.hpp"
#include "dcs/model.hpp"

namespace dcs::testing {

using Rows = std::vector<std::vector<std::string>>;

// Adds R(attrs) with the given rows to q, interning attributes and values.
inline void add_relation(JoinQuery& q, const std::string& name, const std::vector<std::string>& attrs, const Rows& rows) {
    Relation r;
    r.name = name;
    for (const auto& a : attrs) r.schema.push_back(q.ensure_attribute(a));
    for (const auto& row : rows) {
        std::vector<Value> v;
        for (const auto& s : row) v.push_back(q.values.intern(s));
        r.add_row(v);
    }
    r.normalize();
    q.relations.push_back(std::move(r));
}

inline AttrSet attrs(const JoinQuery& q, const std::vector<std::string>& names) {
    AttrSet s = 0;
    for (const auto& n : names) s |= bit(q.attribute_id(n));
    return s;
}

inline std::vector<Value> tuple_of(JoinQuery& q, const std::vector<std::string>& values) {
    std::vector<Value> t;
    for (const auto& v : values) t.push_back(q.values.intern(v));
    return t;
}

// R(A,B) = {(a1,b1),(a1,b2),(a2,b1)}.
inline JoinQuery three_row_relation() {
    JoinQuery q;
    add_relation(q, "R", {"A", "B"}, {{"a1", "b1"}, {"a1", "b2"}, {"a2", "b1"}});
    return q;
}

// R(A,B), S(B,C), T(C,A), each holding both orientations of every edge of the data graph.
inline JoinQuery triangle_join(const std::vector<std::pair<std::string, std::string>>& edges) {
    Rows both;
    for (const auto& [u, v] : edges) {
        both.push_back({u, v});
        both.push_back({v, u});
    }
    JoinQuery q;
    add_relation(q, "R", {"A", "B"}, both);
    add_relation(q, "S", {"B", "C"}, both);
    add_relation(q, "T", {"C", "A"}, both);
    return q;
}

inline DirectedGraph digraph(int n, std::vector<Edge> e) { return DirectedGraph::from_edges(n, std::move(e)); }
inline UndirectedGraph graph(int n, std::vector<Edge> e) { return UndirectedGraph::from_edges(n, std::move(e)); }

inline UndirectedGraph complete_graph(int n) {
    std::vector<Edge> e;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) e.emplace_back(u, v);
    return graph(n, e);
}

}  // namespace dcs::testing
