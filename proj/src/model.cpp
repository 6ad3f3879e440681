#include "dcs/model.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <sstream>

#include "dcs/error.hpp"

namespace dcs {

std::vector<int> members(AttrSet s) {
    std::vector<int> out;
    while (s) {
        out.push_back(__builtin_ctzll(s));
        s &= s - 1;
    }
    return out;
}

AttrSet make_set(const std::vector<int>& ids) {
    AttrSet s = 0;
    for (int a : ids) s |= bit(a);
    return s;
}

Value ValueDictionary::intern(const std::string& raw) {
    auto [it, inserted] = ids_.try_emplace(raw, static_cast<Value>(names_.size()));
    if (inserted) names_.push_back(raw);
    return it->second;
}

AttrSet Relation::schema_mask() const { return make_set(schema); }

int Relation::column_of(int attribute) const {
    for (std::size_t c = 0; c < schema.size(); ++c)
        if (schema[c] == attribute) return static_cast<int>(c);
    return -1;
}

void Relation::add_row(const std::vector<Value>& values) {
    if (values.size() != schema.size())
        throw SchemaError("row of width " + std::to_string(values.size()) + " in relation '" + name +
                          "' of arity " + std::to_string(schema.size()));
    data.insert(data.end(), values.begin(), values.end());
}

void Relation::normalize() {
    const std::size_t w = arity();
    if (w == 0) return;
    std::vector<std::vector<Value>> rows(size());
    for (std::size_t r = 0; r < rows.size(); ++r) rows[r].assign(row(r), row(r) + w);
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    data.clear();
    for (auto& r : rows) data.insert(data.end(), r.begin(), r.end());
}

AttrSet JoinQuery::all_attributes() const {
    AttrSet s = 0;
    for (const auto& a : universe) s |= bit(a.id);
    return s;
}

std::size_t JoinQuery::input_size() const {
    std::size_t n = 0;
    for (const auto& r : relations) n += r.size();
    return n;
}

int JoinQuery::attribute_id(const std::string& name) const {
    for (const auto& a : universe)
        if (a.name == name) return a.id;
    throw SchemaError("unknown attribute '" + name + "'");
}

int JoinQuery::ensure_attribute(const std::string& name) {
    for (const auto& a : universe)
        if (a.name == name) return a.id;
    if (universe.size() >= kMaxAttributes) throw TooLarge("more than 64 attributes");
    int id = static_cast<int>(universe.size());
    universe.push_back({id, name});
    return id;
}

std::string JoinQuery::set_name(AttrSet s) const {
    std::string out = "{";
    bool first = true;
    for (int a : members(s)) {
        if (!first) out += ",";
        first = false;
        out += a < attribute_count() ? universe[a].name : std::to_string(a);
    }
    return out + "}";
}

bool canonical_less(const DegreeConstraint& a, const DegreeConstraint& b) {
    auto ax = members(a.X), bx = members(b.X);
    if (ax != bx) return ax < bx;
    auto ay = members(a.Y), by = members(b.Y);
    if (ay != by) return ay < by;
    return a.N < b.N;
}

int ConstraintSet::span() const {
    AttrSet all = 0;
    for (const auto& c : constraints) all |= c.Y;
    return all ? 64 - __builtin_clzll(all) : 0;
}

std::vector<std::pair<int, int>> DependencyGraph::edges() const {
    std::vector<std::pair<int, int>> e;
    for (int u = 0; u < n; ++u)
        for (int v : out[u]) e.emplace_back(u, v);
    return e;
}

std::uint64_t degree(const Relation& r, AttrSet X, AttrSet Y) {
    const AttrSet schema = r.schema_mask();
    if (!subset_of(Y, schema)) throw SchemaError("degree: Y is not inside schema of '" + r.name + "'");
    if (!subset_of(X, Y) || X == Y) throw SchemaError("degree: X must be a proper subset of Y");
    std::vector<int> xc, yc;
    for (std::size_t c = 0; c < r.arity(); ++c) {
        if (X & bit(r.schema[c])) xc.push_back(static_cast<int>(c));
        if (Y & bit(r.schema[c])) yc.push_back(static_cast<int>(c));
    }
    // Y contains X, so distinct Y-projections grouped by their X part give the degree.
    std::vector<std::vector<Value>> proj;
    proj.reserve(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        const Value* row = r.row(i);
        std::vector<Value> key;
        key.reserve(xc.size() + yc.size());
        for (int c : xc) key.push_back(row[c]);
        for (int c : yc) key.push_back(row[c]);
        proj.push_back(std::move(key));
    }
    std::sort(proj.begin(), proj.end());
    proj.erase(std::unique(proj.begin(), proj.end()), proj.end());
    std::uint64_t best = 0, run = 0;
    for (std::size_t i = 0; i < proj.size(); ++i) {
        bool same = i > 0 && std::equal(proj[i].begin(), proj[i].begin() + xc.size(), proj[i - 1].begin());
        run = same ? run + 1 : 1;
        best = std::max(best, run);
    }
    return best;
}

ConstraintSet normalize_constraints(std::vector<DegreeConstraint> list) {
    for (const auto& c : list) {
        if (!subset_of(c.X, c.Y) || c.X == c.Y) throw SchemaError("constraint needs X to be a proper subset of Y");
        if (c.N < 1) throw SchemaError("constraint bound N must be at least 1");
    }
    std::sort(list.begin(), list.end(), canonical_less);
    ConstraintSet out;
    for (const auto& c : list) {
        if (!out.constraints.empty() && out.constraints.back().X == c.X && out.constraints.back().Y == c.Y)
            continue;  // sorted by N within (X,Y), the first kept is the tightest
        out.constraints.push_back(c);
    }
    out.guards.assign(out.constraints.size(), -1);
    return out;
}

ConstraintSet validate_and_close(const JoinQuery& q, const std::vector<DegreeConstraint>& declared) {
    const AttrSet universe = q.all_attributes();
    std::vector<DegreeConstraint> all;
    for (const auto& c : declared) {
        if (!subset_of(c.Y, universe)) throw SchemaError("constraint mentions an unknown attribute");
        all.push_back(c);
    }
    for (const auto& r : q.relations) {
        if (r.schema.empty()) throw SchemaError("relation '" + r.name + "' has an empty schema");
        // An empty relation keeps N = 1 so the constraint stays well formed.
        all.push_back({0, r.schema_mask(), std::max<std::uint64_t>(1, r.size())});
    }
    ConstraintSet dc = normalize_constraints(std::move(all));
    for (std::size_t i = 0; i < dc.size(); ++i) {
        const auto& c = dc.constraints[i];
        for (std::size_t r = 0; r < q.relations.size(); ++r) {
            const Relation& rel = q.relations[r];
            if (subset_of(c.Y, rel.schema_mask()) && degree(rel, c.X, c.Y) <= c.N) {
                dc.guards[i] = static_cast<int>(r);
                break;
            }
        }
        if (dc.guards[i] < 0) {
            std::ostringstream msg;
            msg << "no relation guards (" << q.set_name(c.X) << ", " << q.set_name(c.Y) << ", " << c.N << ")";
            throw UnguardedConstraint(msg.str());
        }
    }
    return dc;
}

DependencyGraph dependency_graph(const ConstraintSet& dc, int attribute_count) {
    DependencyGraph g;
    g.n = attribute_count;
    g.out.assign(attribute_count, {});
    for (const auto& c : dc.constraints) {
        if (c.is_cardinality()) continue;
        for (int x : members(c.X))
            for (int y : members(c.Y & ~c.X)) {
                if (x >= attribute_count || y >= attribute_count)
                    throw SchemaError("constraint attribute outside the universe");
                g.out[x].push_back(y);
            }
    }
    for (auto& adj : g.out) {
        std::sort(adj.begin(), adj.end());
        adj.erase(std::unique(adj.begin(), adj.end()), adj.end());
    }
    try {
        topological_order(g);
        g.acyclic = true;
    } catch (const CyclicConstraints&) {
        g.acyclic = false;
    }
    return g;
}

namespace {

std::vector<int> find_cycle(const DependencyGraph& g) {
    std::vector<int> state(g.n, 0), stack;
    std::vector<int> cycle;
    std::function<bool(int)> dfs = [&](int u) {
        state[u] = 1;
        stack.push_back(u);
        for (int v : g.out[u]) {
            if (state[v] == 1) {
                auto it = std::find(stack.begin(), stack.end(), v);
                cycle.assign(it, stack.end());
                cycle.push_back(v);
                return true;
            }
            if (state[v] == 0 && dfs(v)) return true;
        }
        stack.pop_back();
        state[u] = 2;
        return false;
    };
    for (int u = 0; u < g.n; ++u)
        if (state[u] == 0 && dfs(u)) break;
    return cycle;
}

}  // namespace

std::vector<int> topological_order(const DependencyGraph& g) {
    std::vector<int> indeg(g.n, 0);
    for (int u = 0; u < g.n; ++u)
        for (int v : g.out[u]) ++indeg[v];
    std::priority_queue<int, std::vector<int>, std::greater<>> ready;
    for (int u = 0; u < g.n; ++u)
        if (indeg[u] == 0) ready.push(u);
    std::vector<int> order;
    while (!ready.empty()) {
        int u = ready.top();
        ready.pop();
        order.push_back(u);
        for (int v : g.out[u])
            if (--indeg[v] == 0) ready.push(v);
    }
    if (static_cast<int>(order.size()) != g.n) {
        auto cycle = find_cycle(g);
        std::string msg = "constraint dependency graph has a cycle:";
        for (int a : cycle) msg += " " + std::to_string(a);
        throw CyclicConstraints(cycle, msg);
    }
    return order;
}

std::vector<int> constraints_of_attribute(const ConstraintSet& dc, int A) {
    std::vector<int> out;
    for (std::size_t i = 0; i < dc.size(); ++i) {
        const auto& c = dc.constraints[i];
        if ((c.Y & ~c.X) & bit(A)) out.push_back(static_cast<int>(i));
    }
    return out;
}

}  // namespace dcs
