#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace dcs {

using Value = std::uint32_t;
// Attribute sets are bitmasks over attribute ids; a join has at most 64 attributes.
using AttrSet = std::uint64_t;

constexpr int kMaxAttributes = 64;

inline int popcount(AttrSet s) { return __builtin_popcountll(s); }
inline bool subset_of(AttrSet a, AttrSet b) { return (a & ~b) == 0; }
inline AttrSet bit(int a) { return AttrSet{1} << a; }
std::vector<int> members(AttrSet s);
AttrSet make_set(const std::vector<int>& ids);

struct Attribute {
    int id = 0;
    std::string name;
};

// Interns raw string values to dense ids.
class ValueDictionary {
public:
    Value intern(const std::string& raw);
    const std::string& text(Value v) const { return names_.at(v); }
    std::size_t size() const { return names_.size(); }

private:
    std::unordered_map<std::string, Value> ids_;
    std::vector<std::string> names_;
};

struct Relation {
    std::string name;
    std::vector<int> schema;  // attribute ids, column order
    std::vector<Value> data;  // row-major

    std::size_t arity() const { return schema.size(); }
    std::size_t size() const { return schema.empty() ? 0 : data.size() / schema.size(); }
    const Value* row(std::size_t r) const { return data.data() + r * schema.size(); }
    AttrSet schema_mask() const;
    int column_of(int attribute) const;  // -1 when absent

    void add_row(const std::vector<Value>& values);
    // Sort rows and drop duplicates.
    void normalize();
};

struct JoinQuery {
    std::vector<Attribute> universe;
    std::vector<Relation> relations;
    ValueDictionary values;

    int attribute_count() const { return static_cast<int>(universe.size()); }
    AttrSet all_attributes() const;
    std::size_t input_size() const;
    int attribute_id(const std::string& name) const;  // throws SchemaError
    // Adds an attribute if missing and returns its id.
    int ensure_attribute(const std::string& name);
    std::string set_name(AttrSet s) const;
};

struct DegreeConstraint {
    AttrSet X = 0;
    AttrSet Y = 0;
    std::uint64_t N = 1;

    bool is_cardinality() const { return X == 0; }
    friend bool operator==(const DegreeConstraint&, const DegreeConstraint&) = default;
};

// Lexicographic on (sorted X ids, sorted Y ids, N).
bool canonical_less(const DegreeConstraint& a, const DegreeConstraint& b);

struct ConstraintSet {
    std::vector<DegreeConstraint> constraints;
    std::vector<int> guards;  // main guard relation per constraint, -1 when unassigned

    std::size_t size() const { return constraints.size(); }
    // Universe needed to hold every attribute mentioned.
    int span() const;
};

struct DependencyGraph {
    int n = 0;
    std::vector<std::vector<int>> out;  // sorted, duplicate free
    bool acyclic = true;

    std::vector<std::pair<int, int>> edges() const;
};

// deg_{Y|X}(R): largest number of distinct Y-projections sharing one X-projection.
std::uint64_t degree(const Relation& r, AttrSet X, AttrSet Y);

// Canonical order, duplicate (X,Y) pairs collapsed to the smallest N. No guard checks.
ConstraintSet normalize_constraints(std::vector<DegreeConstraint> list);

ConstraintSet validate_and_close(const JoinQuery& q, const std::vector<DegreeConstraint>& declared);

DependencyGraph dependency_graph(const ConstraintSet& dc, int attribute_count);

// Kahn's algorithm, smallest ready id first. Throws CyclicConstraints.
std::vector<int> topological_order(const DependencyGraph& g);

// Indices (into dc.constraints) of constraints with A in Y - X, canonical order.
std::vector<int> constraints_of_attribute(const ConstraintSet& dc, int A);

}  // namespace dcs
