#include <gtest/gtest.h>

#include "dcs/error.hpp"
#include "dcs/model.hpp"
#include "helpers.hpp"

using namespace dcs;
using namespace dcs::testing;

TEST(degree, groups_by_x) {
    JoinQuery q = three_row_relation();
    const Relation& R = q.relations[0];
    EXPECT_EQ(degree(R, attrs(q, {"A"}), attrs(q, {"A", "B"})), 2u);
    EXPECT_EQ(degree(R, 0, attrs(q, {"A", "B"})), 3u);
    EXPECT_EQ(degree(R, attrs(q, {"B"}), attrs(q, {"A", "B"})), 2u);
}

TEST(degree, empty_relation_is_zero) {
    JoinQuery q;
    add_relation(q, "R", {"A", "B"}, {});
    EXPECT_EQ(degree(q.relations[0], bit(0), bit(0) | bit(1)), 0u);
    EXPECT_EQ(degree(q.relations[0], 0, bit(0) | bit(1)), 0u);
}

TEST(relation, normalize_drops_duplicates) {
    JoinQuery q;
    add_relation(q, "R", {"A", "B"}, {{"x", "y"}, {"x", "y"}, {"a", "b"}});
    EXPECT_EQ(q.relations[0].size(), 2u);
}

TEST(validate_and_close, adds_cardinality_constraint) {
    JoinQuery q = three_row_relation();
    const ConstraintSet dc = validate_and_close(q, {});
    ASSERT_EQ(dc.size(), 1u);
    EXPECT_EQ(dc.constraints[0], (DegreeConstraint{0, attrs(q, {"A", "B"}), 3}));
    EXPECT_EQ(dc.guards[0], 0);
}

TEST(validate_and_close, keeps_smallest_bound_for_a_pair) {
    JoinQuery q = three_row_relation();
    const AttrSet AB = attrs(q, {"A", "B"});
    const ConstraintSet dc = validate_and_close(q, {{0, AB, 5}, {0, AB, 3}});
    ASSERT_EQ(dc.size(), 1u);
    EXPECT_EQ(dc.constraints[0].N, 3u);
}

TEST(validate_and_close, rejects_unguarded_constraint) {
    JoinQuery q = three_row_relation();
    EXPECT_THROW(validate_and_close(q, {{attrs(q, {"A"}), attrs(q, {"A", "B"}), 1}}), UnguardedConstraint);
}

TEST(validate_and_close, rejects_unknown_attribute) {
    JoinQuery q = three_row_relation();
    EXPECT_THROW(validate_and_close(q, {{0, bit(5) | bit(0), 9}}), SchemaError);
}

TEST(normalize_constraints, canonical_order) {
    const ConstraintSet dc = normalize_constraints({{bit(0), bit(0) | bit(1), 4}, {0, bit(1) | bit(2), 8}, {0, bit(0) | bit(1), 8}});
    ASSERT_EQ(dc.size(), 3u);
    EXPECT_TRUE(dc.constraints[0].is_cardinality());
    EXPECT_EQ(dc.constraints[0].Y, bit(0) | bit(1));
    EXPECT_EQ(dc.constraints[1].Y, bit(1) | bit(2));
    EXPECT_EQ(dc.constraints[2].X, bit(0));
}

TEST(dependency_graph, cardinality_only_is_edgeless) {
    const ConstraintSet dc = normalize_constraints({{0, bit(0) | bit(1), 1024}});
    const DependencyGraph g = dependency_graph(dc, 2);
    EXPECT_TRUE(g.edges().empty());
    EXPECT_TRUE(g.acyclic);
}

TEST(dependency_graph, degree_constraint_gives_edge) {
    const ConstraintSet dc = normalize_constraints({{bit(0), bit(0) | bit(1), 16}});
    const DependencyGraph g = dependency_graph(dc, 2);
    EXPECT_EQ(g.edges(), (std::vector<std::pair<int, int>>{{0, 1}}));
    EXPECT_TRUE(g.acyclic);
}

TEST(dependency_graph, triangle_is_cyclic) {
    const ConstraintSet dc = normalize_constraints(
        {{bit(0), bit(0) | bit(1), 16}, {bit(1), bit(1) | bit(2), 16}, {bit(2), bit(2) | bit(0), 16}});
    const DependencyGraph g = dependency_graph(dc, 3);
    EXPECT_EQ(g.edges().size(), 3u);
    EXPECT_FALSE(g.acyclic);
}

TEST(topological_order, path_and_edgeless) {
    const auto path = dependency_graph(normalize_constraints({{bit(0), 3, 2}, {bit(1), 6, 2}}), 3);
    EXPECT_EQ(topological_order(path), (std::vector<int>{0, 1, 2}));
    const auto none = dependency_graph(normalize_constraints({}), 3);
    EXPECT_EQ(topological_order(none), (std::vector<int>{0, 1, 2}));
    const auto reversed = dependency_graph(normalize_constraints({{bit(2), 6, 2}, {bit(1), 3, 2}}), 3);
    EXPECT_EQ(topological_order(reversed), (std::vector<int>{2, 1, 0}));
}

TEST(topological_order, cycle_witness) {
    const auto g = dependency_graph(normalize_constraints({{bit(0), 3, 2}, {bit(1), 6, 2}, {bit(2), 5, 2}}), 3);
    try {
        topological_order(g);
        FAIL() << "expected CyclicConstraints";
    } catch (const CyclicConstraints& e) {
        EXPECT_EQ(e.cycle, (std::vector<int>{0, 1, 2, 0}));
    }
}

TEST(constraints_of_attribute, membership_in_y_minus_x) {
    const ConstraintSet card = normalize_constraints({{0, 3, 1024}});
    EXPECT_EQ(constraints_of_attribute(card, 0), (std::vector<int>{0}));
    const ConstraintSet deg = normalize_constraints({{bit(0), 3, 16}});
    EXPECT_TRUE(constraints_of_attribute(deg, 0).empty());
    const ConstraintSet both = normalize_constraints({{0, 3, 1024}, {bit(0), 3, 16}});
    EXPECT_EQ(constraints_of_attribute(both, 1), (std::vector<int>{0, 1}));
}

TEST(join_query, attribute_lookup) {
    JoinQuery q = three_row_relation();
    EXPECT_EQ(q.attribute_id("B"), 1);
    EXPECT_THROW(q.attribute_id("Z"), SchemaError);
    EXPECT_EQ(q.set_name(3), "{A,B}");
    EXPECT_EQ(q.input_size(), 3u);
}
