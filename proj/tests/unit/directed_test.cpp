#include <gtest/gtest.h>

#include <set>

#include "dcs/directed.hpp"
#include "dcs/error.hpp"
#include "dcs/testkit.hpp"
#include "helpers.hpp"

using namespace dcs;
using namespace dcs::testing;

namespace {

const std::uint64_t m10 = 1024;

DirectedGraph cycle3() { return digraph(3, {{0, 1}, {1, 2}, {2, 0}}); }
DirectedGraph path2() { return digraph(3, {{0, 1}, {1, 2}}); }
DirectedGraph one_edge() { return digraph(2, {{0, 1}}); }

}  // namespace

TEST(companion_join, single_edge_pattern) {
    const DirectedGraph G = digraph(4, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}});
    const CompanionJoin cj = companion_join(G, one_edge(), 2);
    ASSERT_EQ(cj.query.relations.size(), 1u);
    EXPECT_EQ(cj.query.relations[0].size(), 5u);
    EXPECT_EQ(cj.dc.size(), 2u);
}

TEST(companion_join, cycle_is_cyclic_and_path_is_not) {
    const DirectedGraph G = digraph(3, {{0, 1}, {1, 2}, {2, 0}});
    const CompanionJoin c = companion_join(G, cycle3(), 1);
    EXPECT_EQ(c.query.relations.size(), 3u);
    EXPECT_EQ(c.dc.size(), 6u);
    EXPECT_FALSE(dependency_graph(c.dc, 3).acyclic);
    const CompanionJoin p = companion_join(G, path2(), 1);
    const DependencyGraph g = dependency_graph(p.dc, 3);
    EXPECT_TRUE(g.acyclic);
    EXPECT_EQ(topological_order(g), (std::vector<int>{0, 1, 2}));
}

TEST(companion_join, degree_above_lambda) {
    const DirectedGraph G = digraph(3, {{0, 1}, {0, 2}});
    EXPECT_THROW(companion_join(G, one_edge(), 1), LambdaViolation);
}

TEST(lp_plus, cycle_large_lambda) {
    const LpPlusSolution s = lp_plus(cycle3(), m10, 256);
    EXPECT_EQ(s.objective.q, 15);
    for (std::size_t e = 0; e < 3; ++e) {
        EXPECT_EQ(s.x[e], Rational(1, 2));
        EXPECT_EQ(s.z[e], 0);
    }
}

TEST(lp_plus, single_edge_and_path) {
    EXPECT_EQ(lp_plus(one_edge(), m10, 256).objective.q, 10);
    const LpPlusSolution p = lp_plus(path2(), m10, 256);
    EXPECT_EQ(p.objective.q, 18);
    EXPECT_EQ(p.x[0], 1);
    EXPECT_EQ(p.z[1], 1);
}

TEST(acyclicize, already_acyclic_is_unchanged) {
    const LpPlusSolution p = lp_plus(path2(), m10, 256);
    int rewrites = -1;
    const LpPlusSolution q = acyclicize(path2(), p, &rewrites);
    EXPECT_EQ(rewrites, 0);
    EXPECT_EQ(q.x, p.x);
    EXPECT_EQ(q.z, p.z);
}

TEST(acyclicize, z_cycle_seed_is_repaired) {
    LpPlusSolution seed;
    seed.x = {0, 0, 0};
    seed.z = {1, 1, 1};
    ASSERT_TRUE(lp_plus_feasible(cycle3(), seed));
    const LogValue before = lp_plus_objective(seed, m10, 256);
    int rewrites = 0;
    const LpPlusSolution out = acyclicize(cycle3(), seed, &rewrites);
    EXPECT_EQ(rewrites, 1);
    EXPECT_TRUE(lp_plus_feasible(cycle3(), out));
    EXPECT_EQ(out.x, (std::vector<Rational>{0, 1, 0}));
    EXPECT_EQ(out.z, (std::vector<Rational>{0, 0, 1}));
    EXPECT_LT(compare(lp_plus_objective(out, m10, 256), before), 0);
}

TEST(acyclicize, catalogue_stays_feasible_and_optimal) {
    for (int k = 2; k <= 4; ++k)
        for (const auto& P : all_weakly_connected_digraphs(k)) {
            const LpPlusSolution opt = lp_plus(P, m10, 256);
            const LpPlusSolution out = lp_plus_acyclicize(P, m10, 256);
            EXPECT_TRUE(lp_plus_feasible(P, out));
            EXPECT_LE(compare(lp_plus_objective(out, m10, 256), opt.objective), 0);
        }
}

TEST(star_cover, three_cycle) {
    const StarCoverConstruction sc = scc_star_cover_construction(cycle3());
    EXPECT_EQ(sc.c1, 1);
    EXPECT_EQ(sc.n1, 3);
    EXPECT_EQ(sc.n2, 0);
    EXPECT_TRUE(sc.S.empty());
    EXPECT_TRUE(sc.T.empty());
    EXPECT_EQ(closed_form_dir(sc, m10, 16).q, 14);
}

TEST(star_cover, single_edge) {
    const StarCoverConstruction sc = scc_star_cover_construction(one_edge());
    EXPECT_EQ(sc.S, (std::vector<int>{0}));
    EXPECT_EQ(sc.T, (std::vector<int>{1}));
    EXPECT_EQ(sc.cover.size(), 1u);
    EXPECT_EQ(sc.c1 + sc.n1 + sc.n2, 0);
    EXPECT_EQ(sc.S1.size() + sc.T1.size(), 2u);
    EXPECT_EQ(closed_form_dir(sc, m10, 16).q, 10);
}

TEST(star_cover, two_path) {
    const StarCoverConstruction sc = scc_star_cover_construction(path2());
    EXPECT_EQ(sc.S, (std::vector<int>{0}));
    EXPECT_EQ(sc.T, (std::vector<int>{1}));
    EXPECT_EQ(sc.n2, 1);
    EXPECT_EQ(closed_form_dir(sc, m10, 16).q, 14);
}

TEST(star_cover, dual_weights_reach_closed_form) {
    for (int k = 2; k <= 4; ++k)
        for (const auto& P : all_weakly_connected_digraphs(k)) {
            const StarCoverConstruction sc = scc_star_cover_construction(P);
            const auto [dc, weights] = star_cover_dc(P, sc, m10, 16);
            EXPECT_TRUE(dependency_graph(dc, P.n).acyclic);
            Rational total = 0;
            for (std::size_t i = 0; i < dc.size(); ++i) total += weights[i] * log2_of(dc.constraints[i].N).q;
            EXPECT_EQ(total, closed_form_dir(sc, m10, 16).q);
        }
}

TEST(acyclic_subset, acyclic_pattern_keeps_everything) {
    EXPECT_EQ(acyclic_subset(path2(), m10, 16).constraints, pattern_constraints(path2(), m10, 16).constraints);
}

TEST(acyclic_subset, three_cycle_both_regimes) {
    const ConstraintSet big = acyclic_subset(cycle3(), m10, 256);
    EXPECT_TRUE(dependency_graph(big, 3).acyclic);
    EXPECT_EQ(polymat_acyclic(big, 3).log2.q, 15);
    int cardinality = 0;
    for (const auto& c : big.constraints) cardinality += c.is_cardinality();
    EXPECT_EQ(cardinality, 3);
    const ConstraintSet small = acyclic_subset(cycle3(), m10, 16);
    EXPECT_TRUE(dependency_graph(small, 3).acyclic);
    EXPECT_EQ(polymat_acyclic(small, 3).log2.q, 14);
}

TEST(acyclic_subset, catalogue_dominates_full_lp) {
    for (int k = 2; k <= 3; ++k)
        for (const auto& P : all_weakly_connected_digraphs(k))
            for (std::uint64_t lambda : {4u, 16u, 256u}) {
                const ConstraintSet sub = acyclic_subset(P, m10, lambda);
                ASSERT_TRUE(dependency_graph(sub, P.n).acyclic);
                EXPECT_GE(compare(polymat_acyclic(sub, P.n).log2,
                                  polymatroid_lp_full(pattern_constraints(P, m10, lambda), P.n)),
                          0);
            }
}

TEST(polymat_dir, closed_forms) {
    EXPECT_EQ(polymat_dir(m10, 16, cycle3()).q, 14);
    EXPECT_EQ(polymat_dir(m10, 256, cycle3()).q, 15);
    EXPECT_EQ(polymat_dir(m10, 16, one_edge()).q, 10);
    EXPECT_EQ(polymat_dir(m10, 256, one_edge()).q, 10);
    EXPECT_THROW(polymat_dir(16, 32, one_edge()), std::invalid_argument);
}

TEST(automorphisms, directed_counts) {
    EXPECT_EQ(automorphism_count(cycle3()), 3u);
    EXPECT_EQ(automorphism_count(one_edge()), 1u);
    EXPECT_EQ(automorphism_count(path2()), 1u);
}

TEST(directed_sampler, unique_occurrence) {
    const DirectedGraph G = cycle3();
    Rng rng(1);
    std::set<OccurrenceKey> keys;
    for (int i = 0; i < 30; ++i) {
        auto o = sample_occurrence_directed(G, cycle3(), 1, rng);
        ASSERT_TRUE(o.has_value());
        keys.insert(occurrence_key(cycle3(), o->vertex_map));
    }
    EXPECT_EQ(keys.size(), 1u);
}

TEST(directed_sampler, two_disjoint_cycles_uniform) {
    const DirectedGraph G = digraph(6, {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}});
    const DirectedGraph P = cycle3();
    DirectedOccurrenceSampler sampler(G, P, 1);
    Rng rng(2);
    FrequencyTable<OccurrenceKey> t;
    for (int i = 0; i < 4000; ++i) {
        auto o = sampler.sample(rng);
        ASSERT_TRUE(o.has_value());
        ASSERT_TRUE(is_occurrence(G, P, o->vertex_map));
        t.add(occurrence_key(P, o->vertex_map));
    }
    std::set<OccurrenceKey> universe;
    for (const auto& [key, f] : brute_force_occurrences(G, P)) universe.insert(occurrence_key(P, f));
    ASSERT_EQ(universe.size(), 2u);
    EXPECT_TRUE(uniformity_test(t, universe).pass);
}

TEST(directed_sampler, dag_has_no_cycle) {
    const DirectedGraph G = digraph(4, {{0, 1}, {1, 2}, {0, 2}, {2, 3}});
    Rng rng(3);
    EXPECT_FALSE(sample_occurrence_directed(G, cycle3(), 2, rng).has_value());
}
