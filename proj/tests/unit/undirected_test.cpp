#include <gtest/gtest.h>

#include <set>

#include "dcs/error.hpp"
#include "dcs/testkit.hpp"
#include "dcs/undirected.hpp"
#include "helpers.hpp"

using namespace dcs;
using namespace dcs::testing;

namespace {

UndirectedGraph triangle() { return graph(3, {{0, 1}, {1, 2}, {0, 2}}); }
UndirectedGraph path2() { return graph(3, {{0, 1}, {1, 2}}); }
UndirectedGraph edge() { return graph(2, {{0, 1}}); }
UndirectedGraph triangle_pendant() { return graph(4, {{0, 1}, {1, 2}, {0, 2}, {2, 3}}); }

template <class Sampler>
UniformityResult occurrence_frequencies(const UndirectedGraph& G, const UndirectedGraph& P, const Sampler& sampler,
                                        int draws, Rng& rng) {
    FrequencyTable<OccurrenceKey> t;
    for (int i = 0; i < draws; ++i) {
        auto o = sampler.sample(rng);
        if (!o) return {};
        EXPECT_TRUE(is_occurrence(G, P, o->vertex_map));
        t.add(occurrence_key(P, o->vertex_map));
    }
    std::set<OccurrenceKey> universe;
    for (const auto& [key, f] : brute_force_occurrences(G, P)) universe.insert(occurrence_key(P, f));
    return uniformity_test(t, universe);
}

}  // namespace

TEST(to_directed, doubles_edges) {
    EXPECT_EQ(to_directed(edge()).edges.size(), 2u);
    EXPECT_EQ(to_directed(triangle()).edges.size(), 6u);
    EXPECT_EQ(to_undirected(to_directed(triangle())).edges, triangle().edges);
}

TEST(decomposition, triangle_is_one_cycle) {
    const Decomposition d = edge_cover_decomposition(triangle());
    ASSERT_EQ(d.cycles.size(), 1u);
    EXPECT_EQ(d.cycles[0].size(), 3u);
    EXPECT_TRUE(d.stars.empty());
    EXPECT_EQ(d.alpha, 1);
    EXPECT_EQ(d.beta, 0);
    EXPECT_EQ(d.k_cycle, 3);
    EXPECT_EQ(d.rho, Rational(3, 2));
}

TEST(decomposition, two_path_is_a_star_on_the_middle) {
    const Decomposition d = edge_cover_decomposition(path2());
    ASSERT_EQ(d.stars.size(), 1u);
    EXPECT_EQ(d.stars[0].center, 1);
    EXPECT_EQ(d.stars[0].petals, (std::vector<int>{0, 2}));
    EXPECT_EQ(d.beta, 1);
    EXPECT_EQ(d.k_star, 3);
    EXPECT_EQ(d.rho, 2);
}

TEST(decomposition, triangle_with_pendant) {
    const Decomposition d = edge_cover_decomposition(triangle_pendant());
    EXPECT_TRUE(d.cycles.empty());
    ASSERT_EQ(d.stars.size(), 2u);
    EXPECT_EQ(d.stars[0].center, 0);
    EXPECT_EQ(d.stars[0].petals, (std::vector<int>{1}));
    EXPECT_EQ(d.stars[1].center, 2);
    EXPECT_EQ(d.stars[1].petals, (std::vector<int>{3}));
    EXPECT_EQ(d.rho, 2);
}

TEST(decomposition, catalogue_is_consistent) {
    for (int k = 2; k <= 6; ++k)
        for (const auto& P : all_connected_graphs(k)) {
            const Decomposition d = edge_cover_decomposition(P);
            EXPECT_EQ(d.k_cycle + d.k_star, k);
            EXPECT_EQ(d.rho, Rational(d.k_cycle) / 2 + d.k_star - d.beta);
            Rational cover = 0, pack = 0;
            for (const auto& w : d.edge_weight) cover += w;
            for (const auto& v : d.vertex_dual) pack += v;
            EXPECT_EQ(cover, d.rho);
            EXPECT_EQ(pack, d.rho);
        }
}

TEST(polymat_undir, branches) {
    EXPECT_EQ(polymat_undir(1024, 16, triangle()).q, 14);
    EXPECT_EQ(polymat_undir(1024, 256, triangle()).q, 15);
    EXPECT_EQ(polymat_undir(1024, 16, edge()).q, 10);
    EXPECT_EQ(polymat_undir(1024, 256, edge()).q, 10);
    EXPECT_EQ(polymat_undir(1024, 256, path2()).q, 18);
}

TEST(construct_h_star, small_lambda_formula) {
    const SetFunction h = construct_h_star(1024, 16, triangle(), edge_cover_decomposition(triangle()));
    EXPECT_EQ(h[0].q, 0);
    EXPECT_EQ(h[1].q, 6);
    EXPECT_EQ(h[3].q, 10);
    EXPECT_EQ(h[7].q, 14);
}

TEST(construct_h_star, large_lambda_cycle_rule) {
    const SetFunction h = construct_h_star(1024, 256, triangle(), edge_cover_decomposition(triangle()));
    EXPECT_EQ(h[0].q, 0);
    EXPECT_EQ(h[1].q, 5);
    EXPECT_EQ(h[5].q, 10);
    EXPECT_EQ(h[7].q, 15);
}

TEST(construct_h_star, feasible_and_tight_on_catalogue) {
    for (int k = 2; k <= 5; ++k)
        for (const auto& P : all_connected_graphs(k)) {
            const Decomposition d = edge_cover_decomposition(P);
            for (std::uint64_t lambda : {4u, 16u, 32u, 256u, 1024u}) {
                const SetFunction h = construct_h_star(1024, lambda, P, d);
                EXPECT_TRUE(h.zero_grounded());
                EXPECT_TRUE(h.monotone());
                EXPECT_TRUE(h.submodular());
                EXPECT_TRUE(h.satisfies(pattern_constraints(to_directed(P), 1024, lambda)));
                EXPECT_TRUE(same_value(h.h.back(), polymat_undir(1024, lambda, P, d)));
            }
        }
}

TEST(construct_h_star, star_rule_without_packing_breaks_submodularity) {
    // log m + (|X|-2) log λ on both endpoints of a lone edge: h(u) + h(v) < h(uv) once λ² > m.
    const double lm = 10, ll = 8;
    const double single = lm - ll, pair = lm;
    EXPECT_LT(2 * single, pair);
    const SetFunction h = construct_h_star(1024, 256, edge(), edge_cover_decomposition(edge()));
    EXPECT_TRUE(h.submodular());
}

TEST(spanning_tree, coin_failure_rate) {
    // Star with centre 0 and three leaves, λ = 4: success needs the centre in the middle (1/2),
    // the coin 3/4 and a fresh leaf (2/3), so 1/4 overall.
    const UndirectedGraph G = graph(4, {{0, 1}, {0, 2}, {0, 3}});
    const UndirectedGraph P = path2();
    const TreePlan plan = bfs_plan(P);
    Rng rng(4);
    const int trials = 40000;
    int ok = 0;
    for (int i = 0; i < trials; ++i) {
        std::uint64_t steps = 0;
        auto f = tree_attempt(G, plan, 4, rng, steps);
        if (f && is_occurrence(G, P, *f)) ++ok;
    }
    const double sigma = std::sqrt(trials * 0.25 * 0.75);
    EXPECT_LT(std::abs(ok - trials * 0.25), 6 * sigma);
}

TEST(spanning_tree, uniform_paths_on_a_cycle) {
    std::vector<Edge> e;
    for (int v = 0; v < 8; ++v) e.emplace_back(v, (v + 1) % 8);
    const UndirectedGraph G = graph(8, e);
    UndirectedOccurrenceSampler sampler(G, path2(), 2);
    ASSERT_TRUE(sampler.spanning_tree_regime());
    Rng rng(5);
    EXPECT_TRUE(occurrence_frequencies(G, path2(), sampler, 8000, rng).pass);
}

TEST(random_isomorphism, triangle_and_star) {
    Rng rng(6);
    std::set<std::vector<int>> tri, star;
    for (int i = 0; i < 600; ++i) {
        tri.insert(random_isomorphism_bijection(triangle(), {7, 8, 9}, rng));
        star.insert(random_isomorphism_bijection(graph(3, {{0, 1}, {0, 2}}), {7, 8, 9}, rng));
    }
    EXPECT_EQ(tri.size(), 6u);
    EXPECT_EQ(star.size(), 2u);
    EXPECT_EQ(automorphism_count(triangle()), 6u);
    EXPECT_EQ(automorphism_count(edge()), 2u);
}

TEST(composite_sampler, triangle_in_k4) {
    const UndirectedGraph G = complete_graph(4);
    UndirectedOccurrenceSampler sampler(G, triangle(), 3);
    ASSERT_FALSE(sampler.spanning_tree_regime());
    Rng rng(7);
    EXPECT_TRUE(occurrence_frequencies(G, triangle(), sampler, 8000, rng).pass);
}

TEST(composite_sampler, single_edge_is_a_uniform_edge) {
    const UndirectedGraph G = complete_graph(4);
    UndirectedOccurrenceSampler sampler(G, edge(), 3);
    Rng rng(8);
    EXPECT_TRUE(occurrence_frequencies(G, edge(), sampler, 6000, rng).pass);
}

TEST(composite_sampler, two_stars_in_a_path_graph) {
    std::vector<Edge> e;
    for (int v = 0; v < 5; ++v) e.emplace_back(v, v + 1);
    const UndirectedGraph G = graph(6, e);
    UndirectedOccurrenceSampler sampler(G, triangle_pendant(), 2);
    Rng rng(9);
    EXPECT_FALSE(sampler.sample(rng).has_value());
    const UndirectedGraph P = graph(4, {{0, 1}, {1, 2}, {2, 3}});
    UndirectedOccurrenceSampler paths(G, P, 2);
    EXPECT_TRUE(occurrence_frequencies(G, P, paths, 6000, rng).pass);
}

TEST(undirected_sampler, pattern_larger_than_graph) {
    Rng rng(10);
    EXPECT_FALSE(sample_occurrence_undirected(triangle(), complete_graph(4), 2, rng).has_value());
}

TEST(undirected_sampler, star_in_star) {
    const UndirectedGraph G = graph(4, {{0, 1}, {0, 2}, {0, 3}});
    Rng rng(11);
    std::set<OccurrenceKey> keys;
    for (int i = 0; i < 20; ++i) {
        auto o = sample_occurrence_undirected(G, G, 3, rng);
        ASSERT_TRUE(o.has_value());
        keys.insert(occurrence_key(G, o->vertex_map));
    }
    EXPECT_EQ(keys.size(), 1u);
}

TEST(undirected_sampler, degree_above_lambda) {
    Rng rng(12);
    EXPECT_THROW(sample_occurrence_undirected(complete_graph(4), triangle(), 2, rng), LambdaViolation);
}
