#include <gtest/gtest.h>

#include "dcs/error.hpp"
#include "dcs/instance_gen.hpp"
#include "dcs/testkit.hpp"
#include "helpers.hpp"

using namespace dcs;
using namespace dcs::testing;

namespace {

UndirectedGraph triangle() { return graph(3, {{0, 1}, {1, 2}, {0, 2}}); }
UndirectedGraph path2() { return graph(3, {{0, 1}, {1, 2}}); }

}  // namespace

TEST(gen_clique_union, five_cliques_of_eight) {
    const GeneratedGraph g = gen_clique_union(144, 8);
    EXPECT_EQ(g.graph.n, 40);
    EXPECT_EQ(g.graph.edges.size(), 140u);
    EXPECT_EQ(g.graph.max_degree(), 7);
    EXPECT_TRUE(g.certified);
    EXPECT_EQ(brute_force_occurrences(g.graph, triangle()).size(), 280u);
}

TEST(gen_clique_union, lambda_two_gives_a_matching) {
    const GeneratedGraph g = gen_clique_union(37, 2);
    EXPECT_EQ(g.graph.edges.size(), 37u);
    EXPECT_EQ(g.graph.max_degree(), 1);
}

TEST(gen_clique_union, nothing_fits) { EXPECT_THROW(gen_clique_union(10, 8), DegenerateSpec); }

TEST(gen_tripartite, square_root_case) {
    const GeneratedGraph g = gen_tripartite(4096, 64);
    EXPECT_EQ(g.graph.n, 48);
    EXPECT_EQ(g.graph.edges.size(), 752u);
    EXPECT_LE(g.graph.edges.size(), 4096u);
    EXPECT_LE(g.graph.max_degree(), 64);
    EXPECT_EQ(g.graph.degree(16), 16 + 15 + 16);
    EXPECT_TRUE(g.certified);
    EXPECT_EQ(g.note, "groups 16/16/16");
}

TEST(gen_tripartite, degree_cap_exceeded) { EXPECT_THROW(gen_tripartite(4096, 16), DegenerateSpec); }

TEST(gen_tripartite, large_pattern_is_not_certified) {
    const GeneratedGraph g = gen_tripartite(4096, 64, 20);
    EXPECT_FALSE(g.certified);
    EXPECT_EQ(g.graph.edges.size(), 752u);
}

TEST(vertex_pack, triangle_all_half) {
    const VertexPackSolution s = vertex_pack_half_integral(triangle(), edge_cover_decomposition(triangle()));
    EXPECT_EQ(s.nu, (std::vector<Rational>{Rational(1, 2), Rational(1, 2), Rational(1, 2)}));
}

TEST(vertex_pack, star_centre_zero_petals_one) {
    const VertexPackSolution s = vertex_pack_half_integral(path2(), edge_cover_decomposition(path2()));
    EXPECT_EQ(s.nu, (std::vector<Rational>{1, 0, 1}));
}

TEST(vertex_pack, lone_edge_sums_to_one) {
    const UndirectedGraph P = graph(2, {{0, 1}});
    const VertexPackSolution s = vertex_pack_half_integral(P, edge_cover_decomposition(P));
    EXPECT_EQ(s.nu[0] + s.nu[1], 1);
}

TEST(partition_uabc, examples) {
    const VertexPackSolution t = partition_UABC(triangle());
    EXPECT_TRUE(t.UA.empty());
    EXPECT_TRUE(t.UB.empty());
    EXPECT_EQ(t.UC, (std::vector<int>{0, 1, 2}));
    EXPECT_EQ(t.s, 0);
    const VertexPackSolution p = partition_UABC(path2());
    EXPECT_EQ(p.UA, (std::vector<int>{0, 2}));
    EXPECT_EQ(p.UB, (std::vector<int>{1}));
    EXPECT_TRUE(p.UC.empty());
}

TEST(partition_uabc, structural_conditions_on_catalogue) {
    for (int k = 2; k <= 6; ++k)
        for (const auto& P : all_connected_graphs(k)) {
            const VertexPackSolution s = partition_UABC(P);
            std::vector<char> inA(k, 0), inC(k, 0);
            for (int v : s.UA) inA[v] = 1;
            for (int v : s.UC) inC[v] = 1;
            EXPECT_EQ(s.UA.size() + s.UB.size() + s.UC.size(), static_cast<std::size_t>(k));
            for (const auto& [u, v] : P.edges) {
                EXPECT_FALSE(inA[u] && inA[v]);
                EXPECT_FALSE((inA[u] && inC[v]) || (inC[u] && inA[v]));
            }
        }
}

TEST(tightness_check, generated_fixtures) {
    const GeneratedGraph cu = gen_clique_union(144, 8);
    const TightnessReport a = tightness_check(cu, triangle(), 144, 8, 3);
    EXPECT_TRUE(a.applicable);
    EXPECT_TRUE(a.pass);
    EXPECT_EQ(a.occurrences, 280u);
    const GeneratedGraph tp = gen_tripartite(4096, 64);
    const TightnessReport b = tightness_check(tp, path2(), 4096, 64, 3);
    EXPECT_TRUE(b.applicable);
    EXPECT_TRUE(b.pass);
}

TEST(tightness_check, preconditions_violated) {
    const GeneratedGraph g = gen_clique_union(40, 4);
    const TightnessReport r = tightness_check(g, triangle(), 40, 4, 3);
    EXPECT_FALSE(r.applicable);
}
