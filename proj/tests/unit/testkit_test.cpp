#include <gtest/gtest.h>

#include "dcs/error.hpp"
#include "dcs/sampler.hpp"
#include "dcs/testkit.hpp"
#include "helpers.hpp"

using namespace dcs;
using namespace dcs::testing;

TEST(brute_force_join, examples) {
    JoinQuery single = three_row_relation();
    EXPECT_EQ(brute_force_join(single).size(), 3u);
    JoinQuery disjoint;
    add_relation(disjoint, "R", {"A", "B"}, {{"a", "b"}});
    add_relation(disjoint, "S", {"B", "C"}, {{"c", "d"}});
    EXPECT_TRUE(brute_force_join(disjoint).empty());
    EXPECT_EQ(brute_force_join(triangle_join({{"1", "2"}, {"2", "3"}, {"3", "1"}})).size(), 6u);
}

TEST(brute_force_occurrences, examples) {
    const UndirectedGraph tri = graph(3, {{0, 1}, {1, 2}, {0, 2}});
    EXPECT_EQ(brute_force_occurrences(complete_graph(4), tri).size(), 4u);
    const DirectedGraph c3 = digraph(3, {{0, 1}, {1, 2}, {2, 0}});
    EXPECT_EQ(brute_force_occurrences(c3, c3).size(), 1u);
    EXPECT_TRUE(brute_force_occurrences(tri, complete_graph(4)).empty());
    // Non-induced: a 2-path sits inside a triangle three times.
    EXPECT_EQ(brute_force_occurrences(tri, graph(3, {{0, 1}, {1, 2}})).size(), 3u);
}

TEST(uniformity_test, synthetic_counts) {
    const UniformityResult flat = uniformity_test(std::vector<std::uint64_t>{1000, 1000, 1000, 1000});
    EXPECT_TRUE(flat.pass);
    EXPECT_DOUBLE_EQ(flat.max_sigma, 0.0);
    EXPECT_DOUBLE_EQ(flat.chi2, 0.0);
    EXPECT_EQ(flat.dof, 3);
    // 4 outcomes at N = 4000: σ = sqrt(4000 · 1/4 · 3/4) ≈ 27.4; push one count 10σ high.
    const UniformityResult skew = uniformity_test(std::vector<std::uint64_t>{1274, 909, 909, 908});
    EXPECT_GT(skew.max_sigma, 9.0);
    EXPECT_FALSE(skew.pass);
}

TEST(uniformity_test, outcome_outside_universe_fails) {
    FrequencyTable<int> t;
    for (int i = 0; i < 100; ++i) t.add(i % 2);
    EXPECT_TRUE(uniformity_test(t, std::set<int>{0, 1}).pass);
    t.add(7);
    EXPECT_FALSE(uniformity_test(t, std::set<int>{0, 1}).pass);
}

TEST(uniformity_test, sampler_on_three_tuple_join) {
    JoinQuery q = three_row_relation();
    add_relation(q, "S", {"B", "C"}, {{"b1", "c1"}, {"b2", "c1"}});
    const SamplerState s = make_sampler(q, validate_and_close(q, {}));
    Rng rng(13);
    FrequencyTable<Tuple> t;
    for (int i = 0; i < 200000; ++i) {
        const SampleOutcome o = adc_sample(s, rng);
        if (o.success) t.add(o.tuple);
    }
    EXPECT_TRUE(uniformity_test(t, brute_force_join(*s.query)).pass);
}

TEST(success_rate_test, saturated_empty_and_path) {
    Rng rng(14);
    JoinQuery full = three_row_relation();
    const SuccessRateResult a = success_rate_test(make_sampler(full, validate_and_close(full, {})), 3, 2000, rng);
    EXPECT_DOUBLE_EQ(a.predicted, 1.0);
    EXPECT_DOUBLE_EQ(a.measured, 1.0);
    EXPECT_TRUE(a.pass);

    JoinQuery none;
    add_relation(none, "R", {"A", "B"}, {{"a", "b"}});
    add_relation(none, "S", {"B", "C"}, {{"c", "d"}});
    const SuccessRateResult b = success_rate_test(make_sampler(none, validate_and_close(none, {})), 0, 2000, rng);
    EXPECT_EQ(b.successes, 0u);
    EXPECT_TRUE(b.pass);

    JoinQuery path = three_row_relation();
    add_relation(path, "S", {"B", "C"}, {{"b1", "c1"}, {"b1", "c2"}, {"b3", "c1"}});
    const SamplerState s = make_sampler(path, validate_and_close(path, {}));
    const SuccessRateResult c = success_rate_test(s, brute_force_join(*s.query).size(), 50000, rng);
    EXPECT_TRUE(c.pass) << c.measured << " vs " << c.predicted;
}

TEST(fixtures, random_fixtures_are_guarded_and_acyclic) {
    Rng rng(15);
    for (int i = 0; i < 30; ++i) {
        const JoinFixture f = random_join_fixture(rng, {});
        EXPECT_TRUE(dependency_graph(f.dc, f.query.attribute_count()).acyclic);
        for (std::size_t c = 0; c < f.dc.size(); ++c) {
            EXPECT_GE(f.dc.guards[c], 0);
            EXPECT_TRUE(is_power_of_two(f.dc.constraints[c].N));
        }
    }
    for (int k = 1; k <= 6; ++k) {
        const ConstraintSet dc = random_acyclic_constraints(rng, k);
        EXPECT_TRUE(dependency_graph(dc, k).acyclic);
    }
}

TEST(fixtures, small_fixtures_have_small_outputs) {
    const auto fx = small_join_fixtures();
    ASSERT_GE(fx.size(), 2u);
    EXPECT_EQ(fx[0].name, "triangle");
    for (const auto& f : fx) {
        const auto out = brute_force_join(f.query).size();
        EXPECT_GE(out, 1u) << f.name;
        EXPECT_LE(out, 50u) << f.name;
    }
}
