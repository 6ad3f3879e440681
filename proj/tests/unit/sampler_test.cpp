#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>

#include "dcs/error.hpp"
#include "dcs/index.hpp"
#include "dcs/sampler.hpp"
#include "dcs/testkit.hpp"
#include "helpers.hpp"

using namespace dcs;
using namespace dcs::testing;

namespace {

// R(A,B) = {(a1,b1),(a1,b2),(a2,b1)}, S(B,C) = {(b1,c1),(b2,c1)}: three join tuples.
JoinQuery three_tuple_join() {
    JoinQuery q = three_row_relation();
    add_relation(q, "S", {"B", "C"}, {{"b1", "c1"}, {"b2", "c1"}});
    return q;
}

std::vector<Value> prefix(const JoinQuery& q, std::initializer_list<std::pair<const char*, const char*>> binds) {
    std::vector<Value> w(q.attribute_count(), 0);
    for (const auto& [a, v] : binds) {
        JoinQuery& mq = const_cast<JoinQuery&>(q);
        w[q.attribute_id(a)] = mq.values.intern(v);
    }
    return w;
}

}  // namespace

TEST(build_index, fragments_group_by_prefix) {
    JoinQuery q = three_row_relation();
    const ConstraintSet dc = validate_and_close(q, {});
    const FragmentIndex idx = build_index(q, dc, {0, 1});
    EXPECT_EQ(idx.rows(0, 0, prefix(q, {})).size(), 3u);
    const auto a1 = idx.rows(0, 1, prefix(q, {{"A", "a1"}}));
    ASSERT_EQ(a1.size(), 2u);
    for (const auto& row : a1) EXPECT_EQ(row[0], q.values.intern("a1"));
    EXPECT_EQ(idx.fragment(0, 2, prefix(q, {{"A", "a2"}, {"B", "b2"}})), nullptr);
    EXPECT_NE(idx.fragment(0, 2, prefix(q, {{"A", "a2"}, {"B", "b1"}})), nullptr);
}

TEST(reldeg, share_of_projections) {
    JoinQuery q = three_row_relation();
    const ConstraintSet dc = validate_and_close(q, {});
    const FragmentIndex idx = build_index(q, dc, {0, 1});
    const Ratio r = reldeg(idx, 1, 0, prefix(q, {{"A", "a1"}}));
    EXPECT_EQ(r.num, 2u);
    EXPECT_EQ(r.den, 3u);
    EXPECT_EQ(reldeg(idx, 1, 0, prefix(q, {{"A", "zz"}})).num, 0u);
}

TEST(reldeg, single_row_relation_is_one) {
    JoinQuery q;
    add_relation(q, "R", {"A", "B"}, {{"x", "y"}});
    const FragmentIndex idx = build_index(q, validate_and_close(q, {}), {0, 1});
    EXPECT_DOUBLE_EQ(reldeg(idx, 1, 0, prefix(q, {{"A", "x"}})).value(), 1.0);
    EXPECT_DOUBLE_EQ(reldeg(idx, 2, 0, prefix(q, {{"A", "x"}, {"B", "y"}})).value(), 1.0);
}

TEST(reldeg, missing_denominator) {
    JoinQuery q = three_row_relation();
    const FragmentIndex idx = build_index(q, validate_and_close(q, {}), {0, 1});
    EXPECT_THROW(reldeg(idx, 2, 0, prefix(q, {{"A", "zz"}, {"B", "b1"}})), EmptyDenominator);
}

TEST(reldeg_star, largest_wins_and_ties_go_to_first) {
    JoinQuery q;
    add_relation(q, "R", {"A", "B"}, {{"a1", "b1"}, {"a2", "b1"}});
    add_relation(q, "S", {"A", "C"}, {{"a1", "c1"}, {"a1", "c2"}, {"a2", "c1"}});
    const ConstraintSet dc = validate_and_close(q, {});
    const FragmentIndex idx = build_index(q, dc, {0, 1, 2});
    const auto of_a = constraints_of_attribute(dc, 0);
    ASSERT_EQ(of_a.size(), 2u);
    auto [best, which] = reldeg_star_and_constraint(idx, 1, of_a, prefix(q, {{"A", "a1"}}));
    EXPECT_EQ(best.num * 3, best.den * 2);
    EXPECT_EQ(which, of_a[1]);
    // a2: 1/2 against 1/3.
    auto [best2, which2] = reldeg_star_and_constraint(idx, 1, of_a, prefix(q, {{"A", "a2"}}));
    EXPECT_EQ(best2.num * 2, best2.den);
    EXPECT_EQ(which2, of_a[0]);

    JoinQuery tie;
    add_relation(tie, "R", {"A", "B"}, {{"a1", "b1"}, {"a2", "b1"}});
    add_relation(tie, "S", {"A", "C"}, {{"a1", "c1"}, {"a2", "c1"}});
    const ConstraintSet tdc = validate_and_close(tie, {});
    const FragmentIndex tidx = build_index(tie, tdc, {0, 1, 2});
    const auto t_of_a = constraints_of_attribute(tdc, 0);
    EXPECT_EQ(reldeg_star_and_constraint(tidx, 1, t_of_a, prefix(tie, {{"A", "a1"}})).second, t_of_a[0]);
}

TEST(b_value, root_leaf_and_fragment_size) {
    JoinQuery q = three_row_relation();
    const SamplerState s = make_sampler(q, validate_and_close(q, {}));
    EXPECT_LE(s.log_b0, s.bound.log2.value() + 1e-9);
    EXPECT_DOUBLE_EQ(s.log_b0, std::log2(3.0));
    EXPECT_DOUBLE_EQ(b_value(s.index, 1, prefix(*s.query, {{"A", "a1"}}), s.weighted), 1.0);
    EXPECT_DOUBLE_EQ(b_value(s.index, 2, prefix(*s.query, {{"A", "a1"}, {"B", "b2"}}), s.weighted), 0.0);
    EXPECT_TRUE(std::isinf(b_value(s.index, 1, prefix(*s.query, {{"A", "zz"}}), s.weighted)));
}

TEST(p_pass, hand_trace_on_single_relation) {
    JoinQuery q = three_row_relation();
    const SamplerState s = make_sampler(q, validate_and_close(q, {}));
    const Tuple root(2, 0);
    const Tuple a1 = prefix(*s.query, {{"A", "a1"}});
    EXPECT_DOUBLE_EQ(p_pass(s, 1, root, a1), 1.0);
    const Tuple a1b2 = prefix(*s.query, {{"A", "a1"}, {"B", "b2"}});
    EXPECT_DOUBLE_EQ(p_pass(s, 2, a1, a1b2), 1.0);
    const Tuple a1b9 = prefix(*s.query, {{"A", "a1"}, {"B", "b9"}});
    EXPECT_DOUBLE_EQ(p_pass(s, 2, a1, a1b9), 0.0);
}

TEST(adc_sample, cardinality_only_relation_always_succeeds_uniformly) {
    JoinQuery q = three_row_relation();
    const SamplerState s = make_sampler(q, validate_and_close(q, {}));
    Rng rng(5);
    FrequencyTable<Tuple> t;
    for (int i = 0; i < 30000; ++i) {
        const SampleOutcome o = adc_sample(s, rng);
        ASSERT_TRUE(o.success);
        EXPECT_LE(o.max_p_pass, 1.0 + 1e-12);
        t.add(o.tuple);
    }
    EXPECT_TRUE(uniformity_test(t, brute_force_join(*s.query)).pass);
}

TEST(adc_sample, empty_relation_fails_at_first_level) {
    JoinQuery q;
    add_relation(q, "R", {"A", "B"}, {});
    const SamplerState s = make_sampler(q, validate_and_close(q, {}));
    Rng rng(1);
    const SampleOutcome o = adc_sample(s, rng);
    EXPECT_FALSE(o.success);
    EXPECT_EQ(o.failure, Failure::EmptyFragment);
    EXPECT_EQ(o.level, 1);
}

TEST(adc_sample, returned_tuples_are_in_the_join) {
    JoinQuery q = triangle_join({{"1", "2"}, {"2", "3"}, {"3", "1"}, {"3", "4"}, {"4", "1"}});
    const SamplerState s = make_sampler(q, validate_and_close(q, {{bit(0), bit(0) | bit(1), 4}}));
    const auto truth = brute_force_join(*s.query);
    Rng rng(2);
    int successes = 0;
    for (int i = 0; i < 5000; ++i) {
        const SampleOutcome o = adc_sample(s, rng);
        if (!o.success) continue;
        ++successes;
        EXPECT_TRUE(truth.count(o.tuple));
    }
    EXPECT_GT(successes, 0);
}

TEST(full_join, triangle_on_k3) {
    JoinQuery q = triangle_join({{"1", "2"}, {"2", "3"}, {"3", "1"}});
    const SamplerState s = make_sampler(q, validate_and_close(q, {}));
    EXPECT_EQ(full_join(s).size(), 6u);
}

TEST(full_join, disjoint_and_single) {
    JoinQuery q;
    add_relation(q, "R", {"A", "B"}, {{"a", "b"}});
    add_relation(q, "S", {"B", "C"}, {{"c", "d"}});
    EXPECT_TRUE(full_join(make_sampler(q, validate_and_close(q, {}))).empty());
    JoinQuery one = three_row_relation();
    EXPECT_EQ(full_join(make_sampler(one, validate_and_close(one, {}))).size(), 3u);
}

TEST(join_enumerator, matches_brute_force_on_random_fixtures) {
    Rng rng(11);
    for (int i = 0; i < 20; ++i) {
        JoinFixture f = random_join_fixture(rng, {});
        const SamplerState s = make_sampler(f.query, f.dc);
        const auto rows = full_join(s);
        const auto truth = brute_force_join(f.query);
        EXPECT_EQ(std::set<Tuple>(rows.begin(), rows.end()), truth) << f.name;
        EXPECT_EQ(rows.size(), truth.size());
    }
}

TEST(sample_operation, empty_single_and_uniform) {
    JoinQuery none;
    add_relation(none, "R", {"A", "B"}, {{"a", "b"}});
    add_relation(none, "S", {"B", "C"}, {{"c", "d"}});
    Rng rng(3);
    EXPECT_FALSE(sample_operation(make_sampler(none, validate_and_close(none, {})), rng).has_value());

    JoinQuery one;
    add_relation(one, "R", {"A", "B"}, {{"a", "b"}});
    const SamplerState s1 = make_sampler(one, validate_and_close(one, {}));
    for (int i = 0; i < 10; ++i) EXPECT_EQ(sample_operation(s1, rng), (Tuple{0, 1}));

    JoinQuery three = three_tuple_join();
    const SamplerState s3 = make_sampler(three, validate_and_close(three, {}));
    const auto truth = brute_force_join(*s3.query);
    ASSERT_EQ(truth.size(), 3u);
    FrequencyTable<Tuple> t;
    for (int i = 0; i < 9000; ++i) t.add(*sample_operation(s3, rng));
    EXPECT_TRUE(uniformity_test(t, truth).pass);
}

TEST(sample_operation, same_seed_same_sequence) {
    JoinQuery q = triangle_join({{"1", "2"}, {"2", "3"}, {"3", "1"}, {"3", "4"}});
    const SamplerState s = make_sampler(q, validate_and_close(q, {}));
    Rng a(42), b(42);
    for (int i = 0; i < 50; ++i) EXPECT_EQ(sample_operation(s, a), sample_operation(s, b));
}

TEST(sample_operation, parallel_race_returns_join_tuples) {
    JoinQuery q = three_tuple_join();
    const SamplerState s = make_sampler(q, validate_and_close(q, {}));
    const auto truth = brute_force_join(*s.query);
    Rng rng(8);
    for (int i = 0; i < 50; ++i) {
        auto t = sample_operation(s, rng, {64, true});
        ASSERT_TRUE(t.has_value());
        EXPECT_TRUE(truth.count(*t));
    }
}

TEST(estimate_out, empty_and_saturated) {
    JoinQuery none;
    add_relation(none, "R", {"A", "B"}, {{"a", "b"}});
    add_relation(none, "S", {"B", "C"}, {{"c", "d"}});
    Rng rng(4);
    EXPECT_EQ(estimate_out(make_sampler(none, validate_and_close(none, {})), 0.1, 0.9, rng).value, 0.0);

    JoinQuery full = three_row_relation();
    EstimateOptions opt;
    opt.use_enumeration = false;
    const Estimate e = estimate_out(make_sampler(full, validate_and_close(full, {})), 0.1, 0.9, rng, opt);
    EXPECT_EQ(e.trials, e.successes);
    EXPECT_DOUBLE_EQ(e.value, 3.0);
}

TEST(estimate_out, relative_error_on_three_tuple_join) {
    JoinQuery q = three_tuple_join();
    const SamplerState s = make_sampler(q, validate_and_close(q, {}));
    Rng rng(6);
    EstimateOptions opt;
    opt.use_enumeration = false;
    int within = 0;
    for (int run = 0; run < 100; ++run) {
        const Estimate e = estimate_out(s, 0.1, 0.99, rng, opt);
        if (e.value >= 2.7 && e.value <= 3.3) ++within;
    }
    EXPECT_GE(within, 97);
}

TEST(permutation, two_tuples_both_orders) {
    JoinQuery q;
    add_relation(q, "R", {"A", "B"}, {{"a", "b"}, {"a", "c"}});
    const SamplerState s = make_sampler(q, validate_and_close(q, {}));
    Rng rng(9);
    std::map<std::vector<Tuple>, int> orders;
    for (int i = 0; i < 4000; ++i) ++orders[random_permutation(s, rng)];
    ASSERT_EQ(orders.size(), 2u);
    EXPECT_TRUE(uniformity_test(std::vector<std::uint64_t>{std::uint64_t(orders.begin()->second),
                                                           std::uint64_t(orders.rbegin()->second)})
                    .pass);
}

TEST(permutation, empty_singleton_and_complete) {
    JoinQuery none;
    add_relation(none, "R", {"A", "B"}, {{"a", "b"}});
    add_relation(none, "S", {"B", "C"}, {{"c", "d"}});
    Rng rng(10);
    EXPECT_TRUE(random_permutation(make_sampler(none, validate_and_close(none, {})), rng).empty());

    JoinQuery one;
    add_relation(one, "R", {"A", "B"}, {{"a", "b"}});
    EXPECT_EQ(random_permutation(make_sampler(one, validate_and_close(one, {})), rng).size(), 1u);

    JoinQuery tri = triangle_join({{"1", "2"}, {"2", "3"}, {"3", "1"}, {"3", "4"}, {"4", "1"}, {"2", "4"}});
    const SamplerState s = make_sampler(tri, validate_and_close(tri, {}));
    const auto perm = random_permutation(s, rng);
    const auto truth = brute_force_join(*s.query);
    EXPECT_EQ(perm.size(), truth.size());
    EXPECT_EQ(std::set<Tuple>(perm.begin(), perm.end()), truth);
    const auto delayed = delay_enumerate(s, rng);
    EXPECT_EQ(std::set<Tuple>(delayed.begin(), delayed.end()), truth);
}

TEST(make_sampler, rejects_cyclic_constraints) {
    JoinQuery q = triangle_join({{"1", "2"}, {"2", "3"}, {"3", "1"}});
    const ConstraintSet dc = validate_and_close(q, {{bit(0), bit(0) | bit(1), 2}, {bit(1), bit(1) | bit(2), 2},
                                                    {bit(2), bit(2) | bit(0), 2}});
    EXPECT_THROW(make_sampler(q, dc), CyclicConstraints);
}
