#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "dcs/graph.hpp"
#include "dcs/model.hpp"
#include "dcs/race.hpp"
#include "dcs/sampler.hpp"

namespace dcs {

// Nested loops over the product of per-attribute active domains. Throws TooLarge past 10^7 combinations.
std::set<std::vector<Value>> brute_force_join(const JoinQuery& q);

// Sorted image edges of an occurrence, computed without the engine's helpers.
using OracleKey = std::vector<std::pair<int, int>>;

// Every occurrence of P in G, one representative map per key. Throws TooLarge for k > 8.
std::map<OracleKey, std::vector<int>> brute_force_occurrences(const DirectedGraph& G, const DirectedGraph& P);
std::map<OracleKey, std::vector<int>> brute_force_occurrences(const UndirectedGraph& G, const UndirectedGraph& P);

template <class Key>
struct FrequencyTable {
    std::map<Key, std::uint64_t> counts;
    std::uint64_t total = 0;

    void add(const Key& k) {
        ++counts[k];
        ++total;
    }
};

struct UniformityResult {
    double chi2 = 0;
    int dof = 0;
    double p_value = 1;
    double max_sigma = 0;  // largest |count - N/u| in binomial standard deviations
    bool pass = false;
};

// Counts over a universe of u outcomes, zeros included.
UniformityResult uniformity_test(const std::vector<std::uint64_t>& counts);

// Outcomes missing from the table count as zero; outcomes outside the universe fail the test.
template <class Key>
UniformityResult uniformity_test(const FrequencyTable<Key>& t, const std::set<Key>& universe) {
    std::vector<std::uint64_t> c;
    for (const auto& k : universe) {
        auto it = t.counts.find(k);
        c.push_back(it == t.counts.end() ? 0 : it->second);
    }
    auto r = uniformity_test(c);
    for (const auto& [k, n] : t.counts)
        if (!universe.count(k)) r.pass = false;
    return r;
}

struct SuccessRateResult {
    std::uint64_t trials = 0, successes = 0;
    double measured = 0, predicted = 0;
    double sigma_units = 0;
    bool pass = false;
};

// Measured success rate of adc_sample against OUT / (B_0 · Π|DC(A_i)|), 6σ binomial band.
SuccessRateResult success_rate_test(const SamplerState& s, std::uint64_t out, std::uint64_t trials, Rng& rng);

// A join with validated constraints, for property checks.
struct JoinFixture {
    std::string name;
    JoinQuery query;
    ConstraintSet dc;
};

struct FixtureParams {
    int attributes = 4;
    int relations = 3;
    int domain = 4;
    int max_log_rows = 4;  // relation sizes are powers of two up to 2^this
    bool acyclic = true;   // degree constraints respect one random attribute order
    int degree_constraints = 2;
};

// Random relations and degree constraints read off the data, every bound a power of two.
JoinFixture random_join_fixture(Rng& rng, const FixtureParams& p);

// Random acyclic constraint set over k attributes with power-of-two bounds; every attribute covered.
ConstraintSet random_acyclic_constraints(Rng& rng, int k);

// Hand-built joins with small outputs used by the uniformity checks.
std::vector<JoinFixture> small_join_fixtures();

struct BenchRow {
    std::string instance;
    std::string sampler;
    LogValue bound;
    std::uint64_t attempts = 0, successes = 0;
    double mean_attempts = 0;
    double samples_per_sec = 0;
};

// Triangle occurrences on the clique-union graph for (m, λ): cardinality-only join sampler, degree-constrained
// join sampler and the spanning-tree sampler, each run until `successes` occurrences are drawn.
std::vector<BenchRow> bench_clique_union_triangle(std::uint64_t m, std::uint64_t lambda, std::uint64_t successes,
                                                  Rng& rng);

}  // namespace dcs
