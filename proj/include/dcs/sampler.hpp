#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <unordered_set>
#include <vector>

#include "dcs/index.hpp"
#include "dcs/lp.hpp"
#include "dcs/model.hpp"
#include "dcs/race.hpp"

namespace dcs {

using Tuple = std::vector<Value>;  // indexed by attribute id
using TupleSet = std::unordered_set<Tuple, KeyHash>;

struct JoinPlan;

struct SamplerState {
    std::shared_ptr<const JoinQuery> query;
    ConstraintSet dc;
    std::vector<int> order;
    FragmentIndex index;
    BoundReport bound;                                  // modular bound and the chosen optimal dual
    std::vector<double> delta;                          // dual used by the sampler, one per constraint
    std::vector<std::pair<int, double>> weighted;       // constraints with delta > 0
    std::vector<std::vector<int>> dc_of_level;          // DC(A_i) at index i-1
    std::vector<TupleSet> membership;                   // rows per relation, in schema column order
    std::shared_ptr<const JoinPlan> plan;               // enumeration side of the race
    double log_b0 = 0;                                  // log2 B_0(null)
    double log_dc_product = 0;                          // log2 prod |DC(A_i)|

    int k() const { return static_cast<int>(order.size()); }
    // log2 of B_0 * prod |DC(A_i)|; a tuple is returned by one run with probability 2^-this.
    double log_inverse_tuple_probability() const { return log_b0 + log_dc_product; }
};

// Builds everything a sampling session needs. Throws CyclicConstraints if the dependency graph has a cycle.
SamplerState make_sampler(const JoinQuery& q, const ConstraintSet& dc);

enum class Failure { None, EmptyFragment, Mismatch, Coin, Membership };

struct SampleOutcome {
    bool success = false;
    Tuple tuple;
    Failure failure = Failure::None;
    int level = 0;            // level at which the run stopped
    double max_p_pass = 0;    // largest pass probability met during the run
    std::uint64_t steps = 0;  // basic work units spent
};

// One run of the sampler. Throws std::logic_error when a pass probability exceeds 1 + 1e-12.
SampleOutcome adc_sample(const SamplerState& s, Rng& rng);

// (B_i(w_cur) / B_{i-1}(w_prev)) / reldeg*_i, where w_cur extends w_prev by A_i.
double p_pass(const SamplerState& s, int i, const Tuple& w_prev, const Tuple& w_cur);

// Extension lists of every relation, keyed by its attributes bound earlier in the order. Immutable.
struct JoinPlan {
    struct Access {
        int relation;
        std::vector<int> key_attributes;  // schema(R) ∩ V_{i-1}
        std::unordered_map<std::vector<Value>, std::vector<Value>, KeyHash> extensions;
    };
    std::vector<int> order;
    std::vector<std::vector<Access>> levels;
    int attribute_count = 0;
};

std::shared_ptr<const JoinPlan> make_join_plan(const JoinQuery& q, std::vector<int> order);

// Resumable attribute-at-a-time backtracking join over a shared plan.
class JoinEnumerator {
public:
    explicit JoinEnumerator(std::shared_ptr<const JoinPlan> plan);
    JoinEnumerator(const JoinQuery& q, std::vector<int> order);

    bool step(std::uint64_t budget);  // true once finished
    bool done() const { return done_; }
    const std::vector<Tuple>& results() const { return results_; }

private:
    struct Frame {
        int level;
        const std::vector<Value>* driver;
        std::vector<const std::vector<Value>*> others;
        std::size_t pos;
    };
    void push_level(int level);

    std::shared_ptr<const JoinPlan> plan_;
    std::vector<Frame> stack_;
    Tuple w_;
    std::vector<Tuple> results_;
    bool started_ = false, done_ = false;
};

std::vector<Tuple> full_join(const SamplerState& s);

// Uniform tuple of the join, or nullopt when the join is empty.
std::optional<Tuple> sample_operation(const SamplerState& s, Rng& rng, const RaceOptions& opt = {});

struct EstimateOptions {
    RaceOptions race;
    bool use_enumeration = true;        // race the full join; without it a run stops at max_trials
    std::uint64_t max_trials = 100000000;
};

struct Estimate {
    double value = 0;
    bool exact = false;  // produced by the enumeration
    std::uint64_t trials = 0;
    std::uint64_t successes = 0;
};

Estimate estimate_out(const SamplerState& s, double epsilon, double confidence, Rng& rng,
                      const EstimateOptions& opt = {});

// Emits every join tuple exactly once, in uniformly random order.
class PermutationStream {
public:
    PermutationStream(const SamplerState& s, Rng& rng, RaceOptions opt = {});
    std::optional<Tuple> next();

private:
    void switch_to_enumeration();

    const SamplerState& s_;
    Rng& rng_;
    RaceOptions opt_;
    JoinEnumerator enumerator_;
    TupleSet seen_;
    std::vector<Tuple> remainder_;
    bool switched_ = false;
    std::uint64_t trials_ = 0, successes_ = 0;
};

std::vector<Tuple> random_permutation(const SamplerState& s, Rng& rng, const RaceOptions& opt = {});
std::vector<Tuple> delay_enumerate(const SamplerState& s, Rng& rng, const RaceOptions& opt = {});

}  // namespace dcs
