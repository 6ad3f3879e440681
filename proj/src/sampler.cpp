#include "dcs/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dcs/error.hpp"

namespace dcs {

namespace {

std::uint64_t uniform_below(Rng& rng, std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng); }

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

double as_double(const LogValue& v) { return v.exact ? v.q.get_d() : v.f; }

}  // namespace

SamplerState make_sampler(const JoinQuery& q, const ConstraintSet& dc) {
    SamplerState s;
    s.query = std::make_shared<const JoinQuery>(q);
    s.dc = dc;
    const int k = q.attribute_count();
    if (k == 0) throw SchemaError("join has no attributes");
    for (int g : dc.guards)
        if (g < 0) throw UnguardedConstraint("constraint set has no main guards; run validate_and_close first");
    s.order = topological_order(dependency_graph(dc, k));
    s.bound = polymat_acyclic(dc, k);
    s.index = build_index(q, dc, s.order);
    s.plan = make_join_plan(q, s.order);

    s.delta.resize(dc.size());
    for (std::size_t c = 0; c < dc.size(); ++c) s.delta[c] = std::max(0.0, as_double(s.bound.dual[c]));
    for (int i = 0; i < k; ++i) s.dc_of_level.push_back(constraints_of_attribute(dc, s.order[i]));
    // A float-mode dual can fall a hair short of covering an attribute; scale it up so every p_pass stays <= 1.
    if (!s.bound.log2.exact) {
        for (const auto& cs : s.dc_of_level) {
            double sum = 0;
            for (int c : cs) sum += s.delta[c];
            if (sum < 1.0 && sum > 0)
                for (int c : cs) s.delta[c] = s.delta[c] / sum * (1.0 + 1e-15);
        }
    }
    for (std::size_t c = 0; c < dc.size(); ++c)
        if (s.delta[c] > 0) s.weighted.emplace_back(static_cast<int>(c), s.delta[c]);

    Tuple w(k, 0);
    s.log_b0 = b_value(s.index, 0, w, s.weighted);
    s.log_dc_product = 0;
    for (const auto& cs : s.dc_of_level) s.log_dc_product += std::log2(static_cast<double>(cs.size()));

    for (const auto& r : q.relations) {
        TupleSet rows;
        for (std::size_t i = 0; i < r.size(); ++i) rows.emplace(r.row(i), r.row(i) + r.arity());
        s.membership.push_back(std::move(rows));
    }
    return s;
}

SampleOutcome adc_sample(const SamplerState& s, Rng& rng) {
    SampleOutcome out;
    const int k = s.k();
    out.tuple.assign(s.query->attribute_count(), 0);
    Tuple& w = out.tuple;
    double log_prev = s.log_b0;
    for (int i = 1; i <= k; ++i) {
        out.level = i;
        ++out.steps;
        const int A = s.order[i - 1];
        const auto& cands = s.dc_of_level[i - 1];
        // A guard with nothing matching the prefix means no join tuple extends it.
        bool dead = std::isinf(log_prev);
        for (int other : cands) dead = dead || !s.index.fragment(other, i - 1, w);
        if (dead) {
            out.failure = Failure::EmptyFragment;
            return out;
        }
        const int c = cands[uniform_below(rng, cands.size())];
        const Fragment* f = s.index.fragment(c, i - 1, w);
        const Value* row = s.index.fragment_row(c, i - 1, *f, static_cast<std::uint32_t>(uniform_below(rng, f->count)));
        w[A] = row[s.index.column_in_y(c, A)];
        auto [rstar, cstar] = reldeg_star_and_constraint(s.index, i, cands, w);
        if (cstar != c) {
            out.failure = Failure::Mismatch;
            return out;
        }
        double log_cur = b_value(s.index, i, w, s.weighted);
        double p = std::isinf(log_cur) ? 0.0 : std::exp2(log_cur - log_prev) / rstar.value();
        out.max_p_pass = std::max(out.max_p_pass, p);
        if (p > 1.0 + 1e-12) throw std::logic_error("pass probability above 1: " + std::to_string(p));
        if (uniform01(rng) >= p) {
            out.failure = Failure::Coin;
            return out;
        }
        log_prev = log_cur;
    }
    ++out.steps;
    const JoinQuery& q = *s.query;
    Tuple proj;
    for (std::size_t r = 0; r < q.relations.size(); ++r) {
        const auto& schema = q.relations[r].schema;
        proj.resize(schema.size());
        for (std::size_t j = 0; j < schema.size(); ++j) proj[j] = w[schema[j]];
        if (!s.membership[r].count(proj)) {
            out.failure = Failure::Membership;
            return out;
        }
    }
    out.success = true;
    return out;
}

double p_pass(const SamplerState& s, int i, const Tuple& w_prev, const Tuple& w_cur) {
    double log_prev = b_value(s.index, i - 1, w_prev, s.weighted);
    double log_cur = b_value(s.index, i, w_cur, s.weighted);
    if (std::isinf(log_cur) || std::isinf(log_prev)) return 0.0;
    for (int c : s.dc_of_level[i - 1])
        if (!s.index.fragment(c, i - 1, w_prev)) return 0.0;
    auto [rstar, c] = reldeg_star_and_constraint(s.index, i, s.dc_of_level[i - 1], w_cur);
    (void)c;
    if (rstar.num == 0) return 0.0;
    return std::exp2(log_cur - log_prev) / rstar.value();
}

std::shared_ptr<const JoinPlan> make_join_plan(const JoinQuery& q, std::vector<int> order) {
    auto plan = std::make_shared<JoinPlan>();
    plan->order = std::move(order);
    plan->attribute_count = q.attribute_count();
    const int k = static_cast<int>(plan->order.size());
    if (k != q.attribute_count()) throw SchemaError("attribute order must list every attribute once");
    plan->levels.resize(k);
    AttrSet prefix = 0;
    for (int i = 0; i < k; ++i) {
        const int A = plan->order[i];
        for (std::size_t r = 0; r < q.relations.size(); ++r) {
            const Relation& rel = q.relations[r];
            const int col = rel.column_of(A);
            if (col < 0) continue;
            JoinPlan::Access acc;
            acc.relation = static_cast<int>(r);
            acc.key_attributes = members(rel.schema_mask() & prefix);
            std::vector<int> kc;
            for (int a : acc.key_attributes) kc.push_back(rel.column_of(a));
            for (std::size_t t = 0; t < rel.size(); ++t) {
                const Value* row = rel.row(t);
                std::vector<Value> key;
                for (int c : kc) key.push_back(row[c]);
                acc.extensions[key].push_back(row[col]);
            }
            for (auto& [key, vals] : acc.extensions) {
                std::sort(vals.begin(), vals.end());
                vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
            }
            plan->levels[i].push_back(std::move(acc));
        }
        if (plan->levels[i].empty()) throw UncoveredAttribute("attribute '" + q.universe[A].name + "' is in no relation");
        prefix |= bit(A);
    }
    return plan;
}

JoinEnumerator::JoinEnumerator(std::shared_ptr<const JoinPlan> plan) : plan_(std::move(plan)) {
    w_.assign(plan_->attribute_count, 0);
}

JoinEnumerator::JoinEnumerator(const JoinQuery& q, std::vector<int> order)
    : JoinEnumerator(make_join_plan(q, std::move(order))) {}

void JoinEnumerator::push_level(int level) {
    static const std::vector<Value> kEmpty;
    Frame f{level, &kEmpty, {}, 0};
    std::vector<Value> key;
    bool missing = false;
    for (const auto& acc : plan_->levels[level]) {
        key.clear();
        for (int a : acc.key_attributes) key.push_back(w_[a]);
        auto it = acc.extensions.find(key);
        if (it == acc.extensions.end()) {
            missing = true;
            break;
        }
        f.others.push_back(&it->second);
    }
    if (!missing) {
        auto smallest = std::min_element(f.others.begin(), f.others.end(),
                                         [](auto* a, auto* b) { return a->size() < b->size(); });
        f.driver = *smallest;
        f.others.erase(smallest);
    } else {
        f.others.clear();
    }
    stack_.push_back(std::move(f));
}

bool JoinEnumerator::step(std::uint64_t budget) {
    if (done_) return true;
    if (!started_) {
        started_ = true;
        push_level(0);
    }
    for (std::uint64_t spent = 0; spent < budget; ++spent) {
        if (stack_.empty()) {
            done_ = true;
            return true;
        }
        Frame& f = stack_.back();
        if (f.pos >= f.driver->size()) {
            stack_.pop_back();
            continue;
        }
        const Value v = (*f.driver)[f.pos++];
        bool ok = true;
        for (const auto* other : f.others)
            if (!std::binary_search(other->begin(), other->end(), v)) {
                ok = false;
                break;
            }
        if (!ok) continue;
        w_[plan_->order[f.level]] = v;
        if (f.level + 1 == static_cast<int>(plan_->order.size()))
            results_.push_back(w_);
        else
            push_level(f.level + 1);
    }
    if (stack_.empty()) done_ = true;
    return done_;
}

std::vector<Tuple> full_join(const SamplerState& s) {
    JoinEnumerator e(s.plan);
    while (!e.step(1u << 20)) {
    }
    return e.results();
}

std::optional<Tuple> sample_operation(const SamplerState& s, Rng& rng, const RaceOptions& opt) {
    JoinEnumerator e(s.plan);
    Contest<Tuple> contest;
    contest.attempt = [&](Rng& r, std::uint64_t& steps) -> std::optional<Tuple> {
        auto o = adc_sample(s, r);
        steps += o.steps;
        if (o.success) return std::move(o.tuple);
        return std::nullopt;
    };
    contest.enumerate = [&](std::uint64_t budget) { return e.step(budget); };
    contest.pick = [&](Rng& r) -> std::optional<Tuple> {
        if (e.results().empty()) return std::nullopt;
        return e.results()[uniform_below(r, e.results().size())];
    };
    return run_race(contest, rng, opt).value;
}

Estimate estimate_out(const SamplerState& s, double epsilon, double confidence, Rng& rng, const EstimateOptions& opt) {
    if (!(epsilon > 0 && epsilon < 1)) throw std::invalid_argument("epsilon must lie in (0,1)");
    if (!(confidence > 0 && confidence < 1)) throw std::invalid_argument("confidence must lie in (0,1)");
    // Stopping-rule target: enough successes for relative error epsilon at the requested confidence.
    const double dklr = 4.0 * (std::exp(1.0) - 2.0) * (1.0 + epsilon) * std::log(2.0 / (1.0 - confidence));
    const auto target = static_cast<std::uint64_t>(std::ceil(std::max(48.0, dklr) / (epsilon * epsilon)));
    const double scale = std::exp2(s.log_inverse_tuple_probability());

    Estimate est;
    JoinEnumerator e(s.plan);
    const std::uint64_t unit = std::max<std::uint64_t>(1, opt.race.work_unit);
    for (;;) {
        std::uint64_t steps = 0;
        while (steps < unit) {
            auto o = adc_sample(s, rng);
            steps += std::max<std::uint64_t>(1, o.steps);
            ++est.trials;
            if (o.success && ++est.successes >= target) {
                est.value = static_cast<double>(est.successes) / static_cast<double>(est.trials) * scale;
                return est;
            }
            if (!opt.use_enumeration && est.trials >= opt.max_trials) {
                est.value = static_cast<double>(est.successes) / static_cast<double>(est.trials) * scale;
                return est;
            }
        }
        if (opt.use_enumeration && e.step(unit)) {
            est.value = static_cast<double>(e.results().size());
            est.exact = true;
            return est;
        }
    }
}

PermutationStream::PermutationStream(const SamplerState& s, Rng& rng, RaceOptions opt)
    : s_(s), rng_(rng), opt_(opt), enumerator_(s.plan) {
    opt_.work_unit = std::max<std::uint64_t>(1, opt_.work_unit);
}

void PermutationStream::switch_to_enumeration() {
    while (!enumerator_.step(1u << 20)) {
    }
    for (const auto& t : enumerator_.results())
        if (!seen_.count(t)) remainder_.push_back(t);
    std::shuffle(remainder_.begin(), remainder_.end(), rng_);
    std::reverse(remainder_.begin(), remainder_.end());  // popped from the back
    switched_ = true;
}

std::optional<Tuple> PermutationStream::next() {
    for (;;) {
        if (switched_) {
            if (remainder_.empty()) return std::nullopt;
            Tuple t = std::move(remainder_.back());
            remainder_.pop_back();
            return t;
        }
        const double estimate = successes_ == 0
                                    ? 0.0
                                    : static_cast<double>(successes_) / static_cast<double>(trials_) *
                                          std::exp2(s_.log_inverse_tuple_probability());
        if (static_cast<double>(seen_.size()) >= std::max(16.0, estimate / 2.0)) {
            switch_to_enumeration();
            continue;
        }
        std::uint64_t steps = 0;
        while (steps < opt_.work_unit) {
            auto o = adc_sample(s_, rng_);
            steps += std::max<std::uint64_t>(1, o.steps);
            ++trials_;
            if (!o.success) continue;
            ++successes_;
            if (seen_.insert(o.tuple).second) return std::move(o.tuple);
        }
        if (enumerator_.step(opt_.work_unit)) switch_to_enumeration();
    }
}

std::vector<Tuple> random_permutation(const SamplerState& s, Rng& rng, const RaceOptions& opt) {
    PermutationStream stream(s, rng, opt);
    std::vector<Tuple> out;
    while (auto t = stream.next()) out.push_back(std::move(*t));
    return out;
}

std::vector<Tuple> delay_enumerate(const SamplerState& s, Rng& rng, const RaceOptions& opt) {
    return random_permutation(s, rng, opt);
}

}  // namespace dcs
