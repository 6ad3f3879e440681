#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dcs/model.hpp"

namespace dcs {

using Rational = mpq_class;

std::string to_string(const Rational& q);

enum class Sense { LE, GE, EQ };

// max/min c.x subject to rows, x >= lower.
template <class Num>
struct LinearProgram {
    struct Row {
        std::vector<std::pair<int, Num>> terms;
        Sense sense = Sense::LE;
        Num rhs = 0;
    };

    bool maximize = true;
    std::vector<Num> objective;
    std::vector<Num> lower;
    std::vector<Row> rows;

    int add_variable(Num cost, Num low = 0) {
        objective.push_back(cost);
        lower.push_back(low);
        return static_cast<int>(objective.size()) - 1;
    }
    void add_row(std::vector<std::pair<int, Num>> terms, Sense sense, Num rhs) {
        rows.push_back({std::move(terms), sense, rhs});
    }
    int variable_count() const { return static_cast<int>(objective.size()); }
};

template <class Num>
struct LpSolution {
    Num value = 0;
    std::vector<Num> x;
    // One multiplier per row; value == sum(dual[i] * rhs[i]) + objective . lower.
    std::vector<Num> dual;
    int pivots = 0;
};

// Dense two-phase tableau simplex with Bland's rule. Throws Infeasible or Unbounded.
template <class Num>
LpSolution<Num> solve_lp(const LinearProgram<Num>& lp);

extern template LpSolution<Rational> solve_lp(const LinearProgram<Rational>&);
extern template LpSolution<double> solve_lp(const LinearProgram<double>&);

// A log2 quantity: exact rational when every input bound is a power of two, double otherwise.
struct LogValue {
    bool exact = true;
    bool minus_infinity = false;
    Rational q = 0;
    double f = 0;

    static LogValue of(const Rational& r);
    static LogValue of(double d);
    static LogValue neg_inf();

    double value() const { return f; }
    std::string to_string() const;
};

// log2(N); exact when N is a power of two.
LogValue log2_of(std::uint64_t N);
bool is_power_of_two(std::uint64_t N);

constexpr double kLogTolerance = 1e-9;

// -1, 0, 1; exact comparison when both sides are exact, tolerance 1e-9 otherwise.
int compare(const LogValue& a, const LogValue& b);
inline bool same_value(const LogValue& a, const LogValue& b) { return compare(a, b) == 0; }
LogValue operator+(const LogValue& a, const LogValue& b);

struct BoundReport {
    LogValue log2;
    std::vector<LogValue> primal;  // nu_A per attribute
    std::vector<LogValue> dual;    // delta per constraint
    bool polymatroid_certified = false;
};

// max sum nu_A s.t. sum_{A in Y-X} nu_A <= log2 N for every constraint.
BoundReport modular_bound(const ConstraintSet& dc, int attribute_count);

// modular_bound on an acyclic set, which then equals the polymatroid bound. Throws CyclicConstraints.
BoundReport polymat_acyclic(const ConstraintSet& dc, int attribute_count);

// Optimum of h(V) over zero-grounded monotone submodular h obeying h(Y) - h(X) <= log2 N.
// Throws TooLarge for more than 6 attributes.
LogValue polymatroid_lp_full(const ConstraintSet& dc, int attribute_count);

// Fractional edge cover bound; dual holds one weight per relation. Throws UncoveredAttribute.
BoundReport agm_bound(const JoinQuery& q);

// Values indexed by subset bitmask over k attributes.
struct SetFunction {
    int k = 0;
    std::vector<LogValue> h;

    const LogValue& operator[](AttrSet s) const { return h[s]; }
    bool zero_grounded() const;
    bool monotone() const;
    bool submodular() const;
    // h(Y) - h(X) <= log2 N for every constraint.
    bool satisfies(const ConstraintSet& dc) const;
};

}  // namespace dcs
