#include "dcs/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dcs/error.hpp"

namespace dcs {

std::string to_string(const Rational& q) { return q.get_str(); }

namespace {

template <class Num>
struct Arith;

template <>
struct Arith<Rational> {
    static bool pos(const Rational& x) { return sgn(x) > 0; }
    static bool neg(const Rational& x) { return sgn(x) < 0; }
    static bool zero(const Rational& x) { return sgn(x) == 0; }
};

template <>
struct Arith<double> {
    static constexpr double eps = 1e-11;
    static bool pos(double x) { return x > eps; }
    static bool neg(double x) { return x < -eps; }
    static bool zero(double x) { return std::fabs(x) <= eps; }
};

template <class Num>
class Tableau {
public:
    using A = Arith<Num>;

    Tableau(int rows, int cols) : m_(rows), w_(cols + 1), t_(static_cast<std::size_t>(rows) * (cols + 1)), d_(cols + 1) {}

    Num& at(int r, int c) { return t_[static_cast<std::size_t>(r) * w_ + c]; }
    Num& rhs(int r) { return at(r, w_ - 1); }
    int cols() const { return w_ - 1; }

    // Reduced profits d_j = c_j - c_B B^-1 A_j, plus the current objective in the last slot (negated).
    void price(const std::vector<Num>& cost, const std::vector<int>& basis) {
        for (int j = 0; j < w_; ++j) d_[j] = j < w_ - 1 ? cost[j] : Num(0);
        for (int r = 0; r < m_; ++r) {
            const Num& cb = cost[basis[r]];
            if (A::zero(cb)) continue;
            for (int j = 0; j < w_; ++j) d_[j] -= cb * at(r, j);
        }
    }

    void pivot(int pr, int pc, std::vector<int>& basis) {
        Num inv = Num(1) / at(pr, pc);
        std::vector<int> nz;
        for (int j = 0; j < w_; ++j) {
            if (A::zero(at(pr, j))) {
                at(pr, j) = 0;
                continue;
            }
            at(pr, j) *= inv;
            nz.push_back(j);
        }
        Num f;
        for (int r = 0; r < m_; ++r) {
            if (r == pr) continue;
            f = at(r, pc);
            if (A::zero(f)) continue;
            for (int j : nz) at(r, j) -= f * at(pr, j);
            at(r, pc) = 0;
        }
        f = d_[pc];
        if (!A::zero(f)) {
            for (int j : nz) d_[j] -= f * at(pr, j);
            d_[pc] = 0;
        }
        basis[pr] = pc;
        ++pivots;
    }

    // Runs Bland's rule until optimal. Returns false when unbounded.
    bool optimize(std::vector<int>& basis, const std::vector<char>& may_enter) {
        for (;;) {
            int pc = -1;
            for (int j = 0; j < w_ - 1; ++j)
                if (may_enter[j] && A::pos(d_[j])) {
                    pc = j;
                    break;
                }
            if (pc < 0) return true;
            int pr = -1;
            Num best;
            for (int r = 0; r < m_; ++r) {
                if (!A::pos(at(r, pc))) continue;
                Num ratio = rhs(r) / at(r, pc);
                bool take = pr < 0 || A::pos(best - ratio) || (A::zero(best - ratio) && basis[r] < basis[pr]);
                if (take) {
                    pr = r;
                    best = ratio;
                }
            }
            if (pr < 0) return false;
            pivot(pr, pc, basis);
        }
    }

    const std::vector<Num>& reduced() const { return d_; }
    int pivots = 0;

private:
    int m_, w_;
    std::vector<Num> t_;
    std::vector<Num> d_;
};

}  // namespace

template <class Num>
LpSolution<Num> solve_lp(const LinearProgram<Num>& lp) {
    using Ar = Arith<Num>;
    const int n = lp.variable_count();
    const int m = static_cast<int>(lp.rows.size());
    for (const auto& row : lp.rows)
        for (const auto& [v, c] : row.terms)
            if (v < 0 || v >= n) throw std::invalid_argument("linear program row references unknown variable");

    // Shift x = lower + x', flip rows to rhs >= 0, then lay out slack and artificial columns.
    std::vector<Num> b(m);
    std::vector<Sense> sense(m);
    std::vector<char> flipped(m, 0);
    for (int i = 0; i < m; ++i) {
        const auto& row = lp.rows[i];
        b[i] = row.rhs;
        for (const auto& [v, c] : row.terms) b[i] -= c * lp.lower[v];
        sense[i] = row.sense;
        if (Ar::neg(b[i])) {
            flipped[i] = 1;
            b[i] = -b[i];
            if (sense[i] == Sense::LE)
                sense[i] = Sense::GE;
            else if (sense[i] == Sense::GE)
                sense[i] = Sense::LE;
        }
    }
    std::vector<int> slack(m, -1), art(m, -1), ident(m, -1);
    int cols = n;
    for (int i = 0; i < m; ++i)
        if (sense[i] != Sense::EQ) slack[i] = cols++;
    int first_art = cols;
    for (int i = 0; i < m; ++i)
        if (sense[i] != Sense::LE) art[i] = cols++;

    Tableau<Num> tab(m, cols);
    std::vector<int> basis(m);
    for (int i = 0; i < m; ++i) {
        Num s = flipped[i] ? Num(-1) : Num(1);
        for (const auto& [v, c] : lp.rows[i].terms) tab.at(i, v) += s * c;
        if (slack[i] >= 0) tab.at(i, slack[i]) = sense[i] == Sense::LE ? Num(1) : Num(-1);
        if (art[i] >= 0) tab.at(i, art[i]) = 1;
        tab.rhs(i) = b[i];
        ident[i] = sense[i] == Sense::LE ? slack[i] : art[i];
        basis[i] = ident[i];
    }

    std::vector<char> may_enter(cols, 1);
    if (first_art < cols) {
        std::vector<Num> phase1(cols, Num(0));
        for (int j = first_art; j < cols; ++j) phase1[j] = -1;
        tab.price(phase1, basis);
        tab.optimize(basis, may_enter);
        // The last reduced slot holds minus the phase-one objective.
        if (Ar::pos(tab.reduced()[cols])) throw Infeasible("linear program is infeasible");
        for (int r = 0; r < m; ++r) {
            if (basis[r] < first_art) continue;
            for (int j = 0; j < first_art; ++j)
                if (!Ar::zero(tab.at(r, j))) {
                    tab.pivot(r, j, basis);
                    break;
                }
        }
        for (int j = first_art; j < cols; ++j) may_enter[j] = 0;
    }

    std::vector<Num> cost(cols, Num(0));
    for (int j = 0; j < n; ++j) cost[j] = lp.maximize ? lp.objective[j] : -lp.objective[j];
    tab.price(cost, basis);
    if (!tab.optimize(basis, may_enter)) throw Unbounded("linear program is unbounded");

    LpSolution<Num> sol;
    sol.pivots = tab.pivots;
    sol.x.assign(n, Num(0));
    for (int r = 0; r < m; ++r)
        if (basis[r] < n) sol.x[basis[r]] = tab.rhs(r);
    for (int j = 0; j < n; ++j) sol.x[j] += lp.lower[j];
    sol.value = 0;
    for (int j = 0; j < n; ++j) sol.value += lp.objective[j] * sol.x[j];
    sol.dual.assign(m, Num(0));
    for (int i = 0; i < m; ++i) {
        Num y = 0;
        for (int r = 0; r < m; ++r) {
            const Num& cb = cost[basis[r]];
            if (!Ar::zero(cb)) y += cb * tab.at(r, ident[i]);
        }
        if (flipped[i]) y = -y;
        if (!lp.maximize) y = -y;
        sol.dual[i] = y;
    }
    return sol;
}

template LpSolution<Rational> solve_lp(const LinearProgram<Rational>&);
template LpSolution<double> solve_lp(const LinearProgram<double>&);

LogValue LogValue::of(const Rational& r) {
    LogValue v;
    v.exact = true;
    v.q = r;
    v.f = r.get_d();
    return v;
}

LogValue LogValue::of(double d) {
    LogValue v;
    v.exact = false;
    v.f = d;
    v.minus_infinity = std::isinf(d) && d < 0;
    return v;
}

LogValue LogValue::neg_inf() { return of(-std::numeric_limits<double>::infinity()); }

std::string LogValue::to_string() const {
    if (minus_infinity) return "-inf";
    if (exact) return q.get_str();
    std::ostringstream os;
    os.precision(12);
    os << f;
    return os.str();
}

bool is_power_of_two(std::uint64_t N) { return N != 0 && (N & (N - 1)) == 0; }

LogValue log2_of(std::uint64_t N) {
    if (N == 0) return LogValue::neg_inf();
    if (is_power_of_two(N)) return LogValue::of(Rational(__builtin_ctzll(N)));
    return LogValue::of(std::log2(static_cast<double>(N)));
}

int compare(const LogValue& a, const LogValue& b) {
    if (a.minus_infinity || b.minus_infinity) {
        if (a.minus_infinity && b.minus_infinity) return 0;
        return a.minus_infinity ? -1 : 1;
    }
    if (a.exact && b.exact) return cmp(a.q, b.q) < 0 ? -1 : (cmp(a.q, b.q) > 0 ? 1 : 0);
    double diff = a.f - b.f;
    if (std::fabs(diff) <= kLogTolerance) return 0;
    return diff < 0 ? -1 : 1;
}

LogValue operator+(const LogValue& a, const LogValue& b) {
    if (a.minus_infinity || b.minus_infinity) return LogValue::neg_inf();
    if (a.exact && b.exact) return LogValue::of(Rational(a.q + b.q));
    return LogValue::of(a.f + b.f);
}

namespace {

bool all_powers_of_two(const ConstraintSet& dc) {
    for (const auto& c : dc.constraints)
        if (!is_power_of_two(c.N)) return false;
    return true;
}

template <class Num>
Num log_num(std::uint64_t N);
template <>
Rational log_num<Rational>(std::uint64_t N) {
    return Rational(__builtin_ctzll(N));
}
template <>
double log_num<double>(std::uint64_t N) {
    return std::log2(static_cast<double>(N));
}

LogValue wrap(const Rational& q) { return LogValue::of(q); }
LogValue wrap(double d) { return LogValue::of(d); }

template <class Num>
BoundReport modular_impl(const ConstraintSet& dc, int k) {
    LinearProgram<Num> lp;
    for (int a = 0; a < k; ++a) lp.add_variable(Num(1));
    for (const auto& c : dc.constraints) {
        std::vector<std::pair<int, Num>> terms;
        for (int a : members(c.Y & ~c.X)) {
            if (a >= k) throw SchemaError("constraint attribute outside the universe");
            terms.emplace_back(a, Num(1));
        }
        lp.add_row(std::move(terms), Sense::LE, log_num<Num>(c.N));
    }
    for (int a = 0; a < k; ++a)
        if (constraints_of_attribute(dc, a).empty())
            throw UncoveredAttribute("attribute " + std::to_string(a) + " is bounded by no constraint");
    auto sol = solve_lp(lp);
    BoundReport rep;
    rep.log2 = wrap(sol.value);
    for (const auto& v : sol.x) rep.primal.push_back(wrap(v));
    for (const auto& y : sol.dual) rep.dual.push_back(wrap(y));
    return rep;
}

template <class Num>
LogValue polymatroid_impl(const ConstraintSet& dc, int k) {
    // Variable s-1 holds h(s) for nonempty s; h >= 0 comes from the variable bounds.
    const AttrSet full = (AttrSet{1} << k) - 1;
    LinearProgram<Num> lp;
    for (AttrSet s = 1; s <= full; ++s) lp.add_variable(s == full ? Num(1) : Num(0));
    auto var = [](AttrSet s) { return static_cast<int>(s) - 1; };
    auto add = [&](std::vector<std::pair<int, Num>>& t, AttrSet s, int c) {
        if (s) t.emplace_back(var(s), Num(c));
    };
    // Elemental inequalities generate the whole polymatroid cone.
    for (int i = 0; i < k; ++i) {
        std::vector<std::pair<int, Num>> t;
        add(t, full & ~bit(i), 1);
        add(t, full, -1);
        lp.add_row(std::move(t), Sense::LE, Num(0));
    }
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            AttrSet rest = full & ~bit(i) & ~bit(j);
            for (AttrSet K = rest;; K = (K - 1) & rest) {
                std::vector<std::pair<int, Num>> t;
                add(t, K | bit(i) | bit(j), 1);
                add(t, K, 1);
                add(t, K | bit(i), -1);
                add(t, K | bit(j), -1);
                lp.add_row(std::move(t), Sense::LE, Num(0));
                if (K == 0) break;
            }
        }
    for (const auto& c : dc.constraints) {
        std::vector<std::pair<int, Num>> t;
        add(t, c.Y, 1);
        add(t, c.X, -1);
        lp.add_row(std::move(t), Sense::LE, log_num<Num>(c.N));
    }
    return wrap(solve_lp(lp).value);
}

}  // namespace

BoundReport modular_bound(const ConstraintSet& dc, int attribute_count) {
    if (attribute_count > kMaxAttributes) throw TooLarge("too many attributes");
    if (all_powers_of_two(dc)) return modular_impl<Rational>(dc, attribute_count);
    return modular_impl<double>(dc, attribute_count);
}

BoundReport polymat_acyclic(const ConstraintSet& dc, int attribute_count) {
    auto g = dependency_graph(dc, attribute_count);
    topological_order(g);  // throws on a cycle
    auto rep = modular_bound(dc, attribute_count);
    rep.polymatroid_certified = true;
    return rep;
}

LogValue polymatroid_lp_full(const ConstraintSet& dc, int attribute_count) {
    if (attribute_count > 6) throw TooLarge("full polymatroid LP supports at most 6 attributes");
    if (dc.span() > attribute_count) throw SchemaError("constraint attribute outside the universe");
    for (int a = 0; a < attribute_count; ++a)
        if (constraints_of_attribute(dc, a).empty())
            throw UncoveredAttribute("attribute " + std::to_string(a) + " is bounded by no constraint");
    if (all_powers_of_two(dc)) return polymatroid_impl<Rational>(dc, attribute_count);
    return polymatroid_impl<double>(dc, attribute_count);
}

BoundReport agm_bound(const JoinQuery& q) {
    const int k = q.attribute_count();
    for (int a = 0; a < k; ++a) {
        bool covered = false;
        for (const auto& r : q.relations) covered |= r.column_of(a) >= 0;
        if (!covered) throw UncoveredAttribute("attribute '" + q.universe[a].name + "' is in no relation");
    }
    for (const auto& r : q.relations)
        if (r.size() == 0) {
            BoundReport rep;
            rep.log2 = LogValue::neg_inf();
            return rep;
        }
    // Solved through its dual: max sum y_A s.t. sum_{A in F} y_A <= log2 |R_F| per relation.
    ConstraintSet rows;
    for (const auto& r : q.relations) {
        rows.constraints.push_back({0, r.schema_mask(), r.size()});
        rows.guards.push_back(-1);
    }
    return modular_bound(rows, k);
}

bool SetFunction::zero_grounded() const { return !h.empty() && same_value(h[0], LogValue::of(Rational(0))); }

bool SetFunction::monotone() const {
    const AttrSet full = (AttrSet{1} << k) - 1;
    for (AttrSet y = 0; y <= full; ++y)
        for (AttrSet x = y;; x = (x - 1) & y) {
            if (compare(h[x], h[y]) > 0) return false;
            if (x == 0) break;
        }
    return true;
}

bool SetFunction::submodular() const {
    const AttrSet full = (AttrSet{1} << k) - 1;
    for (AttrSet x = 0; x <= full; ++x)
        for (AttrSet y = 0; y <= full; ++y)
            if (compare(h[x | y] + h[x & y], h[x] + h[y]) > 0) return false;
    return true;
}

bool SetFunction::satisfies(const ConstraintSet& dc) const {
    for (const auto& c : dc.constraints) {
        // h(Y) <= h(X) + log2 N
        if (compare(h[c.Y], h[c.X] + log2_of(c.N)) > 0) return false;
    }
    return true;
}

}  // namespace dcs
