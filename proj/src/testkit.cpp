#include "dcs/testkit.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <chrono>
#include <cmath>
#include <numeric>
#include <queue>
#include <unordered_set>

#include "dcs/directed.hpp"
#include "dcs/error.hpp"
#include "dcs/instance_gen.hpp"
#include "dcs/undirected.hpp"

namespace dcs {

std::set<std::vector<Value>> brute_force_join(const JoinQuery& q) {
    const int k = q.attribute_count();
    std::vector<std::set<Value>> domain(k);
    std::vector<char> seen(k, 0);
    for (const auto& r : q.relations)
        for (std::size_t c = 0; c < r.arity(); ++c) {
            const int a = r.schema[c];
            std::set<Value> col;
            for (std::size_t t = 0; t < r.size(); ++t) col.insert(r.row(t)[c]);
            if (!seen[a]) {
                domain[a] = std::move(col);
                seen[a] = 1;
            } else {
                std::set<Value> both;
                std::set_intersection(domain[a].begin(), domain[a].end(), col.begin(), col.end(),
                                      std::inserter(both, both.end()));
                domain[a] = std::move(both);
            }
        }
    for (int a = 0; a < k; ++a)
        if (!seen[a]) throw UncoveredAttribute("attribute '" + q.universe[a].name + "' is in no relation");
    double space = 1;
    for (const auto& d : domain) space *= static_cast<double>(d.size());
    if (space > 1e7) throw TooLarge("brute-force join space above 10^7");
    std::set<std::vector<Value>> out;
    if (space == 0 || k == 0) return out;

    std::vector<std::set<std::vector<Value>>> rows(q.relations.size());
    for (std::size_t r = 0; r < q.relations.size(); ++r)
        for (std::size_t t = 0; t < q.relations[r].size(); ++t) {
            const Value* row = q.relations[r].row(t);
            rows[r].insert(std::vector<Value>(row, row + q.relations[r].arity()));
        }
    std::vector<std::vector<Value>> dom(k);
    for (int a = 0; a < k; ++a) dom[a].assign(domain[a].begin(), domain[a].end());
    std::vector<std::size_t> idx(k, 0);
    std::vector<Value> u(k), proj;
    for (;;) {
        for (int a = 0; a < k; ++a) u[a] = dom[a][idx[a]];
        bool ok = true;
        for (std::size_t r = 0; r < q.relations.size() && ok; ++r) {
            proj.clear();
            for (int a : q.relations[r].schema) proj.push_back(u[a]);
            ok = rows[r].count(proj) != 0;
        }
        if (ok) out.insert(u);
        int a = 0;
        while (a < k && ++idx[a] == dom[a].size()) idx[a++] = 0;
        if (a == k) break;
    }
    return out;
}

namespace {

// Backtracking over injective maps; pattern vertices placed in BFS order so each has a placed neighbour.
std::map<OracleKey, std::vector<int>> occurrences(int n, const std::vector<std::pair<int, int>>& gedges, int k,
                                                  const std::vector<std::pair<int, int>>& pedges, bool directed) {
    if (k > 8) throw TooLarge("oracle handles patterns up to 8 vertices");
    std::map<OracleKey, std::vector<int>> out;
    if (k > n) return out;
    std::set<std::pair<int, int>> present;
    std::vector<std::vector<int>> nb(n);
    for (auto [u, v] : gedges) {
        present.insert({u, v});
        if (!directed) present.insert({v, u});
        nb[u].push_back(v);
        nb[v].push_back(u);
    }
    for (auto& l : nb) {
        std::sort(l.begin(), l.end());
        l.erase(std::unique(l.begin(), l.end()), l.end());
    }
    std::vector<std::vector<int>> pnb(k);
    for (auto [u, v] : pedges) {
        pnb[u].push_back(v);
        pnb[v].push_back(u);
    }
    std::vector<int> order, anchor(k, -1);
    std::vector<char> placed(k, 0);
    for (int s = 0; s < k; ++s) {
        if (placed[s]) continue;
        std::queue<int> q;
        q.push(s);
        placed[s] = 1;
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            order.push_back(u);
            for (int v : pnb[u])
                if (!placed[v]) {
                    placed[v] = 1;
                    anchor[v] = u;
                    q.push(v);
                }
        }
    }
    std::vector<int> f(k, -1);
    std::vector<char> used(n, 0);
    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    auto consistent = [&](int u) {
        for (auto [a, b] : pedges) {
            if (a != u && b != u) continue;
            if (f[a] < 0 || f[b] < 0) continue;
            if (!present.count({f[a], f[b]})) return false;
        }
        return true;
    };
    auto record = [&] {
        OracleKey key;
        for (auto [a, b] : pedges) {
            int x = f[a], y = f[b];
            if (!directed && x > y) std::swap(x, y);
            key.emplace_back(x, y);
        }
        std::sort(key.begin(), key.end());
        out.emplace(std::move(key), f);
    };
    std::function<void(std::size_t)> place = [&](std::size_t j) {
        if (j == order.size()) {
            record();
            return;
        }
        const int u = order[j];
        const auto& cand = anchor[u] >= 0 ? nb[f[anchor[u]]] : all;
        for (int x : cand) {
            if (used[x]) continue;
            f[u] = x;
            used[x] = 1;
            if (consistent(u)) place(j + 1);
            used[x] = 0;
            f[u] = -1;
        }
    };
    place(0);
    return out;
}

std::vector<std::pair<int, int>> edge_pairs(const std::vector<Edge>& e) { return {e.begin(), e.end()}; }

}  // namespace

std::map<OracleKey, std::vector<int>> brute_force_occurrences(const DirectedGraph& G, const DirectedGraph& P) {
    return occurrences(G.n, edge_pairs(G.edges), P.n, edge_pairs(P.edges), true);
}

std::map<OracleKey, std::vector<int>> brute_force_occurrences(const UndirectedGraph& G, const UndirectedGraph& P) {
    return occurrences(G.n, edge_pairs(G.edges), P.n, edge_pairs(P.edges), false);
}

UniformityResult uniformity_test(const std::vector<std::uint64_t>& counts) {
    UniformityResult r;
    const std::size_t u = counts.size();
    if (u < 2) {
        r.pass = true;
        return r;
    }
    const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}));
    const double expect = total / u;
    const double sd = std::sqrt(total * (1.0 / u) * (1.0 - 1.0 / u));
    for (auto c : counts) {
        const double d = c - expect;
        r.chi2 += d * d / expect;
        r.max_sigma = std::max(r.max_sigma, std::abs(d) / sd);
    }
    r.dof = static_cast<int>(u) - 1;
    boost::math::chi_squared dist(r.dof);
    r.p_value = boost::math::cdf(boost::math::complement(dist, r.chi2));
    r.pass = r.max_sigma <= 6.0 && r.p_value >= 1e-9;
    return r;
}

SuccessRateResult success_rate_test(const SamplerState& s, std::uint64_t out, std::uint64_t trials, Rng& rng) {
    SuccessRateResult r;
    r.trials = trials;
    for (std::uint64_t t = 0; t < trials; ++t)
        if (adc_sample(s, rng).success) ++r.successes;
    r.measured = static_cast<double>(r.successes) / trials;
    r.predicted = out * std::exp2(-s.log_inverse_tuple_probability());
    const double sd = std::sqrt(r.predicted * (1 - r.predicted) / trials);
    if (sd == 0) {
        r.pass = std::abs(r.measured - r.predicted) < 1e-12;
        r.sigma_units = r.pass ? 0 : INFINITY;
    } else {
        r.sigma_units = std::abs(r.measured - r.predicted) / sd;
        r.pass = r.sigma_units <= 6.0;
    }
    return r;
}

namespace {

std::uint64_t next_power_of_two(std::uint64_t x) {
    std::uint64_t p = 1;
    while (p < x) p <<= 1;
    return p;
}

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

}  // namespace

JoinFixture random_join_fixture(Rng& rng, const FixtureParams& p) {
    JoinFixture fx;
    JoinQuery& q = fx.query;
    for (int a = 0; a < p.attributes; ++a) q.ensure_attribute(std::string(1, static_cast<char>('A' + a)));
    for (int v = 0; v < p.domain; ++v) q.values.intern(std::to_string(v));
    std::vector<int> pos(p.attributes);
    {
        std::vector<int> perm(p.attributes);
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        for (int i = 0; i < p.attributes; ++i) pos[perm[i]] = i;
    }
    std::vector<std::vector<int>> schemas(p.relations);
    for (int a = 0; a < p.attributes; ++a) schemas[a % p.relations].push_back(a);
    for (auto& s : schemas) {
        const int want = std::min(p.attributes, uniform_int(rng, 2, 3));
        while (static_cast<int>(s.size()) < want) {
            int a = uniform_int(rng, 0, p.attributes - 1);
            if (std::find(s.begin(), s.end(), a) == s.end()) s.push_back(a);
        }
        std::sort(s.begin(), s.end());
    }
    for (std::size_t r = 0; r < schemas.size(); ++r) {
        Relation rel;
        rel.name = "R" + std::to_string(r);
        rel.schema = schemas[r];
        double cap = std::pow(static_cast<double>(p.domain), static_cast<double>(rel.arity()));
        int max_log = p.max_log_rows;
        while (max_log > 0 && std::exp2(max_log) > cap) --max_log;
        const std::size_t target = std::size_t{1} << uniform_int(rng, std::min(1, max_log), max_log);
        std::set<std::vector<Value>> rows;
        while (rows.size() < target) {
            std::vector<Value> t(rel.arity());
            for (auto& v : t) v = static_cast<Value>(uniform_int(rng, 0, p.domain - 1));
            rows.insert(t);
        }
        for (const auto& t : rows) rel.add_row(t);
        q.relations.push_back(std::move(rel));
    }
    std::vector<DegreeConstraint> declared;
    for (int c = 0; c < p.degree_constraints; ++c) {
        const Relation& rel = q.relations[uniform_int(rng, 0, p.relations - 1)];
        std::vector<int> s = rel.schema;
        AttrSet X = 0, Y = 0;
        if (p.acyclic) {
            std::sort(s.begin(), s.end(), [&](int a, int b) { return pos[a] < pos[b]; });
            const int split = uniform_int(rng, 1, static_cast<int>(s.size()) - 1);
            for (int i = 0; i < static_cast<int>(s.size()); ++i) (i < split ? X : Y) |= bit(s[i]);
            Y |= X;
        } else {
            std::shuffle(s.begin(), s.end(), rng);
            const int split = uniform_int(rng, 1, static_cast<int>(s.size()) - 1);
            for (int i = 0; i < split; ++i) X |= bit(s[i]);
            Y = rel.schema_mask();
        }
        declared.push_back({X, Y, next_power_of_two(std::max<std::uint64_t>(1, degree(rel, X, Y)))});
    }
    fx.dc = validate_and_close(q, declared);
    return fx;
}

ConstraintSet random_acyclic_constraints(Rng& rng, int k) {
    std::vector<int> perm(k);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<DegreeConstraint> list;
    AttrSet covered = 0;
    const AttrSet all = (AttrSet{1} << k) - 1;
    while (covered != all) {
        AttrSet Y = 0;
        const int size = uniform_int(rng, 1, std::min(3, k));
        while (popcount(Y) < size) Y |= bit(uniform_int(rng, 0, k - 1));
        covered |= Y;
        list.push_back({0, Y, std::uint64_t{1} << uniform_int(rng, 0, 10)});
    }
    const int extra = uniform_int(rng, 0, 4);
    for (int c = 0; c < extra && k >= 2; ++c) {
        const int size = uniform_int(rng, 2, std::min(4, k));
        const int start = uniform_int(rng, 0, k - size);
        std::vector<int> chosen(perm.begin() + start, perm.end());
        std::shuffle(chosen.begin() + 1, chosen.end(), rng);
        chosen.resize(size);
        std::sort(chosen.begin(), chosen.end(), [&](int a, int b) {
            return std::find(perm.begin(), perm.end(), a) < std::find(perm.begin(), perm.end(), b);
        });
        const int split = uniform_int(rng, 1, size - 1);
        AttrSet X = 0, Y = 0;
        for (int i = 0; i < size; ++i) (i < split ? X : Y) |= bit(chosen[i]);
        list.push_back({X, X | Y, std::uint64_t{1} << uniform_int(rng, 0, 6)});
    }
    return normalize_constraints(std::move(list));
}

std::vector<JoinFixture> small_join_fixtures() {
    std::vector<JoinFixture> out;
    // Triangle over the two orientations of a 4-cycle plus a chord: 8 rows per relation, power-of-two bounds.
    {
        JoinFixture fx;
        fx.name = "triangle";
        JoinQuery& q = fx.query;
        for (const char* a : {"A", "B", "C"}) q.ensure_attribute(a);
        for (int v = 0; v < 4; ++v) q.values.intern(std::to_string(v));
        const std::vector<Edge> und = {{0, 1}, {1, 2}, {2, 3}, {0, 2}};
        for (auto [x, y] : std::vector<Edge>{{0, 1}, {1, 2}, {0, 2}}) {
            Relation r;
            r.name = "R" + q.universe[x].name + q.universe[y].name;
            r.schema = {x, y};
            for (auto [u, v] : und) {
                r.add_row({static_cast<Value>(u), static_cast<Value>(v)});
                r.add_row({static_cast<Value>(v), static_cast<Value>(u)});
            }
            r.normalize();
            q.relations.push_back(std::move(r));
        }
        fx.dc = validate_and_close(q, {});
        out.push_back(std::move(fx));
    }
    // Path with a degree bound on the middle attribute.
    {
        JoinFixture fx;
        fx.name = "path";
        JoinQuery& q = fx.query;
        for (const char* a : {"A", "B", "C"}) q.ensure_attribute(a);
        for (int v = 0; v < 4; ++v) q.values.intern(std::to_string(v));
        Relation r{"R", {0, 1}, {}}, s{"S", {1, 2}, {}};
        for (auto [a, b] : std::vector<Edge>{{0, 0}, {1, 0}, {2, 1}, {3, 1}}) r.add_row({Value(a), Value(b)});
        for (auto [b, c] : std::vector<Edge>{{0, 0}, {0, 1}, {1, 2}, {1, 3}}) s.add_row({Value(b), Value(c)});
        q.relations = {r, s};
        fx.dc = validate_and_close(q, {{bit(1), bit(1) | bit(2), 2}});
        out.push_back(std::move(fx));
    }
    // Random fixtures, kept when the output is small and a single run succeeds often enough.
    Rng rng(20240611);
    int made = 0;
    for (int attempt = 0; attempt < 5000 && made < 10; ++attempt) {
        FixtureParams p;
        p.attributes = uniform_int(rng, 2, 4);
        p.relations = uniform_int(rng, 2, 3);
        p.domain = uniform_int(rng, 2, 4);
        p.max_log_rows = 3;
        p.degree_constraints = uniform_int(rng, 0, 2);
        JoinFixture fx = random_join_fixture(rng, p);
        const auto join = brute_force_join(fx.query);
        if (join.size() < 2 || join.size() > 50) continue;
        const SamplerState s = make_sampler(fx.query, fx.dc);
        if (join.size() * std::exp2(-s.log_inverse_tuple_probability()) < 0.02) continue;
        fx.name = "random" + std::to_string(made++);
        out.push_back(std::move(fx));
    }
    return out;
}

std::vector<BenchRow> bench_clique_union_triangle(std::uint64_t m, std::uint64_t lambda, std::uint64_t successes,
                                                  Rng& rng) {
    const UndirectedGraph G = gen_clique_union(m, lambda).graph;
    const UndirectedGraph tri = UndirectedGraph::from_edges(3, {{0, 1}, {0, 2}, {1, 2}});
    const std::string instance = "clique-union m=" + std::to_string(m) + " lambda=" + std::to_string(lambda);
    std::vector<BenchRow> rows;

    auto run = [&](const std::string& name, LogValue bound, auto&& attempt) {
        BenchRow row{instance, name, bound, 0, 0, 0, 0};
        const auto t0 = std::chrono::steady_clock::now();
        while (row.successes < successes) {
            ++row.attempts;
            if (attempt()) ++row.successes;
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        row.mean_attempts = static_cast<double>(row.attempts) / row.successes;
        row.samples_per_sec = secs > 0 ? row.successes / secs : 0;
        rows.push_back(row);
    };
    auto distinct = [](const Tuple& t) {
        return t[0] != t[1] && t[0] != t[2] && t[1] != t[2];
    };

    JoinQuery agm_query = undirected_companion_query(G, tri);
    const SamplerState agm = make_sampler(agm_query, validate_and_close(agm_query, {}));
    run("cardinality-only", agm.bound.log2, [&] {
        auto o = adc_sample(agm, rng);
        return o.success && distinct(o.tuple);
    });

    const DirectedGraph Gd = to_directed(G);
    const DirectedGraph Pd = to_directed(tri);
    const CompanionJoin cj = companion_join(Gd, Pd, lambda);
    const ConstraintSet reduced = acyclic_subset(Pd, Gd.edges.size(), lambda);
    const SamplerState deg = make_sampler(cj.query, validate_and_close(cj.query, reduced.constraints));
    run("degree-constrained", deg.bound.log2, [&] {
        auto o = adc_sample(deg, rng);
        return o.success && distinct(o.tuple);
    });

    const TreePlan plan = bfs_plan(tri);
    run("spanning-tree", log2_of(2 * G.edges.size() * lambda), [&] {
        std::uint64_t steps = 0;
        auto f = tree_attempt(G, plan, lambda, rng, steps);
        return f && is_occurrence(G, tri, *f);
    });
    return rows;
}

}  // namespace dcs
