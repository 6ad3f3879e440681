#include "dcs/undirected.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>

#include "dcs/error.hpp"
#include "dcs/instance_gen.hpp"

namespace dcs {

namespace {

void require_connected_pattern(const UndirectedGraph& P) {
    if (P.n < 2 || !P.connected()) throw SchemaError("pattern must be connected with at least 2 vertices");
    if (P.n > 8) throw TooLarge("patterns above 8 vertices are not supported");
}

void require_degree(const UndirectedGraph& G, std::uint64_t lambda) {
    if (static_cast<std::uint64_t>(G.max_degree()) > lambda)
        throw LambdaViolation("data graph has degree " + std::to_string(G.max_degree()) + " above λ = " +
                              std::to_string(lambda));
}

bool injective(const std::vector<int>& f) {
    std::vector<int> s = f;
    std::sort(s.begin(), s.end());
    return std::adjacent_find(s.begin(), s.end()) == s.end();
}

}  // namespace

TreePlan bfs_plan(const UndirectedGraph& P) {
    TreePlan t;
    t.parent.assign(P.n, -1);
    std::vector<char> seen(P.n, 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    while (!q.empty()) {
        int u = q.front();
        q.pop();
        t.order.push_back(u);
        for (int v : P.adj[u])
            if (!seen[v]) {
                seen[v] = 1;
                t.parent[v] = u;
                q.push(v);
            }
    }
    return t;
}

std::optional<std::vector<int>> tree_attempt(const UndirectedGraph& G, const TreePlan& t, std::uint64_t lambda, Rng& rng,
                                             std::uint64_t& steps) {
    const auto& edges = G.edges;
    auto [a, b] = edges[std::uniform_int_distribution<std::size_t>(0, edges.size() - 1)(rng)];
    if (rng() & 1) std::swap(a, b);
    std::vector<int> f(t.order.size(), -1);
    f[t.order[0]] = a;
    f[t.order[1]] = b;
    ++steps;
    for (std::size_t j = 2; j < t.order.size(); ++j) {
        const int v = t.order[j];
        const int host = f[t.parent[v]];
        const auto& nb = G.adj[host];
        ++steps;
        if (std::uniform_int_distribution<std::uint64_t>(0, lambda - 1)(rng) >= nb.size()) return std::nullopt;
        f[v] = nb[std::uniform_int_distribution<std::size_t>(0, nb.size() - 1)(rng)];
    }
    return f;
}

DirectedGraph to_directed(const UndirectedGraph& g) {
    std::vector<Edge> e;
    for (auto [u, v] : g.edges) {
        e.emplace_back(u, v);
        e.emplace_back(v, u);
    }
    auto d = DirectedGraph::from_edges(g.n, std::move(e));
    d.names = g.names;
    return d;
}

UndirectedGraph to_undirected(const DirectedGraph& g) {
    std::set<Edge> e;
    for (auto [u, v] : g.edges) e.emplace(std::min(u, v), std::max(u, v));
    auto u = UndirectedGraph::from_edges(g.n, {e.begin(), e.end()});
    u.names = g.names;
    return u;
}

Decomposition edge_cover_decomposition(const UndirectedGraph& P) {
    require_connected_pattern(P);
    LinearProgram<Rational> lp;
    lp.maximize = false;
    for (std::size_t e = 0; e < P.edges.size(); ++e) lp.add_variable(Rational(1));
    for (int v = 0; v < P.n; ++v) {
        std::vector<std::pair<int, Rational>> terms;
        for (std::size_t e = 0; e < P.edges.size(); ++e)
            if (P.edges[e].first == v || P.edges[e].second == v) terms.emplace_back(static_cast<int>(e), Rational(1));
        lp.add_row(std::move(terms), Sense::GE, Rational(1));
    }
    auto sol = solve_lp(lp);
    Decomposition d;
    d.edge_weight = sol.x;
    d.vertex_dual = sol.dual;
    d.rho = sol.value;
    const Rational half(1, 2);
    std::vector<std::vector<int>> full(P.n), halves(P.n);
    for (std::size_t e = 0; e < P.edges.size(); ++e) {
        auto [u, v] = P.edges[e];
        if (sol.x[e] == 1) {
            full[u].push_back(v);
            full[v].push_back(u);
        } else if (sol.x[e] == half) {
            halves[u].push_back(v);
            halves[v].push_back(u);
        } else if (sol.x[e] != 0) {
            throw std::logic_error("edge cover vertex is not half-integral");
        }
    }
    std::vector<char> used(P.n, 0);
    // Stars from weight-1 edges.
    for (int v = 0; v < P.n; ++v) {
        if (used[v] || full[v].empty()) continue;
        if (!halves[v].empty()) throw std::logic_error("weight-1 and weight-1/2 edges meet");
        Star s;
        if (full[v].size() >= 2) {
            s.center = v;
            s.petals = full[v];
        } else {
            int w = full[v][0];
            if (full[w].size() >= 2) {
                s.center = w;
                s.petals = full[w];
            } else {
                s.center = std::min(v, w);
                s.petals = {std::max(v, w)};
            }
        }
        std::sort(s.petals.begin(), s.petals.end());
        for (int p : s.petals)
            if (full[p].size() != 1 || !halves[p].empty()) throw std::logic_error("weight-1 edges do not form a star");
        used[s.center] = 1;
        for (int p : s.petals) used[p] = 1;
        d.stars.push_back(std::move(s));
    }
    std::sort(d.stars.begin(), d.stars.end(), [](const Star& a, const Star& b) {
        return std::min(a.center, a.petals.front()) < std::min(b.center, b.petals.front());
    });
    // Odd cycles from weight-1/2 edges.
    for (int v = 0; v < P.n; ++v) {
        if (used[v]) continue;
        if (halves[v].size() != 2) throw std::logic_error("weight-1/2 edges do not form cycles");
        std::vector<int> cyc{v};
        used[v] = 1;
        int prev = v, cur = std::min(halves[v][0], halves[v][1]);
        while (cur != v) {
            if (halves[cur].size() != 2 || used[cur]) throw std::logic_error("weight-1/2 edges do not form cycles");
            used[cur] = 1;
            cyc.push_back(cur);
            int nxt = halves[cur][0] == prev ? halves[cur][1] : halves[cur][0];
            prev = cur;
            cur = nxt;
        }
        if (cyc.size() % 2 == 0) throw std::logic_error("even cycle in the edge cover support");
        d.cycles.push_back(std::move(cyc));
    }
    d.alpha = static_cast<int>(d.cycles.size());
    d.beta = static_cast<int>(d.stars.size());
    for (const auto& c : d.cycles) d.k_cycle += static_cast<int>(c.size());
    for (const auto& s : d.stars) d.k_star += 1 + static_cast<int>(s.petals.size());
    if (d.rho != Rational(d.k_cycle) / 2 + d.k_star - d.beta) throw std::logic_error("decomposition does not attain the cover number");
    return d;
}

LogValue polymat_undir(std::uint64_t m, std::uint64_t lambda, const UndirectedGraph& P) {
    return polymat_undir(m, lambda, P, edge_cover_decomposition(P));
}

LogValue polymat_undir(std::uint64_t m, std::uint64_t lambda, const UndirectedGraph& P, const Decomposition& d) {
    Rational a, b;
    if (static_cast<unsigned __int128>(lambda) * lambda <= m) {
        a = 1;
        b = P.n - 2;
    } else {
        a = Rational(d.k_cycle) / 2 + d.beta;
        b = d.k_star - 2 * d.beta;
    }
    if (is_power_of_two(m) && is_power_of_two(lambda))
        return LogValue::of(Rational(a * __builtin_ctzll(m) + b * __builtin_ctzll(lambda)));
    return LogValue::of(a.get_d() * std::log2(static_cast<double>(m)) + b.get_d() * std::log2(static_cast<double>(lambda)));
}

SetFunction construct_h_star(std::uint64_t m, std::uint64_t lambda, const UndirectedGraph& P, const Decomposition& d) {
    if (P.n > 20) throw TooLarge("set function over more than 20 vertices");
    const bool exact = is_power_of_two(m) && is_power_of_two(lambda);
    const Rational lm = exact ? Rational(__builtin_ctzll(m)) : Rational(std::log2(static_cast<double>(m)));
    const Rational ll = exact ? Rational(__builtin_ctzll(lambda)) : Rational(std::log2(static_cast<double>(lambda)));
    auto make = [&](const Rational& q) { return exact ? LogValue::of(q) : LogValue::of(q.get_d()); };
    SetFunction h;
    h.k = P.n;
    h.h.resize(std::size_t{1} << P.n);
    const bool small_lambda = static_cast<unsigned __int128>(lambda) * lambda <= m;
    std::vector<Rational> weight(P.n);
    if (!small_lambda) {
        const auto pack = vertex_pack_half_integral(P, d);
        for (int v = 0; v < P.n; ++v) {
            if (pack.nu[v] == 1)
                weight[v] = ll;
            else if (pack.nu[v] == 0)
                weight[v] = lm - ll;
            else
                weight[v] = lm / 2;
        }
    }
    for (AttrSet X = 0; X < (AttrSet{1} << P.n); ++X) {
        Rational v = 0;
        if (X != 0) {
            if (small_lambda) {
                v = lm + (popcount(X) - 2) * ll;
            } else {
                for (int a : members(X)) v += weight[a];
            }
        }
        h.h[X] = make(v);
    }
    return h;
}

JoinQuery undirected_companion_query(const UndirectedGraph& G, const UndirectedGraph& P) {
    JoinQuery q;
    for (int v = 0; v < P.n; ++v) q.ensure_attribute(P.name(v));
    for (int v = 0; v < G.n; ++v) q.values.intern(G.name(v));
    for (auto [x, y] : P.edges) {
        Relation r;
        r.name = "R_" + P.name(x) + "_" + P.name(y);
        r.schema = {x, y};
        for (auto [u, v] : G.edges) {
            r.add_row({static_cast<Value>(u), static_cast<Value>(v)});
            r.add_row({static_cast<Value>(v), static_cast<Value>(u)});
        }
        r.normalize();
        q.relations.push_back(std::move(r));
    }
    return q;
}

std::optional<Occurrence> spanning_tree_sample(const UndirectedGraph& G, const UndirectedGraph& P, std::uint64_t lambda,
                                               Rng& rng) {
    if (G.edges.empty() || P.n < 2) return std::nullopt;
    std::uint64_t steps = 0;
    auto f = tree_attempt(G, bfs_plan(P), lambda, rng, steps);
    if (!f || !is_occurrence(G, P, *f)) return std::nullopt;
    return Occurrence{std::move(*f)};
}

std::vector<int> random_isomorphism_bijection(const UndirectedGraph& component, const std::vector<int>& f, Rng& rng) {
    auto autos = automorphisms(component);
    const auto& sigma = autos[std::uniform_int_distribution<std::size_t>(0, autos.size() - 1)(rng)];
    std::vector<int> g(f.size());
    for (std::size_t j = 0; j < f.size(); ++j) g[j] = f[sigma[j]];
    return g;
}

std::vector<Component> decomposition_components(const Decomposition& d) {
    std::vector<Component> out;
    for (const auto& c : d.cycles) {
        Component comp;
        comp.cycle = true;
        comp.vertices = c;
        std::vector<Edge> e;
        for (std::size_t j = 0; j < c.size(); ++j) {
            int a = static_cast<int>(j), b = static_cast<int>((j + 1) % c.size());
            e.emplace_back(std::min(a, b), std::max(a, b));
        }
        comp.graph = UndirectedGraph::from_edges(static_cast<int>(c.size()), std::move(e));
        out.push_back(std::move(comp));
    }
    for (const auto& s : d.stars) {
        Component comp;
        comp.vertices.push_back(s.center);
        comp.vertices.insert(comp.vertices.end(), s.petals.begin(), s.petals.end());
        std::vector<Edge> e;
        for (std::size_t j = 1; j < comp.vertices.size(); ++j) e.emplace_back(0, static_cast<int>(j));
        comp.graph = UndirectedGraph::from_edges(static_cast<int>(comp.vertices.size()), std::move(e));
        out.push_back(std::move(comp));
    }
    return out;
}

UndirectedOccurrenceSampler::UndirectedOccurrenceSampler(const UndirectedGraph& G, const UndirectedGraph& P,
                                                         std::uint64_t lambda)
    : G_(G), P_(P), lambda_(lambda) {
    require_connected_pattern(P);
    require_degree(G, lambda);
    std::vector<int> order(P.n);
    for (int v = 0; v < P.n; ++v) order[v] = v;
    enumeration_plan_ = make_join_plan(undirected_companion_query(G, P), order);
    if (G.edges.empty()) {
        empty_ = true;
        return;
    }
    const std::uint64_t m = G.edges.size();
    spanning_ = static_cast<unsigned __int128>(lambda) * lambda <= m;
    plan_ = bfs_plan(P);
    decomposition_ = edge_cover_decomposition(P);
    components_ = decomposition_components(decomposition_);
    for (const auto& c : components_) {
        component_plans_.push_back(bfs_plan(c.graph));
        if (!c.cycle) {
            cycle_states_.emplace_back();
            continue;
        }
        JoinQuery q = undirected_companion_query(G, c.graph);
        cycle_states_.emplace_back(make_sampler(q, validate_and_close(q, {})));
    }
}

std::optional<Occurrence> UndirectedOccurrenceSampler::composite_attempt(Rng& rng, std::uint64_t& steps) const {
    if (empty_) return std::nullopt;
    std::vector<int> f(P_.n, -1);
    for (std::size_t c = 0; c < components_.size(); ++c) {
        const auto& comp = components_[c];
        std::vector<int> local;
        if (comp.cycle) {
            auto o = adc_sample(*cycle_states_[c], rng);
            steps += o.steps;
            if (!o.success) return std::nullopt;
            local.assign(o.tuple.begin(), o.tuple.end());
            if (!injective(local)) return std::nullopt;
        } else {
            auto g = tree_attempt(G_, component_plans_[c], lambda_, rng, steps);
            if (!g || !is_occurrence(G_, comp.graph, *g)) return std::nullopt;
            local = std::move(*g);
        }
        local = random_isomorphism_bijection(comp.graph, local, rng);
        for (std::size_t j = 0; j < local.size(); ++j) f[comp.vertices[j]] = local[j];
    }
    if (!is_occurrence(G_, P_, f)) return std::nullopt;
    return Occurrence{std::move(f)};
}

std::optional<Occurrence> UndirectedOccurrenceSampler::attempt(Rng& rng, std::uint64_t& steps) const {
    if (empty_) return std::nullopt;
    if (!spanning_) return composite_attempt(rng, steps);
    auto f = tree_attempt(G_, plan_, lambda_, rng, steps);
    if (!f || !is_occurrence(G_, P_, *f)) return std::nullopt;
    return Occurrence{std::move(*f)};
}

std::optional<Occurrence> UndirectedOccurrenceSampler::sample(Rng& rng, const RaceOptions& opt) const {
    if (empty_) return std::nullopt;
    JoinEnumerator e(enumeration_plan_);
    std::vector<Occurrence> found;
    bool collected = false;
    Contest<Occurrence> contest;
    contest.attempt = [&](Rng& r, std::uint64_t& steps) { return attempt(r, steps); };
    contest.enumerate = [&](std::uint64_t budget) { return e.step(budget); };
    contest.pick = [&](Rng& r) -> std::optional<Occurrence> {
        if (!collected) {
            std::set<OccurrenceKey> keys;
            for (const auto& t : e.results()) {
                std::vector<int> f(t.begin(), t.end());
                if (!is_occurrence(G_, P_, f)) continue;
                if (keys.insert(occurrence_key(P_, f)).second) found.push_back({f});
            }
            collected = true;
        }
        if (found.empty()) return std::nullopt;
        return found[std::uniform_int_distribution<std::size_t>(0, found.size() - 1)(r)];
    };
    return run_race(contest, rng, opt).value;
}

std::optional<Occurrence> sample_occurrence_undirected(const UndirectedGraph& G, const UndirectedGraph& P,
                                                       std::uint64_t lambda, Rng& rng, const RaceOptions& opt) {
    UndirectedOccurrenceSampler s(G, P, lambda);
    return s.sample(rng, opt);
}

}  // namespace dcs
