#include "dcs/directed.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include "dcs/error.hpp"

namespace dcs {

namespace {

bool lambda_squared_exceeds_m(std::uint64_t m, std::uint64_t lambda) {
    return static_cast<unsigned __int128>(lambda) * lambda > m;
}

Rational log_coefficient(std::uint64_t N) {
    if (is_power_of_two(N)) return Rational(__builtin_ctzll(N));
    return Rational(std::log2(static_cast<double>(N)));
}

void require_pattern(const DirectedGraph& P) {
    if (P.n < 2 || !P.weakly_connected()) throw SchemaError("pattern must be weakly connected with at least 2 vertices");
    if (P.n > kMaxAttributes) throw TooLarge("pattern too large");
}

}  // namespace

ConstraintSet pattern_constraints(const DirectedGraph& P, std::uint64_t m, std::uint64_t lambda) {
    std::vector<DegreeConstraint> list;
    for (auto [x, y] : P.edges) {
        list.push_back({0, bit(x) | bit(y), std::max<std::uint64_t>(1, m)});
        list.push_back({bit(x), bit(x) | bit(y), std::max<std::uint64_t>(1, lambda)});
    }
    return normalize_constraints(std::move(list));
}

CompanionJoin companion_join(const DirectedGraph& G, const DirectedGraph& P, std::uint64_t lambda) {
    if (static_cast<std::uint64_t>(G.max_out_degree()) > lambda)
        throw LambdaViolation("data graph has out-degree " + std::to_string(G.max_out_degree()) + " above λ = " +
                              std::to_string(lambda));
    CompanionJoin cj;
    for (int v = 0; v < P.n; ++v) cj.query.ensure_attribute(P.name(v));
    for (int v = 0; v < G.n; ++v) cj.query.values.intern(G.name(v));
    for (auto [x, y] : P.edges) {
        Relation r;
        r.name = "R_" + P.name(x) + "_" + P.name(y);
        r.schema = {x, y};
        for (auto [u, v] : G.edges) r.add_row({static_cast<Value>(u), static_cast<Value>(v)});
        cj.query.relations.push_back(std::move(r));
    }
    cj.dc = validate_and_close(cj.query, pattern_constraints(P, G.edges.size(), lambda).constraints);
    return cj;
}

LpPlusSolution lp_plus(const DirectedGraph& P, std::uint64_t m, std::uint64_t lambda) {
    require_pattern(P);
    const Rational lm = log_coefficient(m), ll = log_coefficient(lambda);
    LinearProgram<Rational> lp;
    lp.maximize = false;
    for (std::size_t e = 0; e < P.edges.size(); ++e) {
        lp.add_variable(lm);
        lp.add_variable(ll);
    }
    for (int a = 0; a < P.n; ++a) {
        std::vector<std::pair<int, Rational>> terms;
        for (std::size_t e = 0; e < P.edges.size(); ++e) {
            auto [x, y] = P.edges[e];
            if (y == a) {
                terms.emplace_back(2 * static_cast<int>(e), Rational(1));
                terms.emplace_back(2 * static_cast<int>(e) + 1, Rational(1));
            }
            if (x == a) terms.emplace_back(2 * static_cast<int>(e), Rational(1));
        }
        lp.add_row(std::move(terms), Sense::GE, Rational(1));
    }
    auto sol = solve_lp(lp);
    LpPlusSolution out;
    for (std::size_t e = 0; e < P.edges.size(); ++e) {
        out.x.push_back(sol.x[2 * e]);
        out.z.push_back(sol.x[2 * e + 1]);
    }
    out.objective = lp_plus_objective(out, m, lambda);
    return out;
}

LogValue lp_plus_objective(const LpPlusSolution& s, std::uint64_t m, std::uint64_t lambda) {
    Rational sx = 0, sz = 0;
    for (const auto& v : s.x) sx += v;
    for (const auto& v : s.z) sz += v;
    if (is_power_of_two(m) && is_power_of_two(lambda))
        return LogValue::of(Rational(sx * log_coefficient(m) + sz * log_coefficient(lambda)));
    return LogValue::of(sx.get_d() * std::log2(static_cast<double>(m)) + sz.get_d() * std::log2(static_cast<double>(lambda)));
}

bool lp_plus_feasible(const DirectedGraph& P, const LpPlusSolution& s) {
    std::vector<Rational> cover(P.n, Rational(0));
    for (std::size_t e = 0; e < P.edges.size(); ++e) {
        if (sgn(s.x[e]) < 0 || sgn(s.z[e]) < 0) return false;
        auto [x, y] = P.edges[e];
        cover[y] += s.x[e] + s.z[e];
        cover[x] += s.x[e];
    }
    for (const auto& c : cover)
        if (c < 1) return false;
    return true;
}

LpPlusSolution acyclicize(const DirectedGraph& P, LpPlusSolution s, int* rewrites) {
    int count = 0;
    for (;;) {
        // Find a cycle in the z-support, as a list of edge indices.
        std::vector<std::vector<std::pair<int, int>>> out(P.n);  // (head, edge index)
        for (std::size_t e = 0; e < P.edges.size(); ++e)
            if (sgn(s.z[e]) > 0) out[P.edges[e].first].emplace_back(P.edges[e].second, static_cast<int>(e));
        std::vector<int> state(P.n, 0), via;
        std::vector<int> cycle;
        std::vector<int> path_vertices;
        std::function<bool(int)> dfs = [&](int u) {
            state[u] = 1;
            path_vertices.push_back(u);
            for (auto [v, e] : out[u]) {
                if (state[v] == 1) {
                    auto it = std::find(path_vertices.begin(), path_vertices.end(), v);
                    std::size_t start = it - path_vertices.begin();
                    cycle.assign(via.begin() + start, via.end());
                    cycle.push_back(e);
                    return true;
                }
                if (state[v] == 0) {
                    via.push_back(e);
                    if (dfs(v)) return true;
                    via.pop_back();
                }
            }
            path_vertices.pop_back();
            state[u] = 2;
            return false;
        };
        bool found = false;
        for (int u = 0; u < P.n && !found; ++u)
            if (state[u] == 0) found = dfs(u);
        if (!found) break;
        // Edge with the least z on the cycle, then the cycle edge leaving its head.
        std::size_t best = 0;
        for (std::size_t j = 1; j < cycle.size(); ++j) {
            const Rational& a = s.z[cycle[j]];
            const Rational& b = s.z[cycle[best]];
            if (a < b || (a == b && cycle[j] < cycle[best])) best = j;
        }
        const int e12 = cycle[best];
        const int e23 = cycle[(best + 1) % cycle.size()];
        const Rational moved = s.z[e12];
        s.x[e23] += moved;
        s.z[e23] -= moved;
        s.z[e12] = 0;
        ++count;
    }
    if (rewrites) *rewrites = count;
    return s;
}

LpPlusSolution lp_plus_acyclicize(const DirectedGraph& P, std::uint64_t m, std::uint64_t lambda) {
    auto s = acyclicize(P, lp_plus(P, m, lambda));
    s.objective = lp_plus_objective(s, m, lambda);
    return s;
}

StarCoverConstruction scc_star_cover_construction(const DirectedGraph& P) {
    require_pattern(P);
    const int k = P.n;
    StarCoverConstruction sc;

    // Kosaraju, then number components by their smallest vertex.
    std::vector<int> finish;
    std::vector<char> seen(k, 0);
    std::function<void(int)> dfs1 = [&](int u) {
        seen[u] = 1;
        for (int v : P.out[u])
            if (!seen[v]) dfs1(v);
        finish.push_back(u);
    };
    for (int u = 0; u < k; ++u)
        if (!seen[u]) dfs1(u);
    std::vector<int> raw(k, -1);
    int ncomp = 0;
    std::function<void(int, int)> dfs2 = [&](int u, int c) {
        raw[u] = c;
        for (int v : P.in[u])
            if (raw[v] < 0) dfs2(v, c);
    };
    for (auto it = finish.rbegin(); it != finish.rend(); ++it)
        if (raw[*it] < 0) dfs2(*it, ncomp++);
    std::vector<int> relabel(ncomp, -1);
    int next = 0;
    for (int u = 0; u < k; ++u)
        if (relabel[raw[u]] < 0) relabel[raw[u]] = next++;
    sc.scc_of.resize(k);
    sc.sccs.assign(ncomp, {});
    for (int u = 0; u < k; ++u) {
        sc.scc_of[u] = relabel[raw[u]];
        sc.sccs[sc.scc_of[u]].push_back(u);
    }
    sc.source_scc.assign(ncomp, 1);
    for (auto [u, v] : P.edges)
        if (sc.scc_of[u] != sc.scc_of[v]) sc.source_scc[sc.scc_of[v]] = 0;

    std::vector<char> inS(k, 0), inT(k, 0);
    for (int u = 0; u < k; ++u)
        if (sc.source_scc[sc.scc_of[u]] && sc.sccs[sc.scc_of[u]].size() == 1) inS[u] = 1;
    for (auto [u, v] : P.edges)
        if (inS[u]) inT[v] = 1;
    for (int u = 0; u < k; ++u) {
        if (inS[u]) sc.S.push_back(u);
        if (inT[u]) sc.T.push_back(u);
    }
    for (int c = 0; c < ncomp; ++c)
        if (sc.source_scc[c] && sc.sccs[c].size() > 1) {
            ++sc.c1;
            sc.n1 += static_cast<int>(sc.sccs[c].size());
        }
    sc.n2 = k - sc.n1 - static_cast<int>(sc.S.size()) - static_cast<int>(sc.T.size());

    // Minimum star cover of the S-T bipartite graph by exhaustive search: fewest edges, then smallest mask.
    std::vector<Edge> bip;
    for (auto [u, v] : P.edges)
        if (inS[u] && inT[v]) bip.emplace_back(u, v);
    if (bip.size() > 20) throw TooLarge("star cover search space too large");
    std::uint64_t best_mask = 0;
    int best_size = -1;
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << bip.size()) && !bip.empty(); ++mask) {
        int size = __builtin_popcountll(mask);
        if (best_size >= 0 && size >= best_size) continue;
        std::vector<int> deg(k, 0);
        for (std::size_t e = 0; e < bip.size(); ++e)
            if (mask >> e & 1) {
                ++deg[bip[e].first];
                ++deg[bip[e].second];
            }
        bool ok = true;
        for (int u = 0; u < k && ok; ++u)
            if ((inS[u] || inT[u]) && deg[u] == 0) ok = false;
        for (std::size_t e = 0; e < bip.size() && ok; ++e)
            if ((mask >> e & 1) && deg[bip[e].first] > 1 && deg[bip[e].second] > 1) ok = false;
        if (ok) {
            best_mask = mask;
            best_size = size;
        }
    }
    if (!bip.empty()) {
        std::vector<int> deg(k, 0);
        std::vector<Edge> chosen;
        for (std::size_t e = 0; e < bip.size(); ++e)
            if (best_mask >> e & 1) {
                chosen.push_back(bip[e]);
                ++deg[bip[e].first];
                ++deg[bip[e].second];
            }
        std::map<int, std::vector<int>> stars;  // center -> petals
        for (auto [s, t] : chosen) {
            if (deg[s] > 1)
                stars[s].push_back(t);
            else if (deg[t] > 1)
                stars[t].push_back(s);
            else
                stars[s].push_back(t);  // one-edge star, centred on its S end
        }
        for (auto& [center, petals] : stars) {
            std::sort(petals.begin(), petals.end());
            sc.cover.push_back({center, petals});
            if (inS[center]) {
                sc.S1.push_back(center);
                for (int p : petals) sc.T1.push_back(p);
            } else {
                sc.T2.push_back(center);
                for (int p : petals) sc.S2.push_back(p);
            }
        }
        for (auto* v : {&sc.S1, &sc.S2, &sc.T1, &sc.T2}) std::sort(v->begin(), v->end());
    }

    // Skeleton and DC′ rules.
    for (const auto& st : sc.cover) {
        if (inS[st.center]) {
            for (int p : st.petals) sc.skeleton.emplace_back(st.center, p);
            sc.dual_cardinality.emplace_back(st.center, st.petals.front());
            for (std::size_t j = 1; j < st.petals.size(); ++j) sc.lambda_edges.emplace_back(st.center, st.petals[j]);
        } else {
            for (int p : st.petals) {
                sc.skeleton.emplace_back(p, st.center);
                sc.dual_cardinality.emplace_back(p, st.center);
            }
        }
    }
    // BFS inside component c from the given roots; returns the tree edges.
    auto bfs_tree = [&](int c, const std::vector<int>& roots) {
        std::vector<Edge> tree;
        std::vector<char> reached(k, 0);
        std::queue<int> q;
        for (int r : roots) {
            reached[r] = 1;
            q.push(r);
        }
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int v : P.out[u])
                if (sc.scc_of[v] == c && !reached[v]) {
                    reached[v] = 1;
                    tree.emplace_back(u, v);
                    q.push(v);
                }
        }
        return tree;
    };
    // Condensation order, smallest component id first among ready ones.
    std::vector<std::set<int>> cout_(ncomp);
    std::vector<int> indeg(ncomp, 0);
    for (auto [u, v] : P.edges) {
        int a = sc.scc_of[u], b = sc.scc_of[v];
        if (a != b && cout_[a].insert(b).second) ++indeg[b];
    }
    std::priority_queue<int, std::vector<int>, std::greater<>> ready;
    for (int c = 0; c < ncomp; ++c)
        if (indeg[c] == 0) ready.push(c);
    std::vector<int> comp_order;
    while (!ready.empty()) {
        int c = ready.top();
        ready.pop();
        comp_order.push_back(c);
        for (int d : cout_[c])
            if (--indeg[d] == 0) ready.push(d);
    }
    for (int c : comp_order) {
        const auto& members = sc.sccs[c];
        if (sc.source_scc[c]) {
            if (members.size() == 1) continue;
            auto tree = bfs_tree(c, {members.front()});
            sc.skeleton.insert(sc.skeleton.end(), tree.begin(), tree.end());
            sc.dual_cardinality.push_back(tree.front());  // root's smallest child
            for (std::size_t j = 1; j < tree.size(); ++j) sc.lambda_edges.push_back(tree[j]);
            continue;
        }
        std::vector<int> roots;
        for (int u : members)
            if (inT[u]) roots.push_back(u);
        if (roots.empty()) {
            for (auto [u, v] : P.edges)
                if (sc.scc_of[u] != c && sc.scc_of[v] == c) {
                    sc.skeleton.emplace_back(u, v);
                    sc.lambda_edges.emplace_back(u, v);
                    roots.push_back(v);
                    break;
                }
        }
        auto tree = bfs_tree(c, roots);
        sc.skeleton.insert(sc.skeleton.end(), tree.begin(), tree.end());
        sc.lambda_edges.insert(sc.lambda_edges.end(), tree.begin(), tree.end());
    }
    // Join leftover weak components with forward edges between components.
    std::vector<int> parent(k);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (auto [u, v] : sc.skeleton) parent[find(u)] = find(v);
    for (auto [u, v] : P.edges)
        if (sc.scc_of[u] != sc.scc_of[v] && find(u) != find(v)) {
            parent[find(u)] = find(v);
            sc.skeleton.emplace_back(u, v);
        }
    std::sort(sc.skeleton.begin(), sc.skeleton.end());
    std::sort(sc.lambda_edges.begin(), sc.lambda_edges.end());
    std::sort(sc.dual_cardinality.begin(), sc.dual_cardinality.end());
    return sc;
}

LogValue closed_form_dir(const StarCoverConstruction& sc, std::uint64_t m, std::uint64_t lambda) {
    const long a = sc.c1 + static_cast<long>(sc.S.size());
    const long b = sc.n1 + sc.n2 + static_cast<long>(sc.T1.size()) - 2L * sc.c1 - static_cast<long>(sc.S1.size());
    if (is_power_of_two(m) && is_power_of_two(lambda))
        return LogValue::of(Rational(a * __builtin_ctzll(m) + b * __builtin_ctzll(lambda)));
    return LogValue::of(a * std::log2(static_cast<double>(m)) + b * std::log2(static_cast<double>(lambda)));
}

std::pair<ConstraintSet, std::vector<Rational>> star_cover_dc(const DirectedGraph& P, const StarCoverConstruction& sc,
                                                             std::uint64_t m, std::uint64_t lambda) {
    std::vector<DegreeConstraint> list;
    for (auto [x, y] : P.edges) list.push_back({0, bit(x) | bit(y), std::max<std::uint64_t>(1, m)});
    for (auto [x, y] : sc.lambda_edges) list.push_back({bit(x), bit(x) | bit(y), std::max<std::uint64_t>(1, lambda)});
    ConstraintSet dc = normalize_constraints(std::move(list));
    std::vector<Rational> delta(dc.size(), Rational(0));
    for (std::size_t i = 0; i < dc.size(); ++i) {
        const auto& c = dc.constraints[i];
        if (!c.is_cardinality()) {
            delta[i] = 1;
            continue;
        }
        for (auto [x, y] : sc.dual_cardinality)
            if (c.Y == (bit(x) | bit(y))) delta[i] = 1;
    }
    return {dc, delta};
}

ConstraintSet acyclic_subset(const DirectedGraph& P, std::uint64_t m, std::uint64_t lambda) {
    require_pattern(P);
    ConstraintSet full = pattern_constraints(P, m, lambda);
    if (dependency_graph(full, P.n).acyclic) return full;
    if (lambda_squared_exceeds_m(m, lambda)) {
        auto sol = lp_plus_acyclicize(P, m, lambda);
        std::vector<DegreeConstraint> list;
        for (std::size_t e = 0; e < P.edges.size(); ++e) {
            auto [x, y] = P.edges[e];
            list.push_back({0, bit(x) | bit(y), std::max<std::uint64_t>(1, m)});
            if (sgn(sol.z[e]) > 0) list.push_back({bit(x), bit(x) | bit(y), std::max<std::uint64_t>(1, lambda)});
        }
        return normalize_constraints(std::move(list));
    }
    return star_cover_dc(P, scc_star_cover_construction(P), m, lambda).first;
}

LogValue polymat_dir(std::uint64_t m, std::uint64_t lambda, const DirectedGraph& P) {
    if (lambda < 1 || lambda > m) throw std::invalid_argument("polymat_dir needs 1 <= λ <= m");
    return polymat_acyclic(acyclic_subset(P, m, lambda), P.n).log2;
}

DirectedOccurrenceSampler::DirectedOccurrenceSampler(const DirectedGraph& G, const DirectedGraph& P, std::uint64_t lambda)
    : G_(G), P_(P) {
    require_pattern(P);
    auto cj = companion_join(G, P, lambda);
    if (G.edges.empty()) return;
    auto reduced = acyclic_subset(P, G.edges.size(), lambda);
    state_ = make_sampler(cj.query, validate_and_close(cj.query, reduced.constraints));
}

std::optional<Occurrence> DirectedOccurrenceSampler::attempt(Rng& rng, std::uint64_t& steps) const {
    if (!state_) return std::nullopt;
    auto o = adc_sample(*state_, rng);
    steps += o.steps;
    if (!o.success) return std::nullopt;
    std::vector<int> f(o.tuple.begin(), o.tuple.end());
    std::vector<int> sorted = f;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return std::nullopt;
    return Occurrence{std::move(f)};
}

std::optional<Occurrence> DirectedOccurrenceSampler::sample(Rng& rng, const RaceOptions& opt) const {
    if (!state_) return std::nullopt;
    JoinEnumerator e(state_->plan);
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

std::optional<Occurrence> sample_occurrence_directed(const DirectedGraph& G, const DirectedGraph& P, std::uint64_t lambda,
                                                     Rng& rng, const RaceOptions& opt) {
    DirectedOccurrenceSampler s(G, P, lambda);
    return s.sample(rng, opt);
}

}  // namespace dcs
