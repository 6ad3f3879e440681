#include "dcs/graph.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "dcs/error.hpp"

namespace dcs {

DirectedGraph DirectedGraph::from_edges(int n, std::vector<Edge> edges) {
    DirectedGraph g;
    g.n = n;
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    g.out.assign(n, {});
    g.in.assign(n, {});
    for (auto [u, v] : edges) {
        if (u < 0 || v < 0 || u >= n || v >= n) throw InputError("edge endpoint out of range");
        if (u == v) throw InputError("self-loop on vertex " + std::to_string(u));
        g.out[u].push_back(v);
        g.in[v].push_back(u);
        g.edge_set_.insert(edge_code(u, v));
    }
    g.edges = std::move(edges);
    return g;
}

int DirectedGraph::max_out_degree() const {
    int d = 0;
    for (const auto& o : out) d = std::max(d, static_cast<int>(o.size()));
    return d;
}

bool DirectedGraph::weakly_connected() const {
    if (n == 0) return false;
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    int comps = n;
    for (auto [u, v] : edges) {
        int a = find(u), b = find(v);
        if (a != b) {
            parent[a] = b;
            --comps;
        }
    }
    return comps == 1;
}

UndirectedGraph UndirectedGraph::from_edges(int n, std::vector<Edge> edges) {
    UndirectedGraph g;
    g.n = n;
    for (auto& [u, v] : edges) {
        if (u < 0 || v < 0 || u >= n || v >= n) throw InputError("edge endpoint out of range");
        if (u == v) throw InputError("self-loop on vertex " + std::to_string(u));
        if (u > v) std::swap(u, v);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    g.adj.assign(n, {});
    for (auto [u, v] : edges) {
        g.adj[u].push_back(v);
        g.adj[v].push_back(u);
        g.edge_set_.insert(edge_code(u, v));
    }
    for (auto& a : g.adj) std::sort(a.begin(), a.end());
    g.edges = std::move(edges);
    return g;
}

int UndirectedGraph::max_degree() const {
    int d = 0;
    for (const auto& a : adj) d = std::max(d, static_cast<int>(a.size()));
    return d;
}

bool UndirectedGraph::connected() const {
    if (n == 0) return false;
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : adj[u])
            if (!seen[v]) {
                seen[v] = 1;
                ++count;
                stack.push_back(v);
            }
    }
    return count == n;
}

OccurrenceKey occurrence_key(const DirectedGraph& P, const std::vector<int>& f) {
    OccurrenceKey key;
    for (auto [u, v] : P.edges) key.emplace_back(f[u], f[v]);
    std::sort(key.begin(), key.end());
    return key;
}

OccurrenceKey occurrence_key(const UndirectedGraph& P, const std::vector<int>& f) {
    OccurrenceKey key;
    for (auto [u, v] : P.edges) key.emplace_back(std::min(f[u], f[v]), std::max(f[u], f[v]));
    std::sort(key.begin(), key.end());
    return key;
}

namespace {

bool injective(const std::vector<int>& f) {
    std::vector<int> s = f;
    std::sort(s.begin(), s.end());
    return std::adjacent_find(s.begin(), s.end()) == s.end();
}

template <class G>
std::vector<std::vector<int>> automorphisms_impl(const G& P) {
    if (P.n > 8) throw TooLarge("automorphism search supports at most 8 vertices");
    std::vector<int> perm(P.n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<std::vector<int>> out;
    do {
        bool ok = true;
        for (auto [u, v] : P.edges)
            if (!P.has_edge(perm[u], perm[v])) {
                ok = false;
                break;
            }
        if (ok) out.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

template <class G>
std::vector<Edge> canonical_impl(const G& P, bool directed) {
    std::vector<int> perm(P.n);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<Edge> best;
    bool first = true;
    do {
        std::vector<Edge> e;
        for (auto [u, v] : P.edges) {
            int a = perm[u], b = perm[v];
            if (!directed && a > b) std::swap(a, b);
            e.emplace_back(a, b);
        }
        std::sort(e.begin(), e.end());
        if (first || e < best) {
            best = std::move(e);
            first = false;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

}  // namespace

bool is_occurrence(const DirectedGraph& G, const DirectedGraph& P, const std::vector<int>& f) {
    if (static_cast<int>(f.size()) != P.n || !injective(f)) return false;
    for (int x : f)
        if (x < 0 || x >= G.n) return false;
    for (auto [u, v] : P.edges)
        if (!G.has_edge(f[u], f[v])) return false;
    return true;
}

bool is_occurrence(const UndirectedGraph& G, const UndirectedGraph& P, const std::vector<int>& f) {
    if (static_cast<int>(f.size()) != P.n || !injective(f)) return false;
    for (int x : f)
        if (x < 0 || x >= G.n) return false;
    for (auto [u, v] : P.edges)
        if (!G.has_edge(f[u], f[v])) return false;
    return true;
}

std::vector<std::vector<int>> automorphisms(const DirectedGraph& P) { return automorphisms_impl(P); }
std::vector<std::vector<int>> automorphisms(const UndirectedGraph& P) { return automorphisms_impl(P); }
std::size_t automorphism_count(const DirectedGraph& P) { return automorphisms(P).size(); }
std::size_t automorphism_count(const UndirectedGraph& P) { return automorphisms(P).size(); }

std::vector<Edge> canonical_form(const DirectedGraph& P) { return canonical_impl(P, true); }
std::vector<Edge> canonical_form(const UndirectedGraph& P) { return canonical_impl(P, false); }

std::vector<DirectedGraph> all_weakly_connected_digraphs(int k) {
    std::vector<Edge> pairs;
    for (int u = 0; u < k; ++u)
        for (int v = u + 1; v < k; ++v) pairs.emplace_back(u, v);
    std::set<std::vector<Edge>> seen;
    std::vector<DirectedGraph> out;
    std::size_t total = 1;
    for (std::size_t i = 0; i < pairs.size(); ++i) total *= 4;
    for (std::size_t code = 0; code < total; ++code) {
        std::vector<Edge> e;
        std::size_t c = code;
        for (auto [u, v] : pairs) {
            int s = static_cast<int>(c % 4);
            c /= 4;
            if (s & 1) e.emplace_back(u, v);
            if (s & 2) e.emplace_back(v, u);
        }
        auto g = DirectedGraph::from_edges(k, e);
        if (!g.weakly_connected()) continue;
        if (seen.insert(canonical_form(g)).second) out.push_back(std::move(g));
    }
    return out;
}

std::vector<UndirectedGraph> all_connected_graphs(int k) {
    std::vector<Edge> pairs;
    for (int u = 0; u < k; ++u)
        for (int v = u + 1; v < k; ++v) pairs.emplace_back(u, v);
    std::set<std::vector<Edge>> seen;
    std::vector<UndirectedGraph> out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << pairs.size()); ++mask) {
        std::vector<Edge> e;
        for (std::size_t i = 0; i < pairs.size(); ++i)
            if (mask >> i & 1) e.push_back(pairs[i]);
        auto g = UndirectedGraph::from_edges(k, e);
        if (!g.connected()) continue;
        if (seen.insert(canonical_form(g)).second) out.push_back(std::move(g));
    }
    return out;
}

}  // namespace dcs
