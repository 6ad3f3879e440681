#pragma once

#include <cstdint>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

namespace dcs {

using Edge = std::pair<int, int>;

inline std::uint64_t edge_code(int u, int v) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) | static_cast<std::uint32_t>(v);
}

// Simple directed graph: no self-loops, no repeated edges.
struct DirectedGraph {
    int n = 0;
    std::vector<std::string> names;  // optional display names, one per vertex
    std::vector<Edge> edges;         // sorted
    std::vector<std::vector<int>> out, in;

    static DirectedGraph from_edges(int n, std::vector<Edge> edges);
    bool has_edge(int u, int v) const { return edge_set_.count(edge_code(u, v)) != 0; }
    int max_out_degree() const;
    bool weakly_connected() const;
    std::string name(int v) const { return v < static_cast<int>(names.size()) ? names[v] : std::to_string(v); }

private:
    std::unordered_set<std::uint64_t> edge_set_;
};

// Simple undirected graph; edges stored once with u < v.
struct UndirectedGraph {
    int n = 0;
    std::vector<std::string> names;
    std::vector<Edge> edges;  // sorted, u < v
    std::vector<std::vector<int>> adj;

    static UndirectedGraph from_edges(int n, std::vector<Edge> edges);
    bool has_edge(int u, int v) const { return edge_set_.count(edge_code(std::min(u, v), std::max(u, v))) != 0; }
    int degree(int v) const { return static_cast<int>(adj[v].size()); }
    int max_degree() const;
    bool connected() const;
    std::string name(int v) const { return v < static_cast<int>(names.size()) ? names[v] : std::to_string(v); }

private:
    std::unordered_set<std::uint64_t> edge_set_;
};

using DirectedPattern = DirectedGraph;
using UndirectedPattern = UndirectedGraph;

// Pattern vertex i maps to data vertex vertex_map[i].
struct Occurrence {
    std::vector<int> vertex_map;
};

// Identity of the occurrence subgraph: its sorted image edge set.
using OccurrenceKey = std::vector<Edge>;
OccurrenceKey occurrence_key(const DirectedGraph& P, const std::vector<int>& f);
OccurrenceKey occurrence_key(const UndirectedGraph& P, const std::vector<int>& f);

// f injective and every pattern edge lands on a data edge.
bool is_occurrence(const DirectedGraph& G, const DirectedGraph& P, const std::vector<int>& f);
bool is_occurrence(const UndirectedGraph& G, const UndirectedGraph& P, const std::vector<int>& f);

// All vertex permutations preserving the edge set, by brute force (k <= 8).
std::vector<std::vector<int>> automorphisms(const DirectedGraph& P);
std::vector<std::vector<int>> automorphisms(const UndirectedGraph& P);
std::size_t automorphism_count(const DirectedGraph& P);
std::size_t automorphism_count(const UndirectedGraph& P);

// Canonical form under vertex relabeling, for deduplicating pattern catalogues.
std::vector<Edge> canonical_form(const DirectedGraph& P);
std::vector<Edge> canonical_form(const UndirectedGraph& P);

// Every weakly connected simple digraph (antiparallel pairs allowed) on k vertices, one per isomorphism class.
std::vector<DirectedGraph> all_weakly_connected_digraphs(int k);
// Every connected simple graph on k vertices, one per isomorphism class.
std::vector<UndirectedGraph> all_connected_graphs(int k);

}  // namespace dcs
