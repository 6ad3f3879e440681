#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dcs/graph.hpp"
#include "dcs/lp.hpp"
#include "dcs/undirected.hpp"

namespace dcs {

struct GeneratedGraph {
    UndirectedGraph graph;
    bool certified = false;  // the lower-bound guarantee's preconditions hold for (m, λ, k)
    std::string note;
};

// Disjoint λ-cliques, as many as fit in m edges. Throws DegenerateSpec when none fit.
GeneratedGraph gen_clique_union(std::uint64_t m, std::uint64_t lambda, int k = 3);

// Three vertex groups A, B, C: clique on B ∪ C and complete bipartite A × B.
// Throws DegenerateSpec if the result would exceed m edges or degree λ.
GeneratedGraph gen_tripartite(std::uint64_t m, std::uint64_t lambda, int k = 3);

struct VertexPackSolution {
    std::vector<Rational> nu;    // one value in {0, 1/2, 1} per pattern vertex
    std::vector<int> UA, UB, UC;  // nu = 1, nu = 0, nu = 1/2
    int s = 0;                    // one-edge stars split half-half
};

// Optimal half-integral vertex packing consistent with the decomposition. Throws std::logic_error otherwise.
VertexPackSolution vertex_pack_half_integral(const UndirectedGraph& P, const Decomposition& d);
VertexPackSolution partition_UABC(const UndirectedGraph& P);

struct TightnessReport {
    bool applicable = false;
    bool pass = false;
    std::uint64_t occurrences = 0;
    LogValue bound;       // log2 polymat_undir
    double threshold = 0;  // polymat_undir / (4k)^k
    double ratio = 0;      // occurrences / threshold
};

// occurrences >= polymat_undir(m, λ, P) / (4k)^k, counted by brute force.
TightnessReport tightness_check(const GeneratedGraph& g, const UndirectedGraph& P, std::uint64_t m, std::uint64_t lambda,
                                int k);

}  // namespace dcs
