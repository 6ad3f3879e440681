#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "dcs/directed.hpp"
#include "dcs/graph.hpp"
#include "dcs/lp.hpp"
#include "dcs/race.hpp"
#include "dcs/sampler.hpp"

namespace dcs {

// Each undirected edge becomes the two directed edges (u,v) and (v,u).
DirectedGraph to_directed(const UndirectedGraph& g);
// Forgets directions; antiparallel pairs collapse to one edge.
UndirectedGraph to_undirected(const DirectedGraph& g);

// Vertex-disjoint odd cycles and stars covering the pattern, read off a half-integral optimal edge cover.
struct Decomposition {
    std::vector<std::vector<int>> cycles;  // vertex sequences, starting at the smallest id
    std::vector<Star> stars;               // one-edge stars are centred on the smaller id
    std::vector<Rational> edge_weight;     // optimal edge cover, one weight per P.edges entry
    std::vector<Rational> vertex_dual;     // optimal vertex packing read from the LP duals
    Rational rho;                          // fractional edge cover number
    int alpha = 0, beta = 0, k_cycle = 0, k_star = 0;
};

// Throws std::logic_error if the LP vertex found does not split into stars and odd cycles.
Decomposition edge_cover_decomposition(const UndirectedGraph& P);

// m λ^{k-2} when λ² <= m, else m^{k_cycle/2+β} λ^{k_star-2β}; log2.
LogValue polymat_undir(std::uint64_t m, std::uint64_t lambda, const UndirectedGraph& P);
LogValue polymat_undir(std::uint64_t m, std::uint64_t lambda, const UndirectedGraph& P, const Decomposition& d);

// A polymatroid reaching polymat_undir: log m + (|X|-2) log λ on non-empty X when λ² <= m; otherwise the
// modular function with weight log m/2, log m - log λ, log λ on vertices packed at 1/2, 0, 1.
SetFunction construct_h_star(std::uint64_t m, std::uint64_t lambda, const UndirectedGraph& P, const Decomposition& d);

// Relation per pattern edge holding both orientations of every data edge; cardinality constraints only.
JoinQuery undirected_companion_query(const UndirectedGraph& G, const UndirectedGraph& P);

// BFS from vertex 0: visiting order and parent of every vertex.
struct TreePlan {
    std::vector<int> order, parent;
};
TreePlan bfs_plan(const UndirectedGraph& P);

// One spanning-tree walk; the raw map, not yet checked against P.
std::optional<std::vector<int>> tree_attempt(const UndirectedGraph& G, const TreePlan& t, std::uint64_t lambda, Rng& rng,
                                             std::uint64_t& steps);

// Seed edge with a random orientation, then a coin deg/λ and a uniform neighbour per tree vertex.
// Returns the map only when it is an occurrence.
std::optional<Occurrence> spanning_tree_sample(const UndirectedGraph& G, const UndirectedGraph& P, std::uint64_t lambda,
                                               Rng& rng);

// f ∘ σ for a uniform automorphism σ of the component.
std::vector<int> random_isomorphism_bijection(const UndirectedGraph& component, const std::vector<int>& f, Rng& rng);

// A piece of the decomposition as a standalone pattern: local id j is pattern vertex vertices[j].
struct Component {
    bool cycle = false;
    std::vector<int> vertices;  // cycle order, or centre followed by petals
    UndirectedGraph graph;
};

std::vector<Component> decomposition_components(const Decomposition& d);

class UndirectedOccurrenceSampler {
public:
    UndirectedOccurrenceSampler(const UndirectedGraph& G, const UndirectedGraph& P, std::uint64_t lambda);

    bool spanning_tree_regime() const { return spanning_; }
    bool empty_data() const { return empty_; }
    std::optional<Occurrence> attempt(Rng& rng, std::uint64_t& steps) const;
    std::optional<Occurrence> composite_attempt(Rng& rng, std::uint64_t& steps) const;
    std::optional<Occurrence> sample(Rng& rng, const RaceOptions& opt = {}) const;
    const Decomposition& decomposition() const { return decomposition_; }

private:
    const UndirectedGraph& G_;
    const UndirectedGraph& P_;
    std::uint64_t lambda_;
    bool spanning_ = true, empty_ = false;
    Decomposition decomposition_;
    std::vector<Component> components_;
    TreePlan plan_;
    std::vector<TreePlan> component_plans_;
    std::vector<std::optional<SamplerState>> cycle_states_;  // per component; set for cycles
    std::shared_ptr<const JoinPlan> enumeration_plan_;
};

std::optional<Occurrence> sample_occurrence_undirected(const UndirectedGraph& G, const UndirectedGraph& P,
                                                       std::uint64_t lambda, Rng& rng, const RaceOptions& opt = {});

}  // namespace dcs
