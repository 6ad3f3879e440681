#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dcs/graph.hpp"
#include "dcs/lp.hpp"
#include "dcs/model.hpp"
#include "dcs/race.hpp"
#include "dcs/sampler.hpp"

namespace dcs {

// Companion constraints over attributes = pattern vertices:
// (∅,{X,Y},m) and ({X},{X,Y},λ) for every pattern edge (X,Y).
ConstraintSet pattern_constraints(const DirectedGraph& P, std::uint64_t m, std::uint64_t lambda);

struct CompanionJoin {
    JoinQuery query;
    ConstraintSet dc;  // validated, with guards
};

// One relation per pattern edge, each holding every data edge. Throws LambdaViolation.
CompanionJoin companion_join(const DirectedGraph& G, const DirectedGraph& P, std::uint64_t lambda);

// x_e, z_e per pattern edge (in P.edges order) of
// min sum x log m + z log λ s.t. for each vertex A: sum_{(X,A)} (x+z) + sum_{(A,Y)} x >= 1.
struct LpPlusSolution {
    std::vector<Rational> x, z;
    LogValue objective;
};

LpPlusSolution lp_plus(const DirectedGraph& P, std::uint64_t m, std::uint64_t lambda);
LogValue lp_plus_objective(const LpPlusSolution& s, std::uint64_t m, std::uint64_t lambda);
bool lp_plus_feasible(const DirectedGraph& P, const LpPlusSolution& s);
// Moves z mass along z-support cycles onto x until the z-support is acyclic.
LpPlusSolution acyclicize(const DirectedGraph& P, LpPlusSolution s, int* rewrites = nullptr);
LpPlusSolution lp_plus_acyclicize(const DirectedGraph& P, std::uint64_t m, std::uint64_t lambda);

struct Star {
    int center = -1;
    std::vector<int> petals;  // ascending
};

struct StarCoverConstruction {
    std::vector<int> scc_of;                // component id per vertex
    std::vector<std::vector<int>> sccs;     // members, ascending
    std::vector<char> source_scc;           // per component
    std::vector<int> S, T, S1, S2, T1, T2;  // ascending
    int c1 = 0, n1 = 0, n2 = 0;
    std::vector<Star> cover;                // minimum star cover of the S-T bipartite graph
    std::vector<Edge> skeleton;             // weakly connected acyclic subgraph of P
    std::vector<Edge> lambda_edges;         // edges whose λ-constraint joins DC′
    std::vector<Edge> dual_cardinality;     // edges whose cardinality constraint gets weight 1
};

StarCoverConstruction scc_star_cover_construction(const DirectedGraph& P);
// m^{c1+|S|} λ^{n1+n2+|T1|-2c1-|S1|}, in log2.
LogValue closed_form_dir(const StarCoverConstruction& sc, std::uint64_t m, std::uint64_t lambda);
// DC′ for the λ <= √m route plus the explicit dual weights (one per DC′ constraint).
std::pair<ConstraintSet, std::vector<Rational>> star_cover_dc(const DirectedGraph& P, const StarCoverConstruction& sc,
                                                             std::uint64_t m, std::uint64_t lambda);

// Acyclic DC′ ⊆ DC whose modular bound tracks the polymatroid bound of the full companion constraints.
ConstraintSet acyclic_subset(const DirectedGraph& P, std::uint64_t m, std::uint64_t lambda);

LogValue polymat_dir(std::uint64_t m, std::uint64_t lambda, const DirectedGraph& P);

// Sampling session over one data graph and one pattern.
class DirectedOccurrenceSampler {
public:
    DirectedOccurrenceSampler(const DirectedGraph& G, const DirectedGraph& P, std::uint64_t lambda);

    // One attempt: a sampler run followed by the distinct-values check.
    std::optional<Occurrence> attempt(Rng& rng, std::uint64_t& steps) const;
    std::optional<Occurrence> sample(Rng& rng, const RaceOptions& opt = {}) const;
    bool empty_data() const { return !state_; }
    const SamplerState& state() const { return *state_; }

private:
    const DirectedGraph& G_;
    const DirectedGraph& P_;
    std::optional<SamplerState> state_;
};

std::optional<Occurrence> sample_occurrence_directed(const DirectedGraph& G, const DirectedGraph& P, std::uint64_t lambda,
                                                     Rng& rng, const RaceOptions& opt = {});

}  // namespace dcs
