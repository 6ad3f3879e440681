#include "dcs/instance_gen.hpp"

#include <cmath>
#include <stdexcept>

#include "dcs/error.hpp"
#include "dcs/testkit.hpp"

namespace dcs {

namespace {

bool lower_bound_preconditions(std::uint64_t m, std::uint64_t lambda, int k) {
    const std::uint64_t kk = static_cast<std::uint64_t>(k);
    return m >= std::max<std::uint64_t>(16 * kk * kk, 64) && lambda >= kk && lambda * 4 * kk <= m;
}

// Smallest c with 16 c^2 >= m, i.e. ceil(sqrt(m) / 4).
std::uint64_t ceil_sqrt_quarter(std::uint64_t m) {
    std::uint64_t c = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(m)) / 4.0);
    while (c > 0 && 16 * (c - 1) * (c - 1) >= m) --c;
    while (16 * c * c < m) ++c;
    return c;
}

void check_budget(const UndirectedGraph& g, std::uint64_t m, std::uint64_t lambda) {
    if (g.edges.size() > m) throw DegenerateSpec("generated graph has more than m edges");
    if (static_cast<std::uint64_t>(g.max_degree()) > lambda) throw DegenerateSpec("generated graph exceeds degree λ");
}

}  // namespace

GeneratedGraph gen_clique_union(std::uint64_t m, std::uint64_t lambda, int k) {
    if (lambda < 2) throw DegenerateSpec("cliques need λ >= 2");
    const std::uint64_t per = lambda * (lambda - 1) / 2;
    const std::uint64_t cliques = m / per;
    if (cliques == 0) throw DegenerateSpec("no λ-clique fits in m edges");
    std::vector<Edge> edges;
    for (std::uint64_t c = 0; c < cliques; ++c)
        for (std::uint64_t i = 0; i < lambda; ++i)
            for (std::uint64_t j = i + 1; j < lambda; ++j)
                edges.emplace_back(static_cast<int>(c * lambda + i), static_cast<int>(c * lambda + j));
    GeneratedGraph out;
    out.graph = UndirectedGraph::from_edges(static_cast<int>(cliques * lambda), std::move(edges));
    check_budget(out.graph, m, lambda);
    out.certified = lower_bound_preconditions(m, lambda, k) && lambda * lambda < m;
    out.note = std::to_string(cliques) + " cliques of " + std::to_string(lambda);
    return out;
}

GeneratedGraph gen_tripartite(std::uint64_t m, std::uint64_t lambda, int k) {
    if (lambda < 1 || m < 1) throw DegenerateSpec("m and λ must be positive");
    const std::uint64_t a = (lambda + 3) / 4;
    const std::uint64_t b = (m + 4 * lambda - 1) / (4 * lambda);
    const std::uint64_t c = ceil_sqrt_quarter(m);
    const std::uint64_t n = a + b + c;
    if (n > (std::uint64_t{1} << 30)) throw DegenerateSpec("too many vertices");
    // Ids: A first, then B, then C.
    std::vector<Edge> edges;
    for (std::uint64_t i = a; i < n; ++i)
        for (std::uint64_t j = i + 1; j < n; ++j) {
            edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
            if (edges.size() > m) throw DegenerateSpec("generated graph has more than m edges");
        }
    for (std::uint64_t i = 0; i < a; ++i)
        for (std::uint64_t j = a; j < a + b; ++j) {
            edges.emplace_back(static_cast<int>(i), static_cast<int>(j));
            if (edges.size() > m) throw DegenerateSpec("generated graph has more than m edges");
        }
    GeneratedGraph out;
    out.graph = UndirectedGraph::from_edges(static_cast<int>(n), std::move(edges));
    check_budget(out.graph, m, lambda);
    out.certified = lower_bound_preconditions(m, lambda, k) && lambda * lambda >= m;
    out.note = "groups " + std::to_string(a) + "/" + std::to_string(b) + "/" + std::to_string(c);
    return out;
}

VertexPackSolution vertex_pack_half_integral(const UndirectedGraph& P, const Decomposition& d) {
    const Rational half(1, 2);
    VertexPackSolution v;
    v.nu = d.vertex_dual;
    if (static_cast<int>(v.nu.size()) != P.n) throw std::logic_error("vertex packing has the wrong size");
    Rational total = 0;
    for (int x = 0; x < P.n; ++x) {
        const Rational& q = v.nu[x];
        if (q != 0 && q != half && q != 1) throw std::logic_error("vertex packing is not half-integral");
        total += q;
    }
    for (auto [x, y] : P.edges)
        if (v.nu[x] + v.nu[y] > 1) throw std::logic_error("vertex packing is infeasible");
    if (total != d.rho) throw std::logic_error("vertex packing is not optimal");
    for (const auto& c : d.cycles)
        for (int x : c)
            if (v.nu[x] != half) throw std::logic_error("cycle vertex off 1/2");
    for (const auto& s : d.stars) {
        if (s.petals.size() >= 2) {
            if (v.nu[s.center] != 0) throw std::logic_error("star centre off 0");
            for (int p : s.petals)
                if (v.nu[p] != 1) throw std::logic_error("star petal off 1");
        } else {
            if (v.nu[s.center] + v.nu[s.petals[0]] != 1) throw std::logic_error("one-edge star does not sum to 1");
            if (v.nu[s.center] == half) ++v.s;
        }
    }
    for (int x = 0; x < P.n; ++x) {
        if (v.nu[x] == 1)
            v.UA.push_back(x);
        else if (v.nu[x] == 0)
            v.UB.push_back(x);
        else
            v.UC.push_back(x);
    }
    // Size equations and the two forbidden edge kinds.
    if (static_cast<int>(v.UA.size()) != d.k_star - d.beta - v.s || static_cast<int>(v.UB.size()) != d.beta - v.s ||
        static_cast<int>(v.UC.size()) != d.k_cycle + 2 * v.s)
        throw std::logic_error("partition sizes are off");
    for (auto [x, y] : P.edges)
        if ((v.nu[x] == 1 && v.nu[y] != 0) || (v.nu[y] == 1 && v.nu[x] != 0))
            throw std::logic_error("edge inside U_A or between U_A and U_C");
    return v;
}

VertexPackSolution partition_UABC(const UndirectedGraph& P) {
    return vertex_pack_half_integral(P, edge_cover_decomposition(P));
}

TightnessReport tightness_check(const GeneratedGraph& g, const UndirectedGraph& P, std::uint64_t m, std::uint64_t lambda,
                                int k) {
    TightnessReport r;
    r.applicable = g.certified && P.n == k;
    r.bound = polymat_undir(m, lambda, P);
    r.occurrences = brute_force_occurrences(g.graph, P).size();
    r.threshold = std::exp2(r.bound.value() - k * std::log2(4.0 * k));
    r.ratio = r.occurrences / r.threshold;
    r.pass = r.applicable && static_cast<double>(r.occurrences) >= r.threshold;
    return r;
}

}  // namespace dcs
