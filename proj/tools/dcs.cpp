#include <CLI11.hpp>
#include <fmt/core.h>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dcs/acceptance.hpp"
#include "dcs/directed.hpp"
#include "dcs/error.hpp"
#include "dcs/instance_gen.hpp"
#include "dcs/io.hpp"
#include "dcs/lp.hpp"
#include "dcs/sampler.hpp"
#include "dcs/testkit.hpp"
#include "dcs/undirected.hpp"

using namespace dcs;
using Json = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kFailed = 1, kUsage = 2, kInput = 3, kGuard = 4 };

struct Common {
    std::uint64_t seed = 0;
    std::uint64_t work_unit = 1024;
    bool parallel = false;
    std::string format;

    RaceOptions race() const { return {work_unit, parallel}; }
};

Json rational_json(const Rational& q) {
    auto part = [](const mpz_class& z) -> Json {
        if (z.fits_slong_p()) return z.get_si();
        return z.get_str();
    };
    return Json::array({part(q.get_num()), part(q.get_den())});
}

Json log_json(const LogValue& v) {
    if (v.minus_infinity) return Json{{"float", "-inf"}};
    if (v.exact) return Json{{"exact", rational_json(v.q)}};
    return Json{{"float", v.f}};
}

std::string names_of(const JoinQuery& q, AttrSet s) {
    std::string out;
    for (int a : members(s)) out += (out.empty() ? "" : ",") + q.universe[a].name;
    return out;
}

std::string constraint_label(const JoinQuery& q, const DegreeConstraint& c) {
    return fmt::format("({}|{}|{})", names_of(q, c.X), names_of(q, c.Y), c.N);
}

JoinQuery pattern_attributes(int k, const std::vector<std::string>& names) {
    JoinQuery q;
    for (int v = 0; v < k; ++v) q.ensure_attribute(v < static_cast<int>(names.size()) ? names[v] : std::to_string(v));
    return q;
}

Json report_json(const JoinQuery& q, const ConstraintSet& dc, const BoundReport& r) {
    Json out;
    out["log2"] = log_json(r.log2);
    Json primal = Json::object();
    for (int a = 0; a < q.attribute_count(); ++a) primal[q.universe[a].name] = log_json(r.primal[a]);
    out["primal"] = primal;
    Json dual = Json::object();
    for (std::size_t i = 0; i < dc.size(); ++i) dual[constraint_label(q, dc.constraints[i])] = log_json(r.dual[i]);
    out["dual"] = dual;
    return out;
}

void print_report(const Json& j, const std::string& format) {
    if (format == "json" || format.empty()) {
        std::cout << j.dump(2) << '\n';
        return;
    }
    auto scalar = [](const Json& v) -> std::string {
        if (v.is_array() || v.contains("exact")) {
            const auto& e = v.is_array() ? v : v["exact"];
            std::string num = e[0].is_string() ? e[0].get<std::string>() : std::to_string(e[0].get<long>());
            std::string den = e[1].is_string() ? e[1].get<std::string>() : std::to_string(e[1].get<long>());
            return den == "1" ? num : num + "/" + den;
        }
        return v["float"].is_string() ? v["float"].get<std::string>() : fmt::format("{:.12g}", v["float"].get<double>());
    };
    const bool csv = format == "csv";
    if (csv) std::cout << "section,key,log2\n";
    for (const auto& [key, value] : j.items()) {
        if ((value.is_object() && (value.contains("exact") || value.contains("float"))) || value.is_array()) {
            std::cout << (csv ? fmt::format("bound,{},{}\n", key, scalar(value)) : fmt::format("{} = {}\n", key, scalar(value)));
        } else if (value.is_object()) {
            for (const auto& [k2, v2] : value.items()) {
                std::cout << (csv ? fmt::format("{},\"{}\",{}\n", key, k2, scalar(v2))
                                  : fmt::format("{} {} = {}\n", key, k2, scalar(v2)));
            }
        } else {
            std::cout << (csv ? fmt::format("info,{},{}\n", key, value.dump()) : fmt::format("{} = {}\n", key, value.dump()));
        }
    }
}

int cmd_bound_spec(const std::string& path, const Common& c) {
    const JoinSpec spec = load_join_spec(path);
    const JoinQuery& q = spec.query;
    const ConstraintSet dc = validate_and_close(q, spec.constraints);
    const bool acyclic = dependency_graph(dc, q.attribute_count()).acyclic;
    const BoundReport modular = modular_bound(dc, q.attribute_count());
    Json out = report_json(q, dc, modular);
    out["acyclic"] = acyclic;
    out["modular"] = log_json(modular.log2);
    if (acyclic) out["polymatroid"] = log_json(polymat_acyclic(dc, q.attribute_count()).log2);
    if (q.attribute_count() <= 6) out["polymatroid_full"] = log_json(polymatroid_lp_full(dc, q.attribute_count()));
    out["agm"] = log_json(agm_bound(q).log2);
    print_report(out, c.format);
    return kOk;
}

int cmd_bound_pattern(const std::string& path, bool undirected, std::uint64_t m, std::uint64_t lambda, const Common& c) {
    if (m == 0 || lambda == 0) throw CLI::ValidationError("--m and --lambda must be positive");
    Json out;
    if (undirected) {
        const UndirectedGraph P = read_undirected_edges(path);
        const Decomposition d = edge_cover_decomposition(P);
        out["log2"] = log_json(polymat_undir(m, lambda, P, d));
        Json primal = Json::object();
        for (int v = 0; v < P.n; ++v) primal[P.name(v)] = rational_json(d.vertex_dual[v]);
        out["primal"] = primal;
        Json dual = Json::object();
        for (std::size_t e = 0; e < P.edges.size(); ++e)
            dual[P.name(P.edges[e].first) + "-" + P.name(P.edges[e].second)] = rational_json(d.edge_weight[e]);
        out["dual"] = dual;
        const bool small_lambda = static_cast<unsigned __int128>(lambda) * lambda <= m;
        out["branch"] = small_lambda ? "m*lambda^(k-2)" : "m^(k_cycle/2+beta)*lambda^(k_star-2*beta)";
        out["rho"] = rational_json(d.rho);
    } else {
        const DirectedGraph P = read_directed_edges(path);
        const ConstraintSet sub = acyclic_subset(P, m, lambda);
        const JoinQuery q = pattern_attributes(P.n, P.names);
        Json r = report_json(q, sub, polymat_acyclic(sub, P.n));
        out["log2"] = log_json(polymat_dir(m, lambda, P));
        out["primal"] = r["primal"];
        out["dual"] = r["dual"];
    }
    print_report(out, c.format);
    return kOk;
}

void print_tuples(const JoinQuery& q, const std::vector<Tuple>& rows, const std::string& format) {
    if (format == "json") {
        Json arr = Json::array();
        for (const auto& t : rows) {
            Json o;
            for (int a = 0; a < q.attribute_count(); ++a) o[q.universe[a].name] = q.values.text(t[a]);
            arr.push_back(o);
        }
        std::cout << arr.dump() << '\n';
        return;
    }
    const char sep = format == "plain" ? ' ' : ',';
    if (format != "plain") {
        for (int a = 0; a < q.attribute_count(); ++a) std::cout << (a ? "," : "") << q.universe[a].name;
        std::cout << '\n';
    }
    for (const auto& t : rows) {
        for (int a = 0; a < q.attribute_count(); ++a) {
            if (a) std::cout << sep;
            std::cout << q.values.text(t[a]);
        }
        std::cout << '\n';
    }
}

int cmd_sample_join(const std::string& path, std::uint64_t count, const std::string& mode, double epsilon,
                    double confidence, const Common& c) {
    const JoinSpec spec = load_join_spec(path);
    const ConstraintSet dc = validate_and_close(spec.query, spec.constraints);
    const SamplerState s = make_sampler(spec.query, dc);
    const JoinQuery& q = *s.query;
    Rng rng(c.seed);
    if (mode == "estimate") {
        if (!(epsilon > 0 && epsilon < 1)) throw CLI::ValidationError("--epsilon must lie in (0,1)");
        EstimateOptions opt;
        opt.race = c.race();
        const Estimate e = estimate_out(s, epsilon, confidence, rng, opt);
        std::cout << std::llround(e.value) << '\n';
        return kOk;
    }
    std::vector<Tuple> rows;
    if (mode == "permute") {
        PermutationStream stream(s, rng, c.race());
        while (count == 0 || rows.size() < count) {
            auto t = stream.next();
            if (!t) break;
            rows.push_back(std::move(*t));
        }
    } else {
        for (std::uint64_t i = 0; i < count; ++i) {
            auto t = sample_operation(s, rng, c.race());
            if (!t) break;
            rows.push_back(std::move(*t));
        }
    }
    if (rows.empty() && count != 0) {
        std::cout << "EMPTY\n";
        return kOk;
    }
    print_tuples(q, rows, c.format.empty() ? "csv" : c.format);
    return kOk;
}

template <class Graph>
void print_occurrences(const Graph& G, const Graph& P, const std::vector<Occurrence>& occ, const std::string& format) {
    if (format == "json") {
        Json arr = Json::array();
        for (const auto& o : occ) {
            Json obj;
            for (int v = 0; v < P.n; ++v) obj[P.name(v)] = G.name(o.vertex_map[v]);
            arr.push_back(obj);
        }
        std::cout << arr.dump() << '\n';
        return;
    }
    const bool csv = format == "csv";
    if (csv) {
        for (int v = 0; v < P.n; ++v) std::cout << (v ? "," : "") << P.name(v);
        std::cout << '\n';
    }
    for (const auto& o : occ) {
        for (int v = 0; v < P.n; ++v) std::cout << (v ? (csv ? "," : " ") : "") << G.name(o.vertex_map[v]);
        std::cout << '\n';
    }
}

int cmd_sample_subgraph(const std::string& graph, const std::string& pattern, bool directed,
                        std::optional<std::uint64_t> lambda, std::uint64_t count, const Common& c) {
    Rng rng(c.seed);
    std::vector<Occurrence> occ;
    auto run = [&](const auto& G, const auto& P, const auto& sampler) {
        for (std::uint64_t i = 0; i < count; ++i) {
            auto o = sampler.sample(rng, c.race());
            if (!o) break;
            occ.push_back(std::move(*o));
        }
        if (occ.empty() && count != 0) {
            std::cout << "EMPTY\n";
            return;
        }
        print_occurrences(G, P, occ, c.format.empty() ? "plain" : c.format);
    };
    if (directed) {
        const DirectedGraph G = read_directed_edges(graph);
        const DirectedGraph P = read_directed_edges(pattern);
        const std::uint64_t L = lambda.value_or(std::max(1, G.max_out_degree()));
        DirectedOccurrenceSampler sampler(G, P, L);
        run(G, P, sampler);
    } else {
        const UndirectedGraph G = read_undirected_edges(graph);
        const UndirectedGraph P = read_undirected_edges(pattern);
        const std::uint64_t L = lambda.value_or(std::max(1, G.max_degree()));
        UndirectedOccurrenceSampler sampler(G, P, L);
        run(G, P, sampler);
    }
    return kOk;
}

int cmd_decompose(const std::string& path, const Common& c) {
    const UndirectedGraph P = read_undirected_edges(path);
    const Decomposition d = edge_cover_decomposition(P);
    auto names = [&](const std::vector<int>& vs) {
        std::vector<std::string> out;
        for (int v : vs) out.push_back(P.name(v));
        return out;
    };
    if (c.format == "json") {
        Json out;
        out["cycles"] = Json::array();
        for (const auto& cyc : d.cycles) out["cycles"].push_back(names(cyc));
        out["stars"] = Json::array();
        for (const auto& s : d.stars) out["stars"].push_back(Json{{"center", P.name(s.center)}, {"petals", names(s.petals)}});
        out["rho"] = rational_json(d.rho);
        std::cout << out.dump(2) << '\n';
        return kOk;
    }
    auto join = [&](const std::vector<int>& vs) {
        std::string out;
        for (const auto& n : names(vs)) out += (out.empty() ? "" : " ") + n;
        return out;
    };
    for (const auto& cyc : d.cycles) std::cout << "cycle: " << join(cyc) << '\n';
    for (const auto& s : d.stars) std::cout << "star: center " << P.name(s.center) << " petals " << join(s.petals) << '\n';
    std::cout << "rho* = " << d.rho.get_str() << '\n';
    return kOk;
}

int cmd_gen(const std::string& kind, std::uint64_t m, std::uint64_t lambda, int k, const std::string& out_path) {
    GeneratedGraph g;
    if (kind == "clique-union")
        g = gen_clique_union(m, lambda, k);
    else if (kind == "tripartite")
        g = gen_tripartite(m, lambda, k);
    else
        throw CLI::ValidationError("--kind must be clique-union or tripartite");
    if (out_path.empty() || out_path == "-") {
        write_edge_list(std::cout, g.graph);
    } else {
        std::ofstream out(out_path);
        if (!out) throw InputError("cannot write '" + out_path + "'");
        write_edge_list(out, g.graph);
    }
    std::cerr << fmt::format("{} vertices, {} edges, certified={}{}\n", g.graph.n, g.graph.edges.size(),
                             g.certified ? "yes" : "no", g.note.empty() ? "" : " (" + g.note + ")");
    return kOk;
}

int cmd_verify(const std::string& suite, const Common& c) {
    const auto ids = suite_criteria(suite);
    bool all = true;
    for (int id : ids) {
        const CriterionResult r = run_criterion(id, c.seed == 0 ? 1 : c.seed);
        all = all && r.pass;
        std::cout << fmt::format("{} criterion {:2d}: {} [{}]\n", r.pass ? "PASS" : "FAIL", r.id, r.title, r.detail)
                  << std::flush;
    }
    return all ? kOk : kFailed;
}

int cmd_bench(const std::vector<std::uint64_t>& ms, std::uint64_t lambda, std::uint64_t successes, bool timing,
              const Common& c) {
    Rng rng(c.seed);
    std::cout << "instance,sampler,bound_log2,samples_per_sec,mean_attempts\n";
    for (std::uint64_t m : ms) {
        for (const auto& row : bench_clique_union_triangle(m, lambda, successes, rng)) {
            std::cout << fmt::format("{},{},{},{},{:.3f}\n", row.instance, row.sampler, row.bound.to_string(),
                                     timing ? fmt::format("{:.1f}", row.samples_per_sec) : std::string("NA"),
                                     row.mean_attempts);
        }
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Uniform sampling from joins and subgraph occurrences under degree constraints"};
    app.require_subcommand(1);
    Common common;
    app.add_option("--seed", common.seed, "random seed")->capture_default_str();
    app.add_option("--work-unit", common.work_unit, "race interleave budget")->capture_default_str()->check(CLI::PositiveNumber);
    app.add_flag("--parallel", common.parallel, "race on two threads (output may differ between runs)");
    app.add_option("--format", common.format, "output format")->check(CLI::IsMember({"json", "csv", "plain"}));
    app.fallthrough();

    int status = kOk;
    std::function<int()> action;

    auto* bound = app.add_subcommand("bound", "output-size bounds of a join spec or a pattern");
    std::string bound_spec, bound_pattern;
    bool bound_undirected = false, bound_directed = false;
    std::uint64_t bound_m = 0, bound_lambda = 0;
    auto* spec_opt = bound->add_option("--spec", bound_spec, "join spec JSON");
    auto* pattern_opt = bound->add_option("--pattern", bound_pattern, "pattern edge list");
    spec_opt->excludes(pattern_opt);
    bound->add_flag("--undirected", bound_undirected);
    bound->add_flag("--directed", bound_directed);
    bound->add_option("--m", bound_m, "edge count bound")->needs(pattern_opt);
    bound->add_option("--lambda", bound_lambda, "degree bound")->needs(pattern_opt);
    bound->callback([&] {
        action = [&] {
            if (!bound_spec.empty()) return cmd_bound_spec(bound_spec, common);
            if (bound_pattern.empty()) throw CLI::ValidationError("bound needs --spec or --pattern");
            if (bound_undirected == bound_directed) throw CLI::ValidationError("pick --directed or --undirected");
            return cmd_bound_pattern(bound_pattern, bound_undirected, bound_m, bound_lambda, common);
        };
    });

    auto* sj = app.add_subcommand("sample-join", "uniform samples, size estimate or random permutation of a join");
    std::string sj_spec, sj_mode = "sample";
    std::uint64_t sj_count = 1;
    double sj_epsilon = 0.1, sj_confidence = 0.9;
    sj->add_option("--spec", sj_spec, "join spec JSON")->required();
    sj->add_option("--count", sj_count, "samples to draw (permute: 0 lists everything)")->capture_default_str();
    sj->add_option("--mode", sj_mode)->check(CLI::IsMember({"sample", "estimate", "permute"}))->capture_default_str();
    sj->add_option("--epsilon", sj_epsilon, "relative error for estimate")->capture_default_str();
    sj->add_option("--confidence", sj_confidence, "confidence for estimate")->capture_default_str()->check(CLI::Range(0.0, 0.9999));
    sj->callback([&] { action = [&] { return cmd_sample_join(sj_spec, sj_count, sj_mode, sj_epsilon, sj_confidence, common); }; });

    auto* ss = app.add_subcommand("sample-subgraph", "uniform pattern occurrences in a data graph");
    std::string ss_graph, ss_pattern;
    bool ss_directed = false;
    std::optional<std::uint64_t> ss_lambda;
    std::uint64_t ss_count = 1;
    ss->add_option("--graph", ss_graph, "data graph edge list")->required();
    ss->add_option("--pattern", ss_pattern, "pattern edge list")->required();
    ss->add_flag("--directed", ss_directed);
    ss->add_option("--lambda", ss_lambda, "degree bound (default: the graph's maximum degree)")->check(CLI::PositiveNumber);
    ss->add_option("--count", ss_count)->capture_default_str();
    ss->callback([&] { action = [&] { return cmd_sample_subgraph(ss_graph, ss_pattern, ss_directed, ss_lambda, ss_count, common); }; });

    auto* dec = app.add_subcommand("decompose", "odd cycles and stars of an undirected pattern");
    std::string dec_pattern;
    dec->add_option("--pattern", dec_pattern, "pattern edge list")->required();
    dec->callback([&] { action = [&] { return cmd_decompose(dec_pattern, common); }; });

    auto* gen = app.add_subcommand("gen", "lower-bound instance generators");
    std::string gen_kind, gen_out;
    std::uint64_t gen_m = 0, gen_lambda = 0;
    int gen_k = 3;
    gen->add_option("--kind", gen_kind)->required()->check(CLI::IsMember({"clique-union", "tripartite"}));
    gen->add_option("--m", gen_m)->required();
    gen->add_option("--lambda", gen_lambda)->required();
    gen->add_option("--k", gen_k)->capture_default_str()->check(CLI::Range(2, 64));
    gen->add_option("--out", gen_out, "output edge list (default stdout)");
    gen->callback([&] { action = [&] { return cmd_gen(gen_kind, gen_m, gen_lambda, gen_k, gen_out); }; });

    auto* ver = app.add_subcommand("verify", "run acceptance criteria");
    std::string ver_suite = "all";
    ver->add_option("--suite", ver_suite)->check(CLI::IsMember({"all", "bounds", "uniformity", "tightness"}))->capture_default_str();
    ver->callback([&] { action = [&] { return cmd_verify(ver_suite, common); }; });

    auto* bench = app.add_subcommand("bench", "attempts per sample on the clique-union family, triangle pattern");
    std::vector<std::uint64_t> bench_m{std::uint64_t{1} << 14};
    std::uint64_t bench_lambda = 8, bench_successes = 100;
    bool bench_no_timing = false;
    bench->add_option("--m", bench_m, "edge budgets")->capture_default_str();
    bench->add_option("--lambda", bench_lambda)->capture_default_str();
    bench->add_option("--successes", bench_successes, "samples per sampler")->capture_default_str()->check(CLI::PositiveNumber);
    bench->add_flag("--no-timing", bench_no_timing, "print NA instead of samples/sec");
    bench->callback([&] { action = [&] { return cmd_bench(bench_m, bench_lambda, bench_successes, !bench_no_timing, common); }; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }
    try {
        status = action();
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const SchemaError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const UnguardedConstraint& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kGuard;
    } catch (const LambdaViolation& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kGuard;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return status;
}
