#include "cli.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "atomgraph/branching.hpp"
#include "atomgraph/graphstats.hpp"
#include "atomgraph/io.hpp"
#include "atomgraph/percolation.hpp"
#include "atomgraph/sampler.hpp"
#include "family_config.hpp"
#include "json.hpp"
#include "toml_subset.hpp"

#ifndef ATOMGRAPH_VERSION
#define ATOMGRAPH_VERSION "unknown"
#endif

namespace atomgraph::cli {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

constexpr std::size_t limit_chunk = 8192;

// Finite numbers as JSON numbers, infinities as "inf" / "-inf".
json num(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return nullptr;
    return x > 0 ? "inf" : "-inf";
}

struct FamilyOpts {
    std::string config;
    std::string model;
    std::map<std::string, std::optional<double>> params;

    void attach(CLI::App* app) {
        app->add_option("--config", config, "Family config file (TOML subset)");
        app->add_option("--model", model, "Built-in family: constant, powerlaw, twoblock, badp2");
        for (const char* c : {"c2", "c3", "c4", "c5", "c6"})
            app->add_option(std::string("--") + c, params[c], std::string("constant model: clique constant ") + c);
        app->add_option("--A", params["A"], "powerlaw/twoblock: edge coefficient A");
        app->add_option("--B", params["B"], "powerlaw: triangle coefficient B");
        app->add_option("--alpha", params["alpha"], "powerlaw: exponent alpha > 1");
        app->add_option("--nodes", params["nodes"], "powerlaw: quadrature nodes");
        app->add_option("--block-p", params["p"], "twoblock: weight p of the first type");
        app->add_option("--eps", params["eps"], "badp2: exponent eps");
    }

    std::map<std::string, double> model_params() const {
        std::map<std::string, double> out;
        for (const auto& [k, v] : params)
            if (v) out[k] = *v;
        return out;
    }

    // The family plus a description embedded in every report.
    std::pair<KernelFamily, json> resolve(const std::map<std::string, double>& overrides = {}) const {
        if (config.empty() == model.empty()) fail(Errc::invalid_argument, "give exactly one of --config and --model");
        if (!config.empty()) {
            if (!model_params().empty()) fail(Errc::invalid_argument, "model parameters cannot be combined with --config");
            const json parsed = parse_toml(read_text(config));
            return {family_from_config(parsed), json{{"config_path", config}, {"config", parsed}}};
        }
        auto p = model_params();
        for (const auto& [k, v] : overrides) p[k] = v;
        json jp = json::object();
        for (const auto& [k, v] : p) jp[k] = v;
        return {builtin_family(model, p), json{{"model", model}, {"params", jp}}};
    }
};

struct Meta {
    std::vector<std::string> args;
    Clock::time_point start = Clock::now();
    unsigned threads = 1;

    json operator()(std::optional<std::uint64_t> seed = {}) const {
        json m{{"version", ATOMGRAPH_VERSION},
               {"command", args},
               {"threads", threads},
               {"wall_time_s", std::chrono::duration<double>(Clock::now() - start).count()}};
        m["seed"] = seed ? json(*seed) : json(nullptr);
        return m;
    }
};

// Runs fn(i) for i < count on up to `threads` workers; results must be stored by index.
template <class F>
void parallel_for(std::size_t count, unsigned threads, F fn) {
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::min<std::size_t>(threads, count); ++t)
        pool.emplace_back([&] {
            for (std::size_t i; (i = next.fetch_add(1)) < count;) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mu);
                    if (!first) first = std::current_exception();
                    next = count;
                }
            }
        });
    for (auto& th : pool) th.join();
    if (first) std::rethrow_exception(first);
}

void emit(std::ostream& out, const json& j, const std::string& path) {
    const std::string text = j.dump(2) + "\n";
    if (path.empty()) {
        out << text;
    } else {
        write_text(path, text);
    }
}

json census_json(const RootedCensus& c) {
    json freq = json::object();
    for (const auto& [code, f] : c.freq) freq[code] = f;
    return json{{"depth", c.depth}, {"samples", c.samples}, {"freq", freq}};
}

json histogram_json(const DegreeHistogram& h) {
    return json{{"n", h.n}, {"counts", h.counts}, {"overflow", h.overflow}};
}

json shape_json(const Shape& s) {
    json e = json::array();
    for (const auto& [a, b] : s.edges()) e.push_back({a, b});
    return json{{"order", s.order()}, {"edges", e}};
}

RootedCensus limit_census(const KernelFamily& family, std::size_t t, std::size_t trials, const Rng& rng,
                          std::size_t max_vertices, unsigned threads) {
    // Fixed chunking keeps the result independent of the thread count.
    const std::size_t chunks = (trials + limit_chunk - 1) / limit_chunk;
    std::vector<RootedCensus> parts(chunks);
    parallel_for(chunks, threads, [&](std::size_t c) {
        Rng r = rng.split(c);
        const std::size_t k = std::min(limit_chunk, trials - c * limit_chunk);
        parts[c] = sample_rooted_limit(family, t, k, r, max_vertices);
    });
    RootedCensus out;
    out.depth = t;
    out.samples = trials;
    for (const auto& p : parts)
        for (const auto& [code, f] : p.freq) out.freq[code] += f * double(p.samples) / double(trials);
    return out;
}

double survival_rho(const KernelFamily& family) {
    const DiscreteBP bp(to_hyperkernel(family));
    try {
        return solve_survival(bp).rho;
    } catch (const MaxIterExceeded& e) {
        // Near criticality the iteration stalls; its last iterate is an upper bound.
        return e.last().rho;
    }
}

}  // namespace

unsigned default_threads() {
    if (const char* s = std::getenv("ATOMGRAPH_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(s, &end, 10);
        if (end != s && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return 1;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Random graphs from kernel families of small atoms", "atomgraph"};
    app.require_subcommand(1);
    app.fallthrough();
    Meta meta;
    meta.args = args;
    meta.threads = default_threads();
    app.add_option("--threads", meta.threads, "Worker threads for trial-level parallelism (env ATOMGRAPH_THREADS)")
        ->check(CLI::PositiveNumber);
    app.set_version_flag("--version", ATOMGRAPH_VERSION);

    std::function<void()> action;

    // gen
    FamilyOpts gen_fam;
    std::size_t gen_n = 0;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    bool gen_gz = false;
    auto* gen = app.add_subcommand("gen", "Sample a graph; writes PREFIX.edges, PREFIX.atoms, PREFIX.types.csv");
    gen_fam.attach(gen);
    gen->add_option("--n", gen_n, "Number of vertices")->required();
    gen->add_option("--seed", gen_seed, "Master seed");
    gen->add_option("--out", gen_out, "Output prefix")->required();
    gen->add_flag("--gz", gen_gz, "gzip the outputs");
    gen->callback([&] {
        action = [&] {
            auto [family, desc] = gen_fam.resolve();
            Rng rng(gen_seed);
            const GeneratedGraph g = generate(family, gen_n, SamplerConfig{}, rng);
            const std::string sfx = gen_gz ? ".gz" : "";
            const std::string fe = gen_out + ".edges" + sfx, fa = gen_out + ".atoms" + sfx,
                              ft = gen_out + ".types.csv" + sfx;
            const auto edges = g.simple_edges();
            write_edge_list(fe, edges);
            write_text(fa, format_atom_list(g));
            write_text(ft, format_types_csv(g.types()));
            json shapes = json::array();
            const auto per = g.atoms_per_shape();
            for (std::size_t s = 0; s < g.shapes().size(); ++s) {
                json j = shape_json(g.shapes()[s]);
                j["atoms"] = per[s];
                shapes.push_back(j);
            }
            emit(out,
                 json{{"schema", "atomgraph.gen/1"},
                      {"n", g.n()},
                      {"e", edges.size()},
                      {"e_over_n", g.n() ? double(edges.size()) / double(g.n()) : 0.0},
                      {"multi_edges", g.multi_edges().size()},
                      {"atoms", g.atom_count()},
                      {"shapes", shapes},
                      {"files", {{"edges", fe}, {"atoms", fa}, {"types", ft}}},
                      {"family", desc},
                      {"meta", meta(gen_seed)}},
                 "");
        };
    });

    // stats
    std::string st_edges, st_types, st_json, st_csv;
    std::optional<std::size_t> st_n;
    std::size_t st_depth = 0, st_dmax = 1000, st_kmax = 64, st_maxv = 12;
    auto* stats = app.add_subcommand("stats", "Graph statistics of an edge list");
    stats->add_option("--edges", st_edges, "Edge list (plain or .gz)")->required();
    stats->add_option("--n", st_n, "Vertex count (default: from --types, else largest id + 1)");
    stats->add_option("--types", st_types, "Types CSV written by gen");
    stats->add_option("--census-depth", st_depth, "Neighbourhood census depth t (0 skips the census)");
    stats->add_option("--max-vertices", st_maxv, "Census ball size cap");
    stats->add_option("--d-max", st_dmax, "Largest tabulated degree");
    stats->add_option("--k-max", st_kmax, "Largest k in N_ge_k");
    stats->add_option("--json", st_json, "Write the report here instead of stdout");
    stats->add_option("--hist-csv", st_csv, "Degree histogram CSV (degree,count)");
    stats->callback([&] {
        action = [&] {
            auto edges = read_edge_list(st_edges);
            std::size_t n = 0;
            if (st_n) {
                n = *st_n;
            } else if (!st_types.empty()) {
                n = parse_types_csv(read_text(st_types)).size();
            } else {
                for (const auto& [u, v] : edges) n = std::max<std::size_t>(n, std::max(u, v) + 1ull);
            }
            for (const auto& [u, v] : edges)
                if (u >= n || v >= n) fail(Errc::invalid_argument, "edge list mentions a vertex >= n");
            const SimpleGraph g(n, std::move(edges));
            const auto comp = components(g, st_kmax);
            const auto hist = degree_histogram(g, st_dmax);
            const auto counts = count_subgraphs(g);
            json rep{{"schema", "atomgraph.stats/1"},
                     {"n", g.n()},
                     {"e", g.edge_count()},
                     {"C1", comp.C1},
                     {"C2", comp.C2},
                     {"components", comp.count},
                     {"N_ge_k", comp.N_ge_k},
                     {"degree_histogram", histogram_json(hist)},
                     {"counts",
                      {{"K2", counts.K2}, {"K3", counts.K3}, {"P2", counts.P2}, {"P3", counts.P3}, {"S3", counts.S3}}}};
            try {
                rep["c2"] = clustering_c2(counts);
            } catch (const Error&) {
                rep["c2"] = nullptr;
            }
            try {
                rep["a"] = mixing_a(counts);
            } catch (const Error&) {
                rep["a"] = nullptr;
            }
            rep["census"] = st_depth > 0 ? census_json(neighborhood_census(g, st_depth, st_maxv)) : json(nullptr);
            rep["meta"] = meta();
            if (!st_csv.empty()) {
                std::string csv = "degree,count\n";
                for (std::size_t d = 0; d < hist.counts.size(); ++d)
                    csv += std::to_string(d) + "," + std::to_string(hist.counts[d]) + "\n";
                csv += ">" + std::to_string(st_dmax) + "," + std::to_string(hist.overflow) + "\n";
                write_text(st_csv, csv);
            }
            emit(out, rep, st_json);
        };
    });

    // survival
    FamilyOpts sv_fam;
    std::string sv_out;
    SurvivalOptions sv_opt;
    auto* survival = app.add_subcommand("survival", "Survival probability rho(x) of the branching process");
    sv_fam.attach(survival);
    survival->add_option("--out", sv_out, "CSV of node,weight,rho")->required();
    survival->add_option("--tol", sv_opt.tol, "Sup-norm step tolerance");
    survival->add_option("--max-iter", sv_opt.max_iter, "Iteration limit");
    survival->callback([&] {
        action = [&] {
            auto [family, desc] = sv_fam.resolve();
            const DiscreteBP bp(to_hyperkernel(family));
            SurvivalSolution s;
            bool converged = true;
            std::string why;
            try {
                s = solve_survival(bp, sv_opt);
            } catch (const MaxIterExceeded& e) {
                s = e.last();
                converged = false;
                why = e.what();
            }
            std::ostringstream csv;
            write_survival_csv(csv, s, bp.space());
            write_text(sv_out, csv.str());
            emit(out,
                 json{{"schema", "atomgraph.survival/1"},
                      {"rho", s.rho},
                      {"iterations", s.iterations},
                      {"residual", s.residual},
                      {"converged", converged},
                      {"nodes", bp.size()},
                      {"csv", sv_out},
                      {"family", desc},
                      {"meta", meta()}},
                 "");
            if (!converged) fail(Errc::max_iter_exceeded, why);
        };
    });

    // norm
    FamilyOpts nm_fam;
    double nm_tol = 1e-10;
    auto* norm = app.add_subcommand("norm", "Norm of the branching operator T");
    nm_fam.attach(norm);
    norm->add_option("--tol", nm_tol, "Power iteration tolerance");
    norm->callback([&] {
        action = [&] {
            auto [family, desc] = nm_fam.resolve();
            const DiscreteBP bp(to_hyperkernel(family));
            const auto e = operator_norm(bp, nm_tol);
            emit(out,
                 json{{"schema", "atomgraph.norm/1"},
                      {"value", num(e.value)},
                      {"method", to_string(e.method)},
                      {"iterations", e.iterations},
                      {"residual", e.residual},
                      {"supercritical", e.value > 1.0},
                      {"family", desc},
                      {"meta", meta()}},
                 "");
        };
    });

    // sweep
    FamilyOpts sw_fam;
    std::string sw_param, sw_out;
    double sw_from = 0, sw_to = 0;
    std::size_t sw_steps = 11, sw_n = 0, sw_seeds = 1;
    std::uint64_t sw_seed = 0;
    auto* sweep = app.add_subcommand("sweep", "C1/n and rho over a range of one model parameter");
    sw_fam.attach(sweep);
    sweep->add_option("--param", sw_param, "Parameter to vary (c3, A, alpha, ...)")->required();
    sweep->add_option("--from", sw_from, "First value")->required();
    sweep->add_option("--to", sw_to, "Last value")->required();
    sweep->add_option("--steps", sw_steps, "Number of values")->check(CLI::PositiveNumber);
    sweep->add_option("--n", sw_n, "Vertices per sampled graph")->required();
    sweep->add_option("--seeds", sw_seeds, "Graphs per value")->check(CLI::PositiveNumber);
    sweep->add_option("--seed", sw_seed, "Master seed");
    sweep->add_option("--out", sw_out, "CSV of param,C1_over_n,rho_theory")->required();
    sweep->callback([&] {
        action = [&] {
            if (sw_fam.model.empty()) fail(Errc::invalid_argument, "sweep needs --model");
            std::vector<double> values(sw_steps);
            for (std::size_t i = 0; i < sw_steps; ++i)
                values[i] = sw_steps == 1 ? sw_from : sw_from + (sw_to - sw_from) * double(i) / double(sw_steps - 1);
            std::vector<KernelFamily> fams;
            json desc;
            for (double v : values) {
                auto [f, d] = sw_fam.resolve({{sw_param, v}});
                fams.push_back(std::move(f));
                desc = d;
            }
            desc["params"].erase(sw_param);
            std::vector<double> c1(sw_steps * sw_seeds), rho(sw_steps);
            const Rng master(sw_seed);
            parallel_for(sw_steps * sw_seeds + sw_steps, meta.threads, [&](std::size_t job) {
                if (job >= sw_steps * sw_seeds) {
                    const std::size_t i = job - sw_steps * sw_seeds;
                    rho[i] = survival_rho(fams[i]);
                    return;
                }
                Rng r = master.split(job);
                const auto g = SimpleGraph::from(generate(fams[job / sw_seeds], sw_n, SamplerConfig{}, r));
                c1[job] = double(components(g, 1).C1) / double(sw_n);
            });
            std::ostringstream csv;
            csv.precision(10);
            csv << "param,C1_over_n,rho_theory\n";
            json rows = json::array();
            for (std::size_t i = 0; i < sw_steps; ++i) {
                double m = 0;
                for (std::size_t s = 0; s < sw_seeds; ++s) m += c1[i * sw_seeds + s];
                m /= double(sw_seeds);
                csv << values[i] << ',' << m << ',' << rho[i] << '\n';
                rows.push_back({{"param", values[i]}, {"C1_over_n", m}, {"rho_theory", rho[i]}});
            }
            write_text(sw_out, csv.str());
            emit(out,
                 json{{"schema", "atomgraph.sweep/1"},
                      {"param", sw_param},
                      {"n", sw_n},
                      {"seeds", sw_seeds},
                      {"rows", rows},
                      {"csv", sw_out},
                      {"family", desc},
                      {"meta", meta(sw_seed)}},
                 "");
        };
    });

    // perc
    FamilyOpts pc_fam;
    std::optional<double> pc_p, pc_from, pc_to;
    std::size_t pc_steps = 11;
    bool pc_threshold = false;
    auto* perc = app.add_subcommand("perc", "Bond percolation: transformed family, xi, norm and threshold");
    pc_fam.attach(perc);
    perc->add_option("--p", pc_p, "Retention probability");
    perc->add_option("--from", pc_from, "Scan start");
    perc->add_option("--to", pc_to, "Scan end");
    perc->add_option("--steps", pc_steps, "Scan points")->check(CLI::PositiveNumber);
    perc->add_flag("--threshold", pc_threshold, "Compute p_c (constant families)");
    perc->callback([&] {
        action = [&] {
            auto [family, desc] = pc_fam.resolve();
            std::vector<double> ps;
            if (pc_p) {
                if (pc_from || pc_to) fail(Errc::invalid_argument, "give --p or --from/--to, not both");
                ps.push_back(*pc_p);
            } else if (pc_from && pc_to) {
                for (std::size_t i = 0; i < pc_steps; ++i)
                    ps.push_back(pc_steps == 1 ? *pc_from
                                               : *pc_from + (*pc_to - *pc_from) * double(i) / double(pc_steps - 1));
            } else if (!pc_threshold) {
                fail(Errc::invalid_argument, "perc needs --p, a --from/--to scan, or --threshold");
            }
            json reports = json::array();
            for (double p : ps) {
                const auto rep = percolation_report(family, p);
                json atoms = json::array();
                for (const auto& e : rep.transformed.entries()) {
                    json a = shape_json(e.shape);
                    if (const auto* c = std::get_if<KernelFunction::Constant>(&e.kernel.node())) a["constant"] = c->value;
                    atoms.push_back(a);
                }
                json r{{"p", p}, {"xi", rep.xi}, {"norm", num(rep.norm)}, {"constant", rep.constant}, {"atoms", atoms}};
                if (rep.polynomial) {
                    json exact = json::array();
                    for (const auto& [nu, de] : rep.polynomial->exact) exact.push_back({nu, de});
                    r["xi_polynomial"] = {{"exact", exact}, {"coefficients", rep.polynomial->coefficients}};
                }
                reports.push_back(r);
            }
            json rep{{"schema", "atomgraph.perc/1"}, {"reports", reports}};
            if (pc_threshold) {
                try {
                    rep["threshold"] = percolation_threshold_constant(family);
                    rep["polynomial"] = nullptr;
                    const auto poly = xi_polynomial(family);
                    json exact = json::array();
                    for (const auto& [nu, de] : poly.exact) exact.push_back({nu, de});
                    rep["polynomial"] = {{"exact", exact}, {"coefficients", poly.coefficients}};
                } catch (const Error& e) {
                    if (e.code() != Errc::no_threshold) throw;
                    rep["threshold"] = nullptr;
                    rep["threshold_note"] = e.what();
                }
            }
            rep["family"] = desc;
            rep["meta"] = meta();
            emit(out, rep, "");
        };
    });

    // degree-compare
    FamilyOpts dc_fam;
    std::size_t dc_n = 0, dc_dmax = 200;
    std::uint64_t dc_seed = 0;
    std::string dc_csv;
    auto* dcmp = app.add_subcommand("degree-compare", "Empirical degree law against the mixed compound Poisson limit");
    dc_fam.attach(dcmp);
    dcmp->add_option("--n", dc_n, "Vertices")->required();
    dcmp->add_option("--seed", dc_seed, "Master seed");
    dcmp->add_option("--d-max", dc_dmax, "Largest tabulated degree");
    dcmp->add_option("--csv", dc_csv, "CSV of degree,empirical,reference");
    dcmp->callback([&] {
        action = [&] {
            auto [family, desc] = dc_fam.resolve();
            Rng rng(dc_seed);
            const auto g = SimpleGraph::from(generate(family, dc_n, SamplerConfig{}, rng));
            const auto hist = degree_histogram(g, dc_dmax);
            const auto ref = mcpo_reference(family, dc_dmax);
            const double tv = tv_distance(hist, ref);
            if (!dc_csv.empty()) {
                std::ostringstream csv;
                csv.precision(17);
                csv << "degree,empirical,reference\n";
                for (std::size_t d = 0; d <= dc_dmax; ++d)
                    csv << d << ',' << double(hist.counts[d]) / double(hist.n) << ',' << ref.pmf[d] << '\n';
                write_text(dc_csv, csv.str());
            }
            emit(out,
                 json{{"schema", "atomgraph.degree_compare/1"},
                      {"n", dc_n},
                      {"d_max", dc_dmax},
                      {"tv", tv},
                      {"empirical", histogram_json(hist)},
                      {"reference",
                       {{"pmf", ref.pmf},
                        {"truncation_mass", ref.truncation_mass},
                        {"truncation_warning", ref.truncation_warning},
                        {"mean", ref.mean}}},
                      {"family", desc},
                      {"meta", meta(dc_seed)}},
                 "");
        };
    });

    // local-limit
    FamilyOpts ll_fam;
    std::size_t ll_t = 1, ll_n = 0, ll_trials = 0, ll_maxv = 12;
    std::uint64_t ll_seed = 0;
    auto* local = app.add_subcommand("local-limit", "Neighbourhood census of a sample against the branching limit");
    ll_fam.attach(local);
    local->add_option("--t", ll_t, "Ball radius")->check(CLI::PositiveNumber);
    local->add_option("--n", ll_n, "Vertices")->required();
    local->add_option("--trials", ll_trials, "Branching-process samples")->required()->check(CLI::PositiveNumber);
    local->add_option("--seed", ll_seed, "Master seed");
    local->add_option("--max-vertices", ll_maxv, "Census ball size cap");
    local->callback([&] {
        action = [&] {
            auto [family, desc] = ll_fam.resolve();
            const Rng master(ll_seed);
            Rng gr = master.split(0);
            const auto g = SimpleGraph::from(generate(family, ll_n, SamplerConfig{}, gr));
            const auto sampled = neighborhood_census(g, ll_t, ll_maxv);
            const auto limit = limit_census(family, ll_t, ll_trials, master.split(1), ll_maxv, meta.threads);
            emit(out,
                 json{{"schema", "atomgraph.local_limit/1"},
                      {"n", ll_n},
                      {"t", ll_t},
                      {"trials", ll_trials},
                      {"tv", census_tv(sampled, limit)},
                      {"graph_census", census_json(sampled)},
                      {"limit_census", census_json(limit)},
                      {"family", desc},
                      {"meta", meta(ll_seed)}},
                 "");
        };
    });

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::CallForVersion&) {
        out << ATOMGRAPH_VERSION << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    try {
        if (action) action();
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code(e.code());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace atomgraph::cli
