#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "atomgraph/graphstats.hpp"
#include "atomgraph/io.hpp"
#include "atomgraph/models.hpp"
#include "atomgraph/percolation.hpp"
#include "atomgraph/sampler.hpp"
#include "cli.hpp"
#include "doctest.h"
#include "family_config.hpp"
#include "json.hpp"
#include "toml_subset.hpp"

using namespace atomgraph;
using namespace atomgraph::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
    json j() const { return json::parse(out); }
};

Result invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string config_path(const std::string& name) { return std::string(CONFIG_DIR) + "/" + name; }

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

// Drops the fields that legitimately differ between runs.
json stable(json j) {
    if (j.contains("meta")) {
        j["meta"].erase("wall_time_s");
        j["meta"].erase("threads");
        j["meta"].erase("command");
    }
    return j;
}

void golden(const std::string& name, const std::string& actual) {
    const std::string path = std::string(GOLDEN_DIR) + "/" + name;
    if (std::getenv("ATOMGRAPH_UPDATE_GOLDEN")) {
        std::ofstream(path, std::ios::binary) << actual;
        return;
    }
    REQUIRE_MESSAGE(fs::exists(path), "missing golden file " << path);
    CHECK(slurp(path) == actual);
}

// Same entries, shapes and kernel values at sample points on the same grid.
void same_family(const KernelFamily& a, const KernelFamily& b) {
    REQUIRE(a.entries().size() == b.entries().size());
    REQUIRE(a.space().size() == b.space().size());
    for (std::size_t i = 0; i < a.space().size(); ++i) {
        CHECK(a.space().nodes()[i] == doctest::Approx(b.space().nodes()[i]).epsilon(1e-14));
        CHECK(a.space().weights()[i] == doctest::Approx(b.space().weights()[i]).epsilon(1e-14));
    }
    const auto x = a.space().nodes();
    for (std::size_t e = 0; e < a.entries().size(); ++e) {
        const auto& ea = a.entries()[e];
        const auto& eb = b.entries()[e];
        CHECK(ea.shape.isomorphic(eb.shape));
        const std::size_t r = ea.shape.order();
        std::vector<double> pt(r);
        for (std::size_t s = 0; s < 20; ++s) {
            for (std::size_t i = 0; i < r; ++i) pt[i] = x[(s * 7 + i * 13 + 1) % x.size()];
            const double va = ea.kernel(pt), vb = eb.kernel(pt);
            if (std::isinf(va)) {
                CHECK(std::isinf(vb));
            } else {
                CHECK(va == doctest::Approx(vb).epsilon(1e-12));
            }
        }
    }
}

}  // namespace

TEST_SUITE("cli") {
    TEST_CASE("toml subset") {
        const json j = parse_toml(R"(# comment
top = 1
name = "a \"q\"" # trailing
lit = 'C:\path'
[space]
kind = "finite"
weights = [
  0.25, 0.75,  # two types
]
big = 1_000
neg = -2.5e-3
flag = true
inf_val = inf
[[atom]]
edges = [[0, 1], [1, 2]]
opts = { a = 1, b = "x" }
[[atom]]
shape = "K3"
)");
        CHECK(j["top"] == 1);
        CHECK(j["name"] == "a \"q\"");
        CHECK(j["lit"] == "C:\\path");
        CHECK(j["space"]["weights"] == json::array({0.25, 0.75}));
        CHECK(j["space"]["big"] == 1000);
        CHECK(j["space"]["neg"].get<double>() == -2.5e-3);
        CHECK(j["space"]["flag"] == true);
        CHECK(std::isinf(j["space"]["inf_val"].get<double>()));
        REQUIRE(j["atom"].size() == 2);
        CHECK(j["atom"][0]["edges"][1] == json::array({1, 2}));
        CHECK(j["atom"][0]["opts"]["b"] == "x");
        CHECK(j["atom"][1]["shape"] == "K3");
        CHECK(j["space"]["big"].is_number_integer());
        CHECK(j["space"]["neg"].is_number_float());
    }

    TEST_CASE("toml errors name the line") {
        auto line_of = [](const std::string& text) {
            try {
                parse_toml(text);
            } catch (const Error& e) {
                CHECK(e.code() == Errc::invalid_argument);
                return std::string(e.what());
            }
            return std::string("no error");
        };
        CHECK(line_of("a = 1\na = 2\n").find("line 2") != std::string::npos);
        CHECK(line_of("a = 1\n\nb = [1, 2\n").find("line 4") != std::string::npos);
        CHECK(line_of("a.b = 1\n").find("dotted") != std::string::npos);
        CHECK(line_of("a = 1 2\n").find("line 1") != std::string::npos);
        CHECK(line_of("a = \"open\n").find("unterminated") != std::string::npos);
        CHECK(line_of("[s]\n[s]\n").find("twice") != std::string::npos);
        CHECK(line_of("a = 1979-05-27\n").find("invalid") != std::string::npos);
        CHECK(line_of("a = \"\"\"x\"\"\"\n").find("multi-line") != std::string::npos);
    }

    TEST_CASE("kernel expressions") {
        const double x3[3] = {0.1, 0.4, 0.8};
        const std::span<const double> p(x3, 3);
        CHECK(parse_kernel("const(0.5)", 3)(p) == 0.5);
        CHECK(parse_kernel("0.5", 3)(p) == 0.5);
        CHECK(parse_kernel("rank1(2, 0.5)", 3)(p) == doctest::Approx(2 / std::sqrt(0.1 * 0.4 * 0.8)));
        CHECK(parse_kernel("rank1(2, 0.5) + 1 + const(0.25)", 3)(p) ==
              doctest::Approx(2 / std::sqrt(0.1 * 0.4 * 0.8) + 1.25));
        CHECK(parse_kernel("cap(rank1(2, 0.5), 3)", 3)(p) == doctest::Approx(3.0));
        CHECK(parse_kernel("pairdist(1, -0.5)", 3)(p) ==
              doctest::Approx(1 / std::sqrt(0.3) + 1 / std::sqrt(0.3) + 1 / std::sqrt(0.4)));
        const double t2[2] = {0, 1};
        CHECK(parse_kernel("table(2, 0, 2, 3, 0)", 2)(std::span<const double>(t2, 2)) == 2.0);
        CHECK(parse_kernel("rank1w(2, 1, 3)", 2)(std::span<const double>(t2, 2)) == 6.0);
        for (const char* badexpr : {"", "const()", "rank1(1)", "foo(1)", "const(1) +", "table(2, 1, 2)", "cap(1, rank1(1, 0))",
                                    "const(1))", "rank1(a, 1)"})
            CHECK_THROWS_AS(parse_kernel(badexpr, 2), Error);
    }

    TEST_CASE("shape names") {
        CHECK(parse_shape_name("K4").isomorphic(Shape::complete(4)));
        CHECK(parse_shape_name("P2").isomorphic(Shape::path(2)));
        CHECK(parse_shape_name("S3").isomorphic(Shape::star(3)));
        CHECK(parse_shape_name("C5").isomorphic(Shape::cycle(5)));
        CHECK(parse_shape_name("E2").size() == 0);
        for (const char* s : {"K", "X3", "K3a", "3"}) CHECK_THROWS_AS(parse_shape_name(s), Error);
    }

    TEST_CASE("shipped configs reproduce the built-in families") {
        same_family(family_from_toml(slurp(config_path("triangles.toml"))), builtin_family("constant", {{"c3", 1.0 / 3}}));
        same_family(family_from_toml(slurp(config_path("edges_triangles.toml"))),
                    builtin_family("constant", {{"c2", 1.0}, {"c3", 0.5}}));
        same_family(family_from_toml(slurp(config_path("powerlaw.toml"))), powerlaw_family({1, 1, 3}));
        same_family(family_from_toml(slurp(config_path("powerlaw_model.toml"))), powerlaw_family({1, 1, 3}));
        same_family(family_from_toml(slurp(config_path("twoblock.toml"))), two_block({2, 0.2}));
        same_family(family_from_toml(slurp(config_path("badp2.toml"))), badP2_family(0.1));
    }

    TEST_CASE("config validation") {
        auto rejects = [](const std::string& text, const std::string& needle) {
            try {
                family_from_toml(text);
            } catch (const Error& e) {
                CHECK(e.code() == Errc::invalid_argument);
                CHECK_MESSAGE(std::string(e.what()).find(needle) != std::string::npos, e.what());
                return;
            }
            FAIL("accepted: " << text);
        };
        const std::string space = "[space]\nkind = \"finite\"\nweights = [1.0]\n";
        rejects(space + "colour = 1\n", "unknown key 'colour'");
        rejects("[space]\nkind = \"finite\"\nweights = [1.0]\nnodes = 4\n", "unit interval only");
        rejects(space + "[[atom]]\nshape = \"K3\"\nkernel = \"const(1)\"\nweight = 2\n", "unknown key 'weight'");
        rejects(space + "[[atom]]\nshape = \"K3\"\n", "kernel");
        rejects("[model]\nname = \"powerlaw\"\nA = 1.0\nalpha = 1.0\n", "alpha must exceed 1");
        rejects("[model]\nname = \"powerlaw\"\nA = 1.0\nalpha = 3.0\ngamma = 2\n", "no parameter 'gamma'");
        rejects("[model]\nname = \"nope\"\n", "unknown model");
        rejects("[space]\nkind = \"circle\"\n", "kind");
        rejects(space + "[series]\nscale = 1.0\nslope = 2\n", "unknown key 'slope'");
        // An explicit edge list works and generalized families keep disconnected shapes.
        const auto f = family_from_toml("generalized = true\n" + space +
                                        "[[atom]]\norder = 4\nedges = [[0, 1], [2, 3]]\nkernel = \"1\"\n");
        CHECK(f.generalized());
        CHECK(f.entries()[0].shape.size() == 2);
        const auto s = family_from_toml(space + "[series]\nscale = 1.0\nexponent = -3.0\nmin_arity = 2\n");
        CHECK(s.series().has_value());
    }

    TEST_CASE("exit codes") {
        auto r = invoke({"gen", "--model", "powerlaw", "--A", "1", "--alpha", "1", "--n", "10", "--out", "x"});
        CHECK(r.code == 2);
        CHECK(r.err.find("alpha must exceed 1") != std::string::npos);
        CHECK(invoke({"gen", "--model", "powerlaw", "--A", "1", "--alpha", "0.5", "--n", "10", "--out", "x"}).code == 2);
        CHECK(invoke({"gen", "--n", "10", "--out", "x"}).code == 2);
        CHECK(invoke({"gen", "--model", "constant", "--c3", "0.5", "--out", "x"}).code == 2);
        CHECK(invoke({"frobnicate"}).code == 2);
        CHECK(invoke({}).code == 2);
        CHECK(invoke({"norm", "--config", "does/not/exist.toml"}).code == 4);
        CHECK(invoke({"stats", "--edges", "does/not/exist.edges"}).code == 4);
        CHECK(invoke({"gen", "--model", "constant", "--c3", "0.5", "--n", "10", "--out", "no/such/dir/x"}).code == 4);
        // Critical family: the survival iteration stalls and reports non-convergence.
        r = invoke({"survival", "--model", "constant", "--c3", "0.16666666666666666", "--max-iter", "5", "--out", "crit.csv"});
        CHECK(r.code == 3);
        CHECK(r.j()["converged"] == false);
        CHECK(fs::exists("crit.csv"));
        CHECK(invoke({"--help"}).code == 0);
        CHECK(invoke({"gen", "--help"}).code == 0);
        CHECK(invoke({"--version"}).out.find('.') != std::string::npos);
    }

    TEST_CASE("gen is reproducible and matches the sampler") {
        for (const char* prefix : {"rep1", "rep2"}) {
            const auto r = invoke({"gen", "--model", "constant", "--c3", "0.5", "--n", "1000", "--seed", "7", "--out", prefix});
            REQUIRE(r.code == 0);
        }
        for (const char* ext : {".edges", ".atoms", ".types.csv"}) CHECK(slurp(std::string("rep1") + ext) == slurp(std::string("rep2") + ext));
        Rng rng(7);
        const auto g = generate(builtin_family("constant", {{"c3", 0.5}}), 1000, SamplerConfig{}, rng);
        CHECK(read_edge_list("rep1.edges") == g.simple_edges());
        CHECK(slurp("rep1.atoms") == format_atom_list(g));

        const auto r = invoke({"gen", "--config", config_path("powerlaw.toml"), "--n", "2000", "--seed", "1", "--out", "pl", "--gz"});
        REQUIRE(r.code == 0);
        const json j = r.j();
        Rng rng2(1);
        const auto g2 = generate(powerlaw_family({1, 1, 3}), 2000, SamplerConfig{}, rng2);
        CHECK(j["e"] == g2.simple_edges().size());
        CHECK(j["e_over_n"].get<double>() == doctest::Approx(double(g2.simple_edges().size()) / 2000));
        CHECK(j["family"]["config"]["space"]["kind"] == "unit_interval");
        CHECK(j["meta"]["seed"] == 1);
        // Compressed files: gzip magic, and they read back.
        const std::string gz = slurp("pl.edges.gz");
        REQUIRE(gz.size() > 2);
        CHECK(static_cast<unsigned char>(gz[0]) == 0x1f);
        CHECK(static_cast<unsigned char>(gz[1]) == 0x8b);
        CHECK(read_edge_list("pl.edges.gz") == g2.simple_edges());
        CHECK(parse_types_csv(read_text("pl.types.csv.gz")) == g2.types());
    }

    TEST_CASE("stats agree with the library") {
        REQUIRE(invoke({"gen", "--model", "constant", "--c2", "1", "--c3", "0.5", "--n", "3000", "--seed", "5", "--out", "st"}).code == 0);
        const auto r = invoke({"stats", "--edges", "st.edges", "--types", "st.types.csv", "--census-depth", "1", "--hist-csv", "st_hist.csv"});
        REQUIRE(r.code == 0);
        const json j = r.j();
        const SimpleGraph g(3000, read_edge_list("st.edges"));
        const auto c = count_subgraphs(g);
        CHECK(j["schema"] == "atomgraph.stats/1");
        CHECK(j["n"] == 3000);
        CHECK(j["e"] == g.edge_count());
        CHECK(j["C1"] == components(g).C1);
        CHECK(j["counts"]["K3"] == c.K3);
        CHECK(j["counts"]["S3"] == c.S3);
        CHECK(j["c2"].get<double>() == doctest::Approx(clustering_c2(c)));
        CHECK(j["a"].get<double>() == doctest::Approx(mixing_a(c)));
        CHECK(j["census"]["samples"] == 3000);
        for (const char* k : {"n", "e", "C1", "C2", "N_ge_k", "degree_histogram", "counts", "c2", "a", "census"}) CHECK(j.contains(k));
        // Without paths the clustering coefficient is undefined and reported as null.
        write_text("one.edges", "0 1\n");
        const json k = invoke({"stats", "--edges", "one.edges"}).j();
        CHECK(k["n"] == 2);
        CHECK(k["c2"].is_null());
        CHECK(k["a"].is_null());
        CHECK(k["census"].is_null());
        CHECK(invoke({"stats", "--edges", "one.edges", "--n", "1"}).code == 2);
    }

    TEST_CASE("norm, survival and perc reports") {
        json j = invoke({"norm", "--model", "powerlaw", "--A", "1", "--B", "1", "--alpha", "3"}).j();
        CHECK(j["value"].get<double>() == doctest::Approx(33).epsilon(0.005));
        CHECK(j["supercritical"] == true);
        j = invoke({"norm", "--model", "powerlaw", "--A", "1", "--alpha", "2"}).j();
        CHECK(j["value"] == "inf");
        CHECK(j["supercritical"] == true);

        auto r = invoke({"survival", "--config", config_path("triangles.toml"), "--out", "tri.csv"});
        REQUIRE(r.code == 0);
        j = r.j();
        // rho = 1 - exp(-(2 rho - rho^2)) for kappa_3 = 1/3.
        const double rho = j["rho"];
        CHECK(rho == doctest::Approx(1 - std::exp(-(2 * rho - rho * rho))).epsilon(1e-9));
        CHECK(slurp("tri.csv").rfind("node,weight,rho\n", 0) == 0);

        r = invoke({"perc", "--config", config_path("triangles.toml"), "--threshold", "--from", "0.3", "--to", "0.5", "--steps", "3"});
        REQUIRE(r.code == 0);
        j = r.j();
        CHECK(j["threshold"].get<double>() == doctest::Approx(0.4030).epsilon(1e-3));
        CHECK(j["polynomial"]["exact"][3] == json::array({"-1", "1"}));
        CHECK(j["reports"].size() == 3);
        r = invoke({"perc", "--model", "constant", "--c3", "0.1", "--threshold"});
        CHECK(r.code == 0);
        CHECK(r.j()["threshold"].is_null());
        CHECK(invoke({"perc", "--model", "constant", "--c3", "0.1"}).code == 2);
    }

    TEST_CASE("thread count does not change results") {
        const std::vector<std::string> ll = {"local-limit", "--model", "constant", "--c3", "0.2", "--t", "2", "--n", "5000",
                                             "--trials", "20000", "--seed", "3"};
        auto a = ll, b = ll;
        a.insert(a.end(), {"--threads", "1"});
        b.insert(b.end(), {"--threads", "4"});
        CHECK(stable(invoke(a).j()) == stable(invoke(b).j()));
        const std::vector<std::string> sw = {"sweep", "--model", "constant", "--param", "c3", "--from", "0.1", "--to", "0.3",
                                             "--steps", "3", "--n", "3000", "--seeds", "2", "--out"};
        auto c = sw, d = sw;
        c.insert(c.end(), {"sw1.csv", "--threads", "1"});
        d.insert(d.end(), {"sw4.csv", "--threads", "3"});
        REQUIRE(invoke(c).code == 0);
        REQUIRE(invoke(d).code == 0);
        CHECK(slurp("sw1.csv") == slurp("sw4.csv"));

        setenv("ATOMGRAPH_THREADS", "3", 1);
        CHECK(default_threads() == 3);
        setenv("ATOMGRAPH_THREADS", "zero", 1);
        CHECK(default_threads() == 1);
        unsetenv("ATOMGRAPH_THREADS");
        CHECK(default_threads() == 1);
    }

    TEST_CASE("golden reports") {
        REQUIRE(invoke({"gen", "--model", "constant", "--c2", "1", "--c3", "0.5", "--n", "300", "--seed", "11", "--out", "gold"}).code == 0);
        auto r = invoke({"stats", "--edges", "gold.edges", "--types", "gold.types.csv", "--census-depth", "1", "--d-max", "20",
                      "--k-max", "8"});
        REQUIRE(r.code == 0);
        golden("stats.json", stable(r.j()).dump(2) + "\n");

        r = invoke({"degree-compare", "--model", "constant", "--c2", "1", "--c3", "0.5", "--n", "500", "--seed", "2", "--d-max",
                 "15", "--csv", "gold_degree.csv"});
        REQUIRE(r.code == 0);
        golden("degree.csv", slurp("gold_degree.csv"));

        r = invoke({"perc", "--model", "constant", "--c2", "0.5", "--c3", "0.3333333333333333", "--p", "0.5", "--threshold"});
        REQUIRE(r.code == 0);
        golden("perc.json", stable(r.j()).dump(2) + "\n");
    }
}
