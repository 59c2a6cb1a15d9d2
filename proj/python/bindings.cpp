#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "atomgraph/branching.hpp"
#include "atomgraph/graphstats.hpp"
#include "atomgraph/kernel.hpp"
#include "atomgraph/models.hpp"
#include "atomgraph/percolation.hpp"
#include "atomgraph/sampler.hpp"
#include "cli.hpp"
#include "family_config.hpp"

namespace py = pybind11;
using namespace atomgraph;

namespace {

py::array_t<std::uint32_t> edge_array(const std::vector<EdgePair>& edges) {
    py::array_t<std::uint32_t> a({static_cast<py::ssize_t>(edges.size()), py::ssize_t{2}});
    auto m = a.mutable_unchecked<2>();
    for (std::size_t i = 0; i < edges.size(); ++i) {
        m(i, 0) = edges[i].first;
        m(i, 1) = edges[i].second;
    }
    return a;
}

std::vector<EdgePair> edge_list(const py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2 || a.shape(1) != 2) throw py::value_error("edges must have shape (m, 2)");
    auto r = a.unchecked<2>();
    std::vector<EdgePair> out(static_cast<std::size_t>(a.shape(0)));
    for (py::ssize_t i = 0; i < a.shape(0); ++i) {
        if (r(i, 0) < 0 || r(i, 1) < 0) throw py::value_error("vertex ids must be nonnegative");
        out[static_cast<std::size_t>(i)] = {static_cast<Vertex>(r(i, 0)), static_cast<Vertex>(r(i, 1))};
    }
    return out;
}

py::dict stats(const SimpleGraph& g) {
    const auto comp = components(g);
    const auto c = count_subgraphs(g);
    py::dict d;
    d["n"] = g.n();
    d["e"] = g.edge_count();
    d["C1"] = comp.C1;
    d["C2"] = comp.C2;
    py::dict counts;
    counts["K2"] = c.K2;
    counts["K3"] = c.K3;
    counts["P2"] = c.P2;
    counts["P3"] = c.P3;
    counts["S3"] = c.S3;
    d["counts"] = counts;
    try {
        d["c2"] = clustering_c2(c);
    } catch (const Error&) {
        d["c2"] = py::none();
    }
    try {
        d["a"] = mixing_a(c);
    } catch (const Error&) {
        d["a"] = py::none();
    }
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Random graphs from kernel families of small atoms";

    static py::exception<Error> error(m, "AtomgraphError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object code = py::str(to_string(e.code()));
            PyErr_SetObject(error.ptr(), py::make_tuple(code, e.what()).ptr());
        }
    });

    py::class_<KernelFamily>(m, "KernelFamily")
        .def_property_readonly("atoms", [](const KernelFamily& f) { return f.entries().size(); })
        .def_property_readonly("types", [](const KernelFamily& f) { return f.space().size(); })
        .def_property_readonly("generalized", &KernelFamily::generalized)
        .def("edge_density", [](const KernelFamily& f) { return edge_density(f); })
        .def("iota", [](const KernelFamily& f) { return integrability_report(f).iota; })
        .def("t_tilde", [](const KernelFamily& f, const std::string& shape) {
            return t_tilde(cli::parse_shape_name(shape), f);
        }, py::arg("shape"));

    m.def("family_from_toml", &cli::family_from_toml, py::arg("text"));
    m.def("builtin_family", &cli::builtin_family, py::arg("name"), py::arg("params"));
    m.def("powerlaw_family", [](double A, double B, double alpha, std::size_t nodes) {
        return powerlaw_family({A, B, alpha}, nodes);
    }, py::arg("A"), py::arg("B"), py::arg("alpha"), py::arg("nodes") = 2048);
    m.def("two_block", [](double A, double p) { return two_block({A, p}); }, py::arg("A"), py::arg("p"));

    m.def("beta_k", &beta_k, py::arg("alpha"), py::arg("k"));
    m.def("powerlaw_norm", [](double A, double B, double alpha) { return powerlaw_norm({A, B, alpha}); });
    m.def("powerlaw_supercritical", [](double A, double B, double alpha) { return powerlaw_supercritical({A, B, alpha}); });
    m.def("solve_C", [](double A, double B, double alpha) {
        const auto s = solve_C({A, B, alpha});
        return py::make_tuple(s.C, s.positive_root);
    });
    m.def("powerlaw_rho", [](double A, double B, double alpha) { return rho({A, B, alpha}); });
    m.def("powerlaw_c2", [](double A, double B, double alpha) { return powerlaw_c2({A, B, alpha}); });
    m.def("powerlaw_a", [](double A, double B, double alpha) { return powerlaw_a({A, B, alpha}); });
    m.def("twoblock_a", [](double A, double p) { return twoblock_a({A, p}); });

    m.def("operator_norm", [](const KernelFamily& f) { return operator_norm(DiscreteBP(to_hyperkernel(f))).value; });
    m.def("survival", [](const KernelFamily& f) {
        const DiscreteBP bp(to_hyperkernel(f));
        const auto s = solve_survival(bp);
        return py::make_tuple(s.rho, py::array_t<double>(static_cast<py::ssize_t>(s.rho_x.size()), s.rho_x.data()));
    });
    m.def("percolation_threshold", [](const KernelFamily& f) { return percolation_threshold_constant(f); });

    m.def("generate", [](const KernelFamily& f, std::size_t n, std::uint64_t seed) {
        Rng rng(seed);
        GeneratedGraph g;
        {
            py::gil_scoped_release release;
            g = generate(f, n, SamplerConfig{}, rng);
        }
        py::dict d;
        d["n"] = g.n();
        d["edges"] = edge_array(g.simple_edges());
        d["types"] = py::array_t<double>(static_cast<py::ssize_t>(g.types().size()), g.types().data());
        d["atoms"] = g.atom_count();
        return d;
    }, py::arg("family"), py::arg("n"), py::arg("seed") = 0);

    m.def("graph_stats", [](const py::array_t<std::int64_t, py::array::c_style | py::array::forcecast>& edges, std::size_t n) {
        auto e = edge_list(edges);
        for (const auto& [u, v] : e)
            if (u >= n || v >= n) throw py::value_error("edge mentions a vertex >= n");
        return stats(SimpleGraph(n, std::move(e)));
    }, py::arg("edges"), py::arg("n"));

    m.def("run_cli", [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
    }, py::arg("args"), "Runs the command-line tool in-process; returns (exit_code, stdout, stderr).");
}
