#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <random>

#include "atomgraph/graphstats.hpp"
#include "atomgraph/percolation.hpp"
#include "atomgraph/sampler.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace atomgraph;

namespace {

KernelFamily single(std::vector<std::pair<Shape, double>> atoms, bool generalized = false) {
    std::vector<AtomEntry> e;
    for (auto& [s, c] : atoms) e.push_back({s, KernelFunction::constant(s.order(), c)});
    auto space = std::make_shared<const TypeSpace>(TypeSpace::finite({1.0}));
    return generalized ? KernelFamily::make_generalized(space, e) : KernelFamily(space, e);
}

double constant_of(const KernelFamily& f, const Shape& s) {
    for (const auto& e : f.entries())
        if (e.shape.isomorphic(s)) {
            const auto* c = std::get_if<KernelFunction::Constant>(&e.kernel.node());
            REQUIRE(c != nullptr);
            return c->value;
        }
    return 0.0;
}

double iota(const KernelFamily& f) { return integrability_report(f).iota; }

// theta by brute force over edge subsets with Shape::components.
double theta_oracle(const Shape& F, double p) {
    double s = 0.0;
    for (std::uint64_t mask = 0; mask < (1ULL << F.size()); ++mask) {
        const int k = std::popcount(mask);
        double pairs = 0;
        for (const auto& c : F.spanning(mask).components()) pairs += double(c.size()) * double(c.size() - 1) / 2;
        s += pairs * std::pow(p, k) * std::pow(1 - p, double(F.size()) - k);
    }
    return s;
}

struct Moments {
    double sum = 0, sq = 0;
    int n = 0;
    void add(double x) {
        sum += x;
        sq += x * x;
        ++n;
    }
    double mean() const { return sum / n; }
    double var_of_mean() const { return (sq / n - mean() * mean()) / (n - 1); }
};

}  // namespace

TEST_SUITE("percolation") {
    TEST_CASE("connectify splits disconnected atoms") {
        const double c = 0.4;
        const Shape k3k2(5, {{0, 1}, {1, 2}, {0, 2}, {3, 4}});
        const auto f = connectify(single({{k3k2, c}}, true));
        CHECK_FALSE(f.generalized());
        CHECK(f.entries().size() == 2);
        CHECK(constant_of(f, Shape::complete(3)) == doctest::Approx(c));
        CHECK(constant_of(f, Shape::complete(2)) == doctest::Approx(c));

        const auto connected = single({{Shape::complete(3), 0.2}, {Shape::path(2), 0.1}});
        const auto same = connectify(connected);
        REQUIRE(same.entries().size() == 2);
        CHECK(same.entries()[0].shape == connected.entries()[0].shape);
        CHECK(same.entries()[1].shape == connected.entries()[1].shape);
    }

    TEST_CASE("connectify preserves iota") {
        std::mt19937_64 rng(1);
        std::uniform_int_distribution<std::size_t> order(1, 6);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::bernoulli_distribution coin(0.35);
        for (int rep = 0; rep < 20; ++rep) {
            std::vector<std::pair<Shape, double>> atoms;
            for (int a = 0; a < 3; ++a) {
                const std::size_t r = order(rng);
                std::vector<Shape::Edge> e;
                for (std::size_t x = 0; x < r; ++x)
                    for (std::size_t y = x + 1; y < r; ++y)
                        if (coin(rng)) e.emplace_back(x, y);
                atoms.emplace_back(Shape(r, e), u(rng));
            }
            const auto g = single(atoms, true);
            const auto f = connectify(g);
            CHECK(iota(f) == doctest::Approx(iota(g)).epsilon(1e-14));
            for (const auto& e : f.entries()) CHECK(e.shape.connected());
        }
        // Table kernels on several types: marginals over the other component.
        for (int rep = 0; rep < 5; ++rep) {
            auto space = std::make_shared<const TypeSpace>(TypeSpace::finite(testutil::random_weights(rng, 3)));
            const Shape s(4, {{0, 1}, {2, 3}});
            const auto g = KernelFamily::make_generalized(space, {{s, testutil::random_table(rng, 4, 3)}});
            CHECK(iota(connectify(g)) == doctest::Approx(iota(g)).epsilon(1e-12));
        }
    }

    TEST_CASE("bond transform of a triangle") {
        const double c = 0.3, p = 0.35;
        const auto t = bond_transform(single({{Shape::complete(3), c}}), p);
        CHECK(t.generalized());
        CHECK(t.entries().size() == 4);
        CHECK(constant_of(t, Shape::complete(3)) == doctest::Approx(c * p * p * p));
        CHECK(constant_of(t, Shape::path(2)) == doctest::Approx(3 * c * p * p * (1 - p)));
        CHECK(constant_of(t, Shape(3, {{0, 1}})) == doctest::Approx(3 * c * p * (1 - p) * (1 - p)));
        CHECK(constant_of(t, Shape::empty(3)) == doctest::Approx(c * std::pow(1 - p, 3)));

        const auto one = bond_transform(single({{Shape::complete(3), c}}), 1.0);
        REQUIRE(one.entries().size() == 1);
        CHECK(one.entries()[0].shape == Shape::complete(3));
        const auto zero = bond_transform(single({{Shape::complete(3), c}}), 0.0);
        REQUIRE(zero.entries().size() == 1);
        CHECK(zero.entries()[0].shape.size() == 0);
    }

    TEST_CASE("bond transform guards") {
        CHECK_NOTHROW(bond_transform(single({{Shape::complete(4), 0.1}}), 0.5));
        try {
            bond_transform(single({{Shape::complete(5), 0.1}}), 0.5);
            FAIL("expected TooManyEdges");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::too_many_edges);
        }
        CHECK_THROWS_AS(bond_transform(single({{Shape::complete(3), 0.1}}), 1.5), Error);
    }

    TEST_CASE("theta and susceptibility") {
        for (double p : {0.0, 0.1, 0.37, 0.8, 1.0}) {
            CHECK(theta_F(Shape::complete(2), p) == doctest::Approx(p));
            CHECK(theta_F(Shape::complete(3), p) == doctest::Approx(3 * (p + (1 - p) * p * p)));
            CHECK(susceptibility_chi(Shape::complete(2), p) == doctest::Approx(1 + p));
            CHECK(susceptibility_chi(Shape::complete(3), p) == doctest::Approx(1 + 2 * (p + (1 - p) * p * p)));
        }
        CHECK(susceptibility_chi(Shape::complete(3), 1.0) == doctest::Approx(3.0));
        std::mt19937_64 rng(2);
        for (int rep = 0; rep < 20; ++rep) {
            const auto F = testutil::random_connected_shape(rng, 2 + rep % 5);
            CHECK(theta_F(F, 1.0) == doctest::Approx(F.order() * (F.order() - 1) / 2.0));
            const auto poly = theta_polynomial(F);
            double prev = -1.0;
            for (int step = 0; step <= 20; ++step) {
                const double p = step / 20.0;
                const double t = theta_F(F, p);
                CHECK(t == doctest::Approx(theta_oracle(F, p)).epsilon(1e-12));
                double v = 0;
                for (std::size_t k = poly.size(); k-- > 0;) v = v * p + double(poly[k]);
                CHECK(v == doctest::Approx(t).epsilon(1e-10).scale(1.0));
                CHECK(t > prev);
                prev = t;
            }
        }
    }

    TEST_CASE("xi of the transformed family equals the theta sum") {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(0.0, 0.5);
        for (int rep = 0; rep < 10; ++rep) {
            std::vector<std::pair<Shape, double>> atoms;
            for (int a = 0; a < 3; ++a) atoms.emplace_back(testutil::random_connected_shape(rng, 2 + a), u(rng));
            const auto fam = single(atoms);
            const auto poly = xi_polynomial(fam);
            double prev = 0.0;
            for (double p : {0.0, 0.2, 0.5, 0.7, 1.0}) {
                double direct = 0.0;
                for (auto& [s, c] : atoms) direct += c * theta_F(s, p);
                const double xi = clique_edge_density(connectify(bond_transform(fam, p)));
                CHECK(xi == doctest::Approx(direct).epsilon(1e-12));
                CHECK(poly(p) == doctest::Approx(direct).epsilon(1e-12).scale(1.0));
                CHECK(xi >= prev - 1e-15);
                prev = xi;
            }
            CHECK(prev == doctest::Approx(clique_edge_density(fam)).epsilon(1e-12));
        }
        const auto tri = xi_polynomial(single({{Shape::complete(3), 1.0 / 3}}));
        REQUIRE(tri.exact.size() == 4);
        CHECK(tri.exact[0] == std::pair<std::string, std::string>{"0", "1"});
        CHECK(tri.exact[1] == std::pair<std::string, std::string>{"1", "1"});
        CHECK(tri.exact[2] == std::pair<std::string, std::string>{"1", "1"});
        CHECK(tri.exact[3] == std::pair<std::string, std::string>{"-1", "1"});
        const auto tenth = xi_polynomial(single({{Shape::complete(2), 0.1}}));
        CHECK(tenth.exact[1] == std::pair<std::string, std::string>{"1", "10"});
    }

    TEST_CASE("constant thresholds") {
        CHECK(percolation_threshold_constant(single({{Shape::complete(2), 2.0}})) == doctest::Approx(0.25).epsilon(1e-9));
        const double pc = percolation_threshold_constant(single({{Shape::complete(3), 1.0 / 3}}));
        auto cubic = [](double p) { return p + p * p - p * p * p - 0.5; };
        auto [lo, hi] = boost::math::tools::bisect(cubic, 0.0, 1.0, boost::math::tools::eps_tolerance<double>(50));
        CHECK(pc == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-9));
        CHECK(pc == doctest::Approx(0.4030).epsilon(1e-3));
        for (double c : {1.0 / 6, 0.1}) {
            try {
                percolation_threshold_constant(single({{Shape::complete(3), c}}));
                FAIL("expected NoThreshold");
            } catch (const Error& e) {
                CHECK(e.code() == Errc::no_threshold);
            }
        }
        std::mt19937_64 rng(4);
        const auto tab = testutil::random_family(rng, 2, 2, 3);
        CHECK_THROWS_AS(percolation_threshold_constant(tab), Error);
    }

    TEST_CASE("percolation reports") {
        const auto fam = single({{Shape::complete(3), 1.0 / 3}, {Shape::path(2), 0.1}});
        const auto rep = percolation_report(fam, 0.5, true);
        CHECK(rep.constant);
        CHECK(rep.norm == doctest::Approx(2 * rep.xi));
        REQUIRE(rep.threshold);
        CHECK(rep.polynomial->operator()(*rep.threshold) == doctest::Approx(0.5).epsilon(1e-8));
        CHECK(percolation_report(fam, 1.0).xi == doctest::Approx(clique_edge_density(fam)));
        CHECK_FALSE(percolation_report(single({{Shape::complete(3), 0.1}}), 0.5, true).threshold);

        std::mt19937_64 rng(5);
        const auto tab = testutil::random_family(rng, 3, 2, 3);
        const auto r2 = percolation_report(tab, 0.7);
        CHECK_FALSE(r2.constant);
        CHECK(r2.norm >= 2 * r2.xi * (1 - 1e-9));
    }

    TEST_CASE("site transform") {
        auto space = std::make_shared<const TypeSpace>(TypeSpace::unit_interval(16));
        const KernelFamily unit(space, {{Shape::complete(2), KernelFunction::constant(2, 1.0)}});
        try {
            site_transform(unit, 0.5);
            FAIL("expected Unsupported");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::unsupported);
        }

        std::mt19937_64 rng(6);
        const auto fam = testutil::random_family(rng, 2, 3, 3);
        const auto same = site_transform(fam, 1.0);
        CHECK(same.space().size() == 2);
        CHECK(edge_density(same) == doctest::Approx(edge_density(fam)).epsilon(1e-12));
        CHECK(t_tilde(Shape::path(2), same) == doctest::Approx(t_tilde(Shape::path(2), fam)).epsilon(1e-12));

        for (double p : {0.3, 0.75}) {
            const auto s = site_transform(fam, p);
            CHECK(s.space().size() == 3);
            CHECK(iota(s) == doctest::Approx(p * iota(fam)).epsilon(1e-12));
        }

        const double c = 0.4, p = 0.6;
        const auto tri = site_transform(single({{Shape::complete(3), c}}), p);
        const std::vector<double> kept3{0, 0, 0}, kept2{0, 0}, kept1{0}, star2{0, 1};
        for (const auto& e : tri.entries()) {
            if (e.shape.order() == 3) CHECK(e.kernel(kept3) == doctest::Approx(c));
            if (e.shape.order() == 2) {
                CHECK(e.kernel(kept2) == doctest::Approx(3 * c * (1 - p)));
                CHECK(e.kernel(star2) == 0.0);
            }
            if (e.shape.order() == 1) CHECK(e.kernel(kept1) == doctest::Approx(3 * c * (1 - p) * (1 - p)));
        }
    }

    TEST_CASE("site transform matches vertex percolation of sampled graphs") {
        const double p = 0.6;
        const auto fam = single({{Shape::complete(2), 1.0}, {Shape::complete(3), 0.2}});
        const auto site = site_transform(fam, p);
        const std::size_t n = 50000;
        Rng a(7), b(8), c(9);
        const auto perc = percolate_vertices(generate(fam, n, {}, a), p, b);
        const double direct = double(SimpleGraph::from(perc).edge_count()) / double(perc.n());
        const auto g = generate(site, n, {}, c);
        std::size_t kept = 0;
        for (double t : g.types()) kept += t < 1.0;
        const double transformed = double(SimpleGraph::from(g).edge_count()) / double(kept);
        CHECK(transformed == doctest::Approx(direct).epsilon(0.05));
        CHECK(double(kept) / double(n) == doctest::Approx(p).epsilon(0.02));
    }

    TEST_CASE("bond percolation has the distribution of the transformed family") {
        const double c = 1.0 / 3, p = 0.6;
        const auto fam = single({{Shape::complete(3), c}});
        const auto transformed = connectify(bond_transform(fam, p));
        const std::size_t n = 50000;
        Moments e1, e2, t1, t2, c1, c2;
        for (int seed = 0; seed < 30; ++seed) {
            Rng r(10, seed);
            Rng keep = r.split(100);
            const auto g1 = SimpleGraph::from(percolate_edges(generate(fam, n, {}, r), p, keep));
            Rng s(11, seed);
            const auto g2 = SimpleGraph::from(generate(transformed, n, {}, s));
            const auto k1 = count_subgraphs(g1), k2 = count_subgraphs(g2);
            e1.add(double(k1.K2));
            e2.add(double(k2.K2));
            t1.add(double(k1.K3));
            t2.add(double(k2.K3));
            c1.add(double(components(g1).C1));
            c2.add(double(components(g2).C1));
        }
        for (auto [x, y] : {std::pair{&e1, &e2}, std::pair{&t1, &t2}, std::pair{&c1, &c2}}) {
            const double se = std::sqrt(x->var_of_mean() + y->var_of_mean());
            CHECK(std::abs(x->mean() - y->mean()) <= 3 * se);
        }
        CHECK(c1.mean() / n > 0.05);
    }
}
