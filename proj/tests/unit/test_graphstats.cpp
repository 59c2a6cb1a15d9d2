#include <algorithm>
#include <boost/math/distributions/poisson.hpp>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>

#include "atomgraph/graphstats.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace atomgraph;

namespace {

SimpleGraph random_graph(std::mt19937_64& rng, std::size_t n, double p) {
    std::bernoulli_distribution coin(p);
    std::vector<EdgePair> e;
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = u + 1; v < n; ++v)
            if (coin(rng)) e.emplace_back(u, v);
    return SimpleGraph(n, e);
}

SimpleGraph from_mask(std::size_t n, std::uint64_t mask) {
    std::vector<EdgePair> e;
    int bit = 0;
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = u + 1; v < n; ++v, ++bit)
            if ((mask >> bit) & 1U) e.emplace_back(u, v);
    return SimpleGraph(n, e);
}

SimpleGraph from_shape(const Shape& s) {
    std::vector<EdgePair> e;
    for (auto [u, v] : s.edges()) e.emplace_back(u, v);
    return SimpleGraph(s.order(), e);
}

std::vector<std::size_t> bfs_sizes(const SimpleGraph& g) {
    std::vector<bool> seen(g.n(), false);
    std::vector<std::size_t> sizes;
    for (std::size_t s = 0; s < g.n(); ++s) {
        if (seen[s]) continue;
        std::queue<std::size_t> q;
        q.push(s);
        seen[s] = true;
        std::size_t c = 0;
        while (!q.empty()) {
            const auto v = q.front();
            q.pop();
            ++c;
            for (auto u : g.neighbours(v))
                if (!seen[u]) {
                    seen[u] = true;
                    q.push(u);
                }
        }
        sizes.push_back(c);
    }
    std::sort(sizes.rbegin(), sizes.rend());
    return sizes;
}

// Counts by classifying every 2- and 3-edge subset.
SubgraphCounts brute_counts(const SimpleGraph& g) {
    SubgraphCounts c;
    const auto& E = g.edges();
    c.K2 = E.size();
    for (std::size_t a = 0; a < E.size(); ++a)
        for (std::size_t b = a + 1; b < E.size(); ++b) {
            const bool share = E[a].first == E[b].first || E[a].first == E[b].second || E[a].second == E[b].first ||
                               E[a].second == E[b].second;
            c.P2 += share;
            for (std::size_t d = b + 1; d < E.size(); ++d) {
                std::vector<Vertex> vs{E[a].first, E[a].second, E[b].first, E[b].second, E[d].first, E[d].second};
                std::map<Vertex, int> deg;
                for (auto v : vs) ++deg[v];
                int maxdeg = 0;
                for (auto [v, k] : deg) maxdeg = std::max(maxdeg, k);
                if (deg.size() == 3) {
                    ++c.K3;
                } else if (deg.size() == 4 && maxdeg == 3) {
                    ++c.S3;
                } else if (deg.size() == 4) {
                    // Four vertices, degrees 1,2,2,1: path if connected (else P2 + disjoint edge is impossible here).
                    int ones = 0;
                    for (auto [v, k] : deg) ones += k == 1;
                    c.P3 += ones == 2;
                }
            }
        }
    return c;
}

double pearson_over_directed_edges(const SimpleGraph& g) {
    std::vector<double> x, y;
    for (auto [u, v] : g.edges()) {
        x.push_back(double(g.degree(u)));
        y.push_back(double(g.degree(v)));
        x.push_back(double(g.degree(v)));
        y.push_back(double(g.degree(u)));
    }
    const double n = double(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

KernelFamily constants(double a, double b) {
    std::vector<AtomEntry> e;
    if (a > 0) e.push_back({Shape::complete(2), KernelFunction::constant(2, a)});
    if (b > 0) e.push_back({Shape::complete(3), KernelFunction::constant(3, b)});
    return KernelFamily(TypeSpace::finite({1.0}), e);
}

KernelFamily powerlaw(double A, double B, double alpha, std::size_t m = 256) {
    const double g = 1.0 / alpha;
    std::vector<AtomEntry> e;
    if (A > 0) e.push_back({Shape::complete(2), KernelFunction::rank_one(2, A, g)});
    if (B > 0) e.push_back({Shape::complete(3), KernelFunction::rank_one(3, B, g)});
    return KernelFamily(TypeSpace::unit_interval(m, TypeSpace::stratification_for(2.0 * g)), e);
}

double poisson_pmf(double mean, std::size_t k) {
    return boost::math::pdf(boost::math::poisson_distribution<double>(mean), static_cast<double>(k));
}

std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b, std::size_t d_max) {
    std::vector<double> out(d_max + 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; i + j <= d_max && j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

// Direct convolution of the scaled Poisson laws.
std::vector<double> cpo_oracle(const std::vector<double>& lambda, std::size_t d_max) {
    std::vector<double> p(d_max + 1, 0.0);
    p[0] = 1.0;
    for (std::size_t d = 1; d < lambda.size(); ++d) {
        std::vector<double> q(d_max + 1, 0.0);
        for (std::size_t k = 0; k * d <= d_max; ++k) q[k * d] = poisson_pmf(lambda[d], k);
        p = convolve(p, q, d_max);
    }
    return p;
}

std::vector<std::uint16_t> adjacency_of(const SimpleGraph& g) {
    std::vector<std::uint16_t> a(g.n(), 0);
    for (auto [u, v] : g.edges()) {
        a[u] |= std::uint16_t(1U << v);
        a[v] |= std::uint16_t(1U << u);
    }
    return a;
}

bool rooted_isomorphic(const SimpleGraph& a, const SimpleGraph& b) {
    if (a.n() != b.n() || a.edge_count() != b.edge_count()) return false;
    std::vector<int> p(a.n());
    std::iota(p.begin(), p.end(), 0);
    const auto A = adjacency_of(a);
    const auto B = adjacency_of(b);
    do {
        bool ok = true;
        for (std::size_t u = 0; u < a.n() && ok; ++u)
            for (std::size_t v = 0; v < a.n() && ok; ++v)
                ok = (((A[u] >> v) & 1U) == ((B[std::size_t(p[u])] >> p[v]) & 1U));
        if (ok) return true;
    } while (std::next_permutation(p.begin() + 1, p.end()));
    return false;
}

double total(const RootedCensus& c) {
    double s = 0;
    for (auto& [k, v] : c.freq) s += v;
    return s;
}

// Census key of a star with k leaves rooted at its centre, or k triangles sharing the root.
std::string star_code(std::size_t k) { return rooted_code(adjacency_of(from_shape(Shape::star(k)))); }
std::string windmill_code(std::size_t k) {
    std::vector<EdgePair> e;
    for (Vertex i = 0; i < k; ++i) {
        e.emplace_back(0, 2 * i + 1);
        e.emplace_back(0, 2 * i + 2);
        e.emplace_back(2 * i + 1, 2 * i + 2);
    }
    return rooted_code(adjacency_of(SimpleGraph(2 * k + 1, e)));
}

}  // namespace

TEST_SUITE("graphstats") {
    TEST_CASE("simple graph merges parallel edges and drops loops") {
        SimpleGraph g(4, {{1, 0}, {0, 1}, {2, 2}, {2, 3}});
        CHECK(g.edge_count() == 2);
        CHECK(g.degree(0) == 1);
        CHECK(g.degree(2) == 1);
        CHECK_THROWS_AS(SimpleGraph(2, {{0, 5}}), Error);
    }

    TEST_CASE("components on small graphs") {
        auto c = components(SimpleGraph(5, {}));
        CHECK(c.C1 == 1);
        CHECK(c.C2 == 1);
        CHECK(c.count == 5);
        auto t = components(SimpleGraph(5, {{0, 1}, {1, 2}, {0, 2}}));
        CHECK(t.C1 == 3);
        CHECK(t.C2 == 1);
        CHECK(t.count == 3);
        CHECK(t.N_ge_k[2] == 3);
        CHECK(components(SimpleGraph()).count == 0);
    }

    TEST_CASE("components agree with a BFS oracle") {
        std::mt19937_64 rng(3);
        std::uniform_int_distribution<std::size_t> size(1, 50);
        std::uniform_real_distribution<double> prob(0.0, 0.12);
        for (int rep = 0; rep < 100; ++rep) {
            const auto g = random_graph(rng, size(rng), prob(rng));
            const auto sizes = bfs_sizes(g);
            const auto c = components(g, 10);
            CHECK(c.count == sizes.size());
            CHECK(c.C1 == sizes[0]);
            CHECK(c.C2 == (sizes.size() > 1 ? sizes[1] : 0));
            CHECK(c.C1 >= c.C2);
            CHECK(c.N_ge_k[1] == g.n());
            std::size_t hist_total = 0;
            for (auto [s, k] : c.size_counts) hist_total += s * k;
            CHECK(hist_total == g.n());
            for (std::size_t k = 0; k <= 10; ++k) {
                std::size_t n_ge = 0;
                for (auto s : sizes) n_ge += s >= k ? s : 0;
                CHECK(c.N_ge_k[k] == n_ge);
            }
        }
    }

    TEST_CASE("degree histogram sums") {
        std::mt19937_64 rng(4);
        for (int rep = 0; rep < 20; ++rep) {
            const auto g = random_graph(rng, 40, 0.2);
            const auto h = degree_histogram(g, 6);
            std::uint64_t n = h.overflow, deg = 0;
            for (std::size_t d = 0; d < h.counts.size(); ++d) {
                n += h.counts[d];
                deg += d * h.counts[d];
            }
            CHECK(n == g.n());
            if (h.overflow == 0) CHECK(deg == 2 * g.edge_count());
            const auto full = degree_histogram(g, 100);
            std::uint64_t all = 0;
            for (std::size_t d = 0; d < full.counts.size(); ++d) all += d * full.counts[d];
            CHECK(all == 2 * g.edge_count());
        }
        const auto multi = degree_histogram(3, {{0, 1}, {0, 1}, {1, 2}}, 10);
        CHECK(multi.counts[1] == 1);
        CHECK(multi.counts[2] == 1);
        CHECK(multi.counts[3] == 1);
    }

    TEST_CASE("compound Poisson pmf matches direct convolution") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(0.0, 2.0);
        for (int rep = 0; rep < 30; ++rep) {
            std::vector<double> lam(1 + rep % 5);
            for (std::size_t d = 1; d < lam.size(); ++d) lam[d] = u(rng);
            const auto p = compound_poisson_pmf(lam, 60);
            const auto q = cpo_oracle(lam, 60);
            for (std::size_t k = 0; k <= 60; ++k) CHECK(p[k] == doctest::Approx(q[k]).epsilon(1e-10).scale(1e-300));
        }
        // exp(-total) underflows here; the rescaled recursion still gives a proper law.
        const std::vector<double> big{0.0, 900.0};
        const auto p = compound_poisson_pmf(big, 2000);
        const double mass = std::accumulate(p.begin(), p.end(), 0.0);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(p[900] == doctest::Approx(poisson_pmf(900.0, 900)).epsilon(1e-8));
    }

    TEST_CASE("mcpo reference for the power-law family") {
        const double A = 1.0, B = 0.5, alpha = 3.0;
        const auto fam = powerlaw(A, B, alpha, 1024);
        const auto ref = mcpo_reference(fam, 400);
        const auto x = fam.space().nodes();
        const auto w = fam.space().weights();
        double beta_q = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) beta_q += w[i] * std::pow(x[i], -1.0 / alpha);
        const double beta = alpha / (alpha - 1.0);
        CHECK(beta_q == doctest::Approx(beta).epsilon(2e-3));
        for (std::size_t i = 0; i < x.size(); i += 97) {
            const double psi = std::pow(x[i], -1.0 / alpha);
            REQUIRE(ref.intensity[i].size() == 3);
            CHECK(ref.intensity[i][1] == doctest::Approx(2 * A * beta_q * psi).epsilon(1e-10));
            CHECK(ref.intensity[i][2] == doctest::Approx(3 * B * beta_q * beta_q * psi).epsilon(1e-10));
        }
        CHECK(ref.mean == doctest::Approx(2 * A * beta * beta + 6 * B * std::pow(beta, 3)).epsilon(5e-3));
        const double mass = std::accumulate(ref.pmf.begin(), ref.pmf.end(), 0.0);
        CHECK(mass + ref.truncation_mass == doctest::Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("mcpo reference special cases") {
        const auto even = mcpo_reference(powerlaw(0.0, 1.0, 3.0, 512), 300);
        for (std::size_t k = 1; k < even.pmf.size(); k += 2) CHECK(even.pmf[k] == 0.0);

        const double c = 0.7;
        const auto tri = mcpo_reference(constants(0.0, c), 200);
        for (std::size_t k = 0; k <= 100; ++k) {
            CHECK(tri.pmf[2 * k] == doctest::Approx(poisson_pmf(3 * c, k)).epsilon(1e-12).scale(1e-300));
            if (2 * k + 1 <= 200) CHECK(tri.pmf[2 * k + 1] == 0.0);
        }
        CHECK_FALSE(tri.truncation_warning);

        const auto heavy = mcpo_reference(constants(50.0, 0.0), 60);
        CHECK(heavy.truncation_warning);
        CHECK(heavy.truncation_mass > 0.1);
        CHECK_FALSE(mcpo_reference(constants(50.0, 0.0), 1000).truncation_warning);
    }

    TEST_CASE("tv distance basics") {
        std::mt19937_64 rng(6);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        auto random_pmf = [&] {
            std::vector<double> p(20);
            for (auto& v : p) v = u(rng);
            const double s = std::accumulate(p.begin(), p.end(), 0.0);
            for (auto& v : p) v /= s;
            return p;
        };
        for (int rep = 0; rep < 100; ++rep) {
            const auto p = random_pmf(), q = random_pmf(), r = random_pmf();
            CHECK(tv_distance(p, p) == 0.0);
            CHECK(tv_distance(p, r) <= tv_distance(p, q) + tv_distance(q, r) + 1e-12);
        }
        const std::vector<double> a{1, 0, 0}, b{0, 0.5, 0.5};
        CHECK(tv_distance(a, b) == doctest::Approx(1.0));

        DegreeHistogram h;
        h.n = 10;
        h.counts = {0, 10, 0};
        MCPoRef ref;
        ref.pmf = {1.0, 0.0, 0.0};
        CHECK(tv_distance(h, ref) == doctest::Approx(1.0));
        ref.pmf = {0.0, 1.0, 0.0};
        CHECK(tv_distance(h, ref) == 0.0);
        ref.pmf = {0.0, 1.0};
        CHECK_THROWS_AS(tv_distance(h, ref), Error);
    }

    TEST_CASE("compound Poisson laws are Lipschitz in the intensity") {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> u(0.0, 3.0);
        for (int rep = 0; rep < 50; ++rep) {
            std::vector<double> a(6), b(6);
            double diff = 0.0;
            for (std::size_t d = 1; d < 6; ++d) {
                a[d] = u(rng);
                b[d] = u(rng) < 1.0 ? a[d] : u(rng);
                diff += std::abs(a[d] - b[d]);
            }
            const auto p = compound_poisson_pmf(a, 400);
            const auto q = compound_poisson_pmf(b, 400);
            CHECK(tv_distance(p, q) <= diff + 1e-12);
        }
    }

    TEST_CASE("histogram sampled from the reference is close to it") {
        const std::vector<double> lam{0.0, 1.2, 0.8, 0.3};
        MCPoRef ref;
        ref.pmf = compound_poisson_pmf(lam, 1000);
        std::mt19937_64 rng(8);
        DegreeHistogram h;
        h.n = 1000000;
        h.counts.assign(1001, 0);
        std::vector<std::poisson_distribution<int>> po;
        for (double l : lam) po.emplace_back(l > 0 ? l : 1.0);
        for (std::size_t i = 0; i < h.n; ++i) {
            std::size_t d = 0;
            for (std::size_t j = 1; j < lam.size(); ++j) d += j * std::size_t(po[j](rng));
            ++h.counts[d];
        }
        CHECK(tv_distance(h, ref) <= 0.01);
    }

    TEST_CASE("subgraph counts on named graphs") {
        const auto k4 = count_subgraphs(from_shape(Shape::complete(4)));
        CHECK(k4.K3 == 4);
        CHECK(k4.P2 == 12);
        CHECK(k4.S3 == 4);
        CHECK(k4.P3 == 12);
        const auto tri = count_subgraphs(from_shape(Shape::complete(3)));
        CHECK(tri.K3 == 1);
        CHECK(tri.P2 == 3);
        CHECK(tri.P3 == 0);
        CHECK(tri.S3 == 0);
        const auto star = count_subgraphs(from_shape(Shape::star(3)));
        CHECK(star.S3 == 1);
        CHECK(star.P2 == 3);
        CHECK(star.K3 == 0);
        CHECK(star.P3 == 0);
    }

    TEST_CASE("subgraph counts equal brute force on every graph with at most 6 vertices") {
        std::size_t graphs = 0;
        for (std::size_t n = 1; n <= 6; ++n) {
            const std::uint64_t pairs = n * (n - 1) / 2;
            for (std::uint64_t mask = 0; mask < (1ULL << pairs); ++mask) {
                const auto g = from_mask(n, mask);
                const auto a = count_subgraphs(g);
                const auto b = brute_counts(g);
                ++graphs;
                if (a.K2 != b.K2 || a.K3 != b.K3 || a.P2 != b.P2 || a.P3 != b.P3 || a.S3 != b.S3) {
                    FAIL("mismatch at n = " << n << " mask = " << mask);
                }
            }
        }
        CHECK(graphs == 1 + 2 + 8 + 64 + 1024 + 32768);
        std::mt19937_64 rng(9);
        for (int rep = 0; rep < 50; ++rep) {
            const auto g = random_graph(rng, 8, 0.45);
            const auto a = count_subgraphs(g);
            const auto b = brute_counts(g);
            CHECK(a.K3 == b.K3);
            CHECK(a.P2 == b.P2);
            CHECK(a.P3 == b.P3);
            CHECK(a.S3 == b.S3);
        }
    }

    TEST_CASE("clustering coefficient") {
        CHECK(clustering_c2(count_subgraphs(from_shape(Shape::complete(3)))) == 1.0);
        CHECK(clustering_c2(count_subgraphs(from_shape(Shape::complete(4)))) == 1.0);
        CHECK(clustering_c2(count_subgraphs(from_shape(Shape::cycle(5)))) == 0.0);
        CHECK_THROWS_WITH_AS(clustering_c2(count_subgraphs(from_shape(Shape::complete(2)))), doctest::Contains("paths"),
                             Error);
        try {
            clustering_c2(SubgraphCounts{});
        } catch (const Error& e) {
            CHECK(e.code() == Errc::undefined_for_no_paths);
        }
    }

    TEST_CASE("mixing coefficient") {
        try {
            mixing_a(count_subgraphs(from_shape(Shape::cycle(5))));
            FAIL("expected an error");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::degenerate_degrees);
        }
        const auto p3 = from_shape(Shape::path(3));
        CHECK(mixing_a(count_subgraphs(p3)) == doctest::Approx(pearson_over_directed_edges(p3)).epsilon(1e-14));
        CHECK(mixing_a(count_subgraphs(p3)) == doctest::Approx(-0.5));

        std::mt19937_64 rng(10);
        for (int rep = 0; rep < 200; ++rep) {
            const auto g = random_graph(rng, 12, 0.3);
            const auto c = count_subgraphs(g);
            if (c.P2 > 0) {
                const double c2 = clustering_c2(c);
                CHECK(c2 >= 0.0);
                CHECK(c2 <= 1.0);
            }
            double a;
            try {
                a = mixing_a(c);
            } catch (const Error&) {
                continue;
            }
            CHECK(a >= -1.0 - 1e-12);
            CHECK(a <= 1.0 + 1e-12);
            CHECK(a == doctest::Approx(pearson_over_directed_edges(g)).epsilon(1e-10));
        }
    }

    TEST_CASE("tree decompositions") {
        CHECK(tree_decompositions(Shape::complete(3)).size() == 1);
        CHECK(tree_decompositions(Shape::path(2)).size() == 2);
        CHECK(tree_decompositions(Shape::path(3)).size() == 4);
        CHECK(tree_decompositions(Shape::star(3)).size() == 5);
        // Two triangles sharing a vertex.
        const Shape bowtie(5, {{0, 1}, {1, 2}, {0, 2}, {0, 3}, {3, 4}, {0, 4}});
        CHECK(tree_decompositions(bowtie).size() == 2);
        // Triangle with a pendant edge.
        const Shape paw(4, {{0, 1}, {1, 2}, {0, 2}, {2, 3}});
        CHECK(tree_decompositions(paw).size() == 2);
    }

    TEST_CASE("t-tilde with constant edges and triangles") {
        const double a = 0.3, b = 0.2;
        const auto fam = constants(a, b);
        CHECK(t_tilde(Shape::complete(2), fam) == doctest::Approx(a + 3 * b).epsilon(1e-12));
        CHECK(t_tilde(Shape::complete(3), fam) == doctest::Approx(b).epsilon(1e-12));
        CHECK(t_tilde(Shape::path(2), fam) == doctest::Approx(3 * b + std::pow(2 * a + 6 * b, 2) / 2).epsilon(1e-12));
        const auto six = constants(1.0 / 6, 1.0 / 6);
        const double c2 = 3 * t_tilde(Shape::complete(3), six) / t_tilde(Shape::path(2), six);
        CHECK(c2 == doctest::Approx(0.36).epsilon(1e-12));
    }

    TEST_CASE("t-tilde of an edge is the edge density") {
        std::mt19937_64 rng(11);
        for (int rep = 0; rep < 5; ++rep) {
            const auto fam = testutil::random_family(rng, 3, 3, 4);
            CHECK(t_tilde(Shape::complete(2), fam) == doctest::Approx(edge_density(fam)).epsilon(1e-10));
        }
        const auto pl = powerlaw(1.0, 1.0, 3.0);
        CHECK(t_tilde(Shape::complete(2), pl) == doctest::Approx(edge_density(pl)).epsilon(1e-10));
    }

    TEST_CASE("t-tilde matches the power-law closed forms") {
        for (auto [A, B, alpha] : {std::tuple{1.0, 1.0, 3.0}, std::tuple{0.5, 0.2, 4.0}, std::tuple{0.0, 1.0, 3.0}}) {
            const auto fam = powerlaw(A, B, alpha);
            auto beta_k = [&](double k) { return alpha / (alpha - k); };
            const double b = beta_k(1), b2 = beta_k(2), b3 = beta_k(3);
            const double s = 2 * A + 6 * B * b;
            CHECK(t_tilde(Shape::complete(2), fam) == doctest::Approx(A * b * b + 3 * B * b * b * b).epsilon(1e-12));
            CHECK(t_tilde(Shape::complete(3), fam) == doctest::Approx(B * b * b * b).epsilon(1e-12));
            CHECK(t_tilde(Shape::path(2), fam) ==
                  doctest::Approx(3 * B * b * b * b + s * s * b * b * b2 / 2).epsilon(1e-12));
            if (alpha > 3) {
                CHECK(t_tilde(Shape::star(3), fam) ==
                      doctest::Approx(s * s * s * b * b * b * b3 / 6 + 3 * B * s * b * b * b * b2).epsilon(1e-12));
            } else {
                CHECK(std::isinf(t_tilde(Shape::star(3), fam)));
            }
            CHECK(t_tilde(Shape::path(3), fam) ==
                  doctest::Approx(0.5 * s * s * s * b * b * b2 * b2 + 6 * B * s * b * b * b * b2).epsilon(1e-12));
        }
        const double c2 = 3 * t_tilde(Shape::complete(3), powerlaw(0, 1, 3)) / t_tilde(Shape::path(2), powerlaw(0, 1, 3));
        CHECK(c2 == doctest::Approx(1.0 / 28).epsilon(1e-12));
    }

    TEST_CASE("t-tilde diverges for heavy tails") {
        const KernelFamily fam(TypeSpace::unit_interval(64), {{Shape::complete(2), KernelFunction::rank_one(2, 1.0, 0.5)},
                                                              {Shape::complete(3), KernelFunction::rank_one(3, 1.0, 0.5)}});
        CHECK(std::isfinite(t_tilde(Shape::complete(2), fam)));
        CHECK(std::isinf(t_tilde(Shape::path(2), fam)));
        CHECK_THROWS_AS(t_tilde(Shape::path(5), fam), Error);
    }

    TEST_CASE("t-tilde with a clique series") {
        // kappa_r = 0.01 for r = 2..4, given as a series and as explicit cliques.
        CliqueSeries s{0.01, 0.0, 2, 4};
        const KernelFamily series(TypeSpace::finite({1.0}), {}, s);
        std::vector<AtomEntry> e;
        for (std::size_t r = 2; r <= 4; ++r) e.push_back({Shape::complete(r), KernelFunction::constant(r, 0.01)});
        const KernelFamily explicit_family(TypeSpace::finite({1.0}), e);
        for (const auto& F : {Shape::complete(2), Shape::complete(3), Shape::path(2), Shape::path(3), Shape::star(3)})
            CHECK(t_tilde(F, series) == doctest::Approx(t_tilde(F, explicit_family)).epsilon(1e-12));
        const KernelFamily divergent(TypeSpace::finite({1.0}), {}, CliqueSeries{1.0, -2.0, 2});
        CHECK(std::isinf(t_tilde(Shape::complete(3), divergent)));
    }

    TEST_CASE("t-tilde is nondecreasing under truncation") {
        std::mt19937_64 rng(12);
        for (int rep = 0; rep < 4; ++rep) {
            const auto fam = testutil::random_family(rng, 3, 3, 3);
            for (const auto& F : {Shape::complete(2), Shape::complete(3), Shape::path(2), Shape::path(3), Shape::star(3)}) {
                double prev = 0.0;
                for (double M : {0.05, 0.1, 0.2, 0.4, 0.7, 1.0, 2.0}) {
                    const double v = t_tilde(F, truncate(fam, M));
                    CHECK(v >= prev - 1e-12);
                    prev = v;
                }
                CHECK(t_tilde(F, fam) >= prev - 1e-12);
            }
        }
    }

    TEST_CASE("t-tilde predicts subgraph counts of sampled graphs") {
        // Two types with table kernels, so the brute-force integration path is used.
        const KernelFamily fam(TypeSpace::finite({0.4, 0.6}),
                               {{Shape::complete(2), KernelFunction::block_table(2, 2, {0.8, 0.2, 0.2, 0.5})},
                                {Shape::complete(3), KernelFunction::constant(3, 0.25)},
                                {Shape::path(2), KernelFunction::constant(3, 0.1)}});
        const auto sym = symmetrize(fam);
        SubgraphCounts mean;
        const std::size_t n = 20000, reps = 5;
        for (std::size_t rep = 0; rep < reps; ++rep) {
            Rng rng(13, rep);
            const auto c = count_subgraphs(SimpleGraph::from(generate(sym, n, {}, rng)));
            mean.K2 += c.K2;
            mean.K3 += c.K3;
            mean.P2 += c.P2;
            mean.P3 += c.P3;
            mean.S3 += c.S3;
        }
        auto per_n = [&](std::uint64_t v) { return double(v) / double(reps * n); };
        CHECK(per_n(mean.K2) == doctest::Approx(t_tilde(Shape::complete(2), sym)).epsilon(0.02));
        CHECK(per_n(mean.K3) == doctest::Approx(t_tilde(Shape::complete(3), sym)).epsilon(0.05));
        CHECK(per_n(mean.P2) == doctest::Approx(t_tilde(Shape::path(2), sym)).epsilon(0.03));
        CHECK(per_n(mean.P3) == doctest::Approx(t_tilde(Shape::path(3), sym)).epsilon(0.04));
        CHECK(per_n(mean.S3) == doctest::Approx(t_tilde(Shape::star(3), sym)).epsilon(0.04));
    }

    TEST_CASE("rooted codes identify rooted isomorphism classes") {
        std::mt19937_64 rng(14);
        std::vector<SimpleGraph> graphs;
        for (int rep = 0; rep < 60; ++rep) graphs.push_back(random_graph(rng, 5 + rep % 3, 0.45));
        for (std::size_t i = 0; i < graphs.size(); ++i) {
            // Relabelling every vertex except the root keeps the code.
            std::vector<Vertex> p(graphs[i].n());
            std::iota(p.begin(), p.end(), 0);
            std::shuffle(p.begin() + 1, p.end(), rng);
            std::vector<EdgePair> e;
            for (auto [u, v] : graphs[i].edges()) e.emplace_back(p[u], p[v]);
            const SimpleGraph relabelled(graphs[i].n(), e);
            CHECK(rooted_code(adjacency_of(graphs[i])) == rooted_code(adjacency_of(relabelled)));
            for (std::size_t j = i + 1; j < graphs.size(); ++j) {
                const bool same = rooted_code(adjacency_of(graphs[i])) == rooted_code(adjacency_of(graphs[j]));
                CHECK(same == rooted_isomorphic(graphs[i], graphs[j]));
            }
        }
        // Moving the root changes the class.
        const auto path = adjacency_of(from_shape(Shape::path(2)));
        const std::vector<std::uint16_t> middle_root{0b110, 0b001, 0b001};
        CHECK(rooted_code(path) != rooted_code(middle_root));
        CHECK(rooted_code({0}) == "1:");
    }

    TEST_CASE("rooted codes on highly symmetric balls") {
        // Complete bipartite and cycle balls exercise the search with twins pruned.
        const std::vector<Shape> shapes{Shape::complete(12), Shape::cycle(12), Shape::star(11), Shape::empty(12)};
        for (const auto& s : shapes) {
            const auto code = rooted_code(adjacency_of(from_shape(s)));
            CHECK(code.substr(0, 3) == "12:");
        }
        std::vector<EdgePair> e;
        for (Vertex u = 0; u < 6; ++u)
            for (Vertex v = 6; v < 12; ++v) e.emplace_back(u, v);
        const SimpleGraph k66(12, e);
        std::vector<EdgePair> f;
        for (auto [u, v] : e) f.emplace_back((u + 3) % 12, (v + 3) % 12);
        const SimpleGraph shifted(12, f);
        CHECK(rooted_code(adjacency_of(k66)) == rooted_code(adjacency_of(shifted)));
    }

    TEST_CASE("neighbourhood census on simple graphs") {
        const auto empty = neighborhood_census(SimpleGraph(7, {}), 2);
        REQUIRE(empty.freq.size() == 1);
        CHECK(empty.freq.begin()->first == "1:");
        CHECK(empty.freq.begin()->second == 1.0);

        const auto matching = neighborhood_census(SimpleGraph(6, {{0, 1}, {2, 3}, {4, 5}}), 1);
        REQUIRE(matching.freq.size() == 1);
        CHECK(matching.freq.begin()->first == star_code(1));

        const auto triangles = neighborhood_census(SimpleGraph(6, {{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}}), 1);
        REQUIRE(triangles.freq.size() == 1);
        CHECK(triangles.freq.begin()->first == windmill_code(1));

        const auto big = neighborhood_census(from_shape(Shape::star(20)), 1);
        CHECK(big.freq.at(census_overflow) == doctest::Approx(1.0 / 21));
        CHECK(total(big) == doctest::Approx(1.0));

        std::mt19937_64 rng(15);
        const auto g = random_graph(rng, 200, 0.012);
        for (std::size_t t : {1, 2, 3}) CHECK(total(neighborhood_census(g, t)) == doctest::Approx(1.0).epsilon(1e-12));
    }

    TEST_CASE("census is invariant under relabelling") {
        std::mt19937_64 rng(16);
        const auto g = random_graph(rng, 300, 0.008);
        std::vector<Vertex> p(g.n());
        std::iota(p.begin(), p.end(), 0);
        std::shuffle(p.begin(), p.end(), rng);
        std::vector<EdgePair> e;
        for (auto [u, v] : g.edges()) e.emplace_back(p[u], p[v]);
        const auto a = neighborhood_census(g, 2);
        const auto b = neighborhood_census(SimpleGraph(g.n(), e), 2);
        CHECK(census_tv(a, b) < 1e-12);
        CHECK(a.freq.size() > 3);
    }

    TEST_CASE("rooted limit of trivial and single-type families") {
        Rng rng(17);
        const KernelFamily zero(TypeSpace::finite({1.0}), {});
        const auto z = sample_rooted_limit(zero, 2, 100, rng);
        REQUIRE(z.freq.size() == 1);
        CHECK(z.freq.begin()->first == "1:");

        const std::size_t trials = 40000;
        const double c = 0.8;
        const auto edges = sample_rooted_limit(constants(c, 0.0), 1, trials, rng);
        const auto tris = sample_rooted_limit(constants(0.0, c / 2), 1, trials, rng);
        CHECK(total(edges) == doctest::Approx(1.0));
        CHECK(total(tris) == doctest::Approx(1.0));
        for (std::size_t k = 0; k <= 5; ++k) {
            const double p = poisson_pmf(2 * c, k);
            const double tol = 4.0 * std::sqrt(p * (1 - p) / trials) + 1e-3;
            const auto key = k == 0 ? std::string("1:") : star_code(k);
            CHECK(std::abs((edges.freq.contains(key) ? edges.freq.at(key) : 0.0) - p) <= tol);
            const double q = poisson_pmf(1.5 * c, k);
            const double tol3 = 4.0 * std::sqrt(q * (1 - q) / trials) + 1e-3;
            const auto key3 = k == 0 ? std::string("1:") : windmill_code(k);
            CHECK(std::abs((tris.freq.contains(key3) ? tris.freq.at(key3) : 0.0) - q) <= tol3);
        }
    }

    TEST_CASE("rooted limit matches the census of a sampled graph") {
        const KernelFamily fam(TypeSpace::finite({0.3, 0.7}),
                               {{Shape::complete(2), KernelFunction::block_table(2, 2, {1.0, 0.3, 0.3, 0.2})},
                                {Shape::path(2), KernelFunction::constant(3, 0.15)},
                                {Shape::cycle(4), KernelFunction::constant(4, 0.05)}});
        const auto sym = symmetrize(fam);
        Rng rng(18);
        const auto g = SimpleGraph::from(generate(sym, 200000, {}, rng));
        Rng bp(19);
        for (std::size_t t : {1, 2}) {
            const auto emp = neighborhood_census(g, t);
            const auto lim = sample_rooted_limit(sym, t, 200000, bp);
            CHECK(census_tv(emp, lim) <= 0.03);
        }
    }
}
