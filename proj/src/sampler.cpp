#include "atomgraph/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "atomgraph/error.hpp"

namespace atomgraph {

namespace {

struct Ctx {
    const std::vector<double>& x;
    std::size_t n;
    std::size_t r;
    const SamplerConfig& cfg;
};

bool distinct(std::span<const Vertex> t) {
    for (std::size_t i = 0; i < t.size(); ++i)
        for (std::size_t j = i + 1; j < t.size(); ++j)
            if (t[i] == t[j]) return false;
    return true;
}

double eval_at(const KernelFunction& f, std::span<const Vertex> t, const std::vector<double>& x) {
    double buf[64];
    for (std::size_t i = 0; i < t.size(); ++i) buf[i] = x[t[i]];
    return f(std::span<const double>(buf, t.size()));
}

std::uint64_t poisson(double mean, Rng& rng) {
    if (!(mean > 0.0)) return 0;
    std::poisson_distribution<std::uint64_t> d(mean);
    return d(rng);
}

void check_budget(double lambda, const Ctx& c) {
    if (!(lambda <= c.cfg.max_candidates))
        fail(Errc::intensity_overflow, "expected candidate count " + std::to_string(lambda) + " exceeds the budget");
}

// Candidates uniform over [n]^r with per-tuple intensity M / n^{r-1};
// accepted with probability f / M.
void sample_uniform(const KernelFunction& f, double M, bool always_accept, const Ctx& c, Rng& rng,
                    std::vector<Vertex>& out) {
    if (!(M > 0.0)) return;
    if (!std::isfinite(M)) fail(Errc::unbounded_kernel, "no finite thinning bound for " + f.describe());
    const double lambda = M * static_cast<double>(c.n);
    check_budget(lambda, c);
    const std::uint64_t N = poisson(lambda, rng);
    std::uniform_int_distribution<Vertex> pick(0, static_cast<Vertex>(c.n - 1));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Vertex> t(c.r);
    for (std::uint64_t k = 0; k < N; ++k) {
        for (auto& v : t) v = pick(rng);
        if (!distinct(t)) continue;
        if (!always_accept && u(rng) * M >= eval_at(f, t, c.x)) continue;
        out.insert(out.end(), t.begin(), t.end());
    }
}

std::vector<double> vertex_factor(const KernelFunction::RankOneProduct& p, const std::vector<double>& x) {
    std::vector<double> phi(x.size());
    for (std::size_t v = 0; v < x.size(); ++v)
        phi[v] = p.per_type.empty() ? std::pow(x[v], -p.gamma) : p.per_type[static_cast<std::size_t>(x[v])];
    return phi;
}

double rank_one_intensity(const KernelFunction::RankOneProduct& p, const std::vector<double>& phi, const Ctx& c) {
    const double W = std::accumulate(phi.begin(), phi.end(), 0.0);
    return p.coef * std::pow(W, static_cast<double>(c.r)) / std::pow(static_cast<double>(c.n), double(c.r) - 1.0);
}

// Each coordinate drawn proportionally to phi; per-tuple intensity
// coef * prod phi / n^{r-1}. `accept` returns the thinning ratio.
template <class Accept>
void sample_rank_one(const KernelFunction::RankOneProduct& p, const Ctx& c, Rng& rng, std::vector<Vertex>& out,
                     Accept accept) {
    const auto phi = vertex_factor(p, c.x);
    const double lambda = rank_one_intensity(p, phi, c);
    if (!(lambda > 0.0)) return;
    check_budget(lambda, c);
    const std::uint64_t N = poisson(lambda, rng);
    std::discrete_distribution<Vertex> pick(phi.begin(), phi.end());
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Vertex> t(c.r);
    for (std::uint64_t k = 0; k < N; ++k) {
        for (auto& v : t) v = pick(rng);
        if (!distinct(t)) continue;
        const double ratio = accept(t);
        if (ratio < 1.0 && u(rng) >= ratio) continue;
        out.insert(out.end(), t.begin(), t.end());
    }
}

// Candidates grouped by type tuple; exact intensities, no thinning beyond repeats.
void sample_table(const KernelFunction::BlockTable& tb, const Ctx& c, Rng& rng, std::vector<Vertex>& out) {
    const std::size_t k = tb.types;
    std::vector<std::vector<Vertex>> members(k);
    for (std::size_t v = 0; v < c.n; ++v) members[static_cast<std::size_t>(c.x[v])].push_back(static_cast<Vertex>(v));
    const double scale = std::pow(static_cast<double>(c.n), double(c.r) - 1.0);
    std::vector<std::size_t> ty(c.r);
    std::vector<Vertex> t(c.r);
    double total = 0.0;
    for (double v : tb.values) total += v;
    check_budget(total * static_cast<double>(c.n), c);
    for (std::size_t idx = 0; idx < tb.values.size(); ++idx) {
        if (tb.values[idx] == 0.0) continue;
        std::size_t rem = idx;
        double count = 1.0;
        for (std::size_t i = c.r; i-- > 0;) {
            ty[i] = rem % k;
            rem /= k;
        }
        for (std::size_t i = 0; i < c.r; ++i) count *= static_cast<double>(members[ty[i]].size());
        const std::uint64_t N = poisson(tb.values[idx] * count / scale, rng);
        for (std::uint64_t j = 0; j < N; ++j) {
            for (std::size_t i = 0; i < c.r; ++i) {
                const auto& m = members[ty[i]];
                std::uniform_int_distribution<std::size_t> pick(0, m.size() - 1);
                t[i] = m[pick(rng)];
            }
            if (!distinct(t)) continue;
            out.insert(out.end(), t.begin(), t.end());
        }
    }
}

// Sorted circle positions with range counting.
class CircleIndex {
  public:
    explicit CircleIndex(const std::vector<double>& x) : order_(x.size()) {
        std::iota(order_.begin(), order_.end(), Vertex{0});
        std::sort(order_.begin(), order_.end(), [&](Vertex a, Vertex b) { return x[a] < x[b]; });
        sorted_.resize(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) sorted_[i] = x[order_[i]];
    }

    // Vertices y with lo <= y - x (mod 1) < hi (half-open), for 0 <= lo < hi <= 1,
    // further restricted to offsets strictly above `floor_excl` when given.
    struct Range {
        std::size_t a0, a1, b0, b1;
        std::size_t size() const { return (a1 - a0) + (b1 - b0); }
    };

    Range closed_open(double x, double lo, double hi) const {
        auto lb = [&](double v) {
            return static_cast<std::size_t>(std::lower_bound(sorted_.begin(), sorted_.end(), v) - sorted_.begin());
        };
        return {lb(x + lo), lb(x + hi), lb(x + lo - 1.0), lb(x + hi - 1.0)};
    }
    Range open_closed(double x, double lo, double hi) const {
        auto ub = [&](double v) {
            return static_cast<std::size_t>(std::upper_bound(sorted_.begin(), sorted_.end(), v) - sorted_.begin());
        };
        return {ub(x + lo), ub(x + hi), ub(x + lo - 1.0), ub(x + hi - 1.0)};
    }
    Vertex select(const Range& r, std::size_t j) const {
        const std::size_t na = r.a1 - r.a0;
        return j < na ? order_[r.a0 + j] : order_[r.b0 + (j - na)];
    }

  private:
    std::vector<Vertex> order_;
    std::vector<double> sorted_;
};

// coef * sum_{a<b} d(x_a, x_b)^p with p < 0, by dyadic distance bands.
void sample_pair_distance(const KernelFunction& f, const KernelFunction::PairDistancePower& pd, const Ctx& c,
                          Rng& rng, std::vector<Vertex>& out) {
    if (pd.exponent >= 0.0) {
        sample_uniform(f, f.sup(), false, c, rng, out);
        return;
    }
    const double p = pd.exponent;
    const std::size_t r = c.r;
    const double n = static_cast<double>(c.n);
    const double pairs = static_cast<double>(r * (r - 1) / 2);
    std::vector<std::pair<int, int>> terms;
    for (std::size_t a = 0; a < r; ++a)
        for (std::size_t b = a + 1; b < r; ++b) terms.emplace_back(static_cast<int>(a), static_cast<int>(b));
    const CircleIndex idx(c.x);
    std::uniform_int_distribution<Vertex> any(0, static_cast<Vertex>(c.n - 1));
    std::uniform_int_distribution<std::size_t> which(0, terms.size() - 1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Vertex> t(r);

    auto emit = [&](Vertex a, Vertex b) {
        const auto [pa, pb] = terms[which(rng)];
        for (auto& v : t) v = any(rng);
        t[static_cast<std::size_t>(pa)] = a;
        t[static_cast<std::size_t>(pb)] = b;
        if (distinct(t)) out.insert(out.end(), t.begin(), t.end());
    };

    const std::size_t K = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(2.0 * std::log2(n))) + 2);
    std::vector<std::uint64_t> prefix(c.n + 1);
    for (std::size_t k = 1; k <= K; ++k) {
        const double lo = std::ldexp(1.0, -static_cast<int>(k) - 1);
        const double hi = std::ldexp(1.0, -static_cast<int>(k));
        // Offsets t = y - x mod 1 with d in (lo, hi]: t in (lo, hi] or 1 - t in (lo, hi], t > 1/2.
        auto right = [&](Vertex v) { return idx.open_closed(c.x[v], lo, hi); };
        const double left_lo = k == 1 ? std::nextafter(0.5, 1.0) : 1.0 - hi;
        auto left = [&](Vertex v) { return idx.closed_open(c.x[v], left_lo, 1.0 - lo); };
        for (std::size_t v = 0; v < c.n; ++v)
            prefix[v + 1] = prefix[v] + right(static_cast<Vertex>(v)).size() + left(static_cast<Vertex>(v)).size();
        const double bound = std::pow(lo, p);
        const double lambda = pd.coef * pairs * bound * static_cast<double>(prefix[c.n]) / n;
        check_budget(lambda, c);
        const std::uint64_t N = poisson(lambda, rng);
        std::uniform_int_distribution<std::uint64_t> pick(0, prefix[c.n] - 1);
        for (std::uint64_t j = 0; j < N; ++j) {
            const std::uint64_t q = pick(rng);
            const auto a = static_cast<Vertex>(std::upper_bound(prefix.begin(), prefix.end(), q) - prefix.begin() - 1);
            std::size_t off = q - prefix[a];
            const auto rr = right(a);
            const Vertex b = off < rr.size() ? idx.select(rr, off) : idx.select(left(a), off - rr.size());
            const double d = circle_distance(c.x[a], c.x[b]);
            if (u(rng) * bound >= std::pow(d, p)) continue;
            emit(a, b);
        }
    }
    // Innermost band d <= 2^{-K-1}: exact per-pair Poisson counts.
    const double delta = std::ldexp(1.0, -static_cast<int>(K) - 1);
    for (std::size_t v = 0; v < c.n; ++v) {
        const auto a = static_cast<Vertex>(v);
        const auto near = idx.closed_open(c.x[a], 0.0, std::nextafter(delta, 1.0));
        const auto wrap = idx.closed_open(c.x[a], 1.0 - delta, 1.0);
        for (const auto& rng_set : {near, wrap}) {
            for (std::size_t j = 0; j < rng_set.size(); ++j) {
                const Vertex b = idx.select(rng_set, j);
                if (b == a) continue;
                const double d = circle_distance(c.x[a], c.x[b]);
                if (d == 0.0) fail(Errc::unbounded_kernel, "two vertices share a type under a singular pair kernel");
                const std::uint64_t N = poisson(pd.coef * pairs * std::pow(d, p) / n, rng);
                for (std::uint64_t i = 0; i < N; ++i) emit(a, b);
            }
        }
    }
}

void sample_kernel(const KernelFunction& f, const Ctx& c, Rng& rng, std::vector<Vertex>& out) {
    if (f.is_zero()) return;
    const auto& node = f.node();
    if (const auto* k = std::get_if<KernelFunction::Constant>(&node)) {
        sample_uniform(f, k->value, true, c, rng, out);
    } else if (const auto* p = std::get_if<KernelFunction::RankOneProduct>(&node)) {
        sample_rank_one(*p, c, rng, out, [](std::span<const Vertex>) { return 1.0; });
    } else if (const auto* tb = std::get_if<KernelFunction::BlockTable>(&node)) {
        if (tb->values.size() <= 1'000'000) {
            sample_table(*tb, c, rng, out);
        } else {
            sample_uniform(f, f.sup(), false, c, rng, out);
        }
    } else if (const auto* pd = std::get_if<KernelFunction::PairDistancePower>(&node)) {
        sample_pair_distance(f, *pd, c, rng, out);
    } else if (const auto* cap = std::get_if<KernelFunction::Capped>(&node)) {
        const auto* inner = std::get_if<KernelFunction::RankOneProduct>(&cap->inner->node());
        if (inner != nullptr) {
            const auto phi = vertex_factor(*inner, c.x);
            if (rank_one_intensity(*inner, phi, c) < cap->cap * static_cast<double>(c.n)) {
                sample_rank_one(*inner, c, rng, out, [&](std::span<const Vertex> t) {
                    const double v = eval_at(*cap->inner, t, c.x);
                    return v <= cap->cap ? 1.0 : cap->cap / v;
                });
                return;
            }
        }
        sample_uniform(f, cap->cap, false, c, rng, out);
    } else {
        const auto& terms = std::get<KernelFunction::SumOfTerms>(node).terms;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            Rng sub = rng.split(i);
            sample_kernel(terms[i], c, sub, out);
        }
    }
}

// Every ordered distinct r-tuple; n^r bounded by the caller.
void sample_per_tuple(const KernelFunction& f, const Ctx& c, bool bernoulli, Rng& rng, std::vector<Vertex>& out) {
    const double scale = std::pow(static_cast<double>(c.n), double(c.r) - 1.0);
    std::vector<Vertex> t(c.r, 0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (;;) {
        if (distinct(t)) {
            const double mean = eval_at(f, t, c.x) / scale;
            const std::uint64_t copies = bernoulli ? (u(rng) < std::min(mean, 1.0) ? 1 : 0) : poisson(mean, rng);
            for (std::uint64_t i = 0; i < copies; ++i) out.insert(out.end(), t.begin(), t.end());
        }
        std::size_t i = c.r;
        while (i-- > 0) {
            if (++t[i] < c.n) break;
            t[i] = 0;
        }
        if (i == static_cast<std::size_t>(-1)) break;
    }
}

}  // namespace

VertexTypes sample_types(std::size_t n, const TypeSpace& space, Rng& rng) {
    require(n >= 1, "need at least one vertex");
    VertexTypes out{std::vector<double>(n), rng.seed(), rng.stream()};
    if (space.is_finite()) {
        auto w = space.weights();
        std::discrete_distribution<int> d(w.begin(), w.end());
        for (auto& v : out.x) v = d(rng);
    } else {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        for (auto& v : out.x) v = 1.0 - u(rng);
    }
    return out;
}

GeneratedGraph::GeneratedGraph(std::size_t n, std::vector<double> types) : n_(n), types_(std::move(types)) {
    require(n_ <= std::numeric_limits<Vertex>::max(), "too many vertices");
}

std::uint32_t GeneratedGraph::add_shape(const Shape& s) {
    for (std::size_t i = 0; i < shapes_.size(); ++i)
        if (shapes_[i] == s) return static_cast<std::uint32_t>(i);
    shapes_.push_back(s);
    return static_cast<std::uint32_t>(shapes_.size() - 1);
}

void GeneratedGraph::add_atom(std::uint32_t shape, std::span<const Vertex> vertices) {
    require(shape < shapes_.size() && shapes_[shape].order() == vertices.size(), "atom does not match its shape");
    atom_shape_.push_back(shape);
    atom_vertices_.insert(atom_vertices_.end(), vertices.begin(), vertices.end());
    atom_offset_.push_back(atom_vertices_.size());
}

void GeneratedGraph::add_edge(Vertex u, Vertex v) {
    require(u != v && u < n_ && v < n_, "edge endpoints must be distinct vertices");
    loose_.emplace_back(std::min(u, v), std::max(u, v));
}

std::span<const Vertex> GeneratedGraph::atom(std::size_t i) const {
    return {atom_vertices_.data() + atom_offset_[i], atom_offset_[i + 1] - atom_offset_[i]};
}

std::vector<EdgePair> GeneratedGraph::multi_edges() const {
    std::vector<EdgePair> out = loose_;
    for (std::size_t i = 0; i < atom_count(); ++i) {
        const auto a = atom(i);
        for (auto [u, v] : shapes_[atom_shape_[i]].edges()) {
            const Vertex x = a[static_cast<std::size_t>(u)], y = a[static_cast<std::size_t>(v)];
            out.emplace_back(std::min(x, y), std::max(x, y));
        }
    }
    return out;
}

std::vector<EdgePair> GeneratedGraph::simple_edges() const {
    auto e = multi_edges();
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
    return e;
}

std::vector<std::size_t> GeneratedGraph::atoms_per_shape() const {
    std::vector<std::size_t> out(shapes_.size(), 0);
    for (auto s : atom_shape_) ++out[s];
    return out;
}

bool operator==(const GeneratedGraph& a, const GeneratedGraph& b) {
    return a.n_ == b.n_ && a.types_ == b.types_ && a.shapes_ == b.shapes_ && a.atom_shape_ == b.atom_shape_ &&
           a.atom_offset_ == b.atom_offset_ && a.atom_vertices_ == b.atom_vertices_ && a.loose_ == b.loose_;
}

GeneratedGraph generate(const KernelFamily& family, std::size_t n, const SamplerConfig& config, Rng& rng) {
    Rng type_rng = rng.split(0);
    const VertexTypes types = sample_types(n, family.space(), type_rng);
    return generate_with_types(family, types, config, rng);
}

GeneratedGraph generate_with_types(const KernelFamily& family, const VertexTypes& types, const SamplerConfig& config,
                                   Rng& rng) {
    const std::size_t n = types.x.size();
    GeneratedGraph g(n, types.x);
    const auto entries = family.expanded();
    std::vector<Vertex> tuples;
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const auto& e = entries[k];
        const std::size_t r = e.shape.order();
        const std::uint32_t id = g.add_shape(e.shape);
        if (r > n) continue;
        Rng sub = rng.split(k + 1);
        const Ctx c{types.x, n, r, config};
        tuples.clear();
        if (config.variant == SamplerConfig::Variant::poisson) {
            sample_kernel(e.kernel, c, sub, tuples);
        } else {
            require(n <= 10, "per-tuple samplers are oracles for n <= 10");
            sample_per_tuple(e.kernel, c, config.variant == SamplerConfig::Variant::bernoulli_per_tuple, sub, tuples);
        }
        for (std::size_t i = 0; i < tuples.size(); i += r) g.add_atom(id, std::span<const Vertex>(tuples.data() + i, r));
    }
    return g;
}

Hypergraph to_hypergraph(const GeneratedGraph& g) {
    Hypergraph h;
    h.n = g.n();
    h.types = g.types();
    for (std::size_t i = 0; i < g.atom_count(); ++i) {
        auto a = g.atom(i);
        const std::size_t start = h.vertices.size();
        h.vertices.insert(h.vertices.end(), a.begin(), a.end());
        std::sort(h.vertices.begin() + static_cast<std::ptrdiff_t>(start), h.vertices.end());
        h.offset.push_back(h.vertices.size());
    }
    return h;
}

Hypergraph generate_hypergraph(const Hyperkernel& hk, std::size_t n, const SamplerConfig& config, Rng& rng) {
    return to_hypergraph(generate(hk.family(), n, config, rng));
}

GeneratedGraph clique_graph(const Hypergraph& h) {
    GeneratedGraph g(h.n, h.types);
    for (std::size_t i = 0; i < h.size(); ++i) {
        const auto e = h.edge(i);
        g.add_atom(g.add_shape(Shape::complete(e.size())), e);
    }
    return g;
}

GeneratedGraph star_graph(const Hypergraph& h) {
    GeneratedGraph g(h.n, h.types);
    for (std::size_t i = 0; i < h.size(); ++i) {
        const auto e = h.edge(i);
        g.add_atom(g.add_shape(e.size() == 1 ? Shape::complete(1) : Shape::star(e.size() - 1)), e);
    }
    return g;
}

std::vector<EdgePair> one_edge_per_hyperedge(const Hypergraph& h, Rng& rng) {
    std::vector<EdgePair> out;
    for (std::size_t i = 0; i < h.size(); ++i) {
        const auto e = h.edge(i);
        if (e.size() < 2) continue;
        std::uniform_int_distribution<std::size_t> pick(0, e.size() * (e.size() - 1) / 2 - 1);
        std::size_t q = pick(rng);
        for (std::size_t a = 0; a < e.size(); ++a) {
            const std::size_t row = e.size() - 1 - a;
            if (q < row) {
                out.emplace_back(e[a], e[a + 1 + q]);
                break;
            }
            q -= row;
        }
    }
    return out;
}

namespace {

// Adds 2 * kappa-bar_r(i,j) for every ordered pair into `tau`.
void add_tau_term(const KernelFunction& f, std::span<const double> x, std::vector<double>& tau) {
    const std::size_t n = x.size();
    const std::size_t r = f.arity();
    const std::size_t m = r - 2;
    const double nm = std::pow(static_cast<double>(n), static_cast<double>(m));
    const auto& node = f.node();
    if (const auto* k = std::get_if<KernelFunction::Constant>(&node)) {
        double ff = 1.0;
        for (std::size_t i = 0; i < m; ++i) ff *= static_cast<double>(n - 2 - i);
        const double v = 2.0 * k->value * ff / nm;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j) tau[i * n + j] += v;
    } else if (const auto* p = std::get_if<KernelFunction::RankOneProduct>(&node)) {
        std::vector<double> phi(n);
        for (std::size_t v = 0; v < n; ++v)
            phi[v] = p->per_type.empty() ? std::pow(x[v], -p->gamma) : p->per_type[static_cast<std::size_t>(x[v])];
        double T1 = 0.0, T2 = 0.0;
        for (double v : phi) {
            T1 += v;
            T2 += v * v;
        }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const double S1 = T1 - phi[i] - phi[j];
                const double S2 = T2 - phi[i] * phi[i] - phi[j] * phi[j];
                const double s = m == 0 ? 1.0 : m == 1 ? S1 : S1 * S1 - S2;
                tau[i * n + j] += 2.0 * p->coef * phi[i] * phi[j] * s / nm;
            }
    } else if (const auto* tb = std::get_if<KernelFunction::BlockTable>(&node)) {
        const std::size_t k = tb->types;
        std::vector<double> counts(k, 0.0);
        for (double v : x) counts[static_cast<std::size_t>(v)] += 1.0;
        std::vector<double> pair_value(k * k, 0.0);
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t b = 0; b < k; ++b) {
                std::vector<double> c = counts;
                c[a] -= 1.0;
                c[b] -= 1.0;
                double s = 0.0;
                if (m == 0) {
                    s = tb->values[a * k + b];
                } else if (m == 1) {
                    for (std::size_t t = 0; t < k; ++t) s += tb->values[(a * k + b) * k + t] * c[t];
                } else {
                    for (std::size_t t = 0; t < k; ++t)
                        for (std::size_t u = 0; u < k; ++u)
                            s += tb->values[((a * k + b) * k + t) * k + u] * c[t] * (c[u] - (t == u ? 1.0 : 0.0));
                }
                pair_value[a * k + b] = 2.0 * s / nm;
            }
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j)
                    tau[i * n + j] += pair_value[static_cast<std::size_t>(x[i]) * k + static_cast<std::size_t>(x[j])];
    } else if (const auto* s = std::get_if<KernelFunction::SumOfTerms>(&node)) {
        for (const auto& t : s->terms) add_tau_term(t, x, tau);
    } else {
        fail(Errc::unsupported, "tau_matrix supports constant, rank-one and table kernels");
    }
}

}  // namespace

std::vector<double> tau_matrix(const Hyperkernel& hk, std::span<const double> types) {
    const std::size_t n = types.size();
    require(n <= 5000, "tau_matrix is limited to n <= 5000");
    std::vector<double> tau(n * n, 0.0);
    for (const auto& e : hk.family().expanded()) {
        const std::size_t r = e.shape.order();
        if (r < 2) continue;
        if (r > 4) fail(Errc::arity_too_large, "tau_matrix handles arities up to 4");
        if (r > n) continue;
        add_tau_term(e.kernel, types, tau);
    }
    return tau;
}

KernelFunction tau_function(const Hyperkernel& hk) {
    std::vector<KernelFunction> terms{KernelFunction::zero(2)};
    const int keep[2] = {0, 1};
    for (const auto& e : hk.family().entries()) {
        if (e.shape.order() < 2) continue;
        terms.push_back(e.kernel.marginal(keep, hk.space()).scaled(2.0));
    }
    if (hk.series()) {
        const SeriesSum s = sum_series(*hk.series(), [](std::size_t) { return 2.0; });
        if (s.divergent) fail(Errc::divergent_kernel, "tau series diverges");
        terms.push_back(KernelFunction::constant(2, s.value));
    }
    return KernelFunction::sum(terms);
}

GeneratedGraph percolate_edges(const GeneratedGraph& g, double p, Rng& rng) {
    require(p >= 0.0 && p <= 1.0, "retention probability must lie in [0,1]");
    GeneratedGraph out(g.n(), g.types());
    std::bernoulli_distribution keep(p);
    for (auto [u, v] : g.simple_edges())
        if (keep(rng)) out.add_edge(u, v);
    return out;
}

GeneratedGraph percolate_vertices(const GeneratedGraph& g, double p, Rng& rng) {
    require(p >= 0.0 && p <= 1.0, "retention probability must lie in [0,1]");
    std::bernoulli_distribution keep(p);
    std::vector<std::int64_t> label(g.n(), -1);
    std::vector<double> types;
    for (std::size_t v = 0; v < g.n(); ++v) {
        if (!keep(rng)) continue;
        label[v] = static_cast<std::int64_t>(types.size());
        types.push_back(g.types()[v]);
    }
    GeneratedGraph out(types.size(), types);
    for (auto [u, v] : g.simple_edges())
        if (label[u] >= 0 && label[v] >= 0) out.add_edge(static_cast<Vertex>(label[u]), static_cast<Vertex>(label[v]));
    return out;
}

}  // namespace atomgraph
