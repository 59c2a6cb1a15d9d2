#include "atomgraph/graphstats.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <unordered_map>

#include "atomgraph/error.hpp"

namespace atomgraph {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

}  // namespace

SimpleGraph::SimpleGraph(std::size_t n, std::vector<EdgePair> edges) {
    for (auto& e : edges) {
        require(e.first < n && e.second < n, "edge endpoint out of range");
        if (e.first > e.second) std::swap(e.first, e.second);
    }
    std::erase_if(edges, [](const EdgePair& e) { return e.first == e.second; });
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);

    offset_.assign(n + 1, 0);
    for (const auto& [u, v] : edges_) {
        ++offset_[u + 1];
        ++offset_[v + 1];
    }
    std::partial_sum(offset_.begin(), offset_.end(), offset_.begin());
    adj_.resize(2 * edges_.size());
    std::vector<std::size_t> pos(offset_.begin(), offset_.end() - 1);
    for (const auto& [u, v] : edges_) {
        adj_[pos[u]++] = v;
        adj_[pos[v]++] = u;
    }
    for (std::size_t v = 0; v < n; ++v) std::sort(adj_.begin() + offset_[v], adj_.begin() + offset_[v + 1]);
}

std::vector<Vertex> component_labels(const SimpleGraph& g) {
    // Union-find with path halving; the smaller root wins so labels are component minima.
    std::vector<Vertex> parent(g.n());
    std::iota(parent.begin(), parent.end(), Vertex{0});
    auto find = [&](Vertex v) {
        while (parent[v] != v) v = parent[v] = parent[parent[v]];
        return v;
    };
    for (const auto& [u, v] : g.edges()) {
        const Vertex a = find(u), b = find(v);
        if (a < b) {
            parent[b] = a;
        } else if (b < a) {
            parent[a] = b;
        }
    }
    for (std::size_t v = 0; v < g.n(); ++v) parent[v] = find(static_cast<Vertex>(v));
    return parent;
}

ComponentSummary components(const SimpleGraph& g, std::size_t k_max) {
    const auto label = component_labels(g);
    std::vector<std::size_t> size(g.n(), 0);
    for (Vertex l : label) ++size[l];
    std::map<std::size_t, std::size_t> hist;
    for (std::size_t v = 0; v < g.n(); ++v)
        if (label[v] == v) ++hist[size[v]];

    ComponentSummary out;
    out.N_ge_k.assign(k_max + 1, 0);
    for (const auto& [s, c] : hist) {
        out.count += c;
        out.size_counts.emplace_back(s, c);
        for (std::size_t k = 0; k <= std::min(s, k_max); ++k) out.N_ge_k[k] += s * c;
    }
    if (!out.size_counts.empty()) {
        const auto& [s1, c1] = out.size_counts.back();
        out.C1 = s1;
        if (c1 > 1) {
            out.C2 = s1;
        } else if (out.size_counts.size() > 1) {
            out.C2 = out.size_counts[out.size_counts.size() - 2].first;
        }
    }
    return out;
}

DegreeHistogram degree_histogram(const SimpleGraph& g, std::size_t d_max) {
    DegreeHistogram h;
    h.n = g.n();
    h.counts.assign(d_max + 1, 0);
    for (std::size_t v = 0; v < g.n(); ++v) {
        const std::size_t d = g.degree(v);
        if (d > d_max) {
            ++h.overflow;
        } else {
            ++h.counts[d];
        }
    }
    return h;
}

DegreeHistogram degree_histogram(std::size_t n, const std::vector<EdgePair>& multi_edges, std::size_t d_max) {
    std::vector<std::size_t> deg(n, 0);
    for (const auto& [u, v] : multi_edges) {
        require(u < n && v < n, "edge endpoint out of range");
        ++deg[u];
        ++deg[v];
    }
    DegreeHistogram h;
    h.n = n;
    h.counts.assign(d_max + 1, 0);
    for (std::size_t d : deg) {
        if (d > d_max) {
            ++h.overflow;
        } else {
            ++h.counts[d];
        }
    }
    return h;
}

std::vector<double> compound_poisson_pmf(std::span<const double> lambda, std::size_t d_max) {
    if (lambda.empty()) {
        std::vector<double> p(d_max + 1, 0.0);
        p[0] = 1.0;
        return p;
    }
    double total = 0.0;
    for (std::size_t d = 1; d < lambda.size(); ++d) {
        require(lambda[d] >= 0.0 && std::isfinite(lambda[d]), "compound Poisson rates must be finite and non-negative");
        total += lambda[d];
    }
    // Panjer recursion on q_k = p_k e^{total}, rescaled to stay in range.
    std::vector<double> q(d_max + 1, 0.0);
    q[0] = 1.0;
    double scale = 0.0;
    for (std::size_t k = 1; k <= d_max; ++k) {
        double s = 0.0;
        for (std::size_t j = 1; j <= std::min(k, lambda.size() - 1); ++j)
            if (lambda[j] > 0.0) s += static_cast<double>(j) * lambda[j] * q[k - j];
        q[k] = s / static_cast<double>(k);
        if (q[k] > 1e200) {
            for (std::size_t i = 0; i <= k; ++i) q[i] *= 1e-200;
            scale += 200.0 * std::log(10.0);
        }
    }
    std::vector<double> p(d_max + 1);
    for (std::size_t k = 0; k <= d_max; ++k) {
        // q[k] has been multiplied by every rescaling that happened at or after k.
        p[k] = q[k] == 0.0 ? 0.0 : std::exp(std::log(q[k]) + scale - total);
    }
    return p;
}

MCPoRef mcpo_reference(const KernelFamily& family, std::size_t d_max) {
    const auto& space = family.space_ptr();
    const std::size_t m = space->size();
    MCPoRef ref;
    ref.intensity.assign(m, {});
    for (const auto& e : family.expanded()) {
        const GridKernel g = GridKernel::discretize(e.kernel, space);
        for (std::size_t j = 0; j < e.shape.order(); ++j) {
            const std::size_t d = static_cast<std::size_t>(e.shape.degree(static_cast<int>(j)));
            std::vector<int> perm(e.shape.order());
            for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i < j ? int(i) + 1 : int(i);
            perm[j] = 0;
            const int keep0 = 0;
            const GridKernel row = g.permuted(perm).marginal(std::span<const int>(&keep0, 1), Integration::quadrature);
            for (std::size_t x = 0; x < m; ++x) {
                const std::size_t node = x;
                const double v = row.at(std::span<const std::size_t>(&node, 1));
                auto& lam = ref.intensity[x];
                if (lam.size() <= d) lam.resize(d + 1, 0.0);
                lam[d] += v;
            }
        }
    }
    auto w = space->weights();
    ref.pmf.assign(d_max + 1, 0.0);
    for (std::size_t x = 0; x < m; ++x) {
        const auto& lam = ref.intensity[x];
        for (std::size_t d = 1; d < lam.size(); ++d) ref.mean += w[x] * static_cast<double>(d) * lam[d];
        if (lam.empty()) {
            ref.pmf[0] += w[x];
            continue;
        }
        const auto p = compound_poisson_pmf(lam, d_max);
        for (std::size_t k = 0; k <= d_max; ++k) ref.pmf[k] += w[x] * p[k];
    }
    const double mass = std::accumulate(ref.pmf.begin(), ref.pmf.end(), 0.0);
    ref.truncation_mass = std::max(0.0, 1.0 - mass);
    ref.truncation_warning = ref.truncation_mass > truncation_warning_level;
    return ref;
}

double tv_distance(std::span<const double> p, std::span<const double> q) {
    double s = 0.0;
    for (std::size_t i = 0; i < std::max(p.size(), q.size()); ++i) {
        const double a = i < p.size() ? p[i] : 0.0;
        const double b = i < q.size() ? q[i] : 0.0;
        s += std::abs(a - b);
    }
    return 0.5 * s;
}

double tv_distance(const DegreeHistogram& hist, const MCPoRef& ref) {
    require(hist.counts.size() == ref.pmf.size(), "histogram and reference must share d_max");
    require(hist.n > 0, "empty degree histogram");
    const double n = static_cast<double>(hist.n);
    double s = 0.0;
    for (std::size_t d = 0; d < hist.counts.size(); ++d) s += std::abs(static_cast<double>(hist.counts[d]) / n - ref.pmf[d]);
    return 0.5 * s + 0.5 * (static_cast<double>(hist.overflow) / n + ref.truncation_mass);
}

SubgraphCounts count_subgraphs(const SimpleGraph& g) {
    SubgraphCounts c;
    const std::size_t n = g.n();
    c.K2 = g.edge_count();
    for (std::size_t v = 0; v < n; ++v) {
        const std::uint64_t d = g.degree(v);
        if (d >= 2) c.P2 += d * (d - 1) / 2;
        if (d >= 3) c.S3 += d * (d - 1) * (d - 2) / 6;
    }
    // Triangles: orient from lower to higher (degree, id) and intersect out-lists.
    auto before = [&](Vertex a, Vertex b) {
        return g.degree(a) != g.degree(b) ? g.degree(a) < g.degree(b) : a < b;
    };
    std::vector<std::vector<Vertex>> out(n);
    for (const auto& [u, v] : g.edges()) {
        if (before(u, v)) {
            out[u].push_back(v);
        } else {
            out[v].push_back(u);
        }
    }
    std::vector<char> mark(n, 0);
    for (std::size_t u = 0; u < n; ++u) {
        for (Vertex v : out[u]) mark[v] = 1;
        for (Vertex v : out[u])
            for (Vertex w : out[v]) c.K3 += mark[w];
        for (Vertex v : out[u]) mark[v] = 0;
    }
    std::uint64_t paths = 0;
    for (const auto& [u, v] : g.edges()) paths += (g.degree(u) - 1) * (g.degree(v) - 1);
    c.P3 = paths - 3 * c.K3;
    return c;
}

double clustering_c2(const SubgraphCounts& c) {
    if (c.P2 == 0) fail(Errc::undefined_for_no_paths, "clustering is undefined without paths of length 2");
    return 3.0 * static_cast<double>(c.K3) / static_cast<double>(c.P2);
}

double mixing_a(const SubgraphCounts& c) {
    using i128 = __int128;
    const i128 e = c.K2, p2 = c.P2;
    const i128 num = (static_cast<i128>(c.P3) + 3 * static_cast<i128>(c.K3)) * e - p2 * p2;
    const i128 den = (3 * static_cast<i128>(c.S3) + p2) * e - p2 * p2;
    if (e == 0 || den == 0) fail(Errc::degenerate_degrees, "degree correlation is undefined when all edges see equal degrees");
    return static_cast<double>(static_cast<long double>(num) / static_cast<long double>(den));
}

// ---------------------------------------------------------------- t-tilde

std::vector<std::vector<std::vector<int>>> tree_decompositions(const Shape& F) {
    require(F.connected(), "tree decompositions need a connected graph");
    const auto blocks = F.blocks();
    const std::size_t B = blocks.size();
    std::vector<std::uint64_t> block_vertices(B, 0);
    for (std::size_t b = 0; b < B; ++b)
        for (int e : blocks[b]) {
            const auto& [u, v] = F.edges()[static_cast<std::size_t>(e)];
            block_vertices[b] |= (1ULL << u) | (1ULL << v);
        }

    std::vector<std::vector<std::vector<int>>> out;
    if (B == 0) return out;
    // Restricted growth strings enumerate set partitions of the blocks.
    std::vector<std::size_t> group(B, 0);
    for (;;) {
        const std::size_t k = *std::max_element(group.begin(), group.end()) + 1;
        std::vector<std::uint64_t> verts(k, 0);
        std::vector<std::vector<int>> edges(k);
        for (std::size_t b = 0; b < B; ++b) {
            verts[group[b]] |= block_vertices[b];
            edges[group[b]].insert(edges[group[b]].end(), blocks[b].begin(), blocks[b].end());
        }
        bool ok = true;
        std::size_t total = 1;
        for (std::size_t i = 0; i < k && ok; ++i) {
            total += static_cast<std::size_t>(std::popcount(verts[i])) - 1;
            for (std::size_t j = i + 1; j < k && ok; ++j) ok = std::popcount(verts[i] & verts[j]) <= 1;
            // Connected as a union of blocks.
            std::uint64_t reach = verts[i] & (~verts[i] + 1);
            for (bool grew = true; grew;) {
                grew = false;
                for (int e : edges[i]) {
                    const auto& [u, v] = F.edges()[static_cast<std::size_t>(e)];
                    const std::uint64_t uv = (1ULL << u) | (1ULL << v);
                    if ((reach & uv) && (reach & uv) != uv) {
                        reach |= uv;
                        grew = true;
                    }
                }
            }
            ok = ok && reach == verts[i];
        }
        if (ok && total == F.order()) {
            for (auto& e : edges) std::sort(e.begin(), e.end());
            std::sort(edges.begin(), edges.end());
            out.push_back(std::move(edges));
        }
        // Next restricted growth string.
        std::size_t i = B;
        while (i-- > 1) {
            std::size_t mx = 0;
            for (std::size_t j = 0; j < i; ++j) mx = std::max(mx, group[j]);
            if (group[i] <= mx) {
                ++group[i];
                std::fill(group.begin() + static_cast<std::ptrdiff_t>(i) + 1, group.end(), 0);
                break;
            }
        }
        if (i == 0) break;
    }
    return out;
}

namespace {

struct DiscreteEntry {
    Shape shape;
    GridKernel kernel;
};

std::vector<DiscreteEntry> discretize_entries(const KernelFamily& family) {
    std::vector<DiscreteEntry> out;
    for (const auto& e : family.entries())
        out.push_back({e.shape, GridKernel::discretize(e.kernel, family.space_ptr())});
    return out;
}

// sum_r c_r (r)_s, the clique series contribution to sigma of an s-vertex graph.
double series_sigma(const CliqueSeries& s, std::size_t order) {
    double sum = 0.0, last = 0.0;
    for (std::size_t r = std::max<std::size_t>(s.min_arity, order); r <= s.last_explicit(); ++r) {
        double falling = 1.0;
        for (std::size_t i = 0; i < order; ++i) falling *= static_cast<double>(r - i);
        last = s.value(r) * falling;
        sum += last;
    }
    if (s.unbounded() && last > divergence_ratio * sum) return inf;
    return sum;
}

GridKernel sigma_from(const Shape& H, const std::vector<DiscreteEntry>& entries, const KernelFamily& family) {
    GridKernel out(family.space_ptr(), H.order());
    for (const auto& e : entries) {
        if (e.shape.order() < H.order()) continue;
        for (const auto& phi : H.embeddings_into(e.shape)) out.add(e.kernel.marginal(phi, Integration::exact));
    }
    if (family.series()) {
        const double c = series_sigma(*family.series(), H.order());
        if (c > 0.0) out.add_term({c, std::vector<Factor>(H.order(), Factor::ones())});
    }
    return out;
}

// int prod_i sigma_i(x restricted to vertices[i]) over all vertex types.
double integrate_product(const std::vector<GridKernel>& sigma, const std::vector<std::vector<int>>& vertices,
                         std::size_t order, const TypeSpace& space) {
    const bool dense = std::any_of(sigma.begin(), sigma.end(), [](const GridKernel& g) { return g.has_dense(); });
    if (!dense) {
        std::vector<std::size_t> choice(sigma.size(), 0);
        for (const auto& s : sigma)
            if (s.terms().empty()) return 0.0;
        double total = 0.0;
        for (;;) {
            double coef = 1.0;
            for (std::size_t i = 0; i < sigma.size(); ++i) coef *= sigma[i].terms()[choice[i]].coef;
            if (coef != 0.0) {
                double value = coef;
                for (std::size_t v = 0; v < order && value != 0.0; ++v) {
                    Factor f = Factor::ones();
                    for (std::size_t i = 0; i < sigma.size(); ++i)
                        for (std::size_t a = 0; a < vertices[i].size(); ++a)
                            if (vertices[i][a] == static_cast<int>(v))
                                f = f.times(sigma[i].terms()[choice[i]].factors[a], space);
                    const double integral = f.integral(space, Integration::exact);
                    value = integral == 0.0 ? 0.0 : value * integral;
                }
                if (std::isinf(value)) return inf;
                total += value;
            }
            std::size_t i = 0;
            for (; i < sigma.size(); ++i) {
                if (++choice[i] < sigma[i].terms().size()) break;
                choice[i] = 0;
            }
            if (i == sigma.size()) break;
        }
        return total;
    }
    const std::size_t m = space.size();
    double cells = 1.0;
    for (std::size_t v = 0; v < order; ++v) cells *= static_cast<double>(m);
    if (cells > 1e8) fail(Errc::unsupported, "subgraph density with tabulated kernels needs too many grid points");
    auto w = space.weights();
    std::vector<std::size_t> x(order, 0);
    std::vector<std::size_t> sub;
    double total = 0.0;
    for (;;) {
        double weight = 1.0;
        for (std::size_t v = 0; v < order; ++v) weight *= w[x[v]];
        double value = weight;
        for (std::size_t i = 0; i < sigma.size() && value != 0.0; ++i) {
            sub.clear();
            for (int v : vertices[i]) sub.push_back(x[static_cast<std::size_t>(v)]);
            value *= sigma[i].at(sub);
        }
        total += value;
        std::size_t v = 0;
        for (; v < order; ++v) {
            if (++x[v] < m) break;
            x[v] = 0;
        }
        if (v == order) break;
    }
    return total;
}

}  // namespace

GridKernel sigma_kernel(const Shape& H, const KernelFamily& family) {
    return sigma_from(H, discretize_entries(family), family);
}

double t_tilde(const Shape& F, const KernelFamily& family) {
    require(F.connected() && F.order() >= 2, "subgraph density needs a connected graph with an edge");
    require(F.order() <= 5, "subgraph density is limited to graphs on at most 5 vertices");
    const auto entries = discretize_entries(family);
    double total = 0.0;
    for (const auto& decomposition : tree_decompositions(F)) {
        std::vector<GridKernel> sigma;
        std::vector<std::vector<int>> vertices;
        for (const auto& edges : decomposition) {
            std::uint64_t mask = 0;
            for (int e : edges) {
                const auto& [u, v] = F.edges()[static_cast<std::size_t>(e)];
                mask |= (1ULL << u) | (1ULL << v);
            }
            std::vector<int> vs;
            for (int v = 0; v < static_cast<int>(F.order()); ++v)
                if ((mask >> v) & 1U) vs.push_back(v);
            sigma.push_back(sigma_from(F.induced(vs), entries, family));
            vertices.push_back(std::move(vs));
        }
        const double v = integrate_product(sigma, vertices, F.order(), family.space());
        if (std::isinf(v)) return inf;
        total += v;
    }
    return total / F.automorphism_count();
}

// ---------------------------------------------------------------- census

namespace {

class Canonizer {
  public:
    explicit Canonizer(const std::vector<std::uint16_t>& adj) : adj_(adj), n_(static_cast<int>(adj.size())) {}

    std::string run() {
        std::vector<int> col(static_cast<std::size_t>(n_), 1);
        col[0] = 0;
        search(col);
        return best_;
    }

  private:
    const std::vector<std::uint16_t>& adj_;
    int n_;
    std::string best_;

    int refine(std::vector<int>& col) const {
        int classes = static_cast<int>(std::set<int>(col.begin(), col.end()).size());
        for (;;) {
            std::vector<std::pair<std::vector<int>, int>> sig(static_cast<std::size_t>(n_));
            for (int v = 0; v < n_; ++v) {
                auto& s = sig[static_cast<std::size_t>(v)].first;
                s.push_back(col[static_cast<std::size_t>(v)]);
                std::vector<int> nb;
                for (int u = 0; u < n_; ++u)
                    if ((adj_[static_cast<std::size_t>(v)] >> u) & 1U) nb.push_back(col[static_cast<std::size_t>(u)]);
                std::sort(nb.begin(), nb.end());
                s.insert(s.end(), nb.begin(), nb.end());
                sig[static_cast<std::size_t>(v)].second = v;
            }
            std::sort(sig.begin(), sig.end());
            int rank = -1;
            for (std::size_t i = 0; i < sig.size(); ++i) {
                if (i == 0 || sig[i].first != sig[i - 1].first) ++rank;
                col[static_cast<std::size_t>(sig[i].second)] = rank;
            }
            if (rank + 1 == classes) return classes;
            classes = rank + 1;
        }
    }

    bool twins(int a, int b) const {
        const auto ma = static_cast<std::uint16_t>(adj_[static_cast<std::size_t>(a)] & ~(1U << b));
        const auto mb = static_cast<std::uint16_t>(adj_[static_cast<std::size_t>(b)] & ~(1U << a));
        return ma == mb;
    }

    void search(std::vector<int> col) {
        const int classes = refine(col);
        if (classes == n_) {
            std::vector<int> order(static_cast<std::size_t>(n_));
            for (int v = 0; v < n_; ++v) order[static_cast<std::size_t>(col[static_cast<std::size_t>(v)])] = v;
            std::string bits;
            for (int i = 0; i < n_; ++i)
                for (int j = i + 1; j < n_; ++j)
                    bits.push_back((adj_[static_cast<std::size_t>(order[static_cast<std::size_t>(i)])] >>
                                    order[static_cast<std::size_t>(j)]) & 1U ? '1' : '0');
            if (best_.empty() || bits < best_) best_ = std::move(bits);
            return;
        }
        std::vector<int> count(static_cast<std::size_t>(classes), 0);
        for (int c : col) ++count[static_cast<std::size_t>(c)];
        int cell = 0;
        while (count[static_cast<std::size_t>(cell)] == 1) ++cell;
        std::vector<int> tried;
        for (int u = 0; u < n_; ++u) {
            if (col[static_cast<std::size_t>(u)] != cell) continue;
            if (std::any_of(tried.begin(), tried.end(), [&](int t) { return twins(u, t); })) continue;
            tried.push_back(u);
            std::vector<int> next(col);
            for (int v = 0; v < n_; ++v) {
                int& c = next[static_cast<std::size_t>(v)];
                if (c > cell || (c == cell && v != u)) ++c;
            }
            search(std::move(next));
        }
    }
};

std::string to_hex(const std::string& bits) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    for (std::size_t i = 0; i < bits.size(); i += 4) {
        int v = 0;
        for (std::size_t k = 0; k < 4; ++k) v = 2 * v + (i + k < bits.size() && bits[i + k] == '1');
        out.push_back(digits[v]);
    }
    return out;
}

// Memoized canonical codes keyed by the labelled adjacency.
class CodeCache {
  public:
    const std::string& code(const std::vector<std::uint16_t>& adj) {
        std::string key(reinterpret_cast<const char*>(adj.data()), adj.size() * sizeof(std::uint16_t));
        auto it = cache_.find(key);
        if (it == cache_.end()) it = cache_.emplace(std::move(key), rooted_code(adj)).first;
        return it->second;
    }

  private:
    std::unordered_map<std::string, std::string> cache_;
};

}  // namespace

std::string rooted_code(const std::vector<std::uint16_t>& adjacency) {
    require(!adjacency.empty() && adjacency.size() <= 16, "rooted code needs between 1 and 16 vertices");
    return std::to_string(adjacency.size()) + ":" + to_hex(Canonizer(adjacency).run());
}

RootedCensus neighborhood_census(const SimpleGraph& g, std::size_t t, std::size_t max_vertices) {
    require(max_vertices >= 1 && max_vertices <= 16, "census balls are limited to 16 vertices");
    RootedCensus census;
    census.depth = t;
    census.samples = g.n();
    if (g.n() == 0) return census;
    CodeCache cache;
    std::map<std::string, std::size_t> counts;
    std::vector<Vertex> ball;
    std::vector<std::size_t> dist;
    std::vector<std::uint16_t> adj;
    for (std::size_t root = 0; root < g.n(); ++root) {
        ball.assign(1, static_cast<Vertex>(root));
        dist.assign(1, 0);
        bool overflow = false;
        for (std::size_t head = 0; head < ball.size() && !overflow; ++head) {
            if (dist[head] >= t) continue;
            for (Vertex u : g.neighbours(ball[head])) {
                if (std::find(ball.begin(), ball.end(), u) != ball.end()) continue;
                if (ball.size() == max_vertices) {
                    overflow = true;
                    break;
                }
                ball.push_back(u);
                dist.push_back(dist[head] + 1);
            }
        }
        if (overflow) {
            ++counts[census_overflow];
            continue;
        }
        adj.assign(ball.size(), 0);
        for (std::size_t i = 0; i < ball.size(); ++i)
            for (std::size_t j = i + 1; j < ball.size(); ++j) {
                const auto nb = g.neighbours(ball[i]);
                if (std::binary_search(nb.begin(), nb.end(), ball[j])) {
                    adj[i] |= static_cast<std::uint16_t>(1U << j);
                    adj[j] |= static_cast<std::uint16_t>(1U << i);
                }
            }
        ++counts[cache.code(adj)];
    }
    for (const auto& [k, c] : counts) census.freq[k] = static_cast<double>(c) / static_cast<double>(g.n());
    return census;
}

namespace {

// Atoms of one entry containing a given vertex at a fixed position: rates per
// node and conditional sampling of the remaining types.
class PositionSampler {
  public:
    PositionSampler(const GridKernel& kernel, std::size_t position) : m_(kernel.space().size()) {
        const std::size_t r = kernel.arity();
        std::vector<int> perm(r);
        for (std::size_t i = 0; i < r; ++i) perm[i] = i < position ? int(i) + 1 : int(i);
        perm[position] = 0;
        const GridKernel k = kernel.permuted(perm);
        const TypeSpace& space = k.space();
        auto w = space.weights();
        r_ = r;
        rate_.assign(m_, 0.0);
        for (const auto& t : k.terms()) {
            Term term;
            double rest = t.coef;
            for (std::size_t i = 1; i < r; ++i) {
                auto f = t.factors[i].tabulate(space);
                for (std::size_t x = 0; x < m_; ++x) f[x] *= w[x];
                rest *= std::accumulate(f.begin(), f.end(), 0.0);
                term.positions.emplace_back(f.begin(), f.end());
            }
            term.rate = t.factors[0].tabulate(space);
            for (double& v : term.rate) v *= rest;
            if (rest == 0.0) continue;
            for (std::size_t x = 0; x < m_; ++x) rate_[x] += term.rate[x];
            terms_.push_back(std::move(term));
        }
        if (k.has_dense()) {
            std::size_t cells = 1;
            for (std::size_t i = 1; i < r; ++i) cells *= m_;
            dense_rate_.assign(m_, 0.0);
            for (std::size_t x = 0; x < m_; ++x) {
                std::vector<double> cell(cells);
                std::vector<std::size_t> idx(r - 1);
                for (std::size_t c = 0; c < cells; ++c) {
                    std::size_t rem = c;
                    double weight = 1.0;
                    for (std::size_t i = r - 1; i-- > 0;) {
                        idx[i] = rem % m_;
                        rem /= m_;
                        weight *= w[idx[i]];
                    }
                    cell[c] = weight * k.dense()[x * cells + c];
                }
                dense_rate_[x] = std::accumulate(cell.begin(), cell.end(), 0.0);
                rate_[x] += dense_rate_[x];
                rows_.emplace_back(cell.begin(), cell.end());
            }
        }
    }

    std::size_t arity() const { return r_; }
    double rate(std::size_t x) const { return rate_[x]; }

    // Types of positions 1..r-1 given type x at position 0.
    void sample(std::size_t x, Rng& rng, std::vector<std::size_t>& out) {
        out.assign(r_ - 1, 0);
        std::vector<double> w;
        for (const auto& t : terms_) w.push_back(t.rate[x]);
        if (!rows_.empty()) w.push_back(dense_rate_[x]);
        std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
        const std::size_t c = pick(rng);
        if (c < terms_.size()) {
            for (std::size_t i = 0; i + 1 < r_; ++i) out[i] = terms_[c].positions[i](rng);
        } else {
            std::size_t flat = rows_[x](rng);
            for (std::size_t i = r_ - 1; i-- > 0;) {
                out[i] = flat % m_;
                flat /= m_;
            }
        }
    }

  private:
    struct Term {
        std::vector<double> rate;
        std::vector<std::discrete_distribution<std::size_t>> positions;
    };
    std::size_t m_;
    std::size_t r_ = 0;
    std::vector<double> rate_;
    std::vector<Term> terms_;
    std::vector<double> dense_rate_;
    std::vector<std::discrete_distribution<std::size_t>> rows_;
};

}  // namespace

RootedCensus sample_rooted_limit(const KernelFamily& family, std::size_t t, std::size_t trials, Rng& rng,
                                 std::size_t max_vertices) {
    require(max_vertices >= 1 && max_vertices <= 16, "census balls are limited to 16 vertices");
    require(trials > 0, "need at least one trial");
    struct Source {
        Shape shape;
        std::size_t position;
        std::vector<int> dist;  // distances from the position inside the shape
        PositionSampler sampler;
    };
    std::vector<Source> sources;
    for (const auto& e : family.expanded()) {
        const GridKernel g = GridKernel::discretize(e.kernel, family.space_ptr());
        for (std::size_t j = 0; j < e.shape.order(); ++j)
            sources.push_back({e.shape, j, e.shape.distances_from(static_cast<int>(j)), PositionSampler(g, j)});
    }
    auto w = family.space().weights();
    std::discrete_distribution<std::size_t> root_dist(w.begin(), w.end());

    RootedCensus census;
    census.depth = t;
    census.samples = trials;
    CodeCache cache;
    std::map<std::string, std::size_t> counts;
    std::vector<std::size_t> types;
    std::vector<std::size_t> dist;
    std::vector<std::uint16_t> adj;
    std::vector<std::size_t> others;
    std::vector<int> slot;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        Rng r = rng.split(trial);
        types.assign(1, root_dist(r));
        dist.assign(1, 0);
        adj.assign(1, 0);
        bool overflow = false;
        for (std::size_t head = 0; head < types.size() && !overflow; ++head) {
            if (dist[head] >= t) continue;
            for (auto& s : sources) {
                const double rate = s.sampler.rate(types[head]);
                if (rate <= 0.0) continue;
                if (!std::isfinite(rate)) fail(Errc::unbounded_kernel, "atom rate is not finite at a grid node");
                const std::size_t k = std::poisson_distribution<std::size_t>(rate)(r);
                for (std::size_t a = 0; a < k && !overflow; ++a) {
                    s.sampler.sample(types[head], r, others);
                    const std::size_t order = s.shape.order();
                    slot.assign(order, -1);
                    slot[s.position] = static_cast<int>(head);
                    for (std::size_t u = 0, o = 0; u < order; ++u) {
                        if (u == s.position) continue;
                        const std::size_t type = others[o++];
                        if (s.dist[u] < 0) continue;
                        const std::size_t d = dist[head] + static_cast<std::size_t>(s.dist[u]);
                        if (d > t) continue;
                        if (types.size() == max_vertices) {
                            overflow = true;
                            break;
                        }
                        slot[u] = static_cast<int>(types.size());
                        types.push_back(type);
                        dist.push_back(d);
                        adj.push_back(0);
                    }
                    if (overflow) break;
                    for (const auto& [u, v] : s.shape.edges()) {
                        const int a1 = slot[static_cast<std::size_t>(u)], b1 = slot[static_cast<std::size_t>(v)];
                        if (a1 < 0 || b1 < 0) continue;
                        adj[static_cast<std::size_t>(a1)] |= static_cast<std::uint16_t>(1U << b1);
                        adj[static_cast<std::size_t>(b1)] |= static_cast<std::uint16_t>(1U << a1);
                    }
                }
                if (overflow) break;
            }
        }
        if (overflow) {
            ++counts[census_overflow];
        } else {
            ++counts[cache.code(adj)];
        }
    }
    for (const auto& [k, c] : counts) census.freq[k] = static_cast<double>(c) / static_cast<double>(trials);
    return census;
}

double census_tv(const RootedCensus& a, const RootedCensus& b) {
    double s = 0.0;
    for (const auto& [k, p] : a.freq) {
        auto it = b.freq.find(k);
        s += std::abs(p - (it == b.freq.end() ? 0.0 : it->second));
    }
    for (const auto& [k, q] : b.freq)
        if (!a.freq.contains(k)) s += q;
    return 0.5 * s;
}

}  // namespace atomgraph
