#include "atomgraph/shape.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <numeric>
#include <sstream>

#include "atomgraph/error.hpp"

namespace atomgraph {

Shape::Shape(std::size_t order, const std::vector<Edge>& edges) : adj_(order, 0) {
    require(order <= max_order, "shape order exceeds 64 vertices");
    for (auto [u, v] : edges) {
        require(u >= 0 && v >= 0 && static_cast<std::size_t>(u) < order &&
                    static_cast<std::size_t>(v) < order,
                "shape edge endpoint out of range");
        require(u != v, "shape edges must join distinct vertices");
        adj_[u] |= std::uint64_t{1} << v;
        adj_[v] |= std::uint64_t{1} << u;
    }
    for (std::size_t u = 0; u < order; ++u)
        for (std::size_t v = u + 1; v < order; ++v)
            if (adjacent(static_cast<int>(u), static_cast<int>(v)))
                edges_.emplace_back(static_cast<int>(u), static_cast<int>(v));
}

Shape Shape::complete(std::size_t r) {
    std::vector<Edge> e;
    for (std::size_t u = 0; u < r; ++u)
        for (std::size_t v = u + 1; v < r; ++v) e.emplace_back(u, v);
    return Shape(r, e);
}

Shape Shape::empty(std::size_t r) { return Shape(r, {}); }

Shape Shape::path(std::size_t k) {
    std::vector<Edge> e;
    for (std::size_t i = 0; i < k; ++i) e.emplace_back(i, i + 1);
    return Shape(k + 1, e);
}

Shape Shape::star(std::size_t k) {
    std::vector<Edge> e;
    for (std::size_t i = 1; i <= k; ++i) e.emplace_back(0, i);
    return Shape(k + 1, e);
}

Shape Shape::cycle(std::size_t k) {
    require(k >= 3, "cycle needs at least 3 vertices");
    std::vector<Edge> e;
    for (std::size_t i = 0; i < k; ++i) e.emplace_back(i, (i + 1) % k);
    return Shape(k, e);
}

int Shape::degree(int v) const { return std::popcount(adj_[v]); }

bool Shape::connected() const { return components().size() <= 1; }

std::vector<std::vector<int>> Shape::components() const {
    std::vector<std::vector<int>> out;
    std::vector<char> seen(order(), 0);
    for (std::size_t s = 0; s < order(); ++s) {
        if (seen[s]) continue;
        std::vector<int> comp{static_cast<int>(s)};
        seen[s] = 1;
        for (std::size_t i = 0; i < comp.size(); ++i) {
            std::uint64_t nb = adj_[comp[i]];
            while (nb) {
                int w = std::countr_zero(nb);
                nb &= nb - 1;
                if (!seen[w]) {
                    seen[w] = 1;
                    comp.push_back(w);
                }
            }
        }
        std::sort(comp.begin(), comp.end());
        out.push_back(std::move(comp));
    }
    return out;
}

std::vector<int> Shape::distances_from(int v) const {
    std::vector<int> dist(order(), -1);
    std::vector<int> queue{v};
    dist[v] = 0;
    for (std::size_t i = 0; i < queue.size(); ++i) {
        std::uint64_t nb = adj_[queue[i]];
        while (nb) {
            int w = std::countr_zero(nb);
            nb &= nb - 1;
            if (dist[w] < 0) {
                dist[w] = dist[queue[i]] + 1;
                queue.push_back(w);
            }
        }
    }
    return dist;
}

std::vector<std::vector<int>> Shape::blocks() const {
    const int r = static_cast<int>(order());
    std::vector<int> disc(r, -1), low(r, 0);
    std::vector<int> edge_stack;
    std::vector<std::vector<int>> out;
    int timer = 0;

    auto edge_index = [&](int u, int v) {
        Edge e{std::min(u, v), std::max(u, v)};
        return static_cast<int>(std::lower_bound(edges_.begin(), edges_.end(), e) - edges_.begin());
    };

    std::function<void(int, int)> dfs = [&](int u, int parent) {
        disc[u] = low[u] = timer++;
        std::uint64_t nb = adj_[u];
        while (nb) {
            int w = std::countr_zero(nb);
            nb &= nb - 1;
            if (w == parent) continue;
            if (disc[w] < 0) {
                edge_stack.push_back(edge_index(u, w));
                dfs(w, u);
                low[u] = std::min(low[u], low[w]);
                if (low[w] >= disc[u]) {
                    std::vector<int> block;
                    int target = edge_index(u, w);
                    while (true) {
                        int e = edge_stack.back();
                        edge_stack.pop_back();
                        block.push_back(e);
                        if (e == target) break;
                    }
                    std::sort(block.begin(), block.end());
                    out.push_back(std::move(block));
                }
            } else if (disc[w] < disc[u]) {
                edge_stack.push_back(edge_index(u, w));
                low[u] = std::min(low[u], disc[w]);
            }
        }
    };
    for (int v = 0; v < r; ++v)
        if (disc[v] < 0) dfs(v, -1);
    std::sort(out.begin(), out.end());
    return out;
}

Shape Shape::induced(const std::vector<int>& vertices) const {
    std::vector<Edge> e;
    for (std::size_t i = 0; i < vertices.size(); ++i)
        for (std::size_t j = i + 1; j < vertices.size(); ++j)
            if (adjacent(vertices[i], vertices[j])) e.emplace_back(i, j);
    return Shape(vertices.size(), e);
}

Shape Shape::spanning(std::uint64_t mask) const {
    std::vector<Edge> e;
    for (std::size_t i = 0; i < edges_.size(); ++i)
        if ((mask >> i) & 1U) e.push_back(edges_[i]);
    return Shape(order(), e);
}

Shape Shape::relabelled(const std::vector<int>& perm) const {
    std::vector<Edge> e;
    for (auto [u, v] : edges_) e.emplace_back(perm[u], perm[v]);
    return Shape(order(), e);
}

namespace {

double factorial(std::size_t r) {
    double f = 1.0;
    for (std::size_t i = 2; i <= r; ++i) f *= static_cast<double>(i);
    return f;
}

// Backtracking enumeration of injective maps from `pattern` into `host` that
// preserve adjacency; with `exact` set, non-adjacency is preserved too.
void enumerate_maps(const Shape& pattern, const Shape& host, bool exact,
                    const std::function<void(const std::vector<int>&)>& visit) {
    const int r = static_cast<int>(pattern.order());
    std::vector<int> image(r, -1);
    std::uint64_t used = 0;
    std::function<void(int)> rec = [&](int v) {
        if (v == r) {
            visit(image);
            return;
        }
        for (int w = 0; w < static_cast<int>(host.order()); ++w) {
            if ((used >> w) & 1U) continue;
            if (exact && host.degree(w) != pattern.degree(v)) continue;
            bool ok = true;
            for (int u = 0; u < v && ok; ++u) {
                bool pe = pattern.adjacent(u, v);
                bool he = host.adjacent(image[u], w);
                if (pe && !he) ok = false;
                if (exact && he && !pe) ok = false;
            }
            if (!ok) continue;
            image[v] = w;
            used |= std::uint64_t{1} << w;
            rec(v + 1);
            used &= ~(std::uint64_t{1} << w);
            image[v] = -1;
        }
    };
    rec(0);
}

}  // namespace

std::vector<std::vector<int>> Shape::automorphisms() const {
    if (order() > max_canonical_order)
        fail(Errc::unsupported, "automorphism enumeration limited to 10 vertices");
    std::vector<std::vector<int>> out;
    enumerate_maps(*this, *this, true, [&](const std::vector<int>& m) { out.push_back(m); });
    return out;
}

double Shape::automorphism_count() const {
    if (is_complete() || edges_.empty()) return factorial(order());
    return static_cast<double>(automorphisms().size());
}

std::vector<std::vector<int>> Shape::embeddings_into(const Shape& host) const {
    std::vector<std::vector<int>> out;
    if (order() > host.order()) return out;
    if (host.order() > max_canonical_order)
        fail(Errc::unsupported, "embedding enumeration limited to hosts with 10 vertices");
    enumerate_maps(*this, host, false, [&](const std::vector<int>& m) { out.push_back(m); });
    return out;
}

Shape::Canonical Shape::canonical() const {
    const std::size_t r = order();
    if (is_complete() || edges_.empty() || r <= 1) {
        std::vector<int> id(r);
        std::iota(id.begin(), id.end(), 0);
        return {*this, id};
    }
    if (r > max_canonical_order) fail(Errc::unsupported, "canonical form limited to 10 vertices");

    // Isomorphism-invariant vertex key: degree, then sorted neighbour degrees.
    std::vector<std::vector<int>> key(r);
    for (std::size_t v = 0; v < r; ++v) {
        key[v].push_back(degree(static_cast<int>(v)));
        std::vector<int> nd;
        std::uint64_t nb = adj_[v];
        while (nb) {
            int w = std::countr_zero(nb);
            nb &= nb - 1;
            nd.push_back(degree(w));
        }
        std::sort(nd.rbegin(), nd.rend());
        key[v].insert(key[v].end(), nd.begin(), nd.end());
    }
    std::vector<int> verts(r);
    std::iota(verts.begin(), verts.end(), 0);
    std::stable_sort(verts.begin(), verts.end(), [&](int a, int b) { return key[a] > key[b]; });
    std::vector<std::pair<std::size_t, std::size_t>> classes;
    for (std::size_t i = 0; i < r;) {
        std::size_t j = i;
        while (j < r && key[verts[j]] == key[verts[i]]) ++j;
        classes.emplace_back(i, j);
        std::sort(verts.begin() + i, verts.begin() + j);
        i = j;
    }

    // verts[label] = original vertex; code = upper-triangle adjacency bits.
    auto code_of = [&](const std::vector<int>& order_) {
        std::uint64_t code = 0;
        for (std::size_t a = 0; a < r; ++a)
            for (std::size_t b = a + 1; b < r; ++b)
                code = (code << 1) | (adjacent(order_[a], order_[b]) ? 1U : 0U);
        return code;
    };
    std::uint64_t best = 0;
    std::vector<int> best_order;
    std::function<void(std::size_t)> rec = [&](std::size_t c) {
        if (c == classes.size()) {
            std::uint64_t code = code_of(verts);
            if (best_order.empty() || code > best) {
                best = code;
                best_order = verts;
            }
            return;
        }
        auto [lo, hi] = classes[c];
        std::sort(verts.begin() + lo, verts.begin() + hi);
        do {
            rec(c + 1);
        } while (std::next_permutation(verts.begin() + lo, verts.begin() + hi));
    };
    rec(0);

    std::vector<int> perm(r);
    for (std::size_t label = 0; label < r; ++label) perm[best_order[label]] = static_cast<int>(label);
    return {relabelled(perm), perm};
}

bool Shape::isomorphic(const Shape& other) const {
    if (order() != other.order() || size() != other.size()) return false;
    return canonical().shape == other.canonical().shape;
}

bool operator<(const Shape& a, const Shape& b) {
    if (a.order() != b.order()) return a.order() < b.order();
    if (a.size() != b.size()) return a.size() < b.size();
    return a.adj_ < b.adj_;
}

std::string Shape::name() const {
    const std::size_t r = order();
    if (r == 0) return "E0";
    if (is_complete()) return "K" + std::to_string(r);
    if (edges_.empty()) return "E" + std::to_string(r);
    std::vector<int> deg(r);
    for (std::size_t v = 0; v < r; ++v) deg[v] = degree(static_cast<int>(v));
    int maxd = *std::max_element(deg.begin(), deg.end());
    if (connected()) {
        if (size() == r - 1 && maxd <= 2 && *this == path(r - 1)) return "P" + std::to_string(r - 1);
        if (size() == r - 1 && maxd == static_cast<int>(r - 1) && deg[0] == maxd && r >= 4)
            return "S" + std::to_string(r - 1);
        if (size() == r && r >= 4 && std::all_of(deg.begin(), deg.end(), [](int d) { return d == 2; }) &&
            *this == cycle(r))
            return "C" + std::to_string(r);
    }
    std::ostringstream os;
    os << r << ':';
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        if (i) os << ',';
        os << edges_[i].first << '-' << edges_[i].second;
    }
    return os.str();
}

Shape parse_shape(const std::string& text) {
    require(!text.empty(), "empty shape name");
    auto number = [&](std::size_t from) {
        require(from < text.size() &&
                    std::all_of(text.begin() + from, text.end(), [](char c) { return std::isdigit(c); }),
                "malformed shape name '" + text + "'");
        return static_cast<std::size_t>(std::stoul(text.substr(from)));
    };
    if (std::isalpha(static_cast<unsigned char>(text[0]))) {
        std::size_t k = number(1);
        switch (text[0]) {
            case 'K': return Shape::complete(k);
            case 'E': return Shape::empty(k);
            case 'P': return Shape::path(k);
            case 'S': return Shape::star(k);
            case 'C': return Shape::cycle(k);
            default: fail(Errc::invalid_argument, "unknown shape name '" + text + "'");
        }
    }
    std::string body = text;
    std::size_t order = 0;
    if (auto colon = text.find(':'); colon != std::string::npos) {
        order = std::stoul(text.substr(0, colon));
        body = text.substr(colon + 1);
    }
    std::vector<Shape::Edge> edges;
    std::istringstream is(body);
    std::string item;
    while (std::getline(is, item, ',')) {
        auto dash = item.find('-');
        require(dash != std::string::npos, "malformed edge '" + item + "' in shape '" + text + "'");
        int u = std::stoi(item.substr(0, dash));
        int v = std::stoi(item.substr(dash + 1));
        edges.emplace_back(u, v);
        order = std::max<std::size_t>(order, static_cast<std::size_t>(std::max(u, v)) + 1);
    }
    return Shape(order, edges);
}

}  // namespace atomgraph
