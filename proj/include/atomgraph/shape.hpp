#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace atomgraph {

/// A small labelled simple graph on vertices {0, ..., order-1}.
///
/// Used for atom shapes, for spanning subgraphs in the percolation
/// transforms, and for the pieces of tree decompositions. Up to 64 vertices
/// are representable (adjacency is stored as one bitmask per vertex), but the
/// brute-force isomorphism machinery is limited to small orders.
class Shape {
  public:
    using Edge = std::pair<int, int>;

    static constexpr std::size_t max_order = 64;
    /// Largest order handled by canonical() / automorphisms() for non-cliques.
    static constexpr std::size_t max_canonical_order = 10;

    Shape() = default;
    Shape(std::size_t order, const std::vector<Edge>& edges);

    static Shape complete(std::size_t r);
    static Shape empty(std::size_t r);
    /// Path with `k` edges (k+1 vertices), P_k.
    static Shape path(std::size_t k);
    /// Star with `k` edges, K_{1,k}; vertex 0 is the centre.
    static Shape star(std::size_t k);
    static Shape cycle(std::size_t k);

    std::size_t order() const { return adj_.size(); }
    std::size_t size() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }

    bool adjacent(int u, int v) const { return (adj_[u] >> v) & 1U; }
    std::uint64_t neighbours(int v) const { return adj_[v]; }
    int degree(int v) const;

    bool connected() const;
    bool is_complete() const { return edges_.size() == order() * (order() - 1) / 2; }
    std::vector<std::vector<int>> components() const;
    std::vector<int> distances_from(int v) const;

    /// Blocks (maximal 2-connected subgraphs and bridges) as lists of edge
    /// indices into edges().
    std::vector<std::vector<int>> blocks() const;

    /// Subgraph induced on `vertices`; vertex i of the result is vertices[i].
    Shape induced(const std::vector<int>& vertices) const;
    /// Spanning subgraph keeping the edges whose index bit is set in `mask`.
    Shape spanning(std::uint64_t mask) const;
    /// Relabel: vertex v becomes perm[v].
    Shape relabelled(const std::vector<int>& perm) const;

    /// All automorphisms as vertex permutations.
    std::vector<std::vector<int>> automorphisms() const;
    double automorphism_count() const;

    /// Injective homomorphisms into `host` (edges must map to edges).
    std::vector<std::vector<int>> embeddings_into(const Shape& host) const;

    struct Canonical;
    Canonical canonical() const;
    bool isomorphic(const Shape& other) const;

    std::string name() const;

    friend bool operator==(const Shape& a, const Shape& b) { return a.adj_ == b.adj_; }
    friend bool operator!=(const Shape& a, const Shape& b) { return !(a == b); }
    friend bool operator<(const Shape& a, const Shape& b);

  private:
    std::vector<std::uint64_t> adj_;
    std::vector<Edge> edges_;
};

struct Shape::Canonical {
    Shape shape;
    /// perm[v] is the canonical label of vertex v.
    std::vector<int> perm;
};

/// Parse "K3", "P2", "S3", "C4", "E3" (edgeless) or an explicit edge list
/// such as "0-1,1-2" (order inferred, or given as "4:0-1,1-2").
Shape parse_shape(const std::string& text);

}  // namespace atomgraph
