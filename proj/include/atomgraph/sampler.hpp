#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "atomgraph/kernel.hpp"
#include "atomgraph/rng.hpp"

namespace atomgraph {

using Vertex = std::uint32_t;
using EdgePair = std::pair<Vertex, Vertex>;

struct VertexTypes {
    /// Type index (finite spaces) or point of (0,1].
    std::vector<double> x;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

VertexTypes sample_types(std::size_t n, const TypeSpace& space, Rng& rng);

/// A generated graph with atom provenance. Edges added without provenance
/// (after percolation) are kept separately.
class GeneratedGraph {
  public:
    GeneratedGraph() = default;
    GeneratedGraph(std::size_t n, std::vector<double> types);

    std::size_t n() const { return n_; }
    const std::vector<double>& types() const { return types_; }

    /// Registers a shape and returns its id.
    std::uint32_t add_shape(const Shape& s);
    void add_atom(std::uint32_t shape, std::span<const Vertex> vertices);
    void add_edge(Vertex u, Vertex v);

    const std::vector<Shape>& shapes() const { return shapes_; }
    std::size_t atom_count() const { return atom_shape_.size(); }
    std::uint32_t atom_shape(std::size_t i) const { return atom_shape_[i]; }
    std::span<const Vertex> atom(std::size_t i) const;
    const std::vector<EdgePair>& loose_edges() const { return loose_; }

    /// Sum of atom sizes.
    std::size_t vertex_sum() const { return atom_vertices_.size(); }
    /// Every edge of every atom plus loose edges, as (min,max) pairs; unsorted.
    std::vector<EdgePair> multi_edges() const;
    /// Sorted, deduplicated edge set.
    std::vector<EdgePair> simple_edges() const;
    /// Number of atoms per shape id.
    std::vector<std::size_t> atoms_per_shape() const;

    friend bool operator==(const GeneratedGraph& a, const GeneratedGraph& b);

  private:
    std::size_t n_ = 0;
    std::vector<double> types_;
    std::vector<Shape> shapes_;
    std::vector<std::uint32_t> atom_shape_;
    std::vector<std::size_t> atom_offset_{0};
    std::vector<Vertex> atom_vertices_;
    std::vector<EdgePair> loose_;
};

struct SamplerConfig {
    enum class Variant {
        /// Thinned Poisson process (canonical).
        poisson,
        /// Independent Poisson count on every ordered tuple; small n oracle.
        poisson_per_tuple,
        /// One copy with probability min(1, kappa/n^{r-1}) per ordered tuple; small n oracle.
        bernoulli_per_tuple,
    };
    Variant variant = Variant::poisson;
    /// Upper limit on the expected number of candidate tuples per kernel.
    double max_candidates = 2e9;
};

/// Samples types, then atoms for each family entry (series expanded up to
/// max_series_arity). Entry k uses stream split(k + 1); types use split(0).
GeneratedGraph generate(const KernelFamily& family, std::size_t n, const SamplerConfig& config, Rng& rng);
/// Same with given vertex types.
GeneratedGraph generate_with_types(const KernelFamily& family, const VertexTypes& types, const SamplerConfig& config,
                                   Rng& rng);

/// Hyperedges as sorted vertex sets (with multiplicity).
struct Hypergraph {
    std::size_t n = 0;
    std::vector<double> types;
    std::vector<std::size_t> offset{0};
    std::vector<Vertex> vertices;

    std::size_t size() const { return offset.size() - 1; }
    std::span<const Vertex> edge(std::size_t i) const {
        return {vertices.data() + offset[i], offset[i + 1] - offset[i]};
    }
};

Hypergraph generate_hypergraph(const Hyperkernel& hk, std::size_t n, const SamplerConfig& config, Rng& rng);
Hypergraph to_hypergraph(const GeneratedGraph& g);
/// Each hyperedge replaced by a clique (resp. a star centred at its smallest vertex).
GeneratedGraph clique_graph(const Hypergraph& h);
GeneratedGraph star_graph(const Hypergraph& h);

/// One uniformly chosen pair per hyperedge of size >= 2; edges returned as (min,max).
std::vector<EdgePair> one_edge_per_hyperedge(const Hypergraph& h, Rng& rng);

/// Row-major n x n matrix of tau-tilde; n <= 5000 and arities <= 4.
std::vector<double> tau_matrix(const Hyperkernel& hk, std::span<const double> types);
/// tau(x,y) = 2 sum_r kappa_r(x,y,*) with exact marginals, as a binary kernel.
KernelFunction tau_function(const Hyperkernel& hk);

/// Keep each simple edge independently with probability p; provenance is dropped.
GeneratedGraph percolate_edges(const GeneratedGraph& g, double p, Rng& rng);
/// Keep each vertex independently with probability p; survivors are relabelled in order.
GeneratedGraph percolate_vertices(const GeneratedGraph& g, double p, Rng& rng);

}  // namespace atomgraph
