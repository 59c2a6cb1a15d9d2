#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "atomgraph/error.hpp"
#include "atomgraph/kernel.hpp"
#include "atomgraph/rng.hpp"
#include "atomgraph/sampler.hpp"

namespace atomgraph {

/// Simple undirected graph in adjacency-array form (sorted neighbour lists).
class SimpleGraph {
  public:
    SimpleGraph() = default;
    /// Loops are dropped and parallel edges merged.
    SimpleGraph(std::size_t n, std::vector<EdgePair> edges);
    static SimpleGraph from(const GeneratedGraph& g) { return SimpleGraph(g.n(), g.simple_edges()); }

    std::size_t n() const { return offset_.empty() ? 0 : offset_.size() - 1; }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<EdgePair>& edges() const { return edges_; }
    std::span<const Vertex> neighbours(std::size_t v) const {
        return {adj_.data() + offset_[v], offset_[v + 1] - offset_[v]};
    }
    std::size_t degree(std::size_t v) const { return offset_[v + 1] - offset_[v]; }

  private:
    std::vector<EdgePair> edges_;
    std::vector<std::size_t> offset_;
    std::vector<Vertex> adj_;
};

struct ComponentSummary {
    std::size_t C1 = 0;
    std::size_t C2 = 0;
    std::size_t count = 0;
    /// N_ge_k[k] = number of vertices in components of size >= k, k = 0..k_max.
    std::vector<std::size_t> N_ge_k;
    /// (component size, number of components), increasing in size.
    std::vector<std::pair<std::size_t, std::size_t>> size_counts;
};

ComponentSummary components(const SimpleGraph& g, std::size_t k_max = 64);
/// Component label of every vertex (smallest vertex of its component).
std::vector<Vertex> component_labels(const SimpleGraph& g);

struct DegreeHistogram {
    std::vector<std::uint64_t> counts;  // degrees 0..d_max
    std::uint64_t overflow = 0;         // degrees above d_max
    std::size_t n = 0;
};

DegreeHistogram degree_histogram(const SimpleGraph& g, std::size_t d_max = 1000);
/// Degrees counted with multiplicity.
DegreeHistogram degree_histogram(std::size_t n, const std::vector<EdgePair>& multi_edges, std::size_t d_max = 1000);

/// Mixed compound Poisson degree law: a vertex of type x lies in
/// Poisson(lambda_x{d}) atoms in which it has degree d.
struct MCPoRef {
    std::vector<double> pmf;  // 0..d_max
    /// 1 - sum(pmf): mass beyond d_max.
    double truncation_mass = 0.0;
    bool truncation_warning = false;
    /// Mean of the untruncated law, sum_d d int lambda_x{d}.
    double mean = 0.0;
    /// Per node: lambda_x{d} for d = 0..max atom degree.
    std::vector<std::vector<double>> intensity;
};

inline constexpr double truncation_warning_level = 1e-4;

MCPoRef mcpo_reference(const KernelFamily& family, std::size_t d_max = 1000);
/// pmf on 0..d_max of sum_d d X_d with X_d ~ Po(lambda[d]) independent (Panjer recursion).
std::vector<double> compound_poisson_pmf(std::span<const double> lambda, std::size_t d_max);
/// Half the L1 distance on 0..d_max plus half of both overflow masses.
double tv_distance(const DegreeHistogram& hist, const MCPoRef& ref);
double tv_distance(std::span<const double> p, std::span<const double> q);

struct SubgraphCounts {
    std::uint64_t K2 = 0, K3 = 0, P2 = 0, P3 = 0, S3 = 0;
};

SubgraphCounts count_subgraphs(const SimpleGraph& g);
/// 3 n(K3) / n(P2); UndefinedForNoPaths when n(P2) = 0.
double clustering_c2(const SubgraphCounts& c);
/// Degree correlation over ordered edges from the five counts; DegenerateDegrees
/// when the degree variance vanishes.
double mixing_a(const SubgraphCounts& c);

/// Groupings of the blocks of F into connected, tree-like unions; each
/// grouping is a list of edge-index sets.
std::vector<std::vector<std::vector<int>>> tree_decompositions(const Shape& F);
/// sigma_H: expected copies of the labelled graph H arising directly inside atoms.
GridKernel sigma_kernel(const Shape& H, const KernelFamily& family);
/// Normalized density of copies of F (connected, at most 5 vertices); +inf when divergent.
double t_tilde(const Shape& F, const KernelFamily& family);

inline const std::string census_overflow = "overflow";

struct RootedCensus {
    std::size_t depth = 0;
    std::size_t samples = 0;
    /// Canonical rooted-graph code (or census_overflow) -> frequency.
    std::map<std::string, double> freq;
};

/// Canonical code of a rooted graph with vertex 0 as root, given adjacency bitmasks (n <= 16).
std::string rooted_code(const std::vector<std::uint16_t>& adjacency);

RootedCensus neighborhood_census(const SimpleGraph& g, std::size_t t, std::size_t max_vertices = 12);
/// Depth-t balls of the random rooted graph built from the atom branching process.
RootedCensus sample_rooted_limit(const KernelFamily& family, std::size_t t, std::size_t trials, Rng& rng,
                                 std::size_t max_vertices = 12);
double census_tv(const RootedCensus& a, const RootedCensus& b);

}  // namespace atomgraph
