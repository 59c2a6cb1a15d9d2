#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "atomgraph/error.hpp"
#include "atomgraph/kernel.hpp"

namespace atomgraph {

/// Largest atom (in edges) expanded over its spanning subgraphs.
inline constexpr std::size_t max_bond_edges = 6;
/// Largest atom (in edges) for the 2^e enumeration behind theta_F.
inline constexpr std::size_t max_theta_edges = 20;

/// Split every atom into its components, integrating out the coordinates of
/// the other components; isomorphic atoms are merged by summing kernels.
/// Isolated-vertex components are kept as one-vertex atoms, so the vertex
/// count iota is preserved.
KernelFamily connectify(const KernelFamily& family);

/// Bond percolation: each kappa_F is spread over the spanning subgraphs F' of F
/// with weight p^e(F') (1-p)^(e(F)-e(F')). The result is a generalized family.
/// TooManyEdges for atoms with more than max_bond_edges edges.
KernelFamily bond_transform(const KernelFamily& family, double p);

/// Site percolation on a finite type space: a deleted-vertex type is added
/// with weight 1-p, the others are scaled by p, and each atom is expanded over
/// its vertex-deletion patterns before connectify. Types of weight zero are
/// dropped, so p = 1 returns the original types. Unsupported on the unit interval.
KernelFamily site_transform(const KernelFamily& family, double p);

/// Expected number of vertex pairs of F joined in F_p, the bond-percolated atom.
double theta_F(const Shape& F, double p);
/// Integer coefficients of theta_F as a polynomial in p (index = power).
std::vector<std::int64_t> theta_polynomial(const Shape& F);
/// Mean component size of a uniformly chosen vertex of F_p: 1 + 2 theta_F(p) / |F|.
double susceptibility_chi(const Shape& F, double p);

/// Clique-replaced edge density sum_F C(|F|, 2) int kappa_F (exact where possible).
double clique_edge_density(const KernelFamily& family);

/// xi_e''(p) = sum_F c_F theta_F(p) for a family of constant kernels, with
/// exact rational coefficients.
struct XiPolynomial {
    /// Coefficient of p^k as a reduced fraction (decimal numerator and denominator).
    std::vector<std::pair<std::string, std::string>> exact;
    std::vector<double> coefficients;
    double operator()(double p) const;
};

/// Unsupported unless every kernel is constant.
XiPolynomial xi_polynomial(const KernelFamily& family);

/// Root of xi_e''(p) = 1/2 for a constant family; a giant component exists for
/// p > p_c. NoThreshold when xi_e''(1) <= 1/2.
double percolation_threshold_constant(const KernelFamily& family, double tol = 1e-10);

struct PercolationReport {
    double p = 0.0;
    KernelFamily transformed;
    /// xi_e'' of the clique-replaced transformed family.
    double xi = 0.0;
    /// Norm of T for the transformed hyperkernel; for constant families the
    /// closed form 2 xi.
    double norm = 0.0;
    bool constant = false;
    std::optional<XiPolynomial> polynomial;
    std::optional<double> threshold;
};

/// Bond percolation summary. The threshold is computed when requested and
/// the family is constant; NoThreshold is reported as an empty threshold.
PercolationReport percolation_report(const KernelFamily& family, double p, bool with_threshold = false);

}  // namespace atomgraph
