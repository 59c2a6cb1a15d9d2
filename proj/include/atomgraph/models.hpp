#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

#include "atomgraph/error.hpp"
#include "atomgraph/kernel.hpp"

namespace atomgraph {

/// kappa_2 = A (xy)^{-1/alpha}, kappa_3 = B (xyz)^{-1/alpha} on (0,1].
struct PowerLawParams {
    double A = 0.0;
    double B = 0.0;
    double alpha = 3.0;
    /// Throws InvalidArgument unless A, B >= 0, A + B > 0 and alpha > 1.
    void validate() const;
};

/// Two types of weight p and 1-p joined by edges: kappa_2(x, y) = A 1{x != y}.
struct TwoBlockParams {
    double A = 1.0;
    double p = 0.5;
    void validate() const;
};

/// int_0^1 x^{-k/alpha} dx: alpha / (alpha - k), or +inf when alpha <= k.
double beta_k(double alpha, double k);

/// Power-law family on a quantile grid stratified for the x^{-2/alpha} integrands.
KernelFamily powerlaw_family(const PowerLawParams& params, std::size_t nodes = 2048);
/// Single-type hyperkernel with constant clique kernels, given as (r, c_r) pairs.
Hyperkernel constant_family(const std::vector<std::pair<std::size_t, double>>& cliques);
KernelFamily two_block(const TwoBlockParams& params);
/// Triangles only, kappa_3 = sum of d(x_i, x_j)^{eps - 1} over the three pairs
/// (circle metric). Integrable but with unbounded degrees.
KernelFamily badP2_family(double eps);

/// ||T|| = (2A + 6B beta) beta_2; +inf for alpha <= 2.
double powerlaw_norm(const PowerLawParams& params);
/// 2A + 6B alpha/(alpha-1) > (alpha-2)/alpha.
bool powerlaw_supercritical(const PowerLawParams& params);

struct CSolution {
    double C = 0.0;
    /// False in the (critical or) subcritical case, where C = 0 is the only root.
    bool positive_root = false;
    std::size_t iterations = 0;
};

/// Positive root of C = int x^{-1/alpha} (1 - exp(-((2A + 6B beta) C - 3B C^2) x^{-1/alpha})) dx.
CSolution solve_C(const PowerLawParams& params, double tol = 1e-13);
/// rho(x) = 1 - exp(-(2AC + 6B beta C - 3B C^2) x^{-1/alpha}).
std::function<double(double)> rho_x(const PowerLawParams& params, double C);
/// int rho(x) dx at the maximal root (0 when subcritical).
double rho(const PowerLawParams& params);
/// int x^{-1/alpha} rho(x) dx for the given C (the right-hand side of the C equation).
double C_map(const PowerLawParams& params, double C);

/// Limiting clustering coefficient 3 t(K3) / t(P2); 0 when alpha <= 2.
double powerlaw_c2(const PowerLawParams& params);
/// Limiting degree correlation; 0 for alpha <= 3, where t(S3) is infinite.
double powerlaw_a(const PowerLawParams& params);
/// -A (p - q)^2 / (A (p - q)^2 + 1).
double twoblock_a(const TwoBlockParams& params);

struct DegreeTail {
    /// P(degree > k) ~ (k / c)^{-alpha}.
    double c = 0.0;
    /// d_k ~ c' k^{-alpha-1}; with A = 0 this is the constant for even k (odd degrees vanish).
    double c_prime = 0.0;
};

DegreeTail degree_tail(const PowerLawParams& params);

}  // namespace atomgraph
