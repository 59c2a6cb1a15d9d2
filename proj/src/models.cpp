#include "atomgraph/models.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>

namespace atomgraph {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// int_0^1 x^{-1/alpha} f(K x^{-1/alpha}) dx after y = x^{-1/alpha}: alpha int_1^inf y^{-alpha} f(K y) dy.
// Integrated in u = 1/y on (0, 1]: alpha int_0^1 u^{alpha-2} f(K/u) du.
template <class F>
double psi_weighted(double alpha, F f) {
    thread_local boost::math::quadrature::tanh_sinh<double> ts;
    return alpha * ts.integrate([&](double u) { return u <= 0.0 ? 0.0 : std::pow(u, alpha - 2.0) * f(u); }, 0.0, 1.0,
                                1e-14);
}

}  // namespace

void PowerLawParams::validate() const {
    require(A >= 0.0 && B >= 0.0 && std::isfinite(A) && std::isfinite(B), "power-law coefficients must be nonnegative");
    require(A + B > 0.0, "power-law family needs A + B > 0");
    require(alpha > 1.0 && std::isfinite(alpha), "power-law exponent alpha must exceed 1");
}

void TwoBlockParams::validate() const {
    require(A > 0.0 && std::isfinite(A), "two-block intensity must be positive");
    require(p > 0.0 && p < 1.0, "two-block weight p must lie in (0, 1)");
}

double beta_k(double alpha, double k) {
    require(alpha > 1.0, "beta_k needs alpha > 1");
    return alpha > k ? alpha / (alpha - k) : inf;
}

KernelFamily powerlaw_family(const PowerLawParams& params, std::size_t nodes) {
    params.validate();
    const double g = 1.0 / params.alpha;
    const double theta = TypeSpace::stratification_for(2.0 * g < 1.0 ? 2.0 * g : g);
    std::vector<AtomEntry> e;
    if (params.A > 0) e.push_back({Shape::complete(2), KernelFunction::rank_one(2, params.A, g)});
    if (params.B > 0) e.push_back({Shape::complete(3), KernelFunction::rank_one(3, params.B, g)});
    return KernelFamily(TypeSpace::unit_interval(nodes, theta), e);
}

Hyperkernel constant_family(const std::vector<std::pair<std::size_t, double>>& cliques) {
    std::vector<AtomEntry> e;
    for (auto [r, c] : cliques) {
        require(r >= 2, "clique arity must be at least 2");
        require(c >= 0.0 && std::isfinite(c), "clique constants must be nonnegative");
        e.push_back({Shape::complete(r), KernelFunction::constant(r, c)});
    }
    return Hyperkernel(KernelFamily(TypeSpace::finite({1.0}), e));
}

KernelFamily two_block(const TwoBlockParams& params) {
    params.validate();
    const double A = params.A;
    return KernelFamily(TypeSpace::finite({params.p, 1.0 - params.p}),
                        {{Shape::complete(2), KernelFunction::block_table(2, 2, {0.0, A, A, 0.0})}});
}

KernelFamily badP2_family(double eps) {
    require(eps > 0.0 && eps < 1.0, "badP2 exponent eps must lie in (0, 1)");
    return KernelFamily(TypeSpace::unit_interval(2048), {{Shape::complete(3), KernelFunction::pair_distance(3, 1.0, eps - 1.0)}});
}

double powerlaw_norm(const PowerLawParams& params) {
    params.validate();
    const double b2 = beta_k(params.alpha, 2);
    if (std::isinf(b2)) return inf;
    return (2 * params.A + 6 * params.B * beta_k(params.alpha, 1)) * b2;
}

bool powerlaw_supercritical(const PowerLawParams& params) {
    params.validate();
    const double a = params.alpha;
    if (a <= 2.0) return true;
    return 2 * params.A + 6 * params.B * a / (a - 1) > (a - 2) / a;
}

double C_map(const PowerLawParams& params, double C) {
    const double beta = beta_k(params.alpha, 1);
    const double K = (2 * params.A + 6 * params.B * beta) * C - 3 * params.B * C * C;
    return psi_weighted(params.alpha, [&](double u) { return -std::expm1(-K / u); });
}

CSolution solve_C(const PowerLawParams& params, double tol) {
    params.validate();
    CSolution sol;
    if (!powerlaw_supercritical(params)) return sol;
    const double beta = beta_k(params.alpha, 1);
    auto f = [&](double C) { return C_map(params, C) - C; };
    // f > 0 just above 0 in the supercritical case and f(beta) < 0 since rho < 1.
    double lo = beta * 1e-300;
    for (double c = beta * 1e-3; c > 1e-300; c *= 1e-3) {
        if (f(c) > 0.0) {
            lo = c;
            break;
        }
    }
    std::uintmax_t iters = 200;
    auto [a, b] = boost::math::tools::toms748_solve(
        f, lo, beta, [&](double x, double y) { return std::abs(y - x) <= tol * std::max(1.0, std::abs(x)); }, iters);
    sol.C = 0.5 * (a + b);
    sol.positive_root = sol.C > 0.0;
    sol.iterations = iters;
    return sol;
}

std::function<double(double)> rho_x(const PowerLawParams& params, double C) {
    const double beta = beta_k(params.alpha, 1);
    const double K = (2 * params.A + 6 * params.B * beta) * C - 3 * params.B * C * C;
    const double g = 1.0 / params.alpha;
    return [K, g](double x) { return -std::expm1(-K * std::pow(x, -g)); };
}

double rho(const PowerLawParams& params) {
    const CSolution s = solve_C(params);
    if (!s.positive_root) return 0.0;
    thread_local boost::math::quadrature::tanh_sinh<double> ts;
    const auto r = rho_x(params, s.C);
    return ts.integrate([&](double x) { return x <= 0.0 ? 1.0 : r(x); }, 0.0, 1.0, 1e-14);
}

double powerlaw_c2(const PowerLawParams& params) {
    params.validate();
    const double b = beta_k(params.alpha, 1), b2 = beta_k(params.alpha, 2);
    if (params.B == 0.0 || std::isinf(b2)) return 0.0;
    const double tri = 3 * params.B * b * b * b;
    const double xbar = params.A + 3 * params.B * b;
    return tri / (tri + 2 * xbar * xbar * b * b * b2);
}

double powerlaw_a(const PowerLawParams& params) {
    params.validate();
    if (params.alpha <= 3.0) return 0.0;
    const double A = params.A, B = params.B;
    const double b = beta_k(params.alpha, 1), b2 = beta_k(params.alpha, 2), b3 = beta_k(params.alpha, 3);
    const double xbar = A + 3 * B * b;
    const double den =
        (4 * std::pow(xbar, 4) * (b * b3 - b2 * b2) + 2 * (A + 6 * B * b) * xbar * xbar * b2 + 3 * A * B * b) * std::pow(b, 4);
    return 3 * A * B * std::pow(b, 5) / den;
}

double twoblock_a(const TwoBlockParams& params) {
    params.validate();
    const double d = params.p - (1.0 - params.p);
    const double x = params.A * d * d;
    return -x / (x + 1.0);
}

DegreeTail degree_tail(const PowerLawParams& params) {
    params.validate();
    const double b = beta_k(params.alpha, 1);
    DegreeTail t;
    t.c = 2 * params.A * b + 6 * params.B * b * b;
    t.c_prime = params.alpha * std::pow(t.c, params.alpha);
    if (params.A == 0.0) t.c_prime *= 2.0;
    return t;
}

}  // namespace atomgraph
