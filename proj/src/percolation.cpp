#include "atomgraph/percolation.hpp"

#include <bit>
#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>
#include <cmath>
#include <map>
#include <numeric>

#include "atomgraph/branching.hpp"
#include "atomgraph/grid.hpp"

namespace atomgraph {

namespace {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::rational<BigInt>;

// Accumulates kernels by canonical shape so isomorphic atoms merge.
class ShapeMerger {
  public:
    void add(const Shape& shape, const KernelFunction& kernel) {
        if (kernel.is_zero()) return;
        const auto c = shape.canonical();
        parts_[c.shape].push_back(kernel.permuted(c.perm));
    }
    std::vector<AtomEntry> entries() const {
        std::vector<AtomEntry> out;
        for (const auto& [shape, ks] : parts_) out.push_back({shape, KernelFunction::sum(ks)});
        return out;
    }

  private:
    std::map<Shape, std::vector<KernelFunction>> parts_;
};

const KernelFunction::Constant* as_constant(const KernelFunction& f) {
    return std::get_if<KernelFunction::Constant>(&f.node());
}

std::size_t find(std::vector<std::size_t>& parent, std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
}

// N_k = sum over k-edge spanning subgraphs of the number of joined vertex pairs.
std::vector<std::uint64_t> joined_pairs_by_size(const Shape& F) {
    const std::size_t e = F.size();
    require(e <= max_theta_edges, "theta_F enumerates 2^e edge subsets; atom " + F.name() + " has too many edges");
    std::vector<std::uint64_t> N(e + 1, 0);
    std::vector<std::size_t> parent(F.order()), size(F.order());
    for (std::uint64_t mask = 0; mask < (1ULL << e); ++mask) {
        std::iota(parent.begin(), parent.end(), 0);
        std::fill(size.begin(), size.end(), 1);
        std::uint64_t pairs = 0;
        for (std::size_t i = 0; i < e; ++i) {
            if (!((mask >> i) & 1U)) continue;
            std::size_t a = find(parent, static_cast<std::size_t>(F.edges()[i].first));
            std::size_t b = find(parent, static_cast<std::size_t>(F.edges()[i].second));
            if (a == b) continue;
            pairs += size[a] * size[b];
            if (size[a] < size[b]) std::swap(a, b);
            parent[b] = a;
            size[a] += size[b];
        }
        N[static_cast<std::size_t>(std::popcount(mask))] += pairs;
    }
    return N;
}

Rational rationalize(double x) {
    require(std::isfinite(x) && x >= 0.0, "kernel constants must be finite and nonnegative");
    // Continued-fraction convergents first, so 1/3 stays 1/3.
    BigInt h0 = 0, h1 = 1, k0 = 1, k1 = 0;
    double rem = x;
    for (int it = 0; it < 40; ++it) {
        const double a = std::floor(rem);
        const BigInt ai = static_cast<BigInt>(static_cast<long long>(a));
        const BigInt h2 = ai * h1 + h0, k2 = ai * k1 + k0;
        h0 = h1;
        h1 = h2;
        k0 = k1;
        k1 = k2;
        const double approx = static_cast<double>(h1) / static_cast<double>(k1);
        if (std::abs(approx - x) <= 1e-15 * std::max(1.0, x)) return Rational(h1, k1);
        if (k1 > BigInt(1000000000000LL)) break;
        const double frac = rem - a;
        if (frac == 0.0) break;
        rem = 1.0 / frac;
    }
    // Exact binary value.
    int exp = 0;
    const double mant = std::frexp(x, &exp);
    const BigInt num = static_cast<BigInt>(static_cast<long long>(std::ldexp(mant, 53)));
    exp -= 53;
    if (exp >= 0) return Rational(num << exp, 1);
    return Rational(num, BigInt(1) << -exp);
}

double integral_of(const KernelFunction& f, const std::shared_ptr<const TypeSpace>& space) {
    if (auto v = f.exact_integral(*space)) return *v;
    return GridKernel::discretize(f, space).integral(Integration::quadrature);
}

bool all_constant(const KernelFamily& family) {
    if (family.series()) return true;
    for (const auto& e : family.entries())
        if (!as_constant(e.kernel)) return false;
    return true;
}

}  // namespace

KernelFamily connectify(const KernelFamily& family) {
    bool connected = !family.generalized();
    for (const auto& e : family.entries()) connected = connected && e.shape.connected();
    if (connected) return KernelFamily(family.space_ptr(), family.entries(), family.series());
    ShapeMerger merger;
    for (const auto& e : family.entries()) {
        if (e.shape.connected()) {
            merger.add(e.shape, e.kernel);
            continue;
        }
        for (const auto& comp : e.shape.components())
            merger.add(e.shape.induced(comp), e.kernel.marginal(comp, family.space()));
    }
    return KernelFamily(family.space_ptr(), merger.entries(), family.series());
}

KernelFamily bond_transform(const KernelFamily& family, double p) {
    require(p >= 0.0 && p <= 1.0, "percolation probability must lie in [0, 1]");
    if (family.series()) fail(Errc::too_many_edges, "bond percolation of a clique series needs unboundedly many edges");
    ShapeMerger merger;
    for (const auto& e : family.entries()) {
        const std::size_t m = e.shape.size();
        if (m > max_bond_edges)
            fail(Errc::too_many_edges, "atom " + e.shape.name() + " has " + std::to_string(m) + " edges; bond percolation expands at most " +
                                           std::to_string(max_bond_edges));
        for (std::uint64_t mask = 0; mask < (1ULL << m); ++mask) {
            const int k = std::popcount(mask);
            const double w = std::pow(p, k) * std::pow(1.0 - p, static_cast<double>(m) - k);
            if (w == 0.0) continue;
            merger.add(e.shape.spanning(mask), e.kernel.scaled(w));
        }
    }
    return KernelFamily::make_generalized(family.space_ptr(), merger.entries());
}

KernelFamily site_transform(const KernelFamily& family, double p) {
    require(p >= 0.0 && p <= 1.0, "percolation probability must lie in [0, 1]");
    if (!family.space().is_finite()) fail(Errc::unsupported, "site percolation is exact only on finite type spaces");
    if (p == 0.0) return KernelFamily(TypeSpace::finite({1.0}), {});
    const auto w = family.space().weights();
    const std::size_t k = w.size();
    const bool star = p < 1.0;
    std::vector<double> weights;
    for (double x : w) weights.push_back(p * x);
    if (star) weights.push_back(1.0 - p);
    // Absorb rounding so the weights sum to one.
    weights.back() = 1.0 - std::accumulate(weights.begin(), weights.end() - 1, 0.0);
    auto space = std::make_shared<const TypeSpace>(TypeSpace::finite(weights));
    const std::size_t types = weights.size();

    std::vector<AtomEntry> entries;
    for (const auto& e : family.expanded()) {
        const std::size_t r = e.shape.order();
        if (r > 12) fail(Errc::arity_too_large, "site percolation expands atoms with at most 12 vertices");
        for (std::uint64_t kept = 1; kept < (1ULL << r); ++kept) {
            const int s = std::popcount(kept);
            const double scale = std::pow(1.0 - p, static_cast<double>(r) - s);
            if (scale == 0.0) continue;
            std::vector<int> keep;
            for (std::size_t v = 0; v < r; ++v)
                if ((kept >> v) & 1U) keep.push_back(static_cast<int>(v));
            const KernelFunction marg = e.kernel.marginal(keep, family.space()).scaled(scale);
            // Lift to the extended space: zero whenever a coordinate is the deleted type.
            std::size_t cells = 1;
            for (int i = 0; i < s; ++i) cells *= types;
            std::vector<double> values(cells, 0.0);
            std::vector<double> y(static_cast<std::size_t>(s));
            for (std::size_t c = 0; c < cells; ++c) {
                std::size_t rem = c;
                bool deleted = false;
                for (int i = s - 1; i >= 0; --i) {
                    const std::size_t t = rem % types;
                    rem /= types;
                    deleted = deleted || t >= k;
                    y[static_cast<std::size_t>(i)] = static_cast<double>(t);
                }
                if (!deleted) values[c] = marg(y);
            }
            entries.push_back({e.shape.induced(keep), KernelFunction::block_table(static_cast<std::size_t>(s), types, std::move(values))});
        }
    }
    return connectify(KernelFamily::make_generalized(space, std::move(entries)));
}

double theta_F(const Shape& F, double p) {
    require(p >= 0.0 && p <= 1.0, "percolation probability must lie in [0, 1]");
    const auto N = joined_pairs_by_size(F);
    const std::size_t e = F.size();
    double s = 0.0;
    for (std::size_t k = 0; k <= e; ++k)
        if (N[k] > 0) s += static_cast<double>(N[k]) * std::pow(p, static_cast<double>(k)) * std::pow(1.0 - p, static_cast<double>(e - k));
    return s;
}

std::vector<std::int64_t> theta_polynomial(const Shape& F) {
    const auto N = joined_pairs_by_size(F);
    const std::size_t e = F.size();
    std::vector<std::int64_t> out(e + 1, 0);
    // p^k (1-p)^(e-k) = sum_j C(e-k, j) (-1)^j p^(k+j)
    for (std::size_t k = 0; k <= e; ++k) {
        std::int64_t binom = 1;
        for (std::size_t j = 0; j + k <= e; ++j) {
            const std::int64_t term = static_cast<std::int64_t>(N[k]) * binom;
            out[k + j] += j % 2 == 0 ? term : -term;
            binom = binom * static_cast<std::int64_t>(e - k - j) / static_cast<std::int64_t>(j + 1);
        }
    }
    return out;
}

double susceptibility_chi(const Shape& F, double p) {
    return 1.0 + 2.0 * theta_F(F, p) / static_cast<double>(F.order());
}

double clique_edge_density(const KernelFamily& family) {
    double total = 0.0;
    for (const auto& e : family.entries()) {
        const double r = static_cast<double>(e.shape.order());
        if (r < 2) continue;
        total += r * (r - 1.0) / 2.0 * integral_of(e.kernel, family.space_ptr());
    }
    if (family.series()) {
        const SeriesSum s = sum_series(*family.series(), [](std::size_t r) { return double(r) * double(r - 1) / 2.0; });
        total = s.divergent ? std::numeric_limits<double>::infinity() : total + s.value;
    }
    return total;
}

double XiPolynomial::operator()(double p) const {
    double v = 0.0;
    for (std::size_t k = coefficients.size(); k-- > 0;) v = v * p + coefficients[k];
    return v;
}

XiPolynomial xi_polynomial(const KernelFamily& family) {
    if (!all_constant(family)) fail(Errc::unsupported, "the threshold polynomial needs constant kernels");
    std::vector<Rational> coef;
    for (const auto& e : family.expanded()) {
        const Rational c = rationalize(as_constant(e.kernel)->value);
        const auto poly = theta_polynomial(e.shape);
        if (coef.size() < poly.size()) coef.resize(poly.size(), Rational(0));
        for (std::size_t k = 0; k < poly.size(); ++k) coef[k] += c * Rational(BigInt(poly[k]));
    }
    XiPolynomial out;
    for (const auto& c : coef) {
        out.exact.emplace_back(c.numerator().str(), c.denominator().str());
        out.coefficients.push_back(static_cast<double>(c.numerator()) / static_cast<double>(c.denominator()));
    }
    return out;
}

double percolation_threshold_constant(const KernelFamily& family, double tol) {
    if (!all_constant(family)) fail(Errc::unsupported, "closed-form percolation thresholds need constant kernels");
    const auto entries = family.expanded();
    auto xi = [&](double p) {
        double s = 0.0;
        for (const auto& e : entries) s += as_constant(e.kernel)->value * theta_F(e.shape, p);
        return s;
    };
    if (!(xi(1.0) > 0.5))
        fail(Errc::no_threshold, "no percolation threshold: the family stays subcritical at p = 1 (xi = " + std::to_string(xi(1.0)) + ")");
    double lo = 0.0, hi = 1.0;
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (xi(mid) > 0.5 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

PercolationReport percolation_report(const KernelFamily& family, double p, bool with_threshold) {
    PercolationReport rep{p, connectify(bond_transform(family, p)), 0.0, 0.0, false, {}, {}};
    rep.xi = clique_edge_density(rep.transformed);
    rep.constant = all_constant(family);
    if (rep.constant) {
        rep.norm = 2.0 * rep.xi;
        rep.polynomial = xi_polynomial(family);
        if (with_threshold) {
            try {
                rep.threshold = percolation_threshold_constant(family);
            } catch (const Error& e) {
                if (e.code() != Errc::no_threshold) throw;
            }
        }
    } else {
        const DiscreteBP bp(to_hyperkernel(rep.transformed));
        rep.norm = operator_norm(bp).value;
    }
    return rep;
}

}  // namespace atomgraph
