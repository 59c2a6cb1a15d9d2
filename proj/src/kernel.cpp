#include "atomgraph/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>

#include "atomgraph/error.hpp"

namespace atomgraph {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double integral_of(const KernelFunction& f, const std::shared_ptr<const TypeSpace>& space) {
    if (auto v = f.exact_integral(*space)) return *v;
    return GridKernel::discretize(f, space).integral(Integration::quadrature);
}

KernelFunction orbit_average_table(const KernelFunction& f, const std::vector<std::vector<int>>& gens) {
    const auto& t = std::get<KernelFunction::BlockTable>(f.node());
    const std::size_t r = f.arity();
    const std::size_t k = t.types;
    std::vector<double> out(t.values.size(), 0.0);
    std::vector<bool> seen(t.values.size(), false);
    std::vector<std::size_t> y(r);
    auto decode = [&](std::size_t idx, std::vector<std::size_t>& v) {
        for (std::size_t i = r; i-- > 0;) {
            v[i] = idx % k;
            idx /= k;
        }
    };
    for (std::size_t start = 0; start < t.values.size(); ++start) {
        if (seen[start]) continue;
        std::vector<std::size_t> orbit{start};
        seen[start] = true;
        for (std::size_t q = 0; q < orbit.size(); ++q) {
            decode(orbit[q], y);
            for (const auto& g : gens) {
                std::size_t idx = 0;
                for (std::size_t i = 0; i < r; ++i) idx = idx * k + y[static_cast<std::size_t>(g[i])];
                if (!seen[idx]) {
                    seen[idx] = true;
                    orbit.push_back(idx);
                }
            }
        }
        std::sort(orbit.begin(), orbit.end());
        double s = 0.0;
        for (std::size_t idx : orbit) s += t.values[idx];
        const double avg = s / static_cast<double>(orbit.size());
        for (std::size_t idx : orbit) out[idx] = avg;
    }
    return KernelFunction::block_table(r, k, std::move(out));
}

std::vector<std::vector<int>> adjacent_transpositions(std::size_t r) {
    std::vector<std::vector<int>> gens;
    for (std::size_t i = 0; i + 1 < r; ++i) {
        std::vector<int> p(r);
        std::iota(p.begin(), p.end(), 0);
        std::swap(p[i], p[i + 1]);
        gens.push_back(std::move(p));
    }
    return gens;
}

KernelFunction average_explicit(const KernelFunction& f, const std::vector<std::vector<int>>& group) {
    std::vector<KernelFunction> terms;
    const double w = 1.0 / static_cast<double>(group.size());
    for (const auto& g : group) terms.push_back(f.permuted(g).scaled(w));
    return KernelFunction::sum(terms);
}

}  // namespace

double CliqueSeries::value(std::size_t r) const {
    if (r < min_arity || r > max_arity) return 0.0;
    return std::min(scale * std::pow(static_cast<double>(r), exponent), cap);
}

std::size_t CliqueSeries::last_explicit() const { return std::min(max_arity, max_series_arity); }

SeriesSum sum_series(const CliqueSeries& s, double (*weight)(std::size_t)) {
    SeriesSum out;
    double last = 0.0;
    double prev = 0.0;
    for (std::size_t r = s.min_arity; r <= s.last_explicit(); ++r) {
        prev = last;
        last = weight(r) * s.value(r);
        out.value += last;
    }
    if (!s.unbounded() || last == 0.0) return out;
    const double R = static_cast<double>(s.last_explicit());
    if (last > divergence_ratio * out.value) {
        out.divergent = true;
        out.tail_bound = inf;
        return out;
    }
    // Tail of a locally power-law series: t_R * R / (-p - 1).
    const double p = std::log(last / prev) / std::log(R / (R - 1.0));
    out.tail_bound = p < -1.0 ? last * R / (-p - 1.0) : inf;
    return out;
}

KernelFamily::KernelFamily(TypeSpace space, std::vector<AtomEntry> entries, std::optional<CliqueSeries> series)
    : KernelFamily(std::make_shared<const TypeSpace>(std::move(space)), std::move(entries), series) {}

KernelFamily::KernelFamily(std::shared_ptr<const TypeSpace> space, std::vector<AtomEntry> entries,
                           std::optional<CliqueSeries> series)
    : space_(std::move(space)), entries_(std::move(entries)), series_(series) {
    validate();
}

KernelFamily KernelFamily::make_generalized(std::shared_ptr<const TypeSpace> space, std::vector<AtomEntry> entries) {
    KernelFamily f;
    f.space_ = std::move(space);
    f.entries_ = std::move(entries);
    f.generalized_ = true;
    f.validate();
    return f;
}

void KernelFamily::validate() const {
    require(space_ != nullptr, "kernel family needs a type space");
    for (const auto& e : entries_) {
        require(e.shape.order() >= 1, "atoms need at least one vertex");
        require(e.shape.order() == e.kernel.arity(),
                "kernel arity " + std::to_string(e.kernel.arity()) + " does not match atom " + e.shape.name());
        require(generalized_ || e.shape.connected(), "atom " + e.shape.name() + " is not connected");
        e.kernel.validate(*space_);
    }
    if (series_) {
        require(series_->scale >= 0.0 && std::isfinite(series_->scale), "series scale must be nonnegative");
        require(std::isfinite(series_->exponent), "series exponent must be finite");
        require(series_->min_arity >= 2, "series must start at arity 2 or more");
        require(series_->cap >= 0.0, "series cap must be nonnegative");
    }
}

std::vector<AtomEntry> KernelFamily::expanded() const {
    std::vector<AtomEntry> out = entries_;
    if (series_) {
        for (std::size_t r = series_->min_arity; r <= series_->last_explicit(); ++r) {
            const double c = series_->value(r);
            if (c > 0.0) out.push_back({Shape::complete(r), KernelFunction::constant(r, c)});
        }
    }
    return out;
}

KernelFamily KernelFamily::with_space(const TypeSpace& space) const {
    KernelFamily f = *this;
    f.space_ = std::make_shared<const TypeSpace>(space);
    f.validate();
    return f;
}

Hyperkernel::Hyperkernel(KernelFamily cliques) : family_(std::move(cliques)) {
    std::map<std::size_t, std::vector<KernelFunction>> by_arity;
    for (const auto& e : family_.entries()) {
        require(e.shape.is_complete(), "hyperkernel atoms must be cliques, got " + e.shape.name());
        require(e.kernel.fully_symmetric(), "hyperkernel kernels must be fully symmetric");
        by_arity[e.shape.order()].push_back(e.kernel);
    }
    std::vector<AtomEntry> merged;
    for (auto& [r, ks] : by_arity) merged.push_back({Shape::complete(r), KernelFunction::sum(ks)});
    family_ = KernelFamily(family_.space_ptr(), std::move(merged), family_.series());
}

const KernelFunction* Hyperkernel::kernel(std::size_t r) const {
    for (const auto& e : family_.entries())
        if (e.shape.order() == r) return &e.kernel;
    return nullptr;
}

KernelFunction average_over_group(const KernelFunction& f, const std::vector<std::vector<int>>& group) {
    if (f.fully_symmetric() || group.size() <= 1) return f;
    if (const auto* s = std::get_if<KernelFunction::SumOfTerms>(&f.node())) {
        std::vector<KernelFunction> terms;
        for (const auto& t : s->terms) terms.push_back(average_over_group(t, group));
        return KernelFunction::sum(terms);
    }
    if (std::holds_alternative<KernelFunction::BlockTable>(f.node())) return orbit_average_table(f, group);
    return average_explicit(f, group);
}

KernelFunction full_symmetrization(const KernelFunction& f) {
    const std::size_t r = f.arity();
    if (f.fully_symmetric() || r <= 1) return f;
    if (const auto* s = std::get_if<KernelFunction::SumOfTerms>(&f.node())) {
        std::vector<KernelFunction> terms;
        for (const auto& t : s->terms) terms.push_back(full_symmetrization(t));
        return KernelFunction::sum(terms);
    }
    if (std::holds_alternative<KernelFunction::BlockTable>(f.node()))
        return orbit_average_table(f, adjacent_transpositions(r));
    if (r > 8) fail(Errc::arity_too_large, "cannot symmetrize a non-symmetric kernel of arity " + std::to_string(r));
    std::vector<std::vector<int>> group;
    std::vector<int> p(r);
    std::iota(p.begin(), p.end(), 0);
    do {
        group.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return average_explicit(f, group);
}

KernelFamily symmetrize(const KernelFamily& family) {
    std::vector<AtomEntry> out;
    for (const auto& e : family.entries()) {
        if (e.kernel.fully_symmetric()) {
            out.push_back(e);
        } else if (e.shape.is_complete()) {
            out.push_back({e.shape, full_symmetrization(e.kernel)});
        } else {
            out.push_back({e.shape, average_over_group(e.kernel, e.shape.automorphisms())});
        }
    }
    if (family.generalized()) return KernelFamily::make_generalized(family.space_ptr(), std::move(out));
    return KernelFamily(family.space_ptr(), std::move(out), family.series());
}

Hyperkernel to_hyperkernel(const KernelFamily& family) {
    std::map<std::size_t, std::vector<KernelFunction>> by_arity;
    for (const auto& e : family.entries()) by_arity[e.shape.order()].push_back(full_symmetrization(e.kernel));
    std::vector<AtomEntry> cliques;
    for (auto& [r, ks] : by_arity) cliques.push_back({Shape::complete(r), KernelFunction::sum(ks)});
    return Hyperkernel(KernelFamily(family.space_ptr(), std::move(cliques), family.series()));
}

EdgeKernel edge_kernel(const KernelFamily& family) {
    const auto& space = family.space_ptr();
    EdgeKernel ek{GridKernel(space, 2), false, 0.0, {}};
    for (const auto& e : family.entries()) {
        if (e.shape.size() == 0 || e.kernel.is_zero()) continue;
        const GridKernel g = GridKernel::discretize(e.kernel, space);
        if (e.kernel.fully_symmetric()) {
            const int keep[2] = {0, 1};
            ek.kernel.add(g.marginal(keep, Integration::quadrature).scaled(2.0 * static_cast<double>(e.shape.size())));
        } else {
            for (auto [u, v] : e.shape.edges()) {
                const int a[2] = {u, v};
                const int b[2] = {v, u};
                ek.kernel.add(g.marginal(a, Integration::quadrature));
                ek.kernel.add(g.marginal(b, Integration::quadrature));
            }
        }
    }
    if (family.series()) {
        const SeriesSum s = sum_series(*family.series(), [](std::size_t r) { return double(r) * double(r - 1); });
        ek.kernel.add_term({s.value, {Factor::ones(), Factor::ones()}});
        ek.divergent = s.divergent;
    }
    std::vector<double> ones(space->size(), 1.0);
    ek.lambda = ek.kernel.apply(ones);
    ek.xi_e = ek.divergent ? inf : 0.5 * ek.kernel.integral(Integration::quadrature);
    return ek;
}

EdgeKernel edge_kernel(const Hyperkernel& hk) { return edge_kernel(hk.family()); }

double edge_density(const KernelFamily& family) {
    double total = 0.0;
    for (const auto& e : family.entries()) {
        if (e.shape.size() == 0 || e.kernel.is_zero()) continue;
        total += static_cast<double>(e.shape.size()) * integral_of(e.kernel, family.space_ptr());
    }
    if (family.series()) {
        const SeriesSum s = sum_series(*family.series(), [](std::size_t r) { return double(r) * double(r - 1) / 2.0; });
        if (s.divergent) return inf;
        total += s.value;
    }
    return total;
}

IntegrabilityReport integrability_report(const KernelFamily& family) {
    IntegrabilityReport rep;
    for (const auto& e : family.entries()) {
        if (e.kernel.is_zero()) continue;
        const double I = integral_of(e.kernel, family.space_ptr());
        rep.iota += static_cast<double>(e.shape.order()) * I;
        if (e.shape.size() > 0) rep.xi_e += static_cast<double>(e.shape.size()) * I;
    }
    if (family.series()) {
        const SeriesSum si = sum_series(*family.series(), [](std::size_t r) { return double(r); });
        const SeriesSum se = sum_series(*family.series(), [](std::size_t r) { return double(r) * double(r - 1) / 2.0; });
        rep.iota = si.divergent ? inf : rep.iota + si.value;
        rep.xi_e = se.divergent ? inf : rep.xi_e + se.value;
    }
    rep.integrable = std::isfinite(rep.iota);
    rep.edge_integrable = std::isfinite(rep.xi_e);
    return rep;
}

std::optional<bool> irreducibility_check(const KernelFamily& family) {
    if (!family.space().is_finite()) return std::nullopt;
    const std::size_t k = family.space().size();
    const auto m = edge_kernel(family).kernel.to_matrix();
    std::vector<bool> seen(k, false);
    std::deque<std::size_t> queue{0};
    seen[0] = true;
    std::size_t reached = 1;
    while (!queue.empty()) {
        const std::size_t i = queue.front();
        queue.pop_front();
        for (std::size_t j = 0; j < k; ++j) {
            if (seen[j] || (m[i * k + j] <= zero_tolerance && m[j * k + i] <= zero_tolerance)) continue;
            seen[j] = true;
            ++reached;
            queue.push_back(j);
        }
    }
    return reached == k;
}

KernelFamily truncate(const KernelFamily& family, double M) {
    require(M > 0.0, "truncation level must be positive");
    std::vector<AtomEntry> out;
    for (const auto& e : family.entries()) {
        if (static_cast<double>(e.shape.order()) > M) continue;
        out.push_back({e.shape, e.kernel.capped_at(M)});
    }
    std::optional<CliqueSeries> series = family.series();
    if (series) {
        series->max_arity = std::min(series->max_arity, static_cast<std::size_t>(std::floor(M)));
        series->cap = std::min(series->cap, M);
    }
    if (family.generalized()) return KernelFamily::make_generalized(family.space_ptr(), std::move(out));
    return KernelFamily(family.space_ptr(), std::move(out), series);
}

EdgeKernel tau_kernel(const Hyperkernel& hk) {
    const auto& space = hk.family().space_ptr();
    EdgeKernel ek{GridKernel(space, 2), false, 0.0, {}};
    for (const auto& e : hk.family().entries()) {
        if (e.shape.order() < 2 || e.kernel.is_zero()) continue;
        const int keep[2] = {0, 1};
        ek.kernel.add(GridKernel::discretize(e.kernel, space).marginal(keep, Integration::quadrature).scaled(2.0));
    }
    if (hk.series()) {
        const SeriesSum s = sum_series(*hk.series(), [](std::size_t) { return 2.0; });
        ek.kernel.add_term({s.value, {Factor::ones(), Factor::ones()}});
        ek.divergent = s.divergent;
    }
    std::vector<double> ones(space->size(), 1.0);
    ek.lambda = ek.kernel.apply(ones);
    ek.xi_e = ek.divergent ? inf : 0.5 * ek.kernel.integral(Integration::quadrature);
    return ek;
}

}  // namespace atomgraph
