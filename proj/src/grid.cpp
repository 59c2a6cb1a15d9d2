#include "atomgraph/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "atomgraph/error.hpp"

namespace atomgraph {

namespace {

double safe_mul(double a, double b) {
    if (a == 0.0 || b == 0.0) return 0.0;
    return a * b;
}

// Decompose a flat row-major index into r coordinates of base m.
void unflatten(std::size_t idx, std::size_t m, std::vector<std::size_t>& out) {
    for (std::size_t i = out.size(); i-- > 0;) {
        out[i] = idx % m;
        idx /= m;
    }
}

}  // namespace

std::size_t tensor_size(std::size_t m, std::size_t r) {
    std::size_t out = 1;
    for (std::size_t i = 0; i < r; ++i) {
        if (m != 0 && out > std::numeric_limits<std::size_t>::max() / m) return std::numeric_limits<std::size_t>::max();
        out *= m;
    }
    return out;
}

Factor Factor::power(double gamma) {
    Factor f;
    if (gamma == 0.0) return f;
    f.kind_ = Kind::power;
    f.gamma_ = gamma;
    return f;
}

Factor Factor::tabulated(std::vector<double> values) {
    Factor f;
    f.kind_ = Kind::tabulated;
    f.values_ = std::move(values);
    return f;
}

double Factor::at(const TypeSpace& space, std::size_t node) const {
    switch (kind_) {
        case Kind::ones:
            return 1.0;
        case Kind::power:
            return std::pow(space.nodes()[node], -gamma_);
        case Kind::tabulated:
            return values_[node];
    }
    return 0.0;
}

std::vector<double> Factor::tabulate(const TypeSpace& space) const {
    if (kind_ == Kind::tabulated) return values_;
    std::vector<double> out(space.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = at(space, i);
    return out;
}

double Factor::integral(const TypeSpace& space, Integration mode) const {
    if (kind_ == Kind::ones) return 1.0;
    if (kind_ == Kind::power && mode == Integration::exact) return power_moment(gamma_);
    auto w = space.weights();
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * at(space, i);
    return s;
}

double Factor::weighted_sum(const TypeSpace& space, std::span<const double> g) const {
    auto w = space.weights();
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * at(space, i) * g[i];
    return s;
}

Factor Factor::times(const Factor& other, const TypeSpace& space) const {
    if (kind_ == Kind::ones) return other;
    if (other.kind_ == Kind::ones) return *this;
    if (kind_ == Kind::power && other.kind_ == Kind::power) return power(gamma_ + other.gamma_);
    std::vector<double> v(space.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = at(space, i) * other.at(space, i);
    return tabulated(std::move(v));
}

GridKernel::GridKernel(std::shared_ptr<const TypeSpace> space, std::size_t arity)
    : space_(std::move(space)), arity_(arity) {
    require(space_ != nullptr, "grid kernel needs a type space");
}

GridKernel GridKernel::discretize(const KernelFunction& f, std::shared_ptr<const TypeSpace> space) {
    const std::size_t r = f.arity();
    GridKernel out(space, r);
    const TypeSpace& s = *space;
    const std::size_t m = s.size();
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, KernelFunction::Constant>) {
                out.add_term({node.value, std::vector<Factor>(r, Factor::ones())});
            } else if constexpr (std::is_same_v<T, KernelFunction::RankOneProduct>) {
                const Factor phi =
                    node.per_type.empty() ? Factor::power(node.gamma) : Factor::tabulated(node.per_type);
                out.add_term({node.coef, std::vector<Factor>(r, phi)});
            } else if constexpr (std::is_same_v<T, KernelFunction::BlockTable>) {
                require(s.is_finite() && node.types == m, "block table does not match the type space");
                out.add_dense(node.values);
            } else if constexpr (std::is_same_v<T, KernelFunction::PairDistancePower>) {
                fail(Errc::unsupported, "pair-distance kernels have no grid discretization");
            } else if constexpr (std::is_same_v<T, KernelFunction::Capped>) {
                const std::size_t size = tensor_size(m, r);
                if (size > max_dense_entries)
                    fail(Errc::arity_too_large, "capped kernel of arity " + std::to_string(r) + " on " +
                                                    std::to_string(m) + " nodes needs a tensor that is too large");
                const GridKernel inner = discretize(*node.inner, space);
                std::vector<double> values(size);
                std::vector<std::size_t> idx(r);
                for (std::size_t i = 0; i < size; ++i) {
                    unflatten(i, m, idx);
                    values[i] = std::min(inner.at(idx), node.cap);
                }
                out.add_dense(std::move(values));
            } else {
                for (const auto& t : node.terms) out.add(discretize(t, space));
            }
        },
        f.node());
    return out;
}

void GridKernel::add_term(SepTerm term) {
    require(term.factors.size() == arity_, "separable term has the wrong arity");
    if (term.coef == 0.0) return;
    for (auto& t : terms_) {
        if (t.factors == term.factors) {
            t.coef += term.coef;
            return;
        }
    }
    terms_.push_back(std::move(term));
}

void GridKernel::add(const GridKernel& other) {
    require(other.arity_ == arity_, "grid kernels of different arity");
    for (const auto& t : other.terms_) add_term(t);
    if (other.has_dense()) add_dense(other.dense_);
}

void GridKernel::add_dense(std::vector<double> values) {
    const std::size_t size = tensor_size(space_->size(), arity_);
    require(values.size() == size, "dense tensor has the wrong size");
    if (dense_.empty()) {
        dense_ = std::move(values);
    } else {
        for (std::size_t i = 0; i < size; ++i) dense_[i] += values[i];
    }
}

GridKernel GridKernel::scaled(double s) const {
    GridKernel out = *this;
    for (auto& t : out.terms_) t.coef *= s;
    for (double& v : out.dense_) v *= s;
    return out;
}

double GridKernel::at(std::span<const std::size_t> nodes) const {
    double v = 0.0;
    for (const auto& t : terms_) {
        double p = t.coef;
        for (std::size_t i = 0; i < arity_; ++i) p *= t.factors[i].at(*space_, nodes[i]);
        v += p;
    }
    if (has_dense()) {
        const std::size_t m = space_->size();
        std::size_t idx = 0;
        for (std::size_t i = 0; i < arity_; ++i) idx = idx * m + nodes[i];
        v += dense_[idx];
    }
    return v;
}

GridKernel GridKernel::marginal(std::span<const int> keep, Integration mode) const {
    const std::size_t s = keep.size();
    std::vector<bool> kept(arity_, false);
    for (int k : keep) {
        require(k >= 0 && static_cast<std::size_t>(k) < arity_ && !kept[static_cast<std::size_t>(k)],
                "marginal positions must be distinct and in range");
        kept[static_cast<std::size_t>(k)] = true;
    }
    GridKernel out(space_, s);
    for (const auto& t : terms_) {
        SepTerm nt{t.coef, {}};
        for (std::size_t i = 0; i < arity_; ++i)
            if (!kept[i]) nt.coef = safe_mul(nt.coef, t.factors[i].integral(*space_, mode));
        for (int k : keep) nt.factors.push_back(t.factors[static_cast<std::size_t>(k)]);
        out.add_term(std::move(nt));
    }
    if (has_dense()) {
        const std::size_t m = space_->size();
        auto w = space_->weights();
        std::vector<double> values(tensor_size(m, s), 0.0);
        std::vector<std::size_t> idx(arity_);
        for (std::size_t i = 0; i < dense_.size(); ++i) {
            if (dense_[i] == 0.0) continue;
            unflatten(i, m, idx);
            double weight = 1.0;
            for (std::size_t j = 0; j < arity_; ++j)
                if (!kept[j]) weight *= w[idx[j]];
            std::size_t dst = 0;
            for (int k : keep) dst = dst * m + idx[static_cast<std::size_t>(k)];
            values[dst] += weight * dense_[i];
        }
        if (s == 0) {
            out.add_term({values[0], {}});
        } else {
            out.add_dense(std::move(values));
        }
    }
    return out;
}

double GridKernel::integral(Integration mode) const {
    const GridKernel m = marginal(std::span<const int>{}, mode);
    double v = 0.0;
    for (const auto& t : m.terms_) v += t.coef;
    return v;
}

GridKernel GridKernel::permuted(std::span<const int> perm) const {
    require(perm.size() == arity_, "permutation length must equal the kernel arity");
    GridKernel out(space_, arity_);
    for (const auto& t : terms_) {
        SepTerm nt{t.coef, {}};
        for (std::size_t i = 0; i < arity_; ++i) nt.factors.push_back(t.factors[static_cast<std::size_t>(perm[i])]);
        out.add_term(std::move(nt));
    }
    if (has_dense()) {
        const std::size_t m = space_->size();
        std::vector<double> values(dense_.size());
        std::vector<std::size_t> y(arity_);
        for (std::size_t i = 0; i < values.size(); ++i) {
            unflatten(i, m, y);
            std::size_t src = 0;
            for (std::size_t j = 0; j < arity_; ++j) src = src * m + y[static_cast<std::size_t>(perm[j])];
            values[i] = dense_[src];
        }
        out.add_dense(std::move(values));
    }
    return out;
}

bool GridKernel::is_zero() const {
    return terms_.empty() && std::all_of(dense_.begin(), dense_.end(), [](double v) { return v == 0.0; });
}

std::vector<double> GridKernel::to_matrix() const {
    require(arity_ == 2, "to_matrix needs a binary kernel");
    const std::size_t m = space_->size();
    std::vector<double> out = has_dense() ? dense_ : std::vector<double>(m * m, 0.0);
    for (const auto& t : terms_) {
        const auto a = t.factors[0].tabulate(*space_);
        const auto b = t.factors[1].tabulate(*space_);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < m; ++j) out[i * m + j] += t.coef * a[i] * b[j];
    }
    return out;
}

std::vector<double> GridKernel::apply(std::span<const double> g) const {
    require(arity_ == 2, "apply needs a binary kernel");
    const std::size_t m = space_->size();
    require(g.size() == m, "grid function has the wrong length");
    std::vector<double> out(m, 0.0);
    for (const auto& t : terms_) {
        const double inner = t.coef * t.factors[1].weighted_sum(*space_, g);
        if (inner == 0.0) continue;
        for (std::size_t i = 0; i < m; ++i) out[i] += inner * t.factors[0].at(*space_, i);
    }
    if (has_dense()) {
        auto w = space_->weights();
        for (std::size_t i = 0; i < m; ++i) {
            double s = 0.0;
            const double* row = dense_.data() + i * m;
            for (std::size_t j = 0; j < m; ++j) s += row[j] * w[j] * g[j];
            out[i] += s;
        }
    }
    return out;
}

}  // namespace atomgraph
