#include "atomgraph/kernel_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "atomgraph/error.hpp"

namespace atomgraph {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

std::size_t ipow(std::size_t base, std::size_t e) {
    std::size_t out = 1;
    for (std::size_t i = 0; i < e; ++i) out *= base;
    return out;
}

// Product that treats 0 * inf as 0.
double safe_mul(double a, double b) {
    if (a == 0.0 || b == 0.0) return 0.0;
    return a * b;
}

double factor_integral(const KernelFunction::RankOneProduct& t, const TypeSpace& space) {
    if (t.per_type.empty()) return power_moment(t.gamma);
    double s = 0.0;
    auto w = space.weights();
    for (std::size_t i = 0; i < t.per_type.size(); ++i) s += w[i] * t.per_type[i];
    return s;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string fmt_list(const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += fmt(v[i]);
    }
    return s + "]";
}

}  // namespace

double power_moment(double gamma) {
    if (gamma >= 1.0) return inf;
    return 1.0 / (1.0 - gamma);
}

double circle_distance(double x, double y) {
    const double d = std::abs(x - y);
    return std::min(d, 1.0 - d);
}

double circle_distance_moment(double p) {
    if (p <= -1.0) return inf;
    return std::pow(0.5, p) / (p + 1.0);
}

KernelFunction KernelFunction::constant(std::size_t arity, double c) {
    return KernelFunction(arity, Constant{c});
}

KernelFunction KernelFunction::rank_one(std::size_t arity, double coef, double gamma) {
    return KernelFunction(arity, RankOneProduct{coef, gamma, {}});
}

KernelFunction KernelFunction::rank_one_per_type(std::size_t arity, double coef, std::vector<double> weights) {
    require(!weights.empty(), "per-type factor needs at least one value");
    return KernelFunction(arity, RankOneProduct{coef, 0.0, std::move(weights)});
}

KernelFunction KernelFunction::block_table(std::size_t arity, std::size_t types, std::vector<double> values) {
    require(types >= 1, "block table needs at least one type");
    require(values.size() == ipow(types, arity), "block table has the wrong number of entries");
    return KernelFunction(arity, BlockTable{types, std::move(values)});
}

KernelFunction KernelFunction::pair_distance(std::size_t arity, double coef, double exponent) {
    require(arity >= 2, "pair-distance kernel needs arity >= 2");
    return KernelFunction(arity, PairDistancePower{coef, exponent});
}

KernelFunction KernelFunction::capped(const KernelFunction& inner, double cap) {
    return inner.capped_at(cap);
}

KernelFunction KernelFunction::sum(const std::vector<KernelFunction>& terms) {
    require(!terms.empty(), "empty kernel sum");
    const std::size_t r = terms.front().arity();
    std::vector<KernelFunction> flat;
    for (const auto& t : terms) {
        require(t.arity() == r, "kernel sum terms must share an arity");
        if (const auto* s = std::get_if<SumOfTerms>(&t.node_)) {
            flat.insert(flat.end(), s->terms.begin(), s->terms.end());
        } else {
            flat.push_back(t);
        }
    }

    double c = 0.0;
    std::optional<BlockTable> table;
    std::vector<RankOneProduct> rank_ones;
    std::vector<KernelFunction> rest;
    for (const auto& t : flat) {
        if (t.is_zero()) continue;
        if (const auto* k = std::get_if<Constant>(&t.node_)) {
            c += k->value;
        } else if (const auto* b = std::get_if<BlockTable>(&t.node_)) {
            if (!table) {
                table = *b;
            } else {
                require(table->types == b->types, "block tables over different type counts");
                for (std::size_t i = 0; i < b->values.size(); ++i) table->values[i] += b->values[i];
            }
        } else if (const auto* p = std::get_if<RankOneProduct>(&t.node_)) {
            auto it = std::find_if(rank_ones.begin(), rank_ones.end(), [&](const RankOneProduct& q) {
                return q.gamma == p->gamma && q.per_type == p->per_type;
            });
            if (it == rank_ones.end()) {
                rank_ones.push_back(*p);
            } else {
                it->coef += p->coef;
            }
        } else {
            rest.push_back(t);
        }
    }

    std::vector<KernelFunction> out;
    if (table) {
        for (double& v : table->values) v += c;
        out.push_back(KernelFunction(r, *table));
    } else if (c != 0.0) {
        out.push_back(constant(r, c));
    }
    for (auto& p : rank_ones) out.push_back(KernelFunction(r, p));
    out.insert(out.end(), rest.begin(), rest.end());
    if (out.empty()) return zero(r);
    if (out.size() == 1) return out.front();
    return KernelFunction(r, SumOfTerms{std::move(out)});
}

double KernelFunction::operator()(std::span<const double> x) const {
    const std::size_t r = arity_;
    return std::visit(
        overloaded{
            [](const Constant& k) { return k.value; },
            [&](const RankOneProduct& k) {
                double v = k.coef;
                for (std::size_t i = 0; i < r; ++i) {
                    v *= k.per_type.empty() ? std::pow(x[i], -k.gamma)
                                            : k.per_type[static_cast<std::size_t>(x[i])];
                }
                return v;
            },
            [&](const BlockTable& k) {
                std::size_t idx = 0;
                for (std::size_t i = 0; i < r; ++i) idx = idx * k.types + static_cast<std::size_t>(x[i]);
                return k.values[idx];
            },
            [&](const PairDistancePower& k) {
                double v = 0.0;
                for (std::size_t i = 0; i < r; ++i)
                    for (std::size_t j = i + 1; j < r; ++j) {
                        const double d = circle_distance(x[i], x[j]);
                        v += d == 0.0 && k.exponent < 0.0 ? inf : std::pow(d, k.exponent);
                    }
                return safe_mul(k.coef, v);
            },
            [&](const Capped& k) { return std::min((*k.inner)(x), k.cap); },
            [&](const SumOfTerms& k) {
                double v = 0.0;
                for (const auto& t : k.terms) v += t(x);
                return v;
            },
        },
        node_);
}

KernelFunction KernelFunction::permuted(std::span<const int> perm) const {
    require(perm.size() == arity_, "permutation length must equal the kernel arity");
    return std::visit(
        overloaded{
            [&](const BlockTable& k) {
                const std::size_t r = arity_;
                BlockTable out{k.types, std::vector<double>(k.values.size())};
                std::vector<std::size_t> y(r, 0);
                for (std::size_t idx = 0; idx < k.values.size(); ++idx) {
                    std::size_t rem = idx;
                    for (std::size_t i = r; i-- > 0;) {
                        y[i] = rem % k.types;
                        rem /= k.types;
                    }
                    std::size_t src = 0;
                    for (std::size_t i = 0; i < r; ++i) src = src * k.types + y[static_cast<std::size_t>(perm[i])];
                    out.values[idx] = k.values[src];
                }
                return KernelFunction(arity_, std::move(out));
            },
            [&](const Capped& k) { return k.inner->permuted(perm).capped_at(k.cap); },
            [&](const SumOfTerms& k) {
                std::vector<KernelFunction> terms;
                for (const auto& t : k.terms) terms.push_back(t.permuted(perm));
                return sum(terms);
            },
            [&](const auto&) { return *this; },
        },
        node_);
}

KernelFunction KernelFunction::scaled(double s) const {
    require(s >= 0.0, "kernels can only be scaled by nonnegative factors");
    return std::visit(
        overloaded{
            [&](const Constant& k) { return constant(arity_, k.value * s); },
            [&](const RankOneProduct& k) {
                auto out = k;
                out.coef *= s;
                return KernelFunction(arity_, out);
            },
            [&](const BlockTable& k) {
                auto out = k;
                for (double& v : out.values) v *= s;
                return KernelFunction(arity_, out);
            },
            [&](const PairDistancePower& k) { return pair_distance(arity_, k.coef * s, k.exponent); },
            [&](const Capped& k) { return k.inner->scaled(s).capped_at(k.cap * s); },
            [&](const SumOfTerms& k) {
                std::vector<KernelFunction> terms;
                for (const auto& t : k.terms) terms.push_back(t.scaled(s));
                return sum(terms);
            },
        },
        node_);
}

KernelFunction KernelFunction::capped_at(double cap) const {
    require(cap >= 0.0, "cap must be nonnegative");
    if (const auto* k = std::get_if<Constant>(&node_)) return constant(arity_, std::min(k->value, cap));
    if (const auto* k = std::get_if<BlockTable>(&node_)) {
        auto out = *k;
        for (double& v : out.values) v = std::min(v, cap);
        return KernelFunction(arity_, out);
    }
    if (const auto* k = std::get_if<Capped>(&node_)) {
        return KernelFunction(arity_, Capped{k->inner, std::min(k->cap, cap)});
    }
    if (sup() <= cap) return *this;
    return KernelFunction(arity_, Capped{std::make_shared<const KernelFunction>(*this), cap});
}

KernelFunction KernelFunction::marginal(std::span<const int> keep, const TypeSpace& space) const {
    const std::size_t r = arity_;
    const std::size_t s = keep.size();
    std::vector<bool> kept(r, false);
    for (int k : keep) {
        require(k >= 0 && static_cast<std::size_t>(k) < r && !kept[static_cast<std::size_t>(k)],
                "marginal positions must be distinct and in range");
        kept[static_cast<std::size_t>(k)] = true;
    }
    return std::visit(
        overloaded{
            [&](const Constant& k) { return constant(s, k.value); },
            [&](const RankOneProduct& k) {
                double coef = k.coef;
                const double m = factor_integral(k, space);
                for (std::size_t i = s; i < r; ++i) coef = safe_mul(coef, m);
                if (s == 0) return constant(0, coef);
                auto out = k;
                out.coef = coef;
                return KernelFunction(s, out);
            },
            [&](const BlockTable& k) {
                auto w = space.weights();
                require(w.size() == k.types, "block table does not match the type space");
                std::vector<double> out(ipow(k.types, s), 0.0);
                std::vector<std::size_t> x(r, 0);
                for (std::size_t idx = 0; idx < k.values.size(); ++idx) {
                    std::size_t rem = idx;
                    for (std::size_t i = r; i-- > 0;) {
                        x[i] = rem % k.types;
                        rem /= k.types;
                    }
                    double weight = 1.0;
                    for (std::size_t i = 0; i < r; ++i)
                        if (!kept[i]) weight *= w[x[i]];
                    std::size_t dst = 0;
                    for (std::size_t a = 0; a < s; ++a) dst = dst * k.types + x[static_cast<std::size_t>(keep[a])];
                    out[dst] += weight * k.values[idx];
                }
                if (s == 0) return constant(0, out[0]);
                return block_table(s, k.types, std::move(out));
            },
            [&](const PairDistancePower& k) {
                const double pairs_total = static_cast<double>(r * (r - 1) / 2);
                const double pairs_kept = static_cast<double>(s * (s - 1) / 2);
                const double rest = safe_mul(k.coef, safe_mul(pairs_total - pairs_kept,
                                                              circle_distance_moment(k.exponent)));
                if (s < 2) return constant(s, rest);
                return sum({pair_distance(s, k.coef, k.exponent), constant(s, rest)});
            },
            [&](const Capped&) -> KernelFunction {
                fail(Errc::unsupported, "capped kernels have no closed-form marginal");
            },
            [&](const SumOfTerms& k) {
                std::vector<KernelFunction> terms;
                for (const auto& t : k.terms) terms.push_back(t.marginal(keep, space));
                return sum(terms);
            },
        },
        node_);
}

std::optional<double> KernelFunction::exact_integral(const TypeSpace& space) const {
    if (std::holds_alternative<Capped>(node_)) return std::nullopt;
    if (const auto* k = std::get_if<SumOfTerms>(&node_)) {
        double total = 0.0;
        for (const auto& t : k->terms) {
            auto v = t.exact_integral(space);
            if (!v) return std::nullopt;
            total += *v;
        }
        return total;
    }
    const auto m = marginal(std::span<const int>{}, space);
    return std::get<Constant>(m.node_).value;
}

double KernelFunction::sup() const {
    const std::size_t r = arity_;
    return std::visit(
        overloaded{
            [](const Constant& k) { return k.value; },
            [&](const RankOneProduct& k) {
                if (k.coef == 0.0 || r == 0) return k.coef;
                if (k.per_type.empty()) return k.gamma > 0.0 ? inf : k.coef;
                const double mx = *std::max_element(k.per_type.begin(), k.per_type.end());
                return k.coef * std::pow(mx, static_cast<double>(r));
            },
            [](const BlockTable& k) { return *std::max_element(k.values.begin(), k.values.end()); },
            [&](const PairDistancePower& k) {
                if (k.coef == 0.0) return 0.0;
                if (k.exponent < 0.0) return inf;
                return k.coef * static_cast<double>(r * (r - 1) / 2) * std::pow(0.5, k.exponent);
            },
            [](const Capped& k) { return std::min(k.cap, k.inner->sup()); },
            [](const SumOfTerms& k) {
                double v = 0.0;
                for (const auto& t : k.terms) v += t.sup();
                return v;
            },
        },
        node_);
}

bool KernelFunction::is_zero() const {
    return std::visit(
        overloaded{
            [](const Constant& k) { return k.value == 0.0; },
            [](const RankOneProduct& k) {
                return k.coef == 0.0 ||
                       (!k.per_type.empty() &&
                        std::all_of(k.per_type.begin(), k.per_type.end(), [](double v) { return v == 0.0; }));
            },
            [](const BlockTable& k) {
                return std::all_of(k.values.begin(), k.values.end(), [](double v) { return v == 0.0; });
            },
            [](const PairDistancePower& k) { return k.coef == 0.0; },
            [](const Capped& k) { return k.cap == 0.0 || k.inner->is_zero(); },
            [](const SumOfTerms& k) {
                return std::all_of(k.terms.begin(), k.terms.end(), [](const auto& t) { return t.is_zero(); });
            },
        },
        node_);
}

bool KernelFunction::fully_symmetric() const {
    if (const auto* k = std::get_if<BlockTable>(&node_)) {
        // Adjacent transpositions generate the symmetric group.
        std::vector<int> perm(arity_);
        for (std::size_t i = 0; i + 1 < arity_; ++i) {
            std::iota(perm.begin(), perm.end(), 0);
            std::swap(perm[i], perm[i + 1]);
            const auto p = permuted(perm);
            if (std::get<BlockTable>(p.node_).values != k->values) return false;
        }
        return true;
    }
    if (const auto* k = std::get_if<Capped>(&node_)) return k->inner->fully_symmetric();
    if (const auto* k = std::get_if<SumOfTerms>(&node_)) {
        return std::all_of(k->terms.begin(), k->terms.end(), [](const auto& t) { return t.fully_symmetric(); });
    }
    return true;
}

void KernelFunction::validate(const TypeSpace& space) const {
    auto finite_nonneg = [](double v, const char* what) {
        require(std::isfinite(v) && v >= 0.0, std::string(what) + " must be finite and nonnegative");
    };
    std::visit(overloaded{
                   [&](const Constant& k) { finite_nonneg(k.value, "constant kernel value"); },
                   [&](const RankOneProduct& k) {
                       finite_nonneg(k.coef, "rank-one coefficient");
                       if (space.is_finite()) {
                           require(k.per_type.size() == space.size(),
                                   "rank-one factor on a finite space needs one value per type");
                           for (double v : k.per_type) finite_nonneg(v, "rank-one factor value");
                       } else {
                           require(k.per_type.empty(), "per-type factors need a finite type space");
                           require(std::isfinite(k.gamma), "rank-one exponent must be finite");
                       }
                   },
                   [&](const BlockTable& k) {
                       require(space.is_finite() && k.types == space.size(),
                               "block table does not match the type space");
                       for (double v : k.values) finite_nonneg(v, "block table entry");
                   },
                   [&](const PairDistancePower& k) {
                       require(!space.is_finite(), "pair-distance kernels live on the unit interval");
                       finite_nonneg(k.coef, "pair-distance coefficient");
                       require(std::isfinite(k.exponent), "pair-distance exponent must be finite");
                   },
                   [&](const Capped& k) {
                       finite_nonneg(k.cap, "cap");
                       k.inner->validate(space);
                   },
                   [&](const SumOfTerms& k) {
                       for (const auto& t : k.terms) t.validate(space);
                   },
               },
               node_);
}

std::string KernelFunction::describe() const {
    return std::visit(overloaded{
                          [](const Constant& k) { return fmt(k.value); },
                          [](const RankOneProduct& k) {
                              if (k.per_type.empty()) return "rank1(" + fmt(k.coef) + ", " + fmt(k.gamma) + ")";
                              return "rank1(" + fmt(k.coef) + ", " + fmt_list(k.per_type) + ")";
                          },
                          [](const BlockTable& k) { return "table(" + fmt_list(k.values) + ")"; },
                          [](const PairDistancePower& k) {
                              return "pairdist(" + fmt(k.coef) + ", " + fmt(k.exponent) + ")";
                          },
                          [](const Capped& k) { return "cap(" + k.inner->describe() + ", " + fmt(k.cap) + ")"; },
                          [](const SumOfTerms& k) {
                              std::string s;
                              for (std::size_t i = 0; i < k.terms.size(); ++i) {
                                  if (i) s += " + ";
                                  s += k.terms[i].describe();
                              }
                              return s;
                          },
                      },
                      node_);
}

}  // namespace atomgraph
