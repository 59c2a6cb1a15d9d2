#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "atomgraph/type_space.hpp"

namespace atomgraph {

/// A nonnegative function on S^r, kept as a small expression tree so that
/// symmetrization, marginals and integrals can be done exactly.
///
/// Forms:
///   Constant            c
///   RankOneProduct      A * prod_i phi(x_i), phi(x) = x^{-gamma} on (0,1]
///                       or phi(type) = w[type] on a finite space
///   BlockTable          arbitrary table over finite types (row-major)
///   PairDistancePower   A * sum_{i<j} d(x_i,x_j)^p, d the circle metric on [0,1)
///   Capped              min(inner, M)
///   SumOfTerms          sum of the above
class KernelFunction {
  public:
    struct Constant {
        double value = 0.0;
    };
    struct RankOneProduct {
        double coef = 0.0;
        double gamma = 0.0;
        std::vector<double> per_type;  // empty: power factor on the unit interval
    };
    struct BlockTable {
        std::size_t types = 0;
        std::vector<double> values;
    };
    struct PairDistancePower {
        double coef = 1.0;
        double exponent = 0.0;
    };
    struct Capped {
        std::shared_ptr<const KernelFunction> inner;
        double cap = 0.0;
    };
    struct SumOfTerms {
        std::vector<KernelFunction> terms;
    };
    using Node = std::variant<Constant, RankOneProduct, BlockTable, PairDistancePower, Capped, SumOfTerms>;

    KernelFunction() = default;

    static KernelFunction constant(std::size_t arity, double c);
    static KernelFunction zero(std::size_t arity) { return constant(arity, 0.0); }
    static KernelFunction rank_one(std::size_t arity, double coef, double gamma);
    static KernelFunction rank_one_per_type(std::size_t arity, double coef, std::vector<double> weights);
    static KernelFunction block_table(std::size_t arity, std::size_t types, std::vector<double> values);
    static KernelFunction pair_distance(std::size_t arity, double coef, double exponent);
    static KernelFunction capped(const KernelFunction& inner, double cap);
    /// Sum with folding: constants, tables and matching rank-one terms merge.
    static KernelFunction sum(const std::vector<KernelFunction>& terms);

    std::size_t arity() const { return arity_; }
    const Node& node() const { return node_; }

    /// Value at a type tuple (finite spaces: type indices stored as doubles).
    double operator()(std::span<const double> x) const;

    /// g(y_0..y_{r-1}) = this(y_{perm[0]}, ..., y_{perm[r-1]}).
    KernelFunction permuted(std::span<const int> perm) const;
    KernelFunction scaled(double s) const;
    /// min(this, cap); exact folding for Constant / BlockTable.
    KernelFunction capped_at(double cap) const;
    /// Integrate out every coordinate not listed in `keep`; coordinate a of
    /// the result is coordinate keep[a] of this kernel. Throws Unsupported for
    /// forms without a closed-form marginal (Capped).
    KernelFunction marginal(std::span<const int> keep, const TypeSpace& space) const;

    /// Integral over S^r; nullopt when only quadrature can evaluate it.
    /// Returns +inf for divergent power integrals.
    std::optional<double> exact_integral(const TypeSpace& space) const;
    /// Pointwise upper bound (may be +inf).
    double sup() const;
    bool is_zero() const;
    /// Structural check: invariant under every permutation of the arguments.
    bool fully_symmetric() const;
    /// Throws InvalidArgument when a coefficient or table entry is negative
    /// or the form does not fit the space.
    void validate(const TypeSpace& space) const;

    /// Expression in the config-file grammar.
    std::string describe() const;

  private:
    KernelFunction(std::size_t arity, Node node) : arity_(arity), node_(std::move(node)) {}

    std::size_t arity_ = 0;
    Node node_ = Constant{};
};

/// Integral of x^{-gamma} over (0,1]; +inf when gamma >= 1.
double power_moment(double gamma);

/// Circle metric on [0,1).
double circle_distance(double x, double y);

/// Integral over y of d(x,y)^p on the circle (independent of x); +inf for p <= -1.
double circle_distance_moment(double p);

}  // namespace atomgraph
