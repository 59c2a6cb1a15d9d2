#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "atomgraph/kernel_function.hpp"
#include "atomgraph/type_space.hpp"

namespace atomgraph {

/// How integrals over the unit interval are evaluated. Exact integration of
/// power factors detects divergence (integral = +inf); quadrature keeps every
/// derived object consistent with the grid the operators act on.
enum class Integration { exact, quadrature };

/// One-variable factor of a separable term.
class Factor {
  public:
    enum class Kind { ones, power, tabulated };

    static Factor ones() { return Factor(); }
    static Factor power(double gamma);
    /// One value per grid node (per type on finite spaces).
    static Factor tabulated(std::vector<double> values);

    Kind kind() const { return kind_; }
    double gamma() const { return gamma_; }
    const std::vector<double>& values() const { return values_; }

    double at(const TypeSpace& space, std::size_t node) const;
    std::vector<double> tabulate(const TypeSpace& space) const;
    double integral(const TypeSpace& space, Integration mode) const;
    /// sum_i w_i phi(x_i) g_i
    double weighted_sum(const TypeSpace& space, std::span<const double> g) const;
    Factor times(const Factor& other, const TypeSpace& space) const;

    friend bool operator==(const Factor& a, const Factor& b) {
        return a.kind_ == b.kind_ && a.gamma_ == b.gamma_ && a.values_ == b.values_;
    }

  private:
    Kind kind_ = Kind::ones;
    double gamma_ = 0.0;
    std::vector<double> values_;
};

struct SepTerm {
    double coef = 0.0;
    std::vector<Factor> factors;
};

/// A kernel restricted to the grid of a type space: a sum of separable terms
/// plus an optional dense tensor over node tuples (row-major, size m^r).
class GridKernel {
  public:
    /// Largest dense tensor that will be materialized.
    static constexpr std::size_t max_dense_entries = std::size_t{1} << 24;

    GridKernel(std::shared_ptr<const TypeSpace> space, std::size_t arity);

    /// Throws Unsupported for pair-distance kernels and ArityTooLarge when a
    /// dense tensor would exceed max_dense_entries.
    static GridKernel discretize(const KernelFunction& f, std::shared_ptr<const TypeSpace> space);

    std::size_t arity() const { return arity_; }
    const TypeSpace& space() const { return *space_; }
    const std::shared_ptr<const TypeSpace>& space_ptr() const { return space_; }
    const std::vector<SepTerm>& terms() const { return terms_; }
    bool has_dense() const { return !dense_.empty(); }
    const std::vector<double>& dense() const { return dense_; }

    void add_term(SepTerm term);
    void add(const GridKernel& other);
    void add_dense(std::vector<double> values);
    GridKernel scaled(double s) const;

    double at(std::span<const std::size_t> nodes) const;
    /// Coordinate a of the result is coordinate keep[a] of this kernel.
    GridKernel marginal(std::span<const int> keep, Integration mode) const;
    double integral(Integration mode) const;
    GridKernel permuted(std::span<const int> perm) const;
    bool is_zero() const;

    /// Dense m x m matrix of a binary kernel.
    std::vector<double> to_matrix() const;
    /// (K g)(x_i) = sum_j K(x_i, x_j) w_j g_j for a binary kernel.
    std::vector<double> apply(std::span<const double> g) const;

  private:
    std::shared_ptr<const TypeSpace> space_;
    std::size_t arity_;
    std::vector<SepTerm> terms_;
    std::vector<double> dense_;
};

/// Number of entries in an m^r tensor, or SIZE_MAX on overflow.
std::size_t tensor_size(std::size_t m, std::size_t r);

}  // namespace atomgraph
