#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace atomgraph {

/// The vertex-type space together with the quadrature used for every
/// analytic computation over it.
///
/// Finite spaces have one node per type (node value = type index, weight =
/// type probability) and all integrals are exact sums. The unit interval
/// (0,1] with Lebesgue measure is discretized by a midpoint rule in
/// u = x^{1/theta}: node i sits at ((2i-1)/2m)^theta and carries the exact
/// measure of its cell. theta > 1 packs nodes towards 0, where power-law
/// factors x^{-gamma} are singular.
class TypeSpace {
  public:
    enum class Kind { finite, unit_interval };

    static TypeSpace finite(std::vector<double> weights);
    static TypeSpace unit_interval(std::size_t nodes = 2048, double theta = 1.0);

    Kind kind() const { return kind_; }
    bool is_finite() const { return kind_ == Kind::finite; }
    std::size_t size() const { return nodes_.size(); }
    std::span<const double> nodes() const { return nodes_; }
    std::span<const double> weights() const { return weights_; }
    double theta() const { return theta_; }
    bool stratified() const { return theta_ != 1.0; }

    /// Same kind with a different grid (unit interval only; finite spaces are returned unchanged).
    TypeSpace regridded(std::size_t nodes, double theta) const;

    /// Stratification exponent that makes the midpoint rule smooth for
    /// integrands up to x^{-max_gamma} (max_gamma < 1).
    static double stratification_for(double max_gamma);

    friend bool operator==(const TypeSpace& a, const TypeSpace& b) {
        return a.kind_ == b.kind_ && a.theta_ == b.theta_ && a.weights_ == b.weights_;
    }

  private:
    Kind kind_ = Kind::finite;
    double theta_ = 1.0;
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

}  // namespace atomgraph
