#include "atomgraph/type_space.hpp"

#include <cmath>
#include <numeric>

#include "atomgraph/error.hpp"

namespace atomgraph {

TypeSpace TypeSpace::finite(std::vector<double> weights) {
    require(!weights.empty(), "finite type space needs at least one type");
    double total = 0.0;
    for (double w : weights) {
        require(w > 0.0 && std::isfinite(w), "type weights must be strictly positive");
        total += w;
    }
    require(std::abs(total - 1.0) <= 1e-12, "type weights must sum to 1");
    TypeSpace s;
    s.kind_ = Kind::finite;
    s.weights_ = std::move(weights);
    s.nodes_.resize(s.weights_.size());
    std::iota(s.nodes_.begin(), s.nodes_.end(), 0.0);
    return s;
}

TypeSpace TypeSpace::unit_interval(std::size_t nodes, double theta) {
    require(nodes >= 1, "quadrature needs at least one node");
    require(theta >= 1.0 && std::isfinite(theta), "stratification exponent must be >= 1");
    TypeSpace s;
    s.kind_ = Kind::unit_interval;
    s.theta_ = theta;
    s.nodes_.resize(nodes);
    s.weights_.resize(nodes);
    const double m = static_cast<double>(nodes);
    double prev = 0.0;
    for (std::size_t i = 0; i < nodes; ++i) {
        const double u = (2.0 * static_cast<double>(i) + 1.0) / (2.0 * m);
        const double edge = i + 1 == nodes ? 1.0 : std::pow((static_cast<double>(i) + 1.0) / m, theta);
        s.nodes_[i] = std::pow(u, theta);
        s.weights_[i] = edge - prev;
        prev = edge;
    }
    return s;
}

TypeSpace TypeSpace::regridded(std::size_t nodes, double theta) const {
    if (is_finite()) return *this;
    return unit_interval(nodes, theta);
}

double TypeSpace::stratification_for(double max_gamma) {
    if (max_gamma <= 0.0) return 1.0;
    require(max_gamma < 1.0, "integrand x^-gamma with gamma >= 1 is not integrable");
    // Makes theta * u^{theta-1} * u^{-theta*gamma} vanish linearly at u = 0.
    return std::max(1.0, 2.0 / (1.0 - max_gamma));
}

}  // namespace atomgraph
