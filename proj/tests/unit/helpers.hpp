#pragma once

#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "atomgraph/kernel.hpp"
#include "atomgraph/shape.hpp"

namespace testutil {

inline std::vector<double> random_weights(std::mt19937_64& rng, std::size_t k) {
    std::uniform_real_distribution<double> u(0.2, 1.0);
    std::vector<double> w(k);
    for (double& x : w) x = u(rng);
    const double s = std::accumulate(w.begin(), w.end(), 0.0);
    for (double& x : w) x /= s;
    // Absorb rounding so the weights sum to 1 within 1e-12.
    w.back() = 1.0 - std::accumulate(w.begin(), w.end() - 1, 0.0);
    return w;
}

inline atomgraph::Shape random_connected_shape(std::mt19937_64& rng, std::size_t r) {
    std::bernoulli_distribution coin(0.4);
    for (;;) {
        std::vector<atomgraph::Shape::Edge> e;
        for (std::size_t u = 0; u < r; ++u)
            for (std::size_t v = u + 1; v < r; ++v)
                if (coin(rng)) e.emplace_back(u, v);
        atomgraph::Shape s(r, e);
        if (s.connected()) return s;
    }
}

inline atomgraph::KernelFunction random_table(std::mt19937_64& rng, std::size_t r, std::size_t k, double zero_prob = 0.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> v(static_cast<std::size_t>(std::pow(k, r)));
    for (double& x : v) x = u(rng) < zero_prob ? 0.0 : u(rng);
    return atomgraph::KernelFunction::block_table(r, k, std::move(v));
}

/// A random family over k finite types with table kernels on random connected shapes.
inline atomgraph::KernelFamily random_family(std::mt19937_64& rng, std::size_t k, std::size_t atoms,
                                             std::size_t max_order = 4, double zero_prob = 0.0) {
    std::uniform_int_distribution<std::size_t> order(2, max_order);
    std::vector<atomgraph::AtomEntry> entries;
    for (std::size_t a = 0; a < atoms; ++a) {
        const std::size_t r = order(rng);
        entries.push_back({random_connected_shape(rng, r), random_table(rng, r, k, zero_prob)});
    }
    return atomgraph::symmetrize(
        atomgraph::KernelFamily(atomgraph::TypeSpace::finite(random_weights(rng, k)), std::move(entries)));
}

}  // namespace testutil
