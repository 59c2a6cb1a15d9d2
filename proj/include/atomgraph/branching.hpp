#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "atomgraph/error.hpp"
#include "atomgraph/grid.hpp"
#include "atomgraph/kernel.hpp"
#include "atomgraph/rng.hpp"

namespace atomgraph {

/// The clique branching process of a hyperkernel, restricted to the grid
/// nodes (unit interval) or the types (finite space). A particle of type x
/// has Poisson(r * int kappa_r(x, ...)) child cliques of each arity r, each
/// contributing r - 1 children.
class DiscreteBP {
  public:
    struct Arity {
        std::size_t r;
        GridKernel kernel;
    };

    /// Throws DivergentKernel when the clique series diverges.
    explicit DiscreteBP(const Hyperkernel& hk);

    const TypeSpace& space() const { return *space_; }
    std::size_t size() const { return space_->size(); }
    const std::vector<Arity>& arities() const { return arities_; }
    const EdgeKernel& edge() const { return edge_; }
    /// Expected number of child cliques, per node and arity (same order as arities()).
    const std::vector<std::vector<double>>& clique_rates() const { return rates_; }
    /// S(1): expected number of child cliques of a particle of each type, weighted by r.
    const std::vector<double>& lambda() const { return lambda_; }

    /// S(f)(x) = sum_r r int kappa_r(x, y_2..y_r) (1 - prod (1 - f(y_i))).
    std::vector<double> S_apply(std::span<const double> f) const;
    std::vector<double> Phi_apply(std::span<const double> f) const;
    /// T f = int kappa_e(x, y) f(y).
    std::vector<double> T_apply(std::span<const double> f) const;

  private:
    std::shared_ptr<const TypeSpace> space_;
    std::vector<Arity> arities_;
    EdgeKernel edge_;
    std::vector<std::vector<double>> rates_;
    std::vector<double> lambda_;
    // Separable terms per arity with factors tabulated once (tab_ is shared).
    struct Sep {
        double coef;
        std::vector<std::size_t> factor;
    };
    std::vector<std::vector<Sep>> seps_;
    std::vector<std::vector<double>> tab_;

    friend class BranchingSampler;
};

struct SimulationCaps {
    std::size_t max_particles = 10000;
    std::size_t max_generations = 100000;
};

struct SimulationResult {
    enum class Outcome {
        died,
        /// Total size reached max_particles; counted as survival.
        reached_cap,
        /// Still alive below the particle cap when the generation cap ran out.
        ambiguous,
    };
    Outcome outcome = Outcome::died;
    std::size_t total_size = 0;
    std::vector<std::size_t> generation_sizes;
};

const char* to_string(SimulationResult::Outcome o);

/// Samples children from precomputed per-node tables; reusable across runs.
class BranchingSampler {
  public:
    /// Keeps a reference to bp.
    explicit BranchingSampler(const DiscreteBP& bp);
    BranchingSampler(DiscreteBP&&) = delete;
    /// Root type given as a node index, or drawn from mu when empty.
    SimulationResult run(std::optional<std::size_t> root, const SimulationCaps& caps, Rng& rng) const;

  private:
    using Dist = std::discrete_distribution<std::size_t>;
    struct Source {
        // Separable term: one node distribution per child position.
        std::vector<std::shared_ptr<Dist>> positions;
        // Dense tensor: per parent node, a distribution over (r-1)-tuples.
        std::vector<Dist> rows;
    };
    const DiscreteBP* bp_;
    std::vector<std::vector<Source>> sources_;  // [arity]
    // [arity][node] -> choice among sources (empty when there is one source).
    mutable std::vector<std::vector<Dist>> choice_;
    mutable Dist root_;
    void children(std::size_t a, std::size_t node, Rng& rng, std::vector<std::size_t>& out) const;
};

SimulationResult simulate(const DiscreteBP& bp, std::optional<std::size_t> root, const SimulationCaps& caps, Rng& rng);

struct SurvivalOptions {
    double tol = 1e-10;
    std::size_t max_iter = 100000;
    /// Consecutive iterations whose step shrinks by less than 0.1% before giving up.
    std::size_t plateau = 1000;
};

struct SurvivalSolution {
    std::vector<double> rho_x;
    double rho = 0.0;
    std::size_t iterations = 0;
    /// Sup-norm of the last step.
    double residual = 0.0;
};

class MaxIterExceeded : public Error {
  public:
    MaxIterExceeded(const std::string& what, SurvivalSolution last)
        : Error(Errc::max_iter_exceeded, what), last_(std::move(last)) {}
    const SurvivalSolution& last() const { return last_; }

  private:
    SurvivalSolution last_;
};

using IterateObserver = std::function<void(std::size_t, std::span<const double>)>;

/// Iterates f <- Phi(f) from f0 until the sup-norm step is below tol.
SurvivalSolution iterate_phi(const DiscreteBP& bp, std::vector<double> f0, const SurvivalOptions& opt = {},
                             const IterateObserver& observer = {});
/// Maximal fixed point of Phi, by downward iteration from 1.
SurvivalSolution solve_survival(const DiscreteBP& bp, const SurvivalOptions& opt = {},
                                const IterateObserver& observer = {});

struct NormEstimate {
    enum class Method { closed_form_rank1, power_iteration, divergent };
    double value = 0.0;
    Method method = Method::power_iteration;
    std::size_t iterations = 0;
    double residual = 0.0;
    /// Top eigenvector for power iteration (normalized in L2(mu)); empty otherwise.
    std::vector<double> eigenvector;
};

const char* to_string(NormEstimate::Method m);

/// Norm of T on L2(mu). Returns +inf (method divergent) when kappa_e diverges.
NormEstimate operator_norm(const DiscreteBP& bp, double tol = 1e-10, std::size_t max_iter = 100000);

struct FrequencyEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t trials = 0;
};

/// Monte Carlo estimate of P(total size >= k) with a mu-random root; trial t uses rng.split(t).
FrequencyEstimate survival_ge_k(const DiscreteBP& bp, std::size_t k, std::size_t trials, Rng& rng);

/// CSV rows "node,weight,rho".
void write_survival_csv(std::ostream& out, const SurvivalSolution& s, const TypeSpace& space);

}  // namespace atomgraph
