#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <optional>
#include <vector>

#include "atomgraph/grid.hpp"
#include "atomgraph/kernel_function.hpp"
#include "atomgraph/shape.hpp"
#include "atomgraph/type_space.hpp"

namespace atomgraph {

/// Largest clique arity handled explicitly; series beyond it are tested for divergence.
inline constexpr std::size_t max_series_arity = 64;
/// A series is declared divergent when its last term at max_series_arity
/// exceeds this fraction of the running sum.
inline constexpr double divergence_ratio = 1e-3;
/// Values at or below this are treated as zero in support computations.
inline constexpr double zero_tolerance = 1e-12;

struct AtomEntry {
    Shape shape;
    KernelFunction kernel;
};

/// Constant clique kernels kappa_r = min(scale * r^exponent, cap) for
/// min_arity <= r <= max_arity. Used for hyperkernels with atoms of every size.
struct CliqueSeries {
    double scale = 0.0;
    double exponent = 0.0;
    std::size_t min_arity = 2;
    std::size_t max_arity = std::numeric_limits<std::size_t>::max();
    double cap = std::numeric_limits<double>::infinity();

    double value(std::size_t r) const;
    /// Last arity that is expanded explicitly.
    std::size_t last_explicit() const;
    /// True when terms continue past max_series_arity.
    bool unbounded() const { return max_arity > max_series_arity; }
};

/// Result of summing a per-arity series up to max_series_arity.
struct SeriesSum {
    double value = 0.0;
    bool divergent = false;
    /// Upper bound on the omitted tail (0 for finite series; +inf if divergent).
    double tail_bound = 0.0;
};

/// sum_r weight(r) * kappa_r over the series.
SeriesSum sum_series(const CliqueSeries& s, double (*weight)(std::size_t));

/// A kernel family over a type space. Shapes must be connected unless the
/// family is generalized (see the percolation module).
class KernelFamily {
  public:
    KernelFamily(TypeSpace space, std::vector<AtomEntry> entries, std::optional<CliqueSeries> series = {});
    KernelFamily(std::shared_ptr<const TypeSpace> space, std::vector<AtomEntry> entries,
                 std::optional<CliqueSeries> series = {});

    const TypeSpace& space() const { return *space_; }
    const std::shared_ptr<const TypeSpace>& space_ptr() const { return space_; }
    const std::vector<AtomEntry>& entries() const { return entries_; }
    const std::optional<CliqueSeries>& series() const { return series_; }
    bool generalized() const { return generalized_; }

    /// Entries with the clique series expanded up to max_series_arity.
    std::vector<AtomEntry> expanded() const;
    /// Same family on a different quadrature grid.
    KernelFamily with_space(const TypeSpace& space) const;

    static KernelFamily make_generalized(std::shared_ptr<const TypeSpace> space, std::vector<AtomEntry> entries);

  private:
    KernelFamily() = default;
    void validate() const;

    std::shared_ptr<const TypeSpace> space_;
    std::vector<AtomEntry> entries_;
    std::optional<CliqueSeries> series_;
    bool generalized_ = false;
};

/// A family whose atoms are all cliques, one fully symmetric kernel per arity.
class Hyperkernel {
  public:
    explicit Hyperkernel(KernelFamily cliques);

    const KernelFamily& family() const { return family_; }
    const TypeSpace& space() const { return family_.space(); }
    /// Kernel of arity r, or nullptr if absent (series terms are not included).
    const KernelFunction* kernel(std::size_t r) const;
    const std::optional<CliqueSeries>& series() const { return family_.series(); }

  private:
    KernelFamily family_;
};

struct EdgeKernel {
    GridKernel kernel;
    bool divergent = false;
    /// Half the quadrature integral of the kernel.
    double xi_e = 0.0;
    /// Row integrals lambda(x_i) = int kappa_e(x_i, y) dmu(y).
    std::vector<double> lambda;
};

struct IntegrabilityReport {
    double iota = 0.0;
    double xi_e = 0.0;
    bool integrable = true;
    bool edge_integrable = true;
};

/// Average every kernel over the automorphism group of its shape.
KernelFamily symmetrize(const KernelFamily& family);
/// Replace each atom by the clique on its vertex set, symmetrizing over S_r.
Hyperkernel to_hyperkernel(const KernelFamily& family);

/// Sum over ordered edges (i,j) of each atom of the kernel with x at i, y at
/// j and the other coordinates integrated out (by quadrature).
EdgeKernel edge_kernel(const KernelFamily& family);
EdgeKernel edge_kernel(const Hyperkernel& hk);
/// sum_F e(F) int kappa_F, exact where possible; +inf when not edge-integrable.
double edge_density(const KernelFamily& family);
IntegrabilityReport integrability_report(const KernelFamily& family);
/// Connectivity of the support graph of kappa_e on the types; nullopt
/// (unknown) on the unit interval.
std::optional<bool> irreducibility_check(const KernelFamily& family);
KernelFamily truncate(const KernelFamily& family, double M);
/// tau(x,y) = 2 sum_r kappa_r(x,y,*).
EdgeKernel tau_kernel(const Hyperkernel& hk);

/// Average of f over a permutation group given by generators (arguments
/// permuted as in KernelFunction::permuted). Exact orbit averaging for tables.
KernelFunction average_over_group(const KernelFunction& f, const std::vector<std::vector<int>>& group);
/// Average of f over every permutation of its arguments.
KernelFunction full_symmetrization(const KernelFunction& f);

}  // namespace atomgraph
