#pragma once

#include <map>
#include <string>

#include "atomgraph/kernel.hpp"
#include "json.hpp"

namespace atomgraph::cli {

/// Kernel expression of the given arity:
///   expr := term ('+' term)*
///   term := number | const(c) | rank1(coef, gamma) | rank1w(coef, w1, ..., wk)
///         | table(k, v1, ..., v_{k^r}) | pairdist(coef, exponent) | cap(expr, bound)
/// rank1 is coef * prod x_i^-gamma on the unit interval; rank1w uses per-type weights.
KernelFunction parse_kernel(const std::string& expr, std::size_t arity);

/// Family from a parsed config:
///   [space]   kind = "finite", weights = [...]  |  kind = "unit_interval", nodes, theta or stratify
///   [[atom]]  shape = "K3" | "P2" | "S3" | "C4" | "E2", or order = r, edges = [[u, v], ...]; kernel = "<expr>"
///   [series]  scale, exponent, min_arity, max_arity, cap (constant clique series)
///   generalized = true keeps disconnected shapes
/// or a [model] table naming a built-in family. Unknown keys are rejected.
KernelFamily family_from_config(const nlohmann::json& config);
KernelFamily family_from_toml(const std::string& text);

/// Built-in families by name with numeric parameters:
///   constant (c2, c3, ...), powerlaw (A, B, alpha, nodes), twoblock (A, p), badp2 (eps).
KernelFamily builtin_family(const std::string& name, const std::map<std::string, double>& params);

/// Shape names: Kr complete, Pk path with k edges, Sk star with k edges, Ck cycle, Er empty.
Shape parse_shape_name(const std::string& name);

}  // namespace atomgraph::cli
