"""Random graphs from kernel families of small atoms.

Thin bindings over the C++ library: build a family (built-in model, TOML
config, or constructor), sample graphs, and compare with the limit theory.
"""

from ._core import (
    AtomgraphError,
    KernelFamily,
    beta_k,
    builtin_family,
    family_from_toml,
    generate,
    graph_stats,
    operator_norm,
    percolation_threshold,
    powerlaw_a,
    powerlaw_c2,
    powerlaw_family,
    powerlaw_norm,
    powerlaw_rho,
    powerlaw_supercritical,
    run_cli,
    solve_C,
    survival,
    two_block,
    twoblock_a,
)

__version__ = "0.1.0"
