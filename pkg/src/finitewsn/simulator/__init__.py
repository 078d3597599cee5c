"""Ground-truth Monte Carlo for grid and random deployments."""

from .coverage import coverage_depth, is_k_covered, k_coverage_witness
from .engine import (
    BLOCK,
    PROPERTIES,
    WORKERS_ENV,
    SimResult,
    estimate_probability,
    resolve_workers,
    sample_grid_activation,
    sample_uniform_nodes,
    trial_outcomes,
    wilson_interval,
)
from .graph import (
    Graph,
    build_geometric_graph,
    is_connected,
    local_vertex_connectivity,
    vertex_connectivity_at_least,
)
from .rng import trial_seed

__all__ = [
    "BLOCK",
    "Graph",
    "PROPERTIES",
    "SimResult",
    "WORKERS_ENV",
    "build_geometric_graph",
    "coverage_depth",
    "estimate_probability",
    "is_connected",
    "is_k_covered",
    "k_coverage_witness",
    "local_vertex_connectivity",
    "resolve_workers",
    "sample_grid_activation",
    "sample_uniform_nodes",
    "trial_outcomes",
    "trial_seed",
    "vertex_connectivity_at_least",
    "wilson_interval",
]
