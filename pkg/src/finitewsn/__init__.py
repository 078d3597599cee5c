"""Finite-size coverage and connectivity for grid and random sensor networks."""

from .grid_model import (
    BoundReport,
    BreakpointSet,
    GridSpec,
    VirtualGrid,
    asymptotic_klb_thresholds,
    grid_bounds,
    grid_breakpoints,
    grid_cov_lower,
    grid_cov_upper,
    klb_baseline,
)
from .random_model import (
    DiscBoundReport,
    QuadratureError,
    RandSpec,
    asymptotic_disc,
    disc_bounds,
    disc_estimate,
    kdisc_estimate,
    rand_cov_lower,
    rand_cov_upper,
)
from .simulator import SimResult, estimate_probability

__version__ = "0.1.0"

__all__ = [
    "BoundReport",
    "BreakpointSet",
    "DiscBoundReport",
    "GridSpec",
    "QuadratureError",
    "RandSpec",
    "SimResult",
    "VirtualGrid",
    "asymptotic_disc",
    "asymptotic_klb_thresholds",
    "disc_bounds",
    "disc_estimate",
    "estimate_probability",
    "grid_bounds",
    "grid_breakpoints",
    "grid_cov_lower",
    "grid_cov_upper",
    "kdisc_estimate",
    "klb_baseline",
    "rand_cov_lower",
    "rand_cov_upper",
]
