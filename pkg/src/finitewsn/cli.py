"""Command-line front end: bound sweeps, simulation sweeps, breakpoints, figure recipes.

Every command writes comma-separated values with a fixed header and numbers
printed to 12 significant digits, so reruns are byte-identical.
"""

from __future__ import annotations

import argparse
import io
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

from .grid_model import (
    DeflatedRadiusError,
    GridSpec,
    VirtualGrid,
    asymptotic_klb_thresholds,
    grid_bounds,
    grid_breakpoints,
    grid_side,
    klb_baseline,
)
from .random_model import (
    QuadratureError,
    RandSpec,
    asymptotic_disc,
    disc_bounds,
    kdisc_estimate,
    rand_cov_lower,
    rand_cov_upper,
)
from .simulator import estimate_probability

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_PRECONDITION = 3
EXIT_NONCONVERGENCE = 4

DEFAULTS = {
    "scenario": "grid",
    "n": 100,
    "p": 0.2,
    "k": 1,
    "r": None,
    "r_start": 0.15,
    "r_stop": 0.45,
    "r_step": 0.01,
    "l": None,
    "trials": 10_000,
    "seed": 0,
    "tol": 1e-6,
    "pair_samples": 1_000_000,
    "property": None,
    "eps": 0.1,
    "out": None,
    "checkpoint_dir": None,
}

_TYPES = {
    "scenario": str,
    "n": int,
    "p": float,
    "k": int,
    "r": str,
    "r_start": float,
    "r_stop": float,
    "r_step": float,
    "l": int,
    "trials": int,
    "seed": int,
    "tol": float,
    "pair_samples": int,
    "property": str,
    "eps": float,
    "out": str,
    "checkpoint_dir": str,
}

BOUND_PROPERTIES = ("k-covered", "disconnected", "not-k-connected")
SIM_PROPERTIES = ("k-covered", "connected", "disconnected", "k-connected")


class UsageError(Exception):
    pass


class PreconditionError(Exception):
    pass


# ---------------------------------------------------------------------------
# formatting


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if math.isnan(v):
            return "nan"
        return format(v, ".12g")
    return str(v)


def write_csv(header: Sequence[str], rows: Sequence[Sequence], out: Optional[str]) -> None:
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for row in rows:
        cells = [fmt(v) for v in row]
        for c in cells:
            if "," in c or "\n" in c:
                raise ValueError(f"CSV cell needs quoting: {c!r}")
        buf.write(",".join(cells) + "\n")
    text = buf.getvalue()
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def progress(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


# ---------------------------------------------------------------------------
# configuration


def read_config(path: str) -> dict:
    """Flat ``key = value`` file; ``#`` starts a comment; keys are flag names."""
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-").replace("-", "_")
        if key not in _TYPES:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            out[key] = _TYPES[key](value)
        except ValueError as exc:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    return out


def resolve(args: argparse.Namespace) -> dict:
    """Merge built-in defaults < config file < command-line flags."""
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        cfg.update(read_config(args.config))
    for key in DEFAULTS:
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    return cfg


def radii(cfg: dict) -> list[float]:
    """Sweep values: an explicit ``--r`` list, else the inclusive start/stop/step range."""
    if cfg.get("r"):
        try:
            vals = [float(v) for v in str(cfg["r"]).replace(",", " ").split()]
        except ValueError as exc:
            raise UsageError(f"bad --r value {cfg['r']!r}") from exc
        if not vals:
            raise UsageError("empty radius list")
        return vals
    start, stop, step = cfg["r_start"], cfg["r_stop"], cfg["r_step"]
    if not step > 0:
        raise UsageError(f"--r-step must be positive, got {step}")
    if stop < start:
        raise UsageError(f"empty sweep range: --r-start {start} > --r-stop {stop}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]


def _check_common(cfg: dict) -> None:
    if cfg["scenario"] not in ("grid", "random"):
        raise UsageError(f"--scenario must be grid or random, got {cfg['scenario']!r}")
    if cfg["scenario"] == "grid":
        try:
            grid_side(cfg["n"])
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
    elif cfg["n"] < 1:
        raise UsageError(f"--n must be positive, got {cfg['n']}")
    if cfg["k"] < 1:
        raise UsageError(f"--k must be >= 1, got {cfg['k']}")
    if cfg["trials"] < 1:
        raise UsageError(f"--trials must be >= 1, got {cfg['trials']}")
    if not cfg["tol"] > 0:
        raise UsageError(f"--tol must be positive, got {cfg['tol']}")


# ---------------------------------------------------------------------------
# bounds


BOUNDS_HEADER = ("r", "lower", "upper", "estimate", "baseline", "r_low", "r_high", "provenance")


def _klb(n, p, eps):
    try:
        return asymptotic_klb_thresholds(n, p, eps)
    except ValueError:
        return None, None


def bounds_rows(cfg: dict) -> list[tuple]:
    _check_common(cfg)
    scen, n, p, k = cfg["scenario"], cfg["n"], cfg["p"], cfg["k"]
    prop = cfg["property"] or ("k-covered" if scen == "grid" else "disconnected")
    if prop not in BOUND_PROPERTIES:
        raise UsageError(f"--property for bounds must be one of {', '.join(BOUND_PROPERTIES)}")
    if scen == "grid" and prop != "k-covered":
        raise UsageError("grid bounds exist for k-covered only")
    if prop == "disconnected" and k != 1:
        raise UsageError("--k does not apply to disconnected; use not-k-connected")
    rows = []
    rs = radii(cfg)
    for idx, r in enumerate(rs):
        progress(f"bounds {idx + 1}/{len(rs)} r={r:g}")
        if prop == "k-covered":
            lo_t, hi_t = _klb(n, p, cfg["eps"])
            base = klb_baseline(r, n, p, cfg["eps"]) if lo_t is not None else None
            if scen == "grid":
                rep = grid_bounds(GridSpec(n, p, r), k, cfg["l"], cfg["eps"])
                prov = ";".join(f"{key}={val}" for key, val in sorted(rep.provenance.items()))
                rows.append((r, rep.lower, rep.upper, None, rep.baseline, lo_t, hi_t, prov))
            else:
                if k != 1:
                    raise PreconditionError("random coverage bounds are for k=1")
                try:
                    lower = rand_cov_lower(n, r, VirtualGrid.for_radius(r, cfg["l"]))
                    lprov = "lower=random_virtual_grid_union_lower"
                except DeflatedRadiusError:
                    lower, lprov = None, "lower=undefined(deflated_radius<=0)"
                upper = rand_cov_upper(n, r)
                prov = f"{lprov};upper=random_disjoint_balls_upper;baseline=klb_asymptotic(eps={cfg['eps']:g})"
                rows.append((r, lower, upper, None, base, lo_t, hi_t, prov))
        elif prop == "disconnected":
            if scen != "random":
                raise UsageError("disconnectivity bounds are for the random scenario")
            rep = disc_bounds(RandSpec(n, r, p), cfg["pair_samples"], cfg["seed"], cfg["tol"])
            prov = (
                "lower=second_order_inclusion_exclusion;upper=isolated_node_plus_pair_terms(truncated);"
                "estimate=expected_isolated_nodes;baseline=asymptotic_disconnectivity(link_p=1)"
            )
            rows.append((r, rep.lower, rep.upper_truncated, rep.estimate, rep.baseline, None, None, prov))
        else:
            if scen != "random" or p != 1.0:
                raise UsageError("not-k-connected estimate needs --scenario random --p 1")
            est = min(1.0, kdisc_estimate(n, r, k, cfg["tol"]))
            rows.append((r, None, None, est, None, None, None, f"estimate=degree_below_k_estimate(k={k})"))
    return rows


# ---------------------------------------------------------------------------
# simulate


SIM_HEADER = ("r", "trials", "successes", "estimate", "ci_low", "ci_high", "seed", "provenance")


def _spec(scen, n, p, r):
    return GridSpec(n, p, r) if scen == "grid" else RandSpec(n, r, p)


def simulate_rows(cfg: dict) -> list[tuple]:
    _check_common(cfg)
    scen = cfg["scenario"]
    prop = cfg["property"] or "k-covered"
    if prop not in SIM_PROPERTIES:
        raise UsageError(f"--property for simulate must be one of {', '.join(SIM_PROPERTIES)}")
    if prop in ("connected", "disconnected") and cfg["k"] != 1:
        raise UsageError(f"--k does not apply to {prop}; use k-connected")
    rows = []
    rs = radii(cfg)
    ckdir = Path(cfg["checkpoint_dir"]) if cfg["checkpoint_dir"] else None
    if ckdir:
        ckdir.mkdir(parents=True, exist_ok=True)
    for idx, r in enumerate(rs):
        spec = _spec(scen, cfg["n"], cfg["p"], r)
        ck = ckdir / f"point{idx:04d}.json" if ckdir else None

        def report(done, total, idx=idx, r=r):
            progress(f"simulate {idx + 1}/{len(rs)} r={r:g}: block {done}/{total}")

        res = estimate_probability(spec, prop, cfg["trials"], cfg["seed"], cfg["k"], checkpoint=ck, progress=report)
        rows.append((r, res.trials, res.successes, res.estimate, res.ci_low, res.ci_high, res.seed, "simulation"))
    return rows


# ---------------------------------------------------------------------------
# breakpoints


def breakpoint_rows(cfg: dict) -> list[tuple]:
    try:
        bp = grid_breakpoints(cfg["n"])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return [(i, float(v), q, "lattice_distance") for i, (v, q) in enumerate(zip(bp.values, bp.sums))]


# ---------------------------------------------------------------------------
# figure recipes


@dataclass
class Recipe:
    description: str
    build: Callable[[dict], tuple[list[str], list[tuple], dict[str, str]]]
    defaults: dict = field(default_factory=dict)


def _sim_cols(res):
    return [res.estimate, res.ci_low, res.ci_high]


def _grid_asymptotic(cfg, k):
    n, p = 100, 0.2
    lo_t, hi_t = asymptotic_klb_thresholds(n, p, cfg["eps"])
    rows = []
    for r in radii(cfg):
        res = estimate_probability(GridSpec(n, p, r), "k-covered", cfg["trials"], cfg["seed"], k)
        rows.append((r, *_sim_cols(res), klb_baseline(r, n, p, cfg["eps"]), lo_t, hi_t))
    header = ["r", "simulated", "ci_low", "ci_high", "asymptotic", "r_low", "r_high"]
    manifest = {
        "simulated": f"simulation: grid n={n} p={p} {k}-coverage frequency",
        "ci_low": "simulation: Wilson 95% interval lower end",
        "ci_high": "simulation: Wilson 95% interval upper end",
        "asymptotic": "large-n k-coverage threshold rule (1 above r_high; 0 below r_low; blank between)",
        "r_low": "large-n lower threshold radius",
        "r_high": "large-n upper threshold radius",
    }
    return header, rows, manifest


def _grid_finite(cfg, k):
    n, p = 100, 0.2
    rows = []
    for r in radii(cfg):
        rep = grid_bounds(GridSpec(n, p, r), k, cfg["l"], cfg["eps"])
        res = estimate_probability(GridSpec(n, p, r), "k-covered", cfg["trials"], cfg["seed"], k)
        rows.append((r, rep.lower, rep.upper, *_sim_cols(res)))
    header = ["r", "lower", "upper", "simulated", "ci_low", "ci_high"]
    manifest = {
        "lower": "grid virtual-grid product lower bound (positive association over activations)",
        "upper": "grid disjoint-balls upper bound (corner; edge and interior test points)",
        "simulated": f"simulation: grid n={n} p={p} {k}-coverage frequency",
        "ci_low": "simulation: Wilson 95% interval lower end",
        "ci_high": "simulation: Wilson 95% interval upper end",
    }
    return header, rows, manifest


def _fig8(cfg):
    n = 100
    rows = []
    for r in radii(cfg):
        res = estimate_probability(RandSpec(n, r, 1.0), "disconnected", cfg["trials"], cfg["seed"])
        rows.append((r, asymptotic_disc(n, r), *_sim_cols(res)))
    header = ["r", "asymptotic", "simulated", "ci_low", "ci_high"]
    manifest = {
        "asymptotic": "large-n disconnectivity 1-exp(-n exp(-n pi r^2))",
        "simulated": f"simulation: random n={n} p=1 disconnectivity frequency",
        "ci_low": "simulation: Wilson 95% interval lower end",
        "ci_high": "simulation: Wilson 95% interval upper end",
    }
    return header, rows, manifest


def _fig9(cfg):
    n, p = 100, 0.5
    rows = []
    for r in radii(cfg):
        rep = disc_bounds(RandSpec(n, r, p), cfg["pair_samples"], cfg["seed"], cfg["tol"])
        rows.append((r, rep.a1, rep.a2, rep.a2_stderr))
    header = ["r", "a1", "a2", "a2_stderr"]
    manifest = {
        "a1": "expected number of isolated nodes (adaptive cubature)",
        "a2": "expected number of isolated linked pairs (Monte Carlo over near pairs)",
        "a2_stderr": "Monte Carlo standard error of a2",
    }
    return header, rows, manifest


def _fig10(cfg):
    n, p = 100, 0.5
    rows = []
    for r in radii(cfg):
        rep = disc_bounds(RandSpec(n, r, p), cfg["pair_samples"], cfg["seed"], cfg["tol"])
        res = estimate_probability(RandSpec(n, r, p), "disconnected", cfg["trials"], cfg["seed"])
        rows.append((r, rep.lower, rep.upper_truncated, rep.estimate, *_sim_cols(res)))
    header = ["r", "lower", "upper", "estimate", "simulated", "ci_low", "ci_high"]
    manifest = {
        "lower": "second-order inclusion-exclusion lower bound (clamped to [0 1])",
        "upper": "isolated node plus isolated pair terms (truncated upper bound; clamped)",
        "estimate": "expected number of isolated nodes (clamped)",
        "simulated": f"simulation: random n={n} p={p} disconnectivity frequency",
        "ci_low": "simulation: Wilson 95% interval lower end",
        "ci_high": "simulation: Wilson 95% interval upper end",
    }
    return header, rows, manifest


def _covrand(cfg):
    n = 100
    rows = []
    for r in radii(cfg):
        try:
            lower = rand_cov_lower(n, r, VirtualGrid.for_radius(r, cfg["l"]))
        except DeflatedRadiusError:
            lower = None
        res = estimate_probability(RandSpec(n, r, 1.0), "k-covered", cfg["trials"], cfg["seed"])
        rows.append((r, lower, rand_cov_upper(n, r), *_sim_cols(res)))
    header = ["r", "lower", "upper", "simulated", "ci_low", "ci_high"]
    manifest = {
        "lower": "random virtual-grid union lower bound",
        "upper": "random disjoint-balls upper bound",
        "simulated": f"simulation: random n={n} coverage frequency",
        "ci_low": "simulation: Wilson 95% interval lower end",
        "ci_high": "simulation: Wilson 95% interval upper end",
    }
    return header, rows, manifest


_GRID_SWEEP = {"r_start": 0.15, "r_stop": 0.45, "r_step": 0.01}
_RANDOM_SWEEP = {"r_start": 0.15, "r_stop": 0.45, "r_step": 0.025}

RECIPES = {
    "fig2": Recipe("grid coverage: simulation vs large-n thresholds (n=100 p=0.2 k=1)",
                   lambda c: _grid_asymptotic(c, 1), _GRID_SWEEP),
    "fig3": Recipe("grid 2-coverage: simulation vs large-n thresholds (n=100 p=0.2 k=2)",
                   lambda c: _grid_asymptotic(c, 2), _GRID_SWEEP),
    "fig5": Recipe("grid coverage bounds vs simulation (n=100 p=0.2 k=1)",
                   lambda c: _grid_finite(c, 1), _GRID_SWEEP),
    "fig6": Recipe("grid 2-coverage bounds vs simulation (n=100 p=0.2 k=2)",
                   lambda c: _grid_finite(c, 2), _GRID_SWEEP),
    "fig8": Recipe("random disconnectivity: simulation vs large-n formula (n=100 p=1)", _fig8,
                   {"r_start": 0.1, "r_stop": 0.45, "r_step": 0.025}),
    "fig9": Recipe("isolated-node term a1 vs isolated-pair term a2 (n=100 p=0.5)", _fig9, _RANDOM_SWEEP),
    "fig10": Recipe("random disconnectivity bounds and estimate vs simulation (n=100 p=0.5)", _fig10,
                    _RANDOM_SWEEP),
    "covrand": Recipe("random coverage bounds vs simulation (n=100)", _covrand, _RANDOM_SWEEP),
}


def reproduce(fig: str, cfg: dict, args: argparse.Namespace) -> Path:
    if fig not in RECIPES:
        raise UsageError(f"unknown figure id {fig!r}; valid ids: {', '.join(RECIPES)}")
    recipe = RECIPES[fig]
    # recipe sweep applies unless the user set a range explicitly
    for key, val in recipe.defaults.items():
        if getattr(args, key, None) is None and not (args.config and key in read_config(args.config)):
            cfg[key] = val
    if cfg["trials"] < 1:
        raise UsageError("--trials must be >= 1")
    outdir = Path(cfg["out"] or fig)
    outdir.mkdir(parents=True, exist_ok=True)
    progress(f"reproduce {fig}: {recipe.description}")
    header, rows, manifest = recipe.build(cfg)
    write_csv(header, rows, str(outdir / f"{fig}.csv"))
    mrows = [("r", "sweep radius")] + [(col, manifest[col]) for col in header[1:]]
    write_csv(("column", "source"), mrows, str(outdir / f"{fig}.manifest.csv"))
    return outdir


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat key = value file; flags override it")
    p.add_argument("--scenario", choices=("grid", "random"))
    p.add_argument("--n", type=int, help="number of sensors (a perfect square for grids)")
    p.add_argument("--p", type=float, help="activation (grid) or link (random) probability")
    p.add_argument("--k", type=int, help="coverage or connectivity order")
    p.add_argument("--property", help="property to evaluate")
    p.add_argument("--r", help="explicit radii, comma or space separated (overrides the range)")
    p.add_argument("--r-start", dest="r_start", type=float)
    p.add_argument("--r-stop", dest="r_stop", type=float)
    p.add_argument("--r-step", dest="r_step", type=float)
    p.add_argument("--l", type=int, help="virtual-grid size for lower bounds (a perfect square)")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--tol", type=float, help="absolute quadrature tolerance")
    p.add_argument("--pair-samples", dest="pair_samples", type=int, help="Monte Carlo samples for pair integrals")
    p.add_argument("--eps", type=float, help="margin of the large-n coverage thresholds")
    p.add_argument("--out", help="output file (directory for reproduce); default stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="finitewsn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    b = sub.add_parser("bounds", help="analytic bounds and estimates over a radius sweep")
    _add_common(b)
    s = sub.add_parser("simulate", help="Monte Carlo frequencies over a radius sweep")
    _add_common(s)
    s.add_argument("--checkpoint-dir", dest="checkpoint_dir", help="resume directory for per-point counts")
    bp = sub.add_parser("breakpoints", help="radii where grid graph properties can change")
    bp.add_argument("--config")
    bp.add_argument("--n", type=int)
    bp.add_argument("--out")
    rp = sub.add_parser("reproduce", help="write the CSV bundle behind one figure")
    rp.add_argument("figure", help=f"one of: {', '.join(RECIPES)}")
    _add_common(rp)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = resolve(args)
        if args.command == "bounds":
            write_csv(BOUNDS_HEADER, bounds_rows(cfg), cfg["out"])
        elif args.command == "simulate":
            write_csv(SIM_HEADER, simulate_rows(cfg), cfg["out"])
        elif args.command == "breakpoints":
            write_csv(("index", "value", "squared_times_n", "provenance"), breakpoint_rows(cfg), cfg["out"])
        else:
            reproduce(args.figure, cfg, args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QuadratureError as exc:
        print(f"quadrature did not converge: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (PreconditionError, ValueError) as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except Exception as exc:  # noqa: BLE001
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
