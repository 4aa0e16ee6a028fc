"""Run configuration: flat key=value text or the JSON equivalent.

Parsing accumulates every problem it finds (unknown keys, duplicates,
range violations) and reports them together; nothing is computed from a
config that failed validation.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields

from .problem import (
    CoerciveQuadraticPotential,
    GaussianWeight,
    PowerNonlinearity,
    ProblemSpec,
    WellPotential,
)
from .grid import Grid
from .solvers import SolveOptions

__all__ = ["RunConfig", "ConfigError", "parse_config", "build_spec", "build_options",
           "MODES", "CHECK_NAMES"]

MODES = ("solve", "two-solutions", "verify", "probe-geometry", "kernel-table")
POTENTIALS = ("coercive_quadratic", "well")
WEIGHTS = ("gaussian",)
CHECK_NAMES = ("assumptions", "superquadratic-tail", "sublevel-bound", "splitting",
               "coercivity", "sublevel-measure", "holder", "embedding",
               "norm-domination")


class ConfigError(ValueError):
    """Carries the full list of validation problems."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class RunConfig:
    mode: str = "solve"
    dim: int = 1
    n: int = 256
    box_length: float = 40.0
    alpha: float = 0.75
    lam: float = 1.0
    mu: float = 0.01
    p: float = 1.5
    q: float = 4.0
    potential: str = "coercive_quadratic"
    well_radius: float = 1.0
    well_height: float = 50.0
    well_ramp: float = 1.0
    xi: str = "gaussian"
    tol: float = 1e-8
    max_iter: int = 5000
    path_nodes: int = 41
    rho_grid: tuple | None = None
    samples_per_rho: int = 64
    distinct_tol: float = 1e-3
    # "auto" resolves at run time to the checkers that make sense for the
    # configured potential family (coercivity needs strict positivity, the
    # sublevel checks need a well)
    checks: tuple = ("auto",)
    b: float = 10.0
    trials: int = 100
    tau: float = 1.5
    beta: float | None = None
    separations: tuple = (2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 15.0)
    s_list: tuple = (2.0, 3.0, 4.0)
    kernel_radii: tuple = (0.25, 0.5, 1.0, 2.0, 4.0)
    kernel_alphas: tuple = (0.5, 1.0, 1.5, 2.0)
    seed: int = 0
    out_dir: str = "out"


_INT_KEYS = {"dim", "n", "max_iter", "path_nodes", "samples_per_rho", "trials", "seed"}
_FLOAT_KEYS = {"box_length", "alpha", "lam", "mu", "p", "q", "well_radius",
               "well_height", "well_ramp", "tol", "distinct_tol", "b", "tau", "beta"}
_LIST_KEYS = {"rho_grid", "separations", "s_list", "kernel_radii", "kernel_alphas"}
_STR_KEYS = {"mode", "potential", "xi", "out_dir"}
_STR_LIST_KEYS = {"checks"}
_ALIASES = {"lambda": "lam"}
_KNOWN = _INT_KEYS | _FLOAT_KEYS | _LIST_KEYS | _STR_KEYS | _STR_LIST_KEYS


def _raw_pairs(text, errors):
    text = text.strip()
    if text.startswith("{"):
        pairs = []

        def hook(items):
            pairs.extend(items)
            return dict(items)

        try:
            json.loads(text, object_pairs_hook=hook)
        except json.JSONDecodeError as err:
            errors.append(f"invalid JSON: {err}")
            return []
        return [(k, v) for k, v in pairs]
    pairs = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            errors.append(f"line {lineno}: expected key=value, got {line!r}")
            continue
        key, value = line.split("=", 1)
        pairs.append((key.strip(), value.strip()))
    return pairs


def _coerce(key, value, errors):
    if key in _INT_KEYS:
        try:
            if isinstance(value, bool):
                raise ValueError
            out = int(str(value))
        except ValueError:
            errors.append(f"{key}: expected an integer, got {value!r}")
            return None
        return out
    if key in _FLOAT_KEYS:
        try:
            out = float(str(value))
        except ValueError:
            errors.append(f"{key}: expected a number, got {value!r}")
            return None
        return out
    if key in _LIST_KEYS:
        items = value if isinstance(value, (list, tuple)) else str(value).split(",")
        out = []
        for item in items:
            try:
                out.append(float(str(item).strip()))
            except ValueError:
                errors.append(f"{key}: expected numbers, got {item!r}")
                return None
        return tuple(out)
    if key in _STR_LIST_KEYS:
        items = value if isinstance(value, (list, tuple)) else str(value).split(",")
        return tuple(str(item).strip() for item in items)
    return str(value)


def _validate(cfg: RunConfig, errors) -> None:
    if cfg.mode not in MODES:
        errors.append(f"mode: unknown mode {cfg.mode!r}; choose from {', '.join(MODES)}")
    if cfg.dim not in (1, 2, 3):
        errors.append(f"dim: must be 1, 2, or 3, got {cfg.dim}")
    if cfg.n <= 0:
        errors.append(f"n: must be positive, got {cfg.n}")
    if cfg.box_length <= 0:
        errors.append(f"box_length: must be positive, got {cfg.box_length}")
    if not 0.0 < cfg.alpha < 1.0:
        errors.append(f"alpha: must lie in the open interval (0, 1), got {cfg.alpha}")
    if cfg.lam <= 0:
        errors.append(f"lambda: must be positive, got {cfg.lam}")
    if cfg.mu < 0:
        errors.append(f"mu: must be nonnegative, got {cfg.mu}")
    if not 1.0 < cfg.p < 2.0:
        errors.append(f"p: must lie in the open interval (1, 2), got {cfg.p}")
    if cfg.q <= 2.0:
        errors.append(f"q: must exceed 2, got {cfg.q}")
    if cfg.potential not in POTENTIALS:
        errors.append(f"potential: unknown choice {cfg.potential!r}; choose from {', '.join(POTENTIALS)}")
    if cfg.xi not in WEIGHTS:
        errors.append(f"xi: unknown choice {cfg.xi!r}; choose from {', '.join(WEIGHTS)}")
    for name in ("well_radius", "well_height", "well_ramp", "tol", "distinct_tol", "b"):
        if getattr(cfg, name) <= 0:
            errors.append(f"{name}: must be positive, got {getattr(cfg, name)}")
    for name in ("max_iter", "samples_per_rho", "trials"):
        if getattr(cfg, name) <= 0:
            errors.append(f"{name}: must be positive, got {getattr(cfg, name)}")
    if cfg.path_nodes < 3:
        errors.append(f"path_nodes: needs at least 3 nodes, got {cfg.path_nodes}")
    if cfg.beta is not None and not 0.0 < cfg.beta < 2.0:
        errors.append(f"beta: must lie in (0, 2), got {cfg.beta}")
    if cfg.rho_grid is not None and any(r <= 0 for r in cfg.rho_grid):
        errors.append("rho_grid: radii must be positive")
    for name in cfg.checks:
        if name != "auto" and name not in CHECK_NAMES:
            errors.append(f"checks: unknown checker {name!r}; choose from {', '.join(CHECK_NAMES)}")


def parse_config(text: str) -> RunConfig:
    errors: list[str] = []
    pairs = _raw_pairs(text, errors)

    seen: dict = {}
    values: dict = {}
    for key, value in pairs:
        key = _ALIASES.get(key, key)
        if key not in _KNOWN:
            errors.append(f"unknown key {key!r}")
            continue
        if key in seen:
            errors.append(f"duplicate key {key!r} (values {seen[key]!r} and {value!r})")
            continue
        seen[key] = value
        coerced = _coerce(key, value, errors)
        if coerced is not None:
            values[key] = coerced

    known_fields = {f.name for f in fields(RunConfig)}
    cfg = RunConfig(**{k: v for k, v in values.items() if k in known_fields})
    _validate(cfg, errors)
    if errors:
        raise ConfigError(errors)
    return cfg


def build_spec(cfg: RunConfig) -> ProblemSpec:
    grid = Grid(dim=cfg.dim, n=cfg.n, box_length=cfg.box_length)
    if cfg.potential == "well":
        potential = WellPotential(radius=cfg.well_radius, height=cfg.well_height,
                                  ramp=cfg.well_ramp)
    else:
        potential = CoerciveQuadraticPotential()
    return ProblemSpec(
        grid=grid, alpha=cfg.alpha, lam=cfg.lam, mu=cfg.mu, p=cfg.p,
        nonlinearity=PowerNonlinearity(cfg.q), potential=potential,
        weight=GaussianWeight(),
    )


def build_options(cfg: RunConfig) -> SolveOptions:
    return SolveOptions(tol=cfg.tol, max_iter=cfg.max_iter, path_nodes=cfg.path_nodes)
