"""Scenario configuration: a flat key-value text format and its loader.

A config file holds one ``key = value`` assignment per line; ``#`` starts
a comment.  States are given either as 3 numbers (diagonal entries) or as
the 9 real components of the parameterization.  Example::

    # system
    E2 = 1.0
    E3 = 2.5
    V13 = 1.0
    V23 = 1.7
    C13 = 0.5
    C23 = 0.3
    rho0 = 0.8 0 0.2
    rho_target = 0.5 0.3 0.2
    T = 0.5
    N = 1000
    bounds = compact        # or: half-unbounded
    mu = 50
    n_max = 10
    objective = distance    # or: overlap (aliases J2 / J1)
    u0 = 1.0
    n1_0 = 0.0
    n2_0 = 0.0
    method = gpm3           # gpm1 | gpm2 | gpm3 | rkm
    alpha = 1.0
    beta = 0.75
    theta = 0.1
    eps_stop = 1e-6
    max_iters = 20000
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .dynamics import IntegratorConfig
from .model import (ControlBounds, ControlGrid, Objective, SystemParams,
                    derealify, validate_density_matrix)
from .optimizers import ControlProblem, GpmConfig, METHODS

__all__ = ["ScenarioConfig", "ConfigError", "load_config"]


class ConfigError(ValueError):
    """Malformed or inconsistent scenario configuration."""


@dataclass(frozen=True)
class ScenarioConfig:
    """Everything needed to reproduce one optimization scenario."""

    params: SystemParams
    rho0: np.ndarray
    rho_target: np.ndarray
    T: float
    N: int
    bounds: ControlBounds
    objective_kind: str           # "overlap" or "distance"
    u0: float
    n1_0: float
    n2_0: float
    method: str
    alpha: float
    beta: float
    theta: float
    eps_stop: float
    max_iters: int
    rel_tol: float = 1e-9
    abs_tol: float = 1e-11
    output_dir: str | None = None

    def __post_init__(self):
        for name, rho in (("rho0", self.rho0), ("rho_target", self.rho_target)):
            try:
                validate_density_matrix(np.asarray(rho, dtype=complex))
            except ValueError as exc:
                raise ConfigError(f"{name}: {exc}") from exc
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.objective_kind not in ("overlap", "distance"):
            raise ConfigError(f"objective must be 'overlap' or 'distance', "
                              f"got {self.objective_kind!r}")
        if self.N < 1:
            raise ConfigError("N must be a positive integer")
        if self.T <= 0:
            raise ConfigError("T must be positive")
        if self.n1_0 < 0 or self.n2_0 < 0:
            raise ConfigError("initial incoherent controls must be nonnegative")

    def objective(self) -> Objective:
        if self.objective_kind == "overlap":
            return Objective.overlap(self.rho_target)
        return Objective.distance(self.rho_target)

    def problem(self) -> ControlProblem:
        return ControlProblem.build(self.params, self.rho0, self.objective(),
                                    self.bounds)

    def initial_control(self) -> ControlGrid:
        return ControlGrid.constant(self.T, self.N, self.u0, self.n1_0, self.n2_0)

    def gpm_config(self) -> GpmConfig:
        return GpmConfig(alpha=self.alpha, beta=self.beta, theta=self.theta,
                         eps_stop=self.eps_stop, max_iters=self.max_iters)

    def integrator_config(self) -> IntegratorConfig:
        return IntegratorConfig(rel_tol=self.rel_tol, abs_tol=self.abs_tol)

    def with_method(self, method: str) -> "ScenarioConfig":
        return replace(self, method=method)


_FLOAT_KEYS = {"E2", "E3", "V13", "V23", "C13", "C23", "T", "mu", "n_max",
               "u0", "n1_0", "n2_0", "alpha", "beta", "theta", "eps_stop",
               "rel_tol", "abs_tol"}
_INT_KEYS = {"N", "max_iters"}
_STATE_KEYS = {"rho0", "rho_target"}
_STR_KEYS = {"bounds", "objective", "method", "output_dir"}
_ALL_KEYS = _FLOAT_KEYS | _INT_KEYS | _STATE_KEYS | _STR_KEYS

_OBJECTIVE_ALIASES = {"overlap": "overlap", "j1": "overlap",
                      "distance": "distance", "j2": "distance"}

_REQUIRED = ["E2", "E3", "V13", "V23", "C13", "C23", "rho0", "rho_target",
             "T", "N", "bounds", "objective", "method", "alpha", "eps_stop"]


def _parse_state(text: str) -> np.ndarray:
    parts = text.split()
    vals = [float(p) for p in parts]
    if len(vals) == 3:
        return np.diag(vals).astype(complex)
    if len(vals) == 9:
        return derealify(np.asarray(vals))
    raise ValueError("state needs 3 diagonal entries or 9 real components")


def load_config(path) -> ScenarioConfig:
    """Parse and validate a scenario file.

    Raises :class:`ConfigError` naming the offending line for parse
    problems, or the offending field for invariant violations.
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc

    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in stripped.split("=", 1))
        if key not in _ALL_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in raw:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"{path}:{lineno}: empty value for {key!r}")
        raw[key] = value

    missing = [k for k in _REQUIRED if k not in raw]
    if missing:
        raise ConfigError(f"{path}: missing required keys: {', '.join(missing)}")

    def take(key, kind, default=None):
        if key not in raw:
            return default
        try:
            return kind(raw[key])
        except ValueError as exc:
            raise ConfigError(f"{path}: key {key!r}: {exc}") from exc

    bounds_kind = raw["bounds"].strip().lower()
    if bounds_kind == "compact":
        if "mu" not in raw or "n_max" not in raw:
            raise ConfigError(f"{path}: compact bounds require mu and n_max")
        bounds = ControlBounds.compact(take("mu", float), take("n_max", float))
    elif bounds_kind in ("half-unbounded", "unbounded", "half_unbounded"):
        bounds = ControlBounds.half_unbounded()
    else:
        raise ConfigError(f"{path}: bounds must be 'compact' or 'half-unbounded'")

    objective = _OBJECTIVE_ALIASES.get(raw["objective"].strip().lower())
    if objective is None:
        raise ConfigError(f"{path}: objective must be overlap/J1 or distance/J2")

    try:
        params = SystemParams(E2=take("E2", float), E3=take("E3", float),
                              V13=take("V13", float), V23=take("V23", float),
                              C13=take("C13", float), C23=take("C23", float))
        return ScenarioConfig(
            params=params,
            rho0=take("rho0", _parse_state),
            rho_target=take("rho_target", _parse_state),
            T=take("T", float),
            N=take("N", int),
            bounds=bounds,
            objective_kind=objective,
            u0=take("u0", float, 0.0),
            n1_0=take("n1_0", float, 0.0),
            n2_0=take("n2_0", float, 0.0),
            method=raw["method"].strip().lower(),
            alpha=take("alpha", float),
            beta=take("beta", float, 0.0),
            theta=take("theta", float, 0.0),
            eps_stop=take("eps_stop", float),
            max_iters=take("max_iters", int, 20000),
            rel_tol=take("rel_tol", float, 1e-9),
            abs_tol=take("abs_tol", float, 1e-11),
            output_dir=raw.get("output_dir"),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
