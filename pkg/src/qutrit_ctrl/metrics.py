"""State functionals: objectives, distances, entropies and purity.

Conventions: logarithms are natural throughout; matrix functions of
density matrices go through the Hermitian eigendecomposition, with
eigenvalues below 1e-12 truncated to zero before fractional powers so that
integrator noise cannot produce NaNs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import Trajectory
from .model import (BETA_WEIGHTS, InvalidStateError, Objective, derealify)

__all__ = [
    "MetricSeries",
    "eval_objective",
    "hs_distance_sq",
    "von_neumann_entropy",
    "purity",
    "petz_renyi",
    "trajectory_metrics",
]

_EIG_FLOOR = 1e-12
_NEGATIVE_EIG_TOL = 1e-8


@dataclass(frozen=True)
class MetricSeries:
    """A named scalar time series."""

    name: str
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.times.shape != self.values.shape:
            raise ValueError("times and values must have equal length")


def eval_objective(objective: Objective, xT: np.ndarray) -> float:
    """Objective value at a realified final state.

    overlap:  b - sum_j beta_j x_target_j x_j
    distance: sum_j beta_j (x_j - x_target_j)^2, which equals the squared
    Hilbert-Schmidt distance of the corresponding matrices exactly.
    """
    xT = np.asarray(xT, dtype=float)
    if objective.kind == "overlap":
        return float(objective.b - np.dot(BETA_WEIGHTS * objective.x_target, xT))
    d = xT - objective.x_target
    return float(np.dot(BETA_WEIGHTS, d * d))


def hs_distance_sq(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Squared Hilbert-Schmidt distance Tr((rho - sigma)^2)."""
    d = np.asarray(rho) - np.asarray(sigma)
    return float(np.trace(d @ d).real)


def _checked_eigvals(rho: np.ndarray) -> np.ndarray:
    lam = np.linalg.eigvalsh(np.asarray(rho, dtype=complex))
    if lam.min() < -_NEGATIVE_EIG_TOL:
        raise InvalidStateError(
            f"matrix has eigenvalue {lam.min():.3e}; not a density matrix")
    return np.clip(lam, 0.0, None)


def von_neumann_entropy(rho: np.ndarray) -> float:
    """-Tr(rho log rho) with 0 log 0 = 0 (natural log, range [0, log 3])."""
    lam = _checked_eigvals(rho)
    lam = lam[lam > 0.0]
    return float(-(lam * np.log(lam)).sum())


def purity(rho: np.ndarray) -> float:
    """Tr(rho^2); 1 for pure states, 1/3 for the maximally mixed qutrit state."""
    rho = np.asarray(rho, dtype=complex)
    return float(np.trace(rho @ rho).real)


def _fractional_power(rho: np.ndarray, p: float) -> np.ndarray:
    lam, U = np.linalg.eigh(np.asarray(rho, dtype=complex))
    lam = np.clip(lam, 0.0, None)
    lam[lam < _EIG_FLOOR] = 0.0
    powered = np.where(lam > 0.0, lam ** p, 0.0)
    return (U * powered) @ U.conj().T


def petz_renyi(rho: np.ndarray, sigma: np.ndarray, alpha: float) -> float:
    """Renyi relative entropy log(Tr(rho^alpha sigma^(1-alpha))) / (alpha - 1).

    Defined for alpha in (0, 1) or (1, inf).  For alpha > 1 the support of
    rho must lie inside the support of sigma; a violation returns +inf.
    Zero eigenvalues never enter fractional powers (0^p = 0 for p > 0).
    """
    if alpha <= 0 or alpha == 1.0:
        raise ValueError("alpha must lie in (0, 1) or (1, inf)")
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if alpha > 1.0:
        lam, U = np.linalg.eigh(sigma)
        null = np.clip(lam, 0.0, None) < _EIG_FLOOR
        if null.any():
            P = (U[:, null] @ U[:, null].conj().T)
            if np.trace(P @ rho).real > 1e-12:
                return math.inf
    tr = np.trace(_fractional_power(rho, alpha)
                  @ _fractional_power(sigma, 1.0 - alpha)).real
    if tr <= 0.0:
        return math.inf if alpha < 1.0 else -math.inf
    return float(math.log(tr) / (alpha - 1.0))


def trajectory_metrics(fwd: Trajectory, objective: Objective,
                       renyi_alpha: float = 0.5) -> dict[str, MetricSeries]:
    """Scalar series along a trajectory, sampled on the control grid.

    Emits the three level populations, the squared Hilbert-Schmidt distance
    to the target, the von Neumann entropy, the purity, and the Renyi
    relative entropy to the target (alpha = 0.5 by default, matching the
    divergence plotted for every scenario).
    """
    times = fwd.cell_boundary_times()
    states = fwd.cell_boundary_states()
    sigma = derealify(objective.x_target)
    rhos = [derealify(x) for x in states]

    def series(name, values):
        return MetricSeries(name=name, times=times,
                            values=np.asarray(values, dtype=float))

    out = {
        "population_1": series("population_1", states[:, 0]),
        "population_2": series("population_2", states[:, 5]),
        "population_3": series("population_3", states[:, 8]),
        "hs_distance_sq": series("hs_distance_sq",
                                 [hs_distance_sq(r, sigma) for r in rhos]),
        "entropy": series("entropy", [von_neumann_entropy(r) for r in rhos]),
        "purity": series("purity", [purity(r) for r in rhos]),
        f"renyi_{renyi_alpha:g}": series(
            f"renyi_{renyi_alpha:g}",
            [petz_renyi(r, sigma, renyi_alpha) for r in rhos]),
    }
    return out
