"""Momentum-coefficient sweep for the two-step method.

Runs the heavy-ball method over a grid of (alpha, beta) pairs on one
scenario, records the cost of each run in solved Cauchy problems, and fits
complexity as a linear function of beta per alpha.  Scenarios are
independent, so they are dispatched to a thread pool (the integrator cores
release the GIL); results are emitted in submission order regardless of
completion order, keeping the CSV deterministic.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .config import ScenarioConfig
from .optimizers import run
from .reporting import format_float

__all__ = ["SweepRow", "SweepResult", "default_betas", "run_beta_sweep",
           "write_sweep_csv", "write_sweep_fit_txt"]


def default_betas() -> np.ndarray:
    """beta = 0.1 + 0.05 j for j = 0..16 (0.10 through 0.90)."""
    return 0.1 + 0.05 * np.arange(17)


@dataclass(frozen=True)
class SweepRow:
    alpha: float
    beta: float
    complexity: int
    converged: bool


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    fits: dict[float, tuple[float, float]]  # alpha -> (slope, intercept)

    def complexities(self, alpha: float) -> tuple[np.ndarray, np.ndarray]:
        pts = [(r.beta, r.complexity) for r in self.rows
               if r.alpha == alpha and r.converged]
        arr = np.asarray(pts, dtype=float)
        return arr[:, 0], arr[:, 1]


def _single(config: ScenarioConfig, alpha: float, beta: float) -> SweepRow:
    cfg = replace(config, alpha=alpha, beta=beta, method="gpm2")
    report = run("gpm2", cfg.problem(), cfg.initial_control(),
                 cfg.gpm_config(), cfg.integrator_config())
    return SweepRow(alpha=alpha, beta=beta, complexity=report.cauchy_problems,
                    converged=report.converged)


def run_beta_sweep(config: ScenarioConfig, alphas=(1.0, 5.0), betas=None,
                   jobs: int | None = None) -> SweepResult:
    """Run the two-step method for every (alpha, beta) pair.

    Non-convergent runs are kept in the rows (flagged, excluded from the
    fits); the sweep always completes.
    """
    if betas is None:
        betas = default_betas()
    pairs = [(a, b) for a in alphas for b in betas]
    jobs = jobs or min(8, os.cpu_count() or 1)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(lambda ab: _single(config, *ab), pairs))
    else:
        rows = [_single(config, a, b) for a, b in pairs]

    fits = {}
    for a in alphas:
        pts = [(r.beta, r.complexity) for r in rows
               if r.alpha == a and r.converged]
        if len(pts) >= 2:
            arr = np.asarray(pts, dtype=float)
            slope, intercept = np.polyfit(arr[:, 0], arr[:, 1], 1)
            fits[a] = (float(slope), float(intercept))
    return SweepResult(rows=tuple(rows), fits=fits)


def write_sweep_csv(path, result: SweepResult) -> None:
    lines = ["alpha,beta,complexity,converged"]
    for r in result.rows:
        complexity = str(r.complexity) if r.converged else ""
        lines.append(f"{format_float(r.alpha)},{format_float(r.beta)},"
                     f"{complexity},{str(r.converged).lower()}")
    Path(path).write_text("\n".join(lines) + "\n")


def write_sweep_fit_txt(path, result: SweepResult) -> None:
    lines = []
    for a, (slope, intercept) in sorted(result.fits.items()):
        lines.append(f"alpha = {format_float(a)}: complexity ~= "
                     f"{format_float(slope)} * beta + {format_float(intercept)}")
    Path(path).write_text("\n".join(lines) + "\n")
