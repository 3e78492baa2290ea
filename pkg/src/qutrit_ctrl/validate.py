"""Self-validation suite: oracle equivalence, gradient checks, invariants.

Each check is independent and reports one pass/fail line.  The suite backs
the ``validate`` CLI command and doubles as a quick post-install sanity
gate; it uses reduced grids so the whole thing runs in well under a
minute.  ``corrupt_generators`` deliberately perturbs one drift entry so
tests can confirm the oracle-equivalence check actually bites.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .adjoint import adjoint_solve, gradient
from .dynamics import (CauchyCounter, IntegratorConfig, complex_oracle_solve,
                       forward_solve)
from .metrics import eval_objective
from .model import (ControlGrid, Generators, Objective, build_generators,
                    derealify, realify)
from .optimizers import run
from .presets import preset_config

__all__ = ["CheckResult", "fd_gradient", "run_validation"]

# Tight tolerances for finite differencing: the differenced objective
# changes by ~1e-8, so the per-solve error must sit well below that.
FD_INTEGRATOR = IntegratorConfig(rel_tol=1e-12, abs_tol=1e-14)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def fd_gradient(gens: Generators, grid: ControlGrid, objective: Objective,
                x0: np.ndarray, channel: str, cells,
                h: float = 1e-5,
                integrator: IntegratorConfig = FD_INTEGRATOR) -> np.ndarray:
    """Central-difference estimate of the per-cell gradient entries.

    Perturbs the given channel's value on each listed cell by +-h,
    re-solves, and divides the objective difference by 2 h dt, which
    estimates the cell average of the continuous-time gradient.  Purely
    forward-solve based, hence independent of the costate path it is used
    to check.  Uses a local counter (diagnostic cost is not run cost).
    """
    counter = CauchyCounter()
    arrays = {"u": grid.u, "n1": grid.n1, "n2": grid.n2}
    out = np.empty(len(cells))
    for j, i in enumerate(cells):
        vals = {}
        for sign in (+1, -1):
            pert = {k: v.copy() for k, v in arrays.items()}
            pert[channel][i] += sign * h
            g = ControlGrid(grid.T, pert["u"], pert["n1"], pert["n2"])
            traj = forward_solve(gens, g, x0, integrator, counter)
            vals[sign] = eval_objective(objective, traj.final_state)
        out[j] = (vals[+1] - vals[-1]) / (2.0 * h * grid.dt)
    return out


def _check_generator_trace(rng) -> CheckResult:
    from .model import SystemParams
    worst = 0.0
    for _ in range(5):
        E2, E3, V13, V23 = rng.uniform(0.2, 3.0, 4)
        C13, C23 = rng.uniform(0.0, 1.5, 2)
        gens = build_generators(SystemParams(E2, E3, V13, V23, C13, C23))
        for M in (gens.A, gens.Bu, gens.Bn1, gens.Bn2):
            worst = max(worst, np.abs(M[0] + M[5] + M[8]).max())
    return CheckResult("generator-trace-preservation", worst <= 1e-14,
                       f"max |column sum over population rows| = {worst:.2e}")


def _check_oracle_equivalence(rng, corrupt: bool) -> CheckResult:
    cfg = preset_config("5.1")
    params = cfg.params
    gens = build_generators(params)
    if corrupt:
        A = gens.A.copy()
        A[0, 0] += 1e-3
        gens = Generators(A=A, Bu=gens.Bu.copy(), Bn1=gens.Bn1.copy(),
                          Bn2=gens.Bn2.copy())
    tight = IntegratorConfig(rel_tol=1e-11, abs_tol=1e-13)
    x0 = realify(cfg.rho0)
    worst = 0.0
    for _ in range(5):
        grid = ControlGrid(0.5, rng.uniform(-50, 50, 40),
                           rng.uniform(0, 10, 40), rng.uniform(0, 10, 40))
        traj = forward_solve(gens, grid, x0, tight, CauchyCounter())
        oracle = complex_oracle_solve(params, grid, cfg.rho0, tight)
        for i in range(grid.N + 1):
            dev = np.linalg.norm(derealify(traj.states[2 * i]) - oracle[i])
            worst = max(worst, dev)
    return CheckResult("realified-vs-complex-oracle", worst <= 1e-8,
                       f"max Frobenius deviation = {worst:.2e}")


def _check_gradient_fd(rng) -> CheckResult:
    cfg = preset_config("5.1")
    gens = build_generators(cfg.params)
    x0 = realify(cfg.rho0)
    N = 40
    grid = ControlGrid(0.5, rng.uniform(-2, 2, N), rng.uniform(0, 1, N),
                       rng.uniform(0, 1, N))
    cells = list(rng.choice(N, size=8, replace=False))
    worst = 0.0
    for objective in (Objective.distance(cfg.rho_target),
                      Objective.overlap(cfg.rho_target)):
        counter = CauchyCounter()
        fwd = forward_solve(gens, grid, x0, FD_INTEGRATOR, counter)
        adj = adjoint_solve(gens, grid, objective, fwd, FD_INTEGRATOR, counter)
        grad = gradient(gens, grid, objective, fwd, adj)
        for channel, g in (("u", grad.gu), ("n1", grad.gn1), ("n2", grad.gn2)):
            fd = fd_gradient(gens, grid, objective, x0, channel, cells)
            # per-cell error relative to the channel's gradient magnitude;
            # the probe carries an absolute noise floor of a few 1e-9, so
            # strictly relative comparison is meaningless at zero crossings
            scale = max(np.abs(g).max(), np.abs(fd).max())
            for j, i in enumerate(cells):
                worst = max(worst, abs(fd[j] - g[i]) / scale)
    return CheckResult("adjoint-gradient-vs-finite-differences",
                       worst <= 1e-4, f"max scale-relative error = {worst:.2e}")


def _check_trajectory_invariants() -> CheckResult:
    cfg = preset_config("5.1")
    gens = build_generators(cfg.params)
    traj = forward_solve(gens, cfg.initial_control(), realify(cfg.rho0),
                         cfg.integrator_config(), CauchyCounter())
    drift = np.abs(traj.states[:, 0] + traj.states[:, 5]
                   + traj.states[:, 8] - 1.0).max()
    eigmin = min(np.linalg.eigvalsh(derealify(x)).min()
                 for x in traj.cell_boundary_states())
    ok = drift <= 1e-9 and eigmin >= -1e-7
    return CheckResult("trajectory-trace-and-positivity", ok,
                       f"trace drift {drift:.2e}, min eigenvalue {eigmin:.2e}")


def _check_krotov_descent() -> CheckResult:
    cfg = replace(preset_config("5.3"), N=200, max_iters=20, method="rkm")
    report = run("rkm", cfg.problem(), cfg.initial_control(),
                 cfg.gpm_config(), cfg.integrator_config())
    rises = np.diff(report.objective_history)
    worst = float(rises.max()) if rises.size else 0.0
    return CheckResult("krotov-monotonic-descent", worst <= 1e-9,
                       f"largest objective increase = {worst:.2e}")


def run_validation(corrupt_generators: bool = False,
                   verbose: bool = True) -> list[CheckResult]:
    """Run every check; returns the results (all must pass for a clean bill)."""
    rng = np.random.default_rng(20240917)
    results = [
        _check_generator_trace(rng),
        _check_oracle_equivalence(rng, corrupt_generators),
        _check_gradient_fd(rng),
        _check_trajectory_invariants(),
        _check_krotov_descent(),
    ]
    if verbose:
        for r in results:
            tag = "PASS" if r.passed else "FAIL"
            print(f"{r.name}: {tag} ({r.detail})")
    return results
