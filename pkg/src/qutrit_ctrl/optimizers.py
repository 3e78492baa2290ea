"""Projected gradient methods and the regularized first-order Krotov method.

Three explicit methods share the projected update

    c_{k+1} = Pr_Q(c_k - alpha grad + beta (c_k - c_{k-1})
                                     + theta (c_{k-1} - c_{k-2})),

with one, two or three retained iterates (beta = theta = 0, theta = 0, or
all terms).  The multi-step methods bootstrap through the lower-order ones.
The Krotov update is implicit: the new trajectory is solved with
state-feedback controls Pr(c_k(t) + alpha K(y_k(t), x)), which cannot
increase the overlap objective; the returned control is the feedback law
sampled along the solved trajectory and averaged per cell.

All tuning parameters are fixed for a whole run; there is no line search.
A run stops once the objective drops to ``eps_stop`` or the iteration
limit is reached, and reports its cost as the number of solved Cauchy
problems (the initial-guess evaluation counts, after which every
iteration costs two: one costate solve plus one state solve).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _dp45
from .adjoint import (AdjointTrajectory, ControlGradient, adjoint_solve,
                      gradient)
from .dynamics import (CauchyCounter, DEFAULT_INTEGRATOR, IntegrationError,
                       IntegratorConfig, Trajectory, _module_counter,
                       _sample_times, cell_matrices, forward_solve,
                       segment_derivatives)
from .metrics import eval_objective
from .model import (ControlBounds, ControlGrid, Generators, Objective,
                    SystemParams, build_generators, realify)

__all__ = [
    "METHODS",
    "GpmConfig",
    "RunReport",
    "ControlProblem",
    "project",
    "gpm1_step",
    "gpm2_step",
    "gpm3_step",
    "rkm_step",
    "run",
]

METHODS = ("gpm1", "gpm2", "gpm3", "rkm")


@dataclass(frozen=True)
class GpmConfig:
    """Fixed algorithmic parameters of a run.

    alpha is the step size; beta and theta are the first and second
    momentum coefficients (used by the two- and three-step methods and
    ignored by the others); eps_stop is the stopping threshold on the
    objective value; max_iters bounds the number of evaluated iterates
    including the initial guess (max_iters = 1 evaluates the guess and
    stops).
    """

    alpha: float
    beta: float = 0.0
    theta: float = 0.0
    eps_stop: float = 1e-6
    max_iters: int = 10000

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.beta < 0 or self.theta < 0:
            raise ValueError("momentum coefficients must be nonnegative")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")


@dataclass
class RunReport:
    """Outcome of an optimization run.

    objective_history[k] is the objective value of iterate k (index 0 is
    the initial guess); cauchy_history[k] is the cumulative number of
    solved Cauchy problems when that value became known.  final_control is
    the best iterate seen (the last one whenever the run converged).
    """

    method: str
    objective_history: np.ndarray
    cauchy_history: np.ndarray
    cauchy_problems: int
    final_control: ControlGrid
    converged: bool
    final_trajectory: Trajectory
    iterations: int

    @property
    def final_objective(self) -> float:
        return float(self.objective_history[-1])


@dataclass(frozen=True)
class ControlProblem:
    """Static data of one optimal-control problem instance."""

    params: SystemParams
    gens: Generators
    x0: np.ndarray
    objective: Objective
    bounds: ControlBounds

    @classmethod
    def build(cls, params: SystemParams, rho0: np.ndarray,
              objective: Objective, bounds: ControlBounds) -> "ControlProblem":
        x0 = realify(rho0)
        x0.setflags(write=False)
        return cls(params=params, gens=build_generators(params), x0=x0,
                   objective=objective, bounds=bounds)


def _clip_channels(u: np.ndarray, n1: np.ndarray, n2: np.ndarray,
                   bounds: ControlBounds):
    u_lo, u_hi = bounds.u_interval()
    n_lo, n_hi = bounds.n_interval()
    return (np.clip(u, u_lo, u_hi), np.clip(n1, n_lo, n_hi),
            np.clip(n2, n_lo, n_hi))


def project(c: ControlGrid, bounds: ControlBounds) -> ControlGrid:
    """Orthogonal projection onto the admissible set, cell by cell.

    The coherent channel is clamped to [-mu, mu] (left unchanged when
    unbounded); the incoherent channels are clamped to [0, n_max] (or just
    below at zero).  Idempotent and non-expansive per cell.
    """
    u, n1, n2 = _clip_channels(c.u, c.n1, c.n2, bounds)
    return ControlGrid(c.T, u, n1, n2)


def gpm1_step(c: ControlGrid, grad: ControlGradient, cfg: GpmConfig,
              bounds: ControlBounds) -> ControlGrid:
    """One-step projected gradient update: Pr_Q(c - alpha grad)."""
    u = c.u - cfg.alpha * grad.gu
    n1 = c.n1 - cfg.alpha * grad.gn1
    n2 = c.n2 - cfg.alpha * grad.gn2
    u, n1, n2 = _clip_channels(u, n1, n2, bounds)
    return ControlGrid(c.T, u, n1, n2)


def gpm2_step(c: ControlGrid, c_prev: ControlGrid, grad: ControlGradient,
              cfg: GpmConfig, bounds: ControlBounds) -> ControlGrid:
    """Two-step (heavy-ball) update: adds beta (c - c_prev) inside the projection."""
    u = c.u - cfg.alpha * grad.gu
    n1 = c.n1 - cfg.alpha * grad.gn1
    n2 = c.n2 - cfg.alpha * grad.gn2
    if cfg.beta != 0.0:
        u = u + cfg.beta * (c.u - c_prev.u)
        n1 = n1 + cfg.beta * (c.n1 - c_prev.n1)
        n2 = n2 + cfg.beta * (c.n2 - c_prev.n2)
    u, n1, n2 = _clip_channels(u, n1, n2, bounds)
    return ControlGrid(c.T, u, n1, n2)


def gpm3_step(c: ControlGrid, c_prev: ControlGrid, c_prev2: ControlGrid,
              grad: ControlGradient, cfg: GpmConfig,
              bounds: ControlBounds) -> ControlGrid:
    """Three-step update: adds theta (c_prev - c_prev2) on top of the heavy ball."""
    u = c.u - cfg.alpha * grad.gu
    n1 = c.n1 - cfg.alpha * grad.gn1
    n2 = c.n2 - cfg.alpha * grad.gn2
    if cfg.beta != 0.0:
        u = u + cfg.beta * (c.u - c_prev.u)
        n1 = n1 + cfg.beta * (c.n1 - c_prev.n1)
        n2 = n2 + cfg.beta * (c.n2 - c_prev.n2)
    if cfg.theta != 0.0:
        u = u + cfg.theta * (c_prev.u - c_prev2.u)
        n1 = n1 + cfg.theta * (c_prev.n1 - c_prev2.n1)
        n2 = n2 + cfg.theta * (c_prev.n2 - c_prev2.n2)
    u, n1, n2 = _clip_channels(u, n1, n2, bounds)
    return ControlGrid(c.T, u, n1, n2)


def rkm_step(c: ControlGrid, adj: AdjointTrajectory, alpha: float,
             bounds: ControlBounds, gens: Generators, x0: np.ndarray,
             cfg: IntegratorConfig = DEFAULT_INTEGRATOR,
             counter: CauchyCounter | None = None
             ) -> tuple[ControlGrid, Trajectory]:
    """Implicit Krotov update for the overlap objective.

    Integrates the state equation with feedback controls
    Pr(c(t) + alpha K(y(t), x)) evaluated on the trajectory being solved,
    then returns that trajectory together with the feedback law sampled
    along it (Simpson-averaged per cell, which stays inside the bounds by
    convexity).  Counts one Cauchy problem and cannot increase the overlap
    objective beyond integration error.
    """
    u_lo, u_hi = bounds.u_interval()
    _, n_hi = bounds.n_interval()
    states, fb, status, t_fail = _dp45.propagate_feedback(
        gens.A, gens.Bu, gens.Bn1, gens.Bn2, c.u, c.n1, c.n2, c.dt,
        np.ascontiguousarray(np.asarray(x0, dtype=float)),
        adj.states, adj.derivs, alpha, u_lo, u_hi, n_hi,
        cfg.rel_tol, cfg.abs_tol, cfg.max_step_value)
    (counter or _module_counter).bump()
    if status != _dp45.STATUS_OK:
        raise IntegrationError(t_fail)
    avg = (fb[:, :, 0] + 4.0 * fb[:, :, 1] + fb[:, :, 2]) / 6.0
    c_next = ControlGrid(c.T, avg[:, 0], avg[:, 1], avg[:, 2])
    mats = cell_matrices(gens, c_next)
    traj = Trajectory(times=_sample_times(c.T, c.N), states=states,
                      derivs=segment_derivatives(states, mats))
    return c_next, traj


def run(method: str, problem: ControlProblem, c0: ControlGrid,
        cfg: GpmConfig, integrator: IntegratorConfig = DEFAULT_INTEGRATOR,
        counter: CauchyCounter | None = None,
        trajectory_hook=None) -> RunReport:
    """Iterate the selected method until the objective reaches eps_stop.

    The forward solve of each iterate doubles as its objective evaluation,
    so one iteration costs exactly two Cauchy problems (costate + state);
    the Krotov method reuses its implicit solve as the next iterate's
    trajectory in the same way.  ``trajectory_hook``, if given, is called
    with every state trajectory as it is produced (the acceptance suite
    uses it to check physical invariants).

    Hitting ``max_iters`` is reported, not raised: the report carries
    ``converged=False`` and the best control seen.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    if method == "rkm" and problem.objective.kind != "overlap":
        raise ValueError("the Krotov update applies to the overlap objective only")
    counter = counter if counter is not None else CauchyCounter()
    start_count = counter.count

    c = project(c0, problem.bounds)
    fwd = forward_solve(problem.gens, c, problem.x0, integrator, counter)
    if trajectory_hook is not None:
        trajectory_hook(fwd)
    J = eval_objective(problem.objective, fwd.final_state)

    history = [J]
    counts = [counter.count - start_count]
    best_J, best_c = J, c
    c_prev: ControlGrid | None = None
    c_prev2: ControlGrid | None = None
    iterations = 0

    while J > cfg.eps_stop and len(history) < cfg.max_iters:
        adj = adjoint_solve(problem.gens, c, problem.objective, fwd,
                            integrator, counter)
        if method == "rkm":
            c_next, fwd_next = rkm_step(c, adj, cfg.alpha, problem.bounds,
                                        problem.gens, problem.x0, integrator,
                                        counter)
        else:
            grad = gradient(problem.gens, c, problem.objective, fwd, adj)
            if method == "gpm1" or c_prev is None:
                c_next = gpm1_step(c, grad, cfg, problem.bounds)
            elif method == "gpm2" or c_prev2 is None:
                c_next = gpm2_step(c, c_prev, grad, cfg, problem.bounds)
            else:
                c_next = gpm3_step(c, c_prev, c_prev2, grad, cfg,
                                   problem.bounds)
            fwd_next = forward_solve(problem.gens, c_next, problem.x0,
                                     integrator, counter)
        if trajectory_hook is not None:
            trajectory_hook(fwd_next)
        c_prev2, c_prev, c = c_prev, c, c_next
        fwd = fwd_next
        J = eval_objective(problem.objective, fwd.final_state)
        history.append(J)
        counts.append(counter.count - start_count)
        if J < best_J:
            best_J, best_c = J, c
        iterations += 1

    converged = J <= cfg.eps_stop
    return RunReport(
        method=method,
        objective_history=np.asarray(history),
        cauchy_history=np.asarray(counts),
        cauchy_problems=counter.count - start_count,
        final_control=c if converged else best_c,
        converged=converged,
        final_trajectory=fwd,
        iterations=iterations,
    )
