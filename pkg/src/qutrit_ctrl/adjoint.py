"""Adjoint (costate) solve, switching functions, and objective gradients.

The costate y obeys the transposed linear system backward in time,

    ydot = -(A + B_u u + sum B_nj nj)^T y,    y(T) = -grad F(x(T)),

where F is the terminal cost.  The L2 gradient of the objective with
respect to each control channel is the negative of the corresponding
switching value K^c(y, x) = <y, B_c x>; restricted to piecewise-constant
controls this becomes minus the cell average of K, which we take with
Simpson's rule on the exact mid/endpoint samples of both trajectories.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _dp45
from .dynamics import (CauchyCounter, DEFAULT_INTEGRATOR, IntegrationError,
                       IntegratorConfig, Trajectory, _module_counter,
                       _sample_times, cell_matrices, segment_derivatives)
from .model import ControlGrid, Generators, Objective, SystemParams

__all__ = [
    "AdjointTrajectory",
    "ControlGradient",
    "transversality",
    "adjoint_solve",
    "switching_values",
    "switching_values_bilinear",
    "switching_series",
    "gradient",
]

# An adjoint solution uses the same sampled-trajectory container as the
# state; it is not trace-normalized and is not a density matrix.
AdjointTrajectory = Trajectory


def transversality(objective: Objective, xT: np.ndarray) -> np.ndarray:
    """Terminal costate y(T) = -grad F(x(T)) for the active objective.

    For the overlap objective this is beta o x_target (state-independent);
    for the squared-distance objective it is -2 beta o (x(T) - x_target).
    """
    beta = objective.beta_weights
    if objective.kind == "overlap":
        return beta * objective.x_target
    xT = np.asarray(xT, dtype=float)
    return -2.0 * beta * (xT - objective.x_target)


def adjoint_solve(gens: Generators, grid: ControlGrid, objective: Objective,
                  fwd: Trajectory,
                  cfg: IntegratorConfig = DEFAULT_INTEGRATOR,
                  counter: CauchyCounter | None = None) -> AdjointTrajectory:
    """Solve the costate system backward from the transversality condition.

    Implemented as a forward integration of z(s) = y(T - s), which obeys
    zdot = +M(T - s)^T z with the control cells in reverse order, so the
    same piecewise integrator applies.  Counts one Cauchy problem.
    """
    yT = transversality(objective, fwd.final_state)
    mats = cell_matrices(gens, grid)
    rev = np.ascontiguousarray(mats[::-1].transpose(0, 2, 1))
    z, status, t_fail = _dp45.propagate_linear(
        rev, grid.dt, np.ascontiguousarray(yT), cfg.rel_tol, cfg.abs_tol,
        cfg.max_step_value)
    (counter or _module_counter).bump()
    if status != _dp45.STATUS_OK:
        raise IntegrationError(grid.T - t_fail)
    states = z[::-1].copy()
    # ydot = -M(t)^T y on the forward time axis
    derivs = segment_derivatives(states, -mats.transpose(0, 2, 1))
    return Trajectory(times=_sample_times(grid.T, grid.N), states=states,
                      derivs=derivs)


def switching_values(xt: np.ndarray, yt: np.ndarray,
                     params: SystemParams) -> tuple[float, float, float]:
    """The three switching values (K_u, K_n1, K_n2) at a state/costate pair.

    Evaluated from the expanded componentwise polynomials; agrees with the
    bilinear forms <y, B_c x> of :func:`switching_values_bilinear`.
    """
    x1, x2, x3, x4, x5, x6, x7, x8, x9 = np.asarray(xt, dtype=float)
    y1, y2, y3, y4, y5, y6, y7, y8, y9 = np.asarray(yt, dtype=float)
    V13, V23 = params.V13, params.V23
    g1 = params.C13 * V13 ** 2
    g2 = params.C23 * V23 ** 2
    ku = (V13 * (-2 * x5 * y1 - x8 * y2 - x7 * y3 + x1 * y5 - x9 * y5
                 + x3 * y7 + x2 * y8 + 2 * x5 * y9)
          + V23 * (-x5 * y2 + x4 * y3 - x3 * y4 + x2 * y5 - 2 * x8 * y6
                   + x6 * y8 - x9 * y8 + 2 * x8 * y9))
    kn1 = -g1 * (-2 * x9 * y1 + x2 * y2 + x3 * y3 + 2 * x4 * y4 + 2 * x5 * y5
                 + x7 * y7 + x8 * y8 + 2 * x1 * (y1 - y9) + 2 * x9 * y9)
    kn2 = -g2 * (x2 * y2 + x3 * y3 + x4 * y4 + x5 * y5 + 2 * x6 * y6
                 - 2 * x9 * y6 + 2 * x7 * y7 + 2 * x8 * y8 - 2 * x6 * y9
                 + 2 * x9 * y9)
    return float(ku), float(kn1), float(kn2)


def switching_values_bilinear(xt: np.ndarray, yt: np.ndarray,
                              gens: Generators) -> tuple[float, float, float]:
    """(K_u, K_n1, K_n2) as the bilinear forms <y, B_c x>."""
    x = np.asarray(xt, dtype=float)
    y = np.asarray(yt, dtype=float)
    return (float(y @ (gens.Bu @ x)),
            float(y @ (gens.Bn1 @ x)),
            float(y @ (gens.Bn2 @ x)))


def switching_series(fwd: Trajectory, adj: AdjointTrajectory,
                     gens: Generators) -> np.ndarray:
    """Switching values at all shared sample times; shape (3, 2N+1)."""
    X = fwd.states
    Y = adj.states
    return np.stack([
        np.einsum("ti,ti->t", Y, X @ gens.Bu.T),
        np.einsum("ti,ti->t", Y, X @ gens.Bn1.T),
        np.einsum("ti,ti->t", Y, X @ gens.Bn2.T),
    ])


@dataclass(frozen=True)
class ControlGradient:
    """Cell-averaged gradient samples, one entry per control cell and channel."""

    gu: np.ndarray
    gn1: np.ndarray
    gn2: np.ndarray

    @property
    def N(self) -> int:
        return self.gu.shape[0]

    def stacked(self) -> np.ndarray:
        return np.stack([self.gu, self.gn1, self.gn2])


def _simpson_cells(samples: np.ndarray) -> np.ndarray:
    """Cell averages of a half-cell-sampled series via Simpson's rule."""
    return (samples[..., 0:-1:2] + 4.0 * samples[..., 1::2]
            + samples[..., 2::2]) / 6.0


def gradient(gens: Generators, grid: ControlGrid, objective: Objective,
             fwd: Trajectory, adj: AdjointTrajectory) -> ControlGradient:
    """L2 gradient of the objective restricted to the piecewise-constant grid.

    Per cell and channel this is minus the Simpson average of the switching
    value over the cell.  The costate must correspond to the given forward
    trajectory and objective; its terminal value is checked against the
    transversality formula.
    """
    yT_expected = transversality(objective, fwd.final_state)
    if not np.allclose(adj.final_state, yT_expected, rtol=0.0, atol=1e-10):
        raise ValueError("costate terminal value does not match the objective")
    if fwd.states.shape != adj.states.shape:
        raise ValueError("state and costate trajectories use different grids")
    K = switching_series(fwd, adj, gens)
    avg = _simpson_cells(K)
    return ControlGradient(gu=-avg[0], gn1=-avg[1], gn2=-avg[2])
