"""Forward integration of the realified bilinear system.

The primary solver integrates the real 9-dimensional system cell by cell
with an adaptive Dormand-Prince 5(4) scheme, restarting at every control
cell so the piecewise-constant discontinuities are exact.  A second,
independent solver integrates the complex-space master equation directly
with :func:`scipy.integrate.solve_ivp`; it exists purely to cross-validate
the realified path and is never used inside optimization loops.

Method cost throughout the package is measured in solved Cauchy problems:
every initial-value integration over [0, T] (forward, adjoint, or the
implicit solve of the Krotov update) increments a counter by one, and the
evaluation of the initial guess counts.  Solvers accept an explicit
:class:`CauchyCounter`; without one they fall back to a module-level
counter exposed via :func:`cauchy_count` / :func:`reset_cauchy_count`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from . import _dp45
from .model import ControlGrid, Generators, SystemParams

__all__ = [
    "IntegratorConfig",
    "DEFAULT_INTEGRATOR",
    "Trajectory",
    "CauchyCounter",
    "IntegrationError",
    "forward_solve",
    "complex_oracle_solve",
    "cauchy_count",
    "reset_cauchy_count",
]


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances for the adaptive Runge-Kutta 5(4) integrator."""

    rel_tol: float = 1e-9
    abs_tol: float = 1e-11
    max_step: float | None = None
    method: str = "dp45"

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.method != "dp45":
            raise ValueError("only the Dormand-Prince 5(4) method is available")

    @property
    def max_step_value(self) -> float:
        return np.inf if self.max_step is None else self.max_step


DEFAULT_INTEGRATOR = IntegratorConfig()


class IntegrationError(RuntimeError):
    """Step-size underflow; carries the time at which integration stalled."""

    def __init__(self, t: float):
        super().__init__(f"integrator step size underflowed at t = {t:.6g}")
        self.t = t


class CauchyCounter:
    """Mutable tally of solved initial-value problems."""

    def __init__(self):
        self.count = 0

    def bump(self) -> None:
        self.count += 1

    def reset(self) -> None:
        self.count = 0

    def __repr__(self):
        return f"CauchyCounter({self.count})"


_module_counter = CauchyCounter()


def cauchy_count() -> int:
    """Number of Cauchy problems solved through the module-level counter."""
    return _module_counter.count


def reset_cauchy_count() -> None:
    _module_counter.reset()


@dataclass(frozen=True)
class Trajectory:
    """A solution sampled at every half-cell boundary, with a dense evaluator.

    ``times`` has length 2N+1 covering [0, T]; ``states`` holds the matching
    9-vectors; ``derivs[s]`` holds the time derivatives at both endpoints of
    segment s, computed with that segment's own control cell (the derivative
    jumps at cell boundaries, so segments do not share endpoint slopes).
    The same layout carries adjoint solutions, which reuse the 9-vector
    shape but are not density matrices.
    """

    times: np.ndarray
    states: np.ndarray
    derivs: np.ndarray

    def __post_init__(self):
        for a in (self.times, self.states, self.derivs):
            a.setflags(write=False)

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    @property
    def initial_state(self) -> np.ndarray:
        return self.states[0]

    def cell_boundary_times(self) -> np.ndarray:
        return self.times[::2]

    def cell_boundary_states(self) -> np.ndarray:
        return self.states[::2]

    def state_at(self, t) -> np.ndarray:
        """Cubic Hermite interpolation at time(s) t in [0, T]."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        tv = np.atleast_1d(t)
        hsub = self.times[1] - self.times[0]
        nseg = self.derivs.shape[0]
        j = np.clip((tv / hsub).astype(int), 0, nseg - 1)
        s = np.clip(tv / hsub - j, 0.0, 1.0)[:, None]
        h00 = (1 + 2 * s) * (1 - s) ** 2
        h10 = s * (1 - s) ** 2
        h01 = s ** 2 * (3 - 2 * s)
        h11 = s ** 2 * (s - 1)
        vals = (h00 * self.states[j] + h10 * hsub * self.derivs[j, 0]
                + h01 * self.states[j + 1] + h11 * hsub * self.derivs[j, 1])
        return vals[0] if scalar else vals


def cell_matrices(gens: Generators, grid: ControlGrid) -> np.ndarray:
    """Per-cell generators A + B_u u_i + B_n1 n1_i + B_n2 n2_i, shape (N, 9, 9)."""
    mats = (gens.A[None, :, :]
            + grid.u[:, None, None] * gens.Bu
            + grid.n1[:, None, None] * gens.Bn1
            + grid.n2[:, None, None] * gens.Bn2)
    return np.ascontiguousarray(mats)


def segment_derivatives(states: np.ndarray, mats: np.ndarray) -> np.ndarray:
    """Endpoint derivatives of every half-cell segment, using the owning cell's matrix."""
    N = mats.shape[0]
    tri = np.stack([states[0:-1:2], states[1::2], states[2::2]], axis=1)
    dtri = tri @ mats.transpose(0, 2, 1)
    derivs = np.empty((2 * N, 2, 9))
    derivs[0::2, 0] = dtri[:, 0]
    derivs[0::2, 1] = dtri[:, 1]
    derivs[1::2, 0] = dtri[:, 1]
    derivs[1::2, 1] = dtri[:, 2]
    return derivs


def _sample_times(T: float, N: int) -> np.ndarray:
    return np.linspace(0.0, T, 2 * N + 1)


def forward_solve(gens: Generators, grid: ControlGrid, x0: np.ndarray,
                  cfg: IntegratorConfig = DEFAULT_INTEGRATOR,
                  counter: CauchyCounter | None = None) -> Trajectory:
    """Integrate the realified system under piecewise-constant controls.

    Integration restarts at every cell boundary and additionally lands on
    every cell midpoint, so downstream quadrature uses exact samples.
    Counts one Cauchy problem.
    """
    grid.validate()
    x0 = np.ascontiguousarray(np.asarray(x0, dtype=float))
    if x0.shape != (9,):
        raise ValueError("x0 must be a 9-vector")
    mats = cell_matrices(gens, grid)
    states, status, t_fail = _dp45.propagate_linear(
        mats, grid.dt, x0, cfg.rel_tol, cfg.abs_tol, cfg.max_step_value)
    (counter or _module_counter).bump()
    if status != _dp45.STATUS_OK:
        raise IntegrationError(t_fail)
    return Trajectory(times=_sample_times(grid.T, grid.N), states=states,
                      derivs=segment_derivatives(states, mats))


def _hamiltonian_matrices(params: SystemParams):
    H0 = np.diag([0.0, params.E2, params.E3]).astype(complex)
    V = np.array([[0, 0, params.V13],
                  [0, 0, params.V23],
                  [params.V13, params.V23, 0]], dtype=complex)
    A13 = np.zeros((3, 3), dtype=complex)
    A13[0, 2] = params.V13
    A23 = np.zeros((3, 3), dtype=complex)
    A23[1, 2] = params.V23
    return H0, V, A13, A23


def complex_oracle_solve(params: SystemParams, grid: ControlGrid,
                         rho0: np.ndarray,
                         cfg: IntegratorConfig = DEFAULT_INTEGRATOR) -> np.ndarray:
    """Integrate the master equation directly in complex 3x3 matrix space.

    Validation-only reference path: independent of the realified generators
    (it applies the Hamiltonian commutator and the dissipator to rho), is
    driven by scipy's RK45, and does not touch the Cauchy counter.  Returns
    the states at the N+1 cell boundaries as an (N+1, 3, 3) complex array.
    """
    grid.validate()
    H0, V, A13, A23 = _hamiltonian_matrices(params)
    channels = ((params.C13, A13), (params.C23, A23))

    def rhs_for(u_i: float, n_i: tuple[float, float]):
        H = H0 + u_i * V

        def rhs(_t, y):
            rho = y.reshape(3, 3)
            d = -1j * (H @ rho - rho @ H)
            for (C, Aop), n in zip(channels, n_i):
                Ad = Aop.conj().T
                down = 2 * (Aop @ rho @ Ad) - (Ad @ Aop @ rho + rho @ Ad @ Aop)
                up = 2 * (Ad @ rho @ Aop) - (Aop @ Ad @ rho + rho @ Aop @ Ad)
                d = d + C * ((n + 1) * down + n * up)
            return d.ravel()

        return rhs

    rho = np.asarray(rho0, dtype=complex).copy()
    out = np.empty((grid.N + 1, 3, 3), dtype=complex)
    out[0] = rho
    dt = grid.dt
    for i in range(grid.N):
        sol = solve_ivp(rhs_for(grid.u[i], (grid.n1[i], grid.n2[i])),
                        (0.0, dt), rho.ravel(), method="RK45",
                        rtol=cfg.rel_tol, atol=cfg.abs_tol)
        if not sol.success:
            raise IntegrationError(i * dt)
        rho = sol.y[:, -1].reshape(3, 3)
        out[i + 1] = rho
    return out
