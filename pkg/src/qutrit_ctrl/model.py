"""Domain types for the open-qutrit control problem.

A three-level system with allowed transitions 1<->3 and 2<->3 evolves under
a GKSL master equation with a scalar coherent control u(t) in the
Hamiltonian and two nonnegative incoherent controls n1(t), n2(t) scaling
the decoherence rates.  Hermitian density matrices are stored as real
9-vectors

    x = (rho11, Re rho12, Im rho12, Re rho13, Im rho13,
         rho22, Re rho23, Im rho23, rho33),

which turns the master equation into the bilinear real system

    xdot = (A + B_u u(t) + B_n1 n1(t) + B_n2 n2(t)) x.

This module holds the value types (system parameters, control grids and
bounds, objectives), the rho <-> x maps, and the assembly of the four
constant 9x9 generator matrices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "BETA_WEIGHTS",
    "SystemParams",
    "Generators",
    "ControlGrid",
    "ControlBounds",
    "Objective",
    "realify",
    "derealify",
    "build_generators",
    "overlap_bound",
    "validate_density_matrix",
    "validate_real_state",
]

# Weights that make the 9-vector inner products reproduce Hilbert-Schmidt
# inner products of the corresponding Hermitian matrices (off-diagonal
# components appear twice in a 3x3 matrix).
BETA_WEIGHTS = np.array([1.0, 2.0, 2.0, 2.0, 2.0, 1.0, 2.0, 2.0, 1.0])
BETA_WEIGHTS.setflags(write=False)

HERMITICITY_TOL = 1e-9
TRACE_TOL = 1e-9
EIGENVALUE_TOL = 1e-8


class InvalidStateError(ValueError):
    """A matrix or 9-vector violates the density-matrix invariants."""


@dataclass(frozen=True)
class SystemParams:
    """Physical constants of the three-level system (hbar = 1 units).

    E2, E3 are the energies of levels 2 and 3 (level 1 sits at zero);
    V13, V23 are the real transition dipoles; C13, C23 are the nonnegative
    decay coefficients of the two allowed transitions.
    """

    E2: float
    E3: float
    V13: float
    V23: float
    C13: float
    C23: float

    def __post_init__(self):
        if self.C13 < 0 or self.C23 < 0:
            raise ValueError("decay coefficients C13, C23 must be nonnegative")


@dataclass(frozen=True)
class Generators:
    """The constant matrices of the bilinear system xdot = (A + B_u u + sum B_nj nj) x."""

    A: np.ndarray
    Bu: np.ndarray
    Bn1: np.ndarray
    Bn2: np.ndarray

    def __post_init__(self):
        for M in (self.A, self.Bu, self.Bn1, self.Bn2):
            if M.shape != (9, 9):
                raise ValueError("generator matrices must be 9x9")
            M.setflags(write=False)


@dataclass(frozen=True)
class ControlBounds:
    """Admissible control set per time instant.

    With both ``mu`` and ``n_max`` set this is the compact box
    [-mu, mu] x [0, n_max]^2; with both None it is the half-unbounded set
    R x [0, inf)^2 (the sign constraint on the incoherent controls is
    physical and always active).
    """

    mu: float | None = None
    n_max: float | None = None

    def __post_init__(self):
        if (self.mu is None) != (self.n_max is None):
            raise ValueError("mu and n_max must be both set (compact box) or both None")
        if self.mu is not None and (self.mu <= 0 or self.n_max <= 0):
            raise ValueError("mu and n_max must be positive")

    @classmethod
    def compact(cls, mu: float, n_max: float) -> "ControlBounds":
        return cls(mu=mu, n_max=n_max)

    @classmethod
    def half_unbounded(cls) -> "ControlBounds":
        return cls()

    @property
    def is_compact(self) -> bool:
        return self.mu is not None

    @property
    def kind(self) -> str:
        return "compact" if self.is_compact else "half-unbounded"

    def u_interval(self) -> tuple[float, float]:
        if self.is_compact:
            return (-self.mu, self.mu)
        return (-np.inf, np.inf)

    def n_interval(self) -> tuple[float, float]:
        return (0.0, self.n_max if self.is_compact else np.inf)


@dataclass(frozen=True)
class ControlGrid:
    """Piecewise-constant controls (u, n1, n2) on N uniform cells over [0, T].

    The i-th entry of each vector is the constant value on
    [i*T/N, (i+1)*T/N).  Construction checks only shape consistency; the
    physical constraints (n >= 0, box bounds) are asserted by
    :meth:`validate` because optimizer intermediates pass through this
    container before projection.
    """

    T: float
    u: np.ndarray
    n1: np.ndarray
    n2: np.ndarray

    def __post_init__(self):
        u = np.ascontiguousarray(np.asarray(self.u, dtype=float))
        n1 = np.ascontiguousarray(np.asarray(self.n1, dtype=float))
        n2 = np.ascontiguousarray(np.asarray(self.n2, dtype=float))
        for name, v in (("u", u), ("n1", n1), ("n2", n2)):
            if v.ndim != 1:
                raise ValueError(f"control vector {name} must be 1-d")
        if not (u.shape == n1.shape == n2.shape):
            raise ValueError("u, n1, n2 must have the same length")
        if u.shape[0] < 1:
            raise ValueError("need at least one control cell")
        if self.T <= 0:
            raise ValueError("final time T must be positive")
        for v in (u, n1, n2):
            v.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "n1", n1)
        object.__setattr__(self, "n2", n2)

    @classmethod
    def constant(cls, T: float, N: int, u: float, n1: float = 0.0,
                 n2: float = 0.0) -> "ControlGrid":
        """Constant-in-time control triple on N cells."""
        return cls(T, np.full(N, float(u)), np.full(N, float(n1)),
                   np.full(N, float(n2)))

    @property
    def N(self) -> int:
        return self.u.shape[0]

    @property
    def dt(self) -> float:
        return self.T / self.N

    def cell_times(self) -> np.ndarray:
        """Left edges of the control cells."""
        return np.arange(self.N) * self.dt

    def validate(self, bounds: ControlBounds | None = None) -> None:
        """Raise if the physical constraints (and optionally the box) fail."""
        if self.n1.min() < 0 or self.n2.min() < 0:
            raise ValueError("incoherent controls must be nonnegative")
        if bounds is not None and bounds.is_compact:
            if np.abs(self.u).max() > bounds.mu:
                raise ValueError(f"|u| exceeds mu = {bounds.mu}")
            if max(self.n1.max(), self.n2.max()) > bounds.n_max:
                raise ValueError(f"an incoherent control exceeds n_max = {bounds.n_max}")


@dataclass(frozen=True)
class Objective:
    """Terminal objective, either of

    - ``overlap``:  b - <x(T), beta o x_target>, the realified form of
      b - Tr(rho(T) rho_target), with b the largest eigenvalue of the
      target (the attainable maximum of the overlap);
    - ``distance``: sum_j beta_j (x_j(T) - x_target_j)^2, the realified
      squared Hilbert-Schmidt distance to the target.

    Both are minimized.
    """

    kind: str
    x_target: np.ndarray
    b: float | None = None
    beta_weights: np.ndarray = field(default=BETA_WEIGHTS, repr=False)

    def __post_init__(self):
        if self.kind not in ("overlap", "distance"):
            raise ValueError(f"unknown objective kind {self.kind!r}")
        xt = np.ascontiguousarray(np.asarray(self.x_target, dtype=float))
        if xt.shape != (9,):
            raise ValueError("x_target must be a 9-vector")
        xt.setflags(write=False)
        object.__setattr__(self, "x_target", xt)
        if self.kind == "overlap":
            if self.b is None:
                raise ValueError("overlap objective requires the bound b")
            expected = overlap_bound(derealify(xt))
            if abs(self.b - expected) > 1e-12:
                raise ValueError(
                    f"b = {self.b} is not the largest target eigenvalue {expected}")

    @classmethod
    def overlap(cls, rho_target: np.ndarray) -> "Objective":
        xt = realify(rho_target)
        return cls("overlap", xt, b=overlap_bound(rho_target))

    @classmethod
    def distance(cls, rho_target: np.ndarray) -> "Objective":
        return cls("distance", realify(rho_target))


def realify(rho: np.ndarray) -> np.ndarray:
    """Map a Hermitian 3x3 matrix to its real 9-vector parameterization.

    Rejects matrices whose Hermiticity defect exceeds 1e-9.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (3, 3):
        raise ValueError("expected a 3x3 matrix")
    defect = np.abs(rho - rho.conj().T).max()
    if defect > HERMITICITY_TOL:
        raise InvalidStateError(f"matrix is not Hermitian (defect {defect:.3e})")
    return np.array([
        rho[0, 0].real,
        rho[0, 1].real, rho[0, 1].imag,
        rho[0, 2].real, rho[0, 2].imag,
        rho[1, 1].real,
        rho[1, 2].real, rho[1, 2].imag,
        rho[2, 2].real,
    ])


def derealify(x: np.ndarray) -> np.ndarray:
    """Inverse of :func:`realify`; accepts any real 9-vector."""
    x = np.asarray(x, dtype=float)
    if x.shape != (9,):
        raise ValueError("expected a 9-vector")
    return np.array([
        [x[0], x[1] + 1j * x[2], x[3] + 1j * x[4]],
        [x[1] - 1j * x[2], x[5], x[6] + 1j * x[7]],
        [x[3] - 1j * x[4], x[6] - 1j * x[7], x[8]],
    ])


def validate_density_matrix(rho: np.ndarray,
                            hermiticity_tol: float = 1e-12,
                            trace_tol: float = TRACE_TOL,
                            eig_tol: float = EIGENVALUE_TOL) -> None:
    """Raise InvalidStateError unless rho is Hermitian, unit-trace and PSD."""
    rho = np.asarray(rho, dtype=complex)
    defect = np.abs(rho - rho.conj().T).max()
    if defect > hermiticity_tol:
        raise InvalidStateError(f"Hermiticity defect {defect:.3e} > {hermiticity_tol:.1e}")
    tr = rho.trace().real
    if abs(tr - 1.0) > trace_tol:
        raise InvalidStateError(f"trace deviates from 1 by {abs(tr - 1.0):.3e}")
    lam_min = np.linalg.eigvalsh(rho).min()
    if lam_min < -eig_tol:
        raise InvalidStateError(f"smallest eigenvalue {lam_min:.3e} < -{eig_tol:.1e}")


def validate_real_state(x: np.ndarray, **tols) -> None:
    """Validate a 9-vector as a realified density matrix (trace + PSD)."""
    x = np.asarray(x, dtype=float)
    if abs(x[0] + x[5] + x[8] - 1.0) > tols.get("trace_tol", TRACE_TOL):
        raise InvalidStateError("x1 + x6 + x9 deviates from 1")
    validate_density_matrix(derealify(x), **tols)


def overlap_bound(rho_target: np.ndarray) -> float:
    """Largest eigenvalue of the target state: the attainable maximum of
    Tr(rho rho_target) over density matrices rho."""
    return float(np.linalg.eigvalsh(np.asarray(rho_target, dtype=complex)).max())


def build_generators(params: SystemParams) -> Generators:
    """Assemble A, B_u, B_n1, B_n2 of the realified bilinear system.

    Entries are read off the componentwise equations of motion; g1 and g2
    abbreviate C13*V13^2 and C23*V23^2.  Rows are d/dt of
    (x1..x9), columns multiply (x1..x9).
    """
    E2, E3 = params.E2, params.E3
    V13, V23 = params.V13, params.V23
    g1 = params.C13 * V13 ** 2
    g2 = params.C23 * V23 ** 2

    A = np.zeros((9, 9))
    Bu = np.zeros((9, 9))
    Bn1 = np.zeros((9, 9))
    Bn2 = np.zeros((9, 9))

    # drift: free rotation of the coherences plus spontaneous decay
    A[0, 8] = 2 * g1
    A[1, 2] = -E2
    A[2, 1] = E2
    A[3, 3] = -(g1 + g2)
    A[3, 4] = -E3
    A[4, 3] = E3
    A[4, 4] = -(g1 + g2)
    A[5, 8] = 2 * g2
    A[6, 6] = -(g1 + g2)
    A[6, 7] = E2 - E3
    A[7, 6] = E3 - E2
    A[7, 7] = -(g1 + g2)
    A[8, 8] = -2 * (g1 + g2)

    # coherent channel
    Bu[0, 4] = -2 * V13
    Bu[1, 4] = -V23
    Bu[1, 7] = -V13
    Bu[2, 3] = V23
    Bu[2, 6] = -V13
    Bu[3, 2] = -V23
    Bu[4, 0] = V13
    Bu[4, 1] = V23
    Bu[4, 8] = -V13
    Bu[5, 7] = -2 * V23
    Bu[6, 2] = V13
    Bu[7, 1] = V13
    Bu[7, 5] = V23
    Bu[7, 8] = -V23
    Bu[8, 4] = 2 * V13
    Bu[8, 7] = 2 * V23

    # incoherent channel 1 <-> 3
    Bn1[0, 0] = -2 * g1
    Bn1[0, 8] = 2 * g1
    Bn1[1, 1] = -g1
    Bn1[2, 2] = -g1
    Bn1[3, 3] = -2 * g1
    Bn1[4, 4] = -2 * g1
    Bn1[6, 6] = -g1
    Bn1[7, 7] = -g1
    Bn1[8, 0] = 2 * g1
    Bn1[8, 8] = -2 * g1

    # incoherent channel 2 <-> 3
    Bn2[1, 1] = -g2
    Bn2[2, 2] = -g2
    Bn2[3, 3] = -g2
    Bn2[4, 4] = -g2
    Bn2[5, 5] = -2 * g2
    Bn2[5, 8] = 2 * g2
    Bn2[6, 6] = -2 * g2
    Bn2[7, 7] = -2 * g2
    Bn2[8, 5] = 2 * g2
    Bn2[8, 8] = -2 * g2

    return Generators(A=A, Bu=Bu, Bn1=Bn1, Bn2=Bn2)
