"""Built-in scenario presets.

All presets share the level structure E2 = 1, E3 = 2.5 and couplings
V13 = 1, V23 = 1.7.  The steering presets ("5.1", "5.2*") minimize the
squared Hilbert-Schmidt distance to the target; preset "5.3" maximizes the
overlap with a mixed target.  Each preset carries the step and momentum
parameters used for its reference run; the method field is a default and
can be overridden per run.
"""

from __future__ import annotations

from dataclasses import replace

import numpy as np

from .config import ScenarioConfig
from .model import ControlBounds, SystemParams

__all__ = ["PRESET_NAMES", "preset_config"]


def _diag(*entries) -> np.ndarray:
    return np.diag(entries).astype(complex)


def _base(C13, C23, rho0, rho_target, T, mu, n_max, objective, u0,
          alpha, beta, theta, eps_stop, N=1000, method="gpm3",
          max_iters=20000) -> ScenarioConfig:
    return ScenarioConfig(
        params=SystemParams(E2=1.0, E3=2.5, V13=1.0, V23=1.7,
                            C13=C13, C23=C23),
        rho0=rho0,
        rho_target=rho_target,
        T=T,
        N=N,
        bounds=ControlBounds.compact(mu, n_max),
        objective_kind=objective,
        u0=u0,
        n1_0=0.0,
        n2_0=0.0,
        method=method,
        alpha=alpha,
        beta=beta,
        theta=theta,
        eps_stop=eps_stop,
        max_iters=max_iters,
    )


def _build_presets() -> dict[str, ScenarioConfig]:
    # Steering between states with different spectra.
    p51 = _base(C13=0.5, C23=0.3,
                rho0=_diag(0.8, 0.0, 0.2), rho_target=_diag(0.5, 0.3, 0.2),
                T=0.5, mu=50.0, n_max=10.0, objective="distance", u0=1.0,
                alpha=1.0, beta=0.75, theta=0.1, eps_stop=1e-6)
    # Steering between states sharing a spectrum (permuted populations).
    p52a = _base(C13=0.5, C23=0.5,
                 rho0=_diag(0.1, 0.2, 0.7), rho_target=_diag(0.2, 0.7, 0.1),
                 T=0.5, mu=50.0, n_max=20.0, objective="distance", u0=0.5,
                 alpha=1.0, beta=0.75, theta=0.1, eps_stop=1e-6)
    p52b = replace(p52a, u0=2.0)
    # Overlap maximization against a mixed target.
    p53 = _base(C13=0.7, C23=0.7,
                rho0=_diag(0.5, 0.3, 0.2), rho_target=_diag(0.3, 0.7, 0.0),
                T=7.0, mu=50.0, n_max=10.0, objective="overlap", u0=0.5,
                alpha=3.0, beta=0.75, theta=0.1, eps_stop=1e-3)
    return {
        "5.1": p51,
        "5.1-alpha5": replace(p51, alpha=5.0),
        "5.2a": p52a,
        "5.2b": p52b,
        "5.2-nmax4": replace(p52b, bounds=ControlBounds.compact(50.0, 4.0)),
        "5.2-nmax2-T1": replace(p52b, bounds=ControlBounds.compact(50.0, 2.0),
                                T=1.0, beta=0.85),
        "5.3": p53,
    }


_PRESETS = _build_presets()
PRESET_NAMES = tuple(sorted(_PRESETS))


def preset_config(name: str) -> ScenarioConfig:
    """Look up a preset by name; raises KeyError listing the known names."""
    try:
        return _PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; available: "
                       f"{', '.join(PRESET_NAMES)}") from None
