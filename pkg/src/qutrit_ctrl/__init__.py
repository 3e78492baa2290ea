"""Optimal control of an open qutrit with coherent and incoherent controls.

The density matrix of a three-level system with allowed transitions 1<->3
and 2<->3 is parameterized by a real 9-vector, turning the GKSL master
equation into a bilinear real ODE system.  The package provides the
forward dynamics with an independent complex-space oracle, adjoint-based
gradients of two terminal objectives (Hilbert-Schmidt overlap with, and
squared distance to, a target state), one- to three-step projected
gradient methods, a regularized first-order Krotov method, state metrics
(entropy, purity, Renyi relative entropy), and a CLI harness with scenario
presets and CSV outputs.
"""

from .model import (BETA_WEIGHTS, ControlBounds, ControlGrid, Generators,
                    InvalidStateError, Objective, SystemParams,
                    build_generators, derealify, overlap_bound, realify,
                    validate_density_matrix, validate_real_state)
from .dynamics import (CauchyCounter, DEFAULT_INTEGRATOR, IntegrationError,
                       IntegratorConfig, Trajectory, cauchy_count,
                       complex_oracle_solve, forward_solve,
                       reset_cauchy_count)
from .adjoint import (AdjointTrajectory, ControlGradient, adjoint_solve,
                      gradient, switching_series, switching_values,
                      switching_values_bilinear, transversality)
from .optimizers import (METHODS, ControlProblem, GpmConfig, RunReport,
                         gpm1_step, gpm2_step, gpm3_step, project, rkm_step,
                         run)
from .metrics import (MetricSeries, eval_objective, hs_distance_sq,
                      petz_renyi, purity, trajectory_metrics,
                      von_neumann_entropy)
from .config import ConfigError, ScenarioConfig, load_config
from .presets import PRESET_NAMES, preset_config
from .sweep import run_beta_sweep
from .validate import fd_gradient, run_validation

__version__ = "0.1.0"

__all__ = [
    "BETA_WEIGHTS", "ControlBounds", "ControlGrid", "Generators",
    "InvalidStateError", "Objective", "SystemParams", "build_generators",
    "derealify", "overlap_bound", "realify", "validate_density_matrix",
    "validate_real_state",
    "CauchyCounter", "DEFAULT_INTEGRATOR", "IntegrationError",
    "IntegratorConfig", "Trajectory", "cauchy_count", "complex_oracle_solve",
    "forward_solve", "reset_cauchy_count",
    "AdjointTrajectory", "ControlGradient", "adjoint_solve", "gradient",
    "switching_series", "switching_values", "switching_values_bilinear",
    "transversality",
    "METHODS", "ControlProblem", "GpmConfig", "RunReport", "gpm1_step",
    "gpm2_step", "gpm3_step", "project", "rkm_step", "run",
    "MetricSeries", "eval_objective", "hs_distance_sq", "petz_renyi",
    "purity", "trajectory_metrics", "von_neumann_entropy",
    "ConfigError", "ScenarioConfig", "load_config",
    "PRESET_NAMES", "preset_config",
    "run_beta_sweep",
    "fd_gradient", "run_validation",
    "__version__",
]
