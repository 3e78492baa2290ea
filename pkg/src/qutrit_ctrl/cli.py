"""Command-line harness.

Subcommands:

  optimize    run one method on a preset or config file, write CSV outputs
  simulate    forward-only run of the initial guess, write dynamics.csv
  sweep-beta  momentum sweep of the two-step method over (alpha, beta)
  validate    self-validation suite

Exit codes: 0 success, 1 configuration or I/O error, 2 non-convergence.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import ConfigError, ScenarioConfig, load_config
from .dynamics import CauchyCounter, forward_solve
from .model import realify
from .optimizers import METHODS, run
from .presets import PRESET_NAMES, preset_config
from .reporting import (write_controls_csv, write_dynamics_csv,
                        write_history_csv, write_report_txt)
from .sweep import run_beta_sweep, write_sweep_csv, write_sweep_fit_txt
from .validate import run_validation

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NO_CONVERGENCE = 2


def _load_scenario(args) -> tuple[ScenarioConfig, str]:
    if args.preset is not None:
        cfg = preset_config(args.preset)
        name = args.preset
    else:
        cfg = load_config(args.config)
        name = Path(args.config).stem
    if getattr(args, "method", None):
        cfg = cfg.with_method(args.method)
    return cfg, name


def _output_dir(args, cfg: ScenarioConfig, name: str, suffix: str) -> Path:
    if args.out is not None:
        out = Path(args.out)
    elif cfg.output_dir is not None:
        out = Path(cfg.output_dir)
    else:
        out = Path("runs") / f"{name}-{suffix}"
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_optimize(args) -> int:
    cfg, name = _load_scenario(args)
    out = _output_dir(args, cfg, name, cfg.method)
    report = run(cfg.method, cfg.problem(), cfg.initial_control(),
                 cfg.gpm_config(), cfg.integrator_config())
    write_history_csv(out / "history.csv", report)
    write_controls_csv(out / "controls.csv", report.final_control)
    # describe the reported control's dynamics (re-solved outside run cost)
    traj = forward_solve(cfg.problem().gens, report.final_control,
                         realify(cfg.rho0), cfg.integrator_config(),
                         CauchyCounter())
    write_dynamics_csv(out / "dynamics.csv", traj, cfg.objective())
    write_report_txt(out / "report.txt", report, scenario_name=name)
    print(f"{name} [{cfg.method}]: "
          f"{'converged' if report.converged else 'NOT converged'} "
          f"after {report.iterations} iterations, "
          f"{report.cauchy_problems} Cauchy problems, "
          f"final objective {report.final_objective:.6g}")
    print(f"outputs in {out}")
    return EXIT_OK if report.converged else EXIT_NO_CONVERGENCE


def cmd_simulate(args) -> int:
    cfg, name = _load_scenario(args)
    out = _output_dir(args, cfg, name, "simulate")
    grid = cfg.initial_control()
    traj = forward_solve(cfg.problem().gens, grid, realify(cfg.rho0),
                         cfg.integrator_config())
    write_dynamics_csv(out / "dynamics.csv", traj, cfg.objective())
    print(f"{name}: forward solve done, dynamics in {out}")
    return EXIT_OK


def cmd_sweep_beta(args) -> int:
    cfg, name = _load_scenario(args)
    out = _output_dir(args, cfg, name, "sweep-beta")
    result = run_beta_sweep(cfg, jobs=args.jobs)
    write_sweep_csv(out / "sweep.csv", result)
    write_sweep_fit_txt(out / "sweep_fit.txt", result)
    for a, (slope, intercept) in sorted(result.fits.items()):
        print(f"alpha = {a:g}: complexity ~= {slope:.2f} * beta + {intercept:.2f}")
    n_failed = sum(not r.converged for r in result.rows)
    if n_failed:
        print(f"warning: {n_failed} runs did not converge "
              f"(recorded as missing values)")
    print(f"outputs in {out}")
    return EXIT_OK


def cmd_validate(_args) -> int:
    results = run_validation()
    return EXIT_OK if all(r.passed for r in results) else EXIT_CONFIG


def _add_scenario_options(p: argparse.ArgumentParser, with_method: bool):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--preset", choices=PRESET_NAMES,
                     help="built-in scenario name")
    src.add_argument("--config", help="path to a key-value scenario file")
    p.add_argument("--out", help="output directory (default runs/<name>-<cmd>)")
    if with_method:
        p.add_argument("--method", choices=METHODS,
                       help="override the scenario's method")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qutrit-ctrl",
        description="Open-qutrit optimal control with coherent and "
                    "incoherent controls")
    sub = parser.add_subparsers(dest="command", required=True)

    p_opt = sub.add_parser("optimize", help="run one optimization scenario")
    _add_scenario_options(p_opt, with_method=True)
    p_opt.set_defaults(func=cmd_optimize)

    p_sim = sub.add_parser("simulate", help="forward-only run of the initial guess")
    _add_scenario_options(p_sim, with_method=False)
    p_sim.set_defaults(func=cmd_simulate)

    p_sweep = sub.add_parser("sweep-beta",
                             help="two-step method sweep over (alpha, beta)")
    _add_scenario_options(p_sweep, with_method=False)
    p_sweep.add_argument("--jobs", type=int, default=None,
                         help="concurrent runs (default: min(8, cpu count))")
    p_sweep.set_defaults(func=cmd_sweep_beta)

    p_val = sub.add_parser("validate", help="run the self-validation suite")
    p_val.set_defaults(func=cmd_validate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # remap argparse usage errors so exit code 2 stays reserved for
        # non-convergence; --help and friends keep exiting 0
        return EXIT_OK if exc.code in (0, None) else EXIT_CONFIG
    try:
        return args.func(args)
    except (ConfigError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
