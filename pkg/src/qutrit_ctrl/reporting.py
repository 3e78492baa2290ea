"""CSV and text outputs for runs.

Column schemas are frozen so downstream comparison scripts stay stable:

history.csv   iteration, objective, cauchy_problems (cumulative)
controls.csv  t, u, n1, n2                      (t = left cell edge; N rows)
dynamics.csv  t, x1..x9, population_1..3, hs_distance_sq, entropy, purity,
              renyi_0.5                         (cell boundaries; N+1 rows)

Floats are written with 17 significant digits; outputs are deterministic
given a configuration.
"""

from __future__ import annotations

from pathlib import Path

from .dynamics import Trajectory
from .metrics import trajectory_metrics
from .model import ControlGrid, Objective
from .optimizers import RunReport

__all__ = [
    "format_float",
    "write_history_csv",
    "write_controls_csv",
    "write_dynamics_csv",
    "write_report_txt",
]


def format_float(v: float) -> str:
    return f"{float(v):.17g}"


def _write_rows(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_float(v) if isinstance(v, float) else str(v)
                              for v in row))
    path.write_text("\n".join(lines) + "\n")


def write_history_csv(path, report: RunReport) -> None:
    rows = [(k, float(j), int(c)) for k, (j, c) in
            enumerate(zip(report.objective_history, report.cauchy_history))]
    _write_rows(Path(path), ["iteration", "objective", "cauchy_problems"], rows)


def write_controls_csv(path, grid: ControlGrid) -> None:
    times = grid.cell_times()
    rows = [(float(t), float(u), float(n1), float(n2))
            for t, u, n1, n2 in zip(times, grid.u, grid.n1, grid.n2)]
    _write_rows(Path(path), ["t", "u", "n1", "n2"], rows)


def write_dynamics_csv(path, traj: Trajectory, objective: Objective,
                       renyi_alpha: float = 0.5) -> None:
    series = trajectory_metrics(traj, objective, renyi_alpha)
    times = traj.cell_boundary_times()
    states = traj.cell_boundary_states()
    header = (["t"] + [f"x{j}" for j in range(1, 10)]
              + ["population_1", "population_2", "population_3",
                 "hs_distance_sq", "entropy", "purity",
                 f"renyi_{renyi_alpha:g}"])
    names = ["population_1", "population_2", "population_3",
             "hs_distance_sq", "entropy", "purity", f"renyi_{renyi_alpha:g}"]
    rows = []
    for i, t in enumerate(times):
        row = [float(t)] + [float(v) for v in states[i]]
        row += [float(series[name].values[i]) for name in names]
        rows.append(row)
    _write_rows(Path(path), header, rows)


def write_report_txt(path, report: RunReport, scenario_name: str = "") -> None:
    lines = []
    if scenario_name:
        lines.append(f"scenario: {scenario_name}")
    lines += [
        f"method: {report.method}",
        f"converged: {report.converged}",
        f"iterations: {report.iterations}",
        f"cauchy_problems: {report.cauchy_problems}",
        f"final_objective: {format_float(report.final_objective)}",
        f"best_objective: {format_float(float(report.objective_history.min()))}",
    ]
    Path(path).write_text("\n".join(lines) + "\n")
