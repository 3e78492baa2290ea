import numpy as np
import pytest

from qutrit_ctrl import (ConfigError, load_config, preset_config,
                         run_validation)
from qutrit_ctrl.cli import main
from qutrit_ctrl.presets import PRESET_NAMES

TINY_CONFIG = """\
# small steering scenario for fast tests
E2 = 1.0
E3 = 2.5
V13 = 1.0
V23 = 1.7
C13 = 0.5
C23 = 0.3
rho0 = 0.8 0 0.2
rho_target = 0.5 0.3 0.2
T = 0.5
N = 60
bounds = compact
mu = 50
n_max = 10
objective = J2
u0 = 1.0
method = gpm3
alpha = 1.0
beta = 0.75
theta = 0.1
eps_stop = 1e-4
max_iters = 2000
"""


class TestPresets:
    def test_all_presets_build(self):
        for name in PRESET_NAMES:
            cfg = preset_config(name)
            cfg.problem()  # exercises every invariant

    def test_unknown_preset(self):
        with pytest.raises(KeyError):
            preset_config("9.9")

    def test_overlap_scenario_fields(self):
        cfg = preset_config("5.3")
        p = cfg.params
        assert (p.C13, p.C23) == (0.7, 0.7)
        assert np.array_equal(np.diag(cfg.rho0).real, [0.5, 0.3, 0.2])
        assert np.array_equal(np.diag(cfg.rho_target).real, [0.3, 0.7, 0.0])
        assert cfg.T == 7.0 and cfg.N == 1000
        assert cfg.bounds.mu == 50.0 and cfg.bounds.n_max == 10.0
        assert cfg.objective_kind == "overlap"
        assert cfg.objective().b == pytest.approx(0.7, abs=1e-13)
        assert (cfg.u0, cfg.n1_0, cfg.n2_0) == (0.5, 0.0, 0.0)
        assert (cfg.alpha, cfg.beta, cfg.theta) == (3.0, 0.75, 0.1)
        assert cfg.eps_stop == 1e-3

    def test_first_steering_scenario_fields(self):
        cfg = preset_config("5.1")
        p = cfg.params
        assert (p.E2, p.E3, p.V13, p.V23) == (1.0, 2.5, 1.0, 1.7)
        assert (p.C13, p.C23) == (0.5, 0.3)
        assert cfg.T == 0.5 and cfg.N == 1000
        assert cfg.u0 == 1.0 and cfg.objective_kind == "distance"
        assert (cfg.alpha, cfg.beta, cfg.theta) == (1.0, 0.75, 0.1)
        assert cfg.eps_stop == 1e-6
        assert preset_config("5.1-alpha5").alpha == 5.0

    def test_constrained_variants(self):
        cfg = preset_config("5.2-nmax4")
        assert cfg.bounds.n_max == 4.0 and cfg.u0 == 2.0
        cfg = preset_config("5.2-nmax2-T1")
        assert cfg.bounds.n_max == 2.0 and cfg.T == 1.0
        assert cfg.beta == 0.85 and cfg.alpha == 1.0
        assert preset_config("5.2a").u0 == 0.5
        assert preset_config("5.2b").u0 == 2.0
        assert preset_config("5.2a").bounds.n_max == 20.0


class TestLoadConfig:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "tiny.cfg"
        path.write_text(TINY_CONFIG)
        cfg = load_config(path)
        assert cfg.params.C23 == 0.3
        assert cfg.N == 60
        assert cfg.objective_kind == "distance"
        assert cfg.method == "gpm3"
        assert np.array_equal(np.diag(cfg.rho0).real, [0.8, 0.0, 0.2])

    def test_nine_component_state(self, tmp_path):
        path = tmp_path / "cfg"
        text = TINY_CONFIG.replace("rho0 = 0.8 0 0.2",
                                   "rho0 = 0.8 0 0 0 0 0 0 0 0.2")
        path.write_text(text)
        cfg = load_config(path)
        assert np.array_equal(np.diag(cfg.rho0).real, [0.8, 0.0, 0.2])

    def test_parse_error_names_line(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("E2 = 1.0\nthis is not an assignment\n")
        with pytest.raises(ConfigError, match=r"bad\.cfg:2"):
            load_config(path)

    def test_unknown_key_names_line(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("E2 = 1.0\nfoo = 3\n")
        with pytest.raises(ConfigError, match=r":2.*foo"):
            load_config(path)

    def test_missing_keys_reported(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("E2 = 1.0\n")
        with pytest.raises(ConfigError, match="missing required"):
            load_config(path)

    def test_state_invariant_names_field(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text(TINY_CONFIG.replace("rho0 = 0.8 0 0.2",
                                            "rho0 = 0.8 0 0.4"))
        with pytest.raises(ConfigError, match="rho0"):
            load_config(path)

    def test_invalid_method(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text(TINY_CONFIG.replace("method = gpm3", "method = bfgs"))
        with pytest.raises(ConfigError, match="method"):
            load_config(path)


class TestCli:
    def test_optimize_writes_outputs_and_exits_zero(self, tmp_path):
        cfg = tmp_path / "tiny.cfg"
        cfg.write_text(TINY_CONFIG)
        out = tmp_path / "out"
        code = main(["optimize", "--config", str(cfg), "--out", str(out)])
        assert code == 0
        for name in ("history.csv", "controls.csv", "dynamics.csv",
                     "report.txt"):
            assert (out / name).exists()
        header = (out / "dynamics.csv").read_text().splitlines()[0]
        assert header.startswith("t,x1,x2")
        assert "renyi_0.5" in header

    def test_outputs_are_deterministic(self, tmp_path):
        cfg = tmp_path / "tiny.cfg"
        cfg.write_text(TINY_CONFIG)
        outs = []
        for sub in ("a", "b"):
            out = tmp_path / sub
            assert main(["optimize", "--config", str(cfg), "--out",
                         str(out)]) == 0
            outs.append(out)
        for name in ("history.csv", "controls.csv", "dynamics.csv",
                     "report.txt"):
            assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()

    def test_nonconvergence_exit_code_and_single_history_row(self, tmp_path):
        cfg = tmp_path / "tiny.cfg"
        cfg.write_text(TINY_CONFIG.replace("eps_stop = 1e-4",
                                           "eps_stop = 1e-30")
                       .replace("max_iters = 2000", "max_iters = 1"))
        out = tmp_path / "out"
        code = main(["optimize", "--config", str(cfg), "--out", str(out)])
        assert code == 2
        lines = (out / "history.csv").read_text().splitlines()
        assert len(lines) == 2  # header plus the initial-guess row
        assert "converged: False" in (out / "report.txt").read_text()

    def test_malformed_config_exit_code(self, tmp_path):
        cfg = tmp_path / "bad.cfg"
        cfg.write_text("definitely not a config\n")
        assert main(["optimize", "--config", str(cfg)]) == 1

    def test_missing_file_exit_code(self, tmp_path):
        assert main(["optimize", "--config", str(tmp_path / "nope.cfg")]) == 1

    def test_usage_error_maps_to_config_exit_code(self, capsys):
        assert main(["optimize", "--preset", "no-such-preset"]) == 1
        capsys.readouterr()

    def test_simulate_writes_dynamics(self, tmp_path):
        cfg = tmp_path / "tiny.cfg"
        cfg.write_text(TINY_CONFIG)
        out = tmp_path / "sim"
        assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
        assert (out / "dynamics.csv").exists()
        assert not (out / "history.csv").exists()

    def test_sweep_beta_tiny(self, tmp_path):
        cfg = tmp_path / "tiny.cfg"
        cfg.write_text(TINY_CONFIG)
        out = tmp_path / "sweep"
        # degenerate sweep: a single alpha/beta pair is one optimize run
        from qutrit_ctrl import run_beta_sweep
        from qutrit_ctrl.sweep import write_sweep_csv
        from qutrit_ctrl.config import load_config as load
        result = run_beta_sweep(load(cfg), alphas=(1.0,), betas=[0.75],
                                jobs=1)
        assert len(result.rows) == 1 and result.rows[0].converged
        out.mkdir()
        write_sweep_csv(out / "sweep.csv", result)
        lines = (out / "sweep.csv").read_text().splitlines()
        assert lines[0] == "alpha,beta,complexity,converged"
        assert len(lines) == 2

    def test_sweep_records_nonconvergent_runs_as_missing(self, tmp_path):
        from dataclasses import replace
        from qutrit_ctrl import run_beta_sweep
        from qutrit_ctrl.sweep import write_sweep_csv
        from qutrit_ctrl.config import load_config as load
        cfg_path = tmp_path / "tiny.cfg"
        cfg_path.write_text(TINY_CONFIG)
        cfg = replace(load(cfg_path), eps_stop=1e-30, max_iters=3)
        result = run_beta_sweep(cfg, alphas=(1.0,), betas=[0.1, 0.2], jobs=1)
        assert len(result.rows) == 2
        assert not any(r.converged for r in result.rows)
        assert result.fits == {}  # no fit without converged points
        write_sweep_csv(tmp_path / "sweep.csv", result)
        rows = (tmp_path / "sweep.csv").read_text().splitlines()[1:]
        assert all(row.split(",")[2] == "" for row in rows)


class TestValidationSuite:
    def test_fresh_build_passes(self):
        results = run_validation(verbose=False)
        assert all(r.passed for r in results)

    def test_corrupted_generator_fails_oracle_check(self):
        results = run_validation(corrupt_generators=True, verbose=False)
        by_name = {r.name: r for r in results}
        assert not by_name["realified-vs-complex-oracle"].passed
        assert by_name["generator-trace-preservation"].passed

    def test_validate_command_exit_code(self):
        assert main(["validate"]) == 0
