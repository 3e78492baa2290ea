import math

import numpy as np
import pytest

from qutrit_ctrl import (ControlGrid, InvalidStateError, Objective,
                         eval_objective, forward_solve, hs_distance_sq,
                         petz_renyi, purity, preset_config, realify, run,
                         trajectory_metrics, von_neumann_entropy)
from qutrit_ctrl.optimizers import ControlProblem
from qutrit_ctrl.dynamics import CauchyCounter

from conftest import RHO0_51, TARGET_51, random_density_matrix


class TestObjectiveValues:
    def test_distance_of_reference_pair(self):
        obj = Objective.distance(TARGET_51)
        assert eval_objective(obj, realify(RHO0_51)) == pytest.approx(0.18, abs=1e-15)

    def test_overlap_of_mixed_target_with_itself(self):
        target = np.diag([0.3, 0.7, 0.0])
        obj = Objective.overlap(target)
        # a mixed target cannot saturate its own overlap bound
        assert eval_objective(obj, realify(target)) == pytest.approx(0.12, abs=1e-12)

    def test_distance_vanishes_at_target(self):
        obj = Objective.distance(TARGET_51)
        assert eval_objective(obj, obj.x_target) == 0.0

    def test_distance_equals_hilbert_schmidt_norm(self, rng):
        for _ in range(25):
            rho, sigma = random_density_matrix(rng), random_density_matrix(rng)
            obj = Objective.distance(sigma)
            assert eval_objective(obj, realify(rho)) == pytest.approx(
                hs_distance_sq(rho, sigma), abs=1e-12)

    def test_overlap_term_equals_matrix_overlap(self, rng):
        for _ in range(25):
            rho, sigma = random_density_matrix(rng), random_density_matrix(rng)
            obj = Objective.overlap(sigma)
            val = eval_objective(obj, realify(rho))
            expected = obj.b - np.trace(rho @ sigma).real
            assert val == pytest.approx(expected, abs=1e-12)


class TestEntropyPurity:
    def test_pure_state(self):
        proj = np.zeros((3, 3), complex)
        proj[1, 1] = 1.0
        assert von_neumann_entropy(proj) == pytest.approx(0.0, abs=1e-12)
        assert purity(proj) == pytest.approx(1.0, abs=1e-14)

    def test_maximally_mixed(self):
        assert von_neumann_entropy(np.eye(3) / 3) == pytest.approx(math.log(3),
                                                                   abs=1e-12)
        assert purity(np.eye(3) / 3) == pytest.approx(1 / 3, abs=1e-14)

    def test_diagonal_entropy_value(self):
        rho = np.diag([0.5, 0.3, 0.2])
        expected = -sum(p * math.log(p) for p in (0.5, 0.3, 0.2))
        assert von_neumann_entropy(rho) == pytest.approx(expected, abs=1e-12)
        assert expected == pytest.approx(1.0297, abs=5e-5)

    def test_purity_of_mixed_diagonal(self):
        assert purity(np.diag([0.3, 0.7, 0.0])) == pytest.approx(0.58, abs=1e-14)

    def test_ranges_on_random_states(self, rng):
        for _ in range(25):
            rho = random_density_matrix(rng)
            assert -1e-12 <= von_neumann_entropy(rho) <= math.log(3) + 1e-12
            assert 1 / 3 - 1e-12 <= purity(rho) <= 1 + 1e-12

    def test_invalid_state_rejected(self):
        with pytest.raises(InvalidStateError):
            von_neumann_entropy(np.diag([1.1, 0.0, -0.1]))


class TestPetzRenyi:
    def test_identical_states(self, rng):
        rho = random_density_matrix(rng)
        assert petz_renyi(rho, rho, 0.5) == pytest.approx(0.0, abs=1e-12)

    def test_diagonal_half_order_value(self):
        rho = np.diag([0.5, 0.5, 0.0])
        sigma = np.diag([0.5, 0.3, 0.2])
        # diagonal matrices: Tr(rho^a sigma^(1-a)) is a scalar sum
        expected = -2.0 * math.log(math.sqrt(0.5 * 0.5)
                                   + math.sqrt(0.5 * 0.3))
        val = petz_renyi(rho, sigma, 0.5)
        assert val == pytest.approx(expected, abs=1e-12)
        assert val == pytest.approx(0.2391480, abs=5e-7)

    def test_rank_deficient_reference_is_finite_below_one(self):
        rho = np.eye(3) / 3
        sigma = np.diag([0.3, 0.7, 0.0])
        assert math.isfinite(petz_renyi(rho, sigma, 0.5))

    def test_support_violation_above_one(self):
        rho = np.eye(3) / 3
        sigma = np.diag([0.3, 0.7, 0.0])
        assert petz_renyi(rho, sigma, 2.0) == math.inf

    def test_alpha_one_rejected(self, rng):
        rho = random_density_matrix(rng)
        with pytest.raises(ValueError):
            petz_renyi(rho, rho, 1.0)
        with pytest.raises(ValueError):
            petz_renyi(rho, rho, -0.5)

    def test_nonnegative_on_random_pairs(self, rng):
        for alpha in (0.5, 0.9, 1.5):
            for _ in range(10):
                rho = random_density_matrix(rng)
                sigma = random_density_matrix(rng)
                assert petz_renyi(rho, sigma, alpha) >= -1e-10


class TestTrajectoryMetrics:
    def test_constant_trajectory_gives_constant_series(self, ref_gens):
        x0 = realify(np.diag([1.0, 0.0, 0.0]))
        grid = ControlGrid.constant(0.5, 10, u=0.0)
        traj = forward_solve(ref_gens, grid, x0, counter=CauchyCounter())
        series = trajectory_metrics(traj, Objective.distance(TARGET_51))
        for s in series.values():
            assert np.ptp(s.values) <= 1e-12

    def test_series_shapes_and_names(self, ref_gens):
        grid = ControlGrid.constant(0.5, 10, u=1.0)
        traj = forward_solve(ref_gens, grid, realify(RHO0_51),
                             counter=CauchyCounter())
        series = trajectory_metrics(traj, Objective.distance(TARGET_51))
        assert set(series) == {"population_1", "population_2", "population_3",
                               "hs_distance_sq", "entropy", "purity",
                               "renyi_0.5"}
        for s in series.values():
            assert s.times.shape == s.values.shape == (11,)

    def test_same_spectrum_steering_preserves_entropy_and_purity(self):
        # optimized steering between states with equal spectra comes back to
        # (approximately) the same entropy and purity at the final time
        cfg = preset_config("5.2a")
        problem = ControlProblem.build(cfg.params, cfg.rho0, cfg.objective(),
                                       cfg.bounds)
        c0 = ControlGrid.constant(cfg.T, 200, u=cfg.u0)
        report = run("gpm3", problem, c0, cfg.gpm_config(),
                     cfg.integrator_config())
        assert report.converged
        series = trajectory_metrics(report.final_trajectory, cfg.objective())
        S, P = series["entropy"].values, series["purity"].values
        assert S[-1] == pytest.approx(S[0], rel=0.02)
        assert P[-1] == pytest.approx(P[0], rel=0.02)
        assert series["renyi_0.5"].values[-1] <= 1e-2
        assert series["hs_distance_sq"].values[-1] <= 1e-5
