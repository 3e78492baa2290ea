import numpy as np
import pytest

from qutrit_ctrl import (CauchyCounter, ControlGrid, IntegratorConfig,
                         Objective, SystemParams, adjoint_solve,
                         build_generators, eval_objective, forward_solve,
                         gradient, realify, switching_values,
                         switching_values_bilinear, transversality)
from qutrit_ctrl.validate import FD_INTEGRATOR, fd_gradient

from conftest import REF_PARAMS, RHO0_51, TARGET_51, random_grid

TIGHT = IntegratorConfig(rel_tol=1e-11, abs_tol=1e-13)


class TestTransversality:
    def test_overlap_terminal_costate(self):
        obj = Objective.overlap(np.diag([0.3, 0.7, 0.0]))
        y = transversality(obj, np.zeros(9))
        assert np.array_equal(y, [0.3, 0, 0, 0, 0, 0.7, 0, 0, 0])

    def test_distance_zero_at_target(self):
        obj = Objective.distance(TARGET_51)
        y = transversality(obj, obj.x_target)
        assert not y.any()

    def test_distance_hand_computed(self):
        obj = Objective.distance(TARGET_51)
        y = transversality(obj, realify(RHO0_51))
        # -2 * beta * (x - x_target) componentwise on the populations
        assert np.allclose(y, [-0.6, 0, 0, 0, 0, 0.6, 0, 0, 0], atol=1e-15)

    def test_overlap_is_state_independent(self, rng):
        obj = Objective.overlap(np.diag([0.3, 0.7, 0.0]))
        y1 = transversality(obj, rng.normal(size=9))
        y2 = transversality(obj, rng.normal(size=9))
        assert np.array_equal(y1, y2)


class TestAdjointSolve:
    def test_norm_conserved_without_dissipation(self, rng):
        # the drift is skew-symmetric when the decay constants vanish
        params = SystemParams(E2=1.0, E3=2.5, V13=1.0, V23=1.7,
                              C13=0.0, C23=0.0)
        gens = build_generators(params)
        grid = ControlGrid.constant(1.0, 40, u=0.0)
        x0 = realify(np.diag([0.6, 0.3, 0.1]))
        fwd = forward_solve(gens, grid, x0, TIGHT, CauchyCounter())
        obj = Objective.distance(TARGET_51)
        adj = adjoint_solve(gens, grid, obj, fwd, TIGHT, CauchyCounter())
        norms = np.linalg.norm(adj.states, axis=1)
        assert np.ptp(norms) <= 1e-9 * norms[0]

    def test_zero_terminal_data_gives_zero_costate(self, ref_gens, rng):
        grid = random_grid(rng, N=25)
        fwd = forward_solve(ref_gens, grid, realify(RHO0_51),
                            counter=CauchyCounter())
        # distance objective whose target is exactly the reached state
        obj = Objective("distance", fwd.final_state.copy())
        adj = adjoint_solve(ref_gens, grid, obj, fwd, counter=CauchyCounter())
        assert not adj.states.any()

    def test_state_costate_pairing_is_constant(self, ref_gens, rng):
        # <y(t), x(t)> is a first integral of matched forward/adjoint pairs
        grid = random_grid(rng, N=30, u_scale=5.0, n_scale=2.0)
        fwd = forward_solve(ref_gens, grid, realify(RHO0_51), TIGHT,
                            CauchyCounter())
        for obj in (Objective.distance(TARGET_51),
                    Objective.overlap(TARGET_51)):
            adj = adjoint_solve(ref_gens, grid, obj, fwd, TIGHT,
                                CauchyCounter())
            pairing = np.einsum("ti,ti->t", adj.states, fwd.states)
            drift = np.ptp(pairing)
            assert drift <= 1e-8 * np.linalg.norm(adj.final_state)

    def test_expanded_costate_equations_match_transpose(self, rng):
        # the componentwise right-hand sides of the costate system, written
        # out explicitly, against -(A + B_u u + sum B_nj nj)^T y
        for _ in range(10):
            E2, E3, V13, V23 = rng.uniform(0.1, 3.0, 4)
            C13, C23 = rng.uniform(0.0, 2.0, 2)
            params = SystemParams(E2, E3, V13, V23, C13, C23)
            gens = build_generators(params)
            y = rng.normal(size=9)
            u, n1, n2 = rng.normal(), rng.uniform(0, 3), rng.uniform(0, 3)
            y1, y2, y3, y4, y5, y6, y7, y8, y9 = y
            g1 = C13 * V13 ** 2
            g2 = C23 * V23 ** 2
            expanded = np.array([
                -V13 * y5 * u - 2 * g1 * (y9 - y1) * n1,
                -E2 * y3 - (V13 * y8 + V23 * y5) * u + g1 * y2 * n1 + g2 * y2 * n2,
                E2 * y2 + (V23 * y4 - V13 * y7) * u + g1 * y3 * n1 + g2 * y3 * n2,
                (g1 + g2) * y4 - E3 * y5 - V23 * y3 * u + 2 * g1 * y4 * n1
                + g2 * y4 * n2,
                (g1 + g2) * y5 + E3 * y4 + (2 * V13 * (y1 - y9) + V23 * y2) * u
                + 2 * g1 * y5 * n1 + g2 * y5 * n2,
                -V23 * y8 * u + 2 * g2 * (y6 - y9) * n2,
                (g1 + g2) * y7 + (E2 - E3) * y8 + V13 * y3 * u + g1 * y7 * n1
                + 2 * g2 * y7 * n2,
                (E3 - E2) * y7 + (g1 + g2) * y8
                + (V13 * y2 + 2 * V23 * (y6 - y9)) * u + g1 * y8 * n1
                + 2 * g2 * y8 * n2,
                2 * g1 * (y9 - y1) + 2 * g2 * (y9 - y6)
                + (V13 * y5 + V23 * y8) * u + 2 * g1 * (y9 - y1) * n1
                + 2 * g2 * (y9 - y6) * n2,
            ])
            M = gens.A + u * gens.Bu + n1 * gens.Bn1 + n2 * gens.Bn2
            assert np.allclose(expanded, -(M.T @ y), atol=1e-12)


class TestSwitchingValues:
    def test_coherent_value_vanishes_without_coherences(self, rng):
        x = np.zeros(9)
        y = np.zeros(9)
        x[[0, 5, 8]] = rng.uniform(0, 1, 3)
        y[[0, 5, 8]] = rng.normal(size=3)
        ku, _, _ = switching_values(x, y, REF_PARAMS)
        assert ku == 0.0

    def test_hand_computed_incoherent_value(self):
        # diagonal state/costate: only the population terms survive
        x = np.zeros(9)
        y = np.zeros(9)
        x[0], x[8] = 0.8, 0.2
        y[0], y[8] = 0.5, 0.2
        _, kn1, _ = switching_values(x, y, REF_PARAMS)
        assert kn1 == pytest.approx(-0.18, abs=1e-15)

    def test_polynomial_form_matches_bilinear_form(self, ref_gens, rng):
        X = rng.normal(size=(10000, 9))
        Y = rng.normal(size=(10000, 9))
        for x, y in zip(X[:200], Y[:200]):
            poly = switching_values(x, y, REF_PARAMS)
            bil = switching_values_bilinear(x, y, ref_gens)
            assert np.allclose(poly, bil, atol=1e-12)
        # and in bulk via the vectorized series evaluation
        ku = np.einsum("ti,ti->t", Y, X @ ref_gens.Bu.T)
        kn1 = np.einsum("ti,ti->t", Y, X @ ref_gens.Bn1.T)
        kn2 = np.einsum("ti,ti->t", Y, X @ ref_gens.Bn2.T)
        polys = np.array([switching_values(x, y, REF_PARAMS)
                          for x, y in zip(X, Y)])
        assert np.allclose(polys[:, 0], ku, atol=1e-12)
        assert np.allclose(polys[:, 1], kn1, atol=1e-12)
        assert np.allclose(polys[:, 2], kn2, atol=1e-12)


class TestGradient:
    def test_zero_costate_gives_zero_gradient(self, ref_gens, rng):
        grid = random_grid(rng, N=20)
        fwd = forward_solve(ref_gens, grid, realify(RHO0_51),
                            counter=CauchyCounter())
        obj = Objective("distance", fwd.final_state.copy())
        adj = adjoint_solve(ref_gens, grid, obj, fwd, counter=CauchyCounter())
        g = gradient(ref_gens, grid, obj, fwd, adj)
        assert not g.gu.any() and not g.gn1.any() and not g.gn2.any()

    def test_costate_mismatch_detected(self, ref_gens, rng):
        grid = random_grid(rng, N=20)
        fwd = forward_solve(ref_gens, grid, realify(RHO0_51),
                            counter=CauchyCounter())
        adj = adjoint_solve(ref_gens, grid, Objective.distance(TARGET_51),
                            fwd, counter=CauchyCounter())
        with pytest.raises(ValueError):
            gradient(ref_gens, grid, Objective.overlap(TARGET_51), fwd, adj)

    @pytest.mark.parametrize("kind", ["distance", "overlap"])
    def test_matches_finite_differences_per_cell(self, ref_gens, rng, kind):
        N = 20
        grid = random_grid(rng, N=N)
        x0 = realify(RHO0_51)
        obj = (Objective.distance(TARGET_51) if kind == "distance"
               else Objective.overlap(TARGET_51))
        counter = CauchyCounter()
        fwd = forward_solve(ref_gens, grid, x0, FD_INTEGRATOR, counter)
        adj = adjoint_solve(ref_gens, grid, obj, fwd, FD_INTEGRATOR, counter)
        g = gradient(ref_gens, grid, obj, fwd, adj)
        cells = [0, 7, 13, 19]
        for channel, gg in (("u", g.gu), ("n1", g.gn1), ("n2", g.gn2)):
            fd = fd_gradient(ref_gens, grid, obj, x0, channel, cells)
            scale = max(np.abs(gg).max(), 1e-12)
            for j, i in enumerate(cells):
                assert abs(fd[j] - gg[i]) / max(abs(fd[j]), 1e-2 * scale) <= 1e-4

    def test_directional_derivative(self, ref_gens, rng):
        # <grad, dc>_{L2} against central differences of J along dc
        N = 25
        grid = ControlGrid(0.5, rng.uniform(-2, 2, N), rng.uniform(0.5, 1, N),
                           rng.uniform(0.5, 1, N))
        x0 = realify(RHO0_51)
        obj = Objective.distance(TARGET_51)
        counter = CauchyCounter()
        fwd = forward_solve(ref_gens, grid, x0, FD_INTEGRATOR, counter)
        adj = adjoint_solve(ref_gens, grid, obj, fwd, FD_INTEGRATOR, counter)
        g = gradient(ref_gens, grid, obj, fwd, adj)
        eps = 1e-5
        for _ in range(5):
            d = rng.normal(size=(3, N))
            pairing = grid.dt * (g.gu @ d[0] + g.gn1 @ d[1] + g.gn2 @ d[2])
            vals = {}
            for sign in (+1, -1):
                pert = ControlGrid(grid.T, grid.u + sign * eps * d[0],
                                   grid.n1 + sign * eps * d[1],
                                   grid.n2 + sign * eps * d[2])
                traj = forward_solve(ref_gens, pert, x0, FD_INTEGRATOR,
                                     counter)
                vals[sign] = eval_objective(obj, traj.final_state)
            fd = (vals[+1] - vals[-1]) / (2 * eps)
            assert fd == pytest.approx(pairing, rel=1e-3, abs=1e-12)

    def test_overlap_terminal_costate_control_independent(self, ref_gens, rng):
        obj = Objective.overlap(TARGET_51)
        x0 = realify(RHO0_51)
        finals = []
        for _ in range(2):
            grid = random_grid(rng, N=15)
            fwd = forward_solve(ref_gens, grid, x0, counter=CauchyCounter())
            adj = adjoint_solve(ref_gens, grid, obj, fwd,
                                counter=CauchyCounter())
            finals.append(adj.final_state)
        assert np.array_equal(finals[0], finals[1])

    def test_distance_terminal_costate_varies_with_state(self, ref_gens, rng):
        obj = Objective.distance(TARGET_51)
        x0 = realify(RHO0_51)
        finals = []
        for u0 in (0.0, 2.0):
            grid = ControlGrid.constant(0.5, 15, u=u0)
            fwd = forward_solve(ref_gens, grid, x0, counter=CauchyCounter())
            adj = adjoint_solve(ref_gens, grid, obj, fwd,
                                counter=CauchyCounter())
            finals.append(adj.final_state)
        assert np.abs(finals[0] - finals[1]).max() > 1e-6
