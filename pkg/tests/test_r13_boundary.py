"""Ghost-cell fills, wall residuals, Lagrange extrapolation."""

import numpy as np
import pytest

from imexrelax.models.r13 import r13_steady_state
from imexrelax.r13_boundary import (
    BC_123,
    LEFT,
    RIGHT,
    WallData,
    apply_ghost_lagrange,
    apply_ghost_second_order,
    wall_residuals,
)
from imexrelax.spatial import GHOST, Grid1D


def walls(grid, g=1.0, alpha=0.7, beta=0.3, eps=1e-4):
    return (
        WallData(g, alpha, beta, eps, grid.dx, LEFT),
        WallData(g, alpha, beta, eps, grid.dx, RIGHT),
    )


def fill_both(state, grid, wl, wr, **kw):
    apply_ghost_second_order(state, grid, wl, **kw)
    apply_ghost_second_order(state, grid, wr, **kw)
    return state


class TestSecondOrderFill:
    def test_steady_state_wall_values(self):
        grid = Grid1D(-1.0, 1.0, 50, GHOST, ghost=2)
        wl, wr = walls(grid)
        state = r13_steady_state(grid, 1.0, 0.7, 0.3, 1e-4)
        filled = fill_both(state.copy(), grid, wl, wr)
        # the fill reproduces the analytic ghosts (all rows polynomial <= 2)
        np.testing.assert_allclose(filled, state, atol=1e-11)
        for wall in (wl, wr):
            r1, r2, r4 = wall_residuals(filled, grid, wall)
            assert abs(r1) <= 1e-12
            assert abs(r2) <= 1e-12
            assert abs(r4) <= 1e-12

    def test_constant_fields_g_zero(self):
        grid = Grid1D(-1.0, 1.0, 12, GHOST, ghost=2)
        wl, wr = walls(grid, g=0.0, eps=1e-3)
        state = np.zeros((3, grid.ntot))
        state[0] = 0.7  # u constant
        state[1] = 0.0  # v must vanish for compatibility with u const
        state[2] = 0.0  # w wall value is -g = 0
        filled = fill_both(state.copy(), grid, wl, wr)
        gh = grid.ghost
        assert filled[1, gh - 1] == filled[1, gh]  # v0 = v1 when g = 0
        np.testing.assert_allclose(filled[2], 0.0, atol=1e-15)

    def test_quadratic_outer_layer_exact_on_linears(self):
        grid = Grid1D(-1.0, 1.0, 16, GHOST, ghost=2)
        wl, wr = walls(grid, g=1.0)
        x = grid.x_padded()
        state = np.zeros((3, grid.ntot))
        state[0] = 2.0 * x + 0.3
        state[1] = 1.0 * x + 0.1
        state[2] = -1.0 + 0.0 * x
        filled = fill_both(state.copy(), grid, wl, wr)
        # the outer ghost layer U_{-1} = 3U_0 - 3U_1 + U_2 reproduces any
        # quadratic through the first ghost + two interior cells
        for row in range(3):
            a, b, c = filled[row, 1], filled[row, 2], filled[row, 3]
            assert filled[row, 0] == pytest.approx(3 * a - 3 * b + c, abs=1e-13)

    def test_idempotent(self, rng):
        grid = Grid1D(-1.0, 1.0, 20, GHOST, ghost=2)
        wl, wr = walls(grid)
        state = np.zeros((3, grid.ntot))
        state[:, grid.interior] = rng.standard_normal((3, 20))
        once = fill_both(state.copy(), grid, wl, wr)
        twice = fill_both(once.copy(), grid, wl, wr)
        np.testing.assert_array_equal(once, twice)
        np.testing.assert_array_equal(once[:, grid.interior], state[:, grid.interior])

    def test_r1_zero_by_construction_and_unit_offset(self):
        grid = Grid1D(-1.0, 1.0, 16, GHOST, ghost=2)
        wl, wr = walls(grid)
        rng = np.random.default_rng(4)
        state = np.zeros((3, grid.ntot))
        state[:, grid.interior] = rng.standard_normal((3, 16))
        filled = fill_both(state.copy(), grid, wl, wr)
        r1, _, r4 = wall_residuals(filled, grid, wl)
        assert abs(r1) <= 1e-13
        assert abs(r4) <= 1e-13
        # w == 0 fields with g=1 leave r1 = +1
        zero = np.zeros((3, grid.ntot))
        assert wall_residuals(zero, grid, wl)[0] == pytest.approx(1.0)

    def test_bc123_flux_condition(self):
        grid = Grid1D(-1.0, 1.0, 50, GHOST, ghost=2)
        wl, wr = walls(grid)
        state = r13_steady_state(grid, 1.0, 0.7, 0.3, 1e-4)
        filled = fill_both(state.copy(), grid, wl, wr, bc_set=BC_123)
        gh = grid.ghost
        eps = 1e-4
        # (u_x + eps^2 w_x)|wall = -2 v|wall with two-point wall slopes
        for (g0, i1, sgn) in ((gh - 1, gh, 1.0), (gh + grid.n, gh + grid.n - 1, -1.0)):
            du = sgn * (filled[0, i1] - filled[0, g0]) / grid.dx
            dw = sgn * (filled[2, i1] - filled[2, g0]) / grid.dx
            v_wall = 0.375 * filled[1, g0] + 0.75 * filled[1, i1] - 0.125 * filled[1, i1 + int(sgn)]
            assert du + eps**2 * dw == pytest.approx(-2.0 * v_wall, abs=1e-9)


class TestLagrangeFill:
    def test_degree_one_matches_linear_extrapolation(self):
        # wall-compatible linear fields: v = g x, w = -g, u = the constant
        # eps g (1+eps beta)/alpha forced by condition (4) at both walls
        grid = Grid1D(-1.0, 1.0, 16, GHOST, ghost=2)
        g, alpha, beta, eps = 1.0, 0.7, 0.3, 1e-4
        wl, wr = walls(grid, g=g, alpha=alpha, beta=beta, eps=eps)
        x = grid.x_padded()
        state = np.zeros((3, grid.ntot))
        state[0] = eps * g * (1 + eps * beta) / alpha
        state[1] = g * x
        state[2] = -g + 0.0 * x
        a = fill_both(state.copy(), grid, wl, wr)
        b = state.copy()
        apply_ghost_lagrange(b, grid, wl, 1)
        apply_ghost_lagrange(b, grid, wr, 1)
        np.testing.assert_allclose(a, state, atol=1e-12)
        np.testing.assert_allclose(b, state, atol=1e-12)

    def test_degree_two_steady_wall_residuals(self):
        prev = None
        for n in (40, 80, 160):
            grid = Grid1D(-1.0, 1.0, n, GHOST, ghost=2)
            wl, wr = walls(grid)
            state = r13_steady_state(grid, 1.0, 0.7, 0.3, 1e-4)
            apply_ghost_lagrange(state, grid, wl, 2)
            apply_ghost_lagrange(state, grid, wr, 2)
            res = np.max(np.abs(wall_residuals(state, grid, wl)))
            assert res <= 50.0 * grid.dx**3 + 1e-11
            prev = res

    def test_linear_v_satisfies_derivative_condition_exactly(self):
        grid = Grid1D(-1.0, 1.0, 16, GHOST, ghost=2)
        wl, _ = walls(grid, g=0.7)
        x = grid.x_padded()
        state = np.zeros((3, grid.ntot))
        state[1] = 0.7 * x  # v = g*x
        state[2] = -0.7
        apply_ghost_lagrange(state, grid, wl, 2)
        np.testing.assert_allclose(state[1, grid.ghost - 1], 0.7 * x[grid.ghost - 1], atol=1e-12)


class TestSteadyBoundaryCompatibility:
    def test_rhs_boundary_cells_second_order(self):
        # one full right-hand-side evaluation at the sampled steady state:
        # boundary-cell residuals stay within C dx^2 under refinement
        from imexrelax.models import PenalizationConfig, r13_system

        worst = {}
        for n in (50, 100, 200):
            grid = Grid1D(-1.0, 1.0, n, GHOST, ghost=2)
            sysr = r13_system(grid, 1e-4, g=1.0, penalization=PenalizationConfig())
            st = r13_steady_state(grid, 1.0, 0.7, 0.3, 1e-4)
            rhs = sysr.unsplit_rhs(st.copy(), 0.0)[:, grid.interior]
            edge = np.max(np.abs(np.concatenate([rhs[:, :2].ravel(), rhs[:, -2:].ravel()])))
            worst[n] = edge
            assert edge <= 0.05 * grid.dx**2
