"""Stage loop, update consistency, order verification, manifold diagnostics."""

import numpy as np
import pytest

from imexrelax.errors import BlowUpError, ConfigurationError
from imexrelax.integrator import (
    StepControl,
    imex_step,
    imex_step_partitioned,
    integrate,
    manifold_residual,
)
from imexrelax.models import PenalizationConfig, constant_mu, diffusive2x2_system, klf_system
from imexrelax.models.base import IMEX_E, IMEX_I, SplitSystem
from imexrelax.models.bounds import linear_stability_bound
from imexrelax.spatial import PERIODIC, Grid1D


class Dahlquist(SplitSystem):
    """y' = lam1*y (explicit) + lam2*y (implicit)."""

    component_names = ("y",)

    def __init__(self, lam1, lam2):
        self.lam1, self.lam2, self.epsilon = lam1, lam2, 1.0
        self.mode = IMEX_E

    def explicit_rhs(self, state, t):
        return self.lam1 * state

    def implicit_rhs(self, state, t):
        return self.lam2 * state

    def unsplit_rhs(self, state, t):
        return (self.lam1 + self.lam2) * state

    def stage_solve(self, rhs, zdt, t, opts=None):
        return rhs / (1.0 - zdt * self.lam2)


class PartitionedDahlquist(SplitSystem):
    """y' = F(y*, y) = lam1*y* + lam2*y."""

    component_names = ("y",)
    is_partitioned = True

    def __init__(self, lam1, lam2, mode=IMEX_I):
        self.lam1, self.lam2, self.epsilon = lam1, lam2, 1.0
        self.mode = mode

    def explicit_rhs(self, state, t):
        return self.lam1 * state

    def implicit_rhs(self, state, t):
        return self.lam2 * state

    def unsplit_rhs(self, state, t):
        return (self.lam1 + self.lam2) * state

    def stage_solve(self, rhs, zdt, t, opts=None):
        raise NotImplementedError

    def partitioned_rhs(self, ystar, y, t):
        return self.lam1 * ystar + self.lam2 * y

    def partitioned_stage_solve(self, ystar, rhs, zdt, t, opts=None):
        return (rhs + zdt * self.lam1 * ystar) / (1.0 - zdt * self.lam2)


class TestImexStep:
    def test_one_step_closed_form(self, euler):
        sysd = Dahlquist(1.0, -1.0)
        dt = 0.1
        y1 = imex_step(sysd, euler, np.array([1.0]), 0.0, dt)
        assert y1[0] == pytest.approx((1 + dt) / (1 + dt), abs=1e-15)
        sysd2 = Dahlquist(0.5, -2.0)
        y1 = imex_step(sysd2, euler, np.array([1.0]), 0.0, dt)
        assert y1[0] == pytest.approx((1 + 0.05) / (1 + 0.2), rel=1e-14)

    def test_zero_rhs_identity(self, mtrap):
        sysd = Dahlquist(0.0, 0.0)
        y1 = imex_step(sysd, mtrap, np.array([1.3]), 0.0, 0.2)
        assert y1[0] == 1.3

    def test_gsa_update_equals_last_stage(self, mtrap):
        # the summed update must coincide with the final stage to roundoff
        sysd = Dahlquist(-0.7, -4.0)
        y0 = np.array([1.0])
        fast = imex_step(sysd, mtrap, y0, 0.0, 0.3, _gsa=True)
        summed = imex_step(sysd, mtrap, y0, 0.0, 0.3, _gsa=False)
        assert abs(fast[0] - summed[0]) <= 1e-13


class TestIntegrate:
    def test_ten_step_recurrence(self, euler):
        sysd = Dahlquist(0.0, -1.0)
        traj = integrate(sysd, euler, np.array([1.0]), StepControl(t_end=1.0, dt=0.1))
        assert traj.n_steps == 10
        assert traj.final_state[0] == pytest.approx((1 / 1.1) ** 10, rel=1e-13)

    def test_final_step_clipped(self, euler):
        sysd = Dahlquist(0.0, -1.0)
        traj = integrate(sysd, euler, np.array([1.0]), StepControl(t_end=0.25, dt=0.1))
        assert traj.final_time == pytest.approx(0.25, abs=0.0)
        assert traj.n_steps == 3

    def test_blow_up_guard(self, euler):
        sysd = Dahlquist(1e300, 0.0)
        with pytest.raises(BlowUpError):
            integrate(sysd, euler, np.array([1.0]), StepControl(t_end=10.0, dt=1.0))

    @pytest.mark.parametrize("scheme_name,expected", [
        ("euler", 1), ("mtrap", 2), ("ars343", 3), ("gsa3", 3),
    ])
    def test_dahlquist_order(self, scheme_name, expected, euler, mtrap, fixture_schemes):
        scheme = {
            "euler": euler,
            "mtrap": mtrap,
            "ars343": fixture_schemes["ars-343"],
            "gsa3": fixture_schemes["gsa3-553"],
        }[scheme_name]
        sysd = Dahlquist(-1.0, -2.0)
        exact = np.exp(-3.0)
        errs = []
        for dt in (0.1, 0.05, 0.025):
            traj = integrate(sysd, scheme, np.array([1.0]), StepControl(t_end=1.0, dt=dt))
            errs.append(abs(traj.final_state[0] - exact))
        order = np.log2(errs[1] / errs[2])
        assert order == pytest.approx(expected, abs=0.2)

    def test_heat_limit_oracle(self, mtrap):
        grid = Grid1D(0.0, 2 * np.pi, 64, PERIODIC, ghost=2)
        sysh = diffusive2x2_system(grid, 1e-6, penalization=PenalizationConfig())
        x = grid.x()
        state = sysh.pack(np.sin(x), np.zeros(64))
        state[1, grid.interior] = sysh.equilibrium_v(state)
        traj = integrate(sysh, mtrap, state, StepControl(t_end=1.0, dt=0.25 * grid.dx))
        err = np.max(np.abs(traj.final_state[0, grid.interior] - np.exp(-1.0) * np.sin(x)))
        assert err <= 5.0 * grid.dx**2


class TestManifold:
    def test_projection_under_gsa(self, mtrap):
        grid = Grid1D(0.0, 2 * np.pi, 32, PERIODIC, ghost=2)
        syse = diffusive2x2_system(grid, 1e-10, penalization=PenalizationConfig())
        x = grid.x()
        state = syse.pack(np.sin(x), np.zeros(32))  # off the manifold on purpose
        dt = 0.25 * grid.dx
        scale = np.max(np.abs(state))

        def check(step, t, s):
            assert manifold_residual(syse, s) <= 1e-6 * scale

        integrate(syse, mtrap, state, StepControl(t_end=5 * dt, dt=dt), callback=check)

    def test_residual_after_five_steps_tiny(self, mtrap):
        grid = Grid1D(0.0, 2 * np.pi, 32, PERIODIC, ghost=2)
        syse = diffusive2x2_system(grid, 1e-10, penalization=PenalizationConfig())
        x = grid.x()
        state = syse.pack(np.sin(x), np.zeros(32))
        dt = 0.25 * grid.dx
        traj = integrate(syse, mtrap, state, StepControl(t_end=5 * dt, dt=dt))
        assert manifold_residual(syse, traj.final_state) <= 1e-8


class TestStabilityEnvelope:
    def run_mode(self, dt_factor, mu, n_steps=100, eps=0.05, wavenumber=3):
        grid = Grid1D(0.0, 2 * np.pi, 128, PERIODIC, ghost=2)
        sysd = diffusive2x2_system(grid, eps, penalization=constant_mu(mu))
        x = grid.x()
        state = sysd.pack(np.sin(wavenumber * x), np.zeros(128))
        state[1, grid.interior] = sysd.equilibrium_v(state)
        bound = linear_stability_bound(eps, wavenumber).dt_max

        from imexrelax.tableau import get_scheme

        euler = get_scheme("imex-euler")
        u0 = np.max(np.abs(state[0, grid.interior]))
        dt = dt_factor * bound
        try:
            traj = integrate(sysd, euler, state, StepControl(t_end=n_steps * dt, dt=dt))
            return np.max(np.abs(traj.final_state[0, grid.interior])) / u0
        except BlowUpError:
            return np.inf

    def test_stable_below_bound(self):
        # the closed-form envelope is a safe (conservative) bound for the
        # penalized first-order pair
        assert self.run_mode(0.9, mu=1.0) <= 1.0 + 1e-8

    def test_penalized_stays_stable_where_unpenalized_grows(self):
        # the sequential fresh-u realization is uniformly stable at mu=1
        # even beyond the envelope; switching the penalization off at the
        # same step exposes the explicit-limit instability it removes
        assert self.run_mode(2.0, mu=1.0) <= 1.0 + 1e-8
        assert self.run_mode(2.0, mu=0.0, n_steps=40) > 10.0


class TestPartitioned:
    def test_weight_gate_imexi(self, mtrap):
        sysp = PartitionedDahlquist(-1.0, -2.0, mode=IMEX_I)
        with pytest.raises(ConfigurationError, match="b = btilde"):
            integrate(sysp, mtrap, np.array([1.0]), StepControl(t_end=0.1, dt=0.1))

    def test_gsa_gate_imexe(self, euler):
        sysp = PartitionedDahlquist(-1.0, -2.0, mode=IMEX_E)
        with pytest.raises(ConfigurationError, match="globally stiffly accurate"):
            integrate(sysp, euler, np.array([1.0]), StepControl(t_end=0.1, dt=0.1))

    def test_degenerate_stiff_part_reduces_to_explicit_rk(self, euler):
        # F independent of the implicit slot: imex-euler's explicit part is
        # forward Euler
        sysp = PartitionedDahlquist(-1.3, 0.0)
        y1 = imex_step_partitioned(sysp, euler, np.array([1.0]), 0.0, 0.1)
        assert y1[0] == pytest.approx(1.0 - 0.13, rel=1e-14)

    def test_degenerate_nonstiff_part_is_backward_euler(self, euler):
        sysp = PartitionedDahlquist(0.0, -2.0)
        y1 = imex_step_partitioned(sysp, euler, np.array([1.0]), 0.0, 0.1)
        assert y1[0] == pytest.approx(1.0 / 1.2, rel=1e-14)

    def test_one_step_closed_form(self, euler):
        sysp = PartitionedDahlquist(1.0, -1.0)
        y1 = imex_step_partitioned(sysp, euler, np.array([1.0]), 0.0, 0.1)
        assert y1[0] == pytest.approx(1.1 / 1.1, rel=1e-14)

    def test_klf_m1_matches_dense_linear_oracle(self, euler):
        # m=1 collapses the stage to a linear solve; rebuild that exact
        # semi-implicit Euler step with dense periodic matrices and compare
        grid = Grid1D(0.0, 2 * np.pi, 48, PERIODIC, ghost=2)
        n, dx, sl = grid.n, grid.dx, grid.interior
        eps = 0.05
        pen = PenalizationConfig()
        sysk = klf_system(grid, eps, m=1.0, penalization=pen)
        mu = sysk.mu
        x = grid.x()
        u0, v0 = np.cos(x), np.sin(x)
        dt = 0.2 * grid.dx

        idx = np.arange(n)
        D2 = (np.eye(n) * -2.0 + np.eye(n, k=1) + np.eye(n, k=-1)) / dx**2
        D2[0, -1] = D2[-1, 0] = 1.0 / dx**2
        Dc = (np.eye(n, k=1) - np.eye(n, k=-1)) / (2 * dx)
        Dc[0, -1] = -1.0 / (2 * dx)
        Dc[-1, 0] = 1.0 / (2 * dx)
        Dblend = (1 - mu) * (np.eye(n) - np.eye(n, k=-1) + np.diag([0.0] * n)) / dx + mu * Dc
        Dblend[0, -1] += -(1 - mu) / dx
        # K = F(y0, Y): U = u0 + dt(-Dblend v0 - mu D2 u0 + mu D2 U)
        A = np.eye(n) - dt * mu * D2
        rhs_u = u0 + dt * (-(Dblend @ v0) - mu * (D2 @ u0))
        U = np.linalg.solve(A, rhs_u)
        theta = dt / eps**2
        V = (v0 - theta * (Dc @ U)) / (1.0 + theta)

        got = imex_step_partitioned(sysk, euler, sysk.pack(u0, v0), 0.0, dt)
        assert np.max(np.abs(got[0, sl] - U)) <= 1e-12
        assert np.max(np.abs(got[1, sl] - V)) <= 1e-12
