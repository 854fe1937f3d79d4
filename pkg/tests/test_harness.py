"""Harness: norms, rates, restriction, studies, CSV schema, CLI."""

import math
import os
import subprocess
import sys

import numpy as np
import pytest

from imexrelax.harness import (
    CSV_HEADER,
    convergence_rate_log3,
    error_norm,
    load_config,
    oscillation_indicator,
    run_convergence_study,
    self_convergence_errors,
)
from imexrelax.harness.config import ExperimentConfig
from imexrelax.harness.experiments import observed_order
from imexrelax.errors import ConfigurationError

CONFIG_DIR = os.path.join(os.path.dirname(__file__), "..", "configs")


def small_cfg(**over):
    base = dict(
        model="diffusive2x2",
        experiment="convergence",
        scheme="imex-midpoint-trapezoid",
        eps_list=[1e-6],
        grid_sizes=[16, 32],
        t_end=0.5,
        x_left=0.0,
        x_right=2 * math.pi,
        dt=None,
        dt_coeff=0.25,
        dt_power=1.0,
        model_params={"exact": "heat", "penalized": True},
    )
    base.update(over)
    return ExperimentConfig(**base)


class TestNorms:
    def test_zero(self):
        assert error_norm(np.ones(5), np.ones(5), "l1", 0.1) == 0.0

    def test_l1_measures_domain(self):
        # |a-b| = 1 on [-1, 1] discretized by 100 cells
        a = np.zeros(100)
        b = np.ones(100)
        assert error_norm(a, b, "l1", 2.0 / 100) == pytest.approx(2.0)

    def test_linf(self):
        assert error_norm(np.zeros(7), np.ones(7), "linf") == 1.0

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            error_norm(np.zeros(3), np.zeros(4), "l1")


class TestRates:
    def test_exact_power_of_three(self):
        assert convergence_rate_log3(9e-4, 1e-4) == pytest.approx(2.0, abs=1e-14)

    def test_published_table_pairs(self):
        assert convergence_rate_log3(8.062e-4, 7.838e-5) == pytest.approx(2.121, abs=1.5e-3)
        assert convergence_rate_log3(2.530e-3, 2.879e-4) == pytest.approx(1.978, abs=1.5e-3)
        assert convergence_rate_log3(1.089e-2, 1.162e-3) == pytest.approx(2.036, abs=1.5e-3)

    def test_antisymmetric(self):
        assert convergence_rate_log3(1e-3, 1e-4) == pytest.approx(
            -convergence_rate_log3(1e-4, 1e-3)
        )

    def test_nonpositive_rejected(self):
        with pytest.raises(ValueError):
            convergence_rate_log3(0.0, 1e-4)


class TestRestriction:
    def test_identical_solution_gives_zero(self):
        x_c = (np.arange(12) + 0.5) / 12
        x_f = (np.arange(36) + 0.5) / 36
        coarse = np.sin(x_c)[None, :]
        fine = np.sin(x_f)[None, :]
        errs = self_convergence_errors(coarse, fine, "linf", 1.0 / 12, "cells")
        assert errs[0] <= 1e-15

    def test_ratio_guard(self):
        with pytest.raises(ValueError):
            self_convergence_errors(np.zeros((1, 10)), np.zeros((1, 20)), "l1", 0.1)

    def test_manufactured_second_order(self):
        # an O(dx^2) perturbation of a fixed profile shows observed order 2
        errs = []
        for n in (20, 60, 180):
            x = (np.arange(n) + 0.5) / n
            errs.append((np.sin(2 * np.pi * x) + (1.0 / n) ** 2 * np.cos(2 * np.pi * x),))
        e1 = np.max(np.abs(errs[0][0] - np.interp((np.arange(20) + 0.5) / 20,
                                                  (np.arange(60) + 0.5) / 60, errs[1][0])))
        # direct route: build solutions on the ladder and use the comparator
        sols = []
        for n in (20, 60, 180):
            x = (np.arange(n) + 0.5) / n
            sols.append(np.stack([np.sin(2 * np.pi * x) + (1.0 / n) ** 2]))
        E1 = self_convergence_errors(sols[0], sols[1], "linf", 1.0 / 20, "cells")[0]
        E2 = self_convergence_errors(sols[1], sols[2], "linf", 1.0 / 60, "cells")[0]
        assert 1.8 <= observed_order(E1, E2, 3.0) <= 2.2


class TestPaperErrorTether:
    def test_r13_self_convergence_u_error_scale(self):
        # E_u from the tripled-grid comparison lands near the printed value;
        # the source's norm is unstated, so the check uses the domain-mean
        # L1 and a factor-2-ish envelope (fine pair within 2, coarse 2.5)
        cfg = ExperimentConfig(
            model="r13", experiment="convergence", scheme="imex-midpoint-trapezoid",
            eps_list=[0.01], grid_sizes=[50, 150, 450], t_end=0.04,
            x_left=-1.0, x_right=1.0, dt=None, dt_coeff=0.5, dt_power=2.0,
            model_params={"g": 0.0, "penalized": False, "prepared": False},
        )
        rep = run_convergence_study(cfg)
        rows = rep.select(component="u", norm="l1", eps=0.01)
        e1, e2 = rows[0].error / 2.0, rows[1].error / 2.0
        printed = (8.062e-4, 7.838e-5)
        assert max(e1 / printed[0], printed[0] / e1) <= 2.5
        assert max(e2 / printed[1], printed[1] / e2) <= 2.0


class TestOscillationIndicator:
    def test_smooth_profile_quiet(self):
        x = np.linspace(0, 2 * np.pi, 96, endpoint=False)
        assert oscillation_indicator(np.exp(-1.0) * np.cos(x)) <= 2

    def test_zigzag_loud(self):
        x = np.linspace(0, 2 * np.pi, 96, endpoint=False)
        u = np.cos(x) + 0.05 * (-1.0) ** np.arange(96)
        assert oscillation_indicator(u) >= 20


class TestConfig:
    def test_load_and_types(self, tmp_path):
        path = tmp_path / "c.ini"
        path.write_text(
            "[model]\nname = r13\nexperiment = convergence\neps = 1e-6, 1e-4\n"
            "g = 0.0\nprepared = true\n"
            "[scheme]\nname = imex-euler\n"
            "[grid]\nsizes = 50, 150, 450\nx_left = -1\nx_right = 1\n"
            "[time]\nt_end = 1.0\ndt_coeff = 0.3\ndt_power = 1\n"
            "[output]\nnorms = linf\n"
        )
        cfg = load_config(str(path))
        assert cfg.eps_list == [1e-6, 1e-4]
        assert cfg.model_params["prepared"] is True
        assert cfg.norms == ["linf"]

    def test_strictly_increasing_sizes(self):
        with pytest.raises(ConfigurationError):
            small_cfg(grid_sizes=[32, 16])

    def test_constant_ratio(self):
        with pytest.raises(ConfigurationError):
            small_cfg(grid_sizes=[10, 30, 60])

    def test_missing_file(self):
        with pytest.raises(ConfigurationError):
            load_config("/nonexistent/x.ini")


class TestStudies:
    def test_heat_exact_orders_and_rows(self):
        cfg = small_cfg(grid_sizes=[16, 32, 64])
        rep = run_convergence_study(cfg)
        rows = rep.select(component="u", norm="linf")
        assert len(rows) == 3
        orders = [r.order for r in rows if not math.isnan(r.order)]
        assert len(orders) == 2
        assert all(1.7 <= p <= 2.3 for p in orders)
        assert not rep.aborted

    def test_abort_flag_recorded_and_study_continues(self):
        # unpenalized explicit-limit (imex-i with mu = 0) at a hyperbolic
        # step: the limit scheme is explicit and overflows
        cfg = small_cfg(model_params={"exact": "heat", "penalized": False},
                        grid_sizes=[64, 128], eps_list=[1e-6], t_end=20.0)
        rep = run_convergence_study(cfg)
        flags = {(r.eps, r.n): r.flag for r in rep.select(component="u", norm="l1")}
        assert flags[(1e-6, 64)] == "abort"
        assert flags[(1e-6, 128)] == "abort"
        assert rep.aborted

    def test_degraded_flag(self):
        # first-order scheme against the second-order floor
        cfg = small_cfg(grid_sizes=[16, 32, 64], scheme="imex-euler", order_floor=1.8)
        rep = run_convergence_study(cfg)
        rows = [r for r in rep.select(component="u", norm="linf") if not math.isnan(r.order)]
        assert rows and all(r.flag == "degraded" for r in rows)

    def test_csv_schema_and_determinism(self, tmp_path):
        cfg = small_cfg(grid_sizes=[16, 32])
        rep1 = run_convergence_study(cfg)
        rep2 = run_convergence_study(cfg)
        for rep in (rep1, rep2):
            lines = rep.to_csv().strip().split("\n")
            assert lines[0] == CSV_HEADER
            assert all(len(l.split(",")) == 11 for l in lines)

        def strip_seconds(r):
            return "\n".join(",".join(line.split(",")[:-1]) for line in r.to_csv().split("\n"))

        # deterministic up to the wall-clock column
        assert strip_seconds(rep1) == strip_seconds(rep2)

    def test_vdp_ladder_columns(self, tmp_path):
        cfg = ExperimentConfig(
            model="vdp", experiment="convergence", scheme="imex-midpoint-trapezoid",
            eps_list=[1e-6], grid_sizes=[27, 81, 243], t_end=0.5, dt=1.0,
            dt_coeff=None, model_params={},
        )
        rep = run_convergence_study(cfg)
        y_orders = [r.order for r in rep.select(component="y", norm="linf")
                    if not math.isnan(r.order)]
        z_orders = [r.order for r in rep.select(component="z", norm="linf")
                    if not math.isnan(r.order)]
        assert y_orders and z_orders
        assert y_orders[-1] >= 1.6  # differential component near the scheme order


class TestCli:
    def run_cli(self, *args):
        return subprocess.run(
            [sys.executable, "-m", "imexrelax.harness.cli", *args],
            capture_output=True, text=True,
        )

    def test_list_models(self):
        out = self.run_cli("list-models")
        assert out.returncode == 0
        assert "broadwell" in out.stdout

    def test_tableau_check_shipped(self, tmp_path):
        from imexrelax.tableau import shipped_registry_text

        reg = tmp_path / "reg.txt"
        reg.write_text(shipped_registry_text())
        out = self.run_cli("tableau", "check", str(reg), "imex-midpoint-trapezoid")
        assert out.returncode == 0
        assert "globally stiffly accurate:   True" in out.stdout
        assert "satisfied order (target 3): 2" in out.stdout

    def test_tableau_check_unknown_name(self, tmp_path):
        from imexrelax.tableau import shipped_registry_text

        reg = tmp_path / "reg.txt"
        reg.write_text(shipped_registry_text())
        out = self.run_cli("tableau", "check", str(reg), "ars-343")
        assert out.returncode == 1

    def test_run_exit_codes(self, tmp_path):
        bad = tmp_path / "bad.ini"
        bad.write_text("[model]\nname = nosuch\n[grid]\nsizes = 8\n[time]\nt_end = 1\n")
        assert self.run_cli("run", str(bad)).returncode == 1

        good = tmp_path / "good.ini"
        good.write_text(
            "[model]\nname = diffusive2x2\nexperiment = convergence\neps = 1e-6\n"
            "exact = heat\n"
            "[scheme]\nname = imex-midpoint-trapezoid\n"
            "[grid]\nsizes = 16, 32\nx_left = 0\nx_right = 6.283185307179586\n"
            "[time]\nt_end = 0.3\ndt_coeff = 0.25\ndt_power = 1\n"
            f"[output]\npath = {tmp_path / 'out.csv'}\n"
        )
        res = self.run_cli("run", str(good))
        assert res.returncode == 0
        text = (tmp_path / "out.csv").read_text()
        assert text.splitlines()[0] == CSV_HEADER

        aborting = tmp_path / "abort.ini"
        aborting.write_text(
            "[model]\nname = diffusive2x2\nexperiment = convergence\neps = 1e-6\n"
            "exact = heat\npenalized = false\n"
            "[scheme]\nname = imex-midpoint-trapezoid\n"
            "[grid]\nsizes = 64, 128\nx_left = 0\nx_right = 6.283185307179586\n"
            "[time]\nt_end = 20\ndt_coeff = 0.25\ndt_power = 1\n"
            "[output]\n"
        )
        assert self.run_cli("run", str(aborting)).returncode == 2

    def test_shipped_configs_parse(self):
        for name in os.listdir(CONFIG_DIR):
            cfg = load_config(os.path.join(CONFIG_DIR, name))
            assert cfg.t_end > 0
