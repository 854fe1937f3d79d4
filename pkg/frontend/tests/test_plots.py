"""Figure generation from CSV fixtures: files produced, slopes from the CSV,
schema errors name the offending column, rendering is read-only."""

import os
import subprocess
import sys

import pytest

from imexrelax_plot import FigureSpec, SchemaError, render
from imexrelax_plot.cli import load_spec, main

FIXTURES = os.path.join(os.path.dirname(__file__), "..", "fixtures")
TABLE1 = os.path.join(FIXTURES, "table1.csv")


def test_order_vs_eps_from_table_fixture(tmp_path):
    out = tmp_path / "orders.svg"
    result = render(FigureSpec(TABLE1, "order_vs_eps", str(out),
                               components=["u", "v", "w"], nominal_order=2.0))
    assert out.exists() and out.stat().st_size > 0
    # plotted points are exactly the CSV orders
    assert result.series["u"] == [(0.01, 2.121)]
    assert result.series["v"] == [(0.01, 1.978)]
    assert result.series["w"] == [(0.01, 2.036)]


def test_error_vs_dt_slope_matches_csv(tmp_path):
    out = tmp_path / "errs.svg"
    result = render(FigureSpec(TABLE1, "error_vs_dt", str(out), components=["u"]))
    assert out.exists() and out.stat().st_size > 0
    assert result.reference_slope == pytest.approx(2.121)
    # two (dt, error) points per component, descending dt
    pts = result.series["u"]
    assert len(pts) == 2 and pts[0][0] > pts[1][0]


def test_single_pair_slope_triangle_label(tmp_path):
    csv = tmp_path / "two.csv"
    csv.write_text(
        "model,scheme,eps,N,dt,component,norm,error,order,flag,seconds\n"
        "m,s,1e-4,10,0.1,u,l1,9e-2,nan,,0.1\n"
        "m,s,1e-4,30,0.03333333333333333,u,l1,1e-2,2.0,,0.1\n"
    )
    result = render(FigureSpec(str(csv), "error_vs_dt", str(tmp_path / "t.svg")))
    assert result.reference_slope == pytest.approx(2.0)  # log3(9e-2/1e-2)


def test_empty_csv_schema_error_and_no_file(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    out = tmp_path / "never.svg"
    with pytest.raises(SchemaError):
        render(FigureSpec(str(empty), "order_vs_eps", str(out)))
    assert not out.exists()


def test_missing_column_named(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("model,scheme,eps,N,dt,component,norm,error,flag,seconds\n")
    with pytest.raises(SchemaError, match="order"):
        render(FigureSpec(str(bad), "order_vs_eps", str(tmp_path / "x.svg")))


def test_rendering_is_read_only_and_deterministic(tmp_path):
    before = open(TABLE1, "rb").read()
    out1 = tmp_path / "a.svg"
    out2 = tmp_path / "b.svg"
    render(FigureSpec(TABLE1, "order_vs_eps", str(out1)))
    render(FigureSpec(TABLE1, "order_vs_eps", str(out2)))
    assert open(TABLE1, "rb").read() == before
    assert out1.read_bytes() == out2.read_bytes()


def test_profiles_kind(tmp_path):
    csv = tmp_path / "profiles.csv"
    lines = ["x,component,time,value,steady"]
    for comp in ("u", "v"):
        for t in (0.5, 1.0):
            for j in range(8):
                x = -1 + (j + 0.5) / 4.0
                lines.append(f"{x},{comp},{t},{x * x + t},{x * x}")
    csv.write_text("\n".join(lines) + "\n")
    out = tmp_path / "profiles.svg"
    result = render(FigureSpec(str(csv), "profiles", str(out), components=["u", "v"]))
    assert out.exists()
    assert result.series["u"] == [0.5, 1.0]


def test_cli_roundtrip(tmp_path):
    spec = tmp_path / "fig.ini"
    out = tmp_path / "fig.svg"
    spec.write_text(
        f"[figure]\nkind = order_vs_eps\ncsv = {TABLE1}\noutput = {out}\n"
        "components = u, v, w\nnominal_order = 2\n"
    )
    assert main([str(spec)]) == 0
    assert out.exists()
    loaded = load_spec(str(spec))
    assert loaded.kind == "order_vs_eps"

    missing = tmp_path / "missing.ini"
    missing.write_text("[figure]\nkind = order_vs_eps\ncsv = /nope.csv\noutput = x.svg\n")
    assert main([str(missing)]) != 0


def test_cli_entry_point_subprocess(tmp_path):
    spec = tmp_path / "fig.ini"
    out = tmp_path / "fig.svg"
    spec.write_text(
        f"[figure]\nkind = error_vs_dt\ncsv = {TABLE1}\noutput = {out}\nnorm = l1\n"
    )
    res = subprocess.run([sys.executable, "-m", "imexrelax_plot.cli", str(spec)],
                         capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert out.exists()
