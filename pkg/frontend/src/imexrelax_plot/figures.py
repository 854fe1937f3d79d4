"""Figure builders: error-vs-stepsize lines, order-vs-eps curves, and
steady-state profile overlays.

All numbers plotted come straight from the CSV (single source of truth);
the only computation here is axis transforms.  Output is deterministic:
fixed SVG hash salt, no embedded timestamps, axes limits derived from the
data alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")
matplotlib.rcParams["svg.hashsalt"] = "imexrelax-plot"

import matplotlib.pyplot as plt

from .csvdata import SchemaError, read_profiles, read_report

KINDS = ("error_vs_dt", "order_vs_eps", "profiles")


@dataclass
class FigureSpec:
    csv_path: str
    kind: str
    output_path: str
    components: list = field(default_factory=list)
    norm: str = "l1"
    logx: bool = True
    logy: bool = True
    nominal_order: float = 2.0
    eps: float | None = None
    dpi: int = 150

    def __post_init__(self):
        if self.kind not in KINDS:
            raise SchemaError(f"unknown figure kind {self.kind!r} (known: {KINDS})")


@dataclass
class RenderResult:
    output_path: str
    series: dict
    reference_slope: float | None = None


def _finite(rows, attr):
    return [r for r in rows if not math.isnan(getattr(r, attr))]


def _save(fig, spec):
    fig.savefig(spec.output_path, dpi=spec.dpi, metadata={"Date": None})
    plt.close(fig)


def _render_error_vs_dt(spec: FigureSpec) -> RenderResult:
    rows = read_report(spec.csv_path)
    rows = [r for r in rows if r.norm == spec.norm]
    if spec.eps is not None:
        rows = [r for r in rows if r.eps == spec.eps]
    components = spec.components or sorted({r.component for r in rows})
    fig, ax = plt.subplots(figsize=(5.5, 4.2))
    series = {}
    slopes = []
    for comp in components:
        pts = sorted(
            [(r.dt, r.error) for r in _finite(rows, "error") if r.component == comp],
            reverse=True,
        )
        if not pts:
            raise SchemaError(f"no rows for component {comp!r} / norm {spec.norm!r}")
        dts, errs = zip(*pts)
        ax.plot(dts, errs, "o-", label=comp)
        series[comp] = pts
        slopes.extend(r.order for r in _finite(rows, "order") if r.component == comp)
    ref = None
    if slopes:
        ref = slopes[-1]
        # slope triangle anchored at the last pair of the first component
        dts, errs = zip(*series[components[0]])
        if len(dts) >= 2:
            x1, x0 = dts[-2], dts[-1]
            y0 = errs[-1]
            y1 = y0 * (x1 / x0) ** ref
            ax.plot([x0, x1, x1, x0], [y0, y1, y0, y0], "k-", lw=0.8)
            ax.annotate(f"{ref:.1f}", xy=(x1, math.sqrt(y0 * y1)), fontsize=9)
    if spec.logx:
        ax.set_xscale("log")
    if spec.logy:
        ax.set_yscale("log")
    ax.set_xlabel("dt")
    ax.set_ylabel(f"error ({spec.norm})")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    _save(fig, spec)
    return RenderResult(spec.output_path, series, ref)


def _render_order_vs_eps(spec: FigureSpec) -> RenderResult:
    rows = read_report(spec.csv_path)
    rows = [r for r in rows if r.norm == spec.norm]
    components = spec.components or sorted({r.component for r in rows})
    fig, ax = plt.subplots(figsize=(5.5, 4.2))
    series = {}
    for comp in components:
        by_eps = {}
        for r in _finite(rows, "order"):
            if r.component == comp:
                by_eps.setdefault(r.eps, []).append(r.order)
        pts = sorted((eps, sum(v) / len(v)) for eps, v in by_eps.items())
        if not pts:
            raise SchemaError(f"no order rows for component {comp!r}")
        xs, ys = zip(*pts)
        ax.plot(xs, ys, "o-", label=comp)
        series[comp] = pts
    ax.axhline(spec.nominal_order, color="k", ls="--", lw=0.8,
               label=f"order {spec.nominal_order:g}")
    if spec.logx:
        ax.set_xscale("log")
    ax.set_xlabel("eps")
    ax.set_ylabel(f"observed order ({spec.norm})")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    _save(fig, spec)
    return RenderResult(spec.output_path, series, spec.nominal_order)


def _render_profiles(spec: FigureSpec) -> RenderResult:
    rows = read_profiles(spec.csv_path)
    components = spec.components or sorted({r["component"] for r in rows})
    fig, axes = plt.subplots(len(components), 1,
                             figsize=(5.5, 2.6 * len(components)), sharex=True)
    if len(components) == 1:
        axes = [axes]
    series = {}
    for ax, comp in zip(axes, components):
        sub = [r for r in rows if r["component"] == comp]
        if not sub:
            raise SchemaError(f"no profile rows for component {comp!r}")
        times = sorted({r["time"] for r in sub})
        for t in times:
            pts = sorted((r["x"], r["value"]) for r in sub if r["time"] == t)
            xs, ys = zip(*pts)
            ax.plot(xs, ys, lw=0.9, label=f"t={t:g}")
        steady = sorted({(r["x"], r["steady"]) for r in sub})
        xs, ys = zip(*steady)
        ax.plot(xs, ys, "k--", lw=1.2, label="steady")
        ax.set_ylabel(comp)
        ax.grid(True, alpha=0.3)
        series[comp] = times
    axes[0].legend(fontsize=7, ncol=2)
    axes[-1].set_xlabel("x")
    fig.tight_layout()
    _save(fig, spec)
    return RenderResult(spec.output_path, series)


def render(spec: FigureSpec) -> RenderResult:
    """Build the figure described by ``spec``; raises SchemaError (and
    writes nothing) when the CSV does not carry what the figure needs."""
    if spec.kind == "error_vs_dt":
        return _render_error_vs_dt(spec)
    if spec.kind == "order_vs_eps":
        return _render_order_vs_eps(spec)
    return _render_profiles(spec)
