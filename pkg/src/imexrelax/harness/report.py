"""Experiment report rows and CSV persistence.

CSV schema (one header row, comma separated, '.' decimal, scientific
notation allowed):

    model,scheme,eps,N,dt,component,norm,error,order,flag,seconds

`flag` is empty for clean cells, 'abort' for blow-ups (error = nan) and
'degraded' where an observed order fell below the configured floor.
Steady-state and demo studies use namespaced component labels (see the
study docstrings); every row always carries the full parameter tuple.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

CSV_HEADER = "model,scheme,eps,N,dt,component,norm,error,order,flag,seconds"

FLAG_ABORT = "abort"
FLAG_DEGRADED = "degraded"


def _fmt(x) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return "nan"
    return repr(float(x))


@dataclass
class ReportRow:
    model: str
    scheme: str
    eps: float
    n: int
    dt: float
    component: str
    norm: str
    error: float
    order: float = float("nan")
    flag: str = ""
    seconds: float = 0.0

    def to_csv(self) -> str:
        return ",".join(
            [
                self.model,
                self.scheme,
                _fmt(self.eps),
                str(int(self.n)),
                _fmt(self.dt),
                self.component,
                self.norm,
                _fmt(self.error),
                _fmt(self.order),
                self.flag,
                f"{self.seconds:.3f}",
            ]
        )


@dataclass
class ExperimentReport:
    rows: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    def add(self, row: ReportRow):
        self.rows.append(row)

    @property
    def aborted(self) -> bool:
        return any(r.flag == FLAG_ABORT for r in self.rows)

    def to_csv(self) -> str:
        return "\n".join([CSV_HEADER] + [r.to_csv() for r in self.rows]) + "\n"

    def write_csv(self, path: str):
        with open(path, "w") as fh:
            fh.write(self.to_csv())

    def select(self, **match):
        out = []
        for r in self.rows:
            if all(getattr(r, k) == v for k, v in match.items()):
                out.append(r)
        return out
