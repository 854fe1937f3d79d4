"""Readers for the solver's CSV interfaces.

Report schema:   model,scheme,eps,N,dt,component,norm,error,order,flag,seconds
Profile schema:  x,component,time,value,steady
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass


class SchemaError(Exception):
    """CSV does not match the expected schema; names the offending column."""


REPORT_COLUMNS = [
    "model", "scheme", "eps", "N", "dt", "component",
    "norm", "error", "order", "flag", "seconds",
]
PROFILE_COLUMNS = ["x", "component", "time", "value", "steady"]

_FLOAT_FIELDS = ("eps", "dt", "error", "order", "seconds")
_INT_FIELDS = ("N",)


@dataclass
class ReportRow:
    model: str
    scheme: str
    eps: float
    N: int
    dt: float
    component: str
    norm: str
    error: float
    order: float
    flag: str
    seconds: float


def _check_header(header, expected, path):
    if header is None:
        raise SchemaError(f"{path}: empty CSV, nothing to plot")
    missing = [c for c in expected if c not in header]
    if missing:
        raise SchemaError(f"{path}: missing column '{missing[0]}'")


def read_report(path: str) -> list[ReportRow]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        _check_header(reader.fieldnames, REPORT_COLUMNS, path)
        rows = []
        for rec in reader:
            kwargs = {}
            for col in REPORT_COLUMNS:
                raw = rec[col]
                if col in _FLOAT_FIELDS:
                    kwargs[col] = float(raw) if raw not in ("", None) else math.nan
                elif col in _INT_FIELDS:
                    kwargs[col] = int(raw)
                else:
                    kwargs[col] = raw
            rows.append(ReportRow(**kwargs))
    if not rows:
        raise SchemaError(f"{path}: header only, no data rows")
    return rows


def read_profiles(path: str):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        _check_header(reader.fieldnames, PROFILE_COLUMNS, path)
        rows = [
            {
                "x": float(rec["x"]),
                "component": rec["component"],
                "time": float(rec["time"]),
                "value": float(rec["value"]),
                "steady": float(rec["steady"]),
            }
            for rec in reader
        ]
    if not rows:
        raise SchemaError(f"{path}: header only, no data rows")
    return rows
