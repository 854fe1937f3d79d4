"""imexrelax-plot <spec-file>

Spec files use the same key = value format as the solver configs:

    [figure]
    kind = order_vs_eps          ; error_vs_dt | order_vs_eps | profiles
    csv = sweep.csv
    output = sweep.svg
    components = u, v, w         ; optional, default: everything in the CSV
    norm = l1                    ; report-CSV kinds only
    nominal_order = 2            ; order_vs_eps reference line
    logx = true
    logy = true                  ; error_vs_dt only
    eps = 1e-4                   ; optional error_vs_dt filter
"""

from __future__ import annotations

import argparse
import configparser
import sys

from .csvdata import SchemaError
from .figures import FigureSpec, render


def load_spec(path: str) -> FigureSpec:
    parser = configparser.ConfigParser()
    if not parser.read(path):
        raise SchemaError(f"spec file not found: {path}")
    if not parser.has_section("figure"):
        raise SchemaError(f"{path}: missing [figure] section")
    sec = parser["figure"]
    try:
        components = [c.strip() for c in sec.get("components", "").split(",") if c.strip()]
        return FigureSpec(
            csv_path=sec["csv"],
            kind=sec["kind"],
            output_path=sec["output"],
            components=components,
            norm=sec.get("norm", "l1"),
            logx=sec.getboolean("logx", True),
            logy=sec.getboolean("logy", True),
            nominal_order=sec.getfloat("nominal_order", 2.0),
            eps=sec.getfloat("eps") if "eps" in sec else None,
            dpi=sec.getint("dpi", 150),
        )
    except KeyError as exc:
        raise SchemaError(f"{path}: missing key {exc}") from exc


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="imexrelax-plot",
                                     description="figures from imexrelax CSV reports")
    parser.add_argument("spec")
    args = parser.parse_args(argv)
    try:
        result = render(load_spec(args.spec))
    except (SchemaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {result.output_path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
