"""IMEX double Butcher tableaux: validation, classification, property checks,
order conditions up to 3, and a plain-text scheme registry.

Conventions follow the usual additive Runge-Kutta writing: the explicit part
(Ã, b̃, c̃) is strictly lower triangular, the implicit part (A, b, c) is a
DIRK.  A pair advances

    Y_i  = y0 + h Σ_{j<i} ã_ij f(Y_j) + h Σ_{j<=i} a_ij g(Y_j)
    y1   = y0 + h Σ_i b̃_i f(Y_i)     + h Σ_i b_i g(Y_i)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

import numpy as np

from .errors import (
    RegistryParseError,
    StructuralTableauError,
    TableauValidationError,
    UnclassifiableTableauError,
)

ROWSUM_TOL = 1e-12
SA_TOL = 1e-12
DIAG_TOL = 1e-14
ORDER_TOL = 1e-10


@dataclass(frozen=True)
class ButcherTableau:
    A: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=float)
        b = np.asarray(self.b, dtype=float)
        c = np.asarray(self.c, dtype=float)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise StructuralTableauError(f"A must be square, got shape {A.shape}")
        s = A.shape[0]
        if b.shape != (s,) or c.shape != (s,):
            raise StructuralTableauError(
                f"b/c lengths {b.shape}/{c.shape} do not match stage count {s}"
            )

    @property
    def s(self) -> int:
        return self.A.shape[0]

    def row_sum_defects(self) -> np.ndarray:
        return self.c - self.A.sum(axis=1)


@dataclass(frozen=True)
class ImexTableau:
    explicit: ButcherTableau
    implicit: ButcherTableau
    name: str = ""

    def __post_init__(self):
        if self.explicit.s != self.implicit.s:
            raise StructuralTableauError(
                f"stage mismatch: explicit s={self.explicit.s}, implicit s={self.implicit.s}"
            )

    @property
    def s(self) -> int:
        return self.explicit.s


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def validate(t: ImexTableau) -> ValidationReport:
    """Shape, triangularity and row-sum checks.  Defects are reported,
    never silently repaired."""
    rep = ValidationReport()
    ex, im = t.explicit, t.implicit
    for i in range(ex.s):
        for j in range(i, ex.s):
            if ex.A[i, j] != 0.0:
                rep.violations.append(
                    f"explicit: Atilde[{i},{j}]={ex.A[i, j]!r} breaks strict lower triangularity"
                )
    for i in range(im.s):
        for j in range(i + 1, im.s):
            if im.A[i, j] != 0.0:
                rep.violations.append(
                    f"implicit: A[{i},{j}]={im.A[i, j]!r} breaks DIRK lower triangularity"
                )
    for label, bt in (("explicit", ex), ("implicit", im)):
        defects = bt.row_sum_defects()
        for i, d in enumerate(defects):
            if abs(d) > ROWSUM_TOL:
                rep.violations.append(
                    f"{label}: row-sum mismatch at stage {i}: c[{i}] - sum(A[{i},:]) = {d:.3e}"
                )
    return rep


@dataclass(frozen=True)
class TableauClass:
    kind: str  # "A" | "CK" | "ARS"
    diagnostic: str


def classify(t: ImexTableau) -> TableauClass:
    """Type A (A invertible), Type CK (zero first row, invertible trailing
    block), ARS (CK with zero first column).  DIRK invertibility reduces to
    nonzero diagonal entries."""
    A = t.implicit.A
    diag = np.abs(np.diag(A))
    if (diag > DIAG_TOL).all():
        return TableauClass("A", "implicit diagonal has no zero entry")
    first_row_zero = (np.abs(A[0, :]) <= DIAG_TOL).all()
    if first_row_zero:
        if (diag[1:] > DIAG_TOL).all():
            a_col = A[1:, 0]
            if (np.abs(a_col) <= DIAG_TOL).all():
                return TableauClass("ARS", "zero first row and first column; trailing block invertible")
            return TableauClass("CK", "zero first row; trailing block invertible; a != 0")
        raise UnclassifiableTableauError(
            "zero first row but singular trailing block (zero diagonal entry)"
        )
    raise UnclassifiableTableauError(
        "implicit diagonal has an interior zero without the CK zero first row"
    )


def is_stiffly_accurate(t: ButcherTableau) -> bool:
    """Last row of A equals the weights (the final stage is the update)."""
    return bool(np.max(np.abs(t.A[-1, :] - t.b)) <= SA_TOL)


def is_globally_stiffly_accurate(t: ImexTableau) -> bool:
    """Both parts stiffly accurate and the last abscissa equal to 1, so the
    IMEX update coincides with the last stage."""
    return (
        is_stiffly_accurate(t.explicit)
        and is_stiffly_accurate(t.implicit)
        and abs(t.explicit.c[-1] - 1.0) <= SA_TOL
        and abs(t.implicit.c[-1] - 1.0) <= SA_TOL
    )


@dataclass(frozen=True)
class OrderCondition:
    order: int
    ident: str
    value: float
    target: float
    nonstandard: bool = False

    @property
    def residual(self) -> float:
        return abs(self.value - self.target)

    @property
    def ok(self) -> bool:
        return self.residual <= ORDER_TOL


@dataclass
class PropertyReport:
    stiffly_accurate: bool
    globally_stiffly_accurate: bool
    satisfied_order: int
    failed_conditions: list  # (identifier, residual) with order <= target
    conditions: list  # all evaluated OrderCondition records
    nonstandard_coupling: bool  # c̃ != c, coupling terms flagged


def _conditions(t: ImexTableau, target_order: int):
    Ae, be, ce = t.explicit.A, t.explicit.b, t.explicit.c
    Ai, bi, ci = t.implicit.A, t.implicit.b, t.implicit.c
    same_c = bool(np.max(np.abs(ce - ci)) <= ROWSUM_TOL)
    conds = [
        OrderCondition(1, "ex:sum(b~)", float(be.sum()), 1.0),
        OrderCondition(1, "im:sum(b)", float(bi.sum()), 1.0),
    ]
    if target_order >= 2:
        mix = not same_c
        conds += [
            OrderCondition(2, "ex:b~.c~", float(be @ ce), 0.5),
            OrderCondition(2, "im:b.c", float(bi @ ci), 0.5),
            OrderCondition(2, "mix:b~.c", float(be @ ci), 0.5, mix),
            OrderCondition(2, "mix:b.c~", float(bi @ ce), 0.5, mix),
        ]
    if target_order >= 3:
        mix = not same_c
        third = 1.0 / 3.0
        sixth = 1.0 / 6.0
        conds += [
            OrderCondition(3, "ex:b~.c~^2", float(be @ (ce * ce)), third),
            OrderCondition(3, "im:b.c^2", float(bi @ (ci * ci)), third),
            OrderCondition(3, "mix:b~.c~c", float(be @ (ce * ci)), third, mix),
            OrderCondition(3, "mix:b~.cc", float(be @ (ci * ci)), third, mix),
            OrderCondition(3, "mix:b.c~c~", float(bi @ (ce * ce)), third, mix),
            OrderCondition(3, "mix:b.c~c", float(bi @ (ce * ci)), third, mix),
            OrderCondition(3, "ex:b~.A~.c~", float(be @ Ae @ ce), sixth),
            OrderCondition(3, "im:b.A.c", float(bi @ Ai @ ci), sixth),
            OrderCondition(3, "mix:b~.A~.c", float(be @ Ae @ ci), sixth, mix),
            OrderCondition(3, "mix:b~.A.c~", float(be @ Ai @ ce), sixth, mix),
            OrderCondition(3, "mix:b~.A.c", float(be @ Ai @ ci), sixth, mix),
            OrderCondition(3, "mix:b.A~.c~", float(bi @ Ae @ ce), sixth, mix),
            OrderCondition(3, "mix:b.A~.c", float(bi @ Ae @ ci), sixth, mix),
            OrderCondition(3, "mix:b.A.c~", float(bi @ Ai @ ce), sixth, mix),
        ]
    return conds, same_c


def _single_conditions(bt: ButcherTableau, target_order: int):
    A, b, c = bt.A, bt.b, bt.c
    conds = [OrderCondition(1, "sum(b)", float(b.sum()), 1.0)]
    if target_order >= 2:
        conds.append(OrderCondition(2, "b.c", float(b @ c), 0.5))
    if target_order >= 3:
        conds.append(OrderCondition(3, "b.c^2", float(b @ (c * c)), 1.0 / 3.0))
        conds.append(OrderCondition(3, "b.A.c", float(b @ A @ c), 1.0 / 6.0))
    return conds


def check_order_conditions(t, target_order: int = 3) -> PropertyReport:
    """Classical additive order conditions up to order 3 (component plus all
    explicit/implicit couplings).  A single ButcherTableau is checked
    against its own component conditions only."""
    if not 1 <= target_order <= 3:
        raise ValueError("target_order must be 1, 2 or 3")
    if isinstance(t, ButcherTableau):
        conds = _single_conditions(t, target_order)
        satisfied = 0
        for k in range(1, target_order + 1):
            if all(c.ok for c in conds if c.order <= k):
                satisfied = k
            else:
                break
        return PropertyReport(
            stiffly_accurate=is_stiffly_accurate(t),
            globally_stiffly_accurate=False,
            satisfied_order=satisfied,
            failed_conditions=[(c.ident, c.residual) for c in conds if not c.ok],
            conditions=conds,
            nonstandard_coupling=False,
        )
    conds, same_c = _conditions(t, target_order)
    satisfied = 0
    for k in range(1, target_order + 1):
        if all(c.ok for c in conds if c.order <= k):
            satisfied = k
        else:
            break
    failed = [(c.ident, c.residual) for c in conds if not c.ok]
    return PropertyReport(
        stiffly_accurate=is_stiffly_accurate(t.implicit),
        globally_stiffly_accurate=is_globally_stiffly_accurate(t),
        satisfied_order=satisfied,
        failed_conditions=failed,
        conditions=conds,
        nonstandard_coupling=not same_c,
    )


# ---------------------------------------------------------------------------
# Registry: plain text, one scheme per block.
#
#   scheme <name> stages <s>
#   Atilde:  (s rows)   btilde: / ctilde:  (one row)
#   A:       (s rows)   b: / c:            (one row)
#
# Decimal or rational (p/q) literals; '#' starts a comment.
# ---------------------------------------------------------------------------

_FIELD_ORDER = ("Atilde", "btilde", "ctilde", "A", "b", "c")


def _parse_number(tok: str, lineno: int) -> float:
    try:
        if "/" in tok:
            return float(Fraction(tok))
        return float(tok)
    except (ValueError, ZeroDivisionError) as exc:
        raise RegistryParseError(f"line {lineno}: bad numeric literal {tok!r}") from exc


def parse_registry(text: str) -> dict:
    """Parse every scheme block in ``text``; returns name -> ImexTableau."""
    lines = text.splitlines()
    stripped = []
    for idx, raw in enumerate(lines, start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            stripped.append((idx, body))

    schemes = {}
    pos = 0
    while pos < len(stripped):
        lineno, line = stripped[pos]
        toks = line.split()
        if len(toks) != 4 or toks[0] != "scheme" or toks[2] != "stages":
            raise RegistryParseError(
                f"line {lineno}: expected 'scheme <name> stages <s>', got {line!r}"
            )
        name = toks[1]
        try:
            s = int(toks[3])
        except ValueError as exc:
            raise RegistryParseError(f"line {lineno}: bad stage count {toks[3]!r}") from exc
        if s < 1:
            raise RegistryParseError(f"line {lineno}: stage count must be >= 1")
        pos += 1
        fields = {}
        for fname in _FIELD_ORDER:
            nrows = s if fname in ("Atilde", "A") else 1
            if pos >= len(stripped):
                raise RegistryParseError(
                    f"scheme {name!r}: missing field '{fname}:' (end of file)"
                )
            lineno, line = stripped[pos]
            if line.rstrip(":") != fname or not line.endswith(":"):
                raise RegistryParseError(
                    f"line {lineno}: scheme {name!r}: expected '{fname}:', got {line!r}"
                )
            pos += 1
            rows = []
            for r in range(nrows):
                if pos >= len(stripped):
                    raise RegistryParseError(
                        f"scheme {name!r}: field {fname}: missing row {r + 1} of {nrows}"
                    )
                lineno, line = stripped[pos]
                vals = [_parse_number(tok, lineno) for tok in line.split()]
                if len(vals) != s:
                    raise RegistryParseError(
                        f"line {lineno}: scheme {name!r}: field {fname} row {r + 1} "
                        f"has {len(vals)} entries, expected {s}"
                    )
                rows.append(vals)
                pos += 1
            is_matrix = fname in ("Atilde", "A")
            fields[fname] = np.array(rows) if is_matrix else np.array(rows[0])
        tab = ImexTableau(
            explicit=ButcherTableau(fields["Atilde"], fields["btilde"], fields["ctilde"]),
            implicit=ButcherTableau(fields["A"], fields["b"], fields["c"]),
            name=name,
        )
        rep = validate(tab)
        if not rep.ok:
            raise TableauValidationError(
                f"scheme {name!r} failed validation:\n  " + "\n  ".join(rep.violations)
            )
        if name in schemes:
            raise RegistryParseError(f"duplicate scheme name {name!r}")
        schemes[name] = tab
    return schemes


def load_tableau(text: str, name: str | None = None) -> ImexTableau:
    """Parse registry text and return one validated scheme."""
    schemes = parse_registry(text)
    if not schemes:
        raise RegistryParseError("no scheme blocks found")
    if name is None:
        if len(schemes) > 1:
            raise RegistryParseError(
                f"registry holds {len(schemes)} schemes, pass a name: {sorted(schemes)}"
            )
        return next(iter(schemes.values()))
    try:
        return schemes[name]
    except KeyError:
        raise KeyError(
            f"scheme {name!r} not in registry (available: {sorted(schemes)})"
        ) from None


def serialize(t: ImexTableau) -> str:
    """Registry text for one scheme; decimal literals round-trip bit-exactly."""
    out = [f"scheme {t.name or 'unnamed'} stages {t.s}"]

    def emit_matrix(label, M):
        out.append(label + ":")
        for row in M:
            out.append(" ".join(repr(float(v)) for v in row))

    def emit_vector(label, v):
        out.append(label + ":")
        out.append(" ".join(repr(float(x)) for x in v))

    emit_matrix("Atilde", t.explicit.A)
    emit_vector("btilde", t.explicit.b)
    emit_vector("ctilde", t.explicit.c)
    emit_matrix("A", t.implicit.A)
    emit_vector("b", t.implicit.b)
    emit_vector("c", t.implicit.c)
    return "\n".join(out) + "\n"


def shipped_registry_text() -> str:
    return resources.files("imexrelax").joinpath("schemes.txt").read_text()


def shipped_registry() -> dict:
    return parse_registry(shipped_registry_text())


def get_scheme(name: str, registry_path: str | None = None) -> ImexTableau:
    """Look up a scheme by name in a registry file (default: shipped)."""
    if registry_path is None:
        text = shipped_registry_text()
    else:
        with open(registry_path) as fh:
            text = fh.read()
    return load_tableau(text, name)
