"""Hot numeric kernels: WENO reconstruction, Thomas solves, pointwise Newton.

Every kernel exists twice: a vectorized pure-numpy version and a loop
version compiled with numba ``@njit``.  The active backend is chosen once
at import time from the ``IMEXRELAX_NUMBA`` environment variable
("0"/"false" forces the numpy path; default is numba when importable).
``benchmarks/bench_kernels.py`` compares the two.
"""

from __future__ import annotations

import os

import numpy as np

WENO_EPS = 1e-6  # smoothness-indicator floor, dx-independent

_FLAG = os.environ.get("IMEXRELAX_NUMBA", "1").strip().lower()
_WANT_NUMBA = _FLAG not in ("0", "false", "no", "off")

try:  # pragma: no cover - exercised via env flag
    if _WANT_NUMBA:
        from numba import njit

        USING_NUMBA = True
    else:
        raise ImportError
except ImportError:  # pragma: no cover
    USING_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


# ---------------------------------------------------------------------------
# WENO reconstruction, Jiang-Shu smoothness indicators.
#
# Stencil conventions (i indexes the padded array):
#   weno5 left-biased  value at x_{i+1/2} uses cells i-2 .. i+2
#   weno5 right-biased value at x_{i+1/2} uses cells i-1 .. i+3
#   weno3 left-biased  uses i-1 .. i+1, right-biased uses i .. i+2
# Outputs cover every interface with a complete stencil.
# ---------------------------------------------------------------------------


def _weno5_left_np(f):
    fm2, fm1, f0, fp1, fp2 = f[:-4], f[1:-3], f[2:-2], f[3:-1], f[4:]
    q0 = (2.0 * fm2 - 7.0 * fm1 + 11.0 * f0) / 6.0
    q1 = (-fm1 + 5.0 * f0 + 2.0 * fp1) / 6.0
    q2 = (2.0 * f0 + 5.0 * fp1 - fp2) / 6.0
    b0 = 13.0 / 12.0 * (fm2 - 2.0 * fm1 + f0) ** 2 + 0.25 * (fm2 - 4.0 * fm1 + 3.0 * f0) ** 2
    b1 = 13.0 / 12.0 * (fm1 - 2.0 * f0 + fp1) ** 2 + 0.25 * (fm1 - fp1) ** 2
    b2 = 13.0 / 12.0 * (f0 - 2.0 * fp1 + fp2) ** 2 + 0.25 * (3.0 * f0 - 4.0 * fp1 + fp2) ** 2
    a0 = 0.1 / (WENO_EPS + b0) ** 2
    a1 = 0.6 / (WENO_EPS + b1) ** 2
    a2 = 0.3 / (WENO_EPS + b2) ** 2
    s = a0 + a1 + a2
    return (a0 * q0 + a1 * q1 + a2 * q2) / s


def _weno5_right_np(f):
    # mirror image of the left-biased stencil about the interface
    return _weno5_left_np(f[::-1])[::-1]


def _weno3_left_np(f):
    fm1, f0, fp1 = f[:-2], f[1:-1], f[2:]
    q0 = (-fm1 + 3.0 * f0) / 2.0
    q1 = (f0 + fp1) / 2.0
    b0 = (f0 - fm1) ** 2
    b1 = (fp1 - f0) ** 2
    a0 = (1.0 / 3.0) / (WENO_EPS + b0) ** 2
    a1 = (2.0 / 3.0) / (WENO_EPS + b1) ** 2
    return (a0 * q0 + a1 * q1) / (a0 + a1)


def _weno3_right_np(f):
    return _weno3_left_np(f[::-1])[::-1]


@njit(cache=True)
def _weno5_left_nb(f):  # pragma: no cover - numba path
    m = f.shape[0] - 4
    out = np.empty(m)
    for k in range(m):
        fm2, fm1, f0, fp1, fp2 = f[k], f[k + 1], f[k + 2], f[k + 3], f[k + 4]
        q0 = (2.0 * fm2 - 7.0 * fm1 + 11.0 * f0) / 6.0
        q1 = (-fm1 + 5.0 * f0 + 2.0 * fp1) / 6.0
        q2 = (2.0 * f0 + 5.0 * fp1 - fp2) / 6.0
        b0 = 13.0 / 12.0 * (fm2 - 2.0 * fm1 + f0) ** 2 + 0.25 * (fm2 - 4.0 * fm1 + 3.0 * f0) ** 2
        b1 = 13.0 / 12.0 * (fm1 - 2.0 * f0 + fp1) ** 2 + 0.25 * (fm1 - fp1) ** 2
        b2 = 13.0 / 12.0 * (f0 - 2.0 * fp1 + fp2) ** 2 + 0.25 * (3.0 * f0 - 4.0 * fp1 + fp2) ** 2
        a0 = 0.1 / (WENO_EPS + b0) ** 2
        a1 = 0.6 / (WENO_EPS + b1) ** 2
        a2 = 0.3 / (WENO_EPS + b2) ** 2
        out[k] = (a0 * q0 + a1 * q1 + a2 * q2) / (a0 + a1 + a2)
    return out


@njit(cache=True)
def _weno5_right_nb(f):  # pragma: no cover
    m = f.shape[0] - 4
    out = np.empty(m)
    for k in range(m):
        fm1, f0, fp1, fp2, fp3 = f[k], f[k + 1], f[k + 2], f[k + 3], f[k + 4]
        q0 = (2.0 * fp3 - 7.0 * fp2 + 11.0 * fp1) / 6.0
        q1 = (-fp2 + 5.0 * fp1 + 2.0 * f0) / 6.0
        q2 = (2.0 * fp1 + 5.0 * f0 - fm1) / 6.0
        b0 = 13.0 / 12.0 * (fp3 - 2.0 * fp2 + fp1) ** 2 + 0.25 * (fp3 - 4.0 * fp2 + 3.0 * fp1) ** 2
        b1 = 13.0 / 12.0 * (fp2 - 2.0 * fp1 + f0) ** 2 + 0.25 * (fp2 - f0) ** 2
        b2 = 13.0 / 12.0 * (fp1 - 2.0 * f0 + fm1) ** 2 + 0.25 * (3.0 * fp1 - 4.0 * f0 + fm1) ** 2
        a0 = 0.1 / (WENO_EPS + b0) ** 2
        a1 = 0.6 / (WENO_EPS + b1) ** 2
        a2 = 0.3 / (WENO_EPS + b2) ** 2
        out[k] = (a0 * q0 + a1 * q1 + a2 * q2) / (a0 + a1 + a2)
    return out


@njit(cache=True)
def _weno3_left_nb(f):  # pragma: no cover
    m = f.shape[0] - 2
    out = np.empty(m)
    for k in range(m):
        fm1, f0, fp1 = f[k], f[k + 1], f[k + 2]
        q0 = (-fm1 + 3.0 * f0) / 2.0
        q1 = (f0 + fp1) / 2.0
        a0 = (1.0 / 3.0) / (WENO_EPS + (f0 - fm1) ** 2) ** 2
        a1 = (2.0 / 3.0) / (WENO_EPS + (fp1 - f0) ** 2) ** 2
        out[k] = (a0 * q0 + a1 * q1) / (a0 + a1)
    return out


@njit(cache=True)
def _weno3_right_nb(f):  # pragma: no cover
    m = f.shape[0] - 2
    out = np.empty(m)
    for k in range(m):
        f0, fp1, fp2 = f[k], f[k + 1], f[k + 2]
        q0 = (3.0 * fp1 - fp2) / 2.0
        q1 = (fp1 + f0) / 2.0
        a0 = (1.0 / 3.0) / (WENO_EPS + (fp2 - fp1) ** 2) ** 2
        a1 = (2.0 / 3.0) / (WENO_EPS + (fp1 - f0) ** 2) ** 2
        out[k] = (a0 * q0 + a1 * q1) / (a0 + a1)
    return out


# ---------------------------------------------------------------------------
# Thomas algorithm.  Status code 0 = ok, k+1 = zero pivot at row k.
# lower[0] and upper[-1] are ignored by the plain solve; the cyclic wrapper
# reads them as the two corner entries.
# ---------------------------------------------------------------------------


def _thomas_np(lower, diag, upper, rhs):
    n = diag.shape[0]
    x = np.empty(n)
    cp = np.empty(n)
    piv = diag[0]
    if not np.isfinite(piv) or abs(piv) < 1e-300:
        return x, 1
    cp[0] = upper[0] / piv
    x[0] = rhs[0] / piv
    for k in range(1, n):
        piv = diag[k] - lower[k] * cp[k - 1]
        if not np.isfinite(piv) or abs(piv) < 1e-300:
            return x, k + 1
        cp[k] = upper[k] / piv
        x[k] = (rhs[k] - lower[k] * x[k - 1]) / piv
    for k in range(n - 2, -1, -1):
        x[k] -= cp[k] * x[k + 1]
    return x, 0


@njit(cache=True)
def _thomas_nb(lower, diag, upper, rhs):  # pragma: no cover
    n = diag.shape[0]
    x = np.empty(n)
    cp = np.empty(n)
    piv = diag[0]
    if not np.isfinite(piv) or abs(piv) < 1e-300:
        return x, 1
    cp[0] = upper[0] / piv
    x[0] = rhs[0] / piv
    for k in range(1, n):
        piv = diag[k] - lower[k] * cp[k - 1]
        if not np.isfinite(piv) or abs(piv) < 1e-300:
            return x, k + 1
        cp[k] = upper[k] / piv
        x[k] = (rhs[k] - lower[k] * x[k - 1]) / piv
    for k in range(n - 2, -1, -1):
        x[k] -= cp[k] * x[k + 1]
    return x, 0


# ---------------------------------------------------------------------------
# Pointwise monotone source solve: v + theta*|v|^(m-1)*v = r per cell.
# Safeguarded Newton; the root is always bracketed by (0, r) since the
# map is monotone increasing and passes through the origin.
# ---------------------------------------------------------------------------


def _solve_abs_power_np(r, theta, m, tol, maxiter):
    v = r / (1.0 + theta)
    lo = np.minimum(r, 0.0)
    hi = np.maximum(r, 0.0)
    iters = 0
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        for it in range(maxiter):
            av = np.abs(v)
            phi = v + theta * np.sign(v) * av**m - r
            done = np.abs(phi) <= tol * (1.0 + np.abs(r))
            iters = it + 1
            if done.all():
                return v, iters, True
            lo = np.where(phi < 0.0, v, lo)
            hi = np.where(phi > 0.0, v, hi)
            dphi = 1.0 + theta * m * av ** (m - 1.0)
            with np.errstate(all="ignore"):
                vn = np.where(np.isfinite(dphi), v - phi / dphi, np.nan)
            bad = ~np.isfinite(vn) | (vn <= lo) | (vn >= hi) | (vn == v)
            v = np.where(done, v, np.where(bad, 0.5 * (lo + hi), vn))
        av = np.abs(v)
        phi = v + theta * np.sign(v) * av**m - r
    return v, iters, bool((np.abs(phi) <= tol * (1.0 + np.abs(r))).all())


@njit(cache=True)
def _solve_abs_power_nb(r, theta, m, tol, maxiter):  # pragma: no cover
    n = r.shape[0]
    v = np.empty(n)
    ok = True
    worst = 0
    for j in range(n):
        rj = r[j]
        lo = min(rj, 0.0)
        hi = max(rj, 0.0)
        vj = rj / (1.0 + theta)
        converged = False
        it = 0
        for it in range(maxiter):
            avj = abs(vj)
            sg = 1.0 if vj >= 0.0 else -1.0
            phi = vj + theta * sg * avj**m - rj
            if abs(phi) <= tol * (1.0 + abs(rj)):
                converged = True
                break
            if phi < 0.0:
                lo = vj
            else:
                hi = vj
            dphi = 1.0 + theta * m * avj ** (m - 1.0)
            if np.isfinite(dphi) and dphi > 0.0:
                vn = vj - phi / dphi
            else:
                vn = 0.5 * (lo + hi)
            if not np.isfinite(vn) or vn <= lo or vn >= hi or vn == vj:
                vn = 0.5 * (lo + hi)
            vj = vn
        v[j] = vj
        if not converged:
            ok = False
        if it > worst:
            worst = it
    return v, worst + 1, ok


_NUMPY_BACKEND = {
    "weno5_left": _weno5_left_np,
    "weno5_right": _weno5_right_np,
    "weno3_left": _weno3_left_np,
    "weno3_right": _weno3_right_np,
    "thomas": _thomas_np,
    "solve_abs_power": _solve_abs_power_np,
}

_NUMBA_BACKEND = {
    "weno5_left": _weno5_left_nb,
    "weno5_right": _weno5_right_nb,
    "weno3_left": _weno3_left_nb,
    "weno3_right": _weno3_right_nb,
    "thomas": _thomas_nb,
    "solve_abs_power": _solve_abs_power_nb,
}


def get_backend(name):
    """Return the kernel namespace for backend ``name`` ("numpy"/"numba")."""
    if name == "numpy":
        return _NUMPY_BACKEND
    if name == "numba":
        if not USING_NUMBA:
            raise RuntimeError("numba backend requested but numba is disabled/unavailable")
        return _NUMBA_BACKEND
    raise ValueError(f"unknown backend {name!r}")


_ACTIVE = _NUMBA_BACKEND if USING_NUMBA else _NUMPY_BACKEND

weno5_left = _ACTIVE["weno5_left"]
weno5_right = _ACTIVE["weno5_right"]
weno3_left = _ACTIVE["weno3_left"]
weno3_right = _ACTIVE["weno3_right"]
thomas = _ACTIVE["thomas"]
solve_abs_power = _ACTIVE["solve_abs_power"]
