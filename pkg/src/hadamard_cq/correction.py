"""Startup correction coefficients for fractional BDF-p with log-power sources.

For a source f = f(a) + (log(t/a))^beta g, the first p-1 steps receive
b_n * (Delta_h v_h + f_h(a)) + sum_j d_{j,n} tau^(j+beta) delta^j g_h(a).
The d_{j,n} come from the expansion of the polylogarithm Li_{-(j+beta)}
around zeta = 1, whose regular part is a series in zeta(-j-k-beta).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .cq import bdf_symbol
from .special_functions import polylog, zeta, zeta_rational

__all__ = [
    "CorrectionTable",
    "c_coeff",
    "c_row",
    "correction_table",
    "eval_mu",
    "eval_beta_j",
]


@lru_cache(maxsize=None)
def _log_powers(K: int) -> tuple[tuple[Fraction, ...], ...]:
    """[u^k] of (log(1-u))^m / m! for m, k = 0..K, exact."""
    log1m = [Fraction(0)] + [Fraction(-1, i) for i in range(1, K + 1)]
    rows = [tuple([Fraction(1)] + [Fraction(0)] * K)]
    cur = list(rows[0])
    for m in range(1, K + 1):
        nxt = [Fraction(0)] * (K + 1)
        for i, ci in enumerate(cur):
            if ci:
                for l in range(1, K + 1 - i):
                    nxt[i + l] += ci * log1m[l]
        cur = nxt
        rows.append(tuple(c / math.factorial(m) for c in cur))
    return tuple(rows)


def _check_beta(beta: float) -> float:
    if not 0.0 <= beta < 1.0:
        raise ValueError(f"beta must lie in [0, 1), got {beta}")
    return float(beta)


def c_row(j: int, K: int, beta: float) -> list:
    """c_{j,0..K}: coefficients of (1 - zeta)^k in (1/j!) sum_m zeta_R(-j-m-beta) (log zeta)^m / m!.

    With ``beta == 0`` the entries are exact Fractions (zeta at nonpositive
    integers is rational); otherwise floats.
    """
    beta = _check_beta(beta)
    lp = _log_powers(K)
    exact = beta == 0.0
    if exact:
        zvals = [zeta_rational(-j - m) for m in range(K + 1)]
    else:
        zvals = [zeta(-j - m - beta) for m in range(K + 1)]
    out = []
    for k in range(K + 1):
        acc = Fraction(0) if exact else 0.0
        for m in range(k + 1):
            coef = lp[m][k]
            if coef:
                acc += zvals[m] * (coef if exact else float(coef))
        out.append(acc / math.factorial(j))
    return out


def c_coeff(j: int, k: int, beta: float) -> float:
    if j < 0 or k < 0:
        raise ValueError("indices must be nonnegative")
    return float(c_row(j, k, beta)[k])


@dataclass(frozen=True)
class CorrectionTable:
    """b[n-1] = b_n and d[j, n-1] = d_{j,n} for n = 1..p-1, j = 0..p-2.

    ``b_exact``/``d_exact`` hold Fractions when they are rational (always for
    b; for d only when beta == 0).
    """

    p: int
    beta: float
    b: np.ndarray
    d: np.ndarray
    b_exact: tuple
    d_exact: tuple | None


def _d_rows(p: int, beta: float) -> list[list]:
    rows = []
    for j in range(p - 1):
        c = c_row(j, p - 2, beta)
        zero = c[0] * 0
        # eta_{j,0} = -c_{j,0}, eta_{j,n} = eta_{j,n-1} - c_{j,n}, zero past p-j-2
        eta = [zero] * (p - 1)
        acc = zero
        for n in range(p - j - 1):
            acc = acc - c[n]
            eta[n] = acc
        # zeta * sum_n eta_n (1 - zeta)^n, read off coefficients of zeta^1..zeta^{p-1}
        d = [zero] * (p - 1)
        for n, e in enumerate(eta):
            for k in range(n + 1):
                d[k] += (-1) ** k * math.comb(n, k) * e
        rows.append(d)
    return rows


@lru_cache(maxsize=None)
def correction_table(p: int, beta: float = 0.0) -> CorrectionTable:
    if int(p) != p or not 1 <= p <= 6:
        raise ValueError(f"BDF order must be an integer in [1, 6], got {p}")
    p = int(p)
    beta = _check_beta(beta)
    if p == 1:
        empty = np.zeros(0)
        return CorrectionTable(1, beta, empty, np.zeros((0, 0)), (), () if beta == 0 else None)
    rows = _d_rows(p, beta)
    b_exact = tuple(_d_rows(p, 0.0)[0])
    d = np.array([[float(v) for v in row] for row in rows])
    d_exact = tuple(tuple(row) for row in rows) if beta == 0.0 else None
    b = np.array([float(v) for v in b_exact])
    b.flags.writeable = False
    d.flags.writeable = False
    return CorrectionTable(p, beta, b, d, b_exact, d_exact)


def _check_point(z):
    if z == 1:
        raise ZeroDivisionError("symbol functions are singular at zeta = 1")
    if abs(z) >= 1:
        raise ValueError("zeta point must satisfy |zeta| < 1")


def _mp_coeffs(values, fallback):
    if values is None:
        return [mpmath.mpf(v) for v in fallback]
    return [mpmath.mpf(v.numerator) / v.denominator for v in values]


def eval_mu(p: int, z, dps: int | None = None):
    """mu(zeta) = psi_p(zeta) (sum_n b_n zeta^n + zeta / (1 - zeta)).

    |mu - 1| shrinks like |1 - zeta|^p, so near zeta = 1 the double-precision
    value is pure rounding once |1 - zeta|^p < 1e-16. Passing ``dps`` evaluates
    with that many decimal digits from the exact rational b_n instead.
    """
    _check_point(z)
    tab = correction_table(p, 0.0)
    if dps is not None:
        with mpmath.workdps(dps):
            z = mpmath.mpmathify(z)
            b = _mp_coeffs(tab.b_exact, tab.b)
            poly = sum(bn * z ** (n + 1) for n, bn in enumerate(b))
            return bdf_symbol(p)(z) * (poly + z / (1 - z))
    psi = bdf_symbol(p)(z)
    poly = sum(bn * z ** (n + 1) for n, bn in enumerate(tab.b))
    return psi * (poly + z / (1 - z))


def eval_beta_j(p: int, j: int, beta: float, z, dps: int | None = None):
    """beta_j(zeta) = sum_n d_{j,n} zeta^n + Li_{-(j+beta)}(zeta) / j!.

    ``dps`` switches to extended-precision evaluation (see :func:`eval_mu`).
    """
    _check_point(z)
    if not 0 <= j <= p - 2:
        raise ValueError(f"j must lie in [0, p-2], got j={j} for p={p}")
    tab = correction_table(p, beta)
    if dps is not None:
        with mpmath.workdps(dps):
            z = mpmath.mpmathify(z)
            d = _mp_coeffs(tab.d_exact[j] if tab.d_exact else None, _mp_d_row(p, j, beta, dps))
            poly = sum(dn * z ** (n + 1) for n, dn in enumerate(d))
            return poly + mpmath.polylog(-(j + mpmath.mpf(beta)), z) / math.factorial(j)
    poly = sum(dn * z ** (n + 1) for n, dn in enumerate(tab.d[j]))
    return poly + polylog(-(j + beta), z) / math.factorial(j)


def _mp_d_row(p: int, j: int, beta: float, dps: int) -> list:
    """d_{j,1..p-1} recomputed with mpmath zeta values (only used when beta > 0)."""
    lp = _log_powers(p - 2)
    with mpmath.workdps(dps):
        b = mpmath.mpf(beta)
        zv = [mpmath.zeta(-j - m - b) for m in range(p - 1)]
        c = [
            sum(zv[m] * mpmath.mpf(lp[m][k].numerator) / lp[m][k].denominator for m in range(k + 1))
            / math.factorial(j)
            for k in range(p - 1)
        ]
        d = [mpmath.mpf(0)] * (p - 1)
        acc = mpmath.mpf(0)
        for n in range(p - j - 1):
            acc -= c[n]
            for k in range(n + 1):
                d[k] += (-1) ** k * math.comb(n, k) * acc
        return d
