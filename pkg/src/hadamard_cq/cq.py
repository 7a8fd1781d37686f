"""Generating functions for convolution quadrature and their weight sequences.

Weights are the Taylor coefficients of omega(zeta) = psi_p(zeta)^alpha, where
psi_p is the fractional BDF-p symbol (or the generalized Newton-Gregory one).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

__all__ = [
    "SymbolPolynomial",
    "CqWeights",
    "bdf_symbol",
    "series_power",
    "cq_weights",
    "ng_gammas",
    "ng_symbol",
    "convolve_truncated",
]


def _check_order(p: int) -> int:
    if int(p) != p or not 1 <= p <= 6:
        raise ValueError(f"BDF order must be an integer in [1, 6], got {p}")
    return int(p)


@dataclass(frozen=True)
class SymbolPolynomial:
    """psi_p(zeta) = sum_{j=1}^p (1 - zeta)^j / j, stored as exact coefficients of zeta^k."""

    p: int
    coeffs: tuple[Fraction, ...]

    def as_float(self) -> np.ndarray:
        return np.array([float(c) for c in self.coeffs])

    def __call__(self, z):
        # factored form is better conditioned than the monomial one near zeta = 1
        u = 1 - z
        return sum(u**j / j for j in range(1, self.p + 1))


@dataclass(frozen=True)
class CqWeights:
    alpha: float
    p: int
    omega: np.ndarray


def bdf_symbol(p: int) -> SymbolPolynomial:
    p = _check_order(p)
    coeffs = [Fraction(0)] * (p + 1)
    for j in range(1, p + 1):
        for k in range(j + 1):
            coeffs[k] += Fraction((-1) ** k * math.comb(j, k), j)
    return SymbolPolynomial(p, tuple(coeffs))


def series_power(a: Sequence[float], alpha: float, N: int) -> np.ndarray:
    """First N+1 Taylor coefficients of (sum_k a_k zeta^k)^alpha.

    Uses the J.C.P. Miller recurrence, which costs O(deg * N) for a
    polynomial input of degree ``deg``.
    """
    a = np.trim_zeros(np.asarray(a, dtype=float), "b")
    if a.size == 0 or a[0] == 0:
        raise ValueError("series_power requires a nonzero constant term")
    if N < 0:
        raise ValueError("N must be nonnegative")
    deg = a.size - 1
    w = np.zeros(N + 1)
    w[0] = a[0] ** alpha
    if alpha == 0:
        return w
    for n in range(1, N + 1):
        kmax = min(n, deg)
        k = np.arange(1, kmax + 1)
        w[n] = np.dot(((alpha + 1) * k - n) * a[1 : kmax + 1], w[n - k]) / (n * a[0])
    return w


def cq_weights(p: int, alpha: float, N: int) -> CqWeights:
    """Fractional BDF-p weights omega_0..omega_N of psi_p(zeta)^alpha."""
    sym = bdf_symbol(p)
    return CqWeights(float(alpha), sym.p, series_power(sym.as_float(), alpha, N))


def convolve_truncated(x: np.ndarray, y: np.ndarray, N: int | None = None) -> np.ndarray:
    """Cauchy product of two coefficient sequences, truncated to length N+1."""
    if N is None:
        N = min(len(x), len(y)) - 1
    return np.convolve(x[: N + 1], y[: N + 1])[: N + 1]


def ng_gammas(p: int, alpha: float) -> np.ndarray:
    """gamma_0..gamma_{p-1}: coefficients of (log zeta / (zeta - 1))^alpha in powers of 1 - zeta."""
    p = _check_order(p)
    # log(zeta)/(zeta-1) = -log(1-u)/u = sum_k u^k / (k+1)
    base = 1.0 / np.arange(1, p + 1)
    return series_power(base, alpha, p - 1)


def ng_symbol(p: int, alpha: float, N: int) -> np.ndarray:
    """Weights of the generalized Newton-Gregory generating function.

    omega(zeta) = (1 - zeta)^alpha * sum_{i<p} gamma_i (1 - zeta)^i
    """
    p = _check_order(p)
    if N < p:
        raise ValueError("N must be at least p")
    gam = ng_gammas(p, alpha)
    poly = np.zeros(p)
    for i, g in enumerate(gam):
        for k in range(i + 1):
            poly[k] += g * (-1) ** k * math.comb(i, k)
    frac = series_power([1.0, -1.0], alpha, N)
    return convolve_truncated(frac, np.pad(poly, (0, N + 1 - p)), N)
