"""Gamma, Riemann zeta on the real line, and the polylogarithm Li_s(z).

The zeta values at negative arguments feed the startup correction
coefficients, and the polylogarithm is used to evaluate the symbol
functions those corrections are designed against.
"""
from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache

__all__ = [
    "PoleError",
    "DomainError",
    "gamma",
    "zeta",
    "zeta_rational",
    "bernoulli",
    "polylog",
    "polylog_series",
    "polylog_expansion",
]


class PoleError(ValueError):
    """Raised when a function is evaluated at one of its poles."""


class DomainError(ValueError):
    """Raised for arguments outside the supported domain."""


def _is_nonpositive_int(x: float) -> bool:
    return x <= 0 and float(x).is_integer()


def gamma(x: float) -> float:
    """Gamma function for real ``x`` not a nonpositive integer."""
    x = float(x)
    if _is_nonpositive_int(x):
        raise PoleError(f"gamma has a pole at {x:g}")
    return math.gamma(x)


@lru_cache(maxsize=None)
def bernoulli(n: int) -> Fraction:
    """Bernoulli number B_n as an exact rational (convention B_1 = -1/2)."""
    if n < 0:
        raise DomainError("bernoulli index must be nonnegative")
    if n == 1:
        return Fraction(-1, 2)
    if n > 1 and n % 2 == 1:
        return Fraction(0)
    # B_n = -1/(n+1) sum_{k<n} C(n+1,k) B_k
    if n == 0:
        return Fraction(1)
    acc = Fraction(0)
    for k in range(n):
        acc += math.comb(n + 1, k) * bernoulli(k)
    return -acc / (n + 1)


def zeta_rational(s: int) -> Fraction:
    """Exact zeta(s) for integer s <= 0."""
    s = int(s)
    if s > 0:
        raise DomainError("zeta_rational only covers nonpositive integers")
    if s == 0:
        return Fraction(-1, 2)
    n = 1 - s
    # zeta(-m) = (-1)^m B_{m+1}/(m+1); vanishes at negative even integers
    return (-1) ** (-s) * bernoulli(n) / n


# Euler-Maclaurin parameters: partial sum to _EM_N, then _EM_K Bernoulli terms.
_EM_N = 12
_EM_K = 12
_EM_COEFFS = tuple(
    float(bernoulli(2 * k)) / math.factorial(2 * k) for k in range(1, _EM_K + 1)
)


def _zeta_euler_maclaurin(s: float) -> float:
    n = _EM_N
    head = math.fsum(j ** (-s) for j in range(1, n))
    tail = n ** (1.0 - s) / (s - 1.0) + 0.5 * n ** (-s)
    # rising factorial s (s+1) ... (s+2k-2) times n^{-s-2k+1}
    rising = s
    power = n ** (-s - 1.0)
    corr = 0.0
    for k, c in enumerate(_EM_COEFFS, start=1):
        corr += c * rising * power
        rising *= (s + 2 * k - 1) * (s + 2 * k)
        power /= n * n
    return head + tail + corr


def _zeta_borwein(s: float, n: int = 40) -> float:
    """zeta via the accelerated alternating (eta) series; good on (0, 1)."""
    d = [0.0] * (n + 1)
    acc = 0.0
    for i in range(n + 1):
        acc += math.factorial(n + i - 1) * 4**i / (math.factorial(n - i) * math.factorial(2 * i)) if i > 0 else 1.0 / n
        d[i] = n * acc
    total = 0.0
    for k in range(n):
        total += (-1) ** k * (d[k] - d[n]) / (k + 1) ** s
    eta = -total / d[n]
    return eta / -math.expm1((1.0 - s) * math.log(2.0))


def zeta(s: float) -> float:
    """Riemann zeta function for real ``s != 1`` (analytic continuation)."""
    s = float(s)
    if s == 1.0:
        raise PoleError("zeta has a pole at s = 1")
    if s.is_integer() and s <= 0:
        return float(zeta_rational(int(s)))
    if s > 1.0:
        return _zeta_euler_maclaurin(s)
    if s > 0.0:
        return _zeta_borwein(s)
    # functional equation, reflecting into s > 1
    r = 1.0 - s
    return (
        2.0**s
        * math.pi ** (s - 1.0)
        * math.sin(math.pi * s / 2.0)
        * math.gamma(r)
        * _zeta_euler_maclaurin(r)
    )


def _check_z(z):
    if abs(z) >= 1.0:
        raise DomainError(f"polylog requires |z| < 1, got {z}")


def _neg_int_numerator(n: int) -> tuple[int, ...]:
    """Integer coefficients of P_n with Li_{-n}(z) = P_n(z) / (1 - z)^(n+1)."""
    # P_0 = z; P_{m+1} = z [P_m' (1 - z) + (m + 1) P_m]
    poly = [0, 1]
    for m in range(n):
        deriv = [i * c for i, c in enumerate(poly)][1:] or [0]
        t = [0] * (len(poly) + 1)
        for i, c in enumerate(deriv):
            t[i] += c
            t[i + 1] -= c
        for i, c in enumerate(poly):
            t[i] += (m + 1) * c
        poly = [0] + t
        while len(poly) > 1 and poly[-1] == 0:
            poly.pop()
    return tuple(poly)


_NEG_INT_CACHE: dict[int, tuple[int, ...]] = {}


def _polylog_neg_int(n: int, z):
    coeffs = _NEG_INT_CACHE.get(n)
    if coeffs is None:
        coeffs = _NEG_INT_CACHE[n] = _neg_int_numerator(n)
    num = 0.0
    for c in reversed(coeffs):
        num = num * z + c
    return num / (1.0 - z) ** (n + 1)


def polylog_series(s: float, z, tol: float = 1e-17):
    """Direct sum of z^j / j^s, stopped once a geometric tail bound is below ``tol``."""
    _check_z(z)
    az = abs(z)
    if az == 0.0:
        return 0.0 * z
    total = 0.0
    zj = 1.0
    j = 0
    while True:
        j += 1
        zj *= z
        term = zj * j ** (-s)
        total += term
        ratio = az * ((j + 1) / j) ** (-s)
        if ratio < 1.0 and abs(term) * ratio / (1.0 - ratio) <= tol * max(1.0, abs(total)):
            return total
        if j > 10_000_000:
            raise DomainError("polylog series failed to converge")


def polylog_expansion(s: float, z, tol: float = 1e-17):
    """Li_s(z) by its singular expansion around z = 1.

    Li_s(z) = Gamma(1-s) (-log z)^(s-1) + sum_k zeta(s-k) (log z)^k / k!,
    with the harmonic-number form when ``s`` is a positive integer.
    Converges for |log z| < 2 pi.
    """
    _check_z(z)
    if z == 0:
        raise DomainError("expansion is singular at z = 0")
    real = not isinstance(z, complex)
    if real and z < 0:
        lz = cmath.log(z)
    else:
        lz = math.log(z) if real else cmath.log(z)
    s = float(s)
    pos_int = s.is_integer() and s >= 1
    if pos_int:
        m = int(s) - 1
        harmonic = math.fsum(1.0 / i for i in range(1, m + 1))
        total = lz**m / math.factorial(m) * (harmonic - cmath.log(-lz))
    else:
        total = math.gamma(1.0 - s) * (-lz) ** (s - 1.0)
    power = 1.0 + 0.0 * lz
    k = 0
    small = 0
    while True:
        if not (pos_int and k == int(s) - 1):
            term = zeta(s - k) * power
            total += term
            if k > s + 2:
                if abs(term) <= tol * max(1.0, abs(total)):
                    small += 1
                    if small >= 2:
                        break
                else:
                    small = 0
        k += 1
        power = power * lz / k
        if k > 400:
            raise DomainError("polylog expansion failed to converge")
    if real:
        return total.real if isinstance(total, complex) else total
    return total


def polylog(s: float, z):
    """Polylogarithm Li_s(z) = sum_{j>=1} z^j / j^s for |z| < 1.

    Nonpositive integer orders use the rational closed forms. Otherwise the
    direct series is used for |z| <= 0.5 and the expansion at z = 1 beyond.
    Real ``z`` gives a real result; complex ``z`` is accepted as well.
    """
    _check_z(z)
    s = float(s)
    if s.is_integer() and s <= 0:
        return _polylog_neg_int(int(-s), z)
    if abs(z) <= 0.5:
        return polylog_series(s, z)
    return polylog_expansion(s, z)
