"""Hadamard fractional operators: exact values for log-powers and the CQ approximation.

Under t = a e^s the Hadamard operator of order alpha becomes the
Riemann-Liouville operator in s, so CQ on the exponential mesh is CQ on a
uniform mesh in s applied to U(s) = u(a e^s).
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cq import cq_weights
from .mesh import ExpMesh, build_mesh
from .special_functions import PoleError, gamma
from .tables import ConvergenceRow, observed_orders

__all__ = [
    "LogPower",
    "exact_hadamard",
    "uniform_cq",
    "discrete_hadamard",
    "truncation_study",
]


@dataclass(frozen=True)
class LogPower:
    """u(t) = (log(t/a))^sigma."""

    sigma: float
    a: float = 1.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if not self.a > 0:
            raise ValueError("a must be positive")

    def __call__(self, t):
        return np.log(np.asarray(t, dtype=float) / self.a) ** self.sigma


def exact_hadamard(alpha: float, u: LogPower, t: float) -> float:
    """Gamma(sigma+1)/Gamma(sigma+1-alpha) (log(t/a))^(sigma-alpha).

    A negative ``alpha`` means the Hadamard integral of order -alpha.
    """
    if not t > u.a:
        raise ValueError("t must exceed a")
    denom_arg = u.sigma + 1.0 - alpha
    if denom_arg <= 0 and float(denom_arg).is_integer():
        # 1/Gamma vanishes: the operator annihilates this log-power
        return 0.0
    try:
        ratio = gamma(u.sigma + 1.0) / gamma(denom_arg)
    except PoleError as exc:
        raise PoleError(f"exact_hadamard undefined for sigma={u.sigma}, alpha={alpha}") from exc
    return ratio * math.log(t / u.a) ** (u.sigma - alpha)


def uniform_cq(alpha: float, p: int, tau: float, values: Sequence[float]) -> np.ndarray:
    """tau^-alpha sum_{k<=n} omega_{n-k} U_k for every n, on a uniform grid of step tau."""
    values = np.asarray(values, dtype=float)
    N = values.size - 1
    omega = cq_weights(p, alpha, N).omega
    return tau ** (-alpha) * np.convolve(omega, values)[: N + 1]


def discrete_hadamard(alpha: float, p: int, mesh: ExpMesh, samples: Sequence[float]) -> np.ndarray:
    samples = np.asarray(samples, dtype=float)
    if samples.shape != (mesh.N + 1,):
        raise ValueError(f"expected {mesh.N + 1} samples, got {samples.shape}")
    return uniform_cq(alpha, p, mesh.tau_bar, samples)


def _final_error(alpha, u, p, a, T, N):
    mesh = build_mesh(a, T, N)
    approx = discrete_hadamard(alpha, p, mesh, u(mesh.t))
    return abs(approx[-1] - exact_hadamard(alpha, u, T))


def truncation_study(
    alpha: float,
    sigma: float,
    p: int,
    a: float,
    T: float,
    N_list: Sequence[int],
    threads: int | None = None,
) -> list[ConvergenceRow]:
    """Error of the CQ approximation at t = T for each N, with observed orders.

    The expected fixed-time order is min(sigma + 1, p).
    """
    N_list = [int(n) for n in N_list]
    if any(n < p for n in N_list) or sorted(set(N_list)) != N_list:
        raise ValueError("N_list must be strictly increasing with every N >= p")
    u = LogPower(sigma, a)
    if threads is not None and threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            errors = list(pool.map(lambda n: _final_error(alpha, u, p, a, T, n), N_list))
    else:
        errors = [_final_error(alpha, u, p, a, T, n) for n in N_list]
    taus = [math.log(T / a) / n for n in N_list]
    orders = observed_orders(taus, errors)
    return [ConvergenceRow(n, tb, e, o) for n, tb, e, o in zip(N_list, taus, errors, orders)]
