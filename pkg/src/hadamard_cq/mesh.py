"""Exponential-type time mesh t_n = a (T/a)^(n/N), uniform in log(t/a)."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = ["ExpMesh", "build_mesh"]


@dataclass(frozen=True)
class ExpMesh:
    a: float
    T: float
    N: int
    tau_bar: float
    t: np.ndarray = field(repr=False)
    tbar: np.ndarray = field(repr=False)

    @property
    def log_length(self) -> float:
        return math.log(self.T / self.a)


def build_mesh(a: float, T: float, N: int) -> ExpMesh:
    if not a > 0:
        raise ValueError(f"start time must be positive, got a={a}")
    if not T > a:
        raise ValueError(f"final time must exceed a, got T={T}, a={a}")
    if int(N) != N or N < 1:
        raise ValueError(f"step count must be a positive integer, got N={N}")
    N = int(N)
    tau_bar = math.log(T / a) / N
    tbar = np.arange(N + 1) * tau_bar
    t = a * np.exp(tbar)
    t[0] = a
    t[-1] = T
    tbar.flags.writeable = False
    t.flags.writeable = False
    return ExpMesh(float(a), float(T), N, tau_bar, t, tbar)
