"""Corrected fractional BDF-p / finite element scheme for the Caputo-Hadamard subdiffusion problem.

    CH-derivative_t^alpha u - u_xx = f   on (0, L) x (a, T],  u(., a) = v,
    f(x, t) = f(x, a) + (log(t/a))^beta g(x, log(t/a)).

The scheme works with w = u - v_h, which starts from zero, so the Caputo-
Hadamard derivative of u becomes the Hadamard derivative of w. With M and K
the mass and stiffness matrices and lam = tau^-alpha omega_0, each step solves

    (lam M + K) W_n = -K v_h + F_n + corr_n - tau^-alpha M sum_{k=1}^{n-1} omega_{n-k} W_k,

where F_n is the load vector of f(., t_n) and corr_n is nonzero only for
n <= p-1.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import expr as _expr
from .correction import correction_table
from .cq import cq_weights
from .fem1d import FemSpace
from .mesh import build_mesh
from .tables import ConvergenceRow, observed_orders

__all__ = [
    "ProblemSpec",
    "ExprFunction",
    "problem_from_expressions",
    "step_all",
    "final_error",
    "convergence_study",
]


class ExprFunction:
    """Callable view of a parsed expression as a function of x (and optionally lt)."""

    def __init__(self, source: str, lt_fixed: float | None = None):
        self.source = source
        self.node = _expr.parse(source)
        self.lt_fixed = lt_fixed

    def __call__(self, x, lt=None):
        if lt is None:
            lt = 0.0 if self.lt_fixed is None else self.lt_fixed
        return _expr.evaluate(self.node, x=np.asarray(x, dtype=float), lt=lt)

    def __repr__(self):
        return f"ExprFunction({self.source!r})"


@dataclass(frozen=True)
class ProblemSpec:
    """Problem data. Spatial callables take an array of x; ``g`` and ``u_exact`` take (x, lt).

    ``delta_g_at_a[j]`` is x -> delta_t^j g(x, a). When ``g`` is an
    :class:`ExprFunction` and no list is given, it is derived from Taylor jets.
    """

    alpha: float
    beta: float
    a: float
    T: float
    L: float
    v: Callable
    v_prime: Callable
    f_at_a: Callable
    g: Callable
    delta_g_at_a: tuple = ()
    u_exact: Callable | None = None

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not 0 <= self.beta < 1:
            raise ValueError(f"beta must lie in [0, 1), got {self.beta}")
        if not 0 < self.a < self.T:
            raise ValueError("need 0 < a < T")
        if not self.L > 0:
            raise ValueError("domain length must be positive")

    def delta_g(self, j: int) -> Callable:
        if j < len(self.delta_g_at_a):
            return self.delta_g_at_a[j]
        if isinstance(self.g, ExprFunction):
            node = self.g.node
            return lambda x: math.factorial(j) * _expr.taylor_in_lt(node, np.asarray(x, dtype=float), j).coeffs[j]
        raise ValueError(
            f"delta_t^{j} g(a) is required by the correction but was not supplied "
            f"(only {len(self.delta_g_at_a)} given)"
        )

    def source(self, x, lt: float):
        """f(x, t) with lt = log(t/a); 0^0 is taken as 1 when beta = 0."""
        return self.f_at_a(x) + lt**self.beta * self.g(x, lt)


def _derivative_of(node) -> Callable:
    def v_prime(x):
        return _expr.taylor(node, "x", np.asarray(x, dtype=float), 1).coeffs[1]

    return v_prime


def problem_from_expressions(
    alpha: float,
    beta: float,
    a: float,
    T: float,
    v: str,
    f_at_a: str,
    g: str,
    L: float = math.pi,
    u_exact: str | None = None,
    v_prime: str | None = None,
    delta_g: Sequence[str] | None = None,
) -> ProblemSpec:
    """Build a :class:`ProblemSpec` from expression strings in x and lt.

    v' is obtained from a first-order jet in x unless given explicitly.
    """
    v_fn = ExprFunction(v)
    vp = ExprFunction(v_prime) if v_prime else _derivative_of(v_fn.node)
    return ProblemSpec(
        alpha=alpha,
        beta=beta,
        a=a,
        T=T,
        L=L,
        v=v_fn,
        v_prime=vp,
        f_at_a=ExprFunction(f_at_a),
        g=ExprFunction(g),
        delta_g_at_a=tuple(ExprFunction(s) for s in (delta_g or ())),
        u_exact=ExprFunction(u_exact) if u_exact else None,
    )


@dataclass
class _Workspace:
    """Per-run quantities that do not depend on the step index."""

    v_h: np.ndarray
    neg_K_vh: np.ndarray
    load_f_at_a: np.ndarray
    load_delta_g: list = field(default_factory=list)


def step_all(
    spec: ProblemSpec,
    p: int,
    N: int,
    space: FemSpace,
    corrected: bool = True,
    hook: Callable[[int, np.ndarray], None] | None = None,
    initial: str = "ritz",
) -> np.ndarray:
    """Run the scheme; returns U with U[n] = W[n] + v_h, shape (N+1, ndof).

    ``hook(n, correction_vector)`` is called for every step that receives a
    correction, with the vector added to the right-hand side. ``initial``
    selects v_h: the Ritz projection (default) or the L2 projection ("l2").
    """
    if initial not in ("ritz", "l2"):
        raise ValueError(f"initial must be 'ritz' or 'l2', got {initial!r}")
    if int(N) != N or N < p:
        raise ValueError(f"need N >= p, got N={N}, p={p}")
    mesh = build_mesh(spec.a, spec.T, N)
    tau = mesh.tau_bar
    omega = cq_weights(p, spec.alpha, N).omega
    scale = tau ** (-spec.alpha)
    lam = scale * omega[0]

    # K v_h is the Ritz right-hand side itself; forming it as a product loses ~1e-11
    if initial == "ritz":
        ritz_rhs = space.ritz_rhs(spec.v_prime)
        v_h = space.solve_shifted(0.0, ritz_rhs)
        neg_K_vh = -ritz_rhs
    else:
        v_h = space.l2_project(spec.v)
        neg_K_vh = -(space.stiffness @ v_h)
    ws = _Workspace(v_h=v_h, neg_K_vh=neg_K_vh, load_f_at_a=space.load_vector(spec.f_at_a))
    table = None
    if corrected and p > 1:
        table = correction_table(p, spec.beta)
        ws.load_delta_g = [space.load_vector(spec.delta_g(j)) for j in range(p - 1)]

    W = np.zeros((N + 1, space.ndof))
    for n in range(1, N + 1):
        lt = mesh.tbar[n]
        rhs = ws.neg_K_vh + ws.load_f_at_a + lt**spec.beta * space.load_vector(lambda x: spec.g(x, lt))
        if table is not None and n <= p - 1:
            corr = table.b[n - 1] * (ws.neg_K_vh + ws.load_f_at_a)
            for j in range(p - 1):
                corr = corr + table.d[j, n - 1] * tau ** (j + spec.beta) * ws.load_delta_g[j]
            if hook is not None:
                hook(n, corr)
            rhs = rhs + corr
        if n > 1:
            history = omega[n - 1 : 0 : -1] @ W[1:n]
            rhs = rhs - scale * (space.mass @ history)
        W[n] = space.solve_shifted(lam, rhs)
    return W + v_h


ERROR_NORMS = ("final", "max")


def final_error(
    spec: ProblemSpec,
    p: int,
    N: int,
    space: FemSpace,
    corrected: bool = True,
    norm: str = "final",
    initial: str = "ritz",
) -> float:
    """L2(0, L) error against ``spec.u_exact`` at t = T, or its maximum over t_1..t_N when norm="max"."""
    if spec.u_exact is None:
        raise ValueError("an exact solution is required to measure the error")
    if norm not in ERROR_NORMS:
        raise ValueError(f"norm must be one of {ERROR_NORMS}, got {norm!r}")
    U = step_all(spec, p, N, space, corrected, initial=initial)
    mesh = build_mesh(spec.a, spec.T, N)
    steps = [N] if norm == "final" else range(1, N + 1)
    return max(space.l2_error(U[n], lambda x, lt=mesh.tbar[n]: spec.u_exact(x, lt)) for n in steps)


def convergence_study(
    spec: ProblemSpec,
    p: int,
    space: FemSpace,
    N_list: Sequence[int],
    corrected: bool = True,
    threads: int | None = None,
    norm: str = "final",
    initial: str = "ritz",
) -> list[ConvergenceRow]:
    """Final-time errors for each N with observed orders; rows are ordered by N."""
    if spec.u_exact is None:
        raise ValueError("an exact solution is required for a convergence study")
    N_list = [int(n) for n in N_list]
    if sorted(set(N_list)) != N_list:
        raise ValueError("N_list must be strictly increasing")
    run = lambda n: final_error(spec, p, n, space, corrected, norm, initial)  # noqa: E731
    if threads and threads > 1 and len(N_list) > 1:
        with ThreadPoolExecutor(min(threads, len(N_list))) as pool:
            errors = list(pool.map(run, N_list))
    else:
        errors = [run(n) for n in N_list]
    log_len = math.log(spec.T / spec.a)
    taus = [log_len / n for n in N_list]
    orders = observed_orders(taus, errors)
    return [ConvergenceRow(n, tb, e, o) for n, tb, e, o in zip(N_list, taus, errors, orders)]
