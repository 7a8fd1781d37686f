"""Acceptance criteria, one test (or one parametrized family) per criterion.

Every check prints a PASS/FAIL line; the lines are also collected and shown in
the pytest terminal summary. Run ``python3 tests/test_acceptance.py`` for the
lines alone.
"""
import math
import sys
import time
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from hadamard_cq.cq import bdf_symbol, convolve_truncated, cq_weights
from hadamard_cq.correction import correction_table, eval_beta_j, eval_mu
from hadamard_cq.fem1d import build_space
from hadamard_cq.hadamard_ops import truncation_study
from hadamard_cq.solver import convergence_study
from hadamard_cq.special_functions import gamma, polylog, zeta

try:
    from conftest import ACCEPTANCE_RESULTS, benchmark_problem
except ImportError:  # run as a script from elsewhere
    sys.path.insert(0, __file__.rsplit("/", 1)[0])
    from conftest import ACCEPTANCE_RESULTS, benchmark_problem

from test_correction import PUBLISHED_D


def report(key, ok, detail):
    ACCEPTANCE_RESULTS[key] = (bool(ok), detail)
    print(f"{'PASS' if ok else 'FAIL'} criterion {key}: {detail}")
    assert ok, detail


# published benchmark: (errors, orders) per p for the corrected and standard schemes
PUBLISHED_CORRECTED = {
    2: ([3.0232e-05, 6.9577e-06, 1.6407e-06], [2.12, 2.08]),
    3: ([1.7289e-06, 1.9471e-07, 2.2753e-08], [3.15, 3.10]),
    4: ([1.4373e-07, 7.8090e-09, 4.4926e-10], [4.20, 4.12]),
    5: ([2.8425e-08, 4.1143e-10, 1.1727e-11], [6.11, 5.13]),
    6: ([1.1506e-06, 1.0035e-10, 1.8371e-13], [13.49, 9.09]),
}
PUBLISHED_STANDARD = {
    1: ([9.3088e-04, 4.2987e-04, 2.0259e-04], [1.11, 1.09]),
    2: ([1.6418e-03, 7.8103e-04, 3.7710e-04], [1.07, 1.05]),
    3: ([1.6254e-03, 7.7709e-04, 3.7613e-04], [1.06, 1.05]),
    4: ([1.6262e-03, 7.7718e-04, 3.7614e-04], [1.07, 1.05]),
    5: ([1.6261e-03, 7.7717e-04, 3.7614e-04], [1.07, 1.05]),
    6: ([1.2639e-03, 6.1687e-04, 3.0303e-04], [1.03, 1.03]),
}


# ---------------------------------------------------------------- criterion 1


def test_criterion_1_correction_coefficients():
    correction_table.cache_clear()
    start = time.perf_counter()
    mismatches = []
    for p in range(2, 7):
        tab = correction_table(p, 0.0)
        for j, row in enumerate(PUBLISHED_D[p]):
            for n, value in enumerate(row):
                if tab.d_exact[j][n] != Fraction(value):
                    mismatches.append((p, j, n + 1))
    elapsed = time.perf_counter() - start
    ok = not mismatches and elapsed < 1.0
    report("1", ok, f"35 entries for p=2..6, exact mismatches={mismatches}, {elapsed:.3f} s (< 1 s)")


# ---------------------------------------------------------- criteria 2 and 3


@pytest.fixture(scope="module")
def benchmark_runs():
    spec = benchmark_problem()
    space = build_space(math.pi, 100, 5)
    start = time.perf_counter()
    runs = {}
    for p in range(1, 7):
        Ns = [60, 120, 240] if p == 6 else [40, 80, 160]
        for corrected in (True, False):
            runs[p, corrected] = convergence_study(spec, p, space, Ns, corrected)
    return runs, time.perf_counter() - start


@pytest.mark.parametrize("p", range(1, 6))
def test_criterion_2_corrected_orders(benchmark_runs, p):
    runs, _ = benchmark_runs
    rows = runs[p, True]
    # at p = 1 the scheme has no corrections, so the published standard column applies
    pub_err, pub_ord = PUBLISHED_CORRECTED[p] if p > 1 else PUBLISHED_STANDARD[1]
    orders = [r.order for r in rows[1:]]
    ok = all(abs(o - q) <= 0.25 for o, q in zip(orders, pub_ord))
    detail = f"p={p} orders {[round(o, 2) for o in orders]} vs published {pub_ord} (tol 0.25)"
    if p <= 4:
        ratios = [r.error / e for r, e in zip(rows, pub_err)]
        ok = ok and all(1 / 3 <= q <= 3 for q in ratios)
        detail += f"; error ratios {[round(q, 3) for q in ratios]} (within x3)"
    report(f"2.p{p}", ok, detail)


def test_criterion_2_p6_improvement(benchmark_runs):
    runs, _ = benchmark_runs
    corr, std = runs[6, True][-1].error, runs[6, False][-1].error
    report("2.p6", std / corr >= 1e6, f"N=240 corrected {corr:.4e} vs standard {std:.4e}, ratio {std / corr:.3g} (>= 1e6)")


def test_criterion_2_runtime(benchmark_runs):
    _, elapsed = benchmark_runs
    report("2.runtime", elapsed < 120, f"all benchmark runs (both schemes, p=1..6) in {elapsed:.2f} s (< 120 s)")


@pytest.mark.parametrize("p", range(1, 7))
def test_criterion_3_standard_orders(benchmark_runs, p):
    runs, _ = benchmark_runs
    orders = [r.order for r in runs[p, False][1:]]
    ok = all(0.95 <= o <= 1.20 for o in orders)
    report(f"3.p{p}", ok, f"standard scheme p={p} orders {[round(o, 3) for o in orders]} in [0.95, 1.20]")


# ---------------------------------------------------------------- criterion 4

TRUNC_N = [20, 40, 80, 160, 320, 640, 1280]
ROUNDOFF_FLOOR = 1e-11


def _fixed_time_order(rows):
    """Order from the finest consecutive pair whose errors both sit above the rounding floor."""
    for i in range(len(rows) - 1, 0, -1):
        if rows[i].error >= ROUNDOFF_FLOOR and rows[i - 1].error >= ROUNDOFF_FLOOR:
            return rows[i].order, rows[i].N
    return float("nan"), None


@pytest.fixture(scope="module")
def truncation_timer():
    return {"elapsed": 0.0, "count": 0}


@pytest.mark.parametrize("p", [1, 2, 3, 4])
@pytest.mark.parametrize("sigma", [0.5, 1.5, 3, 7])
@pytest.mark.parametrize("alpha", [0.5, -0.5])
def test_criterion_4_truncation(alpha, sigma, p, truncation_timer):
    start = time.perf_counter()
    rows = truncation_study(alpha, sigma, p, 1.0, math.e, TRUNC_N)
    truncation_timer["elapsed"] += time.perf_counter() - start
    truncation_timer["count"] += 1
    order, N = _fixed_time_order(rows)
    expected = min(sigma + 1, p)
    report(
        f"4.a{alpha}.s{sigma}.p{p}",
        abs(order - expected) <= 0.2,
        f"alpha={alpha} sigma={sigma} p={p}: order {order:.3f} at N={N}, expected {expected} +- 0.2",
    )


def test_criterion_4_runtime(truncation_timer):
    elapsed = truncation_timer["elapsed"]
    report("4.runtime", truncation_timer["count"] == 32 and elapsed < 30, f"32 truncation studies in {elapsed:.2f} s (< 30 s)")


# ---------------------------------------------------------------- criterion 5


@pytest.mark.parametrize("p", range(1, 7))
@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.8])
def test_criterion_5_consistency(p, alpha):
    sym = bdf_symbol(p)
    with mpmath.workdps(50):
        a = mpmath.mpf(alpha)
        taus = [mpmath.mpf(2) ** -k for k in range(4, 9)]
        E = [abs(sym(mpmath.exp(-t)) ** a / t**a - 1) for t in taus]
        slopes = [float(mpmath.log(E[i] / E[i + 1], 2)) for i in range(len(E) - 1)]
    report(f"5.p{p}.a{alpha}", min(slopes) >= p - 0.1, f"p={p} alpha={alpha}: min slope {min(slopes):.3f} (>= {p - 0.1})")


# ---------------------------------------------------------------- criterion 6


@pytest.mark.parametrize("p", range(1, 7))
def test_criterion_6_inverse_weights(p):
    worst = 0.0
    impulse = np.zeros(513)
    impulse[0] = 1.0
    for alpha in (0.3, 0.5, 0.8, 1.4):
        conv = convolve_truncated(cq_weights(p, alpha, 512).omega, cq_weights(p, -alpha, 512).omega, 512)
        worst = max(worst, np.max(np.abs(conv - impulse)))
    report(f"6.p{p}", worst <= 1e-10, f"p={p}: max deviation from unit impulse {worst:.2e} (<= 1e-10) at N=512")


# ---------------------------------------------------------------- criterion 7

DPS = 50


def _slope(zs, values):
    x = [math.log(float(1 - z)) for z in zs]
    y = [math.log(float(v)) for v in values]
    return np.polyfit(x, y, 1)[0]


def _zeta_points():
    with mpmath.workdps(DPS):
        return [mpmath.exp(-mpmath.mpf(2) ** -k) for k in range(3, 10)]


@pytest.mark.parametrize("p", range(2, 7))
def test_criterion_7_mu(p):
    zs = _zeta_points()
    with mpmath.workdps(DPS):
        vals = [abs(eval_mu(p, z, dps=DPS) - 1) for z in zs]
    s = _slope(zs, vals)
    report(f"7.mu.p{p}", abs(s - p) <= 0.15, f"|mu-1| slope {s:.3f} for p={p} (target {p} +- 0.15)")


@pytest.mark.parametrize("beta", [0.0, 0.3, 0.5])
@pytest.mark.parametrize("p", range(2, 7))
def test_criterion_7_beta_j(p, beta):
    zs = _zeta_points()
    worst = None
    for j in range(p - 1):
        with mpmath.workdps(DPS):
            s_exp = j + 1 + mpmath.mpf(beta)
            ref = lambda z: mpmath.gamma(s_exp) / (math.factorial(j) * bdf_symbol(p)(z) ** s_exp)  # noqa: E731
            vals = [abs(eval_beta_j(p, j, beta, z, dps=DPS) - ref(z)) for z in zs]
        margin = _slope(zs, vals) - (p - j - 1 - beta - 0.15)
        worst = margin if worst is None else min(worst, margin)
    report(f"7.beta.p{p}.b{beta}", worst >= 0, f"p={p} beta={beta}: worst slope margin over j {worst:+.3f} (>= 0)")


# ---------------------------------------------------------------- criterion 8


def test_criterion_8_special_functions():
    worst_fe = 0.0
    for s in np.linspace(-8, -0.1, 80):
        rhs = 2**s * math.pi ** (s - 1) * math.sin(math.pi * s / 2) * gamma(1 - s) * zeta(1 - s)
        worst_fe = max(worst_fe, abs(zeta(s) - rhs))
    worst_pl = 0.0
    for z in (0.1, 0.3, 0.5, 0.9):
        worst_pl = max(worst_pl, abs(polylog(0, z) - z / (1 - z)), abs(polylog(-1, z) - z / (1 - z) ** 2))
    worst_g = 0.0
    for n in range(0, 12):
        exact = math.factorial(2 * n) / (4**n * math.factorial(n)) * math.sqrt(math.pi)
        worst_g = max(worst_g, abs(gamma(n + 0.5) / exact - 1))
        neg = (-4) ** n * math.factorial(n) / math.factorial(2 * n) * math.sqrt(math.pi)
        worst_g = max(worst_g, abs(gamma(0.5 - n) / neg - 1))
    ok = worst_fe <= 1e-11 and worst_pl <= 1e-12 and worst_g <= 1e-13
    report(
        "8",
        ok,
        f"functional equation residual {worst_fe:.1e} (<= 1e-11), polylog closed forms {worst_pl:.1e} (<= 1e-12), "
        f"half-integer gamma rel {worst_g:.1e} (<= 1e-13)",
    )


# ---------------------------------------------------------------- criterion 9


@pytest.mark.parametrize("k", [1, 3, 5])
def test_criterion_9_fem_orders(k):
    Ms = [4, 8, 16] if k == 5 else [8, 16, 32]
    el2, eritz = [], []
    for M in Ms:
        sp = build_space(math.pi, M, k)
        el2.append(sp.l2_error(sp.l2_project(np.sin), np.sin))
        eritz.append(sp.l2_error(sp.ritz_project(np.sin, np.cos), np.sin))
    orders = [math.log2(e[i] / e[i + 1]) for e in (el2, eritz) for i in range(2)]
    ok = all(abs(o - (k + 1)) <= 0.25 for o in orders)
    report(f"9.k{k}", ok, f"k={k}: L2/Ritz orders {[round(o, 2) for o in orders]} (target {k + 1} +- 0.25)")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
