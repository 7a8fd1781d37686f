import math

import numpy as np
import pytest

from hadamard_cq.hadamard_ops import LogPower, discrete_hadamard, exact_hadamard, truncation_study, uniform_cq
from hadamard_cq.mesh import build_mesh


def test_exact_examples():
    e = math.e
    assert exact_hadamard(-1, LogPower(1.0), e) == pytest.approx(0.5, rel=1e-15)
    assert exact_hadamard(0.5, LogPower(1.0), e) == pytest.approx(1.1283791670955126, rel=1e-14)
    for t in (1.5, 4.0, 30.0):
        assert exact_hadamard(0.5, LogPower(0.5), t) == pytest.approx(0.8862269254527580, rel=1e-14)


def test_exact_requires_t_after_a():
    with pytest.raises(ValueError):
        exact_hadamard(0.5, LogPower(1.0, a=2.0), 2.0)


def test_logpower_validation():
    with pytest.raises(ValueError):
        LogPower(0.0)
    with pytest.raises(ValueError):
        LogPower(1.0, a=0.0)


def test_zero_samples():
    m = build_mesh(1.0, 3.0, 10)
    np.testing.assert_array_equal(discrete_hadamard(0.5, 3, m, np.zeros(11)), 0.0)


def test_integral_of_one_p1():
    m = build_mesh(1.0, 5.0, 12)
    np.testing.assert_allclose(discrete_hadamard(-1.0, 1, m, np.ones(13)), (np.arange(13) + 1) * m.tau_bar, rtol=1e-14)


def test_length_mismatch():
    with pytest.raises(ValueError):
        discrete_hadamard(0.5, 2, build_mesh(1.0, 2.0, 4), np.zeros(4))


def test_mapping_identity_bitwise():
    mesh = build_mesh(2.0, 11.0, 50)
    u = LogPower(2.5, 2.0)
    U = mesh.tbar**2.5
    # same samples: the exponential-mesh operator is the uniform one, bit for bit
    np.testing.assert_array_equal(discrete_hadamard(0.5, 3, mesh, U), uniform_cq(0.5, 3, mesh.tau_bar, U))
    # samples through log(t/a) differ from n * tau_bar only by rounding
    np.testing.assert_allclose(discrete_hadamard(0.5, 3, mesh, u(mesh.t)), uniform_cq(0.5, 3, mesh.tau_bar, U), rtol=1e-13)


def test_direct_sum_matches():
    mesh = build_mesh(1.0, 4.0, 30)
    vals = np.sin(mesh.tbar)
    from hadamard_cq.cq import cq_weights

    w = cq_weights(4, 0.3, 30).omega
    ref = np.array([sum(w[n - k] * vals[k] for k in range(n + 1)) for n in range(31)]) * mesh.tau_bar**-0.3
    np.testing.assert_allclose(discrete_hadamard(0.3, 4, mesh, vals), ref, rtol=1e-13, atol=1e-15)


def test_order_two_sigma_three():
    u = LogPower(3.0)
    errs = []
    for N in (40, 80):
        mesh = build_mesh(1.0, math.e, N)
        errs.append(abs(discrete_hadamard(0.5, 2, mesh, u(mesh.t))[-1] - exact_hadamard(0.5, u, math.e)))
    assert math.log2(errs[0] / errs[1]) == pytest.approx(2, abs=0.2)


@pytest.mark.parametrize("alpha, sigma, p, expected", [(0.5, 3, 2, 2), (0.5, 0.5, 2, 1.5), (-0.5, 2, 3, 3)])
def test_truncation_examples(alpha, sigma, p, expected):
    rows = truncation_study(alpha, sigma, p, 1.0, math.e, [80, 160, 320, 640])
    assert rows[0].order is None
    assert rows[-1].order == pytest.approx(expected, abs=0.2)
    assert rows[1].tau_bar == pytest.approx(1 / 160)


@pytest.mark.parametrize("p", range(1, 7))
@pytest.mark.parametrize("alpha", [0.5, -0.5])
def test_smooth_log_power_gives_order_p(p, alpha):
    rows = truncation_study(alpha, p + 1.5, p, 1.0, math.e, [40, 80, 160])
    assert rows[-1].order == pytest.approx(p, abs=0.2)


def test_error_larger_near_start():
    # for sigma < p the (log t/a)^(sigma-alpha-p) prefactor dominates close to a
    tau, alpha, sigma, p = 0.01, 0.5, 0.5, 3
    errs = []
    for lt in (0.1, 2.0):
        N = round(lt / tau)
        T = math.exp(lt)
        mesh = build_mesh(1.0, T, N)
        u = LogPower(sigma)
        errs.append(abs(discrete_hadamard(alpha, p, mesh, u(mesh.t))[-1] - exact_hadamard(alpha, u, T)))
    assert errs[0] > errs[1]


def test_threads_do_not_change_results():
    a = truncation_study(0.5, 1.5, 3, 1.0, 5.0, [20, 40, 80])
    b = truncation_study(0.5, 1.5, 3, 1.0, 5.0, [20, 40, 80], threads=3)
    assert a == b


def test_invalid_N_list():
    with pytest.raises(ValueError):
        truncation_study(0.5, 1.0, 3, 1.0, 5.0, [40, 20])
    with pytest.raises(ValueError):
        truncation_study(0.5, 1.0, 3, 1.0, 5.0, [2, 20])
