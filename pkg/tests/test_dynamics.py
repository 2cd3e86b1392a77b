import math

import numpy as np
import pytest

from piezomag_saw import dynamics
from piezomag_saw._dde_py import rk4_delay as python_kernel
from piezomag_saw.dynamics import (
    DDEProblem, analytic_segments, figure_preset, integrate, step_size, steady_state,
    theta_from_delay, with_phase,
)
from piezomag_saw.rayleigh import NumericalError

TWO_PI = 2 * math.pi


def wootters(alpha_a, alpha_b):
    """Concurrence of a|10> + b|01> + c|00> from the spin-flipped density matrix."""
    c = math.sqrt(max(0.0, 1 - abs(alpha_a) ** 2 - abs(alpha_b) ** 2))
    psi = np.array([0, alpha_a, alpha_b, c], dtype=complex)  # |11>,|10>,|01>,|00>
    rho = np.outer(psi, psi.conj())
    yy = np.kron([[0, -1j], [1j, 0]], [[0, -1j], [1j, 0]])
    r = rho @ yy @ rho.conj() @ yy
    lam = np.sqrt(np.abs(np.sort(np.linalg.eigvals(r).real)[::-1]))
    return max(0.0, lam[0] - lam[1] - lam[2] - lam[3])


def test_analytic_three_segments():
    p = figure_preset("fig7a")
    trace = integrate(p)
    exact = analytic_segments(p, 3)
    mask = trace.times <= 3 * p.delay_t
    a, b = exact(trace.times[mask])
    dev = max(np.abs(trace.alpha_a[mask] - a).max(), np.abs(trace.alpha_b[mask] - b).max())
    assert dev <= 1e-6


def test_segment_two_peak():
    p = figure_preset("fig7a")
    trace = integrate(p)
    seg = (trace.times > p.delay_t) & (trace.times < 2 * p.delay_t)
    assert trace.p_b[seg].max() == pytest.approx(math.exp(-2), abs=1e-4)


def test_no_delay_matches_matrix_exponential():
    g, th = TWO_PI * 1e6, 0.4
    p = DDEProblem(gamma0=g, delay_t=0.0, theta_t=th, t_max=2e-6)
    trace = integrate(p)
    e = complex(math.cos(th), math.sin(th))
    t = trace.times
    # eigenmodes a +/- b decay with rates g(1 +/- e)
    plus = 0.5 * np.exp(-g * (1 + e) * t)
    minus = 0.5 * np.exp(-g * (1 - e) * t)
    np.testing.assert_allclose(trace.alpha_a, plus + minus, atol=1e-9)
    np.testing.assert_allclose(trace.alpha_b, plus - minus, atol=1e-9)


def test_compiled_and_python_kernels_agree():
    if dynamics.KERNEL != "compiled":
        pytest.skip("extension not built")
    for name in ("fig7b", "fig10c"):
        p = figure_preset(name)
        fast = integrate(p)
        slow = integrate(p, kernel=python_kernel)
        np.testing.assert_allclose(fast.alpha_a, slow.alpha_a, rtol=0, atol=1e-13)
        np.testing.assert_allclose(fast.alpha_b, slow.alpha_b, rtol=0, atol=1e-13)


def test_compiled_kernel_is_selected():
    assert dynamics.KERNEL in ("compiled", "python")


def test_concurrence_matches_general_routine():
    trace = integrate(figure_preset("fig10b"))
    rng = np.random.default_rng(3)
    for i in rng.integers(0, len(trace.times), 10):
        assert trace.concurrence[i] == pytest.approx(wootters(trace.alpha_a[i], trace.alpha_b[i]),
                                                     abs=1e-7)


def test_steady_entanglement_at_the_node():
    p = figure_preset("fig10c")
    trace = integrate(p)
    _, _, pole = steady_state(p)
    assert pole == pytest.approx(1 / (2 * (1 + p.gamma0 * p.delay_t) ** 2), rel=1e-12)
    assert trace.concurrence[-1] == pytest.approx(pole, abs=1e-3)
    assert trace.concurrence[-1] == pytest.approx(0.19, abs=0.01)
    assert steady_state(with_phase(p, math.pi / 2))[2] == 0.0


def test_phase_ordering_and_shift_invariance():
    totals = []
    for name in ("fig9a", "fig9b", "fig9c"):
        p = figure_preset(name)
        trace = integrate(p)
        i = trace.at(20 / p.gamma0)
        totals.append(trace.p_a[i] + trace.p_b[i])
    assert totals[0] < totals[1] < totals[2]
    assert totals[0] < 1e-3 and totals[2] > 0.1
    p = figure_preset("fig9b")
    a, b = integrate(p), integrate(with_phase(p, p.theta_t + math.pi))
    np.testing.assert_allclose(a.p_a + a.p_b, b.p_a + b.p_b, atol=1e-8)


def test_populations_never_grow():
    trace = integrate(figure_preset("fig8a"))
    total = trace.p_a + trace.p_b
    assert total.max() <= 1 + 1e-9
    assert total[-1] < total[0]


def test_theta_from_delay_snaps_whole_cycles():
    assert theta_from_delay(TWO_PI * 4.72e9, 0.1e-6) == 0.0
    assert theta_from_delay(TWO_PI, 0.25) == pytest.approx(math.pi / 2)


def test_step_size_divides_delay():
    dt, n = step_size(figure_preset("fig9a"))
    assert n * dt == pytest.approx(figure_preset("fig9a").delay_t, rel=1e-15)
    with pytest.raises(ValueError):
        step_size(DDEProblem(gamma0=1e6, delay_t=1e-7, theta_t=0, t_max=1e-6, dt=1e-8))


def test_problem_validation():
    with pytest.raises(ValueError):
        DDEProblem(gamma0=0.0, delay_t=1e-7, theta_t=0.0)
    with pytest.raises(ValueError):
        DDEProblem(gamma0=1e6, delay_t=-1e-7, theta_t=0.0)
    with pytest.raises(ValueError):
        DDEProblem(gamma0=1e6, delay_t=1e-7, theta_t=0.0, alpha_a0=1.0, alpha_b0=0.5)
    with pytest.raises(ValueError):
        figure_preset("fig11a")
    with pytest.raises(ValueError):
        analytic_segments(DDEProblem(gamma0=1e6, delay_t=1e-7, theta_t=0.0, alpha_b0=0.1), 2)


def test_divergence_is_reported():
    def bad_kernel(*args):
        a, b = python_kernel(*args)
        a[5] = np.nan
        return a, b

    with pytest.raises(NumericalError):
        integrate(figure_preset("fig7a"), kernel=bad_kernel)
