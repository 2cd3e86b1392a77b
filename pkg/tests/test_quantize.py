import math

import numpy as np
import pytest
from scipy.constants import hbar

from piezomag_saw import quantize, rayleigh
from piezomag_saw.quantize import (
    CALIBRATION_U0_L, ENERGY_CONVENTION_SCALE, depth_integrals, energy_densities,
    mode_energy, normalize_single_phonon, verify_canonical_form, zero_point_fields,
)


def test_calibration_point(terfenol, qmode10):
    assert qmode10.u0k == pytest.approx(CALIBRATION_U0_L / 1e-6, rel=1e-12)
    assert quantize.calibrated_scale(terfenol) == pytest.approx(ENERGY_CONVENTION_SCALE, rel=1e-12)
    assert 0.5e-15 <= qmode10.u_zp <= 5e-15


def test_frozen_zero_point_fields(qmode10):
    assert qmode10.b_xprime_zp == pytest.approx(5.67014154937e-07, rel=1e-10)
    assert qmode10.b_z_zp == pytest.approx(-1.1340617561e-07, rel=1e-10)
    assert qmode10.u_zp == pytest.approx(1.18049411947e-15, rel=1e-10)


def test_energy_equals_one_phonon(terfenol, qmode10):
    e = mode_energy(qmode10.mode, terfenol, qmode10.u0k, 1e-6)
    assert e == pytest.approx(hbar * qmode10.mode.omega, rel=1e-12)


def test_closed_form_matches_quadrature(terfenol, mode10):
    closed = depth_integrals(mode10, terfenol, 1e-15, "closed")
    quad = depth_integrals(mode10, terfenol, 1e-15, "quad")
    for key in closed:
        assert quad[key] == pytest.approx(closed[key], rel=1e-8, abs=1e-12 * abs(closed["kinetic"]))
    with pytest.raises(ValueError):
        depth_integrals(mode10, terfenol, 1e-15, "simpson")


def test_kinetic_equals_elastic_potential(terfenol, mode10):
    terms = depth_integrals(mode10, terfenol, 1.0)
    assert terms["kinetic"] == pytest.approx(terms["elastic"], rel=1e-10)
    assert terms["magnetic"] < 0


def test_energy_densities_positive_and_decaying(terfenol, mode10):
    z = np.linspace(0, 3 * mode10.wavelength, 50)
    kinetic, potential = energy_densities(mode10, terfenol, 1e-15, z)
    assert np.all(kinetic >= 0)
    assert kinetic[-1] < 1e-6 * kinetic.max()


def test_amplitude_scales_as_inverse_width(terfenol, mode10):
    a = normalize_single_phonon(mode10, terfenol, 1e-6)
    b = normalize_single_phonon(mode10, terfenol, 10e-6)
    assert a.u0k / b.u0k == pytest.approx(10.0, rel=1e-12)
    assert a.b_xprime_zp / b.b_xprime_zp == pytest.approx(10.0, rel=1e-12)


def test_zero_point_fields_match_field_evaluation(terfenol, qmode10):
    f = rayleigh.evaluate_fields(qmode10.mode, terfenol, qmode10.u0k, 0.0, 0.0, 0.0)
    assert f.b_xprime.real == pytest.approx(qmode10.b_xprime_zp, rel=1e-10)
    assert f.b_z.imag == pytest.approx(qmode10.b_z_zp, rel=1e-10)
    assert abs(f.b_xprime.imag) < 1e-12 * abs(f.b_xprime)


def test_zero_point_fields_vanish_without_coupling(terfenol):
    m = terfenol.replace(q31=0.0, q33=0.0)
    qm = normalize_single_phonon(rayleigh.mode_at_frequency(m, 5e9), m, 1e-6)
    assert (qm.b_xprime_zp, qm.b_z_zp) == (0.0, 0.0)
    assert qm.u0k > 0


def test_invalid_inputs(terfenol, mode10):
    with pytest.raises(ValueError):
        normalize_single_phonon(mode10, terfenol, 0.0)
    with pytest.raises(ValueError):
        zero_point_fields(mode10, terfenol, -1.0)
    with pytest.raises(ValueError):
        verify_canonical_form(mode10, terfenol, -1e-9)


def test_canonical_form_diagonalizes(terfenol, mode10):
    rng = np.random.default_rng(7)
    for z in rng.uniform(0, 2 * mode10.wavelength, 10):
        d = verify_canonical_form(mode10, terfenol, float(z))
        assert not d.degenerate
        assert d.offdiag_residual <= 1e-8
        assert d.q1_orthogonality_defect <= 1e-10
        np.testing.assert_allclose(d.g_matrix, d.g_matrix.T, atol=1e-12 * np.abs(d.g_matrix).max())


def test_canonical_form_second_stage_is_not_orthogonal(terfenol, mode10):
    # the kinetic form and the rotated potential form do not commute, so the
    # second-stage eigenvectors are only orthogonal in the potential metric
    d = verify_canonical_form(mode10, terfenol, 0.1 * mode10.wavelength)
    metric = d.q2.T @ np.diag(d.lambda_1) @ d.q2
    assert np.abs(metric - np.diag(np.diag(metric))).max() <= 1e-8 * np.abs(metric).max()
    assert d.q2_orthogonality_defect > 1e-3


def test_u0_is_independent_of_frequency(terfenol):
    values = [normalize_single_phonon(rayleigh.mode_at_frequency(terfenol, f), terfenol, 1e-6).u0k
              for f in (1e9, 3e9, 10e9)]
    assert max(values) / min(values) - 1 < 1e-10
    assert not math.isnan(values[0])
