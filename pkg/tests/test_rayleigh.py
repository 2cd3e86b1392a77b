import math

import numpy as np
import pytest

from piezomag_saw import rayleigh
from piezomag_saw.acceptance import classical_rayleigh_velocity, isotropic_test_material
from piezomag_saw.materials import TERFENOL_D, bulk_velocities, rotate_to_110
from piezomag_saw.quantize import quantized_field_coefficients

# frozen from the verified solver; guards against silent drift
FROZEN = {
    "v": 1004.9728778423,
    "q_alpha": 0.4288306226254,
    "q_beta": 0.5378229204429,
    "theta": 1.0700384807172,
    "gamma_abs": 1.4115380484239,
    "xi": -2.1400769614344,
    "a_coef": 0.8437324312210,
    "tau": 1.9171386417610,
    "a3_coef": 1.7830798845237,
}


def test_frozen_mode_parameters(mode10):
    for name, value in FROZEN.items():
        assert getattr(mode10, name) == pytest.approx(value, rel=1e-10, abs=1e-12), name


def test_mode_invariants(terfenol, mode10):
    vs, _ = bulk_velocities(terfenol)
    assert mode10.q_alpha > 0
    assert 0 < mode10.v < vs
    assert mode10.omega == mode10.k * mode10.v
    assert 0 <= mode10.theta < math.pi and math.cos(mode10.theta) > 0
    for angle in (mode10.xi, mode10.tau):
        assert -math.pi < angle <= math.pi


def test_k_invariance(terfenol):
    a = rayleigh.solve_mode(terfenol, 1e5).as_dict()
    b = rayleigh.solve_mode(terfenol, 3e8).as_dict()
    for key in FROZEN:
        assert a[key] == pytest.approx(b[key], rel=1e-10, abs=1e-10)


def test_two_way_model_stiffens(terfenol):
    v1, n1, _ = rayleigh.solve_velocity(terfenol, "one_way")
    v2, n2, _ = rayleigh.solve_velocity(terfenol, "two_way")
    assert n1 == n2 == 1
    assert v2 == pytest.approx(1012.3362131317, rel=1e-10)
    assert v2 > v1


def test_unknown_model_rejected(terfenol):
    with pytest.raises(ValueError):
        rayleigh.solve_velocity(terfenol, "three_way")


def test_decay_roots_solve_the_bulk_equations(terfenol, mode10):
    rc = rotate_to_110(terfenol)
    roots = rayleigh.decay_roots(rc, mode10.v)
    assert len(roots) == 3
    for q, vec in roots:
        assert q.real > 0
        mat = rayleigh.characteristic_matrix(rc, mode10.v, q)
        scale = np.abs(mat).max() * np.linalg.norm(vec)
        assert np.linalg.norm(mat @ vec) <= 1e-10 * scale


def test_boundary_determinant_vanishes_at_the_mode(terfenol, mode10):
    rc = rotate_to_110(terfenol)
    assert abs(rayleigh.boundary_determinant(rc, mode10.v)) < 1e-10
    assert abs(rayleigh.boundary_determinant(rc, 0.9 * mode10.v)) > 1e-3


def test_isotropic_elastic_limit_matches_classical_root():
    m = isotropic_test_material()
    vs, vl = bulk_velocities(m)
    mode = rayleigh.solve_mode(m, 1e7)
    assert mode.v == pytest.approx(classical_rayleigh_velocity(vs, vl), rel=1e-10)
    # real decay rates: no trigonometric parameters, fields still available
    assert not mode.oscillating
    f = rayleigh.evaluate_fields(mode, m, 1e-12, 0.0, 0.0, 0.0)
    assert abs(f.u1_prime) > 0 and f.b_z == 0


def test_zero_q33_gives_zero_magnetic_outputs(terfenol):
    m = terfenol.replace(q31=0.0, q33=0.0)
    mode = rayleigh.mode_at_frequency(m, 5e9)
    assert (mode.a_coef, mode.tau, mode.a3_coef) == (0.0, 0.0, 0.0)
    f = rayleigh.evaluate_fields(mode, m, 1e-15, np.linspace(0, 1e-6, 5), 1e-8, 0.0)
    assert np.all(f.psi == 0) and np.all(f.b_xprime == 0) and np.all(f.b_z == 0)


def test_fields_match_trigonometric_profiles(terfenol, mode10):
    z = np.linspace(0, 2 * mode10.wavelength, 9)
    u1, u3, psi = quantized_field_coefficients(mode10, terfenol, z)
    f = rayleigh.evaluate_fields(mode10, terfenol, 1.0, 0.0, z, 0.0)
    np.testing.assert_allclose(f.u1_prime, u1, rtol=0, atol=1e-12)
    np.testing.assert_allclose(f.u3, u3, rtol=0, atol=1e-12)
    np.testing.assert_allclose(f.psi, psi, rtol=0, atol=1e-12 * np.abs(psi).max())


def test_free_surface_conditions(terfenol, mode10):
    x = np.linspace(0, mode10.wavelength, 7)
    t33, t13 = rayleigh.stresses(mode10, terfenol, 1e-12, x, 0.0, 0.0)[1:]
    bulk = np.abs(rayleigh.stresses(mode10, terfenol, 1e-12, x, np.linspace(0, 1e-7, 7), 0.0)).max()
    assert np.abs(t13).max() <= 1e-10 * bulk
    assert np.abs(t33).max() <= 1e-10 * bulk
    inside = rayleigh.evaluate_fields(mode10, terfenol, 1e-12, x, 0.0, 0.0).b_z
    outside = rayleigh.evaluate_fields(mode10, terfenol, 1e-12, x, -1e-300, 0.0).b_z
    assert np.abs(inside - outside).max() <= 1e-10 * np.abs(inside).max()


def test_time_dependence_is_a_travelling_wave(terfenol, mode10):
    shift = 0.3 * mode10.wavelength
    a = rayleigh.evaluate_fields(mode10, terfenol, 1.0, shift, 1e-8, 0.0)
    b = rayleigh.evaluate_fields(mode10, terfenol, 1.0, 0.0, 1e-8, -shift / mode10.v)
    assert a.u1_prime == pytest.approx(b.u1_prime, rel=1e-10)


def test_invalid_wavenumber(terfenol):
    with pytest.raises(ValueError):
        rayleigh.solve_mode(terfenol, 0.0)
    with pytest.raises(ValueError):
        rayleigh.mode_at_frequency(terfenol, -1.0)
