"""Rayleigh-type surface wave on a piezomagnetic half space z > 0.

The wave travels along x' = [110]. Every field is a sum of partial waves
``amp * exp(-k q z) * exp(i (k x' - w t))`` and all solving is done in
dimensionless form: stresses in units of c44, squared velocity as
``rho v**2 / c44`` and the magnetic potential rescaled by ``sqrt(mu11 / c44)``
so that it carries units of length like the displacements.

Two coupling models are available:

``one_way`` (default)
    strain drives the magnetic potential but the potential does not act back
    on the stress. The characteristic determinant factorizes into the purely
    elastic part times ``q**2 - 1``. This is the model behind the reference
    terfenol-D parameters used in the acceptance suite.
``two_way``
    the full constitutive coupling ``T = C S - q H`` in the equations of
    motion and the traction condition. Used to quantify stiffening.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial import polynomial as npoly
from scipy.constants import mu_0
from scipy.optimize import brentq

from .materials import MaterialParams, RotatedConstants, bulk_velocities, rotate_to_110

MODELS = ("one_way", "two_way")
SCAN_SAMPLES = 200
SCAN_RANGE = (0.3, 0.999)


class NumericalError(RuntimeError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NoSurfaceModeError(NumericalError):
    pass


@dataclass(frozen=True)
class RayleighMode:
    k: float
    omega: float
    v: float
    q_alpha: float
    q_beta: float
    theta: float
    gamma_abs: float
    xi: float
    a_coef: float
    tau: float
    a3_coef: float
    n_roots: int = 1
    residual: float = 0.0
    # partial waves per unit u0: decay rates, u1' and u3 amplitudes (m/m),
    # potential amplitudes (A/m)
    rates: tuple = ()
    amp_u1: tuple = ()
    amp_u3: tuple = ()
    amp_psi: tuple = ()

    @property
    def wavelength(self) -> float:
        return 2 * math.pi / self.k

    @property
    def frequency_hz(self) -> float:
        return self.omega / (2 * math.pi)

    def with_k(self, k: float) -> "RayleighMode":
        values = dict(self.__dict__)
        values.update(k=k, omega=k * self.v)
        return RayleighMode(**values)

    @property
    def oscillating(self) -> bool:
        return not math.isnan(self.q_beta)

    def as_dict(self) -> dict:
        """Scalar fields only."""
        skip = ("rates", "amp_u1", "amp_u3", "amp_psi")
        return {k: v for k, v in self.__dict__.items() if k not in skip}


@dataclass(frozen=True)
class FieldSample:
    x_prime: np.ndarray
    z: np.ndarray
    t: np.ndarray
    u1_prime: np.ndarray
    u3: np.ndarray
    psi: np.ndarray
    b_xprime: np.ndarray
    b_z: np.ndarray
    s11_prime: np.ndarray
    s33: np.ndarray
    s13: np.ndarray


@dataclass(frozen=True)
class _Scaled:
    cp: float
    c11: float
    c12: float
    k31: float
    k33: float
    mu_r0: float
    c44: float
    mu: float
    rho: float


def _scaled(rc: RotatedConstants) -> _Scaled:
    root = math.sqrt(rc.mu11 * rc.c44)
    return _Scaled(
        cp=rc.c11_prime / rc.c44,
        c11=rc.c11 / rc.c44,
        c12=rc.c12 / rc.c44,
        k31=rc.q31 / root,
        k33=rc.q33 / root,
        mu_r0=mu_0 / rc.mu11,
        c44=rc.c44,
        mu=rc.mu11,
        rho=rc.rho,
    )


def _check_model(model):
    if model not in MODELS:
        raise ValueError(f"unknown coupling model '{model}', expected one of {MODELS}")


def _matrix_entries(sc: _Scaled, big_v, q, model):
    """Dimensionless rows (x motion, z motion, Gauss law) acting on (a1, a3, psi_hat)."""
    b = sc.c12 + 1.0
    two_way = model == "two_way"
    q2 = q * q
    return [
        [q2 - sc.cp + big_v, -1j * b * q, -1j * sc.k31 * q if two_way else 0 * q],
        [-1j * b * q, sc.c11 * q2 - 1.0 + big_v, sc.k33 * q2 if two_way else 0 * q],
        [1j * sc.k31 * q, -sc.k33 * q2, q2 - 1.0],
    ]


def characteristic_matrix(rc: RotatedConstants, v: float, q: complex,
                          model: str = "one_way") -> np.ndarray:
    """Coefficient matrix of a single partial wave, in SI units.

    Rows are the x' and z equations of motion and the Gauss law, each divided
    by k**2; columns act on the displacement amplitudes (m) and the potential
    amplitude (A).
    """
    _check_model(model)
    sc = _scaled(rc)
    dim = np.array(_matrix_entries(sc, rc.rho * v * v / rc.c44, complex(q), model), dtype=complex)
    root = math.sqrt(sc.mu * sc.c44)
    rows = np.array([sc.c44, sc.c44, root])
    cols = np.array([1.0, 1.0, math.sqrt(sc.mu / sc.c44)])
    return rows[:, None] * dim * cols[None, :]


def _determinant_in_s(sc: _Scaled, big_v, model) -> np.ndarray:
    """Coefficients (ascending) of det(matrix) as a polynomial in s = q**2."""
    q = Polynomial([0, 1])
    m = [[e if isinstance(e, Polynomial) else Polynomial([e]) for e in row]
         for row in _matrix_entries(sc, big_v, q, model)]
    det = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
           - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
           + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
    coef = np.zeros(7, dtype=complex)
    coef[: len(det.coef)] = det.coef
    return coef[0::2].real


def _s_roots(sc: _Scaled, big_v, model) -> np.ndarray:
    coef = _determinant_in_s(sc, big_v, model)
    if model == "one_way":
        quotient, remainder = npoly.polydiv(coef, [-1.0, 1.0])
        if np.max(np.abs(remainder)) > 1e-9 * np.max(np.abs(coef)):
            raise NumericalError("determinant lost its magnetic factor",
                                 residual=float(np.max(np.abs(remainder))))
        elastic = np.linalg.eigvals(npoly.polycompanion(quotient))
        return np.concatenate([elastic, [1.0 + 0j]])
    return np.linalg.eigvals(npoly.polycompanion(coef)).astype(complex)


def _null_vector(sc: _Scaled, big_v, q, model, magnetic=False):
    if magnetic:
        return np.array([0.0, 0.0, 1.0], dtype=complex)
    if model == "one_way":
        s = q * q
        a1 = q * (sc.c12 + 1.0)
        a3 = -1j * (s - sc.cp + big_v)
        psi = (sc.k33 * s * a3 - 1j * q * sc.k31 * a1) / (s - 1.0)
        return np.array([a1, a3, psi], dtype=complex)
    rows = np.array(_matrix_entries(sc, big_v, q, model), dtype=complex)
    return np.cross(rows[0], rows[1])


def _decay_roots_dimless(sc: _Scaled, big_v, model):
    s = _s_roots(sc, big_v, model)
    q = np.sqrt(s.astype(complex))
    magnetic = np.zeros(len(q), dtype=bool)
    if model == "one_way":
        magnetic[-1] = True
    keep = q.real > 0
    q, magnetic = q[keep], magnetic[keep]
    order = np.lexsort((q.imag, q.real))
    q, magnetic = q[order], magnetic[order]
    vecs = [_null_vector(sc, big_v, qi, model, mg) for qi, mg in zip(q, magnetic)]
    return q, vecs


def decay_roots(rc: RotatedConstants, v: float, model: str = "one_way"):
    """Decaying partial waves at velocity ``v``.

    Returns a list of ``(q, amplitude)`` pairs sorted by the real part of q.
    Amplitudes are SI null vectors (u1', u3 in m, psi in A).
    """
    _check_model(model)
    sc = _scaled(rc)
    big_v = rc.rho * v * v / rc.c44
    q, vecs = _decay_roots_dimless(sc, big_v, model)
    scale = np.array([1.0, 1.0, math.sqrt(sc.c44 / sc.mu)])
    out = []
    for qi, vec in zip(q, vecs):
        residual = np.abs(characteristic_matrix(rc, v, qi, model) @ (vec * scale)).max()
        size = max(np.abs(vec).max(), 1e-300) * rc.c44
        if residual > 1e-7 * size:
            raise NumericalError(f"partial wave q={qi:.6g} does not satisfy the bulk equations",
                                 residual=float(residual / size))
        out.append((complex(qi), vec * scale))
    return out


def _boundary_columns(sc: _Scaled, q, vecs, model):
    cols = []
    for qi, (a1, a3, psi) in zip(q, vecs):
        t33 = 1j * sc.c12 * a1 - sc.c11 * qi * a3
        if model == "two_way":
            t33 -= sc.k33 * qi * psi
        cols.append([
            -qi * a1 + 1j * a3,
            t33,
            1j * sc.k31 * a1 - qi * sc.k33 * a3 + (qi + sc.mu_r0) * psi,
        ])
    return np.array(cols, dtype=complex).T


def _normalized_determinant(sc: _Scaled, big_v, model):
    q, vecs = _decay_roots_dimless(sc, big_v, model)
    if len(q) != 3:
        raise NumericalError(f"expected three decaying partial waves, found {len(q)}")
    cols = _boundary_columns(sc, q, vecs, model)
    cols = cols / np.linalg.norm(cols, axis=0)
    # dividing by the Vandermonde product makes the value independent of root
    # order and finite where two roots merge
    vander = (q[1] - q[0]) * (q[2] - q[0]) * (q[2] - q[1])
    return 1j * np.linalg.det(cols) / vander


def boundary_determinant(rc: RotatedConstants, v: float, model: str = "one_way") -> complex:
    """Traction-free plus magnetic-continuity determinant at velocity ``v``.

    The value is real up to rounding for subsonic velocities and changes sign
    at a surface mode.
    """
    _check_model(model)
    sc = _scaled(rc)
    return complex(_normalized_determinant(sc, rc.rho * v * v / rc.c44, model))


def _real_det(sc, model, v_shear):
    def f(x):
        try:
            return _normalized_determinant(sc, (x / v_shear) ** 2, model).real
        except NumericalError:
            # some partial wave stopped decaying: no surface mode possible here
            return math.nan
    return f


def solve_velocity(m: MaterialParams, model: str = "one_way") -> tuple[float, int, float]:
    """Slowest surface-wave velocity, number of roots seen, residual."""
    _check_model(model)
    rc = rotate_to_110(m)
    return _solve_velocity(rc, model)


@lru_cache(maxsize=64)
def _solve_velocity(rc: RotatedConstants, model: str):
    sc = _scaled(rc)
    v_shear, _ = bulk_velocities_rc(rc)
    f = _real_det(sc, model, v_shear)
    grid = np.linspace(SCAN_RANGE[0] * v_shear, SCAN_RANGE[1] * v_shear, SCAN_SAMPLES)
    values = np.array([f(x) for x in grid])
    brackets = [i for i in range(len(grid) - 1)
                if values[i] == 0 or values[i] * values[i + 1] < 0]
    if not brackets:
        raise NoSurfaceModeError("no surface mode between 0.3 and 0.999 of the shear speed")
    i = brackets[0]
    v = brentq(f, grid[i], grid[i + 1], xtol=1e-12 * grid[i], rtol=4 * np.finfo(float).eps)
    residual = abs(_normalized_determinant(sc, (v / v_shear) ** 2, model))
    return float(v), len(brackets), float(residual)


def bulk_velocities_rc(rc: RotatedConstants) -> tuple[float, float]:
    return math.sqrt(rc.c44 / rc.rho), math.sqrt(rc.c11_prime / rc.rho)


def _wrap(angle):
    """Reduce to (-pi, pi]."""
    wrapped = math.remainder(angle, 2 * math.pi)
    return math.pi if wrapped == -math.pi else wrapped


@lru_cache(maxsize=64)
def _canonical(m: MaterialParams):
    rc = rotate_to_110(m)
    v, n_roots, residual = _solve_velocity(rc, "one_way")
    sc = _scaled(rc)
    big_v = rc.rho * v * v / rc.c44
    q, vecs = _decay_roots_dimless(sc, big_v, "one_way")
    cols = _boundary_columns(sc, q, vecs, "one_way")
    norms = np.linalg.norm(cols, axis=0)
    vh = np.linalg.svd(cols / norms)[2]
    amps = np.array(vecs) * (vh[-1].conj() / norms)[:, None]
    if rc.q33 == 0:
        amps[:, 2] = 0.0

    nan = math.nan
    params = dict(q_alpha=nan, q_beta=nan, theta=nan, gamma_abs=nan, xi=nan,
                  a_coef=nan, tau=nan, a3_coef=nan)
    oscillating = abs(q[0].imag) > 0 and q[0] == np.conj(q[1])
    if oscillating:
        # the pair q_alpha -/+ i q_beta must carry conjugate u1' coefficients
        amps = amps * np.exp(-0.5j * np.angle(amps[0, 0] * amps[1, 0]))
        if amps[0, 0].real < 0:
            amps = -amps
        amps = amps / abs(amps[0, 0])
        theta = float(np.angle(amps[0, 0]))
        gamma = 1j * amps[0, 1] / amps[0, 0]
        params.update(q_alpha=float(q[1].real), q_beta=float(abs(q[1].imag)), theta=theta,
                      gamma_abs=float(abs(gamma)), xi=_wrap(float(np.angle(gamma))))
        if rc.q33 == 0:
            params.update(a_coef=0.0, tau=0.0, a3_coef=0.0)
        else:
            a_c = -1j * amps[0, 2] / (sc.k33 * amps[0, 0])
            a3_c = -1j * amps[2, 2] / sc.k33
            if abs(a3_c.imag) > 1e-8 * max(1.0, abs(a3_c)):
                raise NumericalError("homogeneous potential amplitude is not real",
                                     residual=float(abs(a3_c.imag)))
            params.update(a_coef=float(abs(a_c)), tau=_wrap(float(np.angle(a_c))),
                          a3_coef=float(a3_c.real))
    else:
        # two real decay rates: no trigonometric form, keep the raw waves
        big = int(np.argmax(np.abs(amps[:, 0])))
        amps = amps * (abs(amps[big, 0]) / amps[big, 0]) / abs(amps[big, 0])

    psi_scale = math.sqrt(sc.c44 / sc.mu)
    return dict(
        v=v,
        **params,
        n_roots=n_roots,
        residual=residual,
        rates=tuple(complex(x) for x in q),
        amp_u1=tuple(complex(x) for x in amps[:, 0]),
        amp_u3=tuple(complex(x) for x in amps[:, 1]),
        amp_psi=tuple(complex(x) * psi_scale for x in amps[:, 2]),
    )


def solve_mode(m: MaterialParams, k: float) -> RayleighMode:
    """Solve the surface mode at wavenumber ``k`` (rad/m) in the one-way model.

    Phase convention: the u1' coefficient of the ``q_alpha - i q_beta``
    partial wave is ``u0 exp(i theta)`` with u0 > 0 and cos(theta) > 0.
    When both elastic decay rates are real the trigonometric parameters are
    NaN and only the partial-wave amplitudes describe the mode.
    """
    if not k > 0:
        raise ValueError("k must be positive")
    params = _canonical(m)
    return RayleighMode(k=float(k), omega=float(k) * params["v"], **params)


def mode_at_frequency(m: MaterialParams, freq_hz: float) -> RayleighMode:
    """Surface mode whose angular frequency is ``2 pi freq_hz``."""
    if not freq_hz > 0:
        raise ValueError("frequency must be positive")
    params = _canonical(m)
    omega = 2 * math.pi * freq_hz
    return RayleighMode(k=omega / params["v"], omega=omega, **params)


def partial_waves(mode: RayleighMode, m: MaterialParams, u0: float):
    """Decay rates and complex amplitudes of u1', u3 (m) and psi (A).

    Returns ``(rates, amps)`` where ``amps`` maps 'u1', 'u3', 'psi' to arrays
    aligned with ``rates`` (dimensionless q values, decay ``exp(-k q z)``).
    """
    rates = np.array(mode.rates, dtype=complex)
    amps = {
        "u1": u0 * np.array(mode.amp_u1, dtype=complex),
        "u3": u0 * np.array(mode.amp_u3, dtype=complex),
        "psi": u0 * np.array(mode.amp_psi, dtype=complex),
    }
    return rates, amps


def evaluate_fields(mode: RayleighMode, m: MaterialParams, u0: float, x_prime, z, t) -> FieldSample:
    """Complex fields at (x', z, t). Arrays broadcast against each other."""
    x_prime, z, t = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (x_prime, z, t)))
    k = mode.k
    rates, amps = partial_waves(mode, m, u0)
    inside = z >= 0
    zi = np.where(inside, z, 0.0)[..., None]
    decay = np.exp(-k * rates * zi)
    carrier = np.exp(1j * (k * x_prime - mode.omega * t))

    def value(name):
        return (decay @ amps[name]) * carrier

    def dz(name):
        return (decay @ (-k * rates * amps[name])) * carrier

    u1, u3, psi_in = value("u1"), value("u3"), value("psi")
    s11 = 1j * k * u1
    s33 = dz("u3")
    s13 = 0.5 * (dz("u1") + 1j * k * u3)
    bx_in = -m.mu11 * 1j * k * psi_in
    bz_in = -m.mu11 * dz("psi") + m.q31 * s11 + m.q33 * s33

    psi_surface = np.sum(amps["psi"]) * carrier
    psi_out = psi_surface * np.exp(k * np.minimum(z, 0.0))
    zero = np.zeros_like(u1)
    return FieldSample(
        x_prime=x_prime,
        z=z,
        t=t,
        u1_prime=np.where(inside, u1, zero),
        u3=np.where(inside, u3, zero),
        psi=np.where(inside, psi_in, psi_out),
        b_xprime=np.where(inside, bx_in, -mu_0 * 1j * k * psi_out),
        b_z=np.where(inside, bz_in, -mu_0 * k * psi_out),
        s11_prime=np.where(inside, s11, zero),
        s33=np.where(inside, s33, zero),
        s13=np.where(inside, s13, zero),
    )


def stresses(mode: RayleighMode, m: MaterialParams, u0: float, x_prime, z, t):
    """Stresses (T11', T33, T13) consistent with the one-way model.

    The potential does not act back on the stress, so only elastic terms
    appear.
    """
    f = evaluate_fields(mode, m, u0, x_prime, z, t)
    rc = rotate_to_110(m)
    t11 = rc.c11_prime * f.s11_prime + rc.c12 * f.s33
    t33 = rc.c12 * f.s11_prime + rc.c11 * f.s33
    t13 = 2 * rc.c44 * f.s13
    return t11, t33, t13
