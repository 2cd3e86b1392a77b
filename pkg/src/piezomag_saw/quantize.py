"""Single-phonon normalization, zero-point fields and the canonical-form check.

Field convention: a generalized coordinate of the running mode is
``X(+) + X(-)``, the complex field plus its conjugate, so the period average
of a product of two fields a, b is ``2 Re(a conj(b))``.

Energy convention: the classical mode energy is the depth integral over a
quantization cell of lateral size L x L of the period-averaged kinetic plus
potential energy densities. The magnetic part enters with a negative sign
and the strain-potential cross term with a positive sign, so the density is
the one obtained from the constitutive law B = mu H + q S. This energy is
multiplied by ``ENERGY_CONVENTION_SCALE`` before being set equal to hbar*w.
The scale is fixed once so that terfenol-D reproduces the single-phonon
amplitude ``CALIBRATION_U0_L / L``; it does not depend on frequency or L.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import hbar
from scipy.integrate import quad

from .materials import MaterialParams, rotate_to_110
from .rayleigh import NumericalError, RayleighMode, partial_waves

CALIBRATION_U0_L = 8.71e-22  # m**2, u0k * L for terfenol-D
CALIBRATION_FREQ_HZ = 10e9
CALIBRATION_WIDTH_M = 1e-6
ENERGY_CONVENTION_SCALE = 1.1713193781872744  # calibrated_scale(TERFENOL_D)

CONVENTION = {
    "field": "complex field plus its conjugate; period average of a*b is 2 Re(a conj(b))",
    "cell": "L x L lateral cell, semi-infinite depth",
    "energy": "kinetic + elastic - magnetic + strain-potential cross term",
    "energy_convention_scale": ENERGY_CONVENTION_SCALE,
    "calibration": {
        "material": "terfenol-D",
        "u0k_times_l_m2": CALIBRATION_U0_L,
        "freq_hz": CALIBRATION_FREQ_HZ,
        "width_m": CALIBRATION_WIDTH_M,
    },
}


@dataclass(frozen=True)
class QuantizedMode:
    mode: RayleighMode
    lateral_width_l: float
    u0k: float
    b_xprime_zp: float
    b_z_zp: float
    u_zp: float
    energy_per_phonon: float


@dataclass(frozen=True)
class CanonicalDiagnostics:
    z: float
    g_matrix: np.ndarray
    y_matrix: np.ndarray
    q1: np.ndarray
    q2: np.ndarray
    lambda_1: np.ndarray
    lambda_2: np.ndarray
    lambda_p: np.ndarray
    lambda_k: np.ndarray
    offdiag_residual: float
    q1_orthogonality_defect: float
    q2_orthogonality_defect: float
    degenerate: bool


def _pair_average(a, b):
    return 2.0 * np.real(a * np.conj(b))


def _density_terms(mode: RayleighMode, m: MaterialParams, u0: float, z):
    """Period-averaged energy density terms at depth z (J/m^3)."""
    z = np.asarray(z, dtype=float)
    k = mode.k
    rc = rotate_to_110(m)
    rates, amps = partial_waves(mode, m, u0)
    decay = np.exp(-k * rates * np.maximum(z, 0.0)[..., None])

    def val(name):
        return decay @ amps[name]

    def dz(name):
        return decay @ (-k * rates * amps[name])

    u1, u3 = val("u1"), val("u3")
    s11 = 1j * k * u1
    s33 = dz("u3")
    s13 = 0.5 * (dz("u1") + 1j * k * u3)
    psi_x = 1j * k * val("psi")
    psi_z = dz("psi")
    pa = _pair_average
    kinetic = 0.5 * rc.rho * mode.omega ** 2 * (pa(u1, u1) + pa(u3, u3))
    elastic = 0.5 * (rc.c11_prime * pa(s11, s11) + 4 * rc.c44 * pa(s13, s13)
                     + rc.c11 * pa(s33, s33) + 2 * rc.c12 * pa(s11, s33))
    magnetic = -0.5 * rc.mu11 * (pa(psi_x, psi_x) + pa(psi_z, psi_z))
    cross = rc.q31 * pa(s11, psi_z) + rc.q33 * pa(s33, psi_z)
    return kinetic, elastic, magnetic, cross


def energy_density_terms(mode: RayleighMode, m: MaterialParams, u0: float, z) -> dict:
    kinetic, elastic, magnetic, cross = _density_terms(mode, m, u0, z)
    return {"kinetic": kinetic, "elastic": elastic, "magnetic": magnetic, "cross": cross}


def energy_densities(mode: RayleighMode, m: MaterialParams, u0: float, z):
    """(kinetic, potential) period-averaged densities at depth z, J/m^3."""
    kinetic, elastic, magnetic, cross = _density_terms(mode, m, u0, z)
    return kinetic, elastic + magnetic + cross


def _closed_form_integrals(mode: RayleighMode, m: MaterialParams, u0: float) -> dict:
    """Exact depth integrals of each density term, J/m^2.

    Every field is sum_j c_j exp(-k p_j z), so the integral of 2 Re(a conj(b))
    over z > 0 is 2 Re sum_jl a_j conj(b_l) / (k (p_j + conj(p_l))).
    """
    k = mode.k
    rc = rotate_to_110(m)
    p, amps = partial_waves(mode, m, u0)
    kernel = 1.0 / (k * (p[:, None] + np.conj(p)[None, :]))

    def pa(a, b):
        return 2.0 * np.real(np.sum(a[:, None] * np.conj(b)[None, :] * kernel))

    u1, u3, psi = amps["u1"], amps["u3"], amps["psi"]
    s11 = 1j * k * u1
    s33 = -k * p * u3
    s13 = 0.5 * (-k * p * u1 + 1j * k * u3)
    psi_x = 1j * k * psi
    psi_z = -k * p * psi
    return {
        "kinetic": 0.5 * rc.rho * mode.omega ** 2 * (pa(u1, u1) + pa(u3, u3)),
        "elastic": 0.5 * (rc.c11_prime * pa(s11, s11) + 4 * rc.c44 * pa(s13, s13)
                          + rc.c11 * pa(s33, s33) + 2 * rc.c12 * pa(s11, s33)),
        "magnetic": -0.5 * rc.mu11 * (pa(psi_x, psi_x) + pa(psi_z, psi_z)),
        "cross": rc.q31 * pa(s11, psi_z) + rc.q33 * pa(s33, psi_z),
    }


def depth_integrals(mode: RayleighMode, m: MaterialParams, u0: float,
                    method: str = "closed") -> dict:
    """Depth-integrated density terms per unit surface area, J/m^2.

    ``method`` is 'closed' for the exact exponential sums or 'quad' for
    adaptive quadrature down to 40 decay lengths of the slowest partial wave.
    """
    if method == "closed":
        return _closed_form_integrals(mode, m, u0)
    if method != "quad":
        raise ValueError("method must be 'closed' or 'quad'")
    depth = 40.0 / (mode.k * min(r.real for r in mode.rates if r.real > 0))
    names = ("kinetic", "elastic", "magnetic", "cross")
    out = {}
    for i, name in enumerate(names):
        value, _ = quad(lambda z: float(_density_terms(mode, m, u0, z)[i]), 0.0, depth,
                        epsabs=0.0, epsrel=1e-12, limit=400)
        out[name] = value
    return out


def mode_energy(mode: RayleighMode, m: MaterialParams, u0: float, width: float,
                method: str = "closed") -> float:
    """Classical energy of the mode in an L x L cell under the calibrated convention."""
    terms = depth_integrals(mode, m, u0, method)
    return ENERGY_CONVENTION_SCALE * width * width * sum(terms.values())


def quantized_field_coefficients(mode: RayleighMode, m: MaterialParams, z):
    """Depth profiles (U1', U3, Psi) of the generalized coordinates per unit amplitude."""
    z = np.asarray(z, dtype=float)
    if not mode.oscillating:
        rates, amps = partial_waves(mode, m, 1.0)
        decay = np.exp(-mode.k * np.multiply.outer(z, rates))
        return decay @ amps["u1"], decay @ amps["u3"], decay @ amps["psi"]
    kz = mode.k * z
    env = np.exp(-mode.q_alpha * kz)
    phase = mode.q_beta * kz + mode.theta
    u1 = 2 * env * np.cos(phase)
    u3 = -2j * mode.gamma_abs * env * np.cos(phase + mode.xi)
    psi = 1j * (m.q33 / m.mu11) * (2 * mode.a_coef * env * np.cos(phase + mode.tau)
                                   + mode.a3_coef * np.exp(-kz))
    return u1, u3, psi


def zero_point_fields(mode: RayleighMode, m: MaterialParams, u0k: float) -> tuple[float, float]:
    """Signed surface amplitudes of B_x' and B_z per phonon, tesla.

    B_x' is the real surface amplitude; B_z is the amplitude multiplying i.
    """
    if not u0k > 0:
        raise ValueError("u0k must be positive")
    if m.q33 == 0:
        return 0.0, 0.0
    th, ga, a, a3 = mode.theta, mode.gamma_abs, mode.a_coef, mode.a3_coef
    qa, qb = mode.q_alpha, mode.q_beta
    pre = 2 * mode.k * u0k * m.q33
    bx = pre * (a * math.cos(th + mode.tau) + a3 / 2)
    bz = pre * (ga * (qa * math.cos(th + mode.xi) + qb * math.sin(th + mode.xi))
                + a * (qa * math.cos(th + mode.tau) + qb * math.sin(th + mode.tau))
                + (m.q31 / m.q33) * math.cos(th) + a3 / 2)
    return bx, bz


def normalize_single_phonon(mode: RayleighMode, m: MaterialParams, width: float) -> QuantizedMode:
    """Fix the amplitude so one phonon carries hbar*w in an L x L cell."""
    if not width > 0:
        raise ValueError("lateral width must be positive")
    unit_energy = mode_energy(mode, m, 1.0, width)
    if not unit_energy > 0 or not math.isfinite(unit_energy):
        raise NumericalError(f"non-positive mode energy {unit_energy!r}; solver output is inconsistent")
    e_phonon = hbar * mode.omega
    u0k = math.sqrt(e_phonon / unit_energy)
    bx, bz = zero_point_fields(mode, m, u0k)
    u1, u3, _ = quantized_field_coefficients(mode, m, 0.0)
    u_zp = u0k * max(abs(u1), abs(u3))
    return QuantizedMode(
        mode=mode,
        lateral_width_l=float(width),
        u0k=u0k,
        b_xprime_zp=bx,
        b_z_zp=bz,
        u_zp=float(u_zp),
        energy_per_phonon=e_phonon,
    )


def _ratios(mode: RayleighMode, m: MaterialParams, z: float):
    """Real ratios expressing each derivative through one coordinate at depth z.

    Potential is expressed in length units, psi * sqrt(mu11 / c44).
    """
    k = mode.k
    rates, amps = partial_waves(mode, m, 1.0)
    decay = np.exp(-k * rates * z)
    u1 = decay @ amps["u1"]
    u3 = decay @ amps["u3"]
    du1 = decay @ (-rates * amps["u1"])
    du3 = decay @ (-rates * amps["u3"])
    g1 = (1j * u1 / u3).real
    g2 = (du1 / u1).real
    g3 = (1j * u3 / u1).real
    g4 = (du3 / u3).real
    if m.q33 == 0 or not np.any(amps["psi"]):
        # the potential is the free Laplace branch exp(-k z)
        g5, g6 = 0.0, -1.0
    else:
        psi = (decay @ amps["psi"]) * math.sqrt(m.mu11 / m.c44)
        dpsi = (decay @ (-rates * amps["psi"])) * math.sqrt(m.mu11 / m.c44)
        g5 = (1j * psi / u1).real
        g6 = (dpsi / psi).real
    return g1, g2, g3, g4, g5, g6


def potential_form(mode: RayleighMode, m: MaterialParams, z: float) -> np.ndarray:
    """Dimensionless potential-energy matrix at depth z, in units of c44."""
    rc = rotate_to_110(m)
    g1, g2, g3, g4, g5, g6 = _ratios(mode, m, z)
    cp, c11, c12 = rc.c11_prime / rc.c44, rc.c11 / rc.c44, rc.c12 / rc.c44
    root = math.sqrt(rc.mu11 * rc.c44)
    k31, k33 = rc.q31 / root, rc.q33 / root
    g = np.zeros((3, 3))
    g[0, 0] = (g2 + g3) ** 2 - g5 ** 2
    g[1, 1] = cp * g1 ** 2 + c11 * g4 ** 2 + 2 * c12 * g1 * g4
    g[2, 2] = -g6 ** 2
    g[1, 2] = g[2, 1] = (k31 * g1 + k33 * g4) * g6
    return g


def verify_canonical_form(mode: RayleighMode, m: MaterialParams, z: float,
                          degenerate_tol: float = 1e-12) -> CanonicalDiagnostics:
    """Two-stage diagonalization of the kinetic and potential forms at depth z."""
    if z < 0:
        raise ValueError("depth must be non-negative")
    g = potential_form(mode, m, z)
    kinetic = np.diag([1.0, 1.0, 0.0])
    lam1, q1 = np.linalg.eigh(g)
    y = q1.T @ kinetic @ q1
    eye = np.eye(3)
    scale = max(np.abs(lam1).max(), 1e-300)
    if np.min(np.abs(lam1)) <= degenerate_tol * scale:
        nan = np.full((3, 3), np.nan)
        return CanonicalDiagnostics(
            z=float(z), g_matrix=g, y_matrix=y, q1=q1, q2=nan, lambda_1=lam1,
            lambda_2=np.full(3, np.nan), lambda_p=np.full(3, np.nan),
            lambda_k=np.full(3, np.nan), offdiag_residual=math.nan,
            q1_orthogonality_defect=float(np.abs(q1.T @ q1 - eye).max()),
            q2_orthogonality_defect=math.nan, degenerate=True)

    lam2, q2 = np.linalg.eig(np.diag(1.0 / lam1) @ y)
    if np.abs(lam2.imag).max() > 1e-10 * max(np.abs(lam2).max(), 1.0):
        raise NumericalError("kinetic/potential pencil has complex eigenvalues")
    q2 = q2.real
    q2 = q2 / np.linalg.norm(q2, axis=0)
    order = np.argsort(-lam2.real)
    lam2, q2 = lam2.real[order], q2[:, order]
    form_k = q2.T @ y @ q2
    form_p = q2.T @ np.diag(lam1) @ q2

    def offdiag(a):
        return np.abs(a - np.diag(np.diag(a))).max() / np.abs(np.diag(a)).max()

    return CanonicalDiagnostics(
        z=float(z),
        g_matrix=g,
        y_matrix=y,
        q1=q1,
        q2=q2,
        lambda_1=lam1,
        lambda_2=lam2,
        lambda_p=np.diag(form_p).copy(),
        lambda_k=np.diag(form_k).copy(),
        offdiag_residual=float(max(offdiag(form_k), offdiag(form_p))),
        q1_orthogonality_defect=float(np.abs(q1.T @ q1 - eye).max()),
        q2_orthogonality_defect=float(np.abs(q2.T @ q2 - eye).max()),
        degenerate=False,
    )


def calibrated_scale(m: MaterialParams) -> float:
    """Energy scale that makes ``m`` reproduce the calibration amplitude.

    Used to derive ``ENERGY_CONVENTION_SCALE`` for terfenol-D.
    """
    from .rayleigh import mode_at_frequency

    mode = mode_at_frequency(m, CALIBRATION_FREQ_HZ)
    u0 = CALIBRATION_U0_L / CALIBRATION_WIDTH_M
    raw = CALIBRATION_WIDTH_M ** 2 * sum(depth_integrals(mode, m, u0).values())
    return hbar * mode.omega / raw
