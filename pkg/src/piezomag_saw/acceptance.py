"""Acceptance suite: one pass/fail record per criterion with measured values.

Everything here is deterministic for a given level and seed, so two runs
produce byte-identical reports.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq

from . import coupling, dynamics, quantize, rayleigh
from .materials import MaterialParams, TERFENOL_D, bulk_velocities

LEVELS = ("fast", "full")

REFERENCE_MODE = {
    "v": (1005.0, "rel", 1e-3),
    "q_alpha": (0.4288, "rel", 5e-3),
    "q_beta": (0.5378, "rel", 5e-3),
    "gamma_abs": (1.4116, "rel", 1e-2),
    "a_coef": (0.8437, "rel", 1e-2),
    "a3_coef": (1.0370, "rel", 1e-2),
    "theta": (1.0700, "rad", 0.02),
    "xi": (-2.1401, "rad", 0.02),
    "tau": (1.9172, "rad", 0.02),
}


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    measured: str
    expected: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"C{self.number:02d} {status} {self.name} | measured: {self.measured} | expected: {self.expected}"


def _g(x) -> str:
    return f"{x:.6g}"


def _angle_gap(a, b):
    return abs(math.remainder(a - b, 2 * math.pi))


def classical_rayleigh_velocity(v_shear: float, v_long: float) -> float:
    """Root of (2 - x^2)^2 = 4 sqrt(1 - x^2) sqrt(1 - x^2 vs^2/vl^2), times vs."""
    r = (v_shear / v_long) ** 2

    def f(x):
        x2 = x * x
        return (2 - x2) ** 2 - 4 * math.sqrt(1 - x2) * math.sqrt(1 - x2 * r)

    return v_shear * brentq(f, 0.5, 1 - 1e-12, xtol=1e-15, rtol=1e-15)


def isotropic_test_material() -> MaterialParams:
    return MaterialParams(name="isotropic-test", rho=5000.0, c11=200e9, c12=100e9, c44=50e9,
                          q31=0.0, q33=0.0, mu11=1e-6)


def check_mode(m: MaterialParams = TERFENOL_D) -> CriterionResult:
    mode = rayleigh.solve_mode(m, 1e7)
    parts, ok = [], True
    for name, (target, kind, tol) in REFERENCE_MODE.items():
        value = getattr(mode, name)
        if kind == "rel":
            good = abs(value - target) <= tol * abs(target)
        else:
            good = _angle_gap(value, target) <= tol
        ok &= good
        parts.append(f"{name}={_g(value)}{'' if good else '(!)'}")
    expected = ", ".join(f"{n}={t}" for n, (t, _, _) in REFERENCE_MODE.items())
    return CriterionResult(1, "mode parameters", ok, " ".join(parts),
                           expected + " (rel 0.1%/0.5%/1%, angles 0.02 rad)")


def check_boundary(m: MaterialParams = TERFENOL_D) -> CriterionResult:
    mode = rayleigh.solve_mode(m, 1e7)
    lam = mode.wavelength
    u0 = 1e-12
    z = np.linspace(0, 3 * lam, 601)
    t11, t33, t13 = rayleigh.stresses(mode, m, u0, 0.0, z, 0.0)
    stress_max = max(np.abs(t11).max(), np.abs(t33).max(), np.abs(t13).max())
    surf = rayleigh.stresses(mode, m, u0, 0.0, 0.0, 0.0)
    stress_res = max(abs(surf[1]), abs(surf[2])) / stress_max
    f_in = rayleigh.evaluate_fields(mode, m, u0, 0.0, 0.0, 0.0)
    f_out = rayleigh.evaluate_fields(mode, m, u0, 0.0, -1e-30 * lam, 0.0)
    b_all = rayleigh.evaluate_fields(mode, m, u0, 0.0, z, 0.0)
    b_max = max(np.abs(b_all.b_xprime).max(), np.abs(b_all.b_z).max())
    jump = abs(f_in.b_z - f_out.b_z) / b_max

    # divergence of the real fields by central differences on a 100 x 100 grid
    h = 1e-4 / mode.k
    xs = np.linspace(0, lam, 100)
    zs = np.linspace(2 * h, lam, 100)
    xg, zg = np.meshgrid(xs, zs, indexing="ij")

    def real_b(x, zz):
        f = rayleigh.evaluate_fields(mode, m, u0, x, zz, 0.0)
        return f.b_xprime.real, f.b_z.real

    bx_p, _ = real_b(xg + h, zg)
    bx_m, _ = real_b(xg - h, zg)
    _, bz_p = real_b(xg, zg + h)
    _, bz_m = real_b(xg, zg - h)
    div = (bx_p - bx_m) / (2 * h) + (bz_p - bz_m) / (2 * h)
    div_rel = np.abs(div).max() / (mode.k * b_max)
    ok = stress_res <= 1e-8 and jump <= 1e-8 and div_rel <= 1e-6
    return CriterionResult(2, "boundary residuals", ok,
                           f"stress={stress_res:.3e} B3_jump={jump:.3e} divB={div_rel:.3e}",
                           "stress<=1e-8 B3_jump<=1e-8 divB<=1e-6")


def check_elastic_limit() -> CriterionResult:
    m = isotropic_test_material()
    v_s, v_l = bulk_velocities(m)
    v_ref = classical_rayleigh_velocity(v_s, v_l)
    v = rayleigh.solve_mode(m, 1e7).v
    rel = abs(v - v_ref) / v_ref
    return CriterionResult(3, "elastic degeneration", rel <= 1e-6,
                           f"v={v:.10g} classical={v_ref:.10g} rel={rel:.3e}", "rel<=1e-6")


def check_normalization(m: MaterialParams = TERFENOL_D) -> CriterionResult:
    mode = rayleigh.mode_at_frequency(m, quantize.CALIBRATION_FREQ_HZ)
    qm = quantize.normalize_single_phonon(mode, m, 1e-6)
    rel = abs(qm.u0k - 8.71e-16) / 8.71e-16
    ok = rel <= 0.02 and 0.5e-15 <= qm.u_zp <= 5e-15
    return CriterionResult(4, "single-phonon normalization", ok,
                           f"u0k={qm.u0k:.4e} m u_zp={qm.u_zp * 1e15:.4g} fm",
                           "u0k=8.71e-16 m within 2%, u_zp in [0.5, 5] fm")


def check_zero_point(m: MaterialParams = TERFENOL_D, level: str = "fast") -> CriterionResult:
    mode = rayleigh.mode_at_frequency(m, 10e9)
    qm = quantize.normalize_single_phonon(mode, m, 1e-6)
    b_max = max(abs(qm.b_xprime_zp), abs(qm.b_z_zp))
    n = 12 if level == "fast" else 40
    widths = np.geomspace(1e-6, 100e-6, n)
    freqs = np.linspace(1e9, 10e9, n)
    grid = np.empty((n, n, 2))
    for j, f in enumerate(freqs):
        md = rayleigh.mode_at_frequency(m, f)
        for i, w in enumerate(widths):
            q = quantize.normalize_single_phonon(md, m, w)
            grid[i, j] = abs(q.b_xprime_zp), abs(q.b_z_zp)
    violations = int(np.sum(np.diff(grid, axis=0) >= 0) + np.sum(np.diff(grid, axis=1) <= 0))
    ok = 0.3e-6 <= b_max <= 3e-6 and violations == 0
    return CriterionResult(5, "zero-point field scale", ok,
                           f"max|B|={b_max * 1e6:.4g} uT monotonicity_violations={violations} grid={n}x{n}",
                           "max|B| in [0.3, 3] uT, 0 violations")


def check_energy(m: MaterialParams = TERFENOL_D) -> CriterionResult:
    mode = rayleigh.mode_at_frequency(m, quantize.CALIBRATION_FREQ_HZ)
    qm = quantize.normalize_single_phonon(mode, m, 1e-6)
    e_quad = quantize.mode_energy(mode, m, qm.u0k, 1e-6, method="quad")
    e_closed = quantize.mode_energy(mode, m, qm.u0k, 1e-6, method="closed")
    rel_quad = abs(e_quad - qm.energy_per_phonon) / qm.energy_per_phonon
    rel_closed = abs(e_closed - qm.energy_per_phonon) / qm.energy_per_phonon
    ok = rel_quad <= 1e-6 and rel_closed <= 1e-6
    return CriterionResult(6, "energy closure", ok,
                           f"quad_rel={rel_quad:.3e} closed_rel={rel_closed:.3e}", "both <= 1e-6")


def check_canonical(m: MaterialParams = TERFENOL_D, seed: int = 0) -> CriterionResult:
    mode = rayleigh.solve_mode(m, 1e7)
    rng = np.random.default_rng(seed)
    depths = rng.uniform(0, 2 * mode.wavelength, 20)
    res = q1_def = q2_def = 0.0
    degenerate = 0
    for z in depths:
        d = quantize.verify_canonical_form(mode, m, float(z))
        if d.degenerate:
            degenerate += 1
            continue
        res = max(res, d.offdiag_residual)
        q1_def = max(q1_def, d.q1_orthogonality_defect)
        q2_def = max(q2_def, d.q2_orthogonality_defect)
    ok = degenerate == 0 and res <= 1e-8 and q1_def <= 1e-10 and q2_def <= 1e-10
    return CriterionResult(7, "canonical-form verifier", ok,
                           f"offdiag={res:.3e} Q1_orth={q1_def:.3e} Q2_orth={q2_def:.3e} degenerate={degenerate}",
                           "offdiag<=1e-8, orthogonality<=1e-10")


def check_qubit_frequencies() -> CriterionResult:
    fx = coupling.fluxonium_frequency(coupling.PRESETS["fig5a"].spec) / (2 * math.pi)
    ts = coupling.transmon_frequency(coupling.PRESETS["fig5b"].spec) / (2 * math.pi)
    ok = abs(fx - 4.72e9) <= 0.005 * 4.72e9 and abs(ts - 3.9e9) <= 0.005 * 3.9e9
    return CriterionResult(8, "qubit frequencies", ok,
                           f"fluxonium={fx / 1e9:.6g} GHz transmon={ts / 1e9:.6g} GHz",
                           "4.72 GHz and 3.9 GHz within 0.5%")


def table_bands(m: MaterialParams = TERFENOL_D, n: int = 3):
    """Min and max |g|/2pi per system over the parameter boxes."""
    widths = np.geomspace(1e-6, 100e-6, n)
    areas = np.linspace(100e-12, 1000e-12, n)
    dists = np.linspace(0.1e-6, 1e-6, n)
    out = {}
    for key, name, axis_values in (("fig5a", "fluxonium", areas), ("fig5b", "transmon", areas),
                                   ("fig5c", "magnon", dists), ("fig5d", "defect", dists)):
        preset = coupling.PRESETS[key]
        mode = rayleigh.mode_at_frequency(m, preset.mode_freq_hz)
        values = []
        for w in widths:
            qm = quantize.normalize_single_phonon(mode, m, w)
            for x in axis_values:
                field = "loop_area_s" if key in ("fig5a", "fig5b") else "distance_d"
                values.append(coupling.couple(qm, replace(preset.spec, **{field: x})).g_abs_hz)
        out[name] = (min(values), max(values))
    return out


BANDS = {"fluxonium": (1.0, 1e8), "transmon": (1.0, 1e8), "magnon": (1.0, 1e4), "defect": (1.0, 1e4)}


def check_couplings(m: MaterialParams = TERFENOL_D, level: str = "fast") -> CriterionResult:
    results = {}
    for key in ("fig5c", "fig5d"):
        p = coupling.PRESETS[key]
        qm = coupling.resonant_mode(m, p.spec, p.width, p.freq_hz)
        results[key] = (qm, coupling.couple(qm, p.spec).g_abs_hz)
    g_fm, g_cm = results["fig5c"][1], results["fig5d"][1]
    ok_anchor = abs(g_fm - 1673) <= 0.25 * 1673 and abs(g_cm - 1484) <= 0.25 * 1484

    qm = results["fig5c"][0]
    spec = coupling.PRESETS["fig5c"].spec
    g1 = abs(coupling.couple(qm, replace(spec, distance_d=0.1e-6)).g)
    g2 = abs(coupling.couple(qm, replace(spec, distance_d=0.4e-6)).g)
    law = abs(g1 / g2 / math.exp(-qm.mode.k * (0.1e-6 - 0.4e-6)) - 1)

    bands = table_bands(m, 3 if level == "fast" else 7)
    band_ok = all(BANDS[n][0] <= lo and hi <= BANDS[n][1] for n, (lo, hi) in bands.items())
    ok = ok_anchor and law <= 1e-10 and band_ok
    band_txt = " ".join(f"{n}=[{lo:.3g},{hi:.3g}]Hz" for n, (lo, hi) in bands.items())
    return CriterionResult(9, "coupling anchors and bands", ok,
                           f"g_fm={g_fm:.5g} Hz g_cm={g_cm:.5g} Hz evanescent_err={law:.2e} {band_txt}",
                           "g_fm=1673 Hz, g_cm=1484 Hz within 25%; law<=1e-10; "
                           "bands [1 Hz,100 MHz] qubits, [1 Hz,10 kHz] magnon/defect")


def check_dde_oracle() -> CriterionResult:
    p = dynamics.figure_preset("fig7a")
    p = replace(p, t_max=3 * p.delay_t)
    tr = dynamics.integrate(p)
    a, b = dynamics.analytic_segments(p, 3)(tr.times)
    dev = max(np.abs(tr.alpha_a - a).max(), np.abs(tr.alpha_b - b).max())
    seg2 = (tr.times >= p.delay_t) & (tr.times < 2 * p.delay_t)
    peak = tr.p_b[seg2].max()
    ok = dev <= 1e-6 and abs(peak - math.exp(-2)) <= 1e-4
    return CriterionResult(10, "delay-equation oracle", ok,
                           f"max_dev={dev:.3e} peak_PB={peak:.8f}",
                           f"max_dev<=1e-6, peak_PB={math.exp(-2):.8f}+-1e-4")


def check_steady_entanglement() -> CriterionResult:
    p = dynamics.figure_preset("fig10c")
    p = replace(p, t_max=50 / p.gamma0)
    c_end = float(dynamics.integrate(p).concurrence[-1])
    c_pole = 1 / (2 * (1 + p.gamma0 * p.delay_t) ** 2)
    _, _, c_inf = dynamics.steady_state(p)
    ok = abs(c_end - 0.19) <= 0.01 and abs(c_end - c_pole) <= 1e-3 and abs(c_inf - c_pole) <= 1e-12
    return CriterionResult(11, "steady entanglement", ok,
                           f"C(50/G)={c_end:.6f} pole={c_pole:.6f}", "0.19+-0.01, pole within 1e-3")


def check_phase_physics() -> CriterionResult:
    totals = []
    inv = 0.0
    for name in ("fig9a", "fig9b", "fig9c"):
        p = dynamics.figure_preset(name)
        p = replace(p, t_max=20 / p.gamma0)
        tr = dynamics.integrate(p)
        totals.append(tr.p_a[-1] + tr.p_b[-1])
        tr2 = dynamics.integrate(dynamics.with_phase(p, p.theta_t + math.pi))
        inv = max(inv, np.abs(tr.p_a - tr2.p_a).max(), np.abs(tr.p_b - tr2.p_b).max(),
                  np.abs(tr.concurrence - tr2.concurrence).max())
    ok = totals[0] < totals[1] < totals[2] and totals[0] < 1e-3 and totals[2] > 0.1 and inv <= 1e-8
    return CriterionResult(12, "phase physics", ok,
                           f"P(pi/2)={totals[0]:.3e} P(3pi/4)={totals[1]:.3e} P(pi)={totals[2]:.4f} "
                           f"shift_invariance={inv:.1e}",
                           "P(pi/2)<P(3pi/4)<P(pi), P(pi/2)<1e-3, P(pi)>0.1, invariance<=1e-8")


def _core(level, seed, m):
    return [
        check_mode(m),
        check_boundary(m),
        check_elastic_limit(),
        check_normalization(m),
        check_zero_point(m, level),
        check_energy(m),
        check_canonical(m, seed),
        check_qubit_frequencies(),
        check_couplings(m, level),
        check_dde_oracle(),
        check_steady_entanglement(),
        check_phase_physics(),
    ]


def run_acceptance(level: str = "fast", seed: int = 0, material: MaterialParams = TERFENOL_D):
    if level not in LEVELS:
        raise ValueError(f"level must be one of {LEVELS}")
    first = _core(level, seed, material)
    report = "\n".join(r.line() for r in first)
    rayleigh._canonical.cache_clear()
    rayleigh._solve_velocity.cache_clear()
    again = "\n".join(r.line() for r in _core(level, seed, material))
    same = again == report
    first.append(CriterionResult(13, "determinism", same, f"identical_rerun={same}",
                                 "byte-identical report"))
    return first


def format_report(results) -> str:
    lines = [r.line() for r in results]
    passed = sum(r.passed for r in results)
    lines.append(f"summary: {passed}/{len(results)} passed")
    return "\n".join(lines) + "\n"
