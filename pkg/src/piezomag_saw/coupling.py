"""Coupling of one quantized surface-wave mode to magnetic quantum systems.

Energies and gyromagnetic ratios are given as ordinary frequencies (Hz and
Hz/T); every returned rate is angular (rad/s).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import Union

import numpy as np

from .materials import MaterialParams
from .quantize import QuantizedMode, normalize_single_phonon
from .rayleigh import mode_at_frequency

FLUX_QUANTUM = 2.067833848e-15  # Wb
TWO_PI = 2 * math.pi
TRANSMON_RATIO_MIN = 20.0


@dataclass(frozen=True)
class Fluxonium:
    e_c: float
    e_j: float
    e_l: float
    loop_area_s: float


@dataclass(frozen=True)
class Transmon:
    e_c: float
    e_j: float
    loop_area_s: float


@dataclass(frozen=True)
class MagnonFilm:
    gamma_f: float
    spin_s: float
    n_spins: float
    distance_d: float
    freq: float | None = None  # magnon frequency, Hz; defaults to the mode frequency


@dataclass(frozen=True)
class DefectCenter:
    gamma_c: float
    distance_d: float
    freq: float | None = None


QubitSpec = Union[Fluxonium, Transmon, MagnonFilm, DefectCenter]


@dataclass(frozen=True)
class CouplingResult:
    g: complex
    qubit_freq: float
    order: str
    detuning: float

    @property
    def g_abs_hz(self) -> float:
        return abs(self.g) / TWO_PI


NON_NEGATIVE = ("loop_area_s", "distance_d")


def validate_spec(spec: QubitSpec) -> None:
    for name, value in vars(spec).items():
        if value is None:
            continue
        ok = value >= 0 if name in NON_NEGATIVE else value > 0
        if not (ok and math.isfinite(value)):
            raise ValueError(f"{name} must be {'non-negative' if name in NON_NEGATIVE else 'positive'}")
    if isinstance(spec, Transmon) and spec.e_j / spec.e_c < TRANSMON_RATIO_MIN:
        warnings.warn(f"E_J/E_C = {spec.e_j / spec.e_c:.3g} is below the transmon regime "
                      f"({TRANSMON_RATIO_MIN:g})", stacklevel=3)


def fluxonium_frequency(spec: Fluxonium) -> float:
    """Lowest transition, rad/s, with the first-order quartic shift -E_C."""
    ec, ej, el = spec.e_c, spec.e_j, spec.e_l
    return TWO_PI * (2 * math.sqrt(2 * ec * ej) + el * math.sqrt(2 * ec / ej) - ec)


def transmon_frequency(spec: Transmon) -> float:
    return TWO_PI * (4 * math.sqrt(spec.e_c * spec.e_j) - spec.e_c)


def fluxonium_coupling(qm: QuantizedMode, spec: Fluxonium) -> CouplingResult:
    validate_spec(spec)
    flux = qm.b_z_zp * spec.loop_area_s / FLUX_QUANTUM
    g = -TWO_PI * (2 * spec.e_c / spec.e_j) ** 0.25 * (TWO_PI * spec.e_l) * flux
    w10 = fluxonium_frequency(spec)
    return CouplingResult(complex(g), w10, "linear", w10 - qm.mode.omega)


def transmon_coupling(qm: QuantizedMode, spec: Transmon) -> CouplingResult:
    validate_spec(spec)
    flux = math.pi * qm.b_z_zp * spec.loop_area_s / FLUX_QUANTUM
    g = -TWO_PI * math.sqrt(spec.e_c * spec.e_j) * flux ** 2 / 2
    w10 = transmon_frequency(spec)
    return CouplingResult(complex(g), w10, "quadratic", w10 - qm.mode.omega)


def magnon_coupling(qm: QuantizedMode, spec: MagnonFilm) -> CouplingResult:
    validate_spec(spec)
    evanescent = math.exp(-qm.mode.k * spec.distance_d)
    g = ((1 - 1j) * math.sqrt(spec.n_spins * spec.spin_s) * TWO_PI * spec.gamma_f
         * qm.b_xprime_zp * evanescent / 2)
    w10 = qm.mode.omega if spec.freq is None else TWO_PI * spec.freq
    return CouplingResult(complex(g), w10, "linear", w10 - qm.mode.omega)


def defect_coupling(qm: QuantizedMode, spec: DefectCenter) -> CouplingResult:
    validate_spec(spec)
    evanescent = math.exp(-qm.mode.k * spec.distance_d)
    g = (1 - 1j) * TWO_PI * spec.gamma_c * qm.b_xprime_zp * evanescent / (2 * math.sqrt(2))
    w10 = qm.mode.omega if spec.freq is None else TWO_PI * spec.freq
    return CouplingResult(complex(g), w10, "linear", w10 - qm.mode.omega)


def couple(qm: QuantizedMode, spec: QubitSpec) -> CouplingResult:
    if isinstance(spec, Fluxonium):
        return fluxonium_coupling(qm, spec)
    if isinstance(spec, Transmon):
        return transmon_coupling(qm, spec)
    if isinstance(spec, MagnonFilm):
        return magnon_coupling(qm, spec)
    if isinstance(spec, DefectCenter):
        return defect_coupling(qm, spec)
    raise TypeError(f"unsupported qubit spec {type(spec).__name__}")


def qubit_frequency_hz(spec: QubitSpec) -> float | None:
    """Transition frequency of the spec alone, Hz (None when set by the mode)."""
    if isinstance(spec, Fluxonium):
        return fluxonium_frequency(spec) / TWO_PI
    if isinstance(spec, Transmon):
        return transmon_frequency(spec) / TWO_PI
    return spec.freq


def resonant_mode(m: MaterialParams, spec: QubitSpec, width: float,
                  freq_hz: float | None = None) -> QuantizedMode:
    """Quantized mode tuned to the spec's transition unless ``freq_hz`` is given."""
    f = freq_hz if freq_hz is not None else qubit_frequency_hz(spec)
    if f is None:
        raise ValueError("a mode frequency is required for this system")
    return normalize_single_phonon(mode_at_frequency(m, f), m, width)


@dataclass(frozen=True)
class Preset:
    spec: QubitSpec
    freq_hz: float | None  # None: tune the mode to the qubit transition
    width: float

    @property
    def mode_freq_hz(self) -> float:
        return self.freq_hz if self.freq_hz is not None else qubit_frequency_hz(self.spec)


PRESETS = {
    "fig5a": Preset(Fluxonium(e_c=1e9, e_j=3e9, e_l=1e9, loop_area_s=1000e-12), None, 1e-6),
    "fig5b": Preset(Transmon(e_c=100e6, e_j=10e9, loop_area_s=1000e-12), None, 1e-6),
    "fig5c": Preset(MagnonFilm(gamma_f=30.59e9, spin_s=0.5, n_spins=1, distance_d=0.1e-6, freq=3e9),
                    3e9, 1e-6),
    "fig5d": Preset(DefectCenter(gamma_c=28e9, distance_d=0.1e-6, freq=2.87e9), 2.87e9, 1e-6),
}


SWEEP_AXES = ("loop_area_s", "distance_d", "lateral_width_l")


def sweep_coupling(m: MaterialParams, spec: QubitSpec, width: float, axis: str, values,
                   freq_hz: float | None = None):
    """Rows of (axis value, |g|/2pi in Hz, qubit frequency in GHz)."""
    if axis not in SWEEP_AXES:
        raise ValueError(f"unknown sweep axis '{axis}', expected one of {SWEEP_AXES}")
    if axis != "lateral_width_l" and not hasattr(spec, axis):
        raise ValueError(f"axis '{axis}' does not apply to {type(spec).__name__}")
    rows = []
    base = resonant_mode(m, spec, width, freq_hz)
    for value in np.asarray(values, dtype=float):
        if axis == "lateral_width_l":
            qm = normalize_single_phonon(base.mode, m, float(value))
            s = spec
        else:
            qm = base
            s = replace(spec, **{axis: float(value)})
        res = couple(qm, s)
        rows.append((float(value), res.g_abs_hz, res.qubit_freq / TWO_PI / 1e9))
    return rows


def calibrated_spin_count(qm: QuantizedMode, spec: MagnonFilm, target_hz: float = 1673.0) -> float:
    """N*s that reproduces ``target_hz`` for |g_fm|/2pi under this mode."""
    unit = magnon_coupling(qm, replace(spec, n_spins=1.0, spin_s=1.0)).g_abs_hz
    return (target_hz / unit) ** 2
