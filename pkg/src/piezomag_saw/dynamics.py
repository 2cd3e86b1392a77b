"""Two identical qubits exchanging excitations through the waveguide.

The amplitudes obey

    a'(t) = -G a(t) - G exp(i th) b(t - T) H(t - T)
    b'(t) = -G b(t) - G exp(i th) a(t - T) H(t - T)

with decay rate G into the waveguide, travel time T and propagation phase
th. Integration is by the method of steps: a 4th-order Runge-Kutta step on a
mesh that puts every multiple of T on a grid point, with the delayed
midpoint values taken from the cubic Hermite interpolant of the stored
history.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

try:
    from ._dde_kernel import rk4_delay
    KERNEL = "compiled"
except ImportError:  # extension not built
    from ._dde_py import rk4_delay
    KERNEL = "python"

from .rayleigh import NumericalError

TWO_PI = 2 * math.pi
OMEGA10 = TWO_PI * 4.72e9
DELAY_STEPS_MIN = 50
STEPS_PER_DELAY = 100
STEPS_PER_DECAY = 200  # default dt <= 1 / (200 G)


@dataclass(frozen=True)
class DDEProblem:
    gamma0: float
    delay_t: float
    theta_t: float
    alpha_a0: complex = 1.0
    alpha_b0: complex = 0.0
    t_max: float = 0.0
    dt: float | None = None

    def __post_init__(self):
        if not self.gamma0 > 0:
            raise ValueError("gamma0 must be positive")
        if not self.delay_t >= 0:
            raise ValueError("delay must be non-negative")
        if abs(self.alpha_a0) ** 2 + abs(self.alpha_b0) ** 2 > 1 + 1e-12:
            raise ValueError("initial populations exceed one excitation")
        if not self.t_max >= 0:
            raise ValueError("t_max must be non-negative")
        if self.dt is not None and not self.dt > 0:
            raise ValueError("dt must be positive")


@dataclass(frozen=True)
class Trace:
    times: np.ndarray
    alpha_a: np.ndarray
    alpha_b: np.ndarray

    @property
    def p_a(self) -> np.ndarray:
        return np.abs(self.alpha_a) ** 2

    @property
    def p_b(self) -> np.ndarray:
        return np.abs(self.alpha_b) ** 2

    @property
    def concurrence(self) -> np.ndarray:
        return 2 * np.abs(self.alpha_a * np.conj(self.alpha_b))

    def at(self, t: float) -> int:
        """Index of the sample closest to ``t``."""
        return int(np.argmin(np.abs(self.times - t)))


def theta_from_delay(omega10: float, delay_t: float) -> float:
    """Propagation phase w10*T reduced to [0, 2 pi).

    Whole numbers of cycles within 1e-9 are snapped so that rounding in
    w10*T cannot turn a zero phase into 2 pi.
    """
    cycles = omega10 * delay_t / TWO_PI
    frac = cycles - math.floor(cycles)
    if frac < 1e-9 or 1 - frac < 1e-9:
        return 0.0
    return TWO_PI * frac


def step_size(p: DDEProblem) -> tuple[float, int]:
    """Mesh step and delay length in steps; the step divides T exactly."""
    if p.dt is None:
        target = 1.0 / (STEPS_PER_DECAY * p.gamma0)
        if p.delay_t > 0:
            target = min(target, p.delay_t / STEPS_PER_DELAY)
    else:
        limit = p.delay_t / DELAY_STEPS_MIN if p.delay_t > 0 else 0.01 / p.gamma0
        if p.dt > limit * (1 + 1e-12):
            raise ValueError(f"dt = {p.dt:g} s exceeds the step limit {limit:g} s")
        target = p.dt
    if p.delay_t == 0:
        return target, 0
    n = math.ceil(p.delay_t / target - 1e-9)
    return p.delay_t / n, n


def integrate(p: DDEProblem, kernel=None) -> Trace:
    dt, n_delay = step_size(p)
    n_steps = math.ceil(p.t_max / dt - 1e-9)
    stepper = kernel or rk4_delay
    a, b = stepper(p.gamma0, complex(math.cos(p.theta_t), math.sin(p.theta_t)),
                   n_delay, dt, n_steps, complex(p.alpha_a0), complex(p.alpha_b0))
    a, b = np.asarray(a), np.asarray(b)
    times = dt * np.arange(n_steps + 1)
    finite = np.isfinite(a) & np.isfinite(b)
    if not finite.all():
        bad = int(np.argmin(finite))
        raise NumericalError(f"non-finite amplitude at t = {times[bad]:.6g} s")
    total = np.abs(a) ** 2 + np.abs(b) ** 2
    excess = total - (1 + 1e-9)
    if (excess > 0).any():
        bad = int(np.argmax(excess > 0))
        raise NumericalError(f"populations exceed one at t = {times[bad]:.6g} s",
                             residual=float(total[bad] - 1))
    return Trace(times=times, alpha_a=a, alpha_b=b)


def analytic_segments(p: DDEProblem, n_seg: int = 3):
    """Exact amplitudes on [0, n_seg*T) for a start with b(0) = 0.

    Segment 1: a = a0 e^{-Gt}, b = 0.
    Segment 2: b' + G b = -G e a0 e^{-G(t-T)}, so with the integrating factor
        b = -G e a0 (t-T) e^{-G(t-T)}; a keeps its first-segment form.
    Segment 3: a' + G a = G^2 e^2 a0 (t-2T) e^{-G(t-2T)}, giving
        a = a0 e^{-Gt} + G^2 e^2 a0 (t-2T)^2 e^{-G(t-2T)} / 2;
        b keeps its second-segment form because a(t-T) is still single-exponential.
    """
    if not 1 <= n_seg <= 3:
        raise ValueError("analytic segments are available for n_seg in 1..3")
    if p.alpha_b0 != 0:
        raise ValueError("analytic segments need alpha_b0 = 0")
    if p.delay_t <= 0:
        raise ValueError("analytic segments need a positive delay")
    g, big_t, a0 = p.gamma0, p.delay_t, complex(p.alpha_a0)
    ph = complex(math.cos(p.theta_t), math.sin(p.theta_t))
    end = n_seg * big_t

    def evaluate(t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0) or np.any(t > end * (1 + 1e-12)):
            raise ValueError(f"t outside [0, {end:g}]")
        s1 = t - big_t
        s2 = t - 2 * big_t
        a = a0 * np.exp(-g * t)
        a = a + np.where(s2 >= 0, 0.5 * g * g * ph * ph * a0 * s2 ** 2
                         * np.exp(-g * np.maximum(s2, 0)), 0)
        b = np.where(s1 >= 0, -g * ph * a0 * s1 * np.exp(-g * np.maximum(s1, 0)), 0)
        return a + 0j, b + 0j

    return evaluate


def steady_state(p: DDEProblem) -> tuple[complex, complex, float]:
    """Trapped-pole limit; zero unless th is an odd multiple of pi."""
    off = abs(math.remainder(p.theta_t - math.pi, TWO_PI))
    if off > 1e-12:
        return 0j, 0j, 0.0
    alpha = (complex(p.alpha_a0) + complex(p.alpha_b0)) / (2 * (1 + p.gamma0 * p.delay_t))
    return alpha, alpha, 2 * abs(alpha * alpha.conjugate())


def _fig_problem(gamma_mhz, delay_us, theta, t_max_us):
    return DDEProblem(gamma0=TWO_PI * gamma_mhz * 1e6, delay_t=delay_us * 1e-6,
                      theta_t=theta, alpha_a0=1.0, alpha_b0=0.0, t_max=t_max_us * 1e-6)


def _phase_preset(theta):
    delay = 0.1e-6 + math.fmod(theta, math.pi) / OMEGA10
    return DDEProblem(gamma0=TWO_PI * 1e6, delay_t=delay, theta_t=theta,
                      alpha_a0=1.0, alpha_b0=0.0, t_max=10e-6)


PRESET_NAMES = tuple(f"fig{n}{c}" for n in (7, 8, 9, 10) for c in "abc")


def figure_preset(name: str) -> DDEProblem:
    """Named reference scenarios; all start with qubit A excited."""
    # fig7*/fig8*: th = w10 T reduced, with w10/2pi = 4.72 GHz
    if name in ("fig7a", "fig7b", "fig7c"):
        delay_us = {"fig7a": 0.1, "fig7b": 0.2, "fig7c": 0.3}[name]
        return _fig_problem(100, delay_us, theta_from_delay(OMEGA10, delay_us * 1e-6), 1.0)
    if name in ("fig8a", "fig8b", "fig8c"):
        gamma_mhz = {"fig8a": 100, "fig8b": 10, "fig8c": 1}[name]
        return _fig_problem(gamma_mhz, 0.1, theta_from_delay(OMEGA10, 0.1e-6), 1.0)
    phases = {"a": math.pi / 2, "b": 3 * math.pi / 4, "c": math.pi}
    if name in ("fig9a", "fig9b", "fig9c", "fig10a", "fig10b", "fig10c"):
        return _phase_preset(phases[name[-1]])
    raise ValueError(f"unknown preset '{name}', expected one of {', '.join(PRESET_NAMES)}")


def with_phase(p: DDEProblem, theta: float) -> DDEProblem:
    return replace(p, theta_t=theta)
