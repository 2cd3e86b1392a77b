"""Pure-Python RK4 stepper for the two-emitter delay equations.

Same contract as the compiled ``_dde_kernel.rk4_delay``; used when the
extension is not built.
"""
import numpy as np


def rk4_delay(gamma, phase, n_delay, dt, n_steps, a0, b0):
    """Integrate a' = -g a - g e b(t-T), b' = -g b - g e a(t-T) on t = j*dt.

    ``n_delay`` is T/dt (an integer, 0 means no delay). The delayed term is
    switched on for steps starting at or after T; the history before t = 0
    is zero. Returns two complex arrays of length ``n_steps + 1``.
    """
    gamma = float(gamma)
    phase = complex(phase)
    dt = float(dt)
    a = np.empty(n_steps + 1, dtype=complex)
    b = np.empty(n_steps + 1, dtype=complex)
    a[0], b[0] = a0, b0
    ge = gamma * phase
    h2 = 0.5 * dt

    if n_delay == 0:
        for j in range(n_steps):
            ya, yb = complex(a[j]), complex(b[j])
            k1a = -gamma * ya - ge * yb
            k1b = -gamma * yb - ge * ya
            ta, tb = ya + h2 * k1a, yb + h2 * k1b
            k2a = -gamma * ta - ge * tb
            k2b = -gamma * tb - ge * ta
            ta, tb = ya + h2 * k2a, yb + h2 * k2b
            k3a = -gamma * ta - ge * tb
            k3b = -gamma * tb - ge * ta
            ta, tb = ya + dt * k3a, yb + dt * k3b
            k4a = -gamma * ta - ge * tb
            k4b = -gamma * tb - ge * ta
            a[j + 1] = ya + dt / 6 * (k1a + 2 * k2a + 2 * k3a + k4a)
            b[j + 1] = yb + dt / 6 * (k1b + 2 * k2b + 2 * k3b + k4b)
        return a, b

    size = n_delay + 1
    # one-sided derivatives on each grid interval: right end of the left
    # point and left end of the right point, kept for one delay window
    fa_right = [0j] * size
    fb_right = [0j] * size
    fa_left = [0j] * size
    fb_left = [0j] * size
    fa_right[0] = -gamma * a[0]
    fb_right[0] = -gamma * b[0]

    for j in range(n_steps):
        ya, yb = complex(a[j]), complex(b[j])
        if j >= n_delay:
            i = j - n_delay
            da0, db0 = complex(a[i]), complex(b[i])
            da1, db1 = complex(a[i + 1]), complex(b[i + 1])
            slot0, slot1 = i % size, (i + 1) % size
            dam = 0.5 * (da0 + da1) + dt * (fa_right[slot0] - fa_left[slot1]) / 8
            dbm = 0.5 * (db0 + db1) + dt * (fb_right[slot0] - fb_left[slot1]) / 8
            ka = -ge * db0, -ge * dbm, -ge * db1
            kb = -ge * da0, -ge * dam, -ge * da1
        else:
            ka = kb = (0j, 0j, 0j)
        k1a = -gamma * ya + ka[0]
        k1b = -gamma * yb + kb[0]
        k2a = -gamma * (ya + h2 * k1a) + ka[1]
        k2b = -gamma * (yb + h2 * k1b) + kb[1]
        k3a = -gamma * (ya + h2 * k2a) + ka[1]
        k3b = -gamma * (yb + h2 * k2b) + kb[1]
        k4a = -gamma * (ya + dt * k3a) + ka[2]
        k4b = -gamma * (yb + dt * k3b) + kb[2]
        na = ya + dt / 6 * (k1a + 2 * k2a + 2 * k3a + k4a)
        nb = yb + dt / 6 * (k1b + 2 * k2b + 2 * k3b + k4b)
        a[j + 1], b[j + 1] = na, nb

        slot = (j + 1) % size
        fa_left[slot] = -gamma * na + ka[2]
        fb_left[slot] = -gamma * nb + kb[2]
        if j + 1 >= n_delay:
            i = j + 1 - n_delay
            fa_right[slot] = -gamma * na - ge * complex(b[i])
            fb_right[slot] = -gamma * nb - ge * complex(a[i])
        else:
            fa_right[slot] = -gamma * na
            fb_right[slot] = -gamma * nb
    return a, b
