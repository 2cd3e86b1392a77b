# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled RK4 stepper for the two-emitter delay equations."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def rk4_delay(double gamma, double complex phase, Py_ssize_t n_delay, double dt,
              Py_ssize_t n_steps, double complex a0, double complex b0):
    """Integrate a' = -g a - g e b(t-T), b' = -g b - g e a(t-T) on t = j*dt.

    Same contract as the pure-Python ``rk4_delay``.
    """
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] a_arr = np.empty(n_steps + 1, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] b_arr = np.empty(n_steps + 1, dtype=np.complex128)
    cdef double complex[::1] a = a_arr
    cdef double complex[::1] b = b_arr
    cdef Py_ssize_t size = n_delay + 1
    cdef double complex[::1] fa_right = np.zeros(size, dtype=np.complex128)
    cdef double complex[::1] fb_right = np.zeros(size, dtype=np.complex128)
    cdef double complex[::1] fa_left = np.zeros(size, dtype=np.complex128)
    cdef double complex[::1] fb_left = np.zeros(size, dtype=np.complex128)
    cdef double complex ge = gamma * phase
    cdef double h2 = 0.5 * dt
    cdef double complex ya, yb, ta, tb, na, nb
    cdef double complex k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b
    cdef double complex da0, db0, da1, db1, dam, dbm
    cdef double complex ka0, ka1, ka2, kb0, kb1, kb2
    cdef Py_ssize_t j, i, slot, slot0, slot1

    a[0] = a0
    b[0] = b0

    if n_delay == 0:
        for j in range(n_steps):
            ya = a[j]
            yb = b[j]
            k1a = -gamma * ya - ge * yb
            k1b = -gamma * yb - ge * ya
            ta = ya + h2 * k1a
            tb = yb + h2 * k1b
            k2a = -gamma * ta - ge * tb
            k2b = -gamma * tb - ge * ta
            ta = ya + h2 * k2a
            tb = yb + h2 * k2b
            k3a = -gamma * ta - ge * tb
            k3b = -gamma * tb - ge * ta
            ta = ya + dt * k3a
            tb = yb + dt * k3b
            k4a = -gamma * ta - ge * tb
            k4b = -gamma * tb - ge * ta
            a[j + 1] = ya + dt / 6 * (k1a + 2 * k2a + 2 * k3a + k4a)
            b[j + 1] = yb + dt / 6 * (k1b + 2 * k2b + 2 * k3b + k4b)
        return a_arr, b_arr

    fa_right[0] = -gamma * a[0]
    fb_right[0] = -gamma * b[0]
    for j in range(n_steps):
        ya = a[j]
        yb = b[j]
        if j >= n_delay:
            i = j - n_delay
            da0 = a[i]
            db0 = b[i]
            da1 = a[i + 1]
            db1 = b[i + 1]
            slot0 = i % size
            slot1 = (i + 1) % size
            dam = 0.5 * (da0 + da1) + dt * (fa_right[slot0] - fa_left[slot1]) / 8
            dbm = 0.5 * (db0 + db1) + dt * (fb_right[slot0] - fb_left[slot1]) / 8
            ka0 = -ge * db0
            ka1 = -ge * dbm
            ka2 = -ge * db1
            kb0 = -ge * da0
            kb1 = -ge * dam
            kb2 = -ge * da1
        else:
            ka0 = ka1 = ka2 = kb0 = kb1 = kb2 = 0
        k1a = -gamma * ya + ka0
        k1b = -gamma * yb + kb0
        k2a = -gamma * (ya + h2 * k1a) + ka1
        k2b = -gamma * (yb + h2 * k1b) + kb1
        k3a = -gamma * (ya + h2 * k2a) + ka1
        k3b = -gamma * (yb + h2 * k2b) + kb1
        k4a = -gamma * (ya + dt * k3a) + ka2
        k4b = -gamma * (yb + dt * k3b) + kb2
        na = ya + dt / 6 * (k1a + 2 * k2a + 2 * k3a + k4a)
        nb = yb + dt / 6 * (k1b + 2 * k2b + 2 * k3b + k4b)
        a[j + 1] = na
        b[j + 1] = nb

        slot = (j + 1) % size
        fa_left[slot] = -gamma * na + ka2
        fb_left[slot] = -gamma * nb + kb2
        if j + 1 >= n_delay:
            i = j + 1 - n_delay
            fa_right[slot] = -gamma * na - ge * b[i]
            fb_right[slot] = -gamma * nb - ge * a[i]
        else:
            fa_right[slot] = -gamma * na
            fb_right[slot] = -gamma * nb
    return a_arr, b_arr
