# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled hot kernels; semantics mirror _kernels_py operation-for-operation.

Built with -ffp-contract=off so the scalar arithmetic stays bit-identical to
the numpy fallback for random_walk_gain and qam_hard_demap.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp

cnp.import_array()


def random_walk_gain(object steps_in, double g0, double step_sigma, double lo, double hi):
    """Clamped additive random walk; sequential by construction."""
    steps_arr = np.ascontiguousarray(steps_in, dtype=np.float64)
    cdef const double[::1] steps = steps_arr
    cdef Py_ssize_t n = steps.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef double g = g0
    cdef Py_ssize_t i
    for i in range(n):
        g = g + step_sigma * steps[i]
        if g < lo:
            g = lo
        elif g > hi:
            g = hi
        o[i] = g
    return out


def eit_transmission(object omega_in, double gamma2, double gamma3, double gamma4,
                     double omega_c, double delta_rf, double depth):
    """Probe transmission at zero probe detuning vs RF Rabi frequency."""
    omega_arr = np.ascontiguousarray(omega_in, dtype=np.float64)
    cdef const double[::1] omega_rf = omega_arr
    cdef Py_ssize_t n = omega_rf.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef double q = gamma4 * gamma4 + delta_rf * delta_rf
    cdef double c = 0.25 * omega_c * omega_c
    cdef double u, mre, mim, m2, dre, dim, absorb
    cdef Py_ssize_t i
    for i in range(n):
        u = 0.25 * omega_rf[i] * omega_rf[i]
        mre = gamma3 + u * gamma4 / q
        mim = u * delta_rf / q
        m2 = mre * mre + mim * mim
        dre = gamma2 + c * mre / m2
        dim = -(c * mim / m2)
        absorb = gamma2 * dre / (dre * dre + dim * dim)
        o[i] = exp(-depth * absorb)
    return out


def qam_hard_demap(object sym_re_in, object sym_im_in, object con_re_in, object con_im_in):
    """Nearest-constellation-point indices; ties resolve to the lowest index."""
    sym_re_arr = np.ascontiguousarray(sym_re_in, dtype=np.float64)
    sym_im_arr = np.ascontiguousarray(sym_im_in, dtype=np.float64)
    con_re_arr = np.ascontiguousarray(con_re_in, dtype=np.float64)
    con_im_arr = np.ascontiguousarray(con_im_in, dtype=np.float64)
    cdef const double[::1] sym_re = sym_re_arr
    cdef const double[::1] sym_im = sym_im_arr
    cdef const double[::1] con_re = con_re_arr
    cdef const double[::1] con_im = con_im_arr
    cdef Py_ssize_t n = sym_re.shape[0]
    cdef Py_ssize_t m = con_re.shape[0]
    out = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] o = out
    cdef Py_ssize_t i, j, best
    cdef double dr, di, d, bd
    for i in range(n):
        dr = sym_re[i] - con_re[0]
        di = sym_im[i] - con_im[0]
        bd = dr * dr + di * di
        best = 0
        for j in range(1, m):
            dr = sym_re[i] - con_re[j]
            di = sym_im[i] - con_im[j]
            d = dr * dr + di * di
            if d < bd:
                bd = d
                best = j
        o[i] = best
    return out
