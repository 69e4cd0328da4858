"""Pure numpy/Python implementations of the hot kernels.

These are the reference semantics; the compiled extension in _kernels.pyx
mirrors them operation-for-operation. random_walk_gain and qam_hard_demap
are bit-identical across both backends (the extension is built with FP
contraction off); eit_transmission may differ in the last ulp of exp().
"""

import numpy as np


def random_walk_gain(steps, g0, step_sigma, lo, hi):
    """Clamped additive random walk; sequential by construction."""
    steps = np.ascontiguousarray(steps, dtype=np.float64)
    out = np.empty(steps.shape[0], dtype=np.float64)
    g = float(g0)
    for i in range(steps.shape[0]):
        g = g + step_sigma * steps[i]
        if g < lo:
            g = lo
        elif g > hi:
            g = hi
        out[i] = g
    return out


def eit_transmission(omega_rf, gamma2, gamma3, gamma4, omega_c, delta_rf, depth):
    """Probe transmission at zero probe detuning vs RF Rabi frequency.

    Weak-probe steady state of the ladder system in continued-fraction form,
    evaluated at zero probe and coupling detuning; delta_rf detunes the RF
    coupling. Output is in (0, 1].
    """
    omega_rf = np.ascontiguousarray(omega_rf, dtype=np.float64)
    q = gamma4 * gamma4 + delta_rf * delta_rf
    c = 0.25 * omega_c * omega_c
    u = 0.25 * omega_rf * omega_rf
    mre = gamma3 + u * gamma4 / q
    mim = u * delta_rf / q
    m2 = mre * mre + mim * mim
    dre = gamma2 + c * mre / m2
    dim = -(c * mim / m2)
    absorb = gamma2 * dre / (dre * dre + dim * dim)
    return np.exp(-depth * absorb)


def qam_hard_demap(sym_re, sym_im, con_re, con_im):
    """Nearest-constellation-point indices; ties resolve to the lowest index."""
    sym_re = np.ascontiguousarray(sym_re, dtype=np.float64)
    sym_im = np.ascontiguousarray(sym_im, dtype=np.float64)
    out = np.empty(sym_re.shape[0], dtype=np.int64)
    chunk = 8192
    for s in range(0, sym_re.shape[0], chunk):
        e = min(s + chunk, sym_re.shape[0])
        dr = sym_re[s:e, None] - con_re[None, :]
        di = sym_im[s:e, None] - con_im[None, :]
        out[s:e] = np.argmin(dr * dr + di * di, axis=1)
    return out
