# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops. Mirrors ``_fallback`` exactly."""
import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin, sqrt

cnp.import_array()


def accumulate_product_outer(const double[::1] theta, const double[::1] phi,
                             const unsigned char[::1] pattern):
    """Sum of |v><v| over samples, v = product of psi / psi_perp factors."""
    cdef Py_ssize_t n_samples = theta.shape[0]
    cdef Py_ssize_t m = pattern.shape[0]
    cdef Py_ssize_t dim = 1 << m
    cdef Py_ssize_t s, k, i, j, length
    cdef double a, br, bi, c, q0r, q0i, q1r, q1i, vr, vi, xr, xi
    cdef double[::1] v_re = np.empty(dim)
    cdef double[::1] v_im = np.empty(dim)
    cdef double[:, ::1] acc_re = np.zeros((dim, dim))
    cdef double[:, ::1] acc_im = np.zeros((dim, dim))

    if phi.shape[0] != n_samples:
        raise ValueError("theta and phi must have the same length")

    for s in range(n_samples):
        a = cos(0.5 * theta[s])
        c = sin(0.5 * theta[s])
        br = cos(phi[s]) * c
        bi = sin(phi[s]) * c
        v_re[0] = 1.0
        v_im[0] = 0.0
        length = 1
        for k in range(m):
            if pattern[k] == 0:
                q0r = a; q0i = 0.0; q1r = br; q1i = bi
            else:
                q0r = -br; q0i = bi; q1r = a; q1i = 0.0
            # expand in place from the top so earlier entries are still intact
            for i in range(length - 1, -1, -1):
                vr = v_re[i]
                vi = v_im[i]
                v_re[2 * i] = vr * q0r - vi * q0i
                v_im[2 * i] = vr * q0i + vi * q0r
                v_re[2 * i + 1] = vr * q1r - vi * q1i
                v_im[2 * i + 1] = vr * q1i + vi * q1r
            length *= 2
        for i in range(dim):
            xr = v_re[i]
            xi = v_im[i]
            for j in range(i, dim):
                # v_i * conj(v_j)
                acc_re[i, j] += xr * v_re[j] + xi * v_im[j]
                acc_im[i, j] += xi * v_re[j] - xr * v_im[j]

    out = np.empty((dim, dim), dtype=np.complex128)
    cdef double complex[:, ::1] o = out
    for i in range(dim):
        for j in range(i, dim):
            o[i, j] = acc_re[i, j] + 1j * acc_im[i, j]
            o[j, i] = acc_re[i, j] - 1j * acc_im[i, j]
    return out


def swap_test_p0_batch(const double complex[:, ::1] signals,
                       const double complex[:, ::1] programs):
    """Ancilla-0 probability of H, Fredkin, H on |0>|s>|p> for each row."""
    cdef Py_ssize_t n = signals.shape[0]
    cdef Py_ssize_t s, i
    cdef double complex amp[8]
    cdef double complex tmp, lo, hi
    cdef double r = 1.0 / sqrt(2.0)
    cdef double p0
    out = np.empty(n)
    cdef double[::1] o = out

    if programs.shape[0] != n or signals.shape[1] != 2 or programs.shape[1] != 2:
        raise ValueError("signals and programs must both have shape (n, 2)")

    for s in range(n):
        # wire 0 = ancilla (bit 4), 1 = signal (bit 2), 2 = program (bit 1)
        for i in range(4):
            amp[i] = signals[s, i >> 1] * programs[s, i & 1]
            amp[4 + i] = 0.0
        for i in range(4):
            lo = amp[i]
            hi = amp[4 + i]
            amp[i] = r * (lo + hi)
            amp[4 + i] = r * (lo - hi)
        # controlled swap on the ancilla=1 half exchanges |1,01> and |1,10>
        tmp = amp[5]
        amp[5] = amp[6]
        amp[6] = tmp
        for i in range(4):
            lo = amp[i]
            hi = amp[4 + i]
            amp[i] = r * (lo + hi)
            amp[4 + i] = r * (lo - hi)
        p0 = 0.0
        for i in range(4):
            p0 += amp[i].real * amp[i].real + amp[i].imag * amp[i].imag
        o[s] = p0
    return out
