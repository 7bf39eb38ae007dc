# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops.  Signatures mirror :mod:`tropos._kernels_py`."""
import numpy as np
cimport numpy as cnp
from libc.math cimport exp, cos, sin

cnp.import_array()


def radical_inverse_num(long long p, long long[::1] ks, int M):
    cdef Py_ssize_t i, n = ks.shape[0]
    cdef long long x, y, pk, acc, place, pM = 1
    cdef int kk, j
    out = np.empty(n, dtype=np.int64)
    cdef long long[::1] o = out
    for j in range(M):
        pM *= p
    for i in range(n):
        x = ks[i]
        acc = 0
        if x >= 0:
            place = pM
            while x > 0:
                place //= p
                acc += (x % p) * place
                x //= p
        else:
            kk = 0
            pk = 1
            while x + pk <= 0:
                pk *= p
                kk += 1
            y = x + pk
            place = pM
            for j in range(kk):
                place //= p
                acc += (y % p) * place
                y //= p
            acc += pM // pk
        o[i] = acc
    return out


def expsum_eval(double[::1] lam, double complex[::1] coef, double complex[::1] s):
    cdef Py_ssize_t i, k, n = s.shape[0], m = lam.shape[0]
    cdef double re, im, mag, ang, sr, si
    out = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] o = out
    for i in range(n):
        sr = s[i].real
        si = s[i].imag
        re = 0.0
        im = 0.0
        for k in range(m):
            mag = exp(-lam[k] * sr)
            ang = -lam[k] * si
            re += mag * (coef[k].real * cos(ang) - coef[k].imag * sin(ang))
            im += mag * (coef[k].real * sin(ang) + coef[k].imag * cos(ang))
        o[i] = re + 1j * im
    return out
