# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the kernels in ``_pykernels``."""
import numpy as np
from libc.math cimport hypot


def world_marginals(const double[::1] probs, int n):
    # bit i is set on contiguous runs of length 2**i starting at odd multiples of 2**i
    cdef Py_ssize_t N = probs.shape[0]
    cdef Py_ssize_t half, start, j
    cdef int i
    cdef double acc
    out = np.zeros(n)
    cdef double[::1] m = out
    for i in range(n):
        half = (<Py_ssize_t> 1) << i
        acc = 0.0
        start = half
        while start < N:
            for j in range(start, start + half):
                acc += probs[j]
            start += 2 * half
        m[i] = acc
    return out


def world_affine(const double[::1] coeffs, double const, int n):
    cdef Py_ssize_t half, j
    cdef int i
    cdef double c
    out = np.empty(1 << n)
    cdef double[::1] o = out
    o[0] = const
    for i in range(n):
        half = (<Py_ssize_t> 1) << i
        c = coeffs[i]
        for j in range(half):
            o[half + j] = o[j] + c
    return out


def world_product(const double[::1] values, int n):
    cdef Py_ssize_t half, j
    cdef int i
    cdef double v, u
    out = np.empty(1 << n)
    cdef double[::1] o = out
    o[0] = 1.0
    for i in range(n):
        half = (<Py_ssize_t> 1) << i
        v = values[i]
        u = 1.0 - v
        for j in range(half):
            o[half + j] = o[j] * v
            o[j] = o[j] * u
    return out


def world_gram(const double[::1] weights, int n):
    cdef Py_ssize_t N = weights.shape[0]
    cdef Py_ssize_t w
    cdef int a, b, k, cnt
    cdef unsigned long long bits
    cdef double d
    cdef int idx[64]
    gram = np.zeros((n + 1, n + 1))
    cdef double[:, ::1] g = gram
    for w in range(N):
        d = weights[w]
        if d == 0.0:
            continue
        g[0, 0] += d
        cnt = 0
        bits = <unsigned long long> w
        k = 0
        while bits:
            if bits & 1:
                idx[cnt] = k + 1
                cnt += 1
            bits >>= 1
            k += 1
        for a in range(cnt):
            g[0, idx[a]] += d
            for b in range(a, cnt):
                g[idx[a], idx[b]] += d
    for a in range(n + 1):
        for b in range(a):
            g[a, b] = g[b, a]
    return gram


def qr_drop(double[:, ::1] R, double[:, ::1] J, int k, int q):
    cdef int i, j, m = J.shape[0]
    cdef double a, b, r, c, s, x, y
    for i in range(q):
        for j in range(k, q - 1):
            R[i, j] = R[i, j + 1]
        R[i, q - 1] = 0.0
    for i in range(k, q - 1):
        a = R[i, i]
        b = R[i + 1, i]
        r = hypot(a, b)
        if r == 0.0:
            continue
        c = a / r
        s = b / r
        for j in range(i, q - 1):
            x = R[i, j]
            y = R[i + 1, j]
            R[i, j] = c * x + s * y
            R[i + 1, j] = -s * x + c * y
        R[i + 1, i] = 0.0
        for j in range(m):
            x = J[j, i]
            y = J[j, i + 1]
            J[j, i] = c * x + s * y
            J[j, i + 1] = -s * x + c * y
