# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled reduction kernels.

Implements the same blockwise-Neumaier + pairwise-tree reduction as
``fallback.py`` with the identical floating-point operation order (ragged
trailing positions are processed as literal 0.0 terms, block totals are padded
with zeros to a power of two), so the two lanes agree bit for bit.  The build
uses ``-ffp-contract=off`` to forbid FMA contraction for the same reason.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs
from libc.stdlib cimport free, malloc

cnp.import_array()

LANE = "compiled"
BLOCK = 64

cdef enum:
    _BLOCK = 64


cdef double _block_tree_sum_raw(const double* x, Py_ssize_t n) except? -1.0:
    cdef Py_ssize_t nb = (n + _BLOCK - 1) // _BLOCK
    cdef Py_ssize_t b, j, idx, size, half, i
    cdef double s, c, t, xj, result
    if n == 0:
        return 0.0
    cdef double* totals = <double*> malloc(nb * sizeof(double))
    if totals == NULL:
        raise MemoryError()
    for b in range(nb):
        s = 0.0
        c = 0.0
        for j in range(_BLOCK):
            idx = b * _BLOCK + j
            xj = x[idx] if idx < n else 0.0
            t = s + xj
            if fabs(s) >= fabs(xj):
                c = c + ((s - t) + xj)
            else:
                c = c + ((xj - t) + s)
            s = t
        totals[b] = s + c

    size = 1
    while size < nb:
        size *= 2
    cdef double* buf = <double*> malloc(size * sizeof(double))
    if buf == NULL:
        free(totals)
        raise MemoryError()
    for i in range(size):
        buf[i] = totals[i] if i < nb else 0.0
    free(totals)
    half = size // 2
    while half >= 1:
        for i in range(half):
            buf[i] = buf[2 * i] + buf[2 * i + 1]
        half //= 2
    result = buf[0]
    free(buf)
    return result


def ordered_sum(values):
    """Sum a float64 vector in the canonical deterministic order."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] x = np.ascontiguousarray(
        values, dtype=np.float64
    )
    cdef Py_ssize_t n = x.shape[0]
    if n == 0:
        return 0.0
    return _block_tree_sum_raw(&x[0], n)


def ordered_dot(weights, values):
    """Dot product: elementwise multiply, then the canonical sum."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] w = np.ascontiguousarray(
        weights, dtype=np.float64
    )
    cdef cnp.ndarray[cnp.float64_t, ndim=1] v = np.ascontiguousarray(
        values, dtype=np.float64
    )
    if w.shape[0] != v.shape[0]:
        raise ValueError("weights and values must have the same shape")
    cdef Py_ssize_t n = w.shape[0]
    cdef Py_ssize_t i
    if n == 0:
        return 0.0
    cdef cnp.ndarray[cnp.float64_t, ndim=1] p = np.empty(n, dtype=np.float64)
    for i in range(n):
        p[i] = w[i] * v[i]
    return _block_tree_sum_raw(&p[0], n)


def pompeiu_sum(cr, ci, wt, vr, vi, double wr, double wi, mask):
    """Accumulate ``sum(v * wt / (center - w))`` over unmasked cells.

    Same contract and operation order as the fallback lane: the elementwise
    complex division is spelled out in real arithmetic, masked entries
    contribute exactly 0.0, and the two component sums use the canonical
    reduction.
    """
    cdef cnp.ndarray[cnp.float64_t, ndim=1] acr = np.ascontiguousarray(
        cr, dtype=np.float64
    )
    cdef cnp.ndarray[cnp.float64_t, ndim=1] aci = np.ascontiguousarray(
        ci, dtype=np.float64
    )
    cdef cnp.ndarray[cnp.float64_t, ndim=1] awt = np.ascontiguousarray(
        wt, dtype=np.float64
    )
    cdef cnp.ndarray[cnp.float64_t, ndim=1] avr = np.ascontiguousarray(
        vr, dtype=np.float64
    )
    cdef cnp.ndarray[cnp.float64_t, ndim=1] avi = np.ascontiguousarray(
        vi, dtype=np.float64
    )
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] amask = np.ascontiguousarray(
        mask, dtype=np.uint8
    )
    cdef Py_ssize_t n = acr.shape[0]
    if not (
        aci.shape[0] == n
        and awt.shape[0] == n
        and avr.shape[0] == n
        and avi.shape[0] == n
        and amask.shape[0] == n
    ):
        raise ValueError("all cell arrays must have the same length")
    if n == 0:
        return 0.0, 0.0
    cdef cnp.ndarray[cnp.float64_t, ndim=1] re = np.empty(n, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] im = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t i
    cdef double dr, di, den, nr, ni
    for i in range(n):
        if amask[i] != 0:
            re[i] = 0.0
            im[i] = 0.0
            continue
        dr = acr[i] - wr
        di = aci[i] - wi
        den = dr * dr + di * di
        nr = avr[i] * awt[i]
        ni = avi[i] * awt[i]
        re[i] = (nr * dr + ni * di) / den
        im[i] = (ni * dr - nr * di) / den
    return _block_tree_sum_raw(&re[0], n), _block_tree_sum_raw(&im[0], n)
