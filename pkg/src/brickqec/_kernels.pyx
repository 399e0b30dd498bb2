# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels. See ``_fallback.py`` for the reference semantics."""
import numpy as np

from libc.stdint cimport int64_t, uint64_t, uint8_t


cdef inline Py_ssize_t _insert_zero(Py_ssize_t v, int p) nogil:
    return ((v >> p) << (p + 1)) | (v & (((<Py_ssize_t>1) << p) - 1))


def gate_transfer(double[::1] v, int n, int x, int y, double factor):
    cdef int lo = x if x < y else y
    cdef int hi = y if x < y else x
    cdef Py_ssize_t bx = (<Py_ssize_t>1) << x
    cdef Py_ssize_t by = (<Py_ssize_t>1) << y
    cdef Py_ssize_t count = (<Py_ssize_t>1) << (n - 2)
    cdef Py_ssize_t i, m
    cdef double moved
    if v.shape[0] != ((<Py_ssize_t>1) << n):
        raise ValueError("weight vector length must be 2**n")
    with nogil:
        for i in range(count):
            m = _insert_zero(_insert_zero(i, lo), hi)
            moved = v[m | bx] + v[m | by]
            v[m] += factor * moved
            v[m | bx | by] += factor * moved
            v[m | bx] = 0.0
            v[m | by] = 0.0


def apply_local_table(uint64_t[::1] xs, uint64_t[::1] zs, uint8_t[::1] phases,
                      int qa, int qb, const uint8_t[::1] table_image,
                      const uint8_t[::1] table_phase):
    cdef Py_ssize_t r, rows = xs.shape[0]
    cdef uint64_t one = 1
    cdef uint64_t keep = ~((one << qa) | (one << qb))
    cdef uint64_t x, z, out
    cdef int local
    with nogil:
        for r in range(rows):
            x = xs[r]
            z = zs[r]
            local = <int>(((x >> qa) & one) | (((x >> qb) & one) << 1)
                          | (((z >> qa) & one) << 2) | (((z >> qb) & one) << 3))
            out = table_image[local]
            phases[r] = (phases[r] + table_phase[local]) & 3
            xs[r] = (x & keep) | ((out & one) << qa) | (((out >> 1) & one) << qb)
            zs[r] = (z & keep) | (((out >> 2) & one) << qa) | (((out >> 3) & one) << qb)


cdef inline int _popcount(uint64_t v) nogil:
    cdef int c = 0
    while v:
        v &= v - 1
        c += 1
    return c


cdef void _dfs(int t, int s, uint64_t mask, int j, const int* gx, const int* gy,
               int n, int64_t* counts) noexcept nogil:
    cdef uint64_t both, rot
    cdef int w, walls
    while t < s:
        if ((mask >> gx[t]) & 1) != ((mask >> gy[t]) & 1):
            both = ((<uint64_t>1) << gx[t]) | ((<uint64_t>1) << gy[t])
            _dfs(t + 1, s, mask | both, j + 1, gx, gy, n, counts)
            mask &= ~both
            j += 1
        t += 1
    rot = (mask >> 1) | ((mask & 1) << (n - 1))
    w = _popcount(mask)
    walls = _popcount(mask ^ rot)
    counts[(j * (n + 1) + w) * (n + 1) + walls] += 1


def enumerate_counts(int n, gate_x, gate_y, init_masks):
    cdef int[::1] gx = np.ascontiguousarray(gate_x, dtype=np.intc)
    cdef int[::1] gy = np.ascontiguousarray(gate_y, dtype=np.intc)
    cdef int s = gx.shape[0]
    cdef uint64_t[::1] starts = np.ascontiguousarray(init_masks, dtype=np.uint64)
    counts = np.zeros((s + 1, n + 1, n + 1), dtype=np.int64)
    cdef int64_t[:, :, ::1] c = counts
    cdef Py_ssize_t i
    cdef const int* pgx = &gx[0] if s > 0 else NULL
    cdef const int* pgy = &gy[0] if s > 0 else NULL
    with nogil:
        for i in range(starts.shape[0]):
            _dfs(0, s, starts[i], 0, pgx, pgy, n, &c[0, 0, 0])
    return counts
