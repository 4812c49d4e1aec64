# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled orbit kernels.

Same contracts and the same floating point operation order as
``_fallback.py``; the tree walks here are depth-first and allocation free.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, copysign

cnp.import_array()

cdef double LINE_TOL = 1e-9
cdef double SMALL = 1e-13


cdef inline void _mul(const double* A, const double* B, double* out) noexcept nogil:
    out[0] = (A[0] * B[0] - A[1] * B[1]) + (A[2] * B[4] - A[3] * B[5])
    out[1] = (A[0] * B[1] + A[1] * B[0]) + (A[2] * B[5] + A[3] * B[4])
    out[2] = (A[0] * B[2] - A[1] * B[3]) + (A[2] * B[6] - A[3] * B[7])
    out[3] = (A[0] * B[3] + A[1] * B[2]) + (A[2] * B[7] + A[3] * B[6])
    out[4] = (A[4] * B[0] - A[5] * B[1]) + (A[6] * B[4] - A[7] * B[5])
    out[5] = (A[4] * B[1] + A[5] * B[0]) + (A[6] * B[5] + A[7] * B[4])
    out[6] = (A[4] * B[2] - A[5] * B[3]) + (A[6] * B[6] - A[7] * B[7])
    out[7] = (A[4] * B[3] + A[5] * B[2]) + (A[6] * B[7] + A[7] * B[6])


cdef inline int _image(const double* M, const double* c, double* out) noexcept nogil:
    cdef double ar = M[0], ai = M[1], br = M[2], bi = M[3]
    cdef double cr = M[4], ci = M[5], dr = M[6], di = M[7]
    cdef double px = c[0], py = c[1], r = c[2]
    cdef double wr = (cr * px - ci * py) + dr
    cdef double wi = (cr * py + ci * px) + di
    cdef double w2 = wr * wr + wi * wi
    cdef double c2 = (cr * cr + ci * ci) * (r * r)
    cdef double den = w2 - c2
    cdef double nr = (ar * px - ai * py) + br
    cdef double ni = (ar * py + ai * px) + bi
    cdef double t1r = nr * wr + ni * wi
    cdef double t1i = ni * wr - nr * wi
    cdef double rr = r * r
    cdef double t2r = (ar * cr + ai * ci) * rr
    cdef double t2i = (ai * cr - ar * ci) * rr
    out[0] = (t1r - t2r) / den
    out[1] = (t1i - t2i) / den
    out[2] = r / fabs(den)
    return fabs(den) <= LINE_TOL * (w2 + c2)


cdef inline double _diam(const double* c) noexcept nogil:
    cdef double s = sqrt(c[0] * c[0] + c[1] * c[1])
    cdef double x1 = s - c[2]
    cdef double x2 = s + c[2]
    return 4.0 * c[2] / sqrt((1.0 + x1 * x1) * (1.0 + x2 * x2))


cdef inline bint _small_cap(const double* c) noexcept nogil:
    return c[2] * c[2] <= 1.0 + (c[0] * c[0] + c[1] * c[1])


def circle_images(mats, circles):
    cdef double[:, ::1] M = np.ascontiguousarray(mats, dtype=np.float64)
    cdef double[:, ::1] C = np.ascontiguousarray(circles, dtype=np.float64)
    cdef Py_ssize_t n = M.shape[0], i
    out = np.empty((n, 3))
    bad = np.empty(n, dtype=np.uint8)
    cdef double[:, ::1] O = out
    cdef unsigned char[::1] B = bad
    with nogil:
        for i in range(n):
            B[i] = _image(&M[i, 0], &C[i, 0], &O[i, 0])
    return out, bad


def spherical_diameters(circles):
    cdef double[:, ::1] C = np.ascontiguousarray(circles, dtype=np.float64)
    cdef Py_ssize_t n = C.shape[0], i
    out = np.empty(n)
    cdef double[::1] O = out
    with nogil:
        for i in range(n):
            O[i] = _diam(&C[i, 0])
    return out


def small_caps(circles):
    cdef double[:, ::1] C = np.ascontiguousarray(circles, dtype=np.float64)
    cdef Py_ssize_t n = C.shape[0], i
    out = np.empty(n, dtype=bool)
    for i in range(n):
        out[i] = _small_cap(&C[i, 0])
    return out


cdef inline void _csqrt(double x, double y, double* re, double* im) noexcept nogil:
    cdef double m = sqrt(x * x + y * y)
    cdef double t
    if x >= 0.0:
        t = sqrt((m + x) * 0.5)
        re[0] = t
        im[0] = 0.0 if t == 0.0 else y / (2.0 * t)
    else:
        t = sqrt((m - x) * 0.5)
        re[0] = 0.0 if t == 0.0 else fabs(y) / (2.0 * t)
        im[0] = copysign(t, y)


def attracting_fixed_points(mats):
    cdef double[:, ::1] M = np.ascontiguousarray(mats, dtype=np.float64)
    cdef Py_ssize_t n = M.shape[0], i
    out = np.empty((n, 2))
    flag = np.zeros(n, dtype=np.uint8)
    cdef double[:, ::1] O = out
    cdef unsigned char[::1] F = flag
    cdef double ar, ai, br, bi, cr, ci, dr, di, tr_r, tr_i, sr, si
    cdef double k1r, k1i, k2r, k2i, kr, ki, ur, ui, vr, vi, c_mod, u_mod, scale
    with nogil:
        for i in range(n):
            ar = M[i, 0]; ai = M[i, 1]; br = M[i, 2]; bi = M[i, 3]
            cr = M[i, 4]; ci = M[i, 5]; dr = M[i, 6]; di = M[i, 7]
            tr_r = ar + dr
            tr_i = ai + di
            _csqrt((tr_r * tr_r - tr_i * tr_i) - 4.0, 2.0 * tr_r * tr_i, &sr, &si)
            k1r = (tr_r + sr) * 0.5
            k1i = (tr_i + si) * 0.5
            k2r = (tr_r - sr) * 0.5
            k2i = (tr_i - si) * 0.5
            if (k1r * k1r + k1i * k1i) >= (k2r * k2r + k2i * k2i):
                kr = k1r; ki = k1i
            else:
                kr = k2r; ki = k2i
            ur = kr - ar
            ui = ki - ai
            c_mod = cr * cr + ci * ci
            u_mod = ur * ur + ui * ui
            scale = (ar * ar + ai * ai) + (br * br + bi * bi) + (c_mod + (dr * dr + di * di))
            if (c_mod if c_mod > u_mod else u_mod) <= (SMALL * SMALL) * scale:
                F[i] = 1
                O[i, 0] = 0.0
                O[i, 1] = 0.0
            elif c_mod >= u_mod:
                vr = kr - dr
                vi = ki - di
                O[i, 0] = (vr * cr + vi * ci) / c_mod
                O[i, 1] = (vi * cr - vr * ci) / c_mod
            else:
                O[i, 0] = (br * ur + bi * ui) / u_mod
                O[i, 1] = (bi * ur - br * ui) / u_mod
    return out, flag


def word_tree(gens, int first, int depth):
    cdef double[:, ::1] G = np.ascontiguousarray(gens, dtype=np.float64)
    cdef Py_ssize_t g = G.shape[0]
    cdef Py_ssize_t total = 1, width = 1, m
    for m in range(1, depth):
        width *= (g - 1)
        total += width
    mats = np.empty((total, 8))
    last = np.empty(total, dtype=np.int64)
    parent = np.empty(total, dtype=np.int64)
    offsets = np.empty(depth + 1, dtype=np.int64)
    cdef double[:, ::1] M = mats
    cdef long long[::1] L = last
    cdef long long[::1] P = parent
    cdef long long[::1] OFF = offsets
    cdef Py_ssize_t j, s, pos, lo, hi
    for j in range(8):
        M[0, j] = G[first, j]
    L[0] = first
    P[0] = -1
    OFF[0] = 0
    OFF[1] = 1
    pos = 1
    with nogil:
        for m in range(1, depth):
            lo = OFF[m - 1]
            hi = OFF[m]
            for j in range(lo, hi):
                for s in range(g):
                    if s == (L[j] ^ 1):
                        continue
                    _mul(&M[j, 0], &G[s, 0], &M[pos, 0])
                    L[pos] = s
                    P[pos] = j
                    pos += 1
            OFF[m + 1] = pos
    return mats, last, parent, offsets


cdef double _IDENT[8]
_IDENT[:] = [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0]


def level_stats(gens, base, int first, int depth, double threshold):
    cdef double[:, ::1] G = np.ascontiguousarray(gens, dtype=np.float64)
    cdef double[:, ::1] Bc = np.ascontiguousarray(base, dtype=np.float64)
    cdef int g = G.shape[0]
    count = np.zeros(depth, dtype=np.int64)
    maxd = np.zeros(depth)
    sumd = np.zeros(depth)
    large = np.zeros(depth, dtype=np.int64)
    cdef long long[::1] CNT = count
    cdef double[::1] MX = maxd
    cdef double[::1] SM = sumd
    cdef long long[::1] LG = large
    stack = np.empty((depth + 1, 8))
    cdef double[:, ::1] S = stack
    cdef int[::1] nxt = np.zeros(depth + 1, dtype=np.intc)
    cdef int[::1] lst = np.zeros(depth + 1, dtype=np.intc)
    cdef double circ[3]
    cdef double dm
    cdef int lev = 0, s, j
    for j in range(8):
        S[0, j] = _IDENT[j]
    lst[0] = -1
    nxt[0] = first
    with nogil:
        while lev >= 0:
            s = nxt[lev]
            if s >= g or (lev == 0 and s != first):
                lev -= 1
                continue
            nxt[lev] = s + 1
            if s == (lst[lev] ^ 1):
                continue
            _image(&S[lev, 0], &Bc[s, 0], circ)
            dm = _diam(circ)
            CNT[lev] += 1
            SM[lev] += dm
            if dm > MX[lev]:
                MX[lev] = dm
            if dm > threshold:
                LG[lev] += 1
            if lev + 1 < depth:
                _mul(&S[lev, 0], &G[s, 0], &S[lev + 1, 0])
                lst[lev + 1] = s
                nxt[lev + 1] = 0
                lev += 1
    return count, maxd, sumd, large


def census(gens, base, int first, int depth, double threshold, long long budget):
    cdef double[:, ::1] G = np.ascontiguousarray(gens, dtype=np.float64)
    cdef double[:, ::1] Bc = np.ascontiguousarray(base, dtype=np.float64)
    cdef int g = G.shape[0]
    counts = np.zeros(depth, dtype=np.int64)
    maxd = np.zeros(depth)
    sumd = np.zeros(depth)
    cdef long long[::1] CNT = counts
    cdef double[::1] MX = maxd
    cdef double[::1] SM = sumd
    stack = np.empty((depth + 1, 8))
    cdef double[:, ::1] S = stack
    cdef int[::1] nxt = np.zeros(depth + 1, dtype=np.intc)
    cdef int[::1] lst = np.zeros(depth + 1, dtype=np.intc)
    cdef double circ[3]
    cdef double dm
    cdef bint big
    cdef long long visited = 0
    cdef int lev = 0, s, j
    for j in range(8):
        S[0, j] = _IDENT[j]
    lst[0] = -1
    nxt[0] = first
    with nogil:
        while lev >= 0:
            s = nxt[lev]
            if s >= g or (lev == 0 and s != first):
                lev -= 1
                continue
            nxt[lev] = s + 1
            if s == (lst[lev] ^ 1):
                continue
            visited += 1
            if visited > budget:
                visited = -1
                break
            _image(&S[lev, 0], &Bc[s, 0], circ)
            dm = _diam(circ)
            big = dm > threshold
            if big:
                CNT[lev] += 1
                SM[lev] += dm
                if dm > MX[lev]:
                    MX[lev] = dm
            if lev + 1 < depth and (big or not _small_cap(circ)):
                _mul(&S[lev, 0], &G[s, 0], &S[lev + 1, 0])
                lst[lev + 1] = s
                nxt[lev + 1] = 0
                lev += 1
    return counts, maxd, sumd, visited
