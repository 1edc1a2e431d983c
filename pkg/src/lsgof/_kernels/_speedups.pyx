# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel backend.

Scalar-loop translation of the reference NumPy kernels.  The Laurent
coefficient tables and the table layout constants are imported from the
reference module at init time so the two backends cannot drift apart.
"""
from libc.math cimport erfc, exp, fabs, floor, log1p, sqrt

import numpy as np

from . import _ref

LOGISTIC_SWITCH_X = float(_ref.LOGISTIC_SWITCH_X)
RE_X0 = float(_ref.RE_X0)
RE_DX = float(_ref.RE_DX)
RE_N = int(_ref.RE_N)

cdef double _SWITCH = LOGISTIC_SWITCH_X
cdef double _RX0 = RE_X0
cdef double _RDX = RE_DX
cdef Py_ssize_t _RN = RE_N

cdef double _SQRT2 = sqrt(2.0)
cdef double _INV_SQRT2PI = 1.0 / sqrt(2.0 * 3.14159265358979323846)

cdef double[:, ::1] _P12C = np.ascontiguousarray(_ref._P12_ROWS, dtype=np.float64)
cdef double[:, ::1] _P2C = np.ascontiguousarray(_ref._PSI2_ROWS, dtype=np.float64)
cdef double[:, ::1] _P3C = np.ascontiguousarray(_ref._PSI3_ROWS, dtype=np.float64)


cdef inline double _re_interp(double x, double[::1] table) nogil:
    cdef double pos, s, w0, w1, w2, w3, val
    cdef Py_ssize_t j
    if x < _RX0:
        return table[0]
    if x > -_RX0:
        return 0.0
    pos = (x - _RX0) / _RDX
    j = <Py_ssize_t>floor(pos)
    if j < 1:
        j = 1
    if j > _RN - 3:
        j = _RN - 3
    s = pos - j
    w0 = -s * (s - 1.0) * (s - 2.0) / 6.0
    w1 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0
    w2 = -(s + 1.0) * s * (s - 2.0) / 2.0
    w3 = (s + 1.0) * s * (s - 1.0) / 6.0
    val = w0 * table[j - 1] + w1 * table[j] + w2 * table[j + 1] + w3 * table[j + 2]
    return val if val > 0.0 else 0.0


def re_cubic(x, table):
    """Cubic 4-point interpolation into the remainder table."""
    arr = np.asarray(x, dtype=np.float64)
    xa = np.ascontiguousarray(np.atleast_1d(arr).ravel())
    ta = np.ascontiguousarray(np.asarray(table, dtype=np.float64))
    out = np.empty(xa.shape[0], dtype=np.float64)
    cdef double[::1] xv = xa
    cdef double[::1] tv = ta
    cdef double[::1] ov = out
    cdef Py_ssize_t i, n = xv.shape[0]
    with nogil:
        for i in range(n):
            ov[i] = _re_interp(xv[i], tv)
    return out.reshape(arr.shape)


cdef inline void _psi_normal_one(double xi, double* o1, double* o2, double* o3) nogil:
    cdef double Ft, f, x2, x3, f2, Ft2, c2, c1inv, p1, denom, num2, num3, p2, p3
    Ft = 0.5 * erfc(xi / _SQRT2)
    f = exp(-0.5 * xi * xi) * _INV_SQRT2PI
    x2 = xi * xi
    x3 = x2 * xi
    f2 = f * f
    Ft2 = Ft * Ft
    c2 = (2.0 * Ft * Ft2 + (x3 + 3.0 * xi) * f * Ft2
          - (2.0 * x2 + 3.0) * f2 * Ft + xi * f * f2)
    c1inv = 2.0 * Ft2 + (x3 + 3.0 * xi) * f * Ft - (x2 + 1.0) * f2
    p1 = 2.0 * f * (Ft2 + xi * f * Ft - f2) / c2
    denom = c1inv * c2
    num2 = (4.0 * xi * Ft2 * Ft2
            + (2.0 * x2 * x2 + 8.0 * x2 - 2.0) * f * Ft * Ft2
            + (x3 * x2 - 7.0 * xi) * f2 * Ft2
            - (2.0 * x2 * x2 + 3.0 * x2 - 1.0) * f * f2 * Ft
            + (x3 + xi) * f2 * f2)
    num3 = (2.0 * (x2 - 1.0) * Ft2 * Ft2
            + (x3 * x2 + 2.0 * x3 - 9.0 * xi) * f * Ft * Ft2
            - (4.0 * x2 * x2 + 9.0 * x2 - 5.0) * f2 * Ft2
            + (5.0 * x3 + 9.0 * xi) * f * f2 * Ft
            - 2.0 * (x2 + 1.0) * f2 * f2)
    p2 = f * num2 / denom
    p3 = f * num3 / denom
    o1[0] = p1 + p2
    o2[0] = p2
    o3[0] = p3


cdef inline double _t2c(double e) nogil:
    if e < 1e-4:
        return e * e * (1.5 + e * (-8.0 / 3.0 + e * (15.0 / 4.0 - e * 24.0 / 5.0)))
    return log1p(e) - e / ((1.0 + e) * (1.0 + e))


cdef inline double _series(double[:, ::1] rows, int lo, double u, double x) nogil:
    cdef double acc = 0.0
    cdef Py_ssize_t k
    for k in range(rows.shape[0] - 1, -1, -1):
        acc = acc * u + (rows[k, 0] + rows[k, 1] * x)
    if lo == -1:
        acc /= u
    return acc


cdef inline void _psi_logistic_one(double xi, double[::1] table,
                                   double* o1, double* o2, double* o3) nogil:
    cdef double u, a, one_a, cube, Ft, f, g22, t2a, v1, phi, k2
    cdef double re_val, v2, dd, k1, S, r1, r2, wr, p1, p2, p3
    if xi > _SWITCH:
        u = exp(-xi)
        o1[0] = _series(_P12C, -1, u, xi)
        o2[0] = _series(_P2C, -1, u, xi)
        o3[0] = _series(_P3C, 0, u, xi)
        return
    a = exp(-fabs(xi))
    one_a = 1.0 + a
    cube = one_a * one_a * one_a
    f = a / (one_a * one_a)
    t2a = _t2c(a)
    if xi >= 0.0:
        Ft = a / one_a
        g22 = a * (3.0 + a * a) / (3.0 * cube)
        v1 = xi * g22 + t2a / 3.0
        phi = (1.0 - a) / one_a
        k2 = -t2a / 3.0
    else:
        Ft = 1.0 / one_a
        g22 = (3.0 * a * a + 1.0) / (3.0 * cube)
        v1 = (t2a - xi * a * (3.0 + a * a) / cube) / 3.0
        phi = (a - 1.0) / one_a
        k2 = (xi - t2a) / 3.0
    re_val = _re_interp(xi, table)
    v2 = -Ft - 2.0 * xi * f + re_val
    dd = g22 * v2 - v1 * v1
    k1 = v2 - xi * v1
    S = Ft - f * f * (k1 + xi * k2) / dd
    r1 = phi
    r2 = xi * phi - 1.0
    wr = f * (k1 * r1 + k2 * r2) / dd
    p1 = (f / S) * (1.0 - wr)
    p2 = f * (v2 * r1 - v1 * r2) / dd - (f * k1 / dd) * p1
    p3 = f * (-v1 * r1 + g22 * r2) / dd - (f * k2 / dd) * p1
    o1[0] = p1 + p2
    o2[0] = p2
    o3[0] = p3


def psi_normal(x):
    """(psi12, psi2, psi3) for the standard normal null."""
    arr = np.asarray(x, dtype=np.float64)
    xa = np.ascontiguousarray(np.atleast_1d(arr).ravel())
    n = xa.shape[0]
    r1 = np.empty(n, dtype=np.float64)
    r2 = np.empty(n, dtype=np.float64)
    r3 = np.empty(n, dtype=np.float64)
    cdef double[::1] xv = xa
    cdef double[::1] o1 = r1
    cdef double[::1] o2 = r2
    cdef double[::1] o3 = r3
    cdef Py_ssize_t i, m = xv.shape[0]
    with nogil:
        for i in range(m):
            _psi_normal_one(xv[i], &o1[i], &o2[i], &o3[i])
    return r1.reshape(arr.shape), r2.reshape(arr.shape), r3.reshape(arr.shape)


def psi_logistic(x, re_table):
    """(psi12, psi2, psi3) for the standard logistic null."""
    arr = np.asarray(x, dtype=np.float64)
    xa = np.ascontiguousarray(np.atleast_1d(arr).ravel())
    ta = np.ascontiguousarray(np.asarray(re_table, dtype=np.float64))
    n = xa.shape[0]
    r1 = np.empty(n, dtype=np.float64)
    r2 = np.empty(n, dtype=np.float64)
    r3 = np.empty(n, dtype=np.float64)
    cdef double[::1] xv = xa
    cdef double[::1] tv = ta
    cdef double[::1] o1 = r1
    cdef double[::1] o2 = r2
    cdef double[::1] o3 = r3
    cdef Py_ssize_t i, m = xv.shape[0]
    with nogil:
        for i in range(m):
            _psi_logistic_one(xv[i], tv, &o1[i], &o2[i], &o3[i])
    return r1.reshape(arr.shape), r2.reshape(arr.shape), r3.reshape(arr.shape)
