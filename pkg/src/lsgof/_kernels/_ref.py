"""NumPy reference implementation of the transform integrand kernels.

Evaluates the three-component integrand vector

    (psi12, psi2, psi3)(x),  psi(x) = Gamma_{F(x)}^{-1} l(x) f(x),

in the paired basis psi12 = psi1 + psi2, which keeps the components that a
caller combines with l(z)-type coefficients at bounded magnitude.  The
logistic family switches at x = 6 from a direct Schur-complement evaluation
(with the remainder integral looked up in the shared table) to a frozen
Laurent expansion in u = e^{-x}; the expansion coefficients are exact
rationals rounded once to doubles.
"""
import numpy as np

from ..numerics import erfc_np

_SQRT2 = np.sqrt(2.0)
_INV_SQRT2PI = 1.0 / np.sqrt(2.0 * np.pi)

LOGISTIC_SWITCH_X = 6.0

# remainder-integral table layout (shared with re_function)
RE_X0 = -40.0
RE_DX = 0.01
RE_N = 8001

# Laurent coefficients in u = e^{-x} for x > 6; row k is the coefficient of
# u^(lo+k) as a degree-1 polynomial c0 + c1*x.  psi1/psi2 start at u^{-1},
# psi3 at u^0.  The u^{-1} rows of psi1 and psi2 cancel exactly in psi12.
_PSI1_ROWS = np.array([
    [6.0, 0.0],
    [-4.333333333333333, 0.0],
    [4.222222222222222, 0.0],
    [-4.191358024691358, 0.0],
    [4.183292181069959, 0.0],
    [-4.183533868965967, 0.0],
    [4.187116822037457, 0.0],
    [-4.192034884207201, 0.0],
    [4.197397144444663, 0.0],
    [-4.202787891133863, 0.0],
    [4.208011342366058, 0.0],
])
_PSI2_ROWS = np.array([
    [-6.0, 0.0],
    [-0.6666666666666666, -2.0],
    [0.1111111111111111, 2.0],
    [-0.030864197530864196, -2.037037037037037],
    [0.008065843621399177, 2.0691358024691358],
    [0.00024168789600888366, -2.0951714677640605],
    [-0.0035829530714892267, 2.1164230191390687],
    [0.0049180621697441865, -2.1340419838107474],
    [-0.005362260237462189, 2.1488780435204107],
    [0.005390746689200515, -2.161544636832418],
    [-0.005223451232194144, 2.172489419046392],
])
_PSI3_ROWS = np.array([
    [2.0, 0.0],
    [-2.0, 0.0],
    [2.037037037037037, 0.0],
    [-2.0691358024691358, 0.0],
    [2.0951714677640605, 0.0],
    [-2.1164230191390687, 0.0],
    [2.1340419838107474, 0.0],
    [-2.1488780435204107, 0.0],
    [2.161544636832418, 0.0],
    [-2.172489419046392, 0.0],
])
_P12_ROWS = _PSI1_ROWS + _PSI2_ROWS  # leading row is exactly [0, 0]


def re_cubic(x, table):
    """Cubic 4-point interpolation into the remainder table.

    Clamps to table[0] below -40 and to 0 above +40; output floored at 0.
    """
    x = np.asarray(x, dtype=np.float64)
    out = np.empty(x.shape, dtype=np.float64)
    left = x < RE_X0
    right = x > -RE_X0
    mid = ~(left | right)
    out[left] = table[0]
    out[right] = 0.0
    if mid.any():
        pos = (x[mid] - RE_X0) / RE_DX
        j = np.floor(pos).astype(np.int64)
        np.clip(j, 1, RE_N - 3, out=j)
        s = pos - j
        y0 = table[j - 1]
        y1 = table[j]
        y2 = table[j + 1]
        y3 = table[j + 2]
        w0 = -s * (s - 1.0) * (s - 2.0) / 6.0
        w1 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0
        w2 = -(s + 1.0) * s * (s - 2.0) / 2.0
        w3 = (s + 1.0) * s * (s - 1.0) / 6.0
        out[mid] = w0 * y0 + w1 * y1 + w2 * y2 + w3 * y3
    return np.maximum(out, 0.0)


def psi_normal(x):
    """(psi12, psi2, psi3) for the standard normal null."""
    x = np.asarray(x, dtype=np.float64)
    Ft = 0.5 * erfc_np(x / _SQRT2)
    f = np.exp(-0.5 * x * x) * _INV_SQRT2PI
    x2 = x * x
    x3 = x2 * x
    f2 = f * f
    Ft2 = Ft * Ft
    c2 = (2.0 * Ft * Ft2 + (x3 + 3.0 * x) * f * Ft2
          - (2.0 * x2 + 3.0) * f2 * Ft + x * f * f2)
    c1inv = 2.0 * Ft2 + (x3 + 3.0 * x) * f * Ft - (x2 + 1.0) * f2
    p1 = 2.0 * f * (Ft2 + x * f * Ft - f2) / c2
    denom = c1inv * c2
    num2 = (4.0 * x * Ft2 * Ft2
            + (2.0 * x2 * x2 + 8.0 * x2 - 2.0) * f * Ft * Ft2
            + (x3 * x2 - 7.0 * x) * f2 * Ft2
            - (2.0 * x2 * x2 + 3.0 * x2 - 1.0) * f * f2 * Ft
            + (x3 + x) * f2 * f2)
    num3 = (2.0 * (x2 - 1.0) * Ft2 * Ft2
            + (x3 * x2 + 2.0 * x3 - 9.0 * x) * f * Ft * Ft2
            - (4.0 * x2 * x2 + 9.0 * x2 - 5.0) * f2 * Ft2
            + (5.0 * x3 + 9.0 * x) * f * f2 * Ft
            - 2.0 * (x2 + 1.0) * f2 * f2)
    p2 = f * num2 / denom
    p3 = f * num3 / denom
    return p1 + p2, p2, p3


def _t2(e):
    # log1p(e) - e/(1+e)^2, series-protected for small e
    small = e < 1e-4
    direct = np.log1p(e) - e / (1.0 + e) ** 2
    ser = e * e * (1.5 + e * (-8.0 / 3.0 + e * (15.0 / 4.0 - e * 24.0 / 5.0)))
    return np.where(small, ser, direct)


def _psi_logistic_direct(x, re_val):
    pos = x >= 0.0
    a = np.exp(-np.abs(x))
    one_a = 1.0 + a
    Ft = np.where(pos, a, 1.0) / one_a
    f = a / one_a ** 2
    g22 = np.where(pos, a * (3.0 + a * a), 3.0 * a * a + 1.0) / (3.0 * one_a ** 3)
    t2a = _t2(a)
    v1 = np.where(pos,
                  x * g22 + t2a / 3.0,
                  (t2a - x * a * (3.0 + a * a) / one_a ** 3) / 3.0)
    phi = np.where(pos, 1.0 - a, a - 1.0) / one_a
    k2 = np.where(pos, -t2a / 3.0, (x - t2a) / 3.0)
    v2 = -Ft - 2.0 * x * f + re_val
    dd = g22 * v2 - v1 * v1
    k1 = v2 - x * v1
    S = Ft - f * f * (k1 + x * k2) / dd
    r1 = phi
    r2 = x * phi - 1.0
    wr = f * (k1 * r1 + k2 * r2) / dd
    p1 = (f / S) * (1.0 - wr)
    p2 = f * (v2 * r1 - v1 * r2) / dd - (f * k1 / dd) * p1
    p3 = f * (-v1 * r1 + g22 * r2) / dd - (f * k2 / dd) * p1
    return p1 + p2, p2, p3


def _series_eval(rows, lo, u, x):
    acc = np.zeros_like(u)
    for c0, c1 in rows[::-1]:
        acc = acc * u + (c0 + c1 * x)
    if lo == -1:
        acc = acc / u
    return acc


def _psi_logistic_series(x):
    u = np.exp(-x)
    p12 = _series_eval(_P12_ROWS, -1, u, x)
    p2 = _series_eval(_PSI2_ROWS, -1, u, x)
    p3 = _series_eval(_PSI3_ROWS, 0, u, x)
    return p12, p2, p3


def psi_logistic(x, re_table):
    """(psi12, psi2, psi3) for the standard logistic null.

    Direct evaluation up to x = 6 using the remainder table; the frozen
    expansion beyond, where the direct Schur form loses too many digits.
    """
    x = np.asarray(x, dtype=np.float64)
    p12 = np.empty(x.shape, dtype=np.float64)
    p2 = np.empty(x.shape, dtype=np.float64)
    p3 = np.empty(x.shape, dtype=np.float64)
    ser = x > LOGISTIC_SWITCH_X
    if ser.any():
        a, b, c = _psi_logistic_series(x[ser])
        p12[ser], p2[ser], p3[ser] = a, b, c
    low = ~ser
    if low.any():
        xl = x[low]
        a, b, c = _psi_logistic_direct(xl, re_cubic(xl, re_table))
        p12[low], p2[low], p3[low] = a, b, c
    return p12, p2, p3
