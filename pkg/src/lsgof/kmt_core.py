"""Martingale-transform test for location-scale nulls.

Builds the 3x3 matrix Gamma_t of the transform, its Schur-complement
inverse, the per-family closed-form integrand, the transformed empirical
process U_n on a t-grid, and the sup statistic with its tabulated decision
rule.

Numerical layout notes:
  * Everything is evaluated in x-space; t enters only through t = F(x).
  * The transformed process needs cumulative integrals of the vector
    psi(x) = Gamma_{F(x)}^{-1} l(x) f(x).  These are computed once on the
    union of the residuals and the t-grid image (a shared refinement) and
    combined per grid point with prefix/suffix sums, so each observation's
    integral is never recomputed.
  * The inverse uses double-double Schur complements: the raw entries are
    ordinary doubles, but the elimination arithmetic carries compensated
    error terms, which keeps Gamma * Gamma^{-1} near the identity over the
    usable t range.
"""
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as kernels
from .distributions import Family, cdf, quantile, standard_null
from .errors import DomainError, SingularMatrixError, UnsupportedFamilyError
from .estimation import LocationScaleEstimate, mle, standardize
from .numerics import erfc

T_MAX_DEFAULT = 1.0 - 1e-6
GRID_SIZE_DEFAULT = 1000
LOWCUT_T = 1e-10

# sup |Brownian motion| quantiles used by the decision rule
KMT_CRITICAL_VALUES = {0.05: 2.24, 0.01: 2.81}

_QUAD_ATOL = 1e-9    # per-panel Simpson acceptance
_QUAD_RTOL = 1e-12   # relative guard for the exponentially large tail parts


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GammaMatrix:
    t: float
    entries: np.ndarray  # symmetric 3x3; entries[0,0] == 1 - t exactly


@dataclass(frozen=True)
class GammaInverseBlocks:
    B11: float
    B12: np.ndarray  # 1x2
    B21: np.ndarray  # 2x1, equals B12.T
    B22: np.ndarray  # 2x2

    def as_matrix(self):
        out = np.empty((3, 3))
        out[0, 0] = self.B11
        out[0, 1:] = self.B12[0]
        out[1:, 0] = self.B21[:, 0]
        out[1:, 1:] = self.B22
        return out


@dataclass(frozen=True)
class TransformedProcess:
    grid: np.ndarray     # strictly increasing t-values in [0, t_max]
    values: np.ndarray   # U_n at each grid point
    statistic: float     # max |values|


@dataclass(frozen=True)
class KmtStatistic:
    statistic: float
    estimate: LocationScaleEstimate
    process: TransformedProcess


@dataclass(frozen=True)
class KmtOutcome:
    statistic: float
    alpha: float
    critical_value: float
    reject: bool
    estimate: LocationScaleEstimate = None


# ---------------------------------------------------------------------------
# remainder integral Re(x) = int_x^inf s^2 e^s (1-e^s)^2 / (1+e^s)^4 ds
# ---------------------------------------------------------------------------

_RE_TABLE = None


def _re_integrand(s):
    # even in s; e^{-|s|} form avoids overflow on both sides
    a = np.exp(-np.abs(s))
    return s * s * a * (1.0 - a) ** 2 / (1.0 + a) ** 4


def _build_re_table():
    # table nodes every 0.01 on [-40, 40]; each step integrated by
    # composite Simpson on 8 subpanels, accumulated from the right end
    # (the tail above 40 is below 1e-14 and is dropped)
    sub = 8
    fine = np.linspace(kernels.RE_X0, -kernels.RE_X0, (kernels.RE_N - 1) * sub + 1)
    y = _re_integrand(fine)
    idx = np.arange(kernels.RE_N - 1)[:, None] * sub + np.arange(sub + 1)[None, :]
    w = np.array([1, 4, 2, 4, 2, 4, 2, 4, 1], dtype=np.float64) * (kernels.RE_DX / sub / 3.0)
    steps = y[idx] @ w
    table = np.empty(kernels.RE_N)
    table[:-1] = np.cumsum(steps[::-1])[::-1]
    table[-1] = 0.0
    return table


def _get_re_table():
    global _RE_TABLE
    if _RE_TABLE is None:
        _RE_TABLE = _build_re_table()
    return _RE_TABLE


def re_function(x):
    """Tabulated remainder integral with cubic interpolation.

    Clamps to the x = -40 value on the left (the integral converges there)
    and to 0 above x = 40.  Nonnegative and nonincreasing.
    """
    arr = np.asarray(x, dtype=np.float64)
    scalar = arr.ndim == 0
    out = kernels.re_cubic(np.atleast_1d(arr), _get_re_table())
    return float(out[0]) if scalar else out.reshape(arr.shape)


# ---------------------------------------------------------------------------
# Gamma and its inverse
# ---------------------------------------------------------------------------

def _logistic_gamma_scalars(x, re_val):
    # stable closed forms on either sign of x; a = e^{-|x|} <= 1 throughout
    a = math.exp(-abs(x))
    one_a = 1.0 + a
    f = a / one_a ** 2
    if x >= 0.0:
        Ft = a / one_a
        g22 = a * (3.0 + a * a) / (3.0 * one_a ** 3)
        v1 = x * g22 + _t2_scalar(a) / 3.0
    else:
        Ft = 1.0 / one_a
        g22 = (3.0 * a * a + 1.0) / (3.0 * one_a ** 3)
        v1 = (_t2_scalar(a) - x * a * (3.0 + a * a) / one_a ** 3) / 3.0
    v2 = -Ft - 2.0 * x * f + re_val
    return Ft, f, g22, v1, v2


def _t2_scalar(e):
    if e < 1e-4:
        return e * e * (1.5 + e * (-8.0 / 3.0 + e * (15.0 / 4.0 - e * 24.0 / 5.0)))
    return math.log1p(e) - e / (1.0 + e) ** 2


def gamma_matrix(family, x):
    """Gamma_t at t = F(x) for a null family, from the closed forms."""
    x = float(x)
    if family is Family.NORMAL:
        Ft = 0.5 * erfc(x / math.sqrt(2.0))
        f = math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)
        g = np.array([
            [Ft, f, x * f],
            [f, x * f + Ft, (1.0 + x * x) * f],
            [x * f, (1.0 + x * x) * f, (x ** 3 + x) * f + 2.0 * Ft],
        ])
    elif family is Family.LOGISTIC:
        Ft, f, g22, v1, v2 = _logistic_gamma_scalars(x, re_function(x))
        g = np.array([
            [Ft, f, x * f],
            [f, g22, v1],
            [x * f, v1, v2],
        ])
    else:
        raise UnsupportedFamilyError("gamma_matrix supports the null families only")
    t = 1.0 - g[0, 0]
    g[0, 0] = 1.0 - t  # pin the (1,1) = 1 - t identity bit-exactly
    return GammaMatrix(t, g)


# double-double helpers: a value is (hi, lo) with hi + lo the intended number
def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _two_prod(a, b):
    p = a * b
    t = 134217729.0 * a  # Dekker split at 2^27 + 1
    ah = t - (t - a)
    al = a - ah
    t = 134217729.0 * b
    bh = t - (t - b)
    bl = b - bh
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _dd_add(x, y):
    s, e = _two_sum(x[0], y[0])
    e += x[1] + y[1]
    s, e = _two_sum(s, e)
    return s, e


def _dd_sub(x, y):
    return _dd_add(x, (-y[0], -y[1]))


def _dd_mul(x, y):
    p, e = _two_prod(x[0], y[0])
    e += x[0] * y[1] + x[1] * y[0]
    p, e = _two_sum(p, e)
    return p, e


def _dd_div(x, y):
    q1 = x[0] / y[0]
    r = _dd_sub(x, _dd_mul((q1, 0.0), y))
    q2 = r[0] / y[0]
    r = _dd_sub(r, _dd_mul((q2, 0.0), y))
    q3 = r[0] / y[0]
    q, e = _two_sum(q1, q2)
    e += q3
    q, e = _two_sum(q, e)
    return q, e


def gamma_inverse(family, x):
    """Blockwise inverse of gamma_matrix(family, x) by Schur complements.

    The elimination runs in compensated (double-double) arithmetic on the
    as-given double entries, then rounds each block back to doubles.
    """
    gm = gamma_matrix(family, x)
    if gm.t > T_MAX_DEFAULT:
        raise DomainError("gamma_inverse needs F(x) <= 1 - 1e-6; got t = %r" % (gm.t,))
    G = gm.entries
    g11, g12, g13 = (G[0, 0], 0.0), (G[0, 1], 0.0), (G[0, 2], 0.0)
    g22, g23, g33 = (G[1, 1], 0.0), (G[1, 2], 0.0), (G[2, 2], 0.0)
    det2 = _dd_sub(_dd_mul(g22, g33), _dd_mul(g23, g23))
    if abs(det2[0]) < 1e-300:
        raise SingularMatrixError("trailing 2x2 block of Gamma is numerically singular")
    w1 = _dd_div(_dd_sub(_dd_mul(g33, g12), _dd_mul(g23, g13)), det2)
    w2 = _dd_div(_dd_sub(_dd_mul(g22, g13), _dd_mul(g23, g12)), det2)
    schur = _dd_sub(g11, _dd_add(_dd_mul(g12, w1), _dd_mul(g13, w2)))
    if abs(schur[0]) < 1e-300:
        raise SingularMatrixError("Schur complement of Gamma is numerically singular")
    b11 = _dd_div((1.0, 0.0), schur)
    b12 = _dd_mul((-1.0, 0.0), _dd_mul(b11, w1))
    b13 = _dd_mul((-1.0, 0.0), _dd_mul(b11, w2))
    a22i = _dd_div(g33, det2)
    a23i = _dd_mul((-1.0, 0.0), _dd_div(g23, det2))
    a33i = _dd_div(g22, det2)
    b22 = _dd_add(a22i, _dd_mul(b11, _dd_mul(w1, w1)))
    b23 = _dd_add(a23i, _dd_mul(b11, _dd_mul(w1, w2)))
    b33 = _dd_add(a33i, _dd_mul(b11, _dd_mul(w2, w2)))
    row = np.array([[b12[0], b13[0]]])
    return GammaInverseBlocks(
        B11=b11[0],
        B12=row,
        B21=row.T.copy(),
        B22=np.array([[b22[0], b23[0]], [b23[0], b33[0]]]),
    )


# ---------------------------------------------------------------------------
# integrand and the transformed process
# ---------------------------------------------------------------------------

def _psi(family, x):
    if family is Family.NORMAL:
        return kernels.psi_normal(x)
    if family is Family.LOGISTIC:
        return kernels.psi_logistic(x, _get_re_table())
    raise UnsupportedFamilyError("psi kernels exist for the null families only")


def _pair_coeffs(family, z):
    # components 2 and 3 of the pairing vector (1, phi0(z)-1, z phi0(z)-1);
    # the logistic second component must stay relatively accurate for large
    # positive z, where it pairs with an e^z-sized integral
    z = np.asarray(z, dtype=np.float64)
    if family is Family.NORMAL:
        c2 = z - 1.0
    else:
        a = np.exp(-np.clip(z, 0.0, None))
        c2 = np.where(z >= 0.0, -2.0 * a / (1.0 + a), np.tanh(0.5 * z) - 1.0)
    c3 = z * c2 + (z - 1.0)
    return c2, c3


def integrand(family, z_hat, x):
    """The scalar l(z_hat)' Gamma_{F(x)}^{-1} l(x) f(x)."""
    xv = np.atleast_1d(np.asarray(x, dtype=np.float64))
    t = cdf(standard_null(family), float(xv[0]))
    if t > T_MAX_DEFAULT:
        raise DomainError("integrand needs F(x) <= 1 - 1e-6")
    p12, p2, p3 = _psi(family, xv)
    c2, c3 = _pair_coeffs(family, np.asarray(z_hat, dtype=np.float64))
    return float(p12[0] + c2 * p2[0] + c3 * p3[0])


def _cumulative_psi(family, points, lowcut):
    """Integrals of the psi vector over [lowcut, points[k]], shape (3, len).

    Vectorized adaptive Simpson: all active panels at one depth are refined
    in a single kernel call; accepted panels accumulate into their segment.
    """
    if family is Family.LOGISTIC:
        table = _get_re_table()
        fn = lambda xs: np.stack(kernels.psi_logistic(xs, table))
    else:
        fn = lambda xs: np.stack(kernels.psi_normal(xs))

    edges = np.concatenate(([lowcut], points))
    fe = fn(edges)
    A = edges[:-1]
    B = edges[1:]
    FA = fe[:, :-1]
    FB = fe[:, 1:]
    M = 0.5 * (A + B)
    FM = fn(M)
    S = (B - A) / 6.0 * (FA + 4.0 * FM + FB)
    seg = np.arange(points.size)
    totals = np.zeros((3, points.size))

    for depth in range(50):
        if A.size == 0:
            break
        lm = 0.5 * (A + M)
        rm = 0.5 * (M + B)
        fnew = fn(np.concatenate([lm, rm]))
        FLM = fnew[:, :A.size]
        FRM = fnew[:, A.size:]
        h = B - A
        SL = h / 12.0 * (FA + 4.0 * FLM + FM)
        SR = h / 12.0 * (FM + 4.0 * FRM + FB)
        S2 = SL + SR
        delta = S2 - S
        ok = np.all(np.abs(delta) <= 15.0 * (_QUAD_ATOL + _QUAD_RTOL * np.abs(S2)), axis=0)
        # panels too narrow to split further are taken as-is
        ok |= h <= 4e-16 * np.maximum(np.abs(A), np.abs(B))
        if depth == 49:
            ok = np.ones_like(ok)
        if ok.any():
            np.add.at(totals.T, seg[ok], (S2 + delta / 15.0)[:, ok].T)
        rej = ~ok
        if not rej.any():
            break
        A = np.concatenate([A[rej], M[rej]])
        B = np.concatenate([M[rej], B[rej]])
        FA = np.concatenate([FA[:, rej], FM[:, rej]], axis=1)
        FB = np.concatenate([FM[:, rej], FB[:, rej]], axis=1)
        M = np.concatenate([lm[rej], rm[rej]])
        FM = np.concatenate([FLM[:, rej], FRM[:, rej]], axis=1)
        S = np.concatenate([SL[:, rej], SR[:, rej]], axis=1)
        seg = np.concatenate([seg[rej], seg[rej]])

    return np.cumsum(totals, axis=1)


def transformed_process(family, residuals, t_max=T_MAX_DEFAULT, grid_size=GRID_SIZE_DEFAULT):
    """The transformed empirical process on [0, t_max].

    Evaluated on the union of a uniform t-grid and the residual images
    F(z_i), with both one-sided limits at each jump.  U_n(0) = 0 exactly.
    """
    z = np.asarray(residuals.z, dtype=np.float64)
    n = z.size
    if n < 1:
        raise DomainError("need at least one residual")
    if not (0.0 < t_max <= 1.0 - 1e-6):
        raise DomainError("t_max must lie in (0, 1 - 1e-6]")
    grid_size = int(grid_size)
    if grid_size < 2:
        raise DomainError("grid_size must be at least 2")
    if family not in (Family.NORMAL, Family.LOGISTIC):
        raise UnsupportedFamilyError("transformed_process supports the null families only")

    dist = standard_null(family)
    res = np.sort(z)
    lowcut = float(quantile(dist, LOWCUT_T))
    z_cap = float(quantile(dist, t_max))

    t_uni = np.linspace(0.0, t_max, grid_size)
    z_uni = np.empty_like(t_uni)
    z_uni[0] = -np.inf
    z_uni[1:] = quantile(dist, t_uni[1:])

    t_res = np.atleast_1d(cdf(dist, res))
    jump = (t_res > 0.0) & (res <= z_cap)
    tj = t_res[jump]
    zj = res[jump]
    t_left = np.nextafter(tj, 0.0)

    ts = np.concatenate([t_uni, t_left, tj])
    zs = np.concatenate([z_uni, zj, zj])
    is_left = np.concatenate([
        np.zeros(t_uni.size, dtype=bool),
        np.ones(tj.size, dtype=bool),
        np.zeros(tj.size, dtype=bool),
    ])
    # ties on t resolve in favor of jump entries
    prio = np.concatenate([
        np.ones(t_uni.size),
        np.zeros(2 * tj.size),
    ])

    in_range = (res > lowcut) & (res <= z_cap)
    parts = [res[in_range], z_uni[1:][z_uni[1:] > lowcut]]
    if family is Family.LOGISTIC and lowcut < kernels.LOGISTIC_SWITCH_X <= z_cap:
        parts.append(np.array([kernels.LOGISTIC_SWITCH_X]))
    bp = np.unique(np.concatenate(parts))
    psi_cum = _cumulative_psi(family, bp, lowcut)

    c2, c3 = _pair_coeffs(family, res)
    a = np.zeros(n)
    if in_range.any():
        pidx = np.searchsorted(bp, res[in_range])
        a[in_range] = (psi_cum[0, pidx]
                       + c2[in_range] * psi_cum[1, pidx]
                       + c3[in_range] * psi_cum[2, pidx])
    prefix = np.concatenate(([0.0], np.cumsum(a)))
    suf2 = np.concatenate((np.cumsum(c2[::-1])[::-1], [0.0]))
    suf3 = np.concatenate((np.cumsum(c3[::-1])[::-1], [0.0]))

    kl = np.searchsorted(res, zs, side="left")
    kr = np.searchsorted(res, zs, side="right")
    k = np.where(is_left, kl, kr)

    psi_at = np.zeros((3, zs.size))
    have = zs > lowcut
    if have.any():
        gidx = np.searchsorted(bp, zs[have])
        psi_at[:, have] = psi_cum[:, gidx]

    scale = 1.0 / math.sqrt(n)
    vals = (k - prefix[k]
            - ((n - k) * psi_at[0] + suf2[k] * psi_at[1] + suf3[k] * psi_at[2])) * scale

    order = np.lexsort((prio, ts))
    ts_o = ts[order]
    vals_o = vals[order]
    keep = np.concatenate(([True], ts_o[1:] > ts_o[:-1]))
    grid = ts_o[keep]
    values = vals_o[keep]
    return TransformedProcess(grid, values, float(np.max(np.abs(values))))


def kmt_statistic(family, sample):
    """Estimate, standardize, transform: the sup statistic with defaults."""
    if sample.n < 3:
        raise DomainError("need n >= 3")
    est = mle(family, sample)
    resid = standardize(sample, est)
    proc = transformed_process(family, resid)
    return KmtStatistic(proc.statistic, est, proc)


def kmt_test(statistic, alpha, critical_value=None, estimate=None):
    """Decision against the tabulated sup-Brownian critical values.

    alpha must be 0.05 or 0.01 unless an explicit critical_value is given.
    """
    if critical_value is None:
        if alpha not in KMT_CRITICAL_VALUES:
            raise DomainError(
                "no tabulated critical value for alpha=%r; supply critical_value" % (alpha,))
        critical_value = KMT_CRITICAL_VALUES[alpha]
    return KmtOutcome(
        statistic=float(statistic),
        alpha=float(alpha),
        critical_value=float(critical_value),
        reject=bool(statistic > critical_value),
        estimate=estimate,
    )
