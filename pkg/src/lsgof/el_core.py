"""Empirical-likelihood test with cosine moment constraints.

The constraints are phi_h(u) = sqrt(2) cos(h pi u) evaluated at the null
probability transforms of the standardized residuals.  The dual problem is
solved by damped Newton on a log* objective (the log barrier continued
quadratically below 1/n so the objective stays twice differentiable on all
of R^m).  An infeasible constraint set sends the statistic to +inf, which
the decision rule treats as a rejection.
"""
import math
from dataclasses import dataclass

import numpy as np

from .distributions import Family, cdf, standard_null
from .errors import DomainError, InfeasibleConstraintsError
from .estimation import LocationScaleEstimate, mle, standardize
from .numerics import find_root, regularized_gamma_lower

EL_MIN_N = 27
_NEWTON_MAX_ITER = 100


@dataclass(frozen=True)
class ConstraintMatrix:
    g: np.ndarray  # n x m
    n: int
    m: int


@dataclass(frozen=True)
class DualSolution:
    lam: np.ndarray
    statistic: float
    weights: np.ndarray
    iterations: int
    kkt_residual: float


@dataclass(frozen=True)
class ElOutcome:
    statistic: float
    df: int
    critical_value: float
    reject: bool
    variant: str = None
    m: int = None


@dataclass(frozen=True)
class ElStatistic:
    statistic: float
    m: int
    df: int
    estimate: LocationScaleEstimate
    infeasible: bool


def phi(h, u):
    """Orthonormal cosine h on [0, 1]: sqrt(2) cos(h pi u)."""
    h = int(h)
    if h < 1:
        raise DomainError("basis index h must be >= 1")
    arr = np.asarray(u, dtype=np.float64)
    if np.any((arr < 0.0) | (arr > 1.0)):
        raise DomainError("phi is defined on [0, 1]")
    out = math.sqrt(2.0) * np.cos(h * math.pi * arr)
    return float(out) if arr.ndim == 0 else out


def constraint_matrix(family, sample, estimate, m):
    """n x m matrix g[i, h-1] = phi_h(F0((x_i - mu) / sigma))."""
    m = int(m)
    if m < 1:
        raise DomainError("need at least one constraint")
    if m >= sample.n:
        raise DomainError("number of constraints must be below n")
    resid = standardize(sample, estimate)
    u = np.atleast_1d(cdf(standard_null(family), resid.z))
    hs = np.arange(1, m + 1)
    g = math.sqrt(2.0) * np.cos(math.pi * u[:, None] * hs[None, :])
    return ConstraintMatrix(g=g, n=sample.n, m=m)


def _log_star(v, eps):
    # log on [eps, inf); the C^2 quadratic continuation below eps keeps
    # Newton well-defined when a trial point drives some 1 + lam'g negative
    v = np.asarray(v, dtype=np.float64)
    lo = v < eps
    safe = np.where(lo, eps, v)
    f = np.log(safe)
    d1 = 1.0 / safe
    d2 = -1.0 / safe ** 2
    if lo.any():
        vl = v[lo]
        f[lo] = math.log(eps) - 1.5 + 2.0 * vl / eps - vl ** 2 / (2.0 * eps ** 2)
        d1[lo] = 2.0 / eps - vl / eps ** 2
        d2[lo] = -1.0 / eps ** 2
    return f, d1, d2


def solve_dual(constraints):
    """Damped Newton solve of the dual empirical-likelihood problem."""
    g = constraints.g
    n, m = g.shape
    eps = 1.0 / n
    lam = np.zeros(m)

    def parts(l):
        v = 1.0 + g @ l
        f, d1, d2 = _log_star(v, eps)
        return v, -np.sum(f), -(g.T @ d1), -(g.T * d2) @ g

    v, obj, grad, hess = parts(lam)
    iters = 0
    tol = 1e-11 * n
    for iters in range(1, _NEWTON_MAX_ITER + 1):
        if np.linalg.norm(grad) <= tol:
            break
        try:
            step = np.linalg.solve(hess, -grad)
            slope = float(grad @ step)
        except np.linalg.LinAlgError:
            slope = 0.0
        if slope >= 0.0:  # not a descent direction; fall back to steepest
            step = -grad
            slope = float(grad @ step)
        if -slope <= 1e-24:
            break  # objective at its rounding floor
        if -slope <= 1e-8:
            # Newton decrement tiny: inside the quadratic-convergence
            # basin, where Armijo tests on O(eps)-sized improvements are
            # meaningless; take full steps
            lam = lam + step
            v, obj, grad, hess = parts(lam)
            continue
        t = 1.0
        for _ in range(60):
            cand = lam + t * step
            v_c, obj_c, grad_c, hess_c = parts(cand)
            if obj_c <= obj + 1e-4 * t * slope:
                break
            t *= 0.5
        else:
            break
        lam, v, obj, grad, hess = cand, v_c, obj_c, grad_c, hess_c
    else:
        iters = _NEWTON_MAX_ITER

    # acceptance threshold: kkt_residual = |grad|/n must come in below 1e-8
    if np.linalg.norm(grad) > 1e-8 * n or np.any(v <= eps):
        # no interior solution: the origin is outside (or on the boundary
        # of) the convex hull of the constraint vectors
        raise InfeasibleConstraintsError("no feasible reweighting satisfies the constraints")

    stat = max(2.0 * float(np.sum(np.log(v))), 0.0)
    w = 1.0 / (n * v)
    # at a genuine stationary point the implied weights sum to one exactly;
    # a runaway iterate (origin outside the hull) drives the gradient to
    # zero vacuously while the weights collapse toward zero
    if abs(float(w.sum()) - 1.0) > 1e-6:
        raise InfeasibleConstraintsError("no feasible reweighting satisfies the constraints")
    kkt = float(np.linalg.norm(w @ g))
    return DualSolution(lam=lam, statistic=stat, weights=w, iterations=iters, kkt_residual=kkt)


def _icbrt(n):
    r = int(round(n ** (1.0 / 3.0)))
    while r ** 3 > n:
        r -= 1
    while (r + 1) ** 3 <= n:
        r += 1
    return r


def default_m(n, variant):
    """Constraint count floor(n^(1/3)) + 1 (el1) or + 2 (el2)."""
    if variant == "el1":
        return _icbrt(n) + 1
    if variant == "el2":
        return _icbrt(n) + 2
    raise DomainError("variant must be 'el1' or 'el2'")


def el_statistic(family, sample, variant="el1", m=None, df=None):
    """Profile empirical-likelihood statistic for a location-scale null.

    m defaults by variant; df defaults to m - 2, discounting the two
    estimated parameters.  Requires n >= 27 so the default m is at least 4.
    """
    if sample.n < EL_MIN_N:
        raise DomainError("empirical-likelihood variants need n >= %d" % EL_MIN_N)
    if m is None:
        m = default_m(sample.n, variant)
    m = int(m)
    if df is None:
        df = m - 2
    df = int(df)
    if df < 1:
        raise DomainError("degrees of freedom must be >= 1")
    est = mle(family, sample)
    cm = constraint_matrix(family, sample, est, m)
    try:
        sol = solve_dual(cm)
        stat = sol.statistic
        infeasible = False
    except InfeasibleConstraintsError:
        stat = math.inf
        infeasible = True
    return ElStatistic(statistic=stat, m=m, df=df, estimate=est, infeasible=infeasible)


def chi2_quantile(df, p):
    """Quantile of chi-square with df degrees of freedom."""
    df = int(df)
    if df < 1:
        raise DomainError("df must be >= 1")
    if not 0.0 < p < 1.0:
        raise DomainError("p must lie in (0, 1)")
    target = float(p)

    def f(x):
        return regularized_gamma_lower(0.5 * df, 0.5 * x) - target

    hi = df + 10.0 * math.sqrt(2.0 * df) + 10.0
    while f(hi) < 0.0:
        hi *= 2.0
    return find_root(f, 1e-300, hi, tol=1e-12)


def el_test(statistic, df, alpha, variant=None, m=None):
    """Reject when the statistic exceeds the chi-square df quantile."""
    cv = chi2_quantile(df, 1.0 - alpha)
    return ElOutcome(
        statistic=float(statistic),
        df=int(df),
        critical_value=cv,
        reject=bool(statistic > cv),
        variant=variant,
        m=m,
    )
