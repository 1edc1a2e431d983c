"""Maximum likelihood estimation of (mu, sigma) under a null family.

Normal has the closed form; logistic runs a damped Newton iteration on the
two score equations.  Residuals are the standardized observations
(x - mu_hat)/sigma_hat used by both test statistics.
"""
import math
from dataclasses import dataclass

import numpy as np

from .distributions import Family
from .errors import (DegenerateSampleError, NonConvergenceError,
                     UnsupportedFamilyError)

_SQRT3_OVER_PI = math.sqrt(3.0) / math.pi


@dataclass(frozen=True)
class LocationScaleEstimate:
    mu_hat: float
    sigma_hat: float
    iterations: int
    converged: bool
    gradient_norm: float


@dataclass(frozen=True)
class Residuals:
    z: np.ndarray


def _check_spread(x):
    spread = float(np.max(x) - np.min(x))
    if spread <= 0.0:
        raise DegenerateSampleError("all observations equal; scale is zero")
    return spread


def _logistic_loglik(x, mu, sigma):
    z = (x - mu) / sigma
    az = np.abs(z)
    # log f(z) = -|z| - 2 log(1 + e^{-|z|})
    return float(np.sum(-az - 2.0 * np.log1p(np.exp(-az))) - x.size * math.log(sigma))


def _logistic_score(z):
    # dimensionless score pair (sum phi0(z_i), sum (z_i phi0(z_i) - 1))
    phi = np.tanh(0.5 * z)
    return np.array([np.sum(phi), np.sum(z * phi - 1.0)])


def mle(family, sample):
    """MLE of (mu, sigma) for the given null family.

    Normal: mu = mean, sigma^2 = (1/n) sum (x - mean)^2.
    Logistic: Newton on the score equations from moment starting values
    (mu0 = mean, sigma0 = sd * sqrt(3)/pi), with step halving to keep
    sigma positive and the log-likelihood nondecreasing.  Converged when
    the dimensionless score norm drops below 1e-10 * n.
    """
    x = sample.values
    n = sample.n
    spread = _check_spread(x)

    if family is Family.NORMAL:
        mu = float(np.mean(x))
        sigma = float(np.sqrt(np.mean((x - mu) ** 2)))
        if sigma < 1e-12 * (spread + 1.0):
            raise DegenerateSampleError("sample spread is numerically zero")
        return LocationScaleEstimate(mu, sigma, 0, True, 0.0)

    if family is not Family.LOGISTIC:
        raise UnsupportedFamilyError("mle supports the null families only, got %r" % (family,))

    mu = float(np.mean(x))
    sigma = float(np.std(x)) * _SQRT3_OVER_PI
    if sigma < 1e-12 * (spread + 1.0):
        raise DegenerateSampleError("sample spread is numerically zero")

    tol = 1e-10 * n
    loglik = _logistic_loglik(x, mu, sigma)
    score = _logistic_score((x - mu) / sigma)
    it = 0
    for it in range(1, 101):
        gnorm = float(np.hypot(score[0], score[1]))
        if gnorm < tol:
            return LocationScaleEstimate(mu, sigma, it - 1, True, gnorm)
        z = (x - mu) / sigma
        phi = np.tanh(0.5 * z)
        az = np.abs(z)
        ez = np.exp(-az)
        fz = ez / (1.0 + ez) ** 2          # standard logistic density at z
        dphi = 2.0 * fz                    # phi0'(z)
        m11 = float(np.sum(dphi))
        m12 = float(np.sum(phi + z * dphi))
        m22 = float(np.sum(2.0 * z * phi + z * z * dphi - 1.0))
        det = m11 * m22 - m12 * m12
        if det <= 0.0 or not math.isfinite(det):
            # fall back to a gradient step when curvature is unusable
            step = sigma * score / max(1.0, gnorm)
        else:
            rhs = sigma * score
            step = np.array([(m22 * rhs[0] - m12 * rhs[1]) / det,
                             (-m12 * rhs[0] + m11 * rhs[1]) / det])
        # halve until sigma stays positive and the log-likelihood improves
        scale_step = 1.0
        while sigma + scale_step * step[1] <= 0.0:
            scale_step *= 0.5
            if scale_step < 1e-12:
                break
        accepted = False
        for _ in range(40):
            mu_try = mu + scale_step * step[0]
            sigma_try = sigma + scale_step * step[1]
            if sigma_try > 0.0:
                ll_try = _logistic_loglik(x, mu_try, sigma_try)
                if ll_try >= loglik - 1e-12 * abs(loglik):
                    mu, sigma, loglik = mu_try, sigma_try, ll_try
                    accepted = True
                    break
            scale_step *= 0.5
        if not accepted:
            break
        score = _logistic_score((x - mu) / sigma)

    gnorm = float(np.hypot(score[0], score[1]))
    if gnorm < tol:
        return LocationScaleEstimate(mu, sigma, it, True, gnorm)
    raise NonConvergenceError(
        "logistic MLE did not converge in %d iterations (score norm %.3e)" % (it, gnorm),
        last_iterate=LocationScaleEstimate(mu, sigma, it, False, gnorm),
    )


def standardize(sample, est):
    """Residuals (x_i - mu_hat)/sigma_hat, order preserved."""
    if not (est.sigma_hat > 0.0):
        raise DegenerateSampleError("sigma_hat must be positive")
    return Residuals((sample.values - est.mu_hat) / est.sigma_hat)
