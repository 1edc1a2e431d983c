"""Maximum likelihood fitting of the two null families."""
import math

import numpy as np
import pytest

from lsgof import distributions as ds
from lsgof import estimation as es
from lsgof.errors import DegenerateSampleError, UnsupportedFamilyError


def _logistic_loglik(x, mu, sigma):
    # independent of the package: density sigma^-1 e^-z (1+e^-z)^-2
    z = (x - mu) / sigma
    return float(np.sum(-np.abs(z) - 2.0 * np.log1p(np.exp(-np.abs(z))) - math.log(sigma)))


def test_normal_mle_closed_form():
    s = ds.sample(ds.Distribution(ds.Family.NORMAL, 2.0, 5.0), 120, 42)
    est = es.mle(ds.Family.NORMAL, s)
    mu = float(np.mean(s.values))
    sigma = float(np.sqrt(np.mean((s.values - mu) ** 2)))
    assert est.mu_hat == pytest.approx(mu, rel=1e-13)
    assert est.sigma_hat == pytest.approx(sigma, rel=1e-13)
    assert est.converged


def test_logistic_mle_is_stationary():
    s = ds.sample(ds.Distribution(ds.Family.LOGISTIC, 2.0, 5.0), 300, 7)
    est = es.mle(ds.Family.LOGISTIC, s)
    assert est.converged
    h = 1e-5
    base = _logistic_loglik(s.values, est.mu_hat, est.sigma_hat)
    dmu = (_logistic_loglik(s.values, est.mu_hat + h, est.sigma_hat)
           - _logistic_loglik(s.values, est.mu_hat - h, est.sigma_hat)) / (2 * h)
    dsig = (_logistic_loglik(s.values, est.mu_hat, est.sigma_hat + h)
            - _logistic_loglik(s.values, est.mu_hat, est.sigma_hat - h)) / (2 * h)
    assert abs(dmu) < 1e-4 and abs(dsig) < 1e-4
    # local maximum: a ring of nearby parameter points never does better
    for k in range(8):
        du = 0.02 * math.cos(2 * math.pi * k / 8)
        dv = 0.02 * math.sin(2 * math.pi * k / 8)
        assert _logistic_loglik(s.values, est.mu_hat + du, est.sigma_hat + dv) < base


def test_logistic_mle_tight_gradient():
    s = ds.sample(ds.Distribution(ds.Family.LOGISTIC, -3.0, 0.4), 80, 11)
    est = es.mle(ds.Family.LOGISTIC, s)
    assert est.gradient_norm < 1e-9
    assert est.iterations >= 1


@pytest.mark.parametrize("family", [ds.Family.NORMAL, ds.Family.LOGISTIC])
def test_mle_affine_equivariance(family):
    s = ds.sample(ds.Distribution(family, 0.0, 1.0), 90, 1234)
    base = es.mle(family, s)
    a, b = -7.0, 3.5
    shifted = es.mle(family, ds.Sample(a + b * s.values))
    assert shifted.mu_hat == pytest.approx(a + b * base.mu_hat, rel=1e-9, abs=1e-9)
    assert shifted.sigma_hat == pytest.approx(b * base.sigma_hat, rel=1e-9)


def test_standardize():
    s = ds.sample(ds.Distribution(ds.Family.NORMAL, 2.0, 5.0), 25, 8)
    est = es.LocationScaleEstimate(2.0, 5.0, 0, True, 0.0)
    res = es.standardize(s, est)
    assert np.allclose(res.z, (s.values - 2.0) / 5.0, rtol=0, atol=0)


@pytest.mark.parametrize("family", [ds.Family.NORMAL, ds.Family.LOGISTIC])
def test_degenerate_samples(family):
    with pytest.raises(DegenerateSampleError):
        es.mle(family, ds.Sample(np.full(12, 3.25)))
    with pytest.raises(DegenerateSampleError):
        es.mle(family, ds.Sample(np.array([1.0])))


def test_mle_rejects_alternative_families():
    s = ds.sample(ds.standard_null(ds.Family.NORMAL), 30, 3)
    for fam in (ds.Family.CAUCHY, ds.Family.LAPLACE, ds.Family.NORMAL_MIXTURE):
        with pytest.raises(UnsupportedFamilyError):
            es.mle(fam, s)


def test_logistic_mle_heavy_contamination():
    # one wild point must not derail the fit
    s = ds.sample(ds.standard_null(ds.Family.LOGISTIC), 60, 21)
    vals = np.concatenate([s.values, [250.0]])
    est = es.mle(ds.Family.LOGISTIC, ds.Sample(vals))
    assert est.converged
    assert 0.5 < est.sigma_hat < 10.0
    assert abs(est.mu_hat) < 5.0
