"""Distribution families for the tests and the power study.

Two null families (normal, logistic) and the alternatives used in the
Monte Carlo comparison: Student-t(5), Cauchy, Laplace, and a two-component
normal scale mixture.  Every family supplies pdf/cdf/quantile and a
deterministic seeded sampler; the null families additionally expose the
location score function phi0.

All densities are parametrized as f((x - location)/scale)/scale.
"""
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, UnsupportedFamilyError
from .numerics import Rng, erfc, erfc_np, find_root

_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)
_INV_PI = 1.0 / math.pi
# Student-t(5) normalizing constant 8 / (3 sqrt(5) pi)
_C5 = 8.0 / (3.0 * math.sqrt(5.0) * math.pi)


class Family(enum.Enum):
    NORMAL = "normal"
    LOGISTIC = "logistic"
    STUDENT_T5 = "stt"
    CAUCHY = "cauchy"
    LAPLACE = "laplace"
    NORMAL_MIXTURE = "mtn"


_ALIASES = {
    "normal": Family.NORMAL,
    "gaussian": Family.NORMAL,
    "logistic": Family.LOGISTIC,
    "stt": Family.STUDENT_T5,
    "t5": Family.STUDENT_T5,
    "student_t5": Family.STUDENT_T5,
    "cauchy": Family.CAUCHY,
    "laplace": Family.LAPLACE,
    "mtn": Family.NORMAL_MIXTURE,
    "mixture": Family.NORMAL_MIXTURE,
    "normal_mixture": Family.NORMAL_MIXTURE,
}

NULL_FAMILIES = (Family.NORMAL, Family.LOGISTIC)


def parse_family(name):
    key = str(name).strip().lower()
    if key not in _ALIASES:
        raise UnsupportedFamilyError("unknown family %r" % (name,))
    return _ALIASES[key]


@dataclass(frozen=True)
class Distribution:
    """A location-scale family member, plus mixture extras when applicable."""

    family: Family
    location: float = 0.0
    scale: float = 1.0
    weight: float = None      # NormalMixture only: P(first component)
    scale2: float = None      # NormalMixture only: second component scale

    def __post_init__(self):
        if not (self.scale > 0.0):
            raise DomainError("scale must be positive, got %r" % (self.scale,))
        if self.family is Family.NORMAL_MIXTURE:
            w = 0.9 if self.weight is None else self.weight
            s2 = 15.0 if self.scale2 is None else self.scale2
            if not (0.0 < w < 1.0):
                raise DomainError("mixture weight must lie in (0,1)")
            if not (s2 > 0.0):
                raise DomainError("second scale must be positive")
            object.__setattr__(self, "weight", float(w))
            object.__setattr__(self, "scale2", float(s2))
        elif self.weight is not None or self.scale2 is not None:
            raise DomainError("weight/scale2 are only valid for the mixture family")


@dataclass(frozen=True)
class Sample:
    values: np.ndarray
    n: int = field(init=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size < 1:
            raise DomainError("sample must be a nonempty 1-d array")
        if not np.isfinite(v).all():
            raise DomainError("sample contains non-finite values")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "n", int(v.size))


# ---------------------------------------------------------------------------
# standardized (location 0, scale 1) building blocks, vectorized
# ---------------------------------------------------------------------------

def _norm_pdf(z):
    return np.exp(-0.5 * z * z) / _SQRT2PI


def _norm_cdf(z):
    return 0.5 * erfc_np(-z / _SQRT2)


def _norm_sf(z):
    # upper tail, accurate for large positive z
    return 0.5 * erfc_np(z / _SQRT2)


# rational initial guess (Abramowitz-Stegun 26.2.23), then Newton on the cdf;
# the loop converges in 3-4 steps from the 4.5e-4 accurate seed
def _norm_quantile(p):
    p = np.asarray(p, dtype=np.float64)
    if np.any((p <= 0.0) | (p >= 1.0)):
        raise DomainError("normal quantile needs u in (0,1)")
    ps = np.minimum(p, 1.0 - p)
    t = np.sqrt(-2.0 * np.log(ps))
    num = 2.515517 + t * (0.802853 + t * 0.010328)
    den = 1.0 + t * (1.432788 + t * (0.189269 + t * 0.001308))
    x = -(t - num / den)
    x = np.where(p > 0.5, -x, x)
    for _ in range(12):
        dx = (_norm_cdf(x) - p) / _norm_pdf(x)
        x = x - dx
        if np.max(np.abs(dx)) <= 1e-15 * (1.0 + np.max(np.abs(x))):
            break
    return x


def _t5_cdf(z):
    u = z / math.sqrt(5.0)
    q = 1.0 + u * u
    return 0.5 + _INV_PI * (np.arctan(u) + u / q + 2.0 * u / (3.0 * q * q))


def _std_pdf(family, z):
    if family is Family.NORMAL:
        return _norm_pdf(z)
    if family is Family.LOGISTIC:
        a = np.exp(-np.abs(z))
        return a / (1.0 + a) ** 2
    if family is Family.STUDENT_T5:
        return _C5 * (1.0 + z * z / 5.0) ** -3
    if family is Family.CAUCHY:
        return _INV_PI / (1.0 + z * z)
    if family is Family.LAPLACE:
        return 0.5 * np.exp(-np.abs(z))
    raise UnsupportedFamilyError(family)


def _std_cdf(family, z):
    if family is Family.NORMAL:
        return _norm_cdf(z)
    if family is Family.LOGISTIC:
        # 1/(1+e^{-z}) without overflow on either side
        out = np.where(z >= 0.0,
                       1.0 / (1.0 + np.exp(-np.abs(z))),
                       np.exp(-np.abs(z)) / (1.0 + np.exp(-np.abs(z))))
        return out
    if family is Family.STUDENT_T5:
        return _t5_cdf(z)
    if family is Family.CAUCHY:
        return 0.5 + np.arctan(z) * _INV_PI
    if family is Family.LAPLACE:
        return np.where(z < 0.0, 0.5 * np.exp(-np.abs(z)),
                        1.0 - 0.5 * np.exp(-np.abs(z)))
    raise UnsupportedFamilyError(family)


def _std_quantile(family, u):
    if family is Family.NORMAL:
        return _norm_quantile(u)
    if family is Family.LOGISTIC:
        return np.log(u) - np.log1p(-u)
    if family is Family.CAUCHY:
        return np.tan(math.pi * (u - 0.5))
    if family is Family.LAPLACE:
        return np.where(u < 0.5, np.log(2.0 * u), -np.log1p(-2.0 * (u - 0.5)))
    raise UnsupportedFamilyError(family)


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def _as_array(x):
    arr = np.asarray(x, dtype=np.float64)
    return arr, (arr.ndim == 0)


def _ret(arr, scalar):
    return float(arr) if scalar else arr


def pdf(dist, x):
    """Density of dist at x (scalar or array); infinite x gives 0."""
    z, scalar = _as_array(x)
    if dist.family is Family.NORMAL_MIXTURE:
        z1 = (z - dist.location) / dist.scale
        z2 = (z - dist.location) / dist.scale2
        out = (dist.weight * _norm_pdf(z1) / dist.scale
               + (1.0 - dist.weight) * _norm_pdf(z2) / dist.scale2)
    else:
        out = _std_pdf(dist.family, (z - dist.location) / dist.scale) / dist.scale
    out = np.where(np.isinf(z), 0.0, out)
    return _ret(out, scalar)


def cdf(dist, x):
    """Distribution function of dist at x (scalar or array)."""
    z, scalar = _as_array(x)
    zf = np.where(np.isinf(z), 0.0, z)  # placeholder, fixed up below
    if dist.family is Family.NORMAL_MIXTURE:
        out = (dist.weight * _norm_cdf((zf - dist.location) / dist.scale)
               + (1.0 - dist.weight) * _norm_cdf((zf - dist.location) / dist.scale2))
    else:
        out = _std_cdf(dist.family, (zf - dist.location) / dist.scale)
    out = np.where(z == np.inf, 1.0, out)
    out = np.where(z == -np.inf, 0.0, out)
    return _ret(out, scalar)


def quantile(dist, u):
    """Inverse of cdf on (0,1).  Closed forms where available, otherwise
    bracketed root finding on the cdf (mixture, Student-t)."""
    uu, scalar = _as_array(u)
    if np.any((uu <= 0.0) | (uu >= 1.0)):
        raise DomainError("quantile requires u in (0,1)")
    if dist.family in (Family.NORMAL, Family.LOGISTIC, Family.CAUCHY, Family.LAPLACE):
        out = dist.location + dist.scale * _std_quantile(dist.family, uu)
        return _ret(out, scalar)
    # families without a closed-form inverse
    flat = np.atleast_1d(uu).ravel()
    res = np.empty_like(flat)
    for i, ui in enumerate(flat):
        res[i] = _quantile_root(dist, float(ui))
    out = res.reshape(np.shape(uu))
    return _ret(out, scalar)


def _quantile_root(dist, u):
    widest = dist.scale if dist.family is not Family.NORMAL_MIXTURE else max(dist.scale, dist.scale2)
    lo = dist.location - 10.0 * widest
    hi = dist.location + 10.0 * widest
    while cdf(dist, lo) > u:
        lo = dist.location + 2.0 * (lo - dist.location)
    while cdf(dist, hi) < u:
        hi = dist.location + 2.0 * (hi - dist.location)
    return find_root(lambda x: cdf(dist, x) - u, lo, hi, tol=1e-14)


def sample(dist, n, seed):
    """Draw n points from dist, deterministically in (dist, n, seed).

    Inverse-CDF for the closed-form families; Student-t(5) as a normal over
    the square root of an independent chi-square(5)/5; the mixture picks a
    component per draw and then samples it.
    """
    if n < 1:
        raise DomainError("need n >= 1")
    rng = Rng(seed)
    fam = dist.family
    if fam in (Family.NORMAL, Family.LOGISTIC, Family.CAUCHY, Family.LAPLACE):
        u = rng.uniforms(n)
        if fam is Family.NORMAL:
            z = _norm_quantile(u)
        else:
            z = _std_quantile(fam, u)
        return Sample(dist.location + dist.scale * z)
    if fam is Family.STUDENT_T5:
        u = rng.uniforms(6 * n).reshape(6, n)
        z = _norm_quantile(u[0])
        chi5 = np.sum(_norm_quantile(u[1:]) ** 2, axis=0)
        t = z / np.sqrt(chi5 / 5.0)
        return Sample(dist.location + dist.scale * t)
    if fam is Family.NORMAL_MIXTURE:
        u = rng.uniforms(2 * n).reshape(2, n)
        comp1 = u[0] < dist.weight
        z = _norm_quantile(u[1])
        s = np.where(comp1, dist.scale, dist.scale2)
        return Sample(dist.location + s * z)
    raise UnsupportedFamilyError(fam)


def score_phi0(family, x):
    """Location score -f0'(x)/f0(x) of a standardized null family."""
    z, scalar = _as_array(x)
    if family is Family.NORMAL:
        return _ret(z + 0.0, scalar)
    if family is Family.LOGISTIC:
        return _ret(np.tanh(0.5 * z), scalar)
    raise UnsupportedFamilyError("score_phi0 supports the null families only, got %r" % (family,))


def standard_null(family):
    """The standardized member of a null family."""
    if family not in NULL_FAMILIES:
        raise UnsupportedFamilyError("not a null family: %r" % (family,))
    return Distribution(family, 0.0, 1.0)


def from_config(spec_item):
    """Build a Distribution from a config entry.

    Accepts a bare family name (location 2, scale 5 convention of the power
    study) or a dict with keys family / location / scale (+ weight, scale2).
    """
    if isinstance(spec_item, str):
        fam = parse_family(spec_item)
        if fam is Family.NORMAL_MIXTURE:
            return Distribution(fam, 2.0, 5.0)  # defaults: weight .9, scale2 15
        return Distribution(fam, 2.0, 5.0)
    if isinstance(spec_item, dict):
        d = dict(spec_item)
        fam = parse_family(d.pop("family"))
        kwargs = {
            "location": float(d.pop("location", 2.0)),
            "scale": float(d.pop("scale", 5.0)),
        }
        if "weight" in d:
            kwargs["weight"] = float(d.pop("weight"))
        if "scale2" in d:
            kwargs["scale2"] = float(d.pop("scale2"))
        if d:
            raise DomainError("unknown distribution config keys: %s" % sorted(d))
        return Distribution(fam, **kwargs)
    raise DomainError("distribution config must be a name or a mapping")


# scalar helpers used by the scalar-minded callers ---------------------------

def norm_cdf_scalar(x):
    return 0.5 * erfc(-x / _SQRT2)


def norm_sf_scalar(x):
    return 0.5 * erfc(x / _SQRT2)


def norm_pdf_scalar(x):
    return math.exp(-0.5 * x * x) / _SQRT2PI
