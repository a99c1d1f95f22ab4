"""Normality-test battery: histogram, moments, chi-square, AD and KS tests.

All tests are one-sample tests against the fully specified standard normal
(no parameter estimation), reflecting the null hypothesis "the sample is
drawn from N(0, 1)":

* chi-square goodness of fit over equal-probability bins (default 8, so 7
  degrees of freedom); expected count per bin is N / bins.
* Anderson-Darling, case 0 (known mean and variance), with the p-value
  taken from the asymptotic distribution of A^2; no small-sample
  modification factor is applied.
* one-sample Kolmogorov-Smirnov with the Kolmogorov-distribution series
  Q(lam) = 2 sum_j (-1)^(j-1) exp(-2 j^2 lam^2) evaluated at the
  finite-sample argument lam = (sqrt(n) + 0.12 + 0.11/sqrt(n)) * D.

Every test sorts a private copy of its input, so sample order never
matters, and all operations here are pure functions over immutable
buffers.  p-values are always numeric; values that underflow double
precision render as "< 1e-300" in reports.

The normal CDF, its inverse (Wichura's AS241), the regularized incomplete
gamma tail and the Kolmogorov series are implemented here so the library
needs nothing beyond numpy; the test suite cross-checks them against
extended-precision oracles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional, Tuple

import numpy as np

__all__ = [
    "EmptySampleError",
    "Histogram",
    "InsufficientSampleError",
    "Moments",
    "NonFiniteSampleError",
    "TestReport",
    "anderson_darling",
    "build_histogram",
    "chi_square_gof",
    "chi2_sf",
    "kolmogorov_sf",
    "kolmogorov_smirnov",
    "moments",
    "normal_cdf",
    "normal_ppf",
    "run_suite",
]


class EmptySampleError(ValueError):
    """No samples supplied."""


class InsufficientSampleError(ValueError):
    """Sample smaller than the test's minimum size."""


class NonFiniteSampleError(ValueError):
    """Sample contains NaN or infinity."""


_SQRT2 = math.sqrt(2.0)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def normal_cdf(x):
    """Standard normal CDF via erfc; absolute error well below 1e-12."""
    return 0.5 * math.erfc(-x / _SQRT2)


_erfc_vec = np.frompyfunc(math.erfc, 1, 1)


def _normal_cdf_vec(x):
    return 0.5 * _erfc_vec(-np.asarray(x, dtype=np.float64) / _SQRT2).astype(np.float64)


def _log_normal_cdf(x):
    """log Phi(x), stable across the whole real line."""
    if x > 8.0:
        return math.log1p(-0.5 * math.erfc(x / _SQRT2))
    if x > -36.0:
        return math.log(0.5 * math.erfc(-x / _SQRT2))
    # asymptotic tail: Phi(x) ~ phi(x)/(-x) * (1 - 1/x^2 + 3/x^4 - 15/x^6)
    z = x * x
    series = 1.0 - 1.0 / z + 3.0 / (z * z) - 15.0 / (z * z * z)
    return -0.5 * z - _LOG_SQRT_2PI - math.log(-x) + math.log(series)


_log_normal_cdf_vec = np.frompyfunc(_log_normal_cdf, 1, 1)


# AS241 (Wichura, PPND16): inverse of the standard normal CDF.
_PPF_A = (3.3871328727963666080e0, 1.3314166789178437745e2,
          1.9715909503065514427e3, 1.3731693765509461125e4,
          4.5921953931549871457e4, 6.7265770927008700853e4,
          3.3430575583588128105e4, 2.5090809287301226727e3)
_PPF_B = (1.0, 4.2313330701600911252e1, 6.8718700749205790830e2,
          5.3941960214247511077e3, 2.1213794301586595867e4,
          3.9307895800092710610e4, 2.8729085735721942674e4,
          5.2264952788528545610e3)
_PPF_C = (1.42343711074968357734e0, 4.63033784615654529590e0,
          5.76949722146069140550e0, 3.64784832476320460504e0,
          1.27045825245236838258e0, 2.41780725177450611770e-1,
          2.27238449892691845833e-2, 7.74545014278341407640e-4)
_PPF_D = (1.0, 2.05319162663775882187e0, 1.67638483018380384940e0,
          6.89767334985100004550e-1, 1.48103976427480074590e-1,
          1.51986665636164571966e-2, 5.47593808499534494600e-4,
          1.05075007164441684324e-9)
_PPF_E = (6.65790464350110377720e0, 5.46378491116411436990e0,
          1.78482653991729133580e0, 2.96560571828504891230e-1,
          2.65321895265761230930e-2, 1.24266094738807843860e-3,
          2.71155556874348757815e-5, 2.01033439929228813265e-7)
_PPF_F = (1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1,
          1.48753612908506148525e-2, 7.86869131145613259100e-4,
          1.84631831751005468180e-5, 1.42151175831644588870e-7,
          2.04426310338993978564e-15)


def _poly(coeffs, r):
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * r + c
    return acc


def normal_ppf(p):
    """Inverse standard normal CDF (quantile function), AS241 accuracy."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly in (0, 1), got {p!r}")
    q = p - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        return q * _poly(_PPF_A, r) / _poly(_PPF_B, r)
    r = p if q < 0 else 1.0 - p
    r = math.sqrt(-math.log(r))
    if r <= 5.0:
        r -= 1.6
        x = _poly(_PPF_C, r) / _poly(_PPF_D, r)
    else:
        r -= 5.0
        x = _poly(_PPF_E, r) / _poly(_PPF_F, r)
    return -x if q < 0 else x


def _gamma_series_p(a, x):
    ap = a
    total = delta = 1.0 / a
    for _ in range(1000):
        ap += 1.0
        delta *= x / ap
        total += delta
        if abs(delta) < abs(total) * 1e-17:
            break
    return total * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_cf_q(a, x):
    # modified Lentz continued fraction for the upper tail
    tiny = 1e-300
    b = x + 1.0 - a
    c = 1.0 / tiny
    d = 1.0 / b
    h = d
    for i in range(1, 1000):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < tiny:
            d = tiny
        c = b + an / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return h * math.exp(-x + a * math.log(x) - math.lgamma(a))


def _gamma_q(a, x):
    """Regularized upper incomplete gamma Q(a, x)."""
    if x < 0.0 or a <= 0.0:
        raise ValueError("need x >= 0 and a > 0")
    if x == 0.0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_series_p(a, x)
    return _gamma_cf_q(a, x)


def chi2_sf(x, df):
    """Upper tail of the chi-square distribution with df degrees of freedom."""
    return _gamma_q(df / 2.0, x / 2.0)


def kolmogorov_sf(lam):
    """Upper tail of the Kolmogorov distribution, Q(lam) = P(K > lam)."""
    if lam <= 0.0:
        return 1.0
    if lam < 1.18:
        # theta-transformed series for the CDF: converges fast for small lam
        t = math.exp(-math.pi * math.pi / (8.0 * lam * lam))
        cdf = math.sqrt(2.0 * math.pi) / lam * (t + t ** 9 + t ** 25 + t ** 49)
        return 1.0 - cdf
    total = 0.0
    for j in range(1, 101):
        term = math.exp(-2.0 * j * j * lam * lam)
        total += -term if j % 2 == 0 else term
        if term < 1e-300:
            break
    return max(0.0, 2.0 * total)


def anderson_darling_sf(a2):
    """Upper tail of the asymptotic (case-0) A^2 distribution.

    Marsaglia & Marsaglia's polynomial fit of the limiting CDF, accurate to
    about 7 digits over the practical range.
    """
    if a2 <= 0.0:
        return 1.0
    if math.isinf(a2):
        return 0.0
    z = a2
    if z < 2.0:
        cdf = (math.exp(-1.2337141 / z) / math.sqrt(z)
               * (2.00012 + (0.247105 - (0.0649821 - (0.0347962
                  - (0.0116720 - 0.00168691 * z) * z) * z) * z) * z))
    else:
        cdf = math.exp(-math.exp(1.0776 - (2.30695 - (0.43424 - (0.082433
                       - (0.008056 - 0.0003146 * z) * z) * z) * z) * z))
    return min(1.0, max(0.0, 1.0 - cdf))


@dataclass(frozen=True)
class TestReport:
    """Outcome of one normality test at significance level alpha."""

    test_name: str
    statistic: float
    p_value: float
    rejected: bool
    alpha: float = 0.05

    @property
    def null_hypothesis(self):
        return "Rejected" if self.rejected else "Non-rejected"

    @property
    def p_display(self):
        """Human-readable p-value; underflowed values render as '< 1e-300'."""
        if self.p_value < 1e-300:
            return "< 1e-300"
        return f"{self.p_value:.6g}"

    def to_dict(self):
        return {
            "test": self.test_name,
            "statistic": self.statistic,
            "p_value": self.p_value,
            "alpha": self.alpha,
            "rejected": self.rejected,
        }


@dataclass(frozen=True)
class Histogram:
    """Binned counts over strictly increasing edges; total == counts.sum()."""

    bin_edges: np.ndarray
    counts: np.ndarray
    total: int

    def to_csv(self):
        lines = ["bin_lo,bin_hi,count"]
        for lo, hi, c in zip(self.bin_edges[:-1], self.bin_edges[1:], self.counts):
            lines.append(f"{float(lo)!r},{float(hi)!r},{int(c)}")
        return "\n".join(lines) + "\n"


def _as_sample(samples, *, require_finite=True):
    xs = np.asarray(samples, dtype=np.float64)
    if xs.ndim != 1:
        xs = xs.reshape(-1)
    if require_finite and xs.size and not np.isfinite(xs).all():
        raise NonFiniteSampleError("sample contains non-finite values")
    return xs


def build_histogram(samples, bins, range=None):
    """Tally samples into half-open bins [edge_i, edge_i+1); last bin closed.

    Default range is [min, max] of the sample.  With an explicit range,
    samples outside it are dropped (total counts only binned samples).
    """
    xs = _as_sample(samples, require_finite=False)
    if xs.size == 0:
        raise EmptySampleError("cannot histogram an empty sample")
    if bins < 1:
        raise ValueError(f"bins must be >= 1, got {bins}")
    if range is not None and not range[0] < range[1]:
        raise ValueError("range must satisfy lo < hi")
    counts, edges = np.histogram(xs, bins=bins, range=range)
    return Histogram(bin_edges=edges, counts=counts, total=int(counts.sum()))


def chi_square_gof(samples, alpha=0.05, bins=8):
    """Chi-square goodness of fit against N(0, 1) over equal-probability bins.

    Cut points are standard-normal quantiles, so every bin has expected
    count N / bins; the statistic is referred to chi-square with bins - 1
    degrees of freedom.
    """
    xs = _as_sample(samples)
    n = xs.size
    if n < 50:
        raise InsufficientSampleError(f"chi-square needs >= 50 samples, got {n}")
    if bins < 2:
        raise ValueError(f"bins must be >= 2, got {bins}")
    cuts = np.array([normal_ppf(i / bins) for i in range(1, bins)])
    observed = np.bincount(np.searchsorted(cuts, xs, side="right"),
                           minlength=bins).astype(np.float64)
    expected = n / bins
    stat = float(((observed - expected) ** 2 / expected).sum())
    p = chi2_sf(stat, bins - 1)
    return TestReport("chi2", stat, p, rejected=p < alpha, alpha=alpha)


def anderson_darling(samples, alpha=0.05):
    """Case-0 Anderson-Darling test against the fully specified N(0, 1)."""
    xs = _as_sample(samples)
    n = xs.size
    if n < 8:
        raise InsufficientSampleError(f"Anderson-Darling needs >= 8 samples, got {n}")
    ys = np.sort(xs)
    log_cdf = _log_normal_cdf_vec(ys).astype(np.float64)
    log_sf = _log_normal_cdf_vec(-ys[::-1]).astype(np.float64)
    weights = 2.0 * np.arange(1, n + 1, dtype=np.float64) - 1.0
    a2 = -n - float(np.sum(weights * (log_cdf + log_sf))) / n
    p = anderson_darling_sf(a2)
    return TestReport("ad", a2, p, rejected=p < alpha, alpha=alpha)


def kolmogorov_smirnov(samples, alpha=0.05):
    """One-sample KS test against N(0, 1).

    D = max_i max(i/n - Phi(x_(i)), Phi(x_(i)) - (i-1)/n); the p-value uses
    the Kolmogorov series at (sqrt(n) + 0.12 + 0.11/sqrt(n)) * D.
    """
    xs = _as_sample(samples)
    n = xs.size
    if n < 1:
        raise InsufficientSampleError("Kolmogorov-Smirnov needs >= 1 sample")
    ys = np.sort(xs)
    cdf = _normal_cdf_vec(ys)
    i = np.arange(1, n + 1, dtype=np.float64)
    d_plus = float(np.max(i / n - cdf))
    d_minus = float(np.max(cdf - (i - 1.0) / n))
    d = max(d_plus, d_minus)
    lam = (math.sqrt(n) + 0.12 + 0.11 / math.sqrt(n)) * d
    p = kolmogorov_sf(lam)
    return TestReport("ks", d, p, rejected=p < alpha, alpha=alpha)


class Moments(NamedTuple):
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float


def moments(samples):
    """Sample mean, unbiased variance, and standardized 3rd/4th moments.

    Skewness and excess kurtosis use the population central-moment
    estimators g1 = m3 / m2^1.5 and g2 = m4 / m2^2 - 3; for a degenerate
    sample (zero variance) both are NaN markers.
    """
    xs = _as_sample(samples)
    n = xs.size
    if n < 2:
        raise InsufficientSampleError(f"moments need >= 2 samples, got {n}")
    mean = float(xs.mean())
    centered = xs - mean
    m2 = float(np.mean(centered ** 2))
    variance = m2 * n / (n - 1)
    if m2 == 0.0:
        return Moments(mean, 0.0, math.nan, math.nan)
    m3 = float(np.mean(centered ** 3))
    m4 = float(np.mean(centered ** 4))
    return Moments(mean, variance, m3 / m2 ** 1.5, m4 / (m2 * m2) - 3.0)


def run_suite(samples, suite=("chi2", "ad", "ks"), alpha=0.05, bins=8):
    """Run the requested subset of tests, in canonical chi2/ad/ks order."""
    known = {"chi2": lambda: chi_square_gof(samples, alpha=alpha, bins=bins),
             "ad": lambda: anderson_darling(samples, alpha=alpha),
             "ks": lambda: kolmogorov_smirnov(samples, alpha=alpha)}
    unknown = [name for name in suite if name not in known]
    if unknown:
        raise ValueError(f"unknown tests: {unknown}; expected subset of "
                         f"{sorted(known)}")
    return [known[name]() for name in ("chi2", "ad", "ks") if name in suite]
