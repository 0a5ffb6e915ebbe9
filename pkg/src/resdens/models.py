"""Location-scale time series models: simulation and residual filtering.

The model class is X_t = m_t + sigma_t * eps_t with an ARMA conditional mean
and a GARCH conditional variance driven by the noise Z_t = X_t - m_t:

    m_t     = eta + sum_j ar_j (X_{t-j} - eta) - sum_j ma_j Z_{t-j}
    sig2_t  = alpha_0 + sum_j alpha_j Z_{t-j}^2 + sum_j beta_j sig2_{t-j}

Pure ARMA is the special case with no alpha_1.. / beta terms (sigma constant
at sqrt(alpha_0)); pure GARCH has no ar/ma terms (m constant at eta).

Filtering inverts the same recursions on observed data with truncated,
data-driven presample values: unknown past observations are replaced by the
sample mean, unknown past squared residuals and variances by the sample
variance, and unknown past signed residuals by zero.  The influence of that
choice decays geometrically, which `forgetting_diagnostic` measures.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import math

import numpy as np
from scipy.signal import lfilter

from .innovations import InnovationSpec, GAUSSIAN, _as_generator, sample

ARMA = "arma"
GARCH = "garch"
ARMA_GARCH = "arma_garch"

_FAMILIES = (ARMA, GARCH, ARMA_GARCH)
_MAX_ORDER = 10


@dataclass(frozen=True)
class ModelSpec:
    """Model family, orders, and innovation law.

    p, q             : AR and MA orders of the conditional mean.
    garch_p, garch_q : orders of the variance recursion (garch_q lagged
                       squared-noise terms, garch_p lagged variance terms).
    """

    family: str
    p: int = 0
    q: int = 0
    garch_p: int = 0
    garch_q: int = 0
    innovation: InnovationSpec = field(default_factory=lambda: InnovationSpec(GAUSSIAN))

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown model family {self.family!r}")
        for name in ("p", "q", "garch_p", "garch_q"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 0 or v > _MAX_ORDER:
                raise ValueError(f"order {name} must be an integer in [0, {_MAX_ORDER}]")
        if self.family == ARMA and (self.garch_p or self.garch_q):
            raise ValueError("arma family must have garch_p = garch_q = 0")
        if self.family == GARCH and (self.p or self.q):
            raise ValueError("garch family must have p = q = 0")

    @property
    def max_lag(self) -> int:
        return max(self.p, self.q, self.garch_p, self.garch_q)


def _roots_outside_unit_disc(coefs, label):
    """Check that 1 - c_1 z - ... - c_k z^k has all roots with |z| > 1.

    Tested through the reversed polynomial lambda^k - c_1 lambda^(k-1) - ...
    - c_k, whose roots are the reciprocals; its leading coefficient is 1, so
    the companion matrix stays finite even for tiny trailing coefficients.
    """
    c = np.asarray(coefs, dtype=float)
    if c.size == 0:
        return
    roots = np.roots(np.concatenate([[1.0], -c]))
    if roots.size and np.max(np.abs(roots)) >= 1.0:
        raise ValueError(f"{label} polynomial must have all roots outside the unit disc")


def _freeze(a) -> np.ndarray:
    arr = np.array(a, dtype=float).reshape(-1)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ThetaVector:
    """Full parameter point: location eta, ar/ma, and alpha/beta.

    alpha holds (alpha_0, alpha_1, ..); a homoscedastic model uses
    alpha = (sigma^2,) alone.  Validity (positivity, sum(beta) < 1,
    AR/MA roots outside the closed unit disc) is checked on construction.
    """

    eta: float
    ar: np.ndarray = ()
    ma: np.ndarray = ()
    alpha: np.ndarray = (1.0,)
    beta: np.ndarray = ()

    def __post_init__(self):
        object.__setattr__(self, "ar", _freeze(self.ar))
        object.__setattr__(self, "ma", _freeze(self.ma))
        object.__setattr__(self, "alpha", _freeze(self.alpha))
        object.__setattr__(self, "beta", _freeze(self.beta))
        if not np.isfinite(self.eta):
            raise ValueError("eta must be finite")
        for name in ("ar", "ma", "alpha", "beta"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"{name} must be finite")
        if self.alpha.size < 1 or self.alpha[0] <= 0:
            raise ValueError("alpha_0 must be positive")
        if np.any(self.alpha[1:] < 0) or np.any(self.beta < 0):
            raise ValueError("alpha_1.. and beta must be nonnegative")
        if self.beta.size and self.beta.sum() >= 1.0:
            raise ValueError("sum(beta) must be < 1")
        _roots_outside_unit_disc(self.ar, "AR")
        _roots_outside_unit_disc(self.ma, "MA")

    @property
    def variance_floor(self) -> float:
        """Lower bound alpha_0 / (1 - sum beta) on every filtered variance."""
        return float(self.alpha[0] / (1.0 - self.beta.sum()))


def check_orders(spec: ModelSpec, theta: ThetaVector) -> None:
    if theta.ar.size != spec.p or theta.ma.size != spec.q:
        raise ValueError("theta ar/ma lengths do not match model orders")
    if theta.alpha.size != spec.garch_q + 1 or theta.beta.size != spec.garch_p:
        raise ValueError("theta alpha/beta lengths do not match model orders")


@dataclass(frozen=True)
class SeriesSample:
    """Simulated path with the generating quantities retained.

    x = true_mean + true_vol * true_innov holds exactly, elementwise.
    """

    x: np.ndarray
    true_mean: np.ndarray
    true_vol: np.ndarray
    true_innov: np.ndarray
    theta_true: ThetaVector
    spec: ModelSpec


@dataclass(frozen=True)
class FilterOutput:
    """Fitted conditional means/vols and standardized residuals."""

    mbar: np.ndarray
    sbar: np.ndarray
    resid: np.ndarray
    theta: ThetaVector


def _presample_variance(spec: ModelSpec, theta: ThetaVector):
    """Stationary E[sig2] when it exists, else the variance floor."""
    v = spec.innovation.variance
    persist = theta.beta.sum()
    if math.isfinite(v):
        persist = persist + v * theta.alpha[1:].sum()
        if persist < 1.0:
            return float(theta.alpha[0] / (1.0 - persist)), v
    return theta.variance_floor, v


def simulate(spec: ModelSpec, theta: ThetaVector, n: int, stream,
             burn_in: int = 1000) -> SeriesSample:
    """Simulate n observations after burn_in steps from the presample state.

    The path starts at X = eta with the variance recursion at its stationary
    mean (or at the variance floor when no finite stationary mean exists) and
    the reported arrays are the final n points, so m, sigma, eps satisfy
    x = m + sigma * eps exactly.
    """
    check_orders(spec, theta)
    if n < 1:
        raise ValueError("n must be >= 1")
    if burn_in < 0:
        raise ValueError("burn_in must be >= 0")
    gen = _as_generator(stream)
    total = burn_in + n
    eps = np.asarray(sample(spec.innovation, gen, total), dtype=float)

    if spec.garch_p == 0 and spec.garch_q == 0:
        sig = math.sqrt(theta.alpha[0])
        noise = sig * eps
        ar_poly = np.concatenate([[1.0], -theta.ar])
        ma_poly = np.concatenate([[1.0], -theta.ma])
        xc = lfilter(ma_poly, ar_poly, noise)
        x = theta.eta + xc
        m = x - noise
        sigma = np.full(total, sig)
        return SeriesSample(x[burn_in:], m[burn_in:], sigma[burn_in:],
                            eps[burn_in:], theta, spec)

    sig2_0, v = _presample_variance(spec, theta)
    z2_0 = v * sig2_0 if math.isfinite(v) else sig2_0
    off = spec.max_lag
    eta = theta.eta
    ar = list(theta.ar)
    ma = list(theta.ma)
    a0 = float(theta.alpha[0])
    al = list(theta.alpha[1:])
    be = list(theta.beta)

    xc = [0.0] * (off + total)
    z = [0.0] * (off + total)
    z2 = [z2_0] * off + [0.0] * total
    sig2 = [sig2_0] * off + [0.0] * total
    m_out = [0.0] * total
    s_out = [0.0] * total
    x_out = [0.0] * total
    for t in range(off, off + total):
        s2 = a0
        for j, aj in enumerate(al):
            s2 += aj * z2[t - 1 - j]
        for j, bj in enumerate(be):
            s2 += bj * sig2[t - 1 - j]
        st = math.sqrt(s2)
        zt = st * eps[t - off]
        mc = 0.0
        for j, aj in enumerate(ar):
            mc += aj * xc[t - 1 - j]
        for j, bj in enumerate(ma):
            mc -= bj * z[t - 1 - j]
        mt = eta + mc
        xt = mt + zt
        sig2[t] = s2
        z[t] = zt
        z2[t] = zt * zt
        xc[t] = xt - eta
        m_out[t - off] = mt
        s_out[t - off] = st
        x_out[t - off] = xt

    return SeriesSample(np.array(x_out[burn_in:]), np.array(m_out[burn_in:]),
                        np.array(s_out[burn_in:]), eps[burn_in:], theta, spec)


def _filter_arrays(x, eta, ar, ma, alpha, beta, mean_pre, var_pre, sig2_pre):
    """Core truncated filter on raw arrays; no validation.

    Returns (mbar, sig2bar, z).  Presample: X = mean_pre, signed residual 0,
    squared residual var_pre, variance sig2_pre.
    """
    n = x.shape[0]
    p, q = ar.shape[0], ma.shape[0]
    gq, gp = alpha.shape[0] - 1, beta.shape[0]

    xc = x - eta
    if p:
        u = xc.copy()
        pre = mean_pre - eta
        for j in range(1, p + 1):
            lagged = np.empty(n)
            lagged[:j] = pre
            lagged[j:] = xc[:-j]
            u -= ar[j - 1] * lagged
    else:
        u = xc
    if q:
        z = lfilter([1.0], np.concatenate([[1.0], -ma]), u)
    else:
        z = u

    if gq or gp:
        rhs = np.full(n, alpha[0])
        if gq:
            z2 = z * z
            for j in range(1, gq + 1):
                lagged = np.empty(n)
                lagged[:j] = var_pre
                lagged[j:] = z2[:-j]
                rhs += alpha[j] * lagged
        if gp:
            for t in range(min(gp, n)):
                rhs[t] += sig2_pre * beta[t:].sum()
            sig2 = lfilter([1.0], np.concatenate([[1.0], -beta]), rhs)
        else:
            sig2 = rhs
    else:
        sig2 = np.full(n, alpha[0])

    return x - z, sig2, z


def filter_series(spec: ModelSpec, theta: ThetaVector, x,
                  presample_mean: Optional[float] = None,
                  presample_var: Optional[float] = None) -> FilterOutput:
    """Run the truncated mean/variance filter on observed data.

    presample_mean / presample_var override the data-driven presample values
    (sample mean / sample variance); the default variance presample is clamped
    to the variance floor so the floor holds for every t, while explicit
    overrides are used as given.
    """
    check_orders(spec, theta)
    x = np.asarray(x, dtype=float)
    if x.ndim != 1:
        raise ValueError("x must be one-dimensional")
    if not np.all(np.isfinite(x)):
        raise ValueError("x must be finite")
    if x.shape[0] < spec.max_lag + 1:
        raise ValueError(f"series too short: need at least {spec.max_lag + 1} observations")

    mean_pre = float(x.mean()) if presample_mean is None else float(presample_mean)
    if presample_var is None:
        var_pre = float(x.var())
        sig2_pre = max(var_pre, theta.variance_floor)
    else:
        var_pre = sig2_pre = float(presample_var)

    mbar, sig2, z = _filter_arrays(x, theta.eta, theta.ar, theta.ma,
                                   theta.alpha, theta.beta,
                                   mean_pre, var_pre, sig2_pre)
    sbar = np.sqrt(sig2)
    return FilterOutput(mbar, sbar, z / sbar, theta)


def forgetting_diagnostic(spec: ModelSpec, theta: ThetaVector, x,
                          t_max: Optional[int] = None) -> np.ndarray:
    """Gap d_t between two filters started from different presample states.

    d_t = |sig2bar_t(A) - sig2bar_t(B)| + |mbar_t(A) - mbar_t(B)| where A uses
    the data-driven presample (mean, variance) and B a shifted/doubled one.
    For a stable model d_t decays geometrically in t.
    """
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    if t_max is None:
        t_max = n
    if not 1 <= t_max <= n:
        raise ValueError("t_max must be in [1, len(x)]")
    mean_pre = float(x.mean())
    var_pre = float(x.var())
    if var_pre <= 0:
        var_pre = 1.0
    a = filter_series(spec, theta, x, presample_mean=mean_pre, presample_var=var_pre)
    b = filter_series(spec, theta, x, presample_mean=mean_pre + math.sqrt(var_pre),
                      presample_var=2.0 * var_pre)
    d = np.abs(a.sbar**2 - b.sbar**2) + np.abs(a.mbar - b.mbar)
    return d[:t_max]


@dataclass(frozen=True)
class Moments:
    mean: float
    variance: Optional[float]


def unconditional_moments(spec: ModelSpec, theta: ThetaVector) -> Moments:
    """Stationary mean, and variance in the closed-form cases.

    Variance is available for white noise, AR(1), MA(q), and pure GARCH with
    a finite stationary variance; None otherwise.
    """
    check_orders(spec, theta)
    v = spec.innovation.variance
    if not math.isfinite(v):
        return Moments(theta.eta, None)
    a0 = float(theta.alpha[0])
    if spec.garch_p == 0 and spec.garch_q == 0:
        if spec.p == 0:
            return Moments(theta.eta, a0 * v * (1.0 + float(theta.ma @ theta.ma)))
        if spec.p == 1 and spec.q == 0:
            return Moments(theta.eta, a0 * v / (1.0 - float(theta.ar[0]) ** 2))
        return Moments(theta.eta, None)
    if spec.p == 0 and spec.q == 0:
        persist = v * theta.alpha[1:].sum() + theta.beta.sum()
        if persist < 1.0:
            return Moments(theta.eta, a0 * v / (1.0 - persist))
        return Moments(theta.eta, None)
    return Moments(theta.eta, None)
