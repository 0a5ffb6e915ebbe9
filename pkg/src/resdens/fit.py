"""Parameter estimation by derivative-free minimization on transformed coordinates.

ARMA parameters are fitted by conditional least squares on the filtered
residuals; GARCH and ARMA-GARCH parameters by the Gaussian quasi-likelihood.
All constraints are enforced through reparametrization, so every candidate
the optimizer visits is a valid ThetaVector:

  * positive parameters (alpha) move on a log scale,
  * beta moves through a scaled logistic map onto the simplex sum(beta) <= 0.999,
  * AR/MA coefficients move through the partial-autocorrelation map (each
    partial autocorrelation is tanh of a free coordinate), which is a
    bijection onto the region with all polynomial roots outside the unit disc.

The optimizer itself is Nelder-Mead with restarts from the incumbent best.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import minimize

from .models import ModelSpec, ThetaVector, check_orders, _filter_arrays

_BETA_CAP = 0.999
_EMPTY = np.zeros(0)


@dataclass(frozen=True)
class OptimizerConfig:
    max_iterations: int = 2000
    tolerance: float = 1e-8
    restarts: int = 3

    def __post_init__(self):
        if not self.tolerance > 0:
            raise ValueError("tolerance must be > 0")
        if self.max_iterations < 1 or self.restarts < 0:
            raise ValueError("max_iterations >= 1 and restarts >= 0 required")


@dataclass(frozen=True)
class OptimizeResult:
    argmin: np.ndarray
    value: float
    iterations: int
    converged: bool
    history: np.ndarray


@dataclass(frozen=True)
class ThetaEstimate:
    theta: ThetaVector
    objective_value: float
    iterations: int
    converged: bool


def optimize(objective: Callable, init, config: Optional[OptimizerConfig] = None) -> OptimizeResult:
    """Minimize with Nelder-Mead plus restarts; track the incumbent best.

    The recorded history is the sequence of accepted (improving) objective
    values, so it is non-increasing.  `converged` reports whether the final
    simplex met the tolerance before the iteration budget ran out.
    """
    if config is None:
        config = OptimizerConfig()
    x0 = np.atleast_1d(np.asarray(init, dtype=float))
    f0 = float(objective(x0))
    if not math.isfinite(f0):
        raise ValueError("objective is not finite at the initial point")

    state = {"x": x0.copy(), "f": f0}
    history = [f0]

    def wrapped(z):
        v = float(objective(z))
        if math.isnan(v):
            v = math.inf
        if v < state["f"]:
            state["f"] = v
            state["x"] = np.array(z, dtype=float)
            history.append(v)
        return v

    iterations = 0
    converged = False
    for _ in range(config.restarts + 1):
        f_before = state["f"]
        res = minimize(
            wrapped, state["x"], method="Nelder-Mead",
            options={
                "xatol": config.tolerance, "fatol": config.tolerance,
                "maxiter": config.max_iterations, "adaptive": x0.size >= 4,
            },
        )
        iterations += int(res.nit)
        converged = bool(res.success)
        improved = f_before - state["f"]
        if converged and improved <= config.tolerance * max(1.0, abs(state["f"])):
            break
    return OptimizeResult(state["x"], state["f"], iterations, converged,
                          np.asarray(history))


# ---------------------------------------------------------------------------
# parameter transforms

def pacf_to_coef(g) -> np.ndarray:
    """Partial autocorrelations (each in (-1,1)) to AR/MA coefficients."""
    coef: list = []
    for gk in np.asarray(g, dtype=float):
        coef = [c - gk * cr for c, cr in zip(coef, reversed(coef))] + [float(gk)]
    return np.asarray(coef)


def coef_to_pacf(coef) -> np.ndarray:
    """Inverse of pacf_to_coef; input must satisfy the root condition."""
    phi = [float(c) for c in coef]
    g = [0.0] * len(phi)
    for k in range(len(phi), 0, -1):
        gk = phi[k - 1]
        if not abs(gk) < 1.0:
            raise ValueError("coefficients outside the stationarity region")
        g[k - 1] = gk
        if k > 1:
            d = 1.0 - gk * gk
            phi = [(phi[j] + gk * phi[k - 2 - j]) / d for j in range(k - 1)]
    return np.asarray(g)


def _mean_unpack(p, q, z):
    eta = z[0]
    ar = pacf_to_coef(np.tanh(z[1:1 + p])) if p else _EMPTY
    ma = pacf_to_coef(np.tanh(z[1 + p:1 + p + q])) if q else _EMPTY
    return eta, ar, ma


def _mean_pack(eta, ar, ma):
    parts = [np.array([eta])]
    for c in (ar, ma):
        if len(c):
            g = np.clip(coef_to_pacf(c), -0.999999, 0.999999)
            parts.append(np.arctanh(g))
    return np.concatenate(parts)


def _vol_unpack(gq, gp, z):
    alpha = np.empty(gq + 1)
    alpha[0] = max(math.exp(min(z[0], 700.0)), 1e-300)
    for j in range(gq):
        alpha[1 + j] = math.exp(min(z[1 + j], 700.0))
    if gp:
        e = np.exp(np.minimum(z[gq + 1:gq + 1 + gp], 700.0))
        beta = _BETA_CAP * e / (1.0 + e.sum())
    else:
        beta = _EMPTY
    return alpha, beta


def _vol_pack(alpha, beta):
    z = [math.log(max(alpha[0], 1e-300))]
    z += [math.log(max(a, 1e-10)) for a in alpha[1:]]
    beta = np.asarray(beta, dtype=float)
    if beta.size:
        b = np.maximum(beta, 1e-10)
        excess = b.sum() / (_BETA_CAP * 0.999)
        if excess >= 1.0:
            b = b / excess
        z += list(np.log(b) - math.log(_BETA_CAP - b.sum()))
    return np.asarray(z)


# ---------------------------------------------------------------------------
# objectives

def negative_gaussian_qlik(spec: ModelSpec, theta: ThetaVector, x) -> float:
    """(1/n) sum over t >= max(p,q,P,Q)+1 of log sig2bar_t + residual_t^2.

    The Gaussian quasi-likelihood objective; the leading warm-up terms are
    excluded because they carry the presample approximation.
    """
    check_orders(spec, theta)
    x = np.asarray(x, dtype=float)
    if x.shape[0] < spec.max_lag + 1:
        raise ValueError(f"series too short: need at least {spec.max_lag + 1} observations")
    if not np.all(np.isfinite(x)):
        raise ValueError("x must be finite")
    return _qlik(x, theta.eta, theta.ar, theta.ma, theta.alpha, theta.beta,
                 float(x.mean()), float(x.var()))


def _qlik(x, eta, ar, ma, alpha, beta, mean_pre, var_pre):
    floor = alpha[0] / (1.0 - beta.sum()) if len(beta) else alpha[0]
    _, sig2, z = _filter_arrays(x, eta, ar, ma, alpha, beta,
                                mean_pre, var_pre, max(var_pre, floor))
    t0 = max(len(ar), len(ma), len(alpha) - 1, len(beta))
    s = sig2[t0:]
    zz = z[t0:]
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        val = float((np.log(s) + zz * zz / s).sum()) / x.shape[0]
    return val if math.isfinite(val) else math.inf


# ---------------------------------------------------------------------------
# fitting entry points

def _sample_pacf(x, nlags):
    xc = x - x.mean()
    n = x.shape[0]
    r = np.array([xc[: n - k] @ xc[k:] for k in range(nlags + 1)]) / n
    if r[0] <= 0:
        return np.zeros(nlags)
    pacf = np.zeros(nlags)
    phi = np.zeros(nlags + 1)
    prev = np.zeros(nlags + 1)
    sig = r[0]
    for k in range(1, nlags + 1):
        num = r[k] - sum(prev[j] * r[k - j] for j in range(1, k))
        gk = num / sig if sig > 0 else 0.0
        gk = float(np.clip(gk, -0.95, 0.95))
        pacf[k - 1] = gk
        for j in range(1, k):
            phi[j] = prev[j] - gk * prev[k - j]
        phi[k] = gk
        prev[: k + 1] = phi[: k + 1]
        sig *= 1.0 - gk * gk
    return pacf


def fit_arma(x, p: int, q: int, config: Optional[OptimizerConfig] = None) -> ThetaEstimate:
    """Conditional least squares for an ARMA(p,q) mean with constant variance.

    Minimizes the mean squared filtered residual (the filter runs with unit
    variance); alpha_0 is then the residual variance over the estimation
    window, so theta describes the same homoscedastic model.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[0] < 10 * (p + q + 1):
        raise ValueError(f"insufficient data: need at least {10 * (p + q + 1)} observations")
    if not np.all(np.isfinite(x)):
        raise ValueError("x must be finite")

    unit_alpha = np.ones(1)
    t0 = max(p, q)
    n_win = x.shape[0] - t0
    mean_pre = float(x.mean())

    def objective(z):
        eta, ar, ma = _mean_unpack(p, q, z)
        _, _, resid = _filter_arrays(x, eta, ar, ma, unit_alpha, _EMPTY,
                                     mean_pre, 1.0, 1.0)
        r = resid[t0:]
        val = float(r @ r) / n_win
        return val if math.isfinite(val) else math.inf

    z0 = [mean_pre]
    if p:
        z0 += list(np.arctanh(_sample_pacf(x, p)))
    if q:
        z0 += [0.0] * q
    res = optimize(objective, np.asarray(z0), config)

    eta, ar, ma = _mean_unpack(p, q, res.argmin)
    alpha0 = max(res.value, 1e-300)
    theta = ThetaVector(eta=float(eta), ar=ar, ma=ma, alpha=[alpha0])
    return ThetaEstimate(theta, res.value, res.iterations, res.converged)


def fit_garch(x, P: int, Q: int, config: Optional[OptimizerConfig] = None) -> ThetaEstimate:
    """Gaussian QML for a pure GARCH(P,Q) model with constant mean.

    P lagged variance terms (beta), Q lagged squared-noise terms (alpha).
    """
    x = np.asarray(x, dtype=float)
    if x.shape[0] < 50 * (P + Q + 1):
        raise ValueError(f"insufficient data: need at least {50 * (P + Q + 1)} observations")
    if not np.all(np.isfinite(x)):
        raise ValueError("x must be finite")

    mean_pre = float(x.mean())
    var_pre = float(x.var())
    v0 = max(var_pre, 1e-12)

    def objective(z):
        eta = z[0]
        alpha, beta = _vol_unpack(Q, P, z[1:])
        return _qlik(x, eta, _EMPTY, _EMPTY, alpha, beta, mean_pre, var_pre)

    alpha_init = np.empty(Q + 1)
    alpha_init[1:] = 0.05 / Q if Q else 0.0
    beta_init = np.full(P, 0.8 / P) if P else _EMPTY
    alpha_init[0] = v0 * max(1.0 - alpha_init[1:].sum() - beta_init.sum(), 0.05)
    z0 = np.concatenate([[mean_pre], _vol_pack(alpha_init, beta_init)])
    res = optimize(objective, z0, config)

    alpha, beta = _vol_unpack(Q, P, res.argmin[1:])
    theta = ThetaVector(eta=float(res.argmin[0]), alpha=alpha, beta=beta)
    return ThetaEstimate(theta, res.value, res.iterations, res.converged)


def fit_arma_garch(x, p: int, q: int, P: int, Q: int,
                   config: Optional[OptimizerConfig] = None) -> ThetaEstimate:
    """Joint Gaussian QML for an ARMA(p,q) mean with GARCH(P,Q) noise.

    Initialized in two stages (ARMA by least squares, then GARCH on the ARMA
    residuals) before the joint minimization.  With p = q = 0 this is exactly
    fit_garch.
    """
    if p == 0 and q == 0:
        return fit_garch(x, P, Q, config)
    x = np.asarray(x, dtype=float)
    need = max(10 * (p + q + 1), 50 * (P + Q + 1))
    if x.shape[0] < need:
        raise ValueError(f"insufficient data: need at least {need} observations")

    stage_arma = fit_arma(x, p, q, config)
    t_arma = stage_arma.theta
    _, _, z_resid = _filter_arrays(x, t_arma.eta, t_arma.ar, t_arma.ma,
                                   np.ones(1), _EMPTY, float(x.mean()), 1.0, 1.0)
    stage_garch = fit_garch(z_resid, P, Q, config)

    mean_pre = float(x.mean())
    var_pre = float(x.var())

    def objective(z):
        eta, ar, ma = _mean_unpack(p, q, z)
        alpha, beta = _vol_unpack(Q, P, z[1 + p + q:])
        return _qlik(x, eta, ar, ma, alpha, beta, mean_pre, var_pre)

    z0 = np.concatenate([
        _mean_pack(t_arma.eta, t_arma.ar, t_arma.ma),
        _vol_pack(stage_garch.theta.alpha, stage_garch.theta.beta),
    ])
    res = optimize(objective, z0, config)

    eta, ar, ma = _mean_unpack(p, q, res.argmin)
    alpha, beta = _vol_unpack(Q, P, res.argmin[1 + p + q:])
    theta = ThetaVector(eta=float(eta), ar=ar, ma=ma, alpha=alpha, beta=beta)
    iters = stage_arma.iterations + stage_garch.iterations + res.iterations
    return ThetaEstimate(theta, res.value, iters, res.converged)
