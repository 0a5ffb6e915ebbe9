"""Compact-support kernels and bandwidth selection.

Two kernels on [-1, 1]: the quadratic (Epanechnikov) kernel used by default
and the biweight kernel, which is continuously differentiable on all of R.
Base bandwidths come from Silverman's rule, least-squares cross-validation,
or a fixed constant times n^(-1/5); `adjust_rate` then undersmoothes a base
bandwidth to the n^(-kappa) rate the residual density estimator needs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

QUADRATIC = "quadratic"
BIWEIGHT = "biweight"

_KERNELS = (QUADRATIC, BIWEIGHT)

SILVERMAN = "silverman"
LSCV = "lscv"
FIXED_RATE = "fixed"

_SELECTORS = (SILVERMAN, LSCV, FIXED_RATE)

DEFAULT_KAPPA = 2.0 / 7.0

# self-convolution (K*K)(t) of the biweight kernel on [0, 2], highest degree first
_BIWEIGHT_CONV = np.array([
    -5.0 / 3584.0, 0.0, 15.0 / 448.0, 0.0, -15.0 / 32.0,
    15.0 / 16.0, 0.0, -15.0 / 14.0, 0.0, 5.0 / 7.0,
])


def _check_kernel(kind):
    if kind not in _KERNELS:
        raise ValueError(f"unknown kernel {kind!r}")


def kernel_eval(u, kind: str = QUADRATIC) -> np.ndarray:
    """Kernel value at u, vectorized; zero outside [-1, 1]."""
    _check_kernel(kind)
    u = np.asarray(u, dtype=float)
    out = np.zeros_like(u)
    mask = np.abs(u) <= 1.0
    if kind == QUADRATIC:
        out[mask] = 0.75 * (1.0 - u[mask] ** 2)
    else:
        out[mask] = (15.0 / 16.0) * (1.0 - u[mask] ** 2) ** 2
    return out


def kernel_selfconv(t, kind: str = QUADRATIC) -> np.ndarray:
    """(K*K)(t), the kernel's convolution with itself; zero outside [-2, 2]."""
    _check_kernel(kind)
    t = np.abs(np.asarray(t, dtype=float))
    out = np.zeros_like(t)
    mask = t <= 2.0
    tm = t[mask]
    if kind == QUADRATIC:
        out[mask] = (3.0 / 160.0) * (2.0 - tm) ** 3 * (tm**2 + 6.0 * tm + 4.0)
    else:
        out[mask] = np.polyval(_BIWEIGHT_CONV, tm)
    return out


@dataclass(frozen=True)
class BandwidthRule:
    """Base-bandwidth selector plus the undersmoothing exponent kappa.

    fixed_constant only matters for the "fixed" selector, whose base
    bandwidth is fixed_constant * n^(-1/5).
    """

    selector: str = SILVERMAN
    kappa: float = DEFAULT_KAPPA
    fixed_constant: float = 1.0

    def __post_init__(self):
        if self.selector not in _SELECTORS:
            raise ValueError(f"unknown bandwidth selector {self.selector!r}")
        if not (0.2 < self.kappa < 0.5):
            raise ValueError("kappa must lie strictly between 1/5 and 1/2")
        if not self.fixed_constant > 0:
            raise ValueError("fixed_constant must be positive")


def _spread(x):
    x = np.asarray(x, dtype=float)
    if x.size < 2:
        raise ValueError("need at least 2 observations")
    sd = float(x.std(ddof=1))
    q75, q25 = np.percentile(x, [75.0, 25.0])
    return x, sd, float(q75 - q25)


def silverman_bandwidth(x) -> float:
    """0.9 * min(sd, IQR/1.34) * n^(-1/5), with sd as fallback for zero IQR."""
    x, sd, iqr = _spread(x)
    lo = min(sd, iqr / 1.34)
    if lo == 0.0:
        lo = sd
    if lo <= 0.0:
        raise ValueError("degenerate data: zero spread")
    return 0.9 * lo * x.size ** (-0.2)


def default_lscv_grid(x, num: int = 40) -> np.ndarray:
    """Geometric grid of `num` bandwidths spanning [0.05, 2] * sd(x)."""
    _, sd, _ = _spread(x)
    if sd <= 0.0:
        raise ValueError("degenerate data: zero spread")
    return sd * np.geomspace(0.05, 2.0, num)


def lscv_scores(x, kind: str = QUADRATIC, grid=None) -> tuple[np.ndarray, np.ndarray]:
    """Least-squares cross-validation score at each grid bandwidth.

    LSCV(b) = int f_hat_b^2 - (2/n) sum_i f_hat_{b,-i}(X_i), evaluated with
    the closed-form kernel self-convolution (no numerical quadrature).
    Returns (grid, scores).
    """
    _check_kernel(kind)
    x = np.asarray(x, dtype=float)
    n = x.size
    if n < 2:
        raise ValueError("need at least 2 observations")
    if grid is None:
        grid = default_lscv_grid(x)
    grid = np.asarray(grid, dtype=float)
    if grid.size == 0 or np.any(grid <= 0) or not np.all(np.isfinite(grid)):
        raise ValueError("bandwidth grid must be positive and finite")

    diffs = np.abs(x[:, None] - x[None, :])
    k0 = float(kernel_eval(0.0, kind))
    scores = np.empty(grid.size)
    for idx, b in enumerate(grid):
        t = diffs / b
        conv_sum = kernel_selfconv(t, kind).sum()
        loo_sum = kernel_eval(t, kind).sum() - n * k0
        scores[idx] = conv_sum / (n * n * b) - 2.0 * loo_sum / (n * (n - 1) * b)
    return grid, scores


def lscv_bandwidth(x, kind: str = QUADRATIC, grid=None) -> float:
    """Grid argmin of the cross-validation score."""
    grid, scores = lscv_scores(x, kind, grid)
    return float(grid[int(np.argmin(scores))])


def adjust_rate(b_base: float, n: int, kappa: float = DEFAULT_KAPPA) -> float:
    """Move a base bandwidth from the n^(-1/5) rate to the n^(-kappa) rate."""
    if not b_base > 0:
        raise ValueError("b_base must be positive")
    if n < 1:
        raise ValueError("n must be >= 1")
    if not (0.2 < kappa < 0.5):
        raise ValueError("kappa must lie strictly between 1/5 and 1/2")
    return b_base * n ** (0.2 - kappa)


def base_bandwidth(x, rule: BandwidthRule, kind: str = QUADRATIC) -> float:
    """Base bandwidth for the rule: Silverman, LSCV, or fixed * n^(-1/5)."""
    x = np.asarray(x, dtype=float)
    if rule.selector == SILVERMAN:
        return silverman_bandwidth(x)
    if rule.selector == LSCV:
        return lscv_bandwidth(x, kind)
    return rule.fixed_constant * x.size ** (-0.2)


def rate_window_ok(kappa, delta) -> bool:
    """Exact check of the bandwidth-rate window 4*kappa > 1 and (3+delta)*kappa < 1.

    With b of order n^(-kappa) these are n*b^4 -> 0 and n*b^(3+delta) -> inf.
    Accepts ints, Fractions, or strings like "2/7" for exact arithmetic.
    """
    k = Fraction(kappa)
    d = Fraction(delta)
    return 4 * k > 1 and (3 + d) * k < 1
