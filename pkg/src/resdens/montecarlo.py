"""Monte Carlo benchmark: normalized RMSE of the two estimators.

Three built-in setups, each a model plus true parameter point:

  * ar_t5           AR(1) with coefficient 0.5 and raw Student-t(5) noise
  * garch_t5        GARCH(1,1) with (alpha_0, alpha_1, beta_1) = (0.1, 0.1, 0.8)
                    and standardized t(5) innovations (unit variance)
  * ar_garch_gauss  AR(1) coefficient 0.5 whose noise is that GARCH(1,1)
                    process with standard Gaussian innovations

For each replication the harness simulates a sample, selects a base
bandwidth on the data, evaluates the classical estimator with it, fits the
model, filters, evaluates the residual estimator with the rate-adjusted
bandwidth, and accumulates squared errors against a long-simulation plug-in
truth.  Reported RMSE values are normalized by the truth at each grid point.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .density import DensityQuery, parzen_rosenblatt, residual_density_fast
from .fit import OptimizerConfig, ThetaEstimate, fit_arma, fit_arma_garch, fit_garch
from .innovations import GAUSSIAN, STD_STUDENT_T, STUDENT_T, InnovationSpec, RngStream, density
from .kernels import QUADRATIC, BandwidthRule, adjust_rate, base_bandwidth
from .models import (ARMA, ARMA_GARCH, GARCH, ModelSpec, ThetaVector,
                     filter_series, simulate)

AR_T5 = "ar_t5"
GARCH_T5 = "garch_t5"
AR_GARCH_GAUSS = "ar_garch_gauss"

SETUP_IDS = (AR_T5, GARCH_T5, AR_GARCH_GAUSS)

DEFAULT_GRID = np.linspace(0.0, 5.0, 10)
DEFAULT_TRUTH_N = 500_000

# replications use stream ids below this; truth simulation sits above them
TRUTH_STREAM_ID = 2**32

# seed behind the shipped reference reports; reports with other seeds are
# equally valid, this one pins the regression baseline
REFERENCE_SEED = 20260819

_SETUP_NOTES = {
    AR_GARCH_GAUSS: ("the sixth moment of the GARCH noise is not guaranteed "
                     "finite at these parameters; root-n guarantees for the "
                     "residual estimator may not apply"),
}


def setup_model(setup) -> tuple[ModelSpec, ThetaVector]:
    """Model and true parameters for a setup id, or pass through a custom pair."""
    if isinstance(setup, tuple):
        spec, theta = setup
        return spec, theta
    if setup == AR_T5:
        return (ModelSpec(ARMA, p=1, innovation=InnovationSpec(STUDENT_T, 5.0)),
                ThetaVector(eta=0.0, ar=[0.5], alpha=[1.0]))
    if setup == GARCH_T5:
        return (ModelSpec(GARCH, garch_p=1, garch_q=1,
                          innovation=InnovationSpec(STD_STUDENT_T, 5.0)),
                ThetaVector(eta=0.0, alpha=[0.1, 0.1], beta=[0.8]))
    if setup == AR_GARCH_GAUSS:
        return (ModelSpec(ARMA_GARCH, p=1, garch_p=1, garch_q=1,
                          innovation=InnovationSpec(GAUSSIAN)),
                ThetaVector(eta=0.0, ar=[0.5], alpha=[0.1, 0.1], beta=[0.8]))
    raise ValueError(f"unknown setup {setup!r}")


@dataclass(frozen=True)
class McReport:
    setup: str
    n: int
    reps: int
    grid: np.ndarray
    truth: np.ndarray
    rmse_pr: np.ndarray
    rmse_res: np.ndarray
    bandwidth_rule: BandwidthRule
    seed: int
    excluded: int = 0
    excluded_ids: tuple = ()
    meta: dict = field(default_factory=dict)
    per_rep_sq_pr: Optional[np.ndarray] = None
    per_rep_sq_res: Optional[np.ndarray] = None


def truth_density(setup, v, N: int = DEFAULT_TRUTH_N, stream: RngStream = None):
    """Plug-in marginal density from one long simulated path of (m_t, sigma_t).

    f_X(v) is approximated by (1/N) sum_i f_eps((v - m_i)/sigma_i)/sigma_i.
    Accepts a scalar or a vector of evaluation points.
    """
    if N < 10_000:
        raise ValueError("N must be at least 10^4 for a stable truth value")
    if stream is None:
        raise ValueError("truth_density needs an explicit RngStream")
    spec, theta = setup_model(setup)
    sim = simulate(spec, theta, N, stream, burn_in=1000)
    m, s = sim.true_mean, sim.true_vol
    v_arr = np.atleast_1d(np.asarray(v, dtype=float))
    out = np.empty(v_arr.size)
    for i, point in enumerate(v_arr):
        out[i] = float(np.mean(density(spec.innovation, (point - m) / s) / s))
    return float(out[0]) if np.isscalar(v) or np.asarray(v).ndim == 0 else out


def _fit_for(spec: ModelSpec, x, config: Optional[OptimizerConfig]) -> ThetaEstimate:
    if spec.family == ARMA:
        return fit_arma(x, spec.p, spec.q, config)
    if spec.family == GARCH:
        return fit_garch(x, spec.garch_p, spec.garch_q, config)
    return fit_arma_garch(x, spec.p, spec.q, spec.garch_p, spec.garch_q, config)


def _one_replication(task):
    (setup, n, rule, kernel, grid, seed, stream_id, fit_config) = task
    spec, theta = setup_model(setup)
    sim = simulate(spec, theta, n, RngStream(seed, stream_id))
    x = sim.x
    b_base = base_bandwidth(x, rule, kernel)
    pr = parzen_rosenblatt(x, DensityQuery(grid, b_base, kernel))
    est = _fit_for(spec, x, fit_config)
    if not est.converged:
        return stream_id, None, None
    fo = filter_series(spec, est.theta, x)
    b_res = adjust_rate(b_base, x.size, rule.kappa)
    res = residual_density_fast(fo, DensityQuery(grid, b_res, kernel))
    return stream_id, pr.values, res.values


def run_setup(setup, n: int, reps: int = 1000,
              rule: BandwidthRule = BandwidthRule(),
              seed: int = 0, *, grid=None, kernel: str = QUADRATIC,
              truth_n: int = DEFAULT_TRUTH_N, truth: Optional[np.ndarray] = None,
              threads: int = 1, stream_offset: int = 0,
              fit_config: Optional[OptimizerConfig] = None,
              keep_per_rep: bool = False) -> McReport:
    """Normalized-RMSE comparison of the two estimators over seeded replications.

    Replication r draws from stream (seed, stream_offset + r), so reports are
    reproducible bit-for-bit for a given configuration regardless of the
    worker count.  Replications whose fit does not converge are excluded from
    both estimators' averages and counted in the report.
    """
    if reps < 2:
        raise ValueError("reps must be >= 2")
    grid = DEFAULT_GRID if grid is None else np.asarray(grid, dtype=float)
    if truth is None:
        truth = truth_density(setup, grid, truth_n, RngStream(seed, TRUTH_STREAM_ID))
    truth = np.atleast_1d(np.asarray(truth, dtype=float))

    tasks = [(setup, n, rule, kernel, grid, seed, stream_offset + r, fit_config)
             for r in range(reps)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_one_replication, tasks, chunksize=8))
    else:
        results = [_one_replication(t) for t in tasks]

    sq_pr, sq_res, excluded_ids = [], [], []
    for stream_id, pr_vals, res_vals in results:
        if pr_vals is None:
            excluded_ids.append(stream_id - stream_offset)
            continue
        sq_pr.append((pr_vals - truth) ** 2)
        sq_res.append((res_vals - truth) ** 2)
    if not sq_pr:
        raise RuntimeError("all replications were excluded; no RMSE to report")
    sq_pr = np.asarray(sq_pr)
    sq_res = np.asarray(sq_res)
    rmse_pr = np.sqrt(sq_pr.mean(axis=0)) / truth
    rmse_res = np.sqrt(sq_res.mean(axis=0)) / truth

    spec, _ = setup_model(setup)
    meta = {
        "kernel": kernel,
        "innovation": (spec.innovation.family, spec.innovation.dof),
        "truth_n": truth_n,
        "truth_stream_id": TRUTH_STREAM_ID,
        "stream_offset": stream_offset,
    }
    setup_name = setup if isinstance(setup, str) else "custom"
    if setup_name in _SETUP_NOTES:
        meta["moment_note"] = _SETUP_NOTES[setup_name]
    excluded = len(excluded_ids)
    if excluded > 0.1 * reps:
        msg = f"{excluded} of {reps} replications excluded (fit non-convergence)"
        meta["exclusion_warning"] = msg
        warnings.warn(msg)
    return McReport(
        setup=setup_name, n=n, reps=reps, grid=grid, truth=truth,
        rmse_pr=rmse_pr, rmse_res=rmse_res, bandwidth_rule=rule, seed=seed,
        excluded=excluded, excluded_ids=tuple(excluded_ids), meta=meta,
        per_rep_sq_pr=sq_pr if keep_per_rep else None,
        per_rep_sq_res=sq_res if keep_per_rep else None,
    )


def loglog_slope(n_values, y_values) -> tuple[float, float]:
    """Least-squares slope of log y against log n, with its standard error."""
    ln = np.log(np.asarray(n_values, dtype=float))
    ly = np.log(np.asarray(y_values, dtype=float))
    if ln.size < 3:
        raise ValueError("need at least 3 points for a slope with a standard error")
    slope, intercept = np.polyfit(ln, ly, 1)
    resid = ly - (slope * ln + intercept)
    dof = ln.size - 2
    denom = float(((ln - ln.mean()) ** 2).sum())
    se = math.sqrt(float(resid @ resid) / dof / denom) if dof > 0 else 0.0
    return float(slope), se


@dataclass(frozen=True)
class RateResult:
    setup: str
    v: float
    n_list: tuple
    slope_pr: float
    slope_res: float
    stderr_pr: float
    stderr_res: float
    rmse_pr: np.ndarray
    rmse_res: np.ndarray
    reports: tuple


def rate_regression(setup, v: float, n_list, reps: int = 500,
                    rule: BandwidthRule = BandwidthRule(), seed: int = 0,
                    *, kernel: str = QUADRATIC, truth_n: int = DEFAULT_TRUTH_N,
                    threads: int = 1,
                    fit_config: Optional[OptimizerConfig] = None) -> RateResult:
    """Empirical convergence-rate slopes of both estimators at one point.

    Runs run_setup at each sample size (duplicate sizes are collapsed with a
    warning; at least 3 distinct sizes are required) and regresses log RMSE
    on log n.
    """
    sizes = []
    for n in n_list:
        n = int(n)
        if n in sizes:
            warnings.warn(f"duplicate sample size {n} collapsed")
        else:
            sizes.append(n)
    if len(sizes) < 3:
        raise ValueError("need at least 3 distinct sample sizes")

    truth = truth_density(setup, np.array([float(v)]), truth_n,
                          RngStream(seed, TRUTH_STREAM_ID))
    reports = []
    for idx, n in enumerate(sizes):
        reports.append(run_setup(
            setup, n, reps, rule, seed, grid=np.array([float(v)]),
            kernel=kernel, truth=truth, threads=threads,
            stream_offset=idx * 10_000_000, fit_config=fit_config))
    rmse_pr = np.array([r.rmse_pr[0] for r in reports])
    rmse_res = np.array([r.rmse_res[0] for r in reports])
    slope_pr, se_pr = loglog_slope(sizes, rmse_pr)
    slope_res, se_res = loglog_slope(sizes, rmse_res)
    return RateResult(
        setup=setup if isinstance(setup, str) else "custom", v=float(v),
        n_list=tuple(sizes), slope_pr=slope_pr, slope_res=slope_res,
        stderr_pr=se_pr, stderr_res=se_res, rmse_pr=rmse_pr,
        rmse_res=rmse_res, reports=tuple(reports))
