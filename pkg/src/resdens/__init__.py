"""Residual-based marginal density estimation for location-scale time series.

The package simulates and fits AR/ARMA, GARCH, and ARMA-GARCH models, filters
standardized residuals, and estimates the stationary marginal density of the
observed series with a residual-based double-sum kernel estimator whose
pointwise error decays at the parametric rate, alongside the classical
Parzen-Rosenblatt estimator for comparison.
"""

from .version import __version__

from .innovations import (GAUSSIAN, STD_STUDENT_T, STUDENT_T, InnovationSpec,
                          RngStream, sample)
from .innovations import density as innovation_density
from .models import (ARMA, ARMA_GARCH, GARCH, FilterOutput, ModelSpec, Moments,
                     SeriesSample, ThetaVector, check_orders, filter_series,
                     forgetting_diagnostic, simulate, unconditional_moments)
from .fit import (OptimizerConfig, OptimizeResult, ThetaEstimate, fit_arma,
                  fit_arma_garch, fit_garch, negative_gaussian_qlik, optimize)
from .kernels import (BIWEIGHT, DEFAULT_KAPPA, FIXED_RATE, LSCV, QUADRATIC,
                      SILVERMAN, BandwidthRule, adjust_rate, base_bandwidth,
                      kernel_eval, kernel_selfconv, lscv_bandwidth, lscv_scores,
                      rate_window_ok, silverman_bandwidth)
from .density import (ORACLE, PARZEN_ROSENBLATT, RESIDUAL, DensityEstimate,
                      DensityQuery, integrate_estimate, oracle_density,
                      parzen_rosenblatt, residual_density, residual_density_fast)
from .montecarlo import (AR_GARCH_GAUSS, AR_T5, DEFAULT_GRID, GARCH_T5,
                         McReport, RateResult, SETUP_IDS, loglog_slope,
                         rate_regression, run_setup, setup_model, truth_density)

__all__ = [
    "__version__",
    "GAUSSIAN", "STD_STUDENT_T", "STUDENT_T", "InnovationSpec", "RngStream",
    "innovation_density", "sample",
    "ARMA", "ARMA_GARCH", "GARCH", "FilterOutput", "ModelSpec", "Moments",
    "SeriesSample", "ThetaVector", "check_orders", "filter_series",
    "forgetting_diagnostic", "simulate", "unconditional_moments",
    "OptimizerConfig", "OptimizeResult", "ThetaEstimate", "fit_arma",
    "fit_arma_garch", "fit_garch", "negative_gaussian_qlik", "optimize",
    "BIWEIGHT", "DEFAULT_KAPPA", "FIXED_RATE", "LSCV", "QUADRATIC", "SILVERMAN",
    "BandwidthRule", "adjust_rate", "base_bandwidth", "kernel_eval",
    "kernel_selfconv", "lscv_bandwidth", "lscv_scores", "rate_window_ok",
    "silverman_bandwidth",
    "ORACLE", "PARZEN_ROSENBLATT", "RESIDUAL", "DensityEstimate", "DensityQuery",
    "integrate_estimate", "oracle_density", "parzen_rosenblatt",
    "residual_density", "residual_density_fast",
    "AR_GARCH_GAUSS", "AR_T5", "DEFAULT_GRID", "GARCH_T5", "McReport",
    "RateResult", "SETUP_IDS", "loglog_slope", "rate_regression", "run_setup",
    "setup_model", "truth_density",
]
