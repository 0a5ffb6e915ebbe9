"""Delimited output, input parsing, and figure rendering for reports.

Every CSV written here starts with a comment line carrying the tool version
and a hash of the effective configuration, so a report file identifies the
run that produced it.  Readers skip lines starting with '#'.
"""

from __future__ import annotations

import csv
import hashlib

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .density import DensityEstimate
from .montecarlo import McReport, RateResult
from .version import __version__


def config_digest(config: dict) -> str:
    """Short stable hash of a flat configuration mapping."""
    lines = [f"{k}={config[k]}" for k in sorted(config)]
    return hashlib.sha256("\n".join(lines).encode()).hexdigest()[:12]


def header_comment(config: dict) -> str:
    return f"# resdens {__version__} config={config_digest(config)}"


def _fmt(x) -> str:
    # repr of a Python float is the shortest round-trip form, so files are
    # byte-stable across runs
    return repr(float(x))


def _open_writer(path, comment: str):
    fh = open(path, "w", newline="")
    fh.write(comment + "\n")
    return fh, csv.writer(fh, lineterminator="\n")


def write_series_csv(path, x, comment: str, truth=None) -> None:
    """Write a series as CSV with header x, or x,m,sigma,eps with truth columns.

    truth, when given, is a (mean, volatility, innovation) triple of arrays
    aligned with x.
    """
    x = np.asarray(x, dtype=float)
    fh, w = _open_writer(path, comment)
    try:
        if truth is None:
            w.writerow(["x"])
            for xi in x:
                w.writerow([_fmt(xi)])
        else:
            m, s, eps = truth
            w.writerow(["x", "m", "sigma", "eps"])
            for xi, mi, si, ei in zip(x, m, s, eps):
                w.writerow([_fmt(xi), _fmt(mi), _fmt(si), _fmt(ei)])
    finally:
        fh.close()


def read_series_csv(path) -> dict:
    """Read a series CSV into a dict of float arrays keyed by column name."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh)
                if r and not r[0].lstrip().startswith("#")]
    if not rows:
        raise ValueError(f"{path}: empty series file")
    header = [c.strip() for c in rows[0]]
    if "x" not in header:
        raise ValueError(f"{path}: missing required column 'x'")
    cols = {name: [] for name in header}
    for r in rows[1:]:
        if len(r) != len(header):
            raise ValueError(f"{path}: row has {len(r)} fields, expected {len(header)}")
        for name, val in zip(header, r):
            cols[name].append(float(val))
    return {name: np.asarray(vals) for name, vals in cols.items()}


def write_density_csv(path, estimates, comment: str) -> None:
    """Write one or more density estimates as rows of a single CSV."""
    if isinstance(estimates, DensityEstimate):
        estimates = [estimates]
    fh, w = _open_writer(path, comment)
    try:
        w.writerow(["v", "value", "estimator_tag", "bandwidth", "n"])
        for est in estimates:
            for v, val in zip(est.grid, est.values):
                w.writerow([_fmt(v), _fmt(val), est.estimator_tag,
                            _fmt(est.bandwidth), est.n])
    finally:
        fh.close()


def write_fit_csv(path, theta, objective_value, converged, iterations,
                  comment: str) -> None:
    fh, w = _open_writer(path, comment)
    try:
        w.writerow(["parameter", "value"])
        w.writerow(["eta", _fmt(theta.eta)])
        for i, a in enumerate(theta.ar, start=1):
            w.writerow([f"ar_{i}", _fmt(a)])
        for i, b in enumerate(theta.ma, start=1):
            w.writerow([f"ma_{i}", _fmt(b)])
        for i, a in enumerate(theta.alpha):
            w.writerow([f"alpha_{i}", _fmt(a)])
        for i, b in enumerate(theta.beta, start=1):
            w.writerow([f"beta_{i}", _fmt(b)])
        w.writerow(["objective", _fmt(objective_value)])
        w.writerow(["converged", str(bool(converged)).lower()])
        w.writerow(["iterations", int(iterations)])
    finally:
        fh.close()


def write_mc_csv(path, report: McReport, comment: str) -> None:
    """One row per grid point with both normalized RMSE columns."""
    rule = report.bandwidth_rule
    fh, w = _open_writer(path, comment)
    try:
        w.writerow(["setup", "n", "v", "f_true", "rmse_pr", "rmse_res",
                    "bandwidth_rule", "kappa", "reps", "excluded", "seed"])
        for v, ft, rp, rr in zip(report.grid, report.truth,
                                 report.rmse_pr, report.rmse_res):
            w.writerow([report.setup, report.n, _fmt(v), _fmt(ft), _fmt(rp),
                        _fmt(rr), rule.selector, _fmt(rule.kappa),
                        report.reps, report.excluded, report.seed])
    finally:
        fh.close()


def write_plot_csv(path, report: McReport, comment: str) -> None:
    """Companion plot data: v against each estimator's normalized RMSE."""
    fh, w = _open_writer(path, comment)
    try:
        w.writerow(["v", "rmse_pr", "rmse_res"])
        for v, rp, rr in zip(report.grid, report.rmse_pr, report.rmse_res):
            w.writerow([_fmt(v), _fmt(rp), _fmt(rr)])
    finally:
        fh.close()


def write_rate_csv(path, result: RateResult, comment: str) -> None:
    fh, w = _open_writer(path, comment)
    try:
        w.writerow(["n", "rmse_pr", "rmse_res"])
        for n, rp, rr in zip(result.n_list, result.rmse_pr, result.rmse_res):
            w.writerow([n, _fmt(rp), _fmt(rr)])
        w.writerow(["slope_pr", _fmt(result.slope_pr), _fmt(result.stderr_pr)])
        w.writerow(["slope_res", _fmt(result.slope_res), _fmt(result.stderr_res)])
    finally:
        fh.close()


def rmse_figure(report: McReport, path) -> None:
    """Render the normalized RMSE comparison to an image file."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.plot(report.grid, report.rmse_pr, "o-", color="tab:blue",
            label="classical")
    ax.plot(report.grid, report.rmse_res, "s-", color="tab:red",
            label="residual-based")
    ax.set_xlabel("v")
    ax.set_ylabel("normalized RMSE")
    ax.set_title(f"{report.setup}, n={report.n}, reps={report.reps}, "
                 f"rule={report.bandwidth_rule.selector}")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def rate_figure(result: RateResult, path) -> None:
    """Render the log-log RMSE decay with fitted slopes to an image file."""
    n = np.asarray(result.n_list, dtype=float)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for rmse, slope, color, label in (
            (result.rmse_pr, result.slope_pr, "tab:blue", "classical"),
            (result.rmse_res, result.slope_res, "tab:red", "residual-based")):
        ax.loglog(n, rmse, "o", color=color)
        anchor = np.exp(np.log(rmse).mean() - slope * np.log(n).mean())
        ax.loglog(n, anchor * n ** slope, "-", color=color,
                  label=f"{label}: slope {slope:.3f}")
    ax.set_xlabel("n")
    ax.set_ylabel(f"normalized RMSE at v={result.v:g}")
    ax.set_title(f"{result.setup}: empirical convergence rates")
    ax.legend()
    ax.grid(True, which="both", alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
