"""Command-line front end.

Every command is a thin adapter over the library: flags (or a config file
section named after the command, with flags taking precedence) are parsed
into library types, the library does the work, and results are written as
CSV files plus, for the report commands, a rendered figure.

Exit status: 0 success, 2 usage or validation error, 3 I/O error, 4 internal.
"""

from __future__ import annotations

import argparse
import configparser
import os
import re
import sys
from fractions import Fraction

import numpy as np

from . import report
from .density import (ORACLE, PARZEN_ROSENBLATT, RESIDUAL, DensityQuery,
                      oracle_density, parzen_rosenblatt, residual_density_fast)
from .fit import fit_arma, fit_arma_garch, fit_garch
from .innovations import (GAUSSIAN, STD_STUDENT_T, STUDENT_T, InnovationSpec,
                          RngStream)
from .kernels import (BIWEIGHT, DEFAULT_KAPPA, FIXED_RATE, LSCV, QUADRATIC,
                      SILVERMAN, BandwidthRule, adjust_rate, base_bandwidth)
from .models import (ARMA, ARMA_GARCH, GARCH, ModelSpec, SeriesSample,
                     ThetaVector, filter_series, simulate)
from .montecarlo import (DEFAULT_GRID, SETUP_IDS, rate_regression, run_setup,
                         setup_model)

_ESTIMATORS = (PARZEN_ROSENBLATT, RESIDUAL, ORACLE)
_FAMILIES = (ARMA, GARCH, ARMA_GARCH)


def _parse_floats(text):
    try:
        return [float(tok) for tok in str(text).split(",") if tok.strip()]
    except ValueError:
        raise ValueError(f"expected a comma-separated list of numbers, got {text!r}")


def _parse_ints(text):
    return [int(tok) for tok in str(text).split(",") if tok.strip()]


def _parse_grid(text):
    """Either 'start:stop:count' or a comma-separated list of points."""
    text = str(text)
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid must be start:stop:count, got {text!r}")
        return np.linspace(float(parts[0]), float(parts[1]), int(parts[2]))
    return np.asarray(_parse_floats(text))


def _parse_kappa(text):
    """Accept a fraction like 2/7 or a decimal."""
    return float(Fraction(str(text)))


def _parse_innov(text):
    text = str(text).strip().lower()
    if text in ("gauss", "gaussian", "normal"):
        return InnovationSpec(GAUSSIAN)
    m = re.fullmatch(r"(std_)?t(\d+(?:\.\d+)?)", text)
    if m:
        family = STD_STUDENT_T if m.group(1) else STUDENT_T
        return InnovationSpec(family, float(m.group(2)))
    raise ValueError(f"unknown innovation {text!r}; use gauss, t<dof>, or std_t<dof>")


def _parse_bool(text):
    text = str(text).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {text!r}")


def _default_threads() -> int:
    env = os.environ.get("RESDENS_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _load_section(path, section):
    parser = configparser.ConfigParser()
    with open(path) as fh:
        parser.read_file(fh)
    if parser.has_section(section):
        return dict(parser.items(section))
    return {}


def _merge(args, option_spec):
    """Resolve each option: flag value, else config-file value, else default."""
    cfg = _load_section(args.config, args.command) if args.config else {}
    eff = {}
    for name, cast, default in option_spec:
        value = getattr(args, name)
        if value is None and name in cfg:
            try:
                value = cast(cfg[name]) if cast else cfg[name]
            except ValueError as exc:
                raise ValueError(f"config field '{name}': {exc}")
        if value is None:
            value = default
        eff[name] = value
    return eff


def _cfg_str(value) -> str:
    if isinstance(value, InnovationSpec):
        return f"{value.family}:{value.dof:g}"
    if isinstance(value, np.ndarray):
        return ",".join(repr(float(v)) for v in value)
    if isinstance(value, (list, tuple)):
        return ",".join(str(v) for v in value)
    return str(value)


def _comment(command, eff) -> str:
    # paths and worker counts do not affect computed content, so they stay
    # out of the hash and identical runs match byte-for-byte anywhere
    digest_cfg = {"command": command}
    digest_cfg.update({k: _cfg_str(v) for k, v in eff.items()
                       if k not in ("out", "input", "threads")})
    return report.header_comment(digest_cfg)


def _effective_seed(seed) -> int:
    if seed is None:
        seed = int.from_bytes(os.urandom(4), "big")
    print(f"seed: {seed}")
    return int(seed)


def _require(eff, name):
    if eff[name] is None:
        raise ValueError(f"missing required option --{name.replace('_', '-')}")
    return eff[name]


def _resolve_model(eff):
    """Model spec and parameters from --setup, --garch shorthand, or parts."""
    if eff.get("setup"):
        return setup_model(eff["setup"])
    innov = eff["innov"]
    if eff.get("garch"):
        vals = eff["garch"]
        if len(vals) != 3:
            raise ValueError("--garch expects alpha_0,alpha_1,beta_1")
        return (ModelSpec(GARCH, garch_p=1, garch_q=1, innovation=innov),
                ThetaVector(eta=eff["eta"], alpha=vals[:2], beta=vals[2:]))
    ar = eff.get("ar") or []
    ma = eff.get("ma") or []
    alpha = eff.get("alpha") or [1.0]
    beta = eff.get("beta") or []
    has_mean = bool(ar) or bool(ma)
    has_vol = len(alpha) > 1 or bool(beta)
    if has_mean and has_vol:
        family = ARMA_GARCH
    elif has_vol:
        family = GARCH
    else:
        family = ARMA
    spec = ModelSpec(family, p=len(ar), q=len(ma), garch_p=len(beta),
                     garch_q=len(alpha) - 1, innovation=innov)
    return spec, ThetaVector(eta=eff["eta"], ar=ar, ma=ma, alpha=alpha, beta=beta)


def _bandwidth_rule(eff) -> BandwidthRule:
    return BandwidthRule(selector=eff["rule"], kappa=eff["kappa"],
                         fixed_constant=eff["fixed_const"])


_MODEL_OPTIONS = [
    ("setup", str, None),
    ("garch", _parse_floats, None),
    ("eta", float, 0.0),
    ("ar", _parse_floats, None),
    ("ma", _parse_floats, None),
    ("alpha", _parse_floats, None),
    ("beta", _parse_floats, None),
    ("innov", _parse_innov, InnovationSpec(GAUSSIAN)),
]

_RULE_OPTIONS = [
    ("rule", str, SILVERMAN),
    ("kappa", _parse_kappa, DEFAULT_KAPPA),
    ("fixed_const", float, 1.0),
    ("kernel", str, QUADRATIC),
]


def _add_options(sub, option_spec, flags):
    for name, cast, _default in option_spec:
        flag = "--" + name.replace("_", "-")
        if name in flags:
            sub.add_argument(flag, type=cast, default=None, help=flags[name])


def cmd_simulate(args) -> int:
    spec_list = _MODEL_OPTIONS + [
        ("n", int, None), ("seed", int, None), ("burn_in", int, 1000),
        ("keep_truth", _parse_bool, False), ("out", str, None),
    ]
    eff = _merge(args, spec_list)
    spec, theta = _resolve_model(eff)
    n = int(_require(eff, "n"))
    out = _require(eff, "out")
    eff["seed"] = _effective_seed(eff["seed"])
    sim = simulate(spec, theta, n, RngStream(eff["seed"], 0),
                   burn_in=int(eff["burn_in"]))
    truth = (sim.true_mean, sim.true_vol, sim.true_innov) if eff["keep_truth"] else None
    report.write_series_csv(out, sim.x, _comment("simulate", eff), truth)
    print(f"wrote {out} ({n} rows)")
    return 0


def _fit_dispatch(x, eff):
    family = eff["model"]
    if family not in _FAMILIES:
        raise ValueError(f"unknown model family {family!r}")
    if family == ARMA:
        return fit_arma(x, int(eff["p"]), int(eff["q"])), ARMA
    if family == GARCH:
        return fit_garch(x, int(eff["garch_p"]), int(eff["garch_q"])), GARCH
    return fit_arma_garch(x, int(eff["p"]), int(eff["q"]),
                          int(eff["garch_p"]), int(eff["garch_q"])), ARMA_GARCH


def _print_theta(theta, objective, converged, iterations) -> None:
    print(f"eta = {float(theta.eta)!r}")
    for i, a in enumerate(theta.ar, start=1):
        print(f"ar_{i} = {float(a)!r}")
    for i, b in enumerate(theta.ma, start=1):
        print(f"ma_{i} = {float(b)!r}")
    for i, a in enumerate(theta.alpha):
        print(f"alpha_{i} = {float(a)!r}")
    for i, b in enumerate(theta.beta, start=1):
        print(f"beta_{i} = {float(b)!r}")
    print(f"objective = {float(objective)!r}")
    print(f"converged = {str(bool(converged)).lower()}")
    print(f"iterations = {iterations}")


def cmd_fit(args) -> int:
    spec_list = [
        ("input", str, None), ("model", str, ARMA),
        ("p", int, 1), ("q", int, 0),
        ("garch_p", int, 1), ("garch_q", int, 1),
        ("out", str, None),
    ]
    eff = _merge(args, spec_list)
    path = _require(eff, "input")
    x = report.read_series_csv(path)["x"]
    est, _family = _fit_dispatch(x, eff)
    _print_theta(est.theta, est.objective_value, est.converged, est.iterations)
    if eff["out"]:
        report.write_fit_csv(eff["out"], est.theta, est.objective_value,
                             est.converged, est.iterations,
                             _comment("fit", eff))
        print(f"wrote {eff['out']}")
    return 0


def cmd_density(args) -> int:
    spec_list = _MODEL_OPTIONS + _RULE_OPTIONS + [
        ("input", str, None), ("n", int, None), ("seed", int, None),
        ("estimator", str, RESIDUAL), ("grid", _parse_grid, DEFAULT_GRID),
        ("model", str, None), ("p", int, 1), ("q", int, 0),
        ("garch_p", int, 1), ("garch_q", int, 1),
        ("out", str, None),
    ]
    eff = _merge(args, spec_list)
    estimator = eff["estimator"]
    if estimator not in _ESTIMATORS:
        raise ValueError(f"unknown estimator {estimator!r}; use one of {_ESTIMATORS}")
    out = _require(eff, "out")
    grid = np.asarray(eff["grid"], dtype=float)
    rule = _bandwidth_rule(eff)
    kernel = eff["kernel"]

    sim = None
    if eff["input"]:
        cols = report.read_series_csv(eff["input"])
        x = cols["x"]
        if estimator == ORACLE:
            missing = [c for c in ("m", "sigma", "eps") if c not in cols]
            if missing:
                raise ValueError(
                    "oracle estimator needs true-path columns m, sigma, eps "
                    f"(missing: {', '.join(missing)}); simulate with --keep-truth")
            sim = SeriesSample(x, cols["m"], cols["sigma"], cols["eps"],
                               ThetaVector(eta=0.0), ModelSpec(ARMA))
    else:
        n = int(_require(eff, "n"))
        model_spec, theta = _resolve_model(eff)
        eff["seed"] = _effective_seed(eff["seed"])
        sim = simulate(model_spec, theta, n, RngStream(eff["seed"], 0))
        x = sim.x
        if eff["model"] is None:
            eff["model"] = model_spec.family
            eff["p"], eff["q"] = model_spec.p, model_spec.q
            eff["garch_p"], eff["garch_q"] = model_spec.garch_p, model_spec.garch_q

    b_base = base_bandwidth(x, rule, kernel)
    if estimator == PARZEN_ROSENBLATT:
        est = parzen_rosenblatt(x, DensityQuery(grid, b_base, kernel))
    else:
        b = adjust_rate(b_base, x.size, rule.kappa)
        query = DensityQuery(grid, b, kernel)
        if estimator == ORACLE:
            est = oracle_density(sim, query, fast=True)
        else:
            if eff["model"] is None:
                raise ValueError("residual estimator on --input data needs --model "
                                 "(and orders) to fit")
            fit_est, family = _fit_dispatch(x, eff)
            fit_spec = ModelSpec(family,
                                 p=fit_est.theta.ar.size, q=fit_est.theta.ma.size,
                                 garch_p=fit_est.theta.beta.size,
                                 garch_q=fit_est.theta.alpha.size - 1)
            fo = filter_series(fit_spec, fit_est.theta, x)
            est = residual_density_fast(fo, query)
            if not fit_est.converged:
                print("warning: fit did not converge; estimate uses best point found",
                      file=sys.stderr)
    report.write_density_csv(out, est, _comment("density", eff))
    print(f"wrote {out} ({grid.size} rows, bandwidth {est.bandwidth!r})")
    return 0


def cmd_mc(args) -> int:
    spec_list = _RULE_OPTIONS + [
        ("setup", str, None), ("n", int, 100), ("reps", int, 1000),
        ("seed", int, None), ("grid", _parse_grid, DEFAULT_GRID),
        ("truth_n", int, 500_000), ("threads", int, None), ("out", str, None),
    ]
    eff = _merge(args, spec_list)
    setup = _require(eff, "setup")
    if setup not in SETUP_IDS:
        raise ValueError(f"unknown setup id {setup!r}; use one of {SETUP_IDS}")
    eff["seed"] = _effective_seed(eff["seed"])
    threads = int(eff["threads"]) if eff["threads"] is not None else _default_threads()
    rep = run_setup(setup, int(eff["n"]), int(eff["reps"]),
                    _bandwidth_rule(eff), eff["seed"],
                    grid=np.asarray(eff["grid"], dtype=float),
                    kernel=eff["kernel"], truth_n=int(eff["truth_n"]),
                    threads=threads)
    out = eff["out"] or f"mc_{setup}_n{eff['n']}"
    eff.pop("threads")  # output does not depend on it
    comment = _comment("mc", eff)
    report.write_mc_csv(f"{out}.csv", rep, comment)
    report.write_plot_csv(f"{out}_plot.csv", rep, comment)
    report.rmse_figure(rep, f"{out}.png")

    print(f"setup={rep.setup} n={rep.n} reps={rep.reps} "
          f"rule={rep.bandwidth_rule.selector} kappa={rep.bandwidth_rule.kappa:g} "
          f"excluded={rep.excluded}")
    print(f"{'v':>8} {'f_true':>10} {'rmse_pr':>10} {'rmse_res':>10}")
    for v, ft, rp, rr in zip(rep.grid, rep.truth, rep.rmse_pr, rep.rmse_res):
        print(f"{v:8.3f} {ft:10.6f} {rp:10.6f} {rr:10.6f}")
    print(f"wrote {out}.csv, {out}_plot.csv, {out}.png")
    return 0


def cmd_rate(args) -> int:
    spec_list = _RULE_OPTIONS + [
        ("setup", str, "ar_t5"), ("v", float, 2.0),
        ("n_list", _parse_ints, [250, 500, 1000, 2000]),
        ("reps", int, 500), ("seed", int, None),
        ("truth_n", int, 500_000), ("threads", int, None), ("out", str, None),
    ]
    eff = _merge(args, spec_list)
    eff["seed"] = _effective_seed(eff["seed"])
    threads = int(eff["threads"]) if eff["threads"] is not None else _default_threads()
    result = rate_regression(eff["setup"], float(eff["v"]), eff["n_list"],
                             int(eff["reps"]), _bandwidth_rule(eff),
                             eff["seed"], kernel=eff["kernel"],
                             truth_n=int(eff["truth_n"]), threads=threads)
    print(f"setup={result.setup} v={result.v:g} n={list(result.n_list)} "
          f"reps={eff['reps']}")
    print(f"slope_pr  = {result.slope_pr:.4f} (se {result.stderr_pr:.4f})")
    print(f"slope_res = {result.slope_res:.4f} (se {result.stderr_res:.4f})")
    if eff["out"]:
        eff.pop("threads")
        comment = _comment("rate", eff)
        report.write_rate_csv(f"{eff['out']}.csv", result, comment)
        report.rate_figure(result, f"{eff['out']}.png")
        print(f"wrote {eff['out']}.csv, {eff['out']}.png")
    return 0


_HELP = {
    "setup": "built-in setup id (ar_t5, garch_t5, ar_garch_gauss)",
    "garch": "GARCH(1,1) shorthand alpha_0,alpha_1,beta_1",
    "eta": "location parameter (default 0)",
    "ar": "AR coefficients, comma-separated",
    "ma": "MA coefficients, comma-separated",
    "alpha": "variance coefficients alpha_0,alpha_1,.. (default 1.0)",
    "beta": "lagged-variance coefficients, comma-separated",
    "innov": "innovation law: gauss, t<dof>, or std_t<dof>",
    "n": "sample size",
    "seed": "RNG seed (omitted: drawn at random and printed)",
    "burn_in": "pre-sample steps discarded before the kept path (default 1000)",
    "keep_truth": "also write true m, sigma, eps columns (true/false)",
    "out": "output path (mc/rate: prefix for .csv/.png files)",
    "input": "input series CSV (column x)",
    "model": "family to fit: arma, garch, arma_garch",
    "p": "AR order (default 1)",
    "q": "MA order (default 0)",
    "garch_p": "lagged-variance order (default 1)",
    "garch_q": "squared-noise order (default 1)",
    "estimator": "pr, residual, or oracle",
    "grid": "evaluation grid start:stop:count or v1,v2,.. (default 0:5:10)",
    "rule": "base bandwidth rule: silverman, lscv, fixed",
    "kappa": "rate exponent, fraction or decimal (default 2/7)",
    "fixed_const": "constant C for the fixed rule b = C*n^(-1/5)",
    "kernel": "quadratic or biweight",
    "reps": "Monte Carlo replications",
    "truth_n": "long-simulation length for the truth values",
    "threads": "worker processes (default: all cores, or RESDENS_THREADS)",
    "v": "evaluation point for the rate check",
    "n_list": "comma-separated sample sizes (need >= 3 distinct)",
}

_COMMANDS = {
    "simulate": (cmd_simulate, "simulate a series to CSV"),
    "fit": (cmd_fit, "fit a model to a series CSV"),
    "density": (cmd_density, "estimate a density curve to CSV"),
    "mc": (cmd_mc, "run a Monte Carlo RMSE report"),
    "rate": (cmd_rate, "empirical convergence-rate check"),
}

_COMMAND_OPTIONS = {
    "simulate": [s[0] for s in _MODEL_OPTIONS] + [
        "n", "seed", "burn_in", "keep_truth", "out"],
    "fit": ["input", "model", "p", "q", "garch_p", "garch_q", "out"],
    "density": [s[0] for s in _MODEL_OPTIONS] + [s[0] for s in _RULE_OPTIONS] + [
        "input", "n", "seed", "estimator", "grid",
        "model", "p", "q", "garch_p", "garch_q", "out"],
    "mc": [s[0] for s in _RULE_OPTIONS] + [
        "setup", "n", "reps", "seed", "grid", "truth_n", "threads", "out"],
    "rate": [s[0] for s in _RULE_OPTIONS] + [
        "setup", "v", "n_list", "reps", "seed", "truth_n", "threads", "out"],
}

_CASTS = {name: cast for name, cast, _d in
          _MODEL_OPTIONS + _RULE_OPTIONS + [
              ("n", int, None), ("seed", int, None), ("burn_in", int, None),
              ("keep_truth", _parse_bool, None), ("out", str, None),
              ("input", str, None), ("model", str, None), ("p", int, None),
              ("q", int, None), ("garch_p", int, None), ("garch_q", int, None),
              ("estimator", str, None), ("grid", _parse_grid, None),
              ("reps", int, None), ("truth_n", int, None),
              ("threads", int, None), ("v", float, None),
              ("n_list", _parse_ints, None)]}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="resdens",
        description="Residual-based marginal density estimation for "
                    "location-scale time series")
    subs = parser.add_subparsers(dest="command", required=True)
    for name, (_handler, help_text) in _COMMANDS.items():
        sub = subs.add_parser(name, help=help_text)
        sub.add_argument("--config", type=str, default=None,
                         help=f"config file with a [{name}] section; flags override")
        for opt in _COMMAND_OPTIONS[name]:
            flag = "--" + opt.replace("-", "_").replace("_", "-")
            if opt == "keep_truth":
                sub.add_argument("--keep-truth", dest="keep_truth",
                                 action="store_const", const=True, default=None,
                                 help=_HELP[opt])
            else:
                sub.add_argument(flag, dest=opt, type=_CASTS[opt], default=None,
                                 help=_HELP[opt])
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        handler, _help = _COMMANDS[args.command]
        return handler(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
