import csv

import numpy as np
import pytest

from resdens import BandwidthRule, McReport, ThetaVector, __version__
from resdens.montecarlo import RateResult
from resdens.report import (config_digest, header_comment, rate_figure,
                            read_series_csv, rmse_figure, write_density_csv,
                            write_fit_csv, write_mc_csv, write_plot_csv,
                            write_rate_csv, write_series_csv)
from resdens import DensityQuery, parzen_rosenblatt


def tiny_report():
    grid = np.linspace(0.0, 5.0, 10)
    return McReport(
        setup="ar_t5", n=100, reps=10, grid=grid,
        truth=0.3 * np.exp(-0.4 * grid) + 0.01,
        rmse_pr=0.5 * (grid + 1.0) ** 0.5 / 10.0,
        rmse_res=0.4 * (grid + 1.0) ** 0.5 / 10.0,
        bandwidth_rule=BandwidthRule(), seed=7)


def tiny_rate():
    return RateResult(
        setup="ar_t5", v=2.0, n_list=(250, 500, 1000),
        slope_pr=-0.41, slope_res=-0.5, stderr_pr=0.03, stderr_res=0.02,
        rmse_pr=np.array([0.3, 0.22, 0.17]),
        rmse_res=np.array([0.25, 0.17, 0.12]), reports=())


def rows_of(path):
    with open(path, newline="") as fh:
        return [r for r in csv.reader(fh) if r and not r[0].startswith("#")]


# ------------------------------------------------------------------- digests

def test_config_digest_is_short_hex_and_stable():
    d = config_digest({"n": 100, "setup": "ar_t5"})
    assert len(d) == 12
    int(d, 16)
    assert d == config_digest({"setup": "ar_t5", "n": 100})


def test_config_digest_distinguishes_values():
    assert config_digest({"n": 100}) != config_digest({"n": 101})


def test_header_comment_format():
    h = header_comment({"n": 100})
    assert h.startswith(f"# resdens {__version__} config=")
    assert len(h.rsplit("=", 1)[1]) == 12


# ---------------------------------------------------------------- series CSV

def test_series_round_trip_is_exact(tmp_path):
    rng = np.random.default_rng(1)
    x = rng.normal(0.0, 1.0, 57)
    path = tmp_path / "series.csv"
    write_series_csv(path, x, header_comment({"n": 57}))
    cols = read_series_csv(path)
    assert set(cols) == {"x"}
    np.testing.assert_array_equal(cols["x"], x)


def test_series_with_truth_columns(tmp_path):
    rng = np.random.default_rng(2)
    x = rng.normal(0.0, 1.0, 20)
    m = rng.normal(0.0, 0.3, 20)
    s = rng.uniform(0.5, 2.0, 20)
    eps = (x - m) / s
    path = tmp_path / "series.csv"
    write_series_csv(path, x, "# test", truth=(m, s, eps))
    cols = read_series_csv(path)
    assert set(cols) == {"x", "m", "sigma", "eps"}
    np.testing.assert_array_equal(cols["m"], m)
    np.testing.assert_array_equal(cols["eps"], eps)


def test_series_reader_skips_comments(tmp_path):
    path = tmp_path / "s.csv"
    path.write_text("# one comment\nx\n1.5\n# inline comment\n2.5\n")
    cols = read_series_csv(path)
    np.testing.assert_array_equal(cols["x"], [1.5, 2.5])


def test_series_reader_errors(tmp_path):
    p1 = tmp_path / "e1.csv"
    p1.write_text("# only a comment\n")
    with pytest.raises(ValueError, match="empty"):
        read_series_csv(p1)
    p2 = tmp_path / "e2.csv"
    p2.write_text("y\n1.0\n")
    with pytest.raises(ValueError, match="'x'"):
        read_series_csv(p2)
    p3 = tmp_path / "e3.csv"
    p3.write_text("x,m\n1.0\n")
    with pytest.raises(ValueError, match="fields"):
        read_series_csv(p3)


# --------------------------------------------------------------- density CSV

def test_density_csv_schema(tmp_path):
    x = np.array([0.0, 0.5, -0.5])
    est = parzen_rosenblatt(x, DensityQuery(np.linspace(-1, 1, 5), 0.7))
    path = tmp_path / "d.csv"
    write_density_csv(path, est, "# test")
    rows = rows_of(path)
    assert rows[0] == ["v", "value", "estimator_tag", "bandwidth", "n"]
    assert len(rows) == 6
    assert rows[1][2] == "pr"
    assert float(rows[1][3]) == 0.7
    assert int(rows[1][4]) == 3


def test_density_csv_multiple_estimates(tmp_path):
    x = np.array([0.0, 0.5, -0.5])
    q = DensityQuery(np.linspace(-1, 1, 4), 0.7)
    est = parzen_rosenblatt(x, q)
    path = tmp_path / "d2.csv"
    write_density_csv(path, [est, est], "# test")
    assert len(rows_of(path)) == 9


# ------------------------------------------------------------------- fit CSV

def test_fit_csv_rows(tmp_path):
    theta = ThetaVector(eta=0.1, ar=[0.5], alpha=[0.2, 0.1], beta=[0.6])
    path = tmp_path / "f.csv"
    write_fit_csv(path, theta, 1.2345, True, 321, "# test")
    rows = rows_of(path)
    names = [r[0] for r in rows]
    assert names == ["parameter", "eta", "ar_1", "alpha_0", "alpha_1",
                     "beta_1", "objective", "converged", "iterations"]
    got = dict(zip(names[1:], (r[1] for r in rows[1:])))
    assert float(got["ar_1"]) == 0.5
    assert float(got["alpha_0"]) == 0.2
    assert got["converged"] == "true"
    assert int(got["iterations"]) == 321


# ----------------------------------------------------------- report CSV trio

def test_mc_csv_schema(tmp_path):
    rep = tiny_report()
    path = tmp_path / "mc.csv"
    write_mc_csv(path, rep, "# test")
    rows = rows_of(path)
    assert rows[0] == ["setup", "n", "v", "f_true", "rmse_pr", "rmse_res",
                       "bandwidth_rule", "kappa", "reps", "excluded", "seed"]
    assert len(rows) == 11
    assert rows[1][0] == "ar_t5"
    assert rows[1][6] == "silverman"
    assert float(rows[1][7]) == pytest.approx(2.0 / 7.0)
    assert rows[1][10] == "7"


def test_plot_csv_schema(tmp_path):
    rep = tiny_report()
    path = tmp_path / "plot.csv"
    write_plot_csv(path, rep, "# test")
    rows = rows_of(path)
    assert rows[0] == ["v", "rmse_pr", "rmse_res"]
    assert len(rows) == 11
    np.testing.assert_array_equal([float(r[1]) for r in rows[1:]], rep.rmse_pr)


def test_rate_csv_schema(tmp_path):
    path = tmp_path / "rate.csv"
    write_rate_csv(path, tiny_rate(), "# test")
    rows = rows_of(path)
    assert rows[0] == ["n", "rmse_pr", "rmse_res"]
    assert [r[0] for r in rows[1:4]] == ["250", "500", "1000"]
    assert rows[4][0] == "slope_pr" and len(rows[4]) == 3
    assert rows[5][0] == "slope_res"
    assert float(rows[5][1]) == -0.5


def test_csv_files_start_with_comment(tmp_path):
    path = tmp_path / "mc.csv"
    write_mc_csv(path, tiny_report(), header_comment({"a": 1}))
    first = path.read_text().splitlines()[0]
    assert first.startswith("# resdens ")


# -------------------------------------------------------------------- figures

def test_rmse_figure_renders_png(tmp_path):
    path = tmp_path / "fig.png"
    rmse_figure(tiny_report(), path)
    data = path.read_bytes()
    assert data[:4] == b"\x89PNG"
    assert len(data) > 5000


def test_rate_figure_renders_png(tmp_path):
    path = tmp_path / "rate.png"
    rate_figure(tiny_rate(), path)
    data = path.read_bytes()
    assert data[:4] == b"\x89PNG"
    assert len(data) > 5000
