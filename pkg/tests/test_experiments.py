import json
import math

import numpy as np
import pytest

from aggfield.errors import ConfigError
from aggfield.experiments import config as cfg, report as rp, runner, validation
from aggfield import theory as th

BASE = {
    "regime": {"kind": "critical"},
    "law": {"variant": "Dependent", "alpha1": 1.0, "alpha2": 1.0,
            "angular": {"variant": "PointMass", "w1": 0.5}},
    "run": {"n1": [8, 16], "replicates": 20, "seed": 5,
            "pairs": [[[1.0, 1.0], [1.0, 1.0]], [[0.5, 1.0], [1.0, 0.5]]]},
}


def _config(**run):
    d = json.loads(json.dumps(BASE))
    d["run"].update(run)
    return cfg.config_from_dict(d)


def test_config_gates():
    with pytest.raises(ConfigError):
        _config(m_factor=2.0)
    with pytest.raises(ConfigError):
        _config(n1=[])
    with pytest.raises(ConfigError):
        _config(replicates=0)
    with pytest.raises(ConfigError):
        _config(theory="guess")
    with pytest.raises(ConfigError, match="lattice point"):
        _config(n1=[4], pairs=[[[0.1, 1.0], [1.0, 1.0]]])
    with pytest.raises(ConfigError):
        _config(pairs=[[[1.5, 1.0], [1.0, 1.0]]])
    with pytest.raises(ConfigError, match="missing"):
        cfg.config_from_dict({"regime": {"kind": "critical"}})


def test_config_defaults_round_trip_and_m():
    c = _config()
    assert c.m_for((16, 16)) == 64
    assert c.grid() == [(1.0, 1.0), (0.5, 1.0), (1.0, 0.5)]
    assert cfg.config_from_dict(c.to_dict()) == c
    assert _config(m=7).m_for((16, 16)) == 7
    assert c.with_seed(9).master_seed == 9


def test_load_config_errors(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text("[regime\nkind=")
    with pytest.raises(ConfigError):
        cfg.load_config(bad)
    with pytest.raises(ConfigError):
        cfg.load_config(tmp_path / "missing.toml")


def test_replicate_seeds_distinct():
    seeds = {runner.replicate_seed(1, r) for r in range(1000)}
    assert len(seeds) == 1000
    assert runner.replicate_seed(1, 0) != runner.replicate_seed(2, 0)


def test_gaussianity_standard_errors():
    g = runner.gaussianity(np.random.default_rng(0).standard_normal(400))
    N = 400
    ses = math.sqrt(6 * N * (N - 1) / ((N - 2) * (N + 1) * (N + 3)))
    assert g["skewness_se"] == pytest.approx(ses, rel=1e-12)
    assert g["excess_kurtosis_se"] == pytest.approx(
        2 * ses * math.sqrt((N * N - 1) / ((N - 3) * (N + 5))), rel=1e-12)
    # large-N limits sqrt(6/N) and sqrt(24/N)
    assert g["skewness_se"] == pytest.approx(math.sqrt(6 / N), rel=0.01)
    assert g["excess_kurtosis_se"] == pytest.approx(math.sqrt(24 / N), rel=0.02)
    with pytest.raises(ConfigError):
        runner.gaussianity([1.0, 2.0])


def test_mc_run_columns_and_theory():
    report = runner.run_mc_experiment(_config())
    assert report.kind == "monte_carlo" and len(report.rows) == 4
    row = report.rows[0]
    assert set(rp.CSV_COLUMNS) <= set(row)
    assert row["theory"] == pytest.approx(1.1817258, rel=1e-3)
    assert row["ratio"] == pytest.approx(row["estimate"] / row["theory"])
    assert "skewness" in row and "skewness" not in report.rows[1]
    assert "wall_clock_seconds" not in report.metadata
    assert report.metadata["hurst"] == [None, None]


def test_mc_run_matches_exact_within_noise():
    report = runner.run_mc_experiment(_config(n1=[16], replicates=300))
    for row in report.rows:
        assert abs(row["estimate"] - row["exact"]) < 4 * row["stderr"]


def test_stated_theory_and_timing():
    d = json.loads(json.dumps(BASE))
    d["regime"] = {"kind": "noncritical_i", "gamma": 0.4}
    d["law"]["alpha1"] = 1.5
    d["run"].update(n1=[64], theory="stated", replicates=4)
    c = cfg.config_from_dict(d)
    report = runner.run_mc_experiment(c, timing=True)
    assert report.metadata["wall_clock_seconds"] >= 0
    assert report.rows[0]["theory"] == pytest.approx(report.metadata["sigma2_stated"]
                                                     * th.fbs_cov(0.5, report.metadata["hurst"][1],
                                                                  (1, 1), (1, 1)))


def test_convergence_table():
    report = runner.run_convergence_table(_config(n1=[16, 32, 64]))
    rows = [r for r in report.rows if (r["s1"], r["s2"]) == (1.0, 1.0)]
    assert math.isnan(rows[0]["error_ratio"])
    assert all(0 < r["error_ratio"] < 1 for r in rows[1:])
    with pytest.raises(ConfigError):
        runner.run_convergence_table(_config(n1=[16]).__class__(
            **{**_config(n1=[16]).__dict__, "tolerances": {"exact_max_n": 8}}))


def test_report_round_trips(tmp_path):
    report = runner.run_mc_experiment(_config(replicates=5))
    path = tmp_path / "r.json"
    rp.emit_report(report, path, "json")
    back = rp.load_report(path)
    assert rp.to_json(back) == rp.to_json(report)
    path = tmp_path / "r.csv"
    rp.emit_report(report, path, "csv")
    rows = rp.load_report(path)
    assert [r["n1"] for r in rows] == [r["n1"] for r in report.rows]
    assert rows[0]["theory"] == report.rows[0]["theory"]


def test_empty_report_csv_is_header_only():
    text = rp.to_csv(rp.CovReport("monte_carlo"))
    assert text == ",".join(rp.CSV_COLUMNS) + "\n"
    assert rp.parse_csv(text) == []


def test_report_errors(tmp_path):
    with pytest.raises(rp.ReportError):
        rp.parse_csv("a,b\n1,2\n")
    with pytest.raises(rp.ReportError):
        rp.CovReport.from_dict({"format_version": 99, "kind": "x", "rows": []})
    with pytest.raises(rp.ReportError):
        rp.emit_report(rp.CovReport("x"), tmp_path / "no" / "dir.json")
    with pytest.raises(rp.ReportError):
        rp.emit_report(rp.CovReport("x"), tmp_path / "a.xml", "xml")
    (tmp_path / "junk.json").write_text("{")
    with pytest.raises(rp.ReportError):
        rp.load_report(tmp_path / "junk.json")


def test_nan_stored_as_null():
    report = rp.CovReport("monte_carlo", [{"n1": 1, "exact": math.nan}])
    assert json.loads(rp.to_json(report))["rows"][0]["exact"] is None
    assert math.isnan(rp.CovReport.from_dict(report.to_dict()).rows[0]["exact"])


def test_validation_suite_passes_and_catches_canary():
    report = validation.run_validation_suite()
    assert report.passed, list(report.lines())
    bad = validation.run_validation_suite(
        overrides={"c_frak": lambda H: 1.01 * th.c_frak(H)},
        only=["c_frak_example", "c_frak_identity"])
    assert [r.passed for r in bad.results] == [False, False]
    with pytest.raises(ValueError):
        validation.run_validation_suite("sloppy")
