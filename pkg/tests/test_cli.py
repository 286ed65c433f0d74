import json

import pytest

from aggfield import cli

CONFIG = """
[regime]
kind = "independent"

[law]
variant = "Independent"
H1 = 0.75
H2 = 0.7

[run]
n1 = [8, 16]
replicates = 6
seed = 3
pairs = [[[1.0, 1.0], [1.0, 1.0]]]
"""


@pytest.fixture
def config(tmp_path):
    path = tmp_path / "c.toml"
    path.write_text(CONFIG)
    return path


def test_simulate_flags_before_and_after(config, tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.main(["--seed", "11", "--output", str(a), "simulate", str(config)]) == 0
    assert cli.main(["simulate", str(config), "--seed", "11", "--threads", "2", "-o", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["metadata"]["seed"] == 11


def test_csv_by_suffix_and_report_conversion(config, tmp_path, capsys):
    out = tmp_path / "r.csv"
    assert cli.main(["simulate", str(config), "-o", str(out)]) == 0
    assert out.read_text().startswith("n1,n2,m,")
    js = tmp_path / "r.json"
    cli.main(["simulate", str(config), "-o", str(js)])
    capsys.readouterr()
    assert cli.main(["report", str(js), "--format", "csv"]) == 0
    assert capsys.readouterr().out == out.read_text()


def test_theory_and_table(config, capsys):
    assert cli.main(["theory", str(config)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["H"] == [0.75, 0.7]
    assert doc["pairs"][0]["effective"] == doc["pairs"][0]["stated"]
    assert cli.main(["table", str(config)]) == 0
    assert json.loads(capsys.readouterr().out)["kind"] == "convergence_table"


def test_validate_exit_code(capsys):
    assert cli.main(["validate", "--only", "atom_mass", "normalizations"]) == 0
    assert "2/2 checks passed" in capsys.readouterr().out


def test_errors_exit_2(tmp_path, capsys):
    assert cli.main(["simulate", str(tmp_path / "missing.toml")]) == 2
    assert "error" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        cli.main(["simulate"])
