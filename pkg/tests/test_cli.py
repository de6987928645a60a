import csv
import io
import json

import pytest

from zerohopf.cli import EXAMPLES, SweepSpec, _parse_symbol, main, sweep


@pytest.fixture()
def ex1_config(tmp_path):
    path = tmp_path / "ex1.json"
    path.write_text(json.dumps(EXAMPLES[1].config))
    return str(path)


@pytest.fixture()
def ex2_config(tmp_path):
    path = tmp_path / "ex2.json"
    path.write_text(json.dumps(EXAMPLES[2].config))
    return str(path)


def test_predict_command(ex1_config, capsys):
    rc = main(["--config", ex1_config, "predict"])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    assert out["neimark_sacker"]["ell1"] == pytest.approx(-6403 * 3.141592653589793 / 1040, rel=1e-9)
    assert out["prediction"]["mu_hat_1"] == pytest.approx(535.0 / 134.0, rel=1e-10)


def test_family_check_failure_exits_3(tmp_path, capsys):
    cfg = dict(EXAMPLES[1].config)
    cfg["family"] = "H1"            # wrong family for these coefficients
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(cfg))
    rc = main(["--config", str(path), "predict"])
    assert rc == 3


def test_verify_command_central_orbit(ex2_config, capsys):
    rc = main(["--config", ex2_config, "verify", "--eps", "0.04",
               "--target", "central"])
    assert rc == 0
    out = json.loads(capsys.readouterr().out)
    assert out["residual"] <= 1e-9
    assert out["stability"] == "stable"


def test_g_command_emits_grid_csv(ex1_config, capsys):
    rc = main(["--config", ex1_config, "g", "--family", "THM1",
               "--order", "1", "--grid", "0.5:1.5:3,-0.5:0.5:3"])
    assert rc == 0
    rows = list(csv.reader(io.StringIO(capsys.readouterr().out)))
    assert rows[0] == ["r", "z", "g1", "g2"]
    assert len(rows) == 1 + 9


def test_sweep_command_predict(ex1_config, capsys):
    rc = main(["--config", ex1_config, "sweep", "--symbol", "mu1",
               "--range", "3.5:4.5:4", "--analysis", "predict"])
    assert rc == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert len(rows) == 4
    assert all(row["error"] == "" for row in rows)
    assert "delta_a" in rows[0]


def test_example_command_writes_artifacts(tmp_path, capsys):
    rc = main(["--out-dir", str(tmp_path), "example", "5"])
    assert rc == 0
    report = json.loads((tmp_path / "example5.json").read_text())
    assert report["status"] == "ok"
    csvs = list(tmp_path.glob("example5_orbit*_section.csv"))
    assert len(csvs) == 1


def test_sweep_spec_and_symbol_validation():
    with pytest.raises(ValueError):
        SweepSpec(symbol="mu1", lo=1.0, hi=0.5, count=3)
    with pytest.raises(ValueError):
        SweepSpec(symbol="mu1", lo=0.0, hi=1.0, count=1)
    assert _parse_symbol("alpha2") == ("alpha", 2)
    assert _parse_symbol("nu0") == ("nu", 0)
    with pytest.raises(ValueError):
        _parse_symbol("gamma1")


def test_sweep_rows_carry_errors_instead_of_raising():
    p = EXAMPLES[1].params()
    rows = sweep(SweepSpec(symbol="mu1", lo=-1.0, hi=4.0, count=3,
                           analysis="predict"), p, "THM1")
    assert len(rows) == 3
    assert any(row["error"] == "" for row in rows)


def test_run_example_rejects_unknown_id():
    from zerohopf.cli import run_example
    with pytest.raises(ValueError):
        run_example(9)
