"""
test_report.py
Modello del report, emissione JSON / CSV e codici di uscita di run.py.
"""

import json
import os

import numpy as np
import pandas as pd
import pytest

import run
from config import REPORT_JSON, SUMMARY_CSV, load_environment
from report import RunReport, emit, load_report, parse_formats, summary_frame, to_jsonable


def _records():
    ok = {
        "index": 0, "kind": "zeta", "label": "zeta[lap]", "family": "lap", "status": "pass",
        "passed": True, "symbolic": complex(1.5, -0.25), "oracle": complex(1.5, 0.0),
        "discrepancy": 0.25, "tolerance": 1e-9, "bound": 1e-12, "provenance": "test",
        "details": {"residuo": complex(0.0, 2.0), "nota": "ok"},
        "series": [{"z": 0.5, "re": 1.0, "im": 0.0}, {"z": 1.0, "re": 2.0, "im": 0.0}],
        "message": "", "elapsed_s": 0.01,
    }
    ko = dict(ok, index=1, kind="kv-check", status="fail", passed=False, series=[], details={})
    return [ok, ko]


# ==============================
#  MODELLO
# ==============================

def test_run_report_counts_and_exit_code():
    report = RunReport("prova", 3, 1e-9, _records())
    assert report.passed == 1 and report.failed == 1
    assert report.exit_code == 1
    assert report.summary_line() == "1 passed / 1 failed"
    assert RunReport("vuoto", 3, 1e-9).exit_code == 0


def test_to_jsonable_converts_numeric_types():
    out = to_jsonable({"c": complex(1, -2), "f": np.float64(0.5), "i": np.int64(3),
                       "b": np.bool_(True), "t": (1, 2), "o": object})
    assert out["c"] == [1.0, -2.0]
    assert out["f"] == 0.5 and out["i"] == 3 and out["b"] is True
    assert out["t"] == [1, 2]
    assert isinstance(out["o"], str)
    json.dumps(out)


def test_summary_frame_has_one_row_per_task():
    df = summary_frame(RunReport("prova", 3, 1e-9, _records()))
    assert list(df["kind"]) == ["zeta", "kv-check"]
    assert df.loc[0, "symbolic"] == "1.5-0.25j"
    assert df.loc[0, "oracle"] == "1.5"


# ==============================
#  EMISSIONE
# ==============================

def test_json_report_reloads_complex_values(tmp_path):
    report = RunReport("prova", 3, 1e-9, _records())
    (path,) = emit(report, ["json"], str(tmp_path))
    assert os.path.basename(path) == REPORT_JSON
    back = load_report(path)
    assert back.config == "prova" and back.depth == 3
    assert back.records[0]["symbolic"] == complex(1.5, -0.25)
    assert back.records[0]["details"]["residuo"] == complex(0.0, 2.0)
    assert back.records[0]["details"]["nota"] == "ok"
    assert back.passed == 1 and back.failed == 1


def test_csv_summary_and_series(tmp_path):
    report = RunReport("prova", 3, 1e-9, _records())
    paths = emit(report, ["csv"], str(tmp_path))
    names = sorted(os.path.basename(p) for p in paths)
    assert names == sorted([SUMMARY_CSV, "series_0_zeta.csv"])
    summary = pd.read_csv(tmp_path / SUMMARY_CSV)
    assert len(summary) == 2
    assert "elapsed_s" not in summary.columns
    series = pd.read_csv(tmp_path / "series_0_zeta.csv")
    assert list(series["re"]) == [1.0, 2.0]


def test_text_only_writes_nothing(tmp_path, capsys):
    out_dir = tmp_path / "nuova"
    assert emit(RunReport("prova", 3, 1e-9, _records()), ["text"], str(out_dir)) == []
    assert not out_dir.exists()
    assert "1 passed / 1 failed" in capsys.readouterr().out


def test_parse_formats():
    assert parse_formats("json, CSV") == ["json", "csv"]
    assert parse_formats(None)
    with pytest.raises(ValueError):
        parse_formats("json,xml")


# ==============================
#  RIGA DI COMANDO
# ==============================

def _write(tmp_path, text, name="conf.toml"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return str(path)


def test_run_with_empty_task_list(tmp_path):
    conf = _write(tmp_path, '[weights.lap]\nsymbol = "xi**2 + 1"\n')
    report, code = run.run(conf, out=str(tmp_path / "out"), formats="json")
    assert code == 0
    assert report.records == []
    assert (tmp_path / "out" / REPORT_JSON).exists()


def test_run_rejects_large_epsilon(tmp_path):
    conf = _write(tmp_path, '[geometry]\ndim = 1\nperiod = "2*pi"\nepsilon = "pi"\n')
    report, code = run.run(conf, out=str(tmp_path), formats="json")
    assert report is None
    assert code == 2


def test_run_rejects_unknown_format(tmp_path):
    conf = _write(tmp_path, '[weights.lap]\nsymbol = "xi**2 + 1"\n')
    assert run.run(conf, out=str(tmp_path), formats="xml") == (None, 2)


def test_main_returns_exit_code(tmp_path):
    conf = _write(tmp_path, '[weights.lap]\nsymbol = "xi**2 + 1"\n')
    assert run.main([conf, "--out", str(tmp_path), "--format", "json", "--depth", "2"]) == 0
    data = json.loads((tmp_path / REPORT_JSON).read_text(encoding="utf-8"))
    assert data["depth"] == 2


# ==============================
#  AMBIENTE
# ==============================

@pytest.mark.parametrize("raw, expected", [("4", 4), ("0", 1), ("molti", 1)])
def test_load_environment_threads(monkeypatch, raw, expected):
    monkeypatch.setenv("ZETALIFT_THREADS", raw)
    assert load_environment() == expected
