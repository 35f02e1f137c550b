"""
report.py
Modello del report di esecuzione e sua emissione:
- tabella testuale su stdout (pandas)
- report.json con tutti i record (numeri complessi come [re, im])
- summary.csv (una riga per task) e series_<indice>_<tipo>.csv per le serie numeriche

load_report rilegge il JSON nel modello.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Sequence

import numpy as np
import pandas as pd

from config import DEFAULT_FORMATS, REPORT_JSON, SUMMARY_CSV


FORMATS = ("text", "json", "csv")

SUMMARY_COLUMNS = [
    "index", "kind", "label", "family", "status", "symbolic", "oracle",
    "discrepancy", "tolerance", "bound", "provenance", "elapsed_s", "message",
]


@dataclass
class RunReport:
    config: str
    depth: int
    tolerance: float
    records: List[Dict[str, Any]] = field(default_factory=list)

    @property
    def passed(self) -> int:
        return sum(1 for r in self.records if r.get("passed"))

    @property
    def failed(self) -> int:
        return len(self.records) - self.passed

    @property
    def exit_code(self) -> int:
        return 0 if self.failed == 0 else 1

    def summary_line(self) -> str:
        return f"{self.passed} passed / {self.failed} failed"


# ==============================
#  SERIALIZZAZIONE
# ==============================

def to_jsonable(value: Any) -> Any:
    """complex -> [re, im]; numpy / sympy -> tipi Python."""
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    return str(value)


def _from_pair(value: Any) -> Any:
    if isinstance(value, list) and len(value) == 2 and all(isinstance(v, (int, float)) for v in value):
        return complex(value[0], value[1])
    return value


def report_to_dict(report: RunReport) -> Dict[str, Any]:
    return {
        "config": report.config,
        "depth": report.depth,
        "tolerance": report.tolerance,
        "passed": report.passed,
        "failed": report.failed,
        "records": to_jsonable(report.records),
    }


def load_report(path: str) -> RunReport:
    """Rilegge report.json: i campi complessi tornano complex."""
    with open(path, "r", encoding="utf-8") as f:
        data = json.load(f)
    records = []
    for r in data.get("records", []):
        rec = dict(r)
        for key in ("symbolic", "oracle"):
            rec[key] = _from_pair(rec.get(key))
        rec["details"] = {k: _from_pair(v) for k, v in rec.get("details", {}).items()}
        records.append(rec)
    return RunReport(data["config"], int(data["depth"]), float(data["tolerance"]), records)


# ==============================
#  EMISSIONE
# ==============================

def _fmt(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, complex):
        if abs(value.imag) < 1e-14:
            return f"{value.real:.12g}"
        return f"{value.real:.12g}{value.imag:+.12g}j"
    if isinstance(value, float):
        return f"{value:.3e}"
    return str(value)


def summary_frame(report: RunReport) -> pd.DataFrame:
    rows = []
    for r in report.records:
        rows.append({col: _fmt(r.get(col)) if col in ("symbolic", "oracle", "discrepancy", "tolerance", "bound")
                     else r.get(col) for col in SUMMARY_COLUMNS})
    return pd.DataFrame(rows, columns=SUMMARY_COLUMNS)


def print_report(report: RunReport) -> None:
    print(f"\n=== REPORT {report.config} (N = {report.depth}, tol = {report.tolerance:g}) ===")
    if report.records:
        df = summary_frame(report).drop(columns=["elapsed_s", "message", "provenance"])
        print(df.to_string(index=False))
    for r in report.records:
        if r.get("status") == "error":
            print(f"[ERRORE] Task {r['index']} ({r['kind']}): {r.get('message', '')}")
    print(f"\n{report.summary_line()}")


def write_json(report: RunReport, out_dir: str) -> str:
    path = os.path.join(out_dir, REPORT_JSON)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(report_to_dict(report), f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def write_csv(report: RunReport, out_dir: str) -> List[str]:
    paths = []
    summary = os.path.join(out_dir, SUMMARY_CSV)
    summary_frame(report).drop(columns=["elapsed_s"]).to_csv(summary, index=False)
    paths.append(summary)
    for r in report.records:
        series = r.get("series") or []
        if not series:
            continue
        path = os.path.join(out_dir, f"series_{r['index']}_{r['kind']}.csv")
        pd.DataFrame(to_jsonable(series)).to_csv(path, index=False)
        paths.append(path)
    return paths


def parse_formats(raw: str | Sequence[str] | None) -> List[str]:
    if raw is None:
        return list(DEFAULT_FORMATS)
    items = raw.split(",") if isinstance(raw, str) else list(raw)
    out = [s.strip().lower() for s in items if s.strip()]
    for s in out:
        if s not in FORMATS:
            raise ValueError(f"Formato di output sconosciuto: {s!r} (ammessi {FORMATS})")
    return out


def emit(report: RunReport, formats: Iterable[str] = DEFAULT_FORMATS, out_dir: str = ".") -> List[str]:
    """Scrive il report nei formati richiesti; ritorna i file creati."""
    formats = parse_formats(list(formats))
    written: List[str] = []
    if "json" in formats or "csv" in formats:
        os.makedirs(out_dir, exist_ok=True)
    if "text" in formats:
        print_report(report)
    if "json" in formats:
        written.append(write_json(report, out_dir))
    if "csv" in formats:
        written.extend(write_csv(report, out_dir))
    return written
