#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""
run.py
------
Punto di ingresso da riga di comando:

    python3 run.py <config> [--out DIR] [--format json,csv,text] [--depth N] [--tol X]

<config> e' un file TOML oppure il nome di una configurazione inclusa in configs/
(s1-laplacian, t2-laplacian, s1-potential, s1-eta, s1-index, s1-lift).

Codici di uscita: 0 tutti i controlli superati, 1 almeno un controllo fallito,
2 configurazione non valida. ZETALIFT_THREADS (anche da .env) limita il parallelismo.
"""

import argparse
import sys
from typing import List, Optional, Tuple

from config import DEFAULT_OUT_DIR, load_environment
from report import RunReport, emit, parse_formats
from run_config import ConfigError, load_config
from task_manager import run_tasks


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="run", description="Residui, tracce canoniche e zeta sollevate")
    parser.add_argument("config", help="file TOML o nome di una configurazione inclusa")
    parser.add_argument("--out", default=DEFAULT_OUT_DIR, help="cartella di output (default: reports)")
    parser.add_argument("--format", default="json,csv,text", help="sottoinsieme di json,csv,text")
    parser.add_argument("--depth", type=int, default=None, help="profondita' di troncamento N")
    parser.add_argument("--tol", type=float, default=None, help="tolleranza dei controlli")
    return parser


def run(config: str, out: str = DEFAULT_OUT_DIR, formats: str = "json,csv,text",
        depth: Optional[int] = None, tol: Optional[float] = None) -> Tuple[Optional[RunReport], int]:
    """Esegue una configurazione: ritorna (report, codice di uscita)."""
    threads = load_environment()
    try:
        fmts = parse_formats(formats)
        cfg = load_config(config, depth, tol)
    except ConfigError as exc:
        print(f"[ERRORE] Configurazione non valida: {exc}")
        return None, 2
    except ValueError as exc:
        print(f"[ERRORE] {exc}")
        return None, 2

    print(f">>> Configurazione {cfg.name}: {len(cfg.tasks)} task, N = {cfg.depth}, thread = {threads}")
    records = run_tasks(cfg, threads)
    report = RunReport(cfg.name, cfg.depth, cfg.tolerance, records)
    try:
        written = emit(report, fmts, out)
    except OSError as exc:
        print(f"[ERRORE] Scrittura dei risultati fallita: {exc}")
        return report, 1
    for path in written:
        print(f"[INFO] Scritto {path}")
    return report, report.exit_code


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    _, code = run(args.config, args.out, args.format, args.depth, args.tol)
    return code


if __name__ == "__main__":
    sys.exit(main())
