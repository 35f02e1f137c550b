"""
config.py
Configurazione centrale per il motore di calcolo simbolico (zetalift).
Qui puoi cambiare facilmente:
- profondita' di troncamento di default dei simboli
- tolleranze dei controlli (esatti, oracolo, Poisson, matrice di Fourier)
- cutoff degli oracoli spettrali (reticolo, matrice, Euler-Maclaurin)
- parametri di default del rivestimento (epsilon di localita', epsilon spettrale)
- cartelle e formati di output dei report
"""

import os
from typing import Tuple

from dotenv import load_dotenv


# === TRONCAMENTO SIMBOLI ===
# Numero di componenti omogenee tenute in ogni simbolo (default CLI N = 6)
DEFAULT_DEPTH = 6


# === TOLLERANZE ===
# Famiglie calcolate in aritmetica esatta (KV / PS / indice)
TOL_EXACT = 1e-10

# Confronti con gli oracoli speciali (Hurwitz, Epstein, Bessel)
TOL_ORACLE = 1e-8

# Consistenza di Poisson (traccia discreta = TR + parte fuori diagonale)
TOL_POISSON = 1e-6

# Oracolo a matrice di Fourier (K = 512 con raddoppio)
TOL_MATRIX = 1e-4

# Identita' theta (traccia del calore sul toro vs rivestimento)
TOL_THETA = 1e-12


# === ORACOLI SPETTRALI ===
# Precisione di lavoro di mpmath (cifre decimali)
MPMATH_DPS = 30

# Termini di Bernoulli nella formula di Euler-Maclaurin
EM_BERNOULLI_TERMS = 8

# Numero minimo di termini sommati esplicitamente prima della coda di Euler-Maclaurin
EM_MIN_TERMS = 30

# Cutoff |k|_inf del reticolo nella decomposizione theta di Epstein
LATTICE_CUTOFF = 6

# Cutoff K della matrice di Fourier di Delta + V (autovalori in [-K, K])
MATRIX_CUTOFF = 512

# Numero di traslazioni reticolari sommate esplicitamente prima della coda asintotica
TRANSLATE_CUTOFF = 200

# Ordine massimo della coda asintotica sulle traslazioni
TAIL_TERMS = 8


# === RIVESTIMENTO ===
# Epsilon di localita' di default = frazione del periodo (eps = L/4 < L/2)
LOCALITY_EPS_FRACTION = 0.25

# Epsilon spettrale della deformazione Q_eps (sotto il primo autovalore non nullo)
DEFAULT_SPECTRAL_EPS = 0.25


# === OUTPUT ===
DEFAULT_OUT_DIR = "reports"
DEFAULT_FORMATS: Tuple[str, ...] = ("text", "json", "csv")
REPORT_JSON = "report.json"
SUMMARY_CSV = "summary.csv"

# Cartella delle configurazioni incluse nel pacchetto (s1-laplacian, ...)
CONFIGS_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "configs")


def load_environment() -> int:
    """
    Carica il file .env (se presente) e ritorna il numero massimo di thread
    per l'esecuzione dei task (ZETALIFT_THREADS, default 1).
    Valori non validi ricadono su 1 con un avviso.
    """
    load_dotenv()
    raw = os.getenv("ZETALIFT_THREADS", "1").strip()
    try:
        threads = int(raw)
    except ValueError:
        print(f"[WARN] ZETALIFT_THREADS non valido ({raw!r}), uso 1 thread.")
        return 1
    if threads < 1:
        print(f"[WARN] ZETALIFT_THREADS deve essere >= 1 (trovato {threads}), uso 1 thread.")
        return 1
    return threads
