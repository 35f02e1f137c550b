"""
run_config.py
Lettura e validazione delle configurazioni di esecuzione (file TOML).

Sezioni:
- [geometry]        dim, period (espressione, es. "2*pi"), epsilon di localita' (opzionale)
- [run]             depth, tolerance
- [oracle]          lattice_cutoff, matrix_cutoff
- [operators.NOME]  symbol = "xi" (simbolo differenziale)
- [weights.NOME]    symbol = "xi**2" oppure lista per pesi diagonali, patch, spectral_eps, grading
- [families.NOME]   weight, operator (opzionale), h
- [[tasks]]         kind, family, ... (parametri del singolo task)

Le espressioni usano x / xi (n = 1) oppure x1..xn / xi1..xin, r = |xi|, cos, sin, exp(I*k*x).
"""

from __future__ import annotations

import os
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import sympy

from config import CONFIGS_DIR, DEFAULT_DEPTH, LATTICE_CUTOFF, MATRIX_CUTOFF, TOL_EXACT
from covering_lift import CoveringSpec
from multipliers import GaussianMultiplier
from resolvent_powers import HFunctionSpec, Weight
from symbol_core import HomTerm, PolyhomSymbol, TrigPoly, as_exact, diagonal_symbol, symbol_from_terms, to_complex
from zeta_engine import HoloFamily


TASK_KINDS = (
    "res", "tr", "zeta", "kv-check", "ps-check", "lift-check", "compare",
    "index", "eta", "oracle-crosscheck", "poisson", "theta",
)

# task che richiedono una famiglia
FAMILY_TASKS = ("res", "tr", "zeta", "kv-check", "ps-check", "lift-check", "compare", "index",
                "oracle-crosscheck", "poisson")


class ConfigError(ValueError):
    """Configurazione non leggibile o non valida (codice di uscita 2)."""


@dataclass(frozen=True)
class TaskSpec:
    index: int
    kind: str
    label: str
    params: Dict[str, Any]

    @property
    def family(self) -> Optional[str]:
        return self.params.get("family")


@dataclass
class RunConfig:
    name: str
    path: str
    dim: int
    period: sympy.Expr
    cover: CoveringSpec
    depth: int
    tolerance: float
    lattice_cutoff: int = LATTICE_CUTOFF
    matrix_cutoff: int = MATRIX_CUTOFF
    operators: Dict[str, PolyhomSymbol] = field(default_factory=dict)
    weights: Dict[str, Weight] = field(default_factory=dict)
    families: Dict[str, HoloFamily] = field(default_factory=dict)
    tasks: List[TaskSpec] = field(default_factory=list)
    raw: Dict[str, Any] = field(default_factory=dict)


# ==============================
#  ESPRESSIONI -> SIMBOLI
# ==============================

def _variables(dim: int):
    if dim == 1:
        xs = [sympy.Symbol("x", real=True)]
        xis = [sympy.Symbol("xi", real=True)]
    else:
        xs = [sympy.Symbol(f"x{i + 1}", real=True) for i in range(dim)]
        xis = [sympy.Symbol(f"xi{i + 1}", real=True) for i in range(dim)]
    r = sympy.Symbol("r", positive=True)
    return xs, xis, r


def _mode_of(arg: sympy.Expr, xs: Sequence[sympy.Symbol], period: sympy.Expr):
    """exp(arg), arg = I * (2 pi / L) k . x + b: ritorna (k, exp(b))."""
    k = []
    for x in xs:
        a = sympy.expand(sympy.diff(arg, x))
        if a.free_symbols:
            raise ConfigError(f"Esponente non lineare in {x}: {arg}")
        freq = sympy.nsimplify(sympy.simplify(a * period / (2 * sympy.pi * sympy.I)))
        if not freq.is_Integer:
            raise ConfigError(f"Frequenza {a} non compatibile con il periodo {period}")
        k.append(int(freq))
    rest = sympy.expand(arg - sum(sympy.I * 2 * sympy.pi / period * kk * x for kk, x in zip(k, xs)))
    if rest.free_symbols:
        raise ConfigError(f"Esponente non lineare: {arg}")
    return tuple(k), sympy.exp(rest)


def parse_symbol_expr(expr: Any, dim: int, period: Any, depth: int) -> PolyhomSymbol:
    """
    Espressione in x, xi, r -> PolyhomSymbol scalare.
    Ogni addendo e' c * exp(i k.x) * xi^beta * r^mu; l'ordine e' il grado massimo.
    """
    period = as_exact(period)
    xs, xis, r = _variables(dim)
    names = {str(s): s for s in (*xs, *xis, r)}
    try:
        e = sympy.sympify(str(expr), locals=names)
    except (sympy.SympifyError, SyntaxError, TypeError) as exc:
        raise ConfigError(f"Espressione non valida {expr!r}: {exc}") from exc
    e = sympy.powsimp(sympy.expand(e.rewrite(sympy.exp)), combine="exp")
    terms: List[HomTerm] = []
    for add in sympy.Add.make_args(e):
        coeff = sympy.Integer(1)
        beta = [0] * dim
        mu = sympy.Integer(0)
        modes = {}
        k = (0,) * dim
        for factor in sympy.Mul.make_args(add):
            base, exp = factor.as_base_exp()
            if base in xis:
                if not (exp.is_Integer and exp >= 0):
                    raise ConfigError(f"Potenza di xi non intera: {factor}")
                beta[xis.index(base)] += int(exp)
            elif base == r:
                mu += exp
            elif isinstance(factor, sympy.exp) and factor.free_symbols & set(xs):
                kk, c = _mode_of(factor.args[0], xs, period)
                k = tuple(a + b for a, b in zip(k, kk))
                coeff *= c
            elif factor.free_symbols:
                raise ConfigError(f"Fattore non supportato {factor} in {expr!r}")
            else:
                coeff *= factor
        modes[k] = coeff
        tp = TrigPoly(modes, dim=dim, period=period)
        terms.append(HomTerm(tp, tuple(beta), mu, 0))
    if not terms:
        raise ConfigError(f"Simbolo nullo: {expr!r}")
    try:
        return symbol_from_terms(terms, depth=depth, dim=dim, period=period)
    except ValueError as exc:
        raise ConfigError(f"Simbolo {expr!r}: {exc}") from exc


# ==============================
#  SEZIONI
# ==============================

def _parse_h(raw: Any) -> HFunctionSpec:
    if raw is None or raw == "1" or raw == 1:
        return HFunctionSpec.identity()
    if not isinstance(raw, dict):
        raise ConfigError(f"Funzione h non valida: {raw!r}")
    kind = raw.get("kind", "polynomial")
    try:
        if kind == "polynomial":
            return HFunctionSpec.polynomial(*[as_exact(c) for c in raw.get("coefficients", [1])])
        if kind == "power":
            return HFunctionSpec.power(as_exact(raw["exponent"]))
        if kind == "composite":
            return HFunctionSpec.composite([as_exact(c) for c in raw["coefficients"]], as_exact(raw["exponent"]))
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"Funzione h non valida {raw!r}: {exc}") from exc
    raise ConfigError(f"Tipo di funzione h sconosciuto: {kind!r}")


def _parse_weight(name: str, raw: Dict[str, Any], dim: int, period: sympy.Expr, depth: int) -> Weight:
    if "symbol" not in raw:
        raise ConfigError(f"Peso {name!r} senza simbolo")
    expr = raw["symbol"]
    grading = raw.get("grading")
    try:
        if isinstance(expr, list):
            entries = [parse_symbol_expr(e, dim, period, depth) for e in expr]
            sym = diagonal_symbol(entries, grading)
        else:
            sym = parse_symbol_expr(expr, dim, period, depth)
            if grading is not None:
                sym = sym.with_grading(grading)
        return Weight(sym, patch=raw.get("patch", "none"),
                      spectral_eps=as_exact(raw.get("spectral_eps", 0.25)))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(f"Peso {name!r}: {exc}") from exc


def _parse_smoothing(raw: Any, dim: int) -> tuple:
    out = []
    for item in raw or []:
        if item.get("kind") != "gaussian":
            raise ConfigError(f"Regolarizzante non supportato: {item!r}")
        out.append(GaussianMultiplier(as_exact(item.get("t", 1)), dim, as_exact(item.get("scale", 1))))
    return tuple(out)


def _resolve_path(path_or_name: str) -> str:
    if os.path.isfile(path_or_name):
        return path_or_name
    bundled = os.path.join(CONFIGS_DIR, f"{path_or_name}.toml")
    if os.path.isfile(bundled):
        return bundled
    raise ConfigError(f"Configurazione non trovata: {path_or_name!r}")


def parse_config(data: Dict[str, Any], name: str = "config", path: str = "",
                 depth: Optional[int] = None, tolerance: Optional[float] = None) -> RunConfig:
    """Dizionario TOML -> RunConfig validata (tutti i riferimenti risolti)."""
    geo = data.get("geometry", {})
    run = data.get("run", {})
    oracle = data.get("oracle", {})
    dim = int(geo.get("dim", 1))
    if dim < 1:
        raise ConfigError(f"Dimensione non valida: {dim}")
    period = as_exact(geo.get("period", "2*pi"))
    try:
        if to_complex(period).real <= 0:
            raise ConfigError(f"Periodo non positivo: {period}")
        cover = CoveringSpec(period, dim, geo.get("epsilon"))
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    depth = int(depth if depth is not None else run.get("depth", DEFAULT_DEPTH))
    if depth < 1:
        raise ConfigError(f"Profondita' non valida: {depth}")
    tol = float(tolerance if tolerance is not None else run.get("tolerance", TOL_EXACT))
    if tol <= 0:
        raise ConfigError(f"Tolleranza non positiva: {tol}")

    cfg = RunConfig(name, path, dim, period, cover, depth, tol,
                    int(oracle.get("lattice_cutoff", LATTICE_CUTOFF)),
                    int(oracle.get("matrix_cutoff", MATRIX_CUTOFF)), raw=data)

    for op_name, raw in data.get("operators", {}).items():
        if "symbol" not in raw:
            raise ConfigError(f"Operatore {op_name!r} senza simbolo")
        sym = parse_symbol_expr(raw["symbol"], dim, period, depth)
        if not sym.is_differential():
            raise ConfigError(f"Operatore {op_name!r} non differenziale")
        cfg.operators[op_name] = sym

    for w_name, raw in data.get("weights", {}).items():
        cfg.weights[w_name] = _parse_weight(w_name, raw, dim, period, depth)

    for f_name, raw in data.get("families", {}).items():
        w = raw.get("weight")
        if w not in cfg.weights:
            raise ConfigError(f"Famiglia {f_name!r}: peso {w!r} non definito")
        op = raw.get("operator")
        if op is not None and op not in cfg.operators:
            raise ConfigError(f"Famiglia {f_name!r}: operatore {op!r} non definito")
        try:
            cfg.families[f_name] = HoloFamily(
                cfg.weights[w],
                cfg.operators[op] if op is not None else None,
                _parse_h(raw.get("h")),
                depth,
                _parse_smoothing(raw.get("smoothing"), dim),
                f_name,
            )
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"Famiglia {f_name!r}: {exc}") from exc

    for idx, raw in enumerate(data.get("tasks", []), start=1):
        kind = raw.get("kind")
        if kind not in TASK_KINDS:
            raise ConfigError(f"Task {idx}: tipo sconosciuto {kind!r} (ammessi {TASK_KINDS})")
        params = {k: v for k, v in raw.items() if k not in ("kind", "label")}
        if kind in FAMILY_TASKS:
            fam = params.get("family")
            if fam not in cfg.families:
                raise ConfigError(f"Task {idx} ({kind}): famiglia {fam!r} non definita")
        if kind == "eta" and "a" not in params:
            raise ConfigError(f"Task {idx} (eta): manca il parametro a")
        label = raw.get("label") or f"{kind}[{params.get('family', params.get('a', idx))}]"
        cfg.tasks.append(TaskSpec(idx, kind, label, params))
    return cfg


def load_config(path_or_name: str, depth: Optional[int] = None,
                tolerance: Optional[float] = None) -> RunConfig:
    """Legge un file TOML (percorso o nome di una configurazione inclusa)."""
    path = _resolve_path(path_or_name)
    try:
        with open(path, "rb") as f:
            data = tomllib.load(f)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"TOML non valido in {path}: {exc}") from exc
    name = os.path.splitext(os.path.basename(path))[0]
    return parse_config(data, name, path, depth, tolerance)
