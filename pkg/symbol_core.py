"""
symbol_core.py
Algebra esatta dei simboli classici (poliomogenei) a valori matriciali su S^1 / T^n.

- TrigPoly: serie di Fourier finite, coefficienti c(x) nella carta globale
- HomTerm / HomComponent / PolyhomSymbol: termini c(x) xi^alpha |xi|^mu log^l |xi|
- star product troncato  sum_alpha (-i)^|alpha| / alpha! d_xi^alpha sigma d_x^alpha tau

Tutte le ampiezze sono espressioni sympy: con dati razionali l'aritmetica e' esatta.
La variabile Z e' il parametro olomorfo delle famiglie (potenze complesse, zeta).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from math import factorial
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import sympy

from config import DEFAULT_DEPTH, MPMATH_DPS


Z = sympy.Symbol("z")
TWO_PI = 2 * sympy.pi

MultiIndex = Tuple[int, ...]
TermKey = Tuple[MultiIndex, sympy.Expr, int]
TermMap = Dict[TermKey, "TrigPoly"]


# ==============================
#  CONVERSIONI NUMERICHE
# ==============================

def as_exact(value: Any) -> sympy.Expr:
    """
    Converte un numero Python (int, float, complex, stringa) in un'espressione sympy esatta.
    I float vengono letti dalla loro rappresentazione decimale: 0.3 -> 3/10.
    """
    if isinstance(value, sympy.Basic):
        return value
    if isinstance(value, (bool, np.bool_)):
        raise TypeError(f"Valore booleano non ammesso come numero: {value!r}")
    if isinstance(value, (int, np.integer)):
        return sympy.Integer(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not np.isfinite(value):
            raise ValueError(f"Valore non finito: {value!r}")
        frac = Fraction(repr(value))
        return sympy.Rational(frac.numerator, frac.denominator)
    if isinstance(value, (complex, np.complexfloating)):
        value = complex(value)
        return as_exact(value.real) + sympy.I * as_exact(value.imag)
    if isinstance(value, str):
        return sympy.sympify(value)
    raise TypeError(f"Tipo non convertibile in numero esatto: {type(value).__name__}")


def to_complex(expr: Any) -> complex:
    """Valuta numericamente un'espressione sympy senza simboli liberi."""
    if isinstance(expr, (int, float, complex)):
        return complex(expr)
    expr = sympy.sympify(expr)
    if expr.free_symbols:
        raise ValueError(f"Espressione con simboli liberi {expr.free_symbols}: {expr}")
    return complex(sympy.N(expr, MPMATH_DPS))


def _same_period(p: sympy.Expr, q: sympy.Expr) -> bool:
    if p == q:
        return True
    try:
        return abs(to_complex(p - q)) < 1e-12
    except (TypeError, ValueError):
        return False


@lru_cache(maxsize=None)
def _check_period(period: sympy.Expr) -> None:
    if to_complex(period).real <= 0:
        raise ValueError(f"Il periodo deve essere positivo (trovato {period})")


def _is_zero(expr: sympy.Expr) -> bool:
    return sympy.expand(expr) == 0


# ==============================
#  POLINOMI TRIGONOMETRICI
# ==============================

class TrigPoly:
    """
    Serie di Fourier finita sul toro T^n di periodo L:
        c(x) = sum_k a_k exp(i (2 pi / L) k . x)
    Le ampiezze nulle vengono eliminate in costruzione. Oggetto immutabile.
    """

    __slots__ = ("dim", "period", "_modes", "_hash")

    def __init__(self, modes: Optional[Mapping[Any, Any]] = None, dim: int = 1, period: Any = TWO_PI):
        if int(dim) < 1:
            raise ValueError(f"Dimensione non valida: {dim}")
        self.dim = int(dim)
        self.period = as_exact(period)
        _check_period(self.period)

        clean: Dict[MultiIndex, sympy.Expr] = {}
        for k, amp in (modes or {}).items():
            key = (int(k),) if isinstance(k, (int, np.integer)) else tuple(int(v) for v in k)
            if len(key) != self.dim:
                raise ValueError(f"Modo {key} incompatibile con la dimensione {self.dim}")
            value = as_exact(amp)
            clean[key] = clean[key] + value if key in clean else value
        items = []
        for key, amp in clean.items():
            amp = sympy.expand(amp)
            if amp != 0:
                items.append((key, amp))
        self._modes: Tuple[Tuple[MultiIndex, sympy.Expr], ...] = tuple(sorted(items, key=lambda kv: kv[0]))
        self._hash: Optional[int] = None

    # --- costruttori ---
    @classmethod
    def constant(cls, value: Any, dim: int = 1, period: Any = TWO_PI) -> "TrigPoly":
        return cls({(0,) * int(dim): value}, dim=dim, period=period)

    def _like(self, modes: Mapping[MultiIndex, Any]) -> "TrigPoly":
        return TrigPoly(modes, dim=self.dim, period=self.period)

    # --- accesso ---
    @property
    def modes(self) -> Dict[MultiIndex, sympy.Expr]:
        return dict(self._modes)

    def is_zero(self) -> bool:
        return not self._modes

    def is_constant(self) -> bool:
        return all(not any(k) for k, _ in self._modes)

    def mean(self) -> sympy.Expr:
        """Ampiezza del modo zero (media sul dominio fondamentale)."""
        for k, amp in self._modes:
            if not any(k):
                return amp
        return sympy.Integer(0)

    # --- aritmetica ---
    def _check(self, other: "TrigPoly") -> None:
        if self.dim != other.dim:
            raise ValueError(f"Dimensioni diverse: {self.dim} vs {other.dim}")
        if not _same_period(self.period, other.period):
            raise ValueError(f"Periodi diversi: {self.period} vs {other.period}")

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        self._check(other)
        modes = self.modes
        for k, amp in other._modes:
            modes[k] = modes[k] + amp if k in modes else amp
        return self._like(modes)

    def __neg__(self) -> "TrigPoly":
        return self._like({k: -a for k, a in self._modes})

    def __sub__(self, other: "TrigPoly") -> "TrigPoly":
        return self + (-other)

    def __mul__(self, other: Any) -> "TrigPoly":
        if isinstance(other, TrigPoly):
            return trig_mul(self, other)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, factor: Any) -> "TrigPoly":
        factor = as_exact(factor)
        if factor == 0:
            return self._like({})
        if factor == 1:
            return self
        return self._like({k: factor * a for k, a in self._modes})

    def derivative(self, axis: int, order: int = 1) -> "TrigPoly":
        """Derivata d_{x_axis}^order: ogni modo viene moltiplicato per (i 2 pi k / L)^order."""
        if order == 0:
            return self
        freq = sympy.I * TWO_PI / self.period
        return self._like({k: (freq * k[axis]) ** order * a for k, a in self._modes if k[axis] != 0})

    def derivative_multi(self, beta: MultiIndex) -> "TrigPoly":
        out = self
        for axis, order in enumerate(beta):
            if order:
                out = out.derivative(axis, order)
        return out

    def map_amplitudes(self, fn) -> "TrigPoly":
        return self._like({k: fn(a) for k, a in self._modes})

    def subs(self, symbol: sympy.Symbol, value: Any) -> "TrigPoly":
        value = as_exact(value)
        return self.map_amplitudes(lambda a: a.subs(symbol, value))

    def free_symbols(self) -> set:
        out: set = set()
        for _, a in self._modes:
            out |= a.free_symbols
        return out

    def evaluate(self, x: Any) -> complex:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        freq = 2.0 * np.pi / to_complex(self.period).real
        total = 0j
        for k, amp in self._modes:
            total += to_complex(amp) * np.exp(1j * freq * float(np.dot(k, x)))
        return complex(total)

    # --- protocollo ---
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TrigPoly):
            return NotImplemented
        return self.dim == other.dim and _same_period(self.period, other.period) and self._modes == other._modes

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.dim, self._modes))
        return self._hash

    def __repr__(self) -> str:
        if not self._modes:
            return "TrigPoly(0)"
        parts = [f"{a}*e{list(k)}" if any(k) else f"{a}" for k, a in self._modes]
        return "TrigPoly(" + " + ".join(parts) + ")"


def trig_mul(a: TrigPoly, b: TrigPoly) -> TrigPoly:
    """Prodotto esatto: convoluzione delle mappe dei modi."""
    a._check(b)
    out: Dict[MultiIndex, sympy.Expr] = {}
    for ka, va in a._modes:
        for kb, vb in b._modes:
            k = tuple(x + y for x, y in zip(ka, kb))
            out[k] = out[k] + va * vb if k in out else va * vb
    return a._like(out)


def trig_domain_integral(a: TrigPoly) -> sympy.Expr:
    """Integrale sul dominio fondamentale [0, L)^n: Vol(F) * ampiezza del modo zero."""
    return sympy.expand(a.period ** a.dim * a.mean())


# ==============================
#  MONOMI xi^alpha |xi|^mu log^l |xi|
# ==============================

@lru_cache(maxsize=None)
def _reduce(alpha: MultiIndex, mu: sympy.Expr) -> Tuple[Tuple[MultiIndex, sympy.Expr, sympy.Expr], ...]:
    # xi_n^2 = |xi|^2 - sum_{i<n} xi_i^2 finche' alpha_n in {0, 1}
    if alpha[-1] < 2:
        return ((alpha, mu, sympy.Integer(1)),)
    base = list(alpha)
    base[-1] -= 2
    pieces = [(tuple(base), sympy.expand(mu + 2), sympy.Integer(1))]
    for i in range(len(alpha) - 1):
        lifted = list(base)
        lifted[i] += 2
        pieces.append((tuple(lifted), mu, sympy.Integer(-1)))
    acc: Dict[Tuple[MultiIndex, sympy.Expr], sympy.Expr] = {}
    for a, m, f in pieces:
        for a2, m2, f2 in _reduce(a, m):
            acc[(a2, m2)] = acc.get((a2, m2), 0) + f * f2
    return tuple((a, m, f) for (a, m), f in acc.items() if f != 0)


def normalize_key(alpha: Sequence[int], mu: Any, ell: int) -> Tuple[Tuple[TermKey, sympy.Expr], ...]:
    """Forma normale di xi^alpha |xi|^mu log^l |xi| come combinazione di chiavi canoniche."""
    mu = sympy.expand(as_exact(mu))
    return tuple(((a, m, int(ell)), f) for a, m, f in _reduce(tuple(int(v) for v in alpha), mu))


@lru_cache(maxsize=None)
def _monomial_dxi(key: TermKey, axis: int) -> Tuple[Tuple[TermKey, sympy.Expr], ...]:
    alpha, mu, ell = key
    up = list(alpha)
    up[axis] += 1
    acc: Dict[TermKey, sympy.Expr] = {}

    def add(a, m, l, factor):
        for k, f in normalize_key(a, m, l):
            acc[k] = acc.get(k, 0) + factor * f

    if alpha[axis] > 0:
        down = list(alpha)
        down[axis] -= 1
        add(down, mu, ell, sympy.Integer(alpha[axis]))
    if mu != 0:
        add(up, mu - 2, ell, mu)
    if ell > 0:
        add(up, mu - 2, ell - 1, sympy.Integer(ell))
    return tuple((k, sympy.expand(f)) for k, f in acc.items() if sympy.expand(f) != 0)


@lru_cache(maxsize=None)
def monomial_derivatives(key: TermKey, beta: MultiIndex) -> Tuple[Tuple[TermKey, sympy.Expr], ...]:
    """d_xi^beta di un monomio canonico: lista di (chiave, fattore)."""
    current: Dict[TermKey, sympy.Expr] = {key: sympy.Integer(1)}
    for axis, order in enumerate(beta):
        for _ in range(order):
            nxt: Dict[TermKey, sympy.Expr] = {}
            for k, f in current.items():
                for k2, f2 in _monomial_dxi(k, axis):
                    nxt[k2] = nxt.get(k2, 0) + f * f2
            current = {k: sympy.expand(f) for k, f in nxt.items() if sympy.expand(f) != 0}
    return tuple(current.items())


@lru_cache(maxsize=None)
def monomial_product(k1: TermKey, k2: TermKey) -> Tuple[Tuple[TermKey, sympy.Expr], ...]:
    alpha = tuple(a + b for a, b in zip(k1[0], k2[0]))
    return normalize_key(alpha, k1[1] + k2[1], k1[2] + k2[2])


@lru_cache(maxsize=None)
def multi_indices(dim: int, max_order: int) -> Tuple[MultiIndex, ...]:
    """Multi-indici beta in Z^dim_{>=0} con |beta| <= max_order, ordinati per |beta|."""
    if max_order < 0:
        return ()
    out = [b for b in product(range(max_order + 1), repeat=dim) if sum(b) <= max_order]
    return tuple(sorted(out, key=lambda b: (sum(b), b)))


def multi_factorial(beta: MultiIndex) -> int:
    out = 1
    for b in beta:
        out *= factorial(b)
    return out


def _key_sort(key: TermKey):
    return (key[2], key[0], sympy.default_sort_key(key[1]))


# ==============================
#  TERMINI E COMPONENTI OMOGENEE
# ==============================

@dataclass(frozen=True)
class HomTerm:
    """c(x) xi^alpha |xi|^mu log^l |xi| su |xi| >= 1; grado di omogeneita' |alpha| + mu."""
    coeff: TrigPoly
    monomial: MultiIndex
    radial_exp: Any
    log_power: int = 0

    def __post_init__(self):
        object.__setattr__(self, "monomial", tuple(int(a) for a in self.monomial))
        object.__setattr__(self, "radial_exp", sympy.expand(as_exact(self.radial_exp)))
        if len(self.monomial) != self.coeff.dim or any(a < 0 for a in self.monomial):
            raise ValueError(f"Multi-indice non valido {self.monomial} per dimensione {self.coeff.dim}")
        if self.log_power < 0:
            raise ValueError(f"Potenza del logaritmo negativa: {self.log_power}")

    @property
    def key(self) -> TermKey:
        return (self.monomial, self.radial_exp, int(self.log_power))

    @property
    def degree(self) -> sympy.Expr:
        return sympy.expand(sum(self.monomial) + self.radial_exp)


def collect_terms(terms: Iterable[HomTerm]) -> List[HomTerm]:
    """Forma canonica: normalizza i monomi, somma i termini con la stessa chiave, elimina gli zeri."""
    acc: TermMap = {}
    for t in terms:
        for key, f in normalize_key(t.monomial, t.radial_exp, t.log_power):
            _accumulate(acc, key, t.coeff.scale(f))
    return _terms_from_map(acc)


def term_dxi(t: HomTerm, axis: int) -> List[HomTerm]:
    """
    Derivata esatta d_{xi_i} di un termine (regola di Leibniz su xi^alpha |xi|^mu log^l |xi|).
    Ogni termine prodotto ha grado esattamente uno in meno.
    """
    if not 0 <= axis < len(t.monomial):
        raise ValueError(f"Asse {axis} fuori dalla dimensione {len(t.monomial)}")
    acc: TermMap = {}
    for key, f in normalize_key(t.monomial, t.radial_exp, t.log_power):
        for k2, f2 in _monomial_dxi(key, axis):
            _accumulate(acc, k2, t.coeff.scale(f * f2))
    return _terms_from_map(acc)


def _accumulate(target: TermMap, key: TermKey, coeff: TrigPoly) -> None:
    if coeff.is_zero():
        return
    if key in target:
        target[key] = target[key] + coeff
    else:
        target[key] = coeff


def _terms_from_map(mapping: Mapping[TermKey, TrigPoly]) -> List[HomTerm]:
    out = []
    for key in sorted(mapping, key=_key_sort):
        coeff = mapping[key]
        if not coeff.is_zero():
            out.append(HomTerm(coeff, key[0], key[1], key[2]))
    return out


@dataclass(frozen=True)
class HomComponent:
    """Termini che condividono lo stesso grado di omogeneita' (qualsiasi potenza del log)."""
    degree: Any
    terms: Tuple[HomTerm, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "degree", sympy.expand(as_exact(self.degree)))
        object.__setattr__(self, "terms", tuple(self.terms))
        for t in self.terms:
            if not _is_zero(t.degree - self.degree):
                raise ValueError(f"Termine di grado {t.degree} in una componente di grado {self.degree}")

    @classmethod
    def from_map(cls, degree: Any, mapping: Mapping[TermKey, TrigPoly]) -> "HomComponent":
        return cls(degree, tuple(_terms_from_map(mapping)))

    def as_map(self) -> TermMap:
        return {t.key: t.coeff for t in self.terms}

    def is_zero(self) -> bool:
        return not self.terms


# ==============================
#  SIMBOLI POLIOMOGENEI
# ==============================

@dataclass(frozen=True)
class ExcisionConvention:
    """
    Convenzione di escissione: taglio netto su |xi| = radius (default 1).
    inner e' il modello della parte interna |xi| < radius (None = parte interna nulla);
    deve esporre value(z) -> complex.
    """
    mode: str = "sharp"
    radius: Any = 1
    inner: Any = None

    def __post_init__(self):
        if self.mode == "smooth":
            raise ValueError("Escissione liscia riservata: non ancora disponibile")
        if self.mode != "sharp":
            raise ValueError(f"Modalita' di escissione sconosciuta: {self.mode!r}")
        object.__setattr__(self, "radius", as_exact(self.radius))
        if to_complex(self.radius).real <= 0:
            raise ValueError(f"Raggio di escissione non positivo: {self.radius}")

    def inner_value(self, z: Any = 0) -> complex:
        return 0j if self.inner is None else complex(self.inner.value(z))


SHARP_EXCISION = ExcisionConvention()


@dataclass(frozen=True)
class PolyhomSymbol:
    """
    Simbolo classico k x k troncato a `depth` componenti: la componente j ha grado order - j.
    entries e' la lista row-major delle entrate, ciascuna una tupla di HomComponent.
    grading (opzionale) assegna +1 / -1 agli indici per le supertracce.
    """
    order: Any
    entries: Tuple[Tuple[HomComponent, ...], ...]
    depth: int
    size: int = 1
    dim: int = 1
    period: Any = TWO_PI
    grading: Optional[Tuple[int, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "order", sympy.expand(as_exact(self.order)))
        object.__setattr__(self, "period", as_exact(self.period))
        if self.depth < 1:
            raise ValueError(f"Profondita' di troncamento non valida: {self.depth}")
        if len(self.entries) != self.size * self.size:
            raise ValueError(f"Attese {self.size * self.size} entrate, trovate {len(self.entries)}")
        for comps in self.entries:
            if len(comps) != self.depth:
                raise ValueError(f"Ogni entrata deve avere {self.depth} componenti")
            for j, comp in enumerate(comps):
                if not _is_zero(comp.degree - (self.order - j)):
                    raise ValueError(f"Componente {j} di grado {comp.degree}, atteso {self.order - j}")
        if self.grading is not None:
            grading = tuple(int(s) for s in self.grading)
            if len(grading) != self.size or any(s not in (1, -1) for s in grading):
                raise ValueError(f"Graduazione non valida: {self.grading}")
            object.__setattr__(self, "grading", grading)

    # --- accesso ---
    def entry(self, i: int, j: int) -> Tuple[HomComponent, ...]:
        return self.entries[i * self.size + j]

    @property
    def components(self) -> Tuple[HomComponent, ...]:
        if self.size != 1:
            raise ValueError("components e' definito solo per simboli scalari: usa entry(i, j)")
        return self.entries[0]

    def component(self, j: int) -> HomComponent:
        return self.components[j]

    def is_zero(self) -> bool:
        return all(c.is_zero() for comps in self.entries for c in comps)

    def terms(self) -> Iterable[HomTerm]:
        for comps in self.entries:
            for c in comps:
                yield from c.terms

    def is_differential(self) -> bool:
        """Vero se ogni termine e' polinomiale in xi (|xi|^mu con mu pari >= 0, senza log)."""
        for t in self.terms():
            mu = t.radial_exp
            if t.log_power != 0 or not mu.is_Integer or int(mu) < 0 or int(mu) % 2:
                return False
        return True

    def is_x_independent(self) -> bool:
        return all(t.coeff.is_constant() for t in self.terms())

    def free_symbols(self) -> set:
        out = set(self.order.free_symbols)
        for t in self.terms():
            out |= t.coeff.free_symbols() | t.radial_exp.free_symbols
        return out

    def maps(self) -> List[List[TermMap]]:
        return [[c.as_map() for c in comps] for comps in self.entries]

    def with_grading(self, grading: Optional[Sequence[int]]) -> "PolyhomSymbol":
        return PolyhomSymbol(self.order, self.entries, self.depth, self.size, self.dim, self.period,
                             None if grading is None else tuple(grading))

    def truncate(self, depth: int) -> "PolyhomSymbol":
        if depth > self.depth:
            raise ValueError(f"Impossibile estendere il troncamento da {self.depth} a {depth}")
        return PolyhomSymbol(self.order, tuple(comps[:depth] for comps in self.entries), depth,
                             self.size, self.dim, self.period, self.grading)

    def resized(self, depth: int) -> "PolyhomSymbol":
        """Tronca oppure estende con componenti nulle (lecito per simboli con espansione finita)."""
        if depth <= self.depth:
            return self.truncate(depth)
        entries = tuple(
            comps + tuple(HomComponent(self.order - j) for j in range(self.depth, depth))
            for comps in self.entries
        )
        return PolyhomSymbol(self.order, entries, depth, self.size, self.dim, self.period, self.grading)

    def subs(self, symbol: sympy.Symbol, value: Any) -> "PolyhomSymbol":
        value = as_exact(value)
        maps = []
        for comps in self.entries:
            entry_maps = []
            for comp in comps:
                acc: TermMap = {}
                for t in comp.terms:
                    coeff = t.coeff.subs(symbol, value)
                    for key, f in normalize_key(t.monomial, t.radial_exp.subs(symbol, value), t.log_power):
                        _accumulate(acc, key, coeff.scale(f))
                entry_maps.append(acc)
            maps.append(entry_maps)
        return _from_maps(self.order.subs(symbol, value), maps, self.depth, self.size, self.dim,
                          self.period, self.grading)

    def at(self, z: Any) -> "PolyhomSymbol":
        """Valuta la famiglia olomorfa nel punto z (sostituzione di Z)."""
        return self.subs(Z, z)

    def equivalent(self, other: "PolyhomSymbol") -> bool:
        """Equivalenza ~: componenti uguali fino al troncamento minimo."""
        if self.size != other.size or self.dim != other.dim or not _same_period(self.period, other.period):
            return False
        depth = min(self.depth, other.depth)
        if self.is_zero() and other.is_zero():
            return True
        if not _is_zero(self.order - other.order):
            return False
        for a, b in zip(self.entries, other.entries):
            for ca, cb in zip(a[:depth], b[:depth]):
                if ca.as_map() != cb.as_map():
                    return False
        return True

    def evaluate(self, x: Any, xi: Any):
        """
        Valore numerico sum_j sigma_{m-j}(x, xi) (|xi| >= 1).
        Ritorna un complex per simboli scalari, altrimenti una matrice numpy.
        """
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        r = float(np.linalg.norm(xi))
        if r == 0.0:
            raise ValueError("Il simbolo escisso non e' definito in xi = 0")
        out = np.zeros((self.size, self.size), dtype=complex)
        for idx, comps in enumerate(self.entries):
            i, j = divmod(idx, self.size)
            for comp in comps:
                for t in comp.terms:
                    mono = float(np.prod(xi ** np.asarray(t.monomial, dtype=float)))
                    val = t.coeff.evaluate(x) * mono * r ** to_complex(t.radial_exp)
                    if t.log_power:
                        val *= np.log(r) ** t.log_power
                    out[i, j] += val
        return complex(out[0, 0]) if self.size == 1 else out

    def describe(self) -> str:
        lines = [f"ordine {self.order}, profondita' {self.depth}, {self.size}x{self.size}"]
        for idx, comps in enumerate(self.entries):
            for j, comp in enumerate(comps):
                for t in comp.terms:
                    lines.append(f"  [{idx}] j={j} {t.coeff} xi^{list(t.monomial)} |xi|^({t.radial_exp})"
                                 + (f" log^{t.log_power}" if t.log_power else ""))
        return "\n".join(lines)


def _from_maps(order: Any, maps: Sequence[Sequence[TermMap]], depth: int, size: int, dim: int,
               period: Any, grading: Optional[Tuple[int, ...]]) -> PolyhomSymbol:
    order = sympy.expand(as_exact(order))
    entries = []
    for entry_maps in maps:
        comps = []
        for j in range(depth):
            mapping = entry_maps[j] if j < len(entry_maps) else {}
            comps.append(HomComponent.from_map(order - j, mapping))
        entries.append(tuple(comps))
    return PolyhomSymbol(order, tuple(entries), depth, size, dim, period, grading)


# ==============================
#  COSTRUTTORI
# ==============================

def symbol_from_terms(terms: Iterable[HomTerm], depth: int = DEFAULT_DEPTH, order: Any = None,
                      dim: Optional[int] = None, period: Any = None) -> PolyhomSymbol:
    """
    Simbolo scalare dai suoi termini: raggruppa per grado (j = order - grado intero >= 0).
    Se order manca si usa il grado con parte reale massima. I termini oltre la profondita' sono scartati.
    """
    terms = collect_terms(terms)
    if dim is None:
        if not terms:
            raise ValueError("Servono dim e period per un simbolo senza termini")
        dim = terms[0].coeff.dim
    if period is None:
        period = terms[0].coeff.period if terms else TWO_PI
    if order is None:
        if not terms:
            order = 0
        else:
            order = max((t.degree for t in terms), key=lambda d: to_complex(d.subs(Z, 0)).real)
    order = sympy.expand(as_exact(order))
    maps: List[TermMap] = [dict() for _ in range(depth)]
    for t in terms:
        j = sympy.expand(order - t.degree)
        if not j.is_Integer or int(j) < 0:
            raise ValueError(f"Grado {t.degree} non compatibile con l'ordine {order}")
        if int(j) < depth:
            _accumulate(maps[int(j)], t.key, t.coeff)
    return _from_maps(order, [maps], depth, 1, dim, period, None)


def monomial_symbol(coeff: Any, monomial: Sequence[int], radial_exp: Any = 0, log_power: int = 0,
                    depth: int = DEFAULT_DEPTH, period: Any = TWO_PI) -> PolyhomSymbol:
    """Simbolo scalare con un solo termine c xi^alpha |xi|^mu log^l |xi| (c costante o TrigPoly)."""
    dim = len(monomial)
    c = coeff if isinstance(coeff, TrigPoly) else TrigPoly.constant(coeff, dim=dim, period=period)
    return symbol_from_terms([HomTerm(c, tuple(monomial), radial_exp, log_power)], depth=depth,
                             dim=dim, period=c.period)


def zero_symbol(order: Any = 0, size: int = 1, dim: int = 1, period: Any = TWO_PI,
                depth: int = DEFAULT_DEPTH, grading: Optional[Sequence[int]] = None) -> PolyhomSymbol:
    maps = [[dict() for _ in range(depth)] for _ in range(size * size)]
    return _from_maps(order, maps, depth, size, dim, period, None if grading is None else tuple(grading))


def identity_symbol(size: int = 1, dim: int = 1, period: Any = TWO_PI, depth: int = DEFAULT_DEPTH,
                    grading: Optional[Sequence[int]] = None) -> PolyhomSymbol:
    one = TrigPoly.constant(1, dim=dim, period=period)
    maps = []
    for idx in range(size * size):
        entry: List[TermMap] = [dict() for _ in range(depth)]
        if idx // size == idx % size:
            entry[0][((0,) * dim, sympy.Integer(0), 0)] = one
        maps.append(entry)
    return _from_maps(0, maps, depth, size, dim, period, None if grading is None else tuple(grading))


def _order_shift(high: sympy.Expr, low: sympy.Expr) -> int:
    diff = sympy.expand(high - low)
    if not diff.is_Integer:
        raise ValueError(f"Ordini {high} e {low} non differiscono per un intero")
    return int(diff)


def _shifted_maps(sig: PolyhomSymbol, order: sympy.Expr, depth: int) -> List[List[TermMap]]:
    if sig.is_zero():
        return [[dict() for _ in range(depth)] for _ in sig.entries]
    shift = _order_shift(order, sig.order)
    if shift < 0:
        raise ValueError(f"Ordine {sig.order} superiore all'ordine comune {order}")
    out = []
    for comps in sig.entries:
        entry: List[TermMap] = [dict() for _ in range(depth)]
        for j, comp in enumerate(comps):
            if j + shift < depth:
                entry[j + shift] = comp.as_map()
        out.append(entry)
    return out


def _common_order(symbols: Sequence[PolyhomSymbol]) -> sympy.Expr:
    live = [s for s in symbols if not s.is_zero()]
    if not live:
        return symbols[0].order
    best = live[0].order
    for s in live[1:]:
        if _order_shift(s.order, best) > 0:
            best = s.order
    return best


def block_symbol(blocks: Sequence[Sequence[Optional[PolyhomSymbol]]],
                 grading: Optional[Sequence[int]] = None) -> PolyhomSymbol:
    """Simbolo matriciale dalle sue entrate scalari (None = entrata nulla)."""
    size = len(blocks)
    flat = [b for row in blocks for b in row]
    if any(len(row) != size for row in blocks):
        raise ValueError("La matrice di simboli deve essere quadrata")
    live = [b for b in flat if b is not None]
    if not live:
        raise ValueError("Serve almeno un'entrata non nulla")
    ref = live[0]
    for b in live:
        if b.size != 1:
            raise ValueError("Le entrate di block_symbol devono essere scalari")
        if b.dim != ref.dim or not _same_period(b.period, ref.period):
            raise ValueError("Entrate con geometria diversa")
    depth = min(b.depth for b in live)
    order = _common_order(live)
    maps = []
    for b in flat:
        if b is None:
            maps.append([dict() for _ in range(depth)])
        else:
            maps.append(_shifted_maps(b, order, depth)[0])
    return _from_maps(order, maps, depth, size, ref.dim, ref.period,
                      None if grading is None else tuple(grading))


def diagonal_symbol(diagonal: Sequence[PolyhomSymbol], grading: Optional[Sequence[int]] = None) -> PolyhomSymbol:
    size = len(diagonal)
    blocks = [[diagonal[i] if i == j else None for j in range(size)] for i in range(size)]
    return block_symbol(blocks, grading)


# ==============================
#  ARITMETICA DEI SIMBOLI
# ==============================

def _check_compatible(sig: PolyhomSymbol, tau: PolyhomSymbol) -> None:
    if sig.size != tau.size:
        raise ValueError(f"Forme matriciali incompatibili: {sig.size} vs {tau.size}")
    if sig.dim != tau.dim:
        raise ValueError(f"Dimensioni diverse: {sig.dim} vs {tau.dim}")
    if not _same_period(sig.period, tau.period):
        raise ValueError(f"Periodi diversi: {sig.period} vs {tau.period}")


def _merge_grading(sig: PolyhomSymbol, tau: PolyhomSymbol) -> Optional[Tuple[int, ...]]:
    if sig.grading is not None and tau.grading is not None and sig.grading != tau.grading:
        raise ValueError(f"Graduazioni diverse: {sig.grading} vs {tau.grading}")
    return sig.grading if sig.grading is not None else tau.grading


def symbol_add(sig: PolyhomSymbol, tau: PolyhomSymbol) -> PolyhomSymbol:
    """Somma di simboli con ordini che differiscono per un intero (le componenti vengono riallineate)."""
    _check_compatible(sig, tau)
    depth = min(sig.depth, tau.depth)
    order = _common_order([sig, tau])
    a = _shifted_maps(sig, order, depth)
    b = _shifted_maps(tau, order, depth)
    maps = []
    for ea, eb in zip(a, b):
        entry = []
        for ma, mb in zip(ea, eb):
            acc = dict(ma)
            for key, coeff in mb.items():
                _accumulate(acc, key, coeff)
            entry.append(acc)
        maps.append(entry)
    return _from_maps(order, maps, depth, sig.size, sig.dim, sig.period, _merge_grading(sig, tau))


def symbol_scale(sig: PolyhomSymbol, factor: Any) -> PolyhomSymbol:
    factor = as_exact(factor)
    maps = [[{k: c.scale(factor) for k, c in comp.as_map().items()} for comp in comps] for comps in sig.entries]
    return _from_maps(sig.order, maps, sig.depth, sig.size, sig.dim, sig.period, sig.grading)


def symbol_sub(sig: PolyhomSymbol, tau: PolyhomSymbol) -> PolyhomSymbol:
    return symbol_add(sig, symbol_scale(tau, -1))


def _scalar_star(sig: Sequence[HomComponent], tau: Sequence[HomComponent], depth: int, dim: int,
                 out: List[TermMap]) -> None:
    for j, cs in enumerate(sig[:depth]):
        if cs.is_zero():
            continue
        for k, ct in enumerate(tau[:depth - j]):
            if ct.is_zero():
                continue
            budget = depth - 1 - j - k
            for tt in ct.terms:
                for beta in multi_indices(dim, 0 if tt.coeff.is_constant() else budget):
                    dt = tt.coeff.derivative_multi(beta)
                    if dt.is_zero():
                        continue
                    nb = sum(beta)
                    pref = (-sympy.I) ** nb / multi_factorial(beta)
                    for ts in cs.terms:
                        base = trig_mul(ts.coeff, dt)
                        if base.is_zero():
                            continue
                        for dkey, f in monomial_derivatives(ts.key, beta):
                            for pkey, g in monomial_product(dkey, tt.key):
                                _accumulate(out[j + k + nb], pkey, base.scale(pref * f * g))


def star_product(sig: PolyhomSymbol, tau: PolyhomSymbol, depth: Optional[int] = None) -> PolyhomSymbol:
    """
    Star product troncato sum_{|alpha|} (-i)^|alpha| / alpha! d_xi^alpha sigma d_x^alpha tau,
    raggruppato per grado e troncato a `depth` componenti dell'ordine somma.
    Per simboli matriciali: prodotto righe per colonne delle entrate scalari.
    """
    _check_compatible(sig, tau)
    if depth is None:
        depth = min(sig.depth, tau.depth)
    if depth < 1:
        raise ValueError(f"Profondita' di troncamento non valida: {depth}")
    if depth > min(sig.depth, tau.depth):
        raise ValueError(f"Profondita' {depth} oltre il troncamento dei fattori ({sig.depth}, {tau.depth})")
    size = sig.size
    maps: List[List[TermMap]] = []
    for i in range(size):
        for k in range(size):
            out: List[TermMap] = [dict() for _ in range(depth)]
            for j in range(size):
                _scalar_star(sig.entry(i, j), tau.entry(j, k), depth, sig.dim, out)
            maps.append(out)
    return _from_maps(sig.order + tau.order, maps, depth, size, sig.dim, sig.period, _merge_grading(sig, tau))


def star_power(sig: PolyhomSymbol, k: int, depth: Optional[int] = None) -> PolyhomSymbol:
    """sigma * sigma * ... * sigma (k volte); k = 0 da' l'identita'."""
    if k < 0:
        raise ValueError(f"Esponente negativo: {k}")
    depth = sig.depth if depth is None else depth
    out = identity_symbol(sig.size, sig.dim, sig.period, depth, sig.grading)
    for _ in range(k):
        out = star_product(out, sig, depth)
    return out


def symbol_dz(sig: PolyhomSymbol, symbol: sympy.Symbol = Z) -> PolyhomSymbol:
    """
    Derivata rispetto al parametro z, termine per termine:
    d/dz [a(z) xi^alpha |xi|^mu(z) log^l] = a' (...) + a mu' xi^alpha |xi|^mu log^(l+1).
    """
    maps = []
    for comps in sig.entries:
        entry = []
        for comp in comps:
            acc: TermMap = {}
            for t in comp.terms:
                alpha, mu, ell = t.key
                _accumulate(acc, t.key, t.coeff.map_amplitudes(lambda a: sympy.diff(a, symbol)))
                dmu = sympy.diff(mu, symbol)
                if dmu != 0:
                    _accumulate(acc, (alpha, mu, ell + 1), t.coeff.scale(dmu))
            entry.append(acc)
        maps.append(entry)
    return _from_maps(sig.order, maps, sig.depth, sig.size, sig.dim, sig.period, sig.grading)
