"""
resolvent_powers.py
Calcolo funzionale dei pesi a livello di simbolo:
- parametrice del risolvente (sigma(Q) - lambda)^{*-1} con la ricorsione di Seeley
- potenze complesse Q^{-z} (integrale di contorno in forma chiusa, residuo in mu)
- log Q = -d/dz Q^{-z} in z = 0
- h(Q) per h polinomiale, potenza x^{-s} o prodotto dei due

Solo pesi con simbolo principale scalare c |xi|^q Id (c > 0 costante) ammettono potenze e logaritmi;
i pesi matriciali devono essere diagonali e vengono trattati entrata per entrata.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, List, Optional, Sequence, Tuple

import sympy

from config import DEFAULT_DEPTH, DEFAULT_SPECTRAL_EPS
from symbol_core import (
    Z,
    HomComponent,
    MultiIndex,
    PolyhomSymbol,
    TermMap,
    TrigPoly,
    _accumulate,
    _from_maps,
    as_exact,
    identity_symbol,
    monomial_derivatives,
    monomial_product,
    multi_factorial,
    multi_indices,
    normalize_key,
    star_power,
    star_product,
    symbol_add,
    symbol_dz,
    symbol_scale,
    to_complex,
)


PATCH_KINDS = ("none", "base", "band")

# (alpha, rho, t): xi^alpha |xi|^rho (c |xi|^q - lambda)^{-t}
ResolventKey = Tuple[MultiIndex, sympy.Expr, int]


# ==============================
#  PESI
# ==============================

@dataclass(frozen=True)
class Weight:
    """
    Peso Q: simbolo invertibile di ordine q > 0 con taglio spettrale (solo theta = pi).
    patch descrive la deformazione Q_eps lato oracolo:
      - "none": Q invertibile, nessuna correzione
      - "base": autovalore 0 sostituito da 1 sulla varieta' chiusa
      - "band": proiettore di banda 1_{[0, eps]} sul rivestimento
    """
    symbol: PolyhomSymbol
    spectral_cut: float = math.pi
    agmon_angle: Optional[float] = None
    patch: str = "none"
    spectral_eps: Any = DEFAULT_SPECTRAL_EPS

    def __post_init__(self):
        if abs(float(self.spectral_cut) - math.pi) > 1e-12:
            raise ValueError(f"Solo il taglio spettrale theta = pi e' supportato (trovato {self.spectral_cut})")
        if self.patch not in PATCH_KINDS:
            raise ValueError(f"Patch spettrale sconosciuta: {self.patch!r} (ammesse {PATCH_KINDS})")
        if self.symbol.free_symbols():
            raise ValueError("Il simbolo di un peso non puo' dipendere da z")
        q = to_complex(self.symbol.order)
        if abs(q.imag) > 0 or q.real <= 0:
            raise ValueError(f"L'ordine di un peso deve essere reale positivo (trovato {self.symbol.order})")
        object.__setattr__(self, "spectral_eps", as_exact(self.spectral_eps))
        if to_complex(self.spectral_eps).real <= 0:
            raise ValueError(f"Epsilon spettrale non positivo: {self.spectral_eps}")

    @property
    def order(self) -> sympy.Expr:
        return self.symbol.order

    @property
    def dim(self) -> int:
        return self.symbol.dim

    @property
    def period(self) -> sympy.Expr:
        return self.symbol.period

    @property
    def size(self) -> int:
        return self.symbol.size

    @property
    def grading(self) -> Optional[Tuple[int, ...]]:
        return self.symbol.grading

    @property
    def principal_scalar(self) -> bool:
        try:
            self.leading_coeff
        except ValueError:
            return False
        return True

    @property
    def leading_coeff(self) -> sympy.Expr:
        """Costante c > 0 del simbolo principale c |xi|^q Id (ValueError se non scalare)."""
        return _leading_coeff(self.symbol)

    def require_principal_scalar(self) -> sympy.Expr:
        return self.leading_coeff

    def diagonal_entry(self, i: int) -> Tuple[HomComponent, ...]:
        return self.symbol.entry(i, i)

    def scaled(self, factor: Any) -> "Weight":
        return Weight(symbol_scale(self.symbol, factor), self.spectral_cut, self.agmon_angle, self.patch,
                      self.spectral_eps)

    def with_patch(self, patch: str, spectral_eps: Any = None) -> "Weight":
        eps = self.spectral_eps if spectral_eps is None else spectral_eps
        return Weight(self.symbol, self.spectral_cut, self.agmon_angle, patch, eps)


@lru_cache(maxsize=None)
def _leading_coeff(sig: PolyhomSymbol) -> sympy.Expr:
    q = sig.order
    c0 = None
    for idx, comps in enumerate(sig.entries):
        i, j = divmod(idx, sig.size)
        if i != j:
            if any(not c.is_zero() for c in comps):
                raise ValueError("Peso matriciale non diagonale: potenze e logaritmi non supportati")
            continue
        for t in (t for c in comps for t in c.terms):
            if t.log_power:
                raise ValueError("Il simbolo di un peso non puo' contenere termini logaritmici")
        lead = comps[0].terms
        key = ((0,) * sig.dim, q, 0)
        if len(lead) != 1 or lead[0].key != key or not lead[0].coeff.is_constant():
            raise ValueError("Simbolo principale non scalare: serve c |xi|^q con c costante")
        value = lead[0].coeff.mean()
        num = to_complex(value)
        if abs(num.imag) > 0 or num.real <= 0:
            raise ValueError(f"Coefficiente principale non positivo: {value}")
        if c0 is not None and sympy.expand(c0 - value) != 0:
            raise ValueError("Simbolo principale non proporzionale all'identita'")
        c0 = value
    return c0


# ==============================
#  RISOLVENTE
# ==============================

@dataclass(frozen=True)
class ResolventTerm:
    """c(x) xi^alpha |xi|^rho (c0 |xi|^q - lambda)^{-t}."""
    coeff: TrigPoly
    monomial: MultiIndex
    radial_exp: sympy.Expr
    power: int


@dataclass(frozen=True)
class ResolventSymbol:
    """Componenti b_{-q-j}, congiuntamente omogenee di grado -q-j in (xi, lambda^{1/q})."""
    components: Tuple[Tuple[ResolventTerm, ...], ...]
    order: sympy.Expr
    leading_coeff: sympy.Expr
    depth: int
    dim: int

    def as_maps(self) -> List[Dict[ResolventKey, TrigPoly]]:
        return [{(t.monomial, t.radial_exp, t.power): t.coeff for t in comp} for comp in self.components]


def _exact_indices(dim: int, order: int) -> Tuple[MultiIndex, ...]:
    return tuple(b for b in multi_indices(dim, order) if sum(b) == order)


def _recursion_sum(p_comps: Sequence[HomComponent], b: Sequence[Dict[ResolventKey, TrigPoly]],
                   j: int, dim: int, include_leading: bool) -> Dict[ResolventKey, TrigPoly]:
    """
    sum_{k + l + |alpha| = j} (-i)^|alpha| / alpha! d_xi^alpha p_{q-k} d_x^alpha b_{-q-l}.
    Con include_leading il termine (p_q - lambda) b_{-q-j} usa (c0|xi|^q - lambda) R^t = R^{t-1}.
    """
    acc: Dict[ResolventKey, TrigPoly] = {}
    for l in range(min(j + 1, len(b))):
        for k in range(j - l + 1):
            order = j - k - l
            if k == 0 and order == 0:
                if include_leading:
                    for (alpha, rho, t), coeff in b[l].items():
                        _accumulate(acc, (alpha, rho, t - 1), coeff)
                continue
            if k >= len(p_comps):
                continue
            for beta in _exact_indices(dim, order):
                pref = (-sympy.I) ** order / multi_factorial(beta)
                derived = [(key, c.derivative_multi(beta)) for key, c in b[l].items()]
                derived = [(key, c) for key, c in derived if not c.is_zero()]
                if not derived:
                    continue
                for pt in p_comps[k].terms:
                    for dkey, f in monomial_derivatives(pt.key, beta):
                        for (alpha, rho, t), cb in derived:
                            coeff = (pt.coeff * cb).scale(pref * f)
                            for (a2, m2, _), g in monomial_product(dkey, (alpha, rho, 0)):
                                _accumulate(acc, (a2, m2, t), coeff.scale(g))
    return acc


def _resolvent_maps(Q: Weight, entry: int, depth: int) -> List[Dict[ResolventKey, TrigPoly]]:
    Q.require_principal_scalar()
    p_comps = Q.diagonal_entry(entry)
    one = TrigPoly.constant(1, dim=Q.dim, period=Q.period)
    b: List[Dict[ResolventKey, TrigPoly]] = [{((0,) * Q.dim, sympy.Integer(0), 1): one}]
    for j in range(1, depth):
        acc = _recursion_sum(p_comps, b, j, Q.dim, include_leading=False)
        # b_{-q-j} = -R * acc
        b.append({(alpha, rho, t + 1): c.scale(-1) for (alpha, rho, t), c in acc.items() if not c.is_zero()})
    return b


def resolvent_symbol(Q: Weight, depth: int = DEFAULT_DEPTH, entry: int = 0) -> ResolventSymbol:
    """
    Parametrice del risolvente: b_{-q} = (c0 |xi|^q - lambda)^{-1},
    b_{-q-j} = -b_{-q} sum_{k+l+|alpha|=j, l<j} (-i)^|alpha|/alpha! d_xi^alpha p_{q-k} d_x^alpha b_{-q-l}.
    """
    if depth < 1:
        raise ValueError(f"Profondita' di troncamento non valida: {depth}")
    maps = _resolvent_maps(Q, entry, depth)
    comps = tuple(
        tuple(ResolventTerm(c, alpha, rho, t) for (alpha, rho, t), c in sorted(
            m.items(), key=lambda kv: (kv[0][2], kv[0][0], sympy.default_sort_key(kv[0][1]))))
        for m in maps
    )
    return ResolventSymbol(comps, -Q.order, Q.leading_coeff, depth, Q.dim)


def resolvent_defect(Q: Weight, res: ResolventSymbol, entry: int = 0) -> List[Dict[ResolventKey, TrigPoly]]:
    """Componenti di (sigma(Q) - lambda) * b: devono essere Id in grado 0 e nulle altrove."""
    b = res.as_maps()
    p_comps = Q.diagonal_entry(entry)
    out = []
    for j in range(res.depth):
        acc = _recursion_sum(p_comps, b, j, Q.dim, include_leading=True)
        out.append({k: c for k, c in acc.items() if not c.is_zero()})
    return out


def resolvent_defect_vanishes(Q: Weight, depth: int = DEFAULT_DEPTH) -> bool:
    for entry in range(Q.size):
        res = resolvent_symbol(Q, depth, entry)
        defect = resolvent_defect(Q, res, entry)
        identity = {((0,) * Q.dim, sympy.Integer(0), 0): TrigPoly.constant(1, dim=Q.dim, period=Q.period)}
        if defect[0] != identity or any(defect[1:]):
            return False
    return True


# ==============================
#  POTENZE COMPLESSE E LOGARITMO
# ==============================

def contour_factor(t: int) -> sympy.Expr:
    """
    -(1/2 pi i) oint lambda^{-z} (mu - lambda)^{-t} d lambda = z (z+1) ... (z+t-2) / (t-1)! mu^{-z-t+1}.
    Ritorna il prefattore polinomiale in Z.
    """
    out = sympy.Integer(1)
    for i in range(t - 1):
        out *= Z + i
    return sympy.expand(out / math.factorial(t - 1))


@lru_cache(maxsize=None)
def _power_family(Q: Weight, depth: int) -> PolyhomSymbol:
    c0 = Q.require_principal_scalar()
    q = Q.order
    size = Q.size
    diag: List[List[TermMap]] = []
    for i in range(size):
        b = _resolvent_maps(Q, i, depth)
        maps: List[TermMap] = [dict() for _ in range(depth)]
        for j, bj in enumerate(b):
            for (alpha, rho, t), coeff in bj.items():
                amp = contour_factor(t) * c0 ** (-Z - t + 1)
                for key, f in normalize_key(alpha, rho + q * (-Z - t + 1), 0):
                    _accumulate(maps[j], key, coeff.scale(amp * f))
        diag.append(maps)
    all_maps = []
    for idx in range(size * size):
        i, j = divmod(idx, size)
        all_maps.append(diag[i] if i == j else [dict() for _ in range(depth)])
    return _from_maps(-q * Z, all_maps, depth, size, Q.dim, Q.period, Q.grading)


def complex_power_symbol(Q: Weight, z: Any = None, depth: int = DEFAULT_DEPTH) -> PolyhomSymbol:
    """
    Simbolo di Q^{-z} (ordine -q z). z = None lascia la dipendenza simbolica in Z.
    Ogni termine c xi^alpha |xi|^rho R^t diventa c P_t(z) c0^{-z-t+1} xi^alpha |xi|^{rho + q(-z-t+1)}.
    """
    if depth < 1:
        raise ValueError(f"Profondita' di troncamento non valida: {depth}")
    family = _power_family(Q, depth)
    return family if z is None else family.at(z)


@lru_cache(maxsize=None)
def log_symbol(Q: Weight, depth: int = DEFAULT_DEPTH) -> PolyhomSymbol:
    """sigma(log Q) = -d/dz sigma(Q^{-z}) in z = 0 (termini con log^1 |xi|)."""
    return symbol_scale(symbol_dz(_power_family(Q, depth)).at(0), -1)


# ==============================
#  h(Q)
# ==============================

H_KINDS = ("polynomial", "power", "composite")


@dataclass(frozen=True)
class HFunctionSpec:
    """
    Funzione h del calcolo funzionale:
      - polynomial: h(x) = sum_k c_k x^k
      - power:      h(x) = x^{-s}, Re s > 0
      - composite:  h(x) = (sum_k c_k x^k) x^{-s}
    """
    kind: str = "polynomial"
    coefficients: Tuple[Any, ...] = (1,)
    exponent: Any = 0

    def __post_init__(self):
        if self.kind not in H_KINDS:
            raise ValueError(f"Tipo di funzione h non supportato: {self.kind!r}")
        object.__setattr__(self, "coefficients", tuple(as_exact(c) for c in self.coefficients))
        object.__setattr__(self, "exponent", as_exact(self.exponent))
        if self.kind in ("polynomial", "composite"):
            if not self.coefficients or all(c == 0 for c in self.coefficients):
                raise ValueError("Polinomio h nullo o vuoto")
        if self.kind in ("power", "composite") and to_complex(self.exponent).real <= 0:
            raise ValueError(f"h(x) = x^(-s) richiede Re s > 0 (trovato s = {self.exponent})")

    @classmethod
    def identity(cls) -> "HFunctionSpec":
        return cls("polynomial", (1,))

    @classmethod
    def polynomial(cls, *coefficients: Any) -> "HFunctionSpec":
        return cls("polynomial", tuple(coefficients))

    @classmethod
    def power(cls, s: Any) -> "HFunctionSpec":
        return cls("power", (1,), s)

    @classmethod
    def composite(cls, coefficients: Sequence[Any], s: Any) -> "HFunctionSpec":
        return cls("composite", tuple(coefficients), s)

    def is_identity(self) -> bool:
        return self.kind == "polynomial" and self.power_terms() == [(sympy.Integer(1), sympy.Integer(0))]

    def degree(self) -> int:
        return max(k for k, c in enumerate(self.coefficients) if c != 0)

    def order(self, q: Any) -> sympy.Expr:
        """Ordine di h(Q) per un peso di ordine q."""
        q = as_exact(q)
        if self.kind == "polynomial":
            return self.degree() * q
        if self.kind == "power":
            return sympy.expand(-self.exponent * q)
        return sympy.expand((self.degree() - self.exponent) * q)

    def power_terms(self) -> List[Tuple[sympy.Expr, sympy.Expr]]:
        """h(w) = sum coef * w^p: lista di (coef, p)."""
        if self.kind == "power":
            return [(sympy.Integer(1), -self.exponent)]
        shift = -self.exponent if self.kind == "composite" else sympy.Integer(0)
        return [(c, sympy.Integer(k) + shift) for k, c in enumerate(self.coefficients) if c != 0]

    def evaluate(self, w: complex) -> complex:
        return sum(to_complex(c) * complex(w) ** to_complex(p) for c, p in self.power_terms())

    def describe(self) -> str:
        if self.kind == "power":
            return f"x^(-{self.exponent})"
        poly = " + ".join(f"{c}*x^{k}" for k, c in enumerate(self.coefficients) if c != 0)
        return poly if self.kind == "polynomial" else f"({poly})*x^(-{self.exponent})"


def _polynomial_of_weight(Q: Weight, coefficients: Sequence[sympy.Expr], depth: int) -> PolyhomSymbol:
    out = None
    for k, c in enumerate(coefficients):
        if c == 0:
            continue
        term = symbol_scale(star_power(Q.symbol.resized(depth), k, depth), c)
        out = term if out is None else symbol_add(out, term)
    return out


def h_of_weight(Q: Weight, h: HFunctionSpec, depth: int = DEFAULT_DEPTH) -> PolyhomSymbol:
    """
    Simbolo di h(Q): polinomio -> potenze star di sigma(Q); potenza -> Q^{-s};
    composito -> prodotto star dei due.
    """
    if h.kind == "polynomial":
        if h.is_identity():
            return identity_symbol(Q.size, Q.dim, Q.period, depth, Q.grading)
        return _polynomial_of_weight(Q, h.coefficients, depth)
    if h.kind == "power":
        return complex_power_symbol(Q, h.exponent, depth)
    if h.kind == "composite":
        return star_product(_polynomial_of_weight(Q, h.coefficients, depth),
                            complex_power_symbol(Q, h.exponent, depth), depth)
    raise ValueError(f"Tipo di funzione h non supportato: {h.kind!r}")
