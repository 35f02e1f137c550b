"""
trace_functionals.py
Le due forme lineari locali sui simboli classici:
- residuo di Wodzicki (densita' puntuale e valore globale)
- traccia canonica (integrale a parte finita del simbolo completo)
con le varianti Z_2-graduate (supertracce) e gli integrali esatti su sfera e parte finita radiale.

Normalizzazione (2 pi)^{-n} applicata a livello di densita'. I valori sono esatti (sympy).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import factorial
from typing import Any, List, Optional, Tuple

import sympy

from symbol_core import (
    TWO_PI,
    HomComponent,
    HomTerm,
    MultiIndex,
    PolyhomSymbol,
    TrigPoly,
    as_exact,
    trig_domain_integral,
)


# ==============================
#  INTEGRALI SULLA SFERA
# ==============================

@lru_cache(maxsize=None)
def sphere_integral(alpha: MultiIndex) -> sympy.Expr:
    """int_{S^{n-1}} xi^alpha dS = 2 prod Gamma((alpha_i+1)/2) / Gamma((|alpha|+n)/2), 0 se un alpha_i e' dispari."""
    alpha = tuple(int(a) for a in alpha)
    if any(a % 2 for a in alpha):
        return sympy.Integer(0)
    n = len(alpha)
    num = sympy.Integer(2)
    for a in alpha:
        num *= sympy.gamma(sympy.Rational(a + 1, 2))
    return sympy.simplify(num / sympy.gamma(sympy.Rational(sum(alpha) + n, 2)))


@dataclass(frozen=True)
class SphereIntegralTable:
    """Tabella immutabile degli integrali di monomi su S^{n-1} (cache condivisa thread-safe)."""
    dim: int

    def value(self, alpha: MultiIndex) -> sympy.Expr:
        if len(alpha) != self.dim:
            raise ValueError(f"Multi-indice {alpha} incompatibile con la dimensione {self.dim}")
        return sphere_integral(tuple(alpha))


def ball_integral(alpha: MultiIndex, mu: Any, radius: Any = 1) -> sympy.Expr:
    """int_{|xi| < radius} xi^alpha |xi|^mu dxi = S_alpha radius^e / e, e = |alpha| + mu + n."""
    s = sphere_integral(tuple(alpha))
    if s == 0:
        return sympy.Integer(0)
    e = sympy.expand(sum(alpha) + as_exact(mu) + len(alpha))
    if e == 0:
        raise ValueError("Integrale sulla palla divergente (esponente radiale -n)")
    return s * as_exact(radius) ** e / e


# ==============================
#  DENSITA' SULLA BASE
# ==============================

@dataclass(frozen=True)
class DensityOnBase:
    """Coefficiente di densita' sul toro nella carta globale."""
    value: TrigPoly

    def integral(self) -> sympy.Expr:
        return trig_domain_integral(self.value)


def _normalization(dim: int) -> sympy.Expr:
    return TWO_PI ** (-dim)


def _traced_entries(sig: PolyhomSymbol, graded: bool) -> List[Tuple[int, Tuple[HomComponent, ...]]]:
    if graded and sig.grading is None:
        raise ValueError("Supertraccia richiesta su un simbolo senza graduazione")
    signs = sig.grading if graded else (1,) * sig.size
    return [(signs[i], sig.entry(i, i)) for i in range(sig.size)]


def res_density(sig: PolyhomSymbol, graded: bool = False) -> DensityOnBase:
    """
    Densita' del residuo: (2 pi)^{-n} tr int_{S^{n-1}} sigma_{-n}(x, xi) dS, solo parte senza log
    (i termini log^l, l >= 1, di grado -n sono esclusi: residuo esteso).
    """
    n = sig.dim
    acc = TrigPoly({}, dim=n, period=sig.period)
    norm = _normalization(n)
    for sign, comps in _traced_entries(sig, graded):
        for comp in comps:
            if sympy.expand(comp.degree + n) != 0:
                continue
            for t in comp.terms:
                if t.log_power:
                    continue
                s = sphere_integral(t.monomial)
                if s != 0:
                    acc = acc + t.coeff.scale(sign * s * norm)
    return DensityOnBase(acc)


def wres(sig: PolyhomSymbol) -> sympy.Expr:
    """Residuo di Wodzicki globale: integrale della densita' sul dominio fondamentale."""
    return sympy.simplify(res_density(sig).integral())


def sres(sig: PolyhomSymbol) -> sympy.Expr:
    """Super-residuo: res(sigma_++) - res(sigma_--) secondo la graduazione."""
    return sympy.simplify(res_density(sig, graded=True).integral())


# ==============================
#  PARTE FINITA RADIALE
# ==============================

def radial_fp_value(s: Any, log_power: int = 0, radius: Any = 1) -> sympy.Expr:
    """
    fp_{R -> oo} int_radius^R r^{s-1} log^l r dr.
    Per radius = 1: (-1)^{l+1} l! / s^{l+1}; per s = 0: -log^{l+1}(radius) / (l+1).
    """
    s = sympy.expand(as_exact(s))
    radius = as_exact(radius)
    log_r = sympy.log(radius)
    if s == 0:
        return -log_r ** (log_power + 1) / (log_power + 1)
    total = sympy.Integer(0)
    for k in range(log_power + 1):
        total += (-1) ** k * sympy.Integer(factorial(log_power) // factorial(log_power - k)) \
            * log_r ** (log_power - k) / s ** (k + 1)
    return -radius ** s * total


@dataclass(frozen=True)
class RadialFinitePart:
    """
    Parte finita radiale di un termine, con fattore di sfera e normalizzazione (2 pi)^{-n}.
    pole segnala grado d = -n: pole_order = l + 1 nella variabile s = d + n,
    pole_coeff e' il coefficiente di s^{-(l+1)} della funzione radiale.
    """
    degree: sympy.Expr
    log_power: int
    dim: int
    radius: sympy.Expr
    sphere_factor: sympy.Expr
    normalization: sympy.Expr
    pole: bool
    pole_order: int
    pole_coeff: sympy.Expr
    finite_part: sympy.Expr

    @property
    def prefactor(self) -> sympy.Expr:
        return self.sphere_factor * self.normalization

    @property
    def value(self) -> sympy.Expr:
        """Contributo per unita' di volume: prefattore * parte finita radiale."""
        return sympy.simplify(self.prefactor * self.finite_part)

    def as_function(self, s: sympy.Symbol) -> sympy.Expr:
        """Parte finita come funzione meromorfa di s = d + n."""
        return radial_fp_value(s, self.log_power, self.radius) if self.radius != 1 else \
            (-1) ** (self.log_power + 1) * factorial(self.log_power) / s ** (self.log_power + 1)


def radial_finite_part(term: HomTerm, dim: Optional[int] = None, radius: Any = 1) -> RadialFinitePart:
    """Parte finita di int_radius^R r^{d+n-1} log^l r dr per il termine dato (escissione netta)."""
    n = len(term.monomial) if dim is None else int(dim)
    d = term.degree
    s = sympy.expand(d + n)
    ell = int(term.log_power)
    pole = s == 0
    return RadialFinitePart(
        degree=d,
        log_power=ell,
        dim=n,
        radius=as_exact(radius),
        sphere_factor=sphere_integral(term.monomial),
        normalization=_normalization(n),
        pole=pole,
        pole_order=ell + 1 if pole else 0,
        pole_coeff=sympy.Integer((-1) ** (ell + 1) * factorial(ell)) if pole else sympy.Integer(0),
        finite_part=radial_fp_value(s, ell, radius),
    )


# ==============================
#  TRACCIA CANONICA
# ==============================

def check_trace_order(sig: PolyhomSymbol) -> None:
    """Ordini interi >= -n sono esclusi dalla traccia canonica."""
    order = sympy.expand(sig.order)
    if order.free_symbols:
        raise ValueError(f"Ordine dipendente da parametri: {order}")
    if order.is_integer and int(order) >= -sig.dim:
        raise ValueError(f"Traccia canonica non definita: ordine intero {order} >= -{sig.dim}")


def _canonical(sig: PolyhomSymbol, radius: Any, graded: bool) -> sympy.Expr:
    check_trace_order(sig)
    n = sig.dim
    factor = sig.period ** n * _normalization(n)
    total = sympy.Integer(0)
    for sign, comps in _traced_entries(sig, graded):
        for comp in comps:
            for t in comp.terms:
                s = sphere_integral(t.monomial)
                if s == 0:
                    continue
                mean = t.coeff.mean()
                if mean == 0:
                    continue
                total += sign * s * mean * radial_fp_value(t.degree + n, t.log_power, radius)
    return sympy.simplify(factor * total)


def canonical_trace(sig: PolyhomSymbol, radius: Any = 1) -> sympy.Expr:
    """
    TR: somma su componenti e termini di sfera * parte finita radiale, integrata sul dominio fondamentale.
    Per ordine < -n coincide con l'integrale convergente del simbolo escisso.
    """
    return _canonical(sig, radius, graded=False)


def canonical_supertrace(sig: PolyhomSymbol, radius: Any = 1) -> sympy.Expr:
    return _canonical(sig, radius, graded=True)
