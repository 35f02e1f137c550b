"""
zeta_engine.py
Famiglie olomorfe A(z) = P * h(Q) * Q^{-z} e germi meromorfi di z -> TR(A(z)).

- zeta_germ: parte principale e parte finita in un punto p (poli semplici)
- kv_residue_check: Res_{z = d_j} TR(A(z)) = (1/q) res(A(d_j))
- ps_fp_check: fp_{z = p} TR(A(z)) = TR(A(p)) + (1/q) res(A'(p))
- pole_report: KV su tutti i poli del troncamento e PS nei punti richiesti
- zeta_invariant, index_via_residue, eta_invariant

Il contributo di ogni termine c(z) xi^alpha |xi|^mu(z) log^l e' Vol (2 pi)^{-n} S_alpha mean(c) fp(s(z)),
s(z) = |alpha| + mu(z) + n; la regione interna |xi| < rho arriva da multipliers.InnerPart.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, List, Optional, Sequence, Tuple

import sympy

from config import DEFAULT_DEPTH, TOL_EXACT
from multipliers import InnerEntry, InnerPart, Multiplier, SignShiftMultiplier, TranslateSum
from resolvent_powers import HFunctionSpec, Weight, complex_power_symbol, h_of_weight, log_symbol
from symbol_core import (
    TWO_PI,
    Z,
    HomComponent,
    HomTerm,
    PolyhomSymbol,
    TrigPoly,
    as_exact,
    star_product,
    symbol_dz,
    symbol_from_terms,
    to_complex,
)
from trace_functionals import canonical_trace, radial_fp_value, sphere_integral, sres, wres


# ==============================
#  FAMIGLIE OLOMORFE
# ==============================

@dataclass(frozen=True)
class HoloFamily:
    """
    A(z) = P * h(Q) * Q^{-z}: P differenziale (None = identita'), h dal calcolo funzionale.
    smoothing: moltiplicatori regolarizzanti costanti in z (la loro traccia si somma al germe).
    """
    weight: Weight
    poly_factor: Optional[PolyhomSymbol] = None
    h_factor: HFunctionSpec = field(default_factory=HFunctionSpec.identity)
    depth: int = DEFAULT_DEPTH
    smoothing: Tuple[Multiplier, ...] = ()
    name: str = "F"

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError(f"Profondita' di troncamento non valida: {self.depth}")
        P = self.poly_factor
        if P is not None:
            if P.free_symbols():
                raise ValueError("Il fattore P non puo' dipendere da z")
            if not P.is_differential():
                raise ValueError("Il fattore P deve essere un simbolo differenziale")
            if P.size != self.weight.size or P.dim != self.weight.dim:
                raise ValueError("Fattore P incompatibile con il peso (taglia o dimensione)")
        for m in self.smoothing:
            if m.dim != self.weight.dim:
                raise ValueError("Moltiplicatore regolarizzante di dimensione diversa dal peso")
        object.__setattr__(self, "smoothing", tuple(self.smoothing))

    @property
    def q(self) -> sympy.Expr:
        return self.weight.order

    @property
    def dim(self) -> int:
        return self.weight.dim

    @property
    def period(self) -> sympy.Expr:
        return self.weight.period

    @property
    def size(self) -> int:
        return self.weight.size

    @property
    def base_order(self) -> sympy.Expr:
        """Ordine a di A(0)."""
        a = self.h_factor.order(self.q)
        if self.poly_factor is not None:
            a += self.poly_factor.order
        return sympy.expand(a)

    def symbol(self) -> PolyhomSymbol:
        return _family_symbol(self)

    def at(self, z: Any) -> PolyhomSymbol:
        return self.symbol().at(z)

    def pole(self, j: int) -> sympy.Expr:
        """Candidato polo d_j = (a + n - j) / q, j entro il troncamento."""
        if j < 0 or j >= self.depth:
            raise ValueError(f"Indice di polo {j} fuori dal troncamento (profondita' {self.depth})")
        return sympy.nsimplify(sympy.expand((self.base_order + self.dim - j) / self.q))

    def poles(self) -> List[sympy.Expr]:
        return [self.pole(j) for j in range(self.depth)]

    def smoothing_trace(self) -> complex:
        return sum((m.base_trace(self.period) for m in self.smoothing), 0j)

    def describe(self) -> str:
        p = "Id" if self.poly_factor is None else f"P(ordine {self.poly_factor.order})"
        return f"{self.name}: {p} * h(Q)[{self.h_factor.describe()}] * Q^(-z), q = {self.q}, patch {self.weight.patch}"


@lru_cache(maxsize=None)
def _family_symbol(F: HoloFamily) -> PolyhomSymbol:
    W = F.weight
    depth = F.depth
    out = complex_power_symbol(W, None, depth)
    if not F.h_factor.is_identity():
        out = star_product(h_of_weight(W, F.h_factor, depth), out, depth)
    if F.poly_factor is not None:
        out = star_product(F.poly_factor.resized(depth), out, depth)
    return out


def family_symbol_at(F: HoloFamily, z: Any) -> PolyhomSymbol:
    return F.at(as_exact(z))


# ==============================
#  PARTE INTERNA
# ==============================

def _averaged_terms(comps: Tuple[HomComponent, ...]):
    out = []
    for comp in comps:
        for t in comp.terms:
            mean = t.coeff.mean()
            if mean != 0:
                out.append((t.monomial, t.radial_exp, mean))
    return tuple(out)


def inner_part_for(F: HoloFamily, graded: bool = False) -> InnerPart:
    """
    Regione interna secondo la patch del peso:
      base -> patched, raggio 1 (peso sostituito da 1)
      band -> multiplier, raggio sqrt(eps), peso w + 1
      none -> multiplier, raggio 1, peso w
    """
    W = F.weight
    n = F.dim
    if graded and W.grading is None:
        raise ValueError("Germe graduato richiesto per un peso senza graduazione")
    signs = W.grading if graded else (1,) * F.size
    one = ((tuple([0] * n), sympy.Integer(0), sympy.Integer(1)),)
    entries = []
    for i in range(F.size):
        poly = one if F.poly_factor is None else _averaged_terms(F.poly_factor.entry(i, i))
        entries.append(InnerEntry(poly, _averaged_terms(W.diagonal_entry(i)), signs[i]))
    vol = F.period ** n / TWO_PI ** n
    h_terms = tuple(F.h_factor.power_terms())
    if W.patch == "base":
        return InnerPart("patched", n, 1, vol, tuple(entries), h_terms)
    if W.patch == "band":
        return InnerPart("multiplier", n, sympy.sqrt(W.spectral_eps), vol, tuple(entries), h_terms, shift=1)
    return InnerPart("multiplier", n, 1, vol, tuple(entries), h_terms)


# ==============================
#  GERMI MEROMORFI
# ==============================

@dataclass(frozen=True)
class MeromorphicGerm:
    """
    TR(A(z)) ~ principal / (z - p) + finite + sum_k higher[k] (z - p)^{k+1}.
    higher resta vuoto: il motore calcola solo parte principale e parte finita.
    """
    point: sympy.Expr
    principal: complex
    finite: complex
    outer: complex
    inner: complex
    smoothing: complex
    higher: Tuple[complex, ...] = ()

    @property
    def has_pole(self) -> bool:
        return abs(self.principal) > TOL_EXACT


def zeta_germ(F: HoloFamily, p: Any, graded: bool = False) -> MeromorphicGerm:
    """Germe di z -> TR(A(z)) (o STR se graded) in z = p, con escissione netta al raggio della parte interna."""
    p = as_exact(p)
    sym = F.symbol()
    inner = inner_part_for(F, graded)
    rho = inner.radius
    n = F.dim
    vol_norm = F.period ** n / TWO_PI ** n
    signs = F.weight.grading if graded else (1,) * F.size
    principal = sympy.Integer(0)
    finite = sympy.Integer(0)
    for i in range(F.size):
        for comp in sym.entry(i, i):
            for t in comp.terms:
                S = sphere_integral(t.monomial)
                if S == 0:
                    continue
                A = sympy.expand(signs[i] * vol_norm * S * t.coeff.mean())
                if A == 0:
                    continue
                s = sympy.expand(sum(t.monomial) + t.radial_exp + n)
                s_p = sympy.expand(s.subs(Z, p))
                A_p = A.subs(Z, p)
                if s_p != 0:
                    finite += A_p * radial_fp_value(s_p, t.log_power, rho)
                    continue
                if t.log_power:
                    raise ValueError(f"Polo multiplo in z = {p}: termine con log^{t.log_power} di grado -n")
                slope = sympy.expand(sympy.diff(s, Z))
                if slope == 0:
                    finite += A_p * radial_fp_value(0, 0, rho)
                    continue
                # A(z) * (-rho^s / s), s = slope (z - p)
                principal += -A_p / slope
                finite += -(sympy.diff(A, Z).subs(Z, p) + A_p * slope * sympy.log(rho)) / slope
    outer = to_complex(finite)
    inner_val = inner.value(p)
    smooth = 0j if graded else F.smoothing_trace()
    return MeromorphicGerm(p, to_complex(principal), outer + inner_val + smooth, outer, inner_val, smooth)


def zeta_invariant(F: HoloFamily) -> complex:
    """fp_{z=0} TR(A(z)): per A = Q^{-z} e' zeta_Q(0) (nucleo escluso dalla patch)."""
    return zeta_germ(F, 0).finite


# ==============================
#  CONTROLLI KV / PS
# ==============================

@dataclass(frozen=True)
class KVCheck:
    family: str
    j: int
    pole: sympy.Expr
    lhs: complex
    rhs: complex
    passed: bool

    @property
    def error(self) -> float:
        return abs(self.lhs - self.rhs)


@dataclass(frozen=True)
class PSCheck:
    family: str
    point: sympy.Expr
    fp: complex
    tr_term: complex
    res_term: complex
    passed: bool

    @property
    def error(self) -> float:
        return abs(self.fp - self.tr_term - self.res_term)


def kv_residue_check(F: HoloFamily, j: int, residue: Optional[Callable[[PolyhomSymbol], Any]] = None,
                     tol: float = TOL_EXACT) -> KVCheck:
    """Res_{z = d_j} TR(A(z)) contro (1/q) res(A(d_j))."""
    d = F.pole(j)
    res_fn = residue or wres
    germ = zeta_germ(F, d)
    rhs = to_complex(res_fn(family_symbol_at(F, d))) / to_complex(F.q)
    return KVCheck(F.name, j, d, germ.principal, rhs, abs(germ.principal - rhs) <= tol)


def ps_fp_check(F: HoloFamily, j: Optional[int] = None, point: Any = None, tol: float = TOL_EXACT,
                trace: Optional[Callable[..., Any]] = None,
                residue: Optional[Callable[[PolyhomSymbol], Any]] = None) -> PSCheck:
    """
    fp_{z = p} TR(A(z)) contro TR(A(p)) + (1/q) res(A'(p)).
    TR(A(p)) = 0 se A(p) e' differenziale; altrimenti serve un ordine non intero o < -n.
    """
    if point is None:
        if j is None:
            raise ValueError("Serve j oppure point")
        point = F.pole(j)
    p = as_exact(point)
    trace_fn = trace or canonical_trace
    res_fn = residue or wres
    germ = zeta_germ(F, p)
    A_p = family_symbol_at(F, p)
    if A_p.is_differential():
        tr_term = F.smoothing_trace()
    else:
        inner = inner_part_for(F)
        tr_term = to_complex(trace_fn(A_p, radius=inner.radius)) + inner.value(p) + F.smoothing_trace()
    res_term = to_complex(res_fn(symbol_dz(F.symbol()).at(p))) / to_complex(F.q)
    passed = abs(germ.finite - tr_term - res_term) <= tol
    return PSCheck(F.name, p, germ.finite, tr_term, res_term, passed)


@dataclass(frozen=True)
class PoleReport:
    """Poli d_j del troncamento con il germe in ciascuno, KV per polo e PS nei punti richiesti."""
    family: str
    poles: Tuple[sympy.Expr, ...]
    germs: Tuple[MeromorphicGerm, ...]
    kv: Tuple[KVCheck, ...]
    ps: Tuple[PSCheck, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.kv) and all(c.passed for c in self.ps)

    @property
    def errors(self) -> List[float]:
        return [c.error for c in self.kv] + [c.error for c in self.ps]


def pole_report(F: HoloFamily, tol: float = TOL_EXACT, points: Sequence[Any] = (0,),
                trace: Optional[Callable[..., Any]] = None,
                residue: Optional[Callable[[PolyhomSymbol], Any]] = None) -> PoleReport:
    """KV su ogni polo del troncamento, PS nei punti dati; trace / residue sostituiscono TR / wres."""
    poles = tuple(F.poles())
    germs = tuple(zeta_germ(F, d) for d in poles)
    kv = tuple(kv_residue_check(F, j, residue=residue, tol=tol) for j in range(F.depth))
    ps = tuple(ps_fp_check(F, point=p, tol=tol, trace=trace, residue=residue) for p in points)
    return PoleReport(F.name, poles, germs, kv, ps)


# ==============================
#  INDICE ED ETA
# ==============================

def index_via_residue(F: HoloFamily) -> complex:
    """ind = -(1/q) sres(log Q) per un peso graduato Q = diag(D*D, DD*)."""
    W = F.weight
    if W.grading is None:
        raise ValueError("Indice via residuo: il peso non ha graduazione")
    return -to_complex(sres(log_symbol(W, F.depth))) / to_complex(F.q)


def shifted_sign_family(a: Any, depth: int = DEFAULT_DEPTH, period: Any = TWO_PI) -> HoloFamily:
    """D_a = -i d/dx + a su S^1: A(z) = D_a (D_a^2)^{-1/2} (D_a^2)^{-z}."""
    a = as_exact(a)
    one = TrigPoly.constant(1, dim=1, period=period)
    D = symbol_from_terms([HomTerm(one, (1,), 0, 0), HomTerm(one.scale(a), (0,), 0, 0)],
                          depth=depth, order=1, dim=1, period=period)
    W = Weight(star_product(D, D, depth))
    return HoloFamily(W, D, HFunctionSpec.power(sympy.Rational(1, 2)), depth, name=f"eta(a={a})")


@dataclass(frozen=True)
class EtaBreakdown:
    a: sympy.Expr
    symbolic: complex
    smoothing: TranslateSum

    @property
    def value(self) -> complex:
        return self.symbolic + self.smoothing.value


def eta_breakdown(a: Any, depth: int = DEFAULT_DEPTH, method: str = "lerch") -> EtaBreakdown:
    """
    eta(0) di -i d/dx + a: a ridotto alla parte frazionaria (a intero escluso: nucleo non banale).
    Parte simbolica (esterna + interna) + parte regolarizzante sgn(xi + a) - sgn del simbolo.
    """
    a = as_exact(a)
    if a.is_integer:
        raise ValueError(f"eta non definito con nucleo: a = {a} intero")
    a = a - sympy.floor(a)
    F = shifted_sign_family(a, depth)
    symbolic = zeta_germ(F, 0).finite
    smoothing = SignShiftMultiplier(a).offdiagonal_trace(F.period, method=method)
    return EtaBreakdown(a, symbolic, smoothing)


def eta_invariant(a: Any, depth: int = DEFAULT_DEPTH) -> complex:
    return eta_breakdown(a, depth).value
