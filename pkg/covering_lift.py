"""
covering_lift.py
Sollevamento al rivestimento universale R^n -> T^n = R^n / (L Z)^n.

- CoveringSpec: periodo, epsilon di localita' (eps < L/2), raggio r0
- lift / project dei simboli (coefficienti periodici: i dati coincidono)
- scomposizione eps-locale: nuclei fuori diagonale dei termini escissi, della regione interna e dei regolarizzanti
- funzionali Gamma: residuo, traccia canonica, traccia dei regolarizzanti sul dominio fondamentale
- confronto base / rivestimento (Q_eps con patch sulla banda), indice L^2, eta_Gamma
- consistenza di Poisson e identita' theta (parte fuori diagonale sulle traslazioni gamma != 0)
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any, Callable, List, Optional, Sequence, Tuple

import mpmath
import numpy as np
import sympy
from scipy.integrate import quad

from config import (
    DEFAULT_DEPTH,
    LOCALITY_EPS_FRACTION,
    MPMATH_DPS,
    TOL_EXACT,
    TOL_ORACLE,
    TOL_POISSON,
    TOL_THETA,
)
from multipliers import (
    BandProjector,
    ExcisedPower,
    GaussianMultiplier,
    InnerPart,
    IntervalMultiplier,
    Multiplier,
    ProfileMultiplier,
    TranslateSum,
)
from resolvent_powers import log_symbol
from symbol_core import TWO_PI, HomTerm, PolyhomSymbol, TrigPoly, _same_period, as_exact, to_complex
from trace_functionals import canonical_supertrace, canonical_trace, sres, wres
from zeta_engine import (
    HoloFamily,
    PoleReport,
    eta_invariant,
    family_symbol_at,
    inner_part_for,
    pole_report,
    shifted_sign_family,
    zeta_germ,
)


# ==============================
#  GEOMETRIA DEL RIVESTIMENTO
# ==============================

@dataclass(frozen=True)
class CoveringSpec:
    """Rivestimento R^n del toro di periodo L; eps e' il raggio di localita' dei nuclei (0 < eps < L/2)."""
    period: Any = TWO_PI
    dim: int = 1
    epsilon: Any = None
    r0: Any = None

    def __post_init__(self):
        period = as_exact(self.period)
        object.__setattr__(self, "period", period)
        if to_complex(period).real <= 0:
            raise ValueError(f"Periodo non positivo: {period}")
        if self.dim < 1:
            raise ValueError(f"Dimensione non valida: {self.dim}")
        eps = period * as_exact(LOCALITY_EPS_FRACTION) if self.epsilon is None else as_exact(self.epsilon)
        object.__setattr__(self, "epsilon", eps)
        e = to_complex(eps).real
        if e <= 0 or e >= to_complex(period).real / 2:
            raise ValueError(f"Epsilon di localita' fuori da (0, L/2): {eps}")
        object.__setattr__(self, "r0", period if self.r0 is None else as_exact(self.r0))

    @property
    def volume(self) -> sympy.Expr:
        """Volume del dominio fondamentale."""
        return self.period ** self.dim

    def compatible(self, sig: PolyhomSymbol) -> bool:
        return sig.dim == self.dim and _same_period(sig.period, self.period)


@dataclass(frozen=True)
class LiftedSymbol:
    """Simbolo Gamma-invariante sul rivestimento: stessi dati del simbolo sulla base."""
    symbol: PolyhomSymbol
    cover: CoveringSpec


def lift_symbol(sig: PolyhomSymbol, cover: CoveringSpec) -> LiftedSymbol:
    if not cover.compatible(sig):
        raise ValueError("Simbolo incompatibile con il rivestimento (dimensione o periodo)")
    return LiftedSymbol(sig, cover)


def project_symbol(lifted: LiftedSymbol) -> PolyhomSymbol:
    return lifted.symbol


@dataclass(frozen=True)
class OffDiagonalKernel:
    """
    Nucleo K(x, x + gamma) = c(x) (2 pi)^{-n} f^(-gamma) di un termine c(x) f(xi) sulle traslazioni gamma.
    coeff None: moltiplicatore puro (c = 1).
    """
    multiplier: Multiplier
    cover: CoveringSpec
    coeff: Optional[TrigPoly] = None

    def value(self, gamma: float, x: float = 0.0) -> complex:
        c = 1.0 if self.coeff is None else self.coeff.evaluate(x)
        return c * self.multiplier.kernel_value(gamma)

    def coefficient_mean(self) -> complex:
        """(1 / L) int_0^L c(x) dx: esatta per coefficienti costanti, per quadratura altrimenti."""
        if self.coeff is None:
            return 1 + 0j
        if self.coeff.is_constant():
            return to_complex(self.coeff.mean())
        L = to_complex(self.cover.period).real
        re = quad(lambda x: self.coeff.evaluate(x).real, 0.0, L, limit=200, epsabs=1e-13, epsrel=1e-12)[0]
        im = quad(lambda x: self.coeff.evaluate(x).imag, 0.0, L, limit=200, epsabs=1e-13, epsrel=1e-12)[0]
        return complex(re, im) / L

    def translate_sum(self) -> TranslateSum:
        """int_F sum_{gamma != 0} K(x, x + gamma) dx con la normalizzazione della traccia sul toro."""
        ts = self.multiplier.offdiagonal_trace(self.cover.period)
        if self.coeff is None:
            return ts
        c = self.coefficient_mean()
        method = ts.method if self.coeff.is_constant() else f"{ts.method}+quad"
        return TranslateSum(c * ts.value, abs(c) * ts.bound, ts.terms, method)


@dataclass(frozen=True)
class EpsLocalDecomposition:
    """
    A = A_eps + S sul rivestimento: A_eps ha lo stesso simbolo e nucleo nella striscia |x - y| < eps,
    S porta i nuclei fuori diagonale (termini escissi, regione interna, regolarizzanti aggiunti).
    """
    local: LiftedSymbol
    kernels: Tuple[OffDiagonalKernel, ...] = ()

    def offdiagonal_trace(self) -> TranslateSum:
        value = 0j
        bound = 0.0
        terms = 0
        methods = []
        for k in self.kernels:
            ts = k.translate_sum()
            value += ts.value
            bound += ts.bound
            terms = max(terms, ts.terms)
            if ts.method not in methods:
                methods.append(ts.method)
        return TranslateSum(value, bound, terms, "+".join(methods) if methods else "differenziale")


def _is_polynomial_term(t: HomTerm) -> bool:
    mu = t.radial_exp
    return t.log_power == 0 and mu.is_Integer and int(mu) >= 0 and int(mu) % 2 == 0


def eps_local_decompose(lifted: LiftedSymbol, smoothing: Sequence[Multiplier] = (),
                        inner: Sequence[Multiplier] = (), radius: Any = 1) -> EpsLocalDecomposition:
    """
    Parte fuori diagonale di sigma(x, D) escisso a |xi| >= radius (simboli scalari, n = 1):
    ogni termine c(x) sgn(xi)^k |xi|^p diventa una potenza escissa con coefficiente c(x);
    i termini polinomiali hanno nucleo sulla diagonale e non contribuiscono.
    `inner` modella la regione |xi| < radius, `smoothing` i regolarizzanti aggiunti.
    """
    sig = lifted.symbol
    cover = lifted.cover
    if sig.free_symbols():
        raise ValueError("Simbolo dipendente da z: valutare la famiglia in un punto")
    kernels: List[OffDiagonalKernel] = []
    terms = [t for t in sig.terms() if not t.coeff.is_zero() and not _is_polynomial_term(t)]
    if terms and (sig.dim != 1 or sig.size != 1):
        raise ValueError("Nuclei fuori diagonale dei termini simbolici solo per simboli scalari in n = 1")
    for t in terms:
        if t.log_power:
            raise ValueError("Termini logaritmici non supportati nella scomposizione eps-locale")
        k = t.monomial[0]
        power = ExcisedPower(1, sympy.expand(k + t.radial_exp), k % 2, radius)
        kernels.append(OffDiagonalKernel(power, cover, t.coeff))
    kernels.extend(OffDiagonalKernel(m, cover) for m in tuple(inner) + tuple(smoothing))
    return EpsLocalDecomposition(lifted, tuple(kernels))


# ==============================
#  FUNZIONALI GAMMA
# ==============================

@dataclass(frozen=True)
class GammaValue:
    kind: str
    value: complex


def gamma_res(lifted: LiftedSymbol, graded: bool = False) -> GammaValue:
    """res_Gamma: densita' del residuo integrata sul dominio fondamentale."""
    val = sres(lifted.symbol) if graded else wres(lifted.symbol)
    return GammaValue("res", to_complex(val))


def gamma_tr_canonical(lifted: LiftedSymbol, radius: Any = 1, graded: bool = False) -> GammaValue:
    val = canonical_supertrace(lifted.symbol, radius) if graded else canonical_trace(lifted.symbol, radius)
    return GammaValue("canonical", to_complex(val))


def gamma_tr_smoothing(smoothing: Sequence[Multiplier], cover: CoveringSpec) -> GammaValue:
    """tr_Gamma(S) = Vol (2 pi)^{-n} int f: solo la diagonale del nucleo, nessuna traslazione."""
    return GammaValue("smoothing", sum((m.base_trace(cover.period) for m in smoothing), 0j))


def _gamma_wres(cover: CoveringSpec) -> Callable[[PolyhomSymbol], complex]:
    return lambda sig: gamma_res(lift_symbol(sig, cover)).value


def _gamma_tr(cover: CoveringSpec) -> Callable[..., complex]:
    return lambda sig, radius=1: gamma_tr_canonical(lift_symbol(sig, cover), radius).value


# ==============================
#  FAMIGLIE SUL RIVESTIMENTO
# ==============================

def covering_family(F: HoloFamily, cover: CoveringSpec,
                    smoothing: Sequence[Multiplier] = ()) -> HoloFamily:
    """
    Famiglia sollevata: la patch sull'autovalore 0 della base diventa il proiettore di banda
    1_{[0, eps]}(Q) (spettro continuo vicino a 0). Regolarizzanti aggiuntivi opzionali.
    """
    if F.dim != cover.dim or not _same_period(F.period, cover.period):
        raise ValueError("Famiglia incompatibile con il rivestimento")
    W = F.weight.with_patch("band") if F.weight.patch == "base" else F.weight
    return replace(F, weight=W, smoothing=tuple(F.smoothing) + tuple(smoothing), name=f"{F.name}~")


def lifted_defect_check(F: HoloFamily, cover: CoveringSpec, tol: float = TOL_EXACT,
                        points: Sequence[Any] = (0,)) -> PoleReport:
    """KV su tutti i poli del troncamento e PS nei punti dati, con i funzionali Gamma."""
    Fc = covering_family(F, cover)
    return pole_report(Fc, tol, points, trace=_gamma_tr(cover), residue=_gamma_wres(cover))


def _averaged_value(sig: PolyhomSymbol, xi: Any) -> complex:
    """tr sigma(x, xi) mediato in x, nel punto xi != 0."""
    point = np.atleast_1d(np.asarray(xi, dtype=float))
    r = float(np.linalg.norm(point))
    total = 0j
    for i in range(sig.size):
        for comp in sig.entry(i, i):
            for t in comp.terms:
                mono = float(np.prod(point ** np.asarray(t.monomial, dtype=float)))
                total += to_complex(t.coeff.mean()) * mono * r ** to_complex(t.radial_exp) * np.log(r) ** t.log_power
    return complex(total)


def smoothing_difference(F: HoloFamily, Fc: HoloFamily, point: Any = 0) -> ProfileMultiplier:
    """
    f_cov - f_base in z = point. Fuori dalla palla di raggio max(rho_base, rho_cov) entrambe valgono il simbolo
    mediato, dentro ciascuna usa la propria regione interna: la differenza ha supporto compatto.
    """
    p = as_exact(point)
    sym = family_symbol_at(F, p)
    parts = [(inner, to_complex(inner.radius).real) for inner in (inner_part_for(F), inner_part_for(Fc))]

    def full(inner: InnerPart, rho: float, xi: Any) -> complex:
        if float(np.linalg.norm(np.atleast_1d(np.asarray(xi, dtype=float)))) < rho:
            return inner.profile(p, xi)
        return _averaged_value(sym, xi)

    (inner_b, rb), (inner_c, rc) = parts

    def profile(xi: Any) -> complex:
        return full(inner_c, rc, xi) - full(inner_b, rb, xi)

    return ProfileMultiplier(profile, max(rb, rc), F.dim, (min(rb, rc),))


@dataclass(frozen=True)
class TraceComparison:
    base_value: complex
    cover_value: complex
    smoothing_value: complex
    principal_difference: float
    passed: bool

    @property
    def difference(self) -> complex:
        return self.cover_value - self.base_value

    @property
    def error(self) -> float:
        return abs(self.difference - self.smoothing_value)


def comparison_trace(F: HoloFamily, cover: CoveringSpec, Fcov: Optional[HoloFamily] = None,
                     point: Any = 0, tol: float = TOL_ORACLE) -> TraceComparison:
    """
    fp(rivestimento) - fp(base) in z = point contro la traccia Gamma della differenza regolarizzante
    (profili delle regioni interne + regolarizzanti aggiunti). I simboli delle due famiglie devono coincidere.
    """
    Fc = covering_family(F, cover) if Fcov is None else Fcov
    if not F.symbol().equivalent(Fc.symbol()):
        raise ValueError(f"Simboli non equivalenti tra {F.name} e {Fc.name}: differenza non regolarizzante")
    p = as_exact(point)
    base = zeta_germ(F, p)
    lifted = zeta_germ(Fc, p)
    smooth = gamma_tr_smoothing([smoothing_difference(F, Fc, p)], cover).value \
        + gamma_tr_smoothing(Fc.smoothing, cover).value - gamma_tr_smoothing(F.smoothing, cover).value
    principal = abs(lifted.principal - base.principal)
    cmp = TraceComparison(base.finite, lifted.finite, smooth, principal, False)
    return replace(cmp, passed=cmp.error <= tol and principal <= TOL_EXACT)


@dataclass(frozen=True)
class LiftedZetaEquality:
    base_value: complex
    cover_value: complex
    holds: bool
    note: str


def lifted_zeta_equality(F: HoloFamily, cover: CoveringSpec, tol: float = TOL_EXACT) -> LiftedZetaEquality:
    """zeta_Gamma(Q)(0) = zeta(Q_eps)(0) per h = 1; con h != 1 la discrepanza viene riportata."""
    cmp = comparison_trace(F, cover, tol=max(tol, TOL_ORACLE))
    holds = abs(cmp.difference) <= tol
    if F.h_factor.is_identity():
        note = "uguaglianza attesa (h = 1)"
    else:
        note = "h != 1: discrepanza ammessa" if not holds else "h != 1: uguaglianza osservata"
    if not cmp.passed:
        note += f"; differenza non spiegata dalla parte regolarizzante ({cmp.error:.3g})"
    return LiftedZetaEquality(cmp.base_value, cmp.cover_value, holds, note)


def l2_index(F: HoloFamily, cover: CoveringSpec) -> complex:
    """Indice L^2 di Atiyah: -(1/q) sres_Gamma(log Q~) sul simbolo logaritmico graduato sollevato."""
    W = covering_family(F, cover).weight
    if W.grading is None:
        raise ValueError("Indice L^2: il peso non ha graduazione")
    lifted = lift_symbol(log_symbol(W, F.depth), cover)
    return -gamma_res(lifted, graded=True).value / to_complex(F.q)


# ==============================
#  ETA SUL RIVESTIMENTO
# ==============================

@dataclass(frozen=True)
class EtaGamma:
    a: sympy.Expr
    value: complex
    base: complex
    difference: TranslateSum
    passed: bool

    @property
    def error(self) -> float:
        return abs(self.base - self.value - self.difference.value)


def _sign_shift_inner(a: sympy.Expr, radius: Any) -> Tuple[IntervalMultiplier, IntervalMultiplier]:
    """sgn(xi + a) sulla regione |xi| < radius (0 < a < radius)."""
    return IntervalMultiplier(-a, radius, 1), IntervalMultiplier(-radius, -a, -1)


def eta_gamma(a: Any, depth: int = DEFAULT_DEPTH, cover: Optional[CoveringSpec] = None,
              tol: float = TOL_ORACLE) -> EtaGamma:
    """
    eta_Gamma di -i d/dx + a su R: parte finita in z = 0 della traccia Gamma canonica della famiglia
    sollevata. Nel riferimento ricentrato (xi -> xi - a) l'integrando e' dispari e il valore e' 0.
    La differenza eta - eta_Gamma viene dai nuclei fuori diagonale della scomposizione eps-locale
    in z = 0 (termini escissi + sgn(xi + a) sulla regione interna) ed e' confrontata con eta sul cerchio.
    """
    cover = cover or CoveringSpec()
    if cover.dim != 1 or not _same_period(cover.period, TWO_PI):
        raise ValueError("eta_Gamma: modello piatto su R sopra S^1 di periodo 2 pi")
    a = as_exact(a)
    if a.is_integer:
        raise ValueError(f"eta non definito con nucleo: a = {a} intero")
    a = a - sympy.floor(a)
    Fc = covering_family(shifted_sign_family(a, depth, cover.period), cover)
    value = zeta_germ(Fc, 0).finite
    radius = inner_part_for(Fc).radius
    dec = eps_local_decompose(lift_symbol(family_symbol_at(Fc, 0), cover),
                              inner=_sign_shift_inner(a, radius), radius=radius)
    diff = dec.offdiagonal_trace()
    base = eta_invariant(a, depth)
    eg = EtaGamma(a, value, base, diff, False)
    return replace(eg, passed=abs(value) <= tol and eg.error <= tol + diff.bound)


# ==============================
#  POISSON E THETA
# ==============================

@dataclass(frozen=True)
class PoissonReport:
    z: sympy.Expr
    discrete: complex
    trace: complex
    offdiagonal: complex
    bound: float
    passed: bool

    @property
    def error(self) -> float:
        return abs(self.discrete - self.trace - self.offdiagonal)


def family_multipliers(F: HoloFamily, z: Any) -> List[Multiplier]:
    """
    Scompone A(z) (n = 1, coefficienti costanti, patch base) in potenze escisse sul bordo |xi| >= 1
    e un proiettore di banda per la regione interna costante.
    """
    if F.dim != 1:
        raise ValueError("Scomposizione in moltiplicatori disponibile solo in dimensione 1")
    sym = family_symbol_at(F, z)
    if sym.size != 1 or not sym.is_x_independent():
        raise ValueError("Servono simboli scalari a coefficienti costanti")
    if F.weight.patch != "base":
        raise ValueError("Parte interna costante solo con patch 'base'")
    inner = inner_part_for(F)
    out: List[Multiplier] = []
    for t in sym.terms():
        if t.log_power:
            raise ValueError("Termini logaritmici non supportati nella scomposizione")
        amp = t.coeff.mean()
        if amp == 0:
            continue
        out.append(ExcisedPower(amp, sympy.expand(t.monomial[0] + t.radial_exp), t.monomial[0], inner.radius))
    for entry in inner.entries:
        for alpha, mu, amp in entry.poly_terms:
            if any(alpha) or mu != 0:
                raise ValueError("Parte interna non costante: serve P di ordine 0")
            h1 = sum(c for c, _ in inner.h_terms)
            out.append(BandProjector(inner.radius, amp * h1))
    return out


def poisson_consistency(F: HoloFamily, z: Any, discrete: complex, tol: float = TOL_POISSON) -> PoissonReport:
    """Traccia sul toro = TR (parte diagonale) + somma sulle traslazioni gamma != 0."""
    z = as_exact(z)
    trace = zeta_germ(F, z).finite
    offdiag = 0j
    bound = 0.0
    for m in family_multipliers(F, z):
        ts = m.offdiagonal_trace(F.period)
        offdiag += ts.value
        bound += ts.bound
    passed = abs(complex(discrete) - trace - offdiag) <= tol + bound
    return PoissonReport(z, complex(discrete), trace, offdiag, bound, passed)


@dataclass(frozen=True)
class ThetaReport:
    t: float
    torus: complex
    cover: complex
    residual: float
    passed: bool


def theta_identity_residual(t: float, period: Any = TWO_PI, tol: float = TOL_THETA) -> ThetaReport:
    """sum_k e^{-t (2 pi k / L)^2} contro traccia Gamma della gaussiana + traslazioni gamma != 0."""
    L = to_complex(period).real
    with mpmath.workdps(MPMATH_DPS):
        torus = complex(mpmath.jtheta(3, 0, mpmath.exp(-t * (2 * mpmath.pi / L) ** 2)))
    g = GaussianMultiplier(t)
    cover = g.base_trace(period) + g.offdiagonal_trace(period).value
    residual = float(abs(torus - cover))
    return ThetaReport(float(t), torus, cover, residual, residual <= tol)
