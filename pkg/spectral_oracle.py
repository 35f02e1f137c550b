"""
spectral_oracle.py
Oracoli spettrali indipendenti dal calcolo simbolico, per i test di accettazione.

- Hurwitz / Riemann con Euler-Maclaurin (stima del resto dal termine di Bernoulli successivo)
- Epstein sul toro (decomposizione theta), cerchio massivo (Chowla-Selberg, Bessel K)
- operatore traslato -i d/dx + a (zeta di |D| ed eta)
- matrice di Fourier di Delta + V (autovalori numpy, coda di Hurwitz, raddoppio di K)
- tracce del calore sul toro e sul rivestimento, supertraccia di una coppia graduata

Ogni oracolo ritorna un OracleValue(value, bound).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Any, Optional, Sequence

import mpmath
import numpy as np

from config import (
    EM_BERNOULLI_TERMS,
    EM_MIN_TERMS,
    LATTICE_CUTOFF,
    MATRIX_CUTOFF,
    MPMATH_DPS,
    TAIL_TERMS,
)
from symbol_core import TrigPoly, to_complex


@dataclass(frozen=True)
class OracleValue:
    value: complex
    bound: float
    method: str = ""


def _mp(value: Any) -> mpmath.mpc:
    return mpmath.mpc(to_complex(value))


# ==============================
#  HURWITZ / RIEMANN
# ==============================

def hurwitz_zeta(s: Any, a: Any = 1, terms: Optional[int] = None,
                 bernoulli_terms: int = EM_BERNOULLI_TERMS) -> OracleValue:
    """
    zeta(s, a) = sum_{k < M} (k+a)^{-s} + (M+a)^{1-s}/(s-1) + (M+a)^{-s}/2
                 + sum_j B_2j/(2j)! (s)_{2j-1} (M+a)^{-s-2j+1}.
    """
    with mpmath.workdps(MPMATH_DPS):
        s = _mp(s)
        a = _mp(a)
        if abs(s - 1) < 1e-14:
            raise ValueError("Polo di Hurwitz in s = 1")
        if a.real <= 0:
            raise ValueError(f"Parametro di Hurwitz non positivo: a = {a}")
        M = terms or max(EM_MIN_TERMS, int(abs(s)) + EM_MIN_TERMS)
        head = mpmath.fsum((k + a) ** (-s) for k in range(M))
        N = M + a
        total = head + N ** (1 - s) / (s - 1) + N ** (-s) / 2
        rising = s
        last = mpmath.mpf(0)
        for j in range(1, bernoulli_terms + 2):
            term = mpmath.bernoulli(2 * j) / mpmath.factorial(2 * j) * rising * N ** (-s - 2 * j + 1)
            if j <= bernoulli_terms:
                total += term
            else:
                last = abs(term)
            rising *= (s + 2 * j - 1) * (s + 2 * j)
        return OracleValue(complex(total), float(last), "euler-maclaurin")


def riemann_zeta(s: Any) -> OracleValue:
    return hurwitz_zeta(s, 1)


# ==============================
#  TORO: EPSTEIN E MASSA
# ==============================

def epstein_zeta(s: Any, dim: int = 2, period: Any = 2 * math.pi,
                 cutoff: int = LATTICE_CUTOFF) -> OracleValue:
    """
    sum_{k != 0} |2 pi k / L|^{-2s} sul reticolo Z^n (autovalori non nulli del laplaciano piatto).
    Z(s) = pi^s / Gamma(s+1) [ s sum' (Gamma(s, pi|k|^2)(pi|k|^2)^{-s}
           + Gamma(n/2 - s, pi|k|^2)(pi|k|^2)^{s - n/2}) + s/(s - n/2) - 1 ].
    """
    with mpmath.workdps(MPMATH_DPS):
        s = _mp(s)
        n = dim
        if abs(s - mpmath.mpf(n) / 2) < 1e-14:
            raise ValueError(f"Polo di Epstein in s = n/2 = {n / 2}")
        acc = mpmath.mpc(0)
        for k in product(range(-cutoff, cutoff + 1), repeat=n):
            r2 = sum(x * x for x in k)
            if r2 == 0:
                continue
            x = mpmath.pi * r2
            acc += mpmath.gammainc(s, x) * x ** (-s) + mpmath.gammainc(mpmath.mpf(n) / 2 - s, x) * x ** (s - mpmath.mpf(n) / 2)
        Zs = mpmath.pi ** s * mpmath.rgamma(s + 1) * (s * acc + s / (s - mpmath.mpf(n) / 2) - 1)
        scale = (2 * mpmath.pi / _mp(period)) ** (-2 * s)
        # primo guscio escluso: |k|_inf = cutoff + 1, ~ 2n (2c+3)^{n-1} e^{-pi (c+1)^2}
        shell = 2 * n * (2 * cutoff + 3) ** (n - 1)
        bound = float(abs(scale * mpmath.pi ** s * mpmath.rgamma(s + 1) * s) * shell
                      * mpmath.exp(-mpmath.pi * (cutoff + 1) ** 2) * 2)
        return OracleValue(complex(scale * Zs), bound, "theta")


def massive_circle_zeta(s: Any, c: Any) -> OracleValue:
    """
    sum_{k in Z} (k^2 + c)^{-s} = sqrt(pi) Gamma(s - 1/2)/Gamma(s) c^{1/2 - s}
        + 4 pi^s / Gamma(s) sum_{m >= 1} (m / sqrt(c))^{s - 1/2} K_{s - 1/2}(2 pi m sqrt(c)).
    """
    with mpmath.workdps(MPMATH_DPS):
        s = _mp(s)
        c = _mp(c)
        if c.real <= 0:
            raise ValueError(f"Massa non positiva: c = {c}")
        root = mpmath.sqrt(c)
        nu = s - mpmath.mpf(1) / 2
        value = mpmath.sqrt(mpmath.pi) * mpmath.gamma(nu) * mpmath.rgamma(s) * c ** (-nu)
        pref = 4 * mpmath.pi ** s * mpmath.rgamma(s)
        eps = mpmath.mpf(10) ** (-MPMATH_DPS)
        m = 1
        term = mpmath.mpc(1)
        while abs(term) > eps and m < 10_000:
            term = pref * (m / root) ** nu * mpmath.besselk(nu, 2 * mpmath.pi * m * root)
            value += term
            m += 1
        return OracleValue(complex(value), float(abs(term)), "bessel")


# ==============================
#  OPERATORE TRASLATO
# ==============================

def _reduce_shift(a: Any) -> mpmath.mpf:
    a = mpmath.mpf(to_complex(a).real)
    frac = a - mpmath.floor(a)
    if frac == 0:
        raise ValueError("Traslazione intera: autovalore nullo")
    return frac


def shifted_zeta(s: Any, a: Any) -> OracleValue:
    """sum_k |k + a|^{-s} = zeta(s, a) + zeta(s, 1 - a)."""
    a = _reduce_shift(a)
    p = hurwitz_zeta(s, a)
    m = hurwitz_zeta(s, 1 - a)
    return OracleValue(p.value + m.value, p.bound + m.bound, "hurwitz")


def eta_series(s: Any, a: Any) -> OracleValue:
    """sum_k sgn(k + a) |k + a|^{-s} = zeta(s, a) - zeta(s, 1 - a); in s = 0 vale 1 - 2a."""
    a = _reduce_shift(a)
    p = hurwitz_zeta(s, a)
    m = hurwitz_zeta(s, 1 - a)
    return OracleValue(p.value - m.value, p.bound + m.bound, "hurwitz")


# ==============================
#  MATRICE DI FOURIER
# ==============================

def fourier_matrix_eigenvalues(potential: TrigPoly, cutoff: int = MATRIX_CUTOFF) -> np.ndarray:
    """Autovalori di H_{jk} = k^2 delta_jk + V^_{j-k}, |j|, |k| <= K (periodo 2 pi, V reale)."""
    if potential.dim != 1 or abs(to_complex(potential.period) - 2 * math.pi) > 1e-12:
        raise ValueError("Matrice di Fourier disponibile solo su S^1 di periodo 2 pi")
    modes = {k[0]: to_complex(v) for k, v in potential.modes.items()}
    for k, v in modes.items():
        if abs(modes.get(-k, 0) - v.conjugate()) > 1e-12:
            raise ValueError("Il potenziale deve essere reale (V^_{-k} = conj V^_k)")
    size = 2 * cutoff + 1
    ks = np.arange(-cutoff, cutoff + 1)
    H = np.diag(ks.astype(float) ** 2).astype(complex)
    for k, v in modes.items():
        H += v * np.eye(size, k=-k)
    return np.linalg.eigvalsh(H)


def _matrix_zeta_once(potential: TrigPoly, s: complex, cutoff: int) -> complex:
    eigs = fourier_matrix_eigenvalues(potential, cutoff)
    trusted_k = cutoff // 2
    trusted = eigs[: 2 * trusted_k + 1]
    if np.any(trusted <= 0):
        raise ValueError("Autovalori non positivi: la zeta richiede un operatore invertibile")
    head = complex(np.sum(np.power(trusted.astype(complex), -s)))
    vbar = to_complex(potential.mean())
    with mpmath.workdps(MPMATH_DPS):
        tail = mpmath.mpc(0)
        for j in range(TAIL_TERMS):
            tail += mpmath.binomial(-s, j) * mpmath.mpc(vbar) ** j * mpmath.zeta(2 * s + 2 * j, trusted_k + 1)
        tail *= 2
    return head + complex(tail)


def fourier_matrix_zeta(potential: TrigPoly, s: Any, cutoff: int = MATRIX_CUTOFF) -> OracleValue:
    """
    zeta di Delta + V: autovalori affidabili (i primi 2K'+1, K' = K/2) piu' coda
    2 sum_j binom(-s, j) Vbar^j zeta_H(2s + 2j, K'+1), continuata in s tramite Hurwitz.
    Stima: differenza col raddoppio di K.
    """
    s = to_complex(s)
    if any(abs(2 * s + 2 * j - 1) < 1e-14 for j in range(TAIL_TERMS)):
        raise ValueError(f"Polo della coda di Hurwitz in s = {s}")
    v1 = _matrix_zeta_once(potential, s, cutoff)
    v2 = _matrix_zeta_once(potential, s, 2 * cutoff)
    return OracleValue(v2, abs(v2 - v1), "fourier-matrix")


# ==============================
#  TRACCE DEL CALORE
# ==============================

def heat_trace(eigenvalues: Sequence[float], t: float) -> float:
    lam = np.asarray(eigenvalues, dtype=float)
    return float(np.sum(np.exp(-t * lam)))


def heat_supertrace(plus: Sequence[float], minus: Sequence[float], t: float = 1.0) -> float:
    """Str e^{-t Q} = tr e^{-t D*D} - tr e^{-t DD*}: per McKean-Singer e' l'indice."""
    return heat_trace(plus, t) - heat_trace(minus, t)


def torus_heat_trace(t: float, dim: int = 1, period: Any = 2 * math.pi, mass: float = 0.0) -> OracleValue:
    """sum_k e^{-t (|2 pi k / L|^2 + c)} = e^{-tc} theta_3(0, e^{-t (2 pi / L)^2})^n."""
    with mpmath.workdps(MPMATH_DPS):
        q = mpmath.exp(-t * (2 * mpmath.pi / _mp(period).real) ** 2)
        value = mpmath.exp(-t * mass) * mpmath.jtheta(3, 0, q) ** dim
    return OracleValue(complex(value), 0.0, "theta")


def gamma_heat_trace(t: float, dim: int = 1, period: Any = 2 * math.pi, mass: float = 0.0) -> OracleValue:
    """Traccia Gamma del calore sul rivestimento: Vol (2 pi)^{-n} int e^{-t(|xi|^2 + c)} d xi (quadratura)."""
    L = to_complex(period).real
    with mpmath.workdps(MPMATH_DPS):
        line = mpmath.quad(lambda x: mpmath.exp(-t * x * x), [-mpmath.inf, 0, mpmath.inf])
        value = (L / (2 * mpmath.pi)) ** dim * line ** dim * mpmath.exp(-t * mass)
    return OracleValue(complex(value), 0.0, "quad")


# ==============================
#  MODELLI SPETTRALI
# ==============================

MODEL_KINDS = ("torus-laplacian", "shifted-1d", "fourier-matrix")


@dataclass(frozen=True)
class SpectralPatch:
    """Come trattare l'autovalore 0: none (escluso), base (sostituito da 1), band (rivestimento)."""
    kind: str = "base"
    eps: float = 0.25

    def __post_init__(self):
        if self.kind not in ("none", "base", "band"):
            raise ValueError(f"Patch spettrale sconosciuta: {self.kind!r}")


@dataclass(frozen=True)
class ModelSpectrum:
    """
    Spettri modello con zeta nota:
      torus-laplacian: |2 pi k / L|^2 + mass su T^n
      shifted-1d:      |k + a| (zeta di |D_a|, eta di D_a)
      fourier-matrix:  Delta + V su S^1
    """
    kind: str
    dim: int = 1
    period: float = 2 * math.pi
    mass: float = 0.0
    shift: float = 0.0
    potential: Optional[TrigPoly] = None
    patch: SpectralPatch = field(default_factory=SpectralPatch)

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ValueError(f"Modello spettrale sconosciuto: {self.kind!r}")
        if self.kind == "fourier-matrix" and self.potential is None:
            raise ValueError("Il modello fourier-matrix richiede un potenziale")

    def zeta(self, s: Any) -> OracleValue:
        if self.kind == "shifted-1d":
            return shifted_zeta(s, self.shift)
        if self.kind == "fourier-matrix":
            return fourier_matrix_zeta(self.potential, s)
        if self.mass > 0:
            if self.dim != 1:
                raise ValueError("Zeta massiva disponibile solo su S^1")
            # periodo L: k -> 2 pi k / L, riscalato sul cerchio standard
            scale = (2 * math.pi / self.period) ** 2
            base = massive_circle_zeta(s, self.mass / scale)
            factor = complex(scale ** (-to_complex(s)))
            return OracleValue(base.value * factor, base.bound * abs(factor), base.method)
        out = epstein_zeta(s, self.dim, self.period)
        zero_mode = 1.0 if self.patch.kind == "base" else 0.0
        return OracleValue(out.value + zero_mode, out.bound, out.method)

    def eta(self, s: Any = 0) -> OracleValue:
        if self.kind != "shifted-1d":
            raise ValueError("eta disponibile solo per il modello shifted-1d")
        return eta_series(s, self.shift)

    def heat(self, t: float) -> OracleValue:
        if self.kind == "torus-laplacian":
            out = torus_heat_trace(t, self.dim, self.period, self.mass)
            if self.mass == 0 and self.patch.kind == "base":
                return OracleValue(out.value - 1 + math.exp(-t), 0.0, out.method)
            return out
        if self.kind == "fourier-matrix":
            return OracleValue(heat_trace(fourier_matrix_eigenvalues(self.potential), t), 0.0, "fourier-matrix")
        raise ValueError("Traccia del calore non disponibile per shifted-1d")


def spectral_zeta(model: ModelSpectrum, s: Any) -> OracleValue:
    return model.zeta(s)


def gamma_spectral_zeta(s: Any, dim: int = 1, period: Any = 2 * math.pi, eps: float = 0.25) -> OracleValue:
    """
    zeta_Gamma del laplaciano piatto con patch di banda: Vol (2 pi)^{-n} [ int_{|xi| < sqrt(eps)} (|xi|^2 + 1)^{-s}
    + fp int_{|xi| > sqrt(eps)} |xi|^{-2s} ], parte esterna in forma chiusa -S_n rho^{n - 2s} / (n - 2s).
    """
    L = to_complex(period).real
    with mpmath.workdps(MPMATH_DPS):
        s = _mp(s)
        rho = mpmath.sqrt(mpmath.mpf(eps))
        sphere = 2 * mpmath.pi ** (mpmath.mpf(dim) / 2) * mpmath.rgamma(mpmath.mpf(dim) / 2)
        e = dim - 2 * s
        if abs(e) < 1e-14:
            raise ValueError("Polo della zeta Gamma in s = n/2")
        outer = -sphere * rho ** e / e
        inner = sphere * mpmath.quad(lambda r: r ** (dim - 1) * (r * r + 1) ** (-s), [0, rho])
        value = (L / (2 * mpmath.pi)) ** dim * (outer + inner)
    return OracleValue(complex(value), 0.0, "quad")
