"""
multipliers.py
Moltiplicatori di Fourier a coefficienti costanti f(D) e loro parti non locali.

- ExcisedPower:        c sgn(xi)^parity |xi|^p 1_{|xi| >= rho}           (n = 1)
- GaussianMultiplier:  c e^{-t |xi|^2}
- BandProjector:       c 1_{|xi| <= r}                                    (n = 1)
- IntervalMultiplier:  c 1_{left <= xi <= right}                          (n = 1)
- SignShiftMultiplier: sgn(xi + a)                                        (n = 1)
- ProfileMultiplier:   profilo puntuale a supporto compatto, solo traccia diagonale
- InnerPart:           contributo della regione |xi| < rho alle famiglie zeta

Convenzione: f^(omega) = int f(xi) e^{-i omega xi} d xi. Sul toro di periodo L la parte fuori
diagonale della traccia e' (L / 2 pi)^n sum_{m != 0} f^(L m) (somma di Poisson, valore medio nei salti).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, List, Optional, Sequence, Tuple

import mpmath
import numpy as np
import sympy
from scipy.integrate import dblquad, quad

from config import MPMATH_DPS, TAIL_TERMS, TRANSLATE_CUTOFF
from symbol_core import TWO_PI, MultiIndex, as_exact, to_complex
from trace_functionals import ball_integral, radial_fp_value, sphere_integral


# ==============================
#  RISULTATI
# ==============================

@dataclass(frozen=True)
class TranslateSum:
    """Somma sulle traslazioni gamma != 0: valore, stima del resto, termini sommati esplicitamente."""
    value: complex
    bound: float
    terms: int
    method: str


def _mpc(value: Any) -> mpmath.mpc:
    return mpmath.mpc(to_complex(value))


def _lattice_factor(period: Any, dim: int) -> float:
    return float((to_complex(period).real / (2 * np.pi)) ** dim)


def _wrap_angle(theta: float) -> float:
    """theta mod 2 pi in [0, 2 pi), con i multipli di 2 pi riportati esattamente a 0."""
    t = theta % (2 * np.pi)
    if min(t, 2 * np.pi - t) < 1e-13:
        return 0.0
    return t


def _sawtooth_sum(theta: float) -> float:
    """sum_{m >= 1} sin(m theta) / m = Im Li_1(e^{i theta}) = (pi - theta) / 2 su (0, 2 pi), 0 nei salti."""
    t = _wrap_angle(theta)
    if t == 0.0:
        return 0.0
    return float(mpmath.im(mpmath.polylog(1, mpmath.expjpi(t / np.pi))))


# ==============================
#  MOLTIPLICATORI
# ==============================

class Multiplier:
    """Interfaccia comune: integral, fourier, offdiagonal_trace."""
    dim: int = 1

    def integral(self) -> complex:
        raise NotImplementedError

    def fourier(self, omega: float) -> complex:
        raise NotImplementedError

    def offdiagonal_trace(self, period: Any = TWO_PI) -> TranslateSum:
        raise NotImplementedError

    def kernel_value(self, gamma: float) -> complex:
        """K(gamma) = (2 pi)^{-n} f^(-gamma): nucleo di convoluzione sul rivestimento."""
        return complex(self.fourier(-gamma)) / (2 * np.pi) ** self.dim

    def base_trace(self, period: Any = TWO_PI) -> complex:
        """Vol (2 pi)^{-n} int f: traccia sul dominio fondamentale (diagonale del nucleo)."""
        return _lattice_factor(period, self.dim) * complex(self.integral())

    def discrete_trace(self, period: Any = TWO_PI) -> complex:
        """Traccia sul toro via Poisson: parte diagonale + parte fuori diagonale."""
        return self.base_trace(period) + self.offdiagonal_trace(period).value


@dataclass(frozen=True)
class ExcisedPower(Multiplier):
    """
    f(xi) = amplitude sgn(xi)^parity |xi|^exponent per |xi| >= radius, 0 altrove (n = 1).
    integral() e' la parte finita; la trasformata usa Gamma incompleta e la somma sulle traslazioni
    una coda asintotica (serie di Lerch) dopo `cutoff` termini espliciti.
    """
    amplitude: Any = 1
    exponent: Any = -2
    parity: int = 0
    radius: Any = 1
    dim: int = 1

    def __post_init__(self):
        if self.parity not in (0, 1):
            raise ValueError(f"Parita' non valida: {self.parity} (ammesse 0, 1)")
        if self.dim != 1:
            raise ValueError("Potenze escisse supportate solo in dimensione 1")
        if to_complex(self.radius).real <= 0:
            raise ValueError(f"Raggio di escissione non positivo: {self.radius}")

    def value(self, xi: float) -> complex:
        r = abs(xi)
        if r < to_complex(self.radius).real:
            return 0j
        sign = (1 if xi >= 0 else -1) ** self.parity
        return to_complex(self.amplitude) * sign * r ** to_complex(self.exponent)

    def integral(self) -> complex:
        if self.parity:
            return 0j
        p = sympy.expand(as_exact(self.exponent))
        return to_complex(2 * as_exact(self.amplitude) * radial_fp_value(p + 1, 0, self.radius))

    def _half_line(self, omega: float, sign: int) -> mpmath.mpc:
        """int_rho^oo r^p e^{-i sign omega r} dr = (i sign omega)^{-p-1} Gamma(p+1, i sign omega rho), omega > 0."""
        p = _mpc(self.exponent)
        w = mpmath.mpc(0, sign * omega)
        return w ** (-p - 1) * mpmath.gammainc(p + 1, w * _mpc(self.radius))

    def fourier(self, omega: float) -> complex:
        omega = float(omega)
        if omega == 0.0:
            return self.integral()
        with mpmath.workdps(MPMATH_DPS):
            w = abs(omega)
            plus = self._half_line(w, 1)
            minus = self._half_line(w, -1)
            val = plus + minus if self.parity == 0 else plus - minus
            if omega < 0 and self.parity:
                val = -val
            return complex(_mpc(self.amplitude) * val)

    def _tail(self, L: float, cutoff: int, tail_terms: int) -> Tuple[mpmath.mpc, float]:
        """sum_{m > cutoff} f^(L m) dall'espansione e^{-/+ i omega rho} sum_k (p)_k rho^{p-k} / (+/- i omega)^{k+1}."""
        p = _mpc(self.exponent)
        rho = _mpc(self.radius)
        total = mpmath.mpc(0)
        falling = mpmath.mpc(1)
        for k in range(tail_terms):
            if k:
                falling *= p - (k - 1)
            s = k + 1
            for sign in (1, -1):
                coef = falling * rho ** (p - k) / mpmath.mpc(0, sign * L) ** s
                if abs(coef) < mpmath.mpf(10) ** (-MPMATH_DPS):
                    continue
                zeta = mpmath.expj(-sign * L * float(rho.real))
                if abs(zeta - 1) < 1e-14:
                    if s == 1:
                        # i due contributi k = 0 si cancellano quando L rho e' multiplo di 2 pi
                        continue
                    series = mpmath.zeta(s, cutoff + 1)
                else:
                    series = zeta ** (cutoff + 1) * mpmath.lerchphi(zeta, s, cutoff + 1)
                total += coef * series
        falling *= p - (tail_terms - 1)
        nxt = abs(falling) * abs(rho ** (p - tail_terms)) * 2 / L ** (tail_terms + 1) \
            * mpmath.zeta(tail_terms + 1, cutoff + 1)
        return total, float(nxt)

    def offdiagonal_trace(self, period: Any = TWO_PI, cutoff: int = TRANSLATE_CUTOFF,
                          tail_terms: int = TAIL_TERMS) -> TranslateSum:
        if self.parity:
            return TranslateSum(0j, 0.0, 0, "symmetry")
        L = to_complex(period).real
        with mpmath.workdps(MPMATH_DPS):
            head = mpmath.mpc(0)
            for m in range(1, cutoff + 1):
                w = L * m
                head += self._half_line(w, 1) + self._half_line(w, -1)
            tail, bound = self._tail(L, cutoff, tail_terms)
            amp = _mpc(self.amplitude)
            factor = _lattice_factor(period, 1) * 2
            value = complex(factor * amp * (head + tail))
        return TranslateSum(value, factor * abs(complex(amp)) * bound, cutoff, "lerch-tail")


@dataclass(frozen=True)
class GaussianMultiplier(Multiplier):
    """f(xi) = scale e^{-t |xi|^2}: regolarizzante, trasformata (pi/t)^{n/2} e^{-|omega|^2 / 4t}."""
    t: Any = 1
    dim: int = 1
    scale: Any = 1

    def __post_init__(self):
        if to_complex(self.t).real <= 0:
            raise ValueError(f"Parametro gaussiano non positivo: t = {self.t}")

    def value(self, xi: Any) -> complex:
        r2 = float(np.sum(np.square(np.atleast_1d(np.asarray(xi, dtype=float)))))
        return to_complex(self.scale) * np.exp(-to_complex(self.t).real * r2)

    def integral(self) -> complex:
        return to_complex(as_exact(self.scale) * (sympy.pi / as_exact(self.t)) ** sympy.Rational(self.dim, 2))

    def fourier(self, omega: Any) -> complex:
        w2 = float(np.sum(np.square(np.atleast_1d(np.asarray(omega, dtype=float)))))
        t = to_complex(self.t).real
        return self.integral() * np.exp(-w2 / (4 * t))

    def offdiagonal_trace(self, period: Any = TWO_PI) -> TranslateSum:
        """sum_{m in Z^n, m != 0} si fattorizza: theta_3(0, e^{-L^2/4t})^n - 1."""
        L = to_complex(period).real
        t = to_complex(self.t).real
        with mpmath.workdps(MPMATH_DPS):
            theta = mpmath.jtheta(3, 0, mpmath.exp(-L ** 2 / (4 * t)))
            value = _lattice_factor(period, self.dim) * self.integral() * complex(theta ** self.dim - 1)
        return TranslateSum(complex(value), 0.0, 0, "theta")


@dataclass(frozen=True)
class BandProjector(Multiplier):
    """f(xi) = scale 1_{|xi| <= radius} (n = 1): proiettore spettrale sulla banda [0, radius]."""
    radius: Any = 1
    scale: Any = 1
    dim: int = 1

    def __post_init__(self):
        if self.dim != 1:
            raise ValueError("Proiettore di banda supportato solo in dimensione 1")
        if to_complex(self.radius).real <= 0:
            raise ValueError(f"Raggio della banda non positivo: {self.radius}")

    def value(self, xi: float) -> complex:
        return to_complex(self.scale) if abs(xi) <= to_complex(self.radius).real else 0j

    def integral(self) -> complex:
        return to_complex(2 * as_exact(self.scale) * as_exact(self.radius))

    def fourier(self, omega: float) -> complex:
        omega = float(omega)
        if omega == 0.0:
            return self.integral()
        r = to_complex(self.radius).real
        return to_complex(self.scale) * 2 * np.sin(r * omega) / omega

    def offdiagonal_trace(self, period: Any = TWO_PI) -> TranslateSum:
        """(L / 2 pi) sum_{m != 0} 2 sin(r L m) / (L m) = (2 / pi) Im Li_1(e^{i r L})."""
        L = to_complex(period).real
        r = to_complex(self.radius).real
        with mpmath.workdps(MPMATH_DPS):
            value = to_complex(self.scale) * 2 / np.pi * _sawtooth_sum(r * L)
        return TranslateSum(complex(value), 0.0, 0, "polylog")


@dataclass(frozen=True)
class IntervalMultiplier(Multiplier):
    """f(xi) = scale 1_{left <= xi <= right} (n = 1): pezzi costanti della regione interna."""
    left: Any = -1
    right: Any = 1
    scale: Any = 1
    dim: int = 1

    def __post_init__(self):
        if self.dim != 1:
            raise ValueError("Intervallo supportato solo in dimensione 1")
        if to_complex(self.right).real <= to_complex(self.left).real:
            raise ValueError(f"Intervallo vuoto: [{self.left}, {self.right}]")

    def value(self, xi: float) -> complex:
        inside = to_complex(self.left).real <= xi <= to_complex(self.right).real
        return to_complex(self.scale) if inside else 0j

    def integral(self) -> complex:
        return to_complex(as_exact(self.scale) * (as_exact(self.right) - as_exact(self.left)))

    def fourier(self, omega: float) -> complex:
        omega = float(omega)
        if omega == 0.0:
            return self.integral()
        lo = to_complex(self.left).real
        hi = to_complex(self.right).real
        return to_complex(self.scale) * (np.exp(-1j * omega * lo) - np.exp(-1j * omega * hi)) / (1j * omega)

    def offdiagonal_trace(self, period: Any = TWO_PI) -> TranslateSum:
        """(L / 2 pi) sum_{m != 0} f^(L m) = scale (Im Li_1(e^{i L right}) - Im Li_1(e^{i L left})) / pi."""
        L = to_complex(period).real
        lo = to_complex(self.left).real
        hi = to_complex(self.right).real
        with mpmath.workdps(MPMATH_DPS):
            value = to_complex(self.scale) * (_sawtooth_sum(L * hi) - _sawtooth_sum(L * lo)) / np.pi
        return TranslateSum(complex(value), 0.0, 0, "polylog")


@dataclass(frozen=True)
class SignShiftMultiplier(Multiplier):
    """f(xi) = sgn(xi + a): parte regolarizzante dell'invariante eta di -i d/dx + a."""
    a: Any = 0
    dim: int = 1

    def value(self, xi: float) -> complex:
        s = xi + to_complex(self.a).real
        return complex(np.sign(s))

    def integral(self) -> complex:
        """Parte finita simmetrica: int_{-R}^{R} sgn(xi + a) d xi = 2 a."""
        return to_complex(2 * as_exact(self.a))

    def fourier(self, omega: float) -> complex:
        omega = float(omega)
        if omega == 0.0:
            return self.integral()
        a = to_complex(self.a).real
        return 2 * np.exp(1j * omega * a) / (1j * omega)

    def offdiagonal_trace(self, period: Any = TWO_PI, method: str = "lerch",
                          cutoff: int = TRANSLATE_CUTOFF) -> TranslateSum:
        """(1 / pi) sum_{m != 0} e^{i L m a} / (i m) = (2 / pi) sum_{m >= 1} sin(L a m) / m."""
        theta = to_complex(period).real * to_complex(self.a).real
        with mpmath.workdps(MPMATH_DPS):
            if method == "polylog":
                return TranslateSum(complex(2 / np.pi * _sawtooth_sum(theta)), 0.0, 0, "polylog")
            if method != "lerch":
                raise ValueError(f"Metodo di somma sconosciuto: {method!r}")
            t = _wrap_angle(theta)
            if t == 0.0:
                return TranslateSum(0j, 0.0, cutoff, "lerch")
            head = mpmath.fsum(mpmath.sin(m * t) / m for m in range(1, cutoff + 1))
            zeta = mpmath.expj(t)
            tail = mpmath.im(zeta ** (cutoff + 1) * mpmath.lerchphi(zeta, 1, cutoff + 1))
            return TranslateSum(complex(2 / mpmath.pi * (head + tail)), 0.0, cutoff, "lerch")


@dataclass(frozen=True)
class ProfileMultiplier(Multiplier):
    """
    f(xi) data puntualmente e nulla per |xi| >= radius: solo la traccia diagonale, per quadratura
    (retta in n = 1, coordinate polari in n = 2). `breakpoints` sono i raggi dove f salta.
    """
    profile: Callable[[Any], complex]
    radius: float = 1.0
    dim: int = 1
    breakpoints: Tuple[float, ...] = ()

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError(f"Quadratura del profilo disponibile per n = 1, 2 (n = {self.dim})")
        if self.radius <= 0:
            raise ValueError(f"Raggio del profilo non positivo: {self.radius}")

    def value(self, xi: Any) -> complex:
        r = float(np.linalg.norm(np.atleast_1d(np.asarray(xi, dtype=float))))
        return complex(self.profile(xi)) if r < self.radius else 0j

    def _radii(self) -> List[float]:
        inside = {float(b) for b in self.breakpoints if 0 < b < self.radius}
        return sorted(inside | {0.0, float(self.radius)})

    def integral(self) -> complex:
        radii = self._radii()
        total = 0j
        if self.dim == 1:
            points = sorted({-r for r in radii} | set(radii))
            for lo, hi in zip(points, points[1:]):
                re = quad(lambda x: self.value(x).real, lo, hi, limit=200, epsabs=1e-13, epsrel=1e-12)[0]
                im = quad(lambda x: self.value(x).imag, lo, hi, limit=200, epsabs=1e-13, epsrel=1e-12)[0]
                total += complex(re, im)
            return total

        def polar(theta: float, r: float) -> complex:
            return r * self.value((r * np.cos(theta), r * np.sin(theta)))

        for lo, hi in zip(radii, radii[1:]):
            re = dblquad(lambda t, r: polar(t, r).real, lo, hi, 0, 2 * np.pi, epsabs=1e-11, epsrel=1e-10)[0]
            im = dblquad(lambda t, r: polar(t, r).imag, lo, hi, 0, 2 * np.pi, epsabs=1e-11, epsrel=1e-10)[0]
            total += complex(re, im)
        return total


# ==============================
#  PARTE INTERNA DELLE FAMIGLIE
# ==============================

INNER_KINDS = ("zero", "patched", "multiplier")

# (alpha, mu, amp): amp xi^alpha |xi|^mu, coefficienti gia' mediati in x
RadialTerms = Tuple[Tuple[MultiIndex, sympy.Expr, sympy.Expr], ...]


@dataclass(frozen=True)
class InnerEntry:
    """Entrata diagonale i: P_ii mediato e peso w_i mediato (con segno di graduazione)."""
    poly_terms: RadialTerms
    weight_terms: RadialTerms = ()
    sign: int = 1


@dataclass(frozen=True)
class InnerPart:
    """
    Contributo Vol (2 pi)^{-n} int_{|xi| < radius} tr[P(xi) h(w) w^{-z}] d xi della regione interna.
      - zero:       nessun contributo (escissione pura)
      - patched:    peso sostituito da 1 (autovalore 0 -> 1), valore costante in z
      - multiplier: peso w + shift valutato come moltiplicatore (shift = 1 sulla banda)
    """
    kind: str = "zero"
    dim: int = 1
    radius: Any = 1
    volume_factor: Any = 1
    entries: Tuple[InnerEntry, ...] = ()
    h_terms: Tuple[Tuple[Any, Any], ...] = ((1, 0),)
    shift: Any = 0

    def __post_init__(self):
        if self.kind not in INNER_KINDS:
            raise ValueError(f"Parte interna sconosciuta: {self.kind!r}")
        object.__setattr__(self, "radius", as_exact(self.radius))
        object.__setattr__(self, "shift", as_exact(self.shift))
        object.__setattr__(self, "h_terms", tuple((as_exact(c), as_exact(p)) for c, p in self.h_terms))

    def value(self, z: Any = 0) -> complex:
        if self.kind == "zero":
            return 0j
        if self.kind == "patched":
            return self._patched()
        z = as_exact(z)
        exact = self._exact_power(z)
        if exact is not None:
            return exact
        return self._numeric(to_complex(z))

    def profile(self, z: Any, xi: Any) -> complex:
        """tr[P(xi) h(w) w^{-z}] nel punto xi, senza fattore di volume; 0 per |xi| >= radius."""
        point = np.atleast_1d(np.asarray(xi, dtype=float))
        if self.kind == "zero" or float(np.linalg.norm(point)) >= to_complex(self.radius).real:
            return 0j
        z = to_complex(as_exact(z))
        shift = to_complex(self.shift)
        h_terms = [(to_complex(c), to_complex(p)) for c, p in self.h_terms]
        total = 0j
        for entry in self.entries:
            if self.kind == "patched":
                g = sum(c for c, _ in h_terms)
            else:
                w = (self._eval_point(entry.weight_terms, point) + shift).real
                if w <= 0:
                    continue
                g = sum(c * w ** (p - z) for c, p in h_terms)
            total += entry.sign * self._eval_point(entry.poly_terms, point) * g
        return complex(total)

    @staticmethod
    def _eval_point(terms: RadialTerms, point: np.ndarray) -> complex:
        r = float(np.linalg.norm(point))
        out = 0j
        for alpha, mu, amp in terms:
            mono = float(np.prod([x ** a for x, a in zip(point, alpha)]))
            out += to_complex(amp) * mono * (r ** to_complex(mu) if r > 0 or mu == 0 else 0.0)
        return out

    def _patched(self) -> complex:
        h1 = sum(c for c, _ in self.h_terms)
        total = sympy.Integer(0)
        for entry in self.entries:
            for alpha, mu, amp in entry.poly_terms:
                total += entry.sign * amp * ball_integral(alpha, mu, self.radius)
        return to_complex(as_exact(self.volume_factor) * h1 * total)

    def _exact_power(self, z: sympy.Expr) -> Optional[complex]:
        """Peso monomiale c |xi|^q senza shift: integrali di palla esatti."""
        if self.shift != 0:
            return None
        total = sympy.Integer(0)
        for entry in self.entries:
            if len(entry.weight_terms) != 1:
                return None
            alpha_w, q, c = entry.weight_terms[0]
            if any(alpha_w):
                return None
            for coef, p in self.h_terms:
                for alpha, mu, amp in entry.poly_terms:
                    total += entry.sign * amp * coef * c ** (p - z) \
                        * ball_integral(alpha, mu + q * (p - z), self.radius)
        return to_complex(as_exact(self.volume_factor) * total)

    @staticmethod
    def _eval_terms(terms: RadialTerms, xi: float) -> complex:
        r = abs(xi)
        out = 0j
        for alpha, mu, amp in terms:
            out += to_complex(amp) * xi ** alpha[0] * (r ** to_complex(mu) if r > 0 or mu == 0 else 0.0)
        return out

    @staticmethod
    def _weight_roots(terms: RadialTerms, shift: complex, radius: float) -> List[float]:
        """Zeri reali del peso in (-radius, radius) quando e' un polinomio in xi."""
        coeffs = {}
        for alpha, mu, amp in terms:
            mu_c = to_complex(mu)
            if mu_c.imag or mu_c.real % 2 or mu_c.real < 0:
                return []
            deg = alpha[0] + int(mu_c.real)
            coeffs[deg] = coeffs.get(deg, 0) + to_complex(amp)
        coeffs[0] = coeffs.get(0, 0) + shift
        top = max(coeffs)
        poly = [coeffs.get(k, 0).real for k in range(top, -1, -1)]
        if top == 0:
            return []
        roots = np.roots(poly)
        return sorted({float(r.real) for r in roots if abs(r.imag) < 1e-6 and abs(r.real) < radius})

    def _numeric(self, z: complex) -> complex:
        radius = to_complex(self.radius).real
        shift = to_complex(self.shift)
        h_terms = [(to_complex(c), to_complex(p)) for c, p in self.h_terms]
        total = 0j
        for entry in self.entries:
            if self.dim == 1:
                total += entry.sign * self._numeric_line(entry, z, radius, shift, h_terms)
            else:
                total += entry.sign * self._numeric_radial(entry, z, radius, shift, h_terms)
        return complex(to_complex(self.volume_factor) * total)

    def _numeric_line(self, entry: InnerEntry, z: complex, radius: float, shift: complex,
                      h_terms: Sequence[Tuple[complex, complex]]) -> complex:
        def integrand(xi: float) -> complex:
            w = (self._eval_terms(entry.weight_terms, xi) + shift).real
            if w <= 0:
                return 0j
            g = sum(c * w ** (p - z) for c, p in h_terms)
            return self._eval_terms(entry.poly_terms, xi) * g

        points = sorted(set(self._weight_roots(entry.weight_terms, shift, radius)) | {0.0})
        re = quad(lambda x: integrand(x).real, -radius, radius, points=points, limit=200,
                  epsabs=1e-13, epsrel=1e-12)[0]
        im = quad(lambda x: integrand(x).imag, -radius, radius, points=points, limit=200,
                  epsabs=1e-13, epsrel=1e-12)[0]
        return complex(re, im)

    def _numeric_radial(self, entry: InnerEntry, z: complex, radius: float, shift: complex,
                        h_terms: Sequence[Tuple[complex, complex]]) -> complex:
        if any(any(alpha) for alpha, _, _ in entry.weight_terms):
            raise ValueError("Parte interna numerica in dimensione > 1 richiede un peso radiale")
        n = self.dim

        def weight(r: float) -> float:
            return sum(to_complex(amp) * r ** to_complex(mu) for _, mu, amp in entry.weight_terms).real \
                + shift.real

        total = 0j
        for alpha, mu, amp in entry.poly_terms:
            s = to_complex(sphere_integral(alpha))
            if s == 0:
                continue
            e = sum(alpha) + to_complex(mu) + n - 1

            def integrand(r: float) -> complex:
                w = weight(r)
                if w <= 0:
                    return 0j
                return r ** e * sum(c * w ** (p - z) for c, p in h_terms)

            re = quad(lambda r: integrand(r).real, 0, radius, limit=200, epsabs=1e-13, epsrel=1e-12)[0]
            im = quad(lambda r: integrand(r).imag, 0, radius, limit=200, epsabs=1e-13, epsrel=1e-12)[0]
            total += to_complex(amp) * s * complex(re, im)
        return total


ZERO_INNER = InnerPart()
