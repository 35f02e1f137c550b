"""
test_spectral_oracle.py
Oracoli spettrali: Hurwitz, Epstein, cerchio massivo, operatore traslato, matrice di Fourier, calore.
"""

import math

import numpy as np
import pytest

from config import TOL_MATRIX, TOL_ORACLE
from spectral_oracle import (
    ModelSpectrum,
    SpectralPatch,
    epstein_zeta,
    eta_series,
    fourier_matrix_eigenvalues,
    fourier_matrix_zeta,
    gamma_heat_trace,
    gamma_spectral_zeta,
    heat_supertrace,
    hurwitz_zeta,
    massive_circle_zeta,
    riemann_zeta,
    shifted_zeta,
    spectral_zeta,
    torus_heat_trace,
)
from symbol_core import TrigPoly


def _potential(modes):
    return TrigPoly(modes, dim=1)


# ==============================
#  HURWITZ / RIEMANN
# ==============================

@pytest.mark.parametrize("s, expected", [
    (2, math.pi ** 2 / 6),
    (4, math.pi ** 4 / 90),
    (0, -0.5),
    (-1, -1 / 12),
    (0.5, -1.4603545088095868),
])
def test_riemann_zeta(s, expected):
    out = riemann_zeta(s)
    assert out.value.real == pytest.approx(expected, abs=TOL_ORACLE)
    assert out.bound < TOL_ORACLE


def test_hurwitz_zeta_half():
    assert hurwitz_zeta(2, 0.5).value.real == pytest.approx(math.pi ** 2 / 2, abs=TOL_ORACLE)


def test_hurwitz_rejects_pole_and_bad_parameter():
    with pytest.raises(ValueError):
        hurwitz_zeta(1)
    with pytest.raises(ValueError):
        hurwitz_zeta(2, 0)


# ==============================
#  TORO E CERCHIO MASSIVO
# ==============================

def test_epstein_on_circle_is_twice_riemann():
    assert epstein_zeta(1, dim=1).value.real == pytest.approx(math.pi ** 2 / 3, abs=TOL_ORACLE)
    assert epstein_zeta(0.75, dim=1).value.real == pytest.approx(2 * riemann_zeta(1.5).value.real,
                                                                 abs=TOL_ORACLE)


def test_epstein_scales_with_period():
    L = 3.0
    assert epstein_zeta(1, dim=1, period=L).value.real == pytest.approx(
        (L / (2 * math.pi)) ** 2 * math.pi ** 2 / 3, abs=TOL_ORACLE)


def test_epstein_at_zero_and_pole():
    assert epstein_zeta(0, dim=2).value.real == pytest.approx(-1.0, abs=TOL_ORACLE)
    with pytest.raises(ValueError):
        epstein_zeta(1, dim=2)


def test_massive_circle_zeta():
    c = 2.0
    root = math.sqrt(c)
    expected = math.pi / root / math.tanh(math.pi * root)
    assert massive_circle_zeta(1, c).value.real == pytest.approx(expected, abs=TOL_ORACLE)
    assert massive_circle_zeta(0, c).value == pytest.approx(0.0, abs=TOL_ORACLE)
    with pytest.raises(ValueError):
        massive_circle_zeta(1, 0)


# ==============================
#  OPERATORE TRASLATO
# ==============================

def test_shifted_zeta():
    # sum_k (k + a)^-2 = pi^2 / sin^2(pi a)
    assert shifted_zeta(2, 0.25).value.real == pytest.approx(2 * math.pi ** 2, abs=TOL_ORACLE)


@pytest.mark.parametrize("a", [0.25, 0.3, 1.7])
def test_eta_series_at_zero(a):
    frac = a % 1
    assert eta_series(0, a).value.real == pytest.approx(1 - 2 * frac, abs=TOL_ORACLE)


def test_eta_series_rejects_integer_shift():
    with pytest.raises(ValueError):
        eta_series(0, 2)


# ==============================
#  MATRICE DI FOURIER
# ==============================

def test_fourier_matrix_free_spectrum():
    eigs = fourier_matrix_eigenvalues(_potential({}), cutoff=3)
    assert np.allclose(eigs, [0, 1, 1, 4, 4, 9, 9])


def test_fourier_matrix_rejects_complex_potential():
    with pytest.raises(ValueError):
        fourier_matrix_eigenvalues(_potential({1: 1}), cutoff=3)
    with pytest.raises(ValueError):
        fourier_matrix_eigenvalues(TrigPoly({0: 1}, dim=1, period=3), cutoff=3)


def test_fourier_matrix_matches_massive_circle():
    out = fourier_matrix_zeta(_potential({0: 2}), 1, cutoff=64)
    assert out.value.real == pytest.approx(massive_circle_zeta(1, 2).value.real, abs=TOL_MATRIX)
    assert out.bound < TOL_MATRIX


def test_fourier_matrix_zeta_at_zero_with_potential():
    out = fourier_matrix_zeta(_potential({0: 2, 1: 0.5, -1: 0.5}), 0, cutoff=64)
    assert out.value == pytest.approx(0.0, abs=TOL_ORACLE)


def test_fourier_matrix_zeta_rejects_tail_pole():
    with pytest.raises(ValueError):
        fourier_matrix_zeta(_potential({0: 2}), 0.5, cutoff=16)


# ==============================
#  CALORE
# ==============================

def test_torus_heat_trace_matches_direct_sum():
    t = 0.3
    direct = sum(math.exp(-t * k * k) for k in range(-100, 101))
    assert torus_heat_trace(t).value.real == pytest.approx(direct, rel=1e-12)
    assert torus_heat_trace(t, dim=2).value.real == pytest.approx(direct ** 2, rel=1e-12)


def test_gamma_heat_trace_is_gaussian_integral():
    t = 0.3
    assert gamma_heat_trace(t).value.real == pytest.approx(math.sqrt(math.pi / t), rel=1e-12)


def test_heat_supertrace_of_isospectral_pair():
    spec = [1.0, 2.0, 2.0, 5.0]
    assert heat_supertrace(spec, list(reversed(spec)), 0.7) == pytest.approx(0.0)
    assert heat_supertrace([0.0, 1.0], [1.0], 2.0) == pytest.approx(1.0)


# ==============================
#  MODELLI
# ==============================

@pytest.mark.parametrize("dim", [1, 2])
def test_torus_model_zeta_at_zero_with_base_patch(dim):
    model = ModelSpectrum("torus-laplacian", dim=dim)
    assert spectral_zeta(model, 0).value.real == pytest.approx(0.0, abs=TOL_ORACLE)


def test_torus_model_without_patch():
    model = ModelSpectrum("torus-laplacian", patch=SpectralPatch("none"))
    assert model.zeta(0).value.real == pytest.approx(-1.0, abs=TOL_ORACLE)


def test_massive_model_rescales_period():
    model = ModelSpectrum("torus-laplacian", mass=2.0)
    assert model.zeta(1).value.real == pytest.approx(massive_circle_zeta(1, 2).value.real, abs=TOL_ORACLE)


def test_shifted_model_eta_and_errors():
    model = ModelSpectrum("shifted-1d", shift=0.25)
    assert model.eta(0).value.real == pytest.approx(0.5, abs=TOL_ORACLE)
    with pytest.raises(ValueError):
        model.heat(1.0)
    with pytest.raises(ValueError):
        ModelSpectrum("torus-laplacian").eta(0)
    with pytest.raises(ValueError):
        ModelSpectrum("fourier-matrix")
    with pytest.raises(ValueError):
        ModelSpectrum("sfera")
    with pytest.raises(ValueError):
        SpectralPatch("altro")


def test_torus_model_heat_with_patch():
    t = 0.5
    model = ModelSpectrum("torus-laplacian")
    plain = torus_heat_trace(t).value.real
    assert model.heat(t).value.real == pytest.approx(plain - 1 + math.exp(-t))


def test_gamma_spectral_zeta_at_zero():
    assert gamma_spectral_zeta(0).value.real == pytest.approx(0.0, abs=TOL_ORACLE)
    with pytest.raises(ValueError):
        gamma_spectral_zeta(0.5)
