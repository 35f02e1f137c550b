"""
test_covering_lift.py
Rivestimento universale: funzionali Gamma, scomposizione eps-locale, confronto base / rivestimento,
eta_Gamma, Poisson e theta.
"""

import mpmath
import numpy as np
import pytest
import sympy
from scipy.integrate import quad

from config import TOL_EXACT, TOL_ORACLE, TOL_POISSON
from covering_lift import (
    CoveringSpec,
    comparison_trace,
    covering_family,
    eps_local_decompose,
    eta_gamma,
    family_multipliers,
    gamma_res,
    gamma_tr_canonical,
    gamma_tr_smoothing,
    l2_index,
    lift_symbol,
    lifted_defect_check,
    lifted_zeta_equality,
    poisson_consistency,
    project_symbol,
    theta_identity_residual,
)
from multipliers import BandProjector, ExcisedPower, GaussianMultiplier, IntervalMultiplier
from resolvent_powers import Weight
from symbol_core import HomTerm, TrigPoly, diagonal_symbol, monomial_symbol, symbol_from_terms
from zeta_engine import HoloFamily, PoleReport, eta_invariant, index_via_residue


DEPTH = 4
HALF = sympy.Rational(1, 2)


def _laplace(mass=0, potential=None, scale=1):
    terms = [HomTerm(TrigPoly.constant(scale), (0,), 2)]
    const = {(0,): mass}
    const.update(potential or {})
    terms.append(HomTerm(TrigPoly(const, dim=1).scale(scale), (0,), 0))
    return symbol_from_terms(terms, depth=DEPTH, dim=1)


def _family(sig, patch="base"):
    return HoloFamily(Weight(sig, patch=patch), depth=DEPTH, name="lap")


def _quartic_translate_sum(terms=100):
    """sum_{m != 0} int_{|xi| >= 1} |xi|^{-4} e^{-2 pi i m xi} d xi; coda 16 / (2 pi m)^2 in forma chiusa."""
    head = 0.0
    for m in range(1, terms + 1):
        head += 4 * quad(lambda r: r ** -4, 1, np.inf, weight="cos", wvar=2 * np.pi * m, epsabs=1e-13)[0]
    tail = 16 / (2 * np.pi) ** 2 * float(mpmath.zeta(2, terms + 1))
    return head + tail


# ==============================
#  GEOMETRIA
# ==============================

def test_covering_spec_defaults():
    cover = CoveringSpec()
    assert cover.epsilon == sympy.pi / 2
    assert cover.r0 == 2 * sympy.pi
    assert cover.volume == 2 * sympy.pi


@pytest.mark.parametrize("kwargs", [{"epsilon": sympy.pi}, {"epsilon": 4}, {"epsilon": 0}, {"period": -1}])
def test_covering_spec_rejects_bad_geometry(kwargs):
    with pytest.raises(ValueError):
        CoveringSpec(**kwargs)


def test_lift_and_project_keep_symbol():
    sig = _laplace(mass=1)
    lifted = lift_symbol(sig, CoveringSpec())
    assert project_symbol(lifted) is sig
    with pytest.raises(ValueError):
        lift_symbol(sig, CoveringSpec(dim=2))


def test_gamma_functionals():
    cover = CoveringSpec()
    lifted = lift_symbol(monomial_symbol(1, (0,), radial_exp=-1, depth=DEPTH), cover)
    assert gamma_res(lifted).value == pytest.approx(2.0)
    lifted2 = lift_symbol(monomial_symbol(1, (0,), radial_exp=-2, depth=DEPTH), cover)
    assert gamma_tr_canonical(lifted2).value == pytest.approx(2.0)
    g = GaussianMultiplier(t=1)
    assert gamma_tr_smoothing([g], cover).value == pytest.approx(g.base_trace())


# ==============================
#  SCOMPOSIZIONE EPS-LOCALE
# ==============================

def test_eps_local_quartic_offdiagonal_trace():
    cover = CoveringSpec()
    dec = eps_local_decompose(lift_symbol(monomial_symbol(1, (0,), radial_exp=-4, depth=DEPTH), cover))
    (kernel,) = dec.kernels
    assert isinstance(kernel.multiplier, ExcisedPower)
    assert kernel.multiplier.exponent == -4
    ts = dec.offdiagonal_trace()
    assert ts.value.real == pytest.approx(_quartic_translate_sum(), abs=1e-6)
    assert ts.value.imag == pytest.approx(0.0, abs=1e-12)


def test_eps_local_differential_symbol_has_no_offdiagonal_part():
    dec = eps_local_decompose(lift_symbol(_laplace(mass=1), CoveringSpec()))
    assert dec.kernels == ()
    ts = dec.offdiagonal_trace()
    assert ts.value == 0
    assert ts.method == "differenziale"


def test_eps_local_gaussian_smoothing():
    cover = CoveringSpec()
    dec = eps_local_decompose(lift_symbol(_laplace(mass=1), cover), smoothing=[GaussianMultiplier(t=1)])
    expected = 2 * np.sqrt(np.pi) * sum(np.exp(-np.pi ** 2 * m ** 2) for m in range(1, 10))
    assert dec.offdiagonal_trace().value == pytest.approx(expected, rel=1e-12)
    (kernel,) = dec.kernels
    assert kernel.value(0.0) == pytest.approx(GaussianMultiplier(t=1).kernel_value(0.0))


def test_eps_local_periodic_coefficient():
    cover = CoveringSpec()
    coeff = TrigPoly({(0,): 2, (1,): HALF, (-1,): HALF}, dim=1)
    sig = symbol_from_terms([HomTerm(coeff, (0,), -4)], depth=DEPTH, dim=1)
    dec = eps_local_decompose(lift_symbol(sig, cover))
    (kernel,) = dec.kernels
    assert kernel.coefficient_mean() == pytest.approx(2.0, abs=1e-12)
    flat = eps_local_decompose(lift_symbol(monomial_symbol(1, (0,), radial_exp=-4, depth=DEPTH), cover))
    ts = dec.offdiagonal_trace()
    assert ts.value == pytest.approx(2 * flat.offdiagonal_trace().value, abs=1e-9)
    assert ts.method.endswith("+quad")
    # c(0) = 3, c(pi) = 1
    assert kernel.value(2 * np.pi, x=0.0) == pytest.approx(3 * kernel.value(2 * np.pi, x=np.pi))


def test_eps_local_odd_term_vanishes_by_symmetry():
    cover = CoveringSpec()
    sign = monomial_symbol(1, (1,), radial_exp=-1, depth=DEPTH)
    dec = eps_local_decompose(lift_symbol(sign, cover), inner=[IntervalMultiplier(-HALF, 1, 1)])
    assert [type(k.multiplier).__name__ for k in dec.kernels] == ["ExcisedPower", "IntervalMultiplier"]
    assert dec.kernels[0].translate_sum().method == "symmetry"
    assert dec.offdiagonal_trace().value == pytest.approx(IntervalMultiplier(-HALF, 1, 1).offdiagonal_trace().value)


@pytest.mark.parametrize("sig", [
    monomial_symbol(1, (0,), radial_exp=-2, log_power=1, depth=DEPTH),
    _family(_laplace()).symbol(),
])
def test_eps_local_rejects_logs_and_free_z(sig):
    with pytest.raises(ValueError):
        eps_local_decompose(lift_symbol(sig, CoveringSpec()))


# ==============================
#  FAMIGLIE SOLLEVATE
# ==============================

def test_covering_family_uses_band_patch():
    Fc = covering_family(_family(_laplace()), CoveringSpec())
    assert Fc.weight.patch == "band"
    assert Fc.name == "lap~"
    unpatched = covering_family(_family(_laplace(mass=1), patch="none"), CoveringSpec())
    assert unpatched.weight.patch == "none"


def test_lifted_defect_checks_pass():
    F = _family(_laplace(mass=1, potential={(1,): HALF, (-1,): HALF}), patch="none")
    rep = lifted_defect_check(F, CoveringSpec(), tol=TOL_ORACLE)
    assert isinstance(rep, PoleReport)
    assert rep.family == "lap~"
    assert list(rep.poles) == [HALF, 0, -HALF, -1]
    assert len(rep.kv) == len(rep.germs) == DEPTH
    assert rep.germs[0].principal == pytest.approx(1.0, abs=TOL_ORACLE)
    assert rep.germs[0].higher == ()
    assert rep.passed, rep.errors


def test_lifted_defect_check_with_band_patch():
    rep = lifted_defect_check(_family(_laplace()), CoveringSpec(), tol=TOL_ORACLE, points=(0, sympy.Rational(1, 3)))
    assert len(rep.ps) == 2
    assert rep.passed, rep.errors


def test_comparison_trace_on_circle():
    cmp = comparison_trace(_family(_laplace()), CoveringSpec())
    assert cmp.passed
    assert cmp.base_value == pytest.approx(0.0, abs=TOL_EXACT)
    assert cmp.difference == pytest.approx(0.0, abs=TOL_ORACLE)
    assert cmp.smoothing_value == pytest.approx(0.0, abs=TOL_ORACLE)


def test_comparison_trace_at_pole_keeps_principal_part():
    cmp = comparison_trace(_family(_laplace()), CoveringSpec(), point=HALF)
    assert cmp.principal_difference <= TOL_EXACT
    # la banda [1/2, 1) porta 2 log 2 dal simbolo
    assert cmp.difference != pytest.approx(0.0, abs=1e-3)
    assert cmp.passed, cmp


def test_comparison_trace_with_gaussian_smoothing():
    cover = CoveringSpec()
    F = _family(_laplace())
    Fc = covering_family(F, cover, smoothing=[GaussianMultiplier(t=1)])
    cmp = comparison_trace(F, cover, Fcov=Fc)
    assert cmp.difference == pytest.approx(np.sqrt(np.pi), abs=TOL_ORACLE)
    assert cmp.smoothing_value == pytest.approx(np.sqrt(np.pi), abs=TOL_ORACLE)
    assert cmp.passed


def test_comparison_trace_rejects_different_symbols():
    with pytest.raises(ValueError):
        comparison_trace(_family(_laplace()), CoveringSpec(), Fcov=_family(_laplace(mass=1), patch="none"))


def test_lifted_zeta_equality_for_identity_h():
    eq = lifted_zeta_equality(_family(_laplace()), CoveringSpec(), tol=TOL_ORACLE)
    assert eq.holds
    assert "h = 1" in eq.note


def _graded_pair(scale=1):
    plus = _laplace(mass=1, potential={(1,): HALF, (-1,): HALF}, scale=scale)
    return Weight(diagonal_symbol([plus, _laplace(mass=1, scale=scale)], grading=(1, -1)))


@pytest.mark.parametrize("scale", [1, 3, sympy.Rational(1, 2)])
def test_l2_index_matches_base_index_and_scaling(scale):
    F = HoloFamily(_graded_pair(scale), depth=DEPTH)
    value = l2_index(F, CoveringSpec())
    assert value == pytest.approx(0.0, abs=TOL_EXACT)
    assert value == pytest.approx(index_via_residue(F), abs=TOL_EXACT)


def test_l2_index_requires_grading():
    with pytest.raises(ValueError):
        l2_index(_family(_laplace(mass=1), patch="none"), CoveringSpec())


@pytest.mark.parametrize("a, difference", [
    (sympy.Rational(1, 4), 0.5),
    (HALF, 0.0),
    (sympy.Rational(3, 10), 0.4),
    (sympy.Rational(7, 4), -0.5),
])
def test_eta_gamma_and_difference(a, difference):
    eg = eta_gamma(a, DEPTH)
    assert eg.value == pytest.approx(0.0, abs=TOL_ORACLE)
    assert eg.difference.value == pytest.approx(difference, abs=TOL_ORACLE)
    assert "polylog" in eg.difference.method
    assert eg.base == pytest.approx(eta_invariant(a, DEPTH))
    assert eg.passed
    assert eg.error <= TOL_ORACLE


@pytest.mark.parametrize("kwargs", [{"a": 1}, {"a": HALF, "cover": CoveringSpec(period=3)}])
def test_eta_gamma_rejects_bad_input(kwargs):
    with pytest.raises(ValueError):
        eta_gamma(**kwargs)


# ==============================
#  POISSON E THETA
# ==============================

def test_family_multipliers_on_circle():
    ms = family_multipliers(_family(_laplace()), sympy.Rational(5, 4))
    kinds = sorted(type(m).__name__ for m in ms)
    assert kinds == ["BandProjector", "ExcisedPower"]
    power = next(m for m in ms if isinstance(m, ExcisedPower))
    band = next(m for m in ms if isinstance(m, BandProjector))
    assert power.exponent == sympy.Rational(-5, 2)
    assert band.radius == 1


def test_family_multipliers_require_base_patch():
    with pytest.raises(ValueError):
        family_multipliers(_family(_laplace(mass=1), patch="none"), 1)


@pytest.mark.parametrize("z", [sympy.Rational(3, 4), sympy.Rational(5, 4), 2])
def test_poisson_consistency_on_circle(z):
    with mpmath.workdps(30):
        discrete = complex(2 * mpmath.zeta(2 * float(z)) + 1)
    rep = poisson_consistency(_family(_laplace()), z, discrete)
    assert rep.passed, rep
    assert rep.error <= TOL_POISSON + rep.bound


def test_poisson_detects_wrong_value():
    rep = poisson_consistency(_family(_laplace()), 2, 0.0)
    assert not rep.passed


@pytest.mark.parametrize("t, period", [(0.1, 2 * sympy.pi), (1.0, 2 * sympy.pi), (0.5, 3)])
def test_theta_identity(t, period):
    rep = theta_identity_residual(t, period)
    assert rep.passed, rep
