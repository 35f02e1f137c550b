"""
test_zeta_engine.py
Germi meromorfi delle famiglie olomorfe, formule di residuo e parte finita, indice ed eta.
"""

import pytest
import sympy

from config import TOL_EXACT, TOL_ORACLE
from multipliers import GaussianMultiplier
from resolvent_powers import HFunctionSpec, Weight
from symbol_core import HomTerm, TrigPoly, Z, diagonal_symbol, monomial_symbol, symbol_from_terms
from zeta_engine import (
    HoloFamily,
    eta_breakdown,
    eta_invariant,
    index_via_residue,
    inner_part_for,
    kv_residue_check,
    ps_fp_check,
    shifted_sign_family,
    zeta_germ,
    zeta_invariant,
)


DEPTH = 4
HALF = sympy.Rational(1, 2)


def _laplace(dim=1, mass=0, potential=None, depth=DEPTH):
    """|xi|^2 + mass + V(x) sul toro T^dim di periodo 2 pi."""
    zero = (0,) * dim
    terms = [HomTerm(TrigPoly.constant(1, dim=dim), zero, 2)]
    const = {zero: mass}
    const.update(potential or {})
    terms.append(HomTerm(TrigPoly(const, dim=dim), zero, 0))
    return symbol_from_terms(terms, depth=depth, dim=dim)


def _family(sig, patch="none", **kwargs):
    return HoloFamily(Weight(sig, patch=patch), depth=sig.depth, **kwargs)


# ==============================
#  FAMIGLIE
# ==============================

def test_family_rejects_non_differential_factor():
    sig = _laplace()
    with pytest.raises(ValueError):
        HoloFamily(Weight(sig), monomial_symbol(1, (0,), radial_exp=-1, depth=DEPTH))
    with pytest.raises(ValueError):
        HoloFamily(Weight(sig), monomial_symbol(1, (0,), radial_exp=Z, depth=DEPTH))
    with pytest.raises(ValueError):
        HoloFamily(Weight(sig), depth=0)


def test_pole_grid():
    F = _family(_laplace())
    assert F.poles() == [HALF, 0, -HALF, -1]
    with pytest.raises(ValueError):
        F.pole(DEPTH)


def test_pole_grid_with_differential_factor():
    D = monomial_symbol(1, (1,), depth=DEPTH)
    F = HoloFamily(Weight(_laplace(mass=1)), D, depth=DEPTH)
    assert F.base_order == 1
    assert F.pole(0) == 1


def test_inner_part_follows_patch():
    assert inner_part_for(_family(_laplace(), patch="base")).kind == "patched"
    band = inner_part_for(_family(_laplace(), patch="band"))
    assert band.kind == "multiplier" and band.shift == 1
    assert float(band.radius) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        inner_part_for(_family(_laplace(mass=1)), graded=True)


# ==============================
#  GERMI
# ==============================

def test_circle_laplacian_germ():
    F = _family(_laplace(), patch="base")
    germ = zeta_germ(F, HALF)
    assert germ.has_pole
    assert germ.principal == pytest.approx(1.0)
    assert zeta_invariant(F) == pytest.approx(0.0, abs=TOL_EXACT)


def test_torus_laplacian_germ():
    F = _family(_laplace(dim=2), patch="base")
    assert zeta_germ(F, 1).principal == pytest.approx(float(sympy.pi))
    assert zeta_invariant(F) == pytest.approx(0.0, abs=TOL_EXACT)


@pytest.mark.parametrize("potential", [None, {(1,): HALF, (-1,): HALF}])
def test_massive_zeta_at_zero_and_residue(potential):
    F = _family(_laplace(mass=2, potential=potential))
    assert zeta_invariant(F) == pytest.approx(0.0, abs=TOL_ORACLE)
    assert zeta_germ(F, HALF).principal == pytest.approx(1.0)


def test_germ_is_regular_off_the_pole_grid():
    F = _family(_laplace(mass=1, potential={(2,): 1, (-2,): 1}))
    poles = set(F.poles())
    for p in (sympy.Rational(1, 3), sympy.Rational(3, 4), sympy.Rational(-1, 4), 2):
        assert p not in poles
        assert not zeta_germ(F, p).has_pole


def test_smoothing_trace_is_added():
    g = GaussianMultiplier(t=1)
    F = _family(_laplace(), patch="base", smoothing=(g,))
    plain = _family(_laplace(), patch="base")
    shift = zeta_germ(F, 0).finite - zeta_germ(plain, 0).finite
    assert shift == pytest.approx(g.base_trace())


# ==============================
#  RESIDUI E PARTI FINITE
# ==============================

@pytest.mark.parametrize("j", range(DEPTH))
def test_kv_residue_formula_on_every_pole(j):
    F = _family(_laplace(mass=1, potential={(1,): HALF, (-1,): HALF}))
    check = kv_residue_check(F, j)
    assert check.passed, check


def test_kv_residue_on_torus():
    check = kv_residue_check(_family(_laplace(dim=2), patch="base"), 0)
    assert check.passed
    assert check.rhs == pytest.approx(float(sympy.pi))


def test_ps_formula_at_zero():
    F = _family(_laplace(mass=1, potential={(1,): HALF, (-1,): HALF}))
    check = ps_fp_check(F, point=0, tol=TOL_ORACLE)
    assert check.passed, check
    assert check.tr_term == 0


def test_ps_formula_off_the_grid():
    F = _family(_laplace(mass=1))
    check = ps_fp_check(F, point=sympy.Rational(3, 4), tol=TOL_ORACLE)
    assert check.passed, check


def test_ps_requires_point_or_index():
    with pytest.raises(ValueError):
        ps_fp_check(_family(_laplace(mass=1)))


def test_h_factor_shifts_poles():
    F = HoloFamily(Weight(_laplace(mass=1)), h_factor=HFunctionSpec.polynomial(0, 1), depth=DEPTH)
    assert F.pole(0) == sympy.Rational(3, 2)
    assert kv_residue_check(F, 0).passed


# ==============================
#  INDICE ED ETA
# ==============================

def test_index_of_graded_weight_vanishes_on_circle():
    plus = _laplace(mass=1, potential={(1,): HALF, (-1,): HALF})
    minus = _laplace(mass=1)
    W = Weight(diagonal_symbol([plus, minus], grading=(1, -1)))
    assert index_via_residue(HoloFamily(W, depth=DEPTH)) == pytest.approx(0.0, abs=TOL_EXACT)
    with pytest.raises(ValueError):
        index_via_residue(_family(_laplace(mass=1)))


def test_shifted_sign_family_shape():
    F = shifted_sign_family(sympy.Rational(1, 4), DEPTH)
    assert F.base_order == 0
    assert F.poly_factor is not None


@pytest.mark.parametrize("a, expected", [(sympy.Rational(1, 4), 0.5), (0.3, 0.4), (sympy.Rational(5, 4), 0.5)])
def test_eta_invariant(a, expected):
    assert eta_invariant(a, DEPTH).real == pytest.approx(expected, abs=TOL_ORACLE)


def test_eta_breakdown_reduces_shift():
    br = eta_breakdown(sympy.Rational(9, 4), DEPTH)
    assert br.a == sympy.Rational(1, 4)
    assert br.smoothing.value.real == pytest.approx(0.5, abs=1e-12)
    with pytest.raises(ValueError):
        eta_breakdown(2)
