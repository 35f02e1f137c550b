"""
test_trace_functionals.py
Residuo di Wodzicki, traccia canonica, supertracce e parti finite radiali.
"""

import pytest
import sympy

from symbol_core import (
    HomTerm,
    TrigPoly,
    diagonal_symbol,
    monomial_symbol,
    symbol_add,
    symbol_scale,
)
from trace_functionals import (
    SphereIntegralTable,
    ball_integral,
    canonical_supertrace,
    canonical_trace,
    check_trace_order,
    radial_finite_part,
    radial_fp_value,
    res_density,
    sphere_integral,
    sres,
    wres,
)


DEPTH = 3
HALF = sympy.Rational(1, 2)


def _radial(coeff, mu, dim=1, monomial=None, log_power=0):
    mono = monomial if monomial is not None else (0,) * dim
    return monomial_symbol(coeff, mono, radial_exp=mu, log_power=log_power, depth=DEPTH)


# ==============================
#  INTEGRALI ESATTI
# ==============================

@pytest.mark.parametrize("alpha, expected", [
    ((0,), 2),
    ((1,), 0),
    ((0, 0), 2 * sympy.pi),
    ((2, 0), sympy.pi),
    ((1, 1), 0),
    ((0, 0, 0), 4 * sympy.pi),
])
def test_sphere_integral(alpha, expected):
    assert sympy.simplify(sphere_integral(alpha) - expected) == 0


def test_sphere_table_checks_dimension():
    table = SphereIntegralTable(2)
    assert sympy.simplify(table.value((0, 2)) - sympy.pi) == 0
    with pytest.raises(ValueError):
        table.value((0,))


def test_ball_integral():
    assert ball_integral((0,), 0) == 2
    assert sympy.simplify(ball_integral((0, 0), 2, HALF) - 2 * sympy.pi / 64) == 0
    with pytest.raises(ValueError):
        ball_integral((0,), -1)


@pytest.mark.parametrize("s, log_power, radius, expected", [
    (-1, 0, 1, 1),
    (-1, 1, 1, 1),
    (-2, 2, 1, sympy.Rational(1, 4)),
    (0, 0, HALF, sympy.log(2)),
    (-1, 0, HALF, 2),
    (0, 1, 1, 0),
])
def test_radial_fp_value(s, log_power, radius, expected):
    assert sympy.simplify(radial_fp_value(s, log_power, radius) - expected) == 0


def test_radial_finite_part_pole_data():
    term = HomTerm(TrigPoly.constant(1), (0,), -1, 1)
    fp = radial_finite_part(term)
    assert fp.pole and fp.pole_order == 2
    assert fp.pole_coeff == 1
    assert fp.finite_part == 0


# ==============================
#  RESIDUO
# ==============================

def test_wres_of_inverse_abs_xi_on_circle():
    assert wres(_radial(1, -1)) == 2


def test_wres_ignores_oscillating_coefficients():
    assert wres(_radial(TrigPoly({1: 1, -1: 1}, dim=1), -1)) == 0


def test_wres_vanishes_on_differential_symbols():
    assert wres(_radial(1, 2)) == 0


def test_res_density_is_local():
    dens = res_density(_radial(TrigPoly({0: 1, 1: 3}, dim=1), -1))
    assert dens.value == TrigPoly({0: 1 / sympy.pi, 1: 3 / sympy.pi}, dim=1)


def test_wres_on_torus():
    # (2 pi)^-2 * 2 pi * (2 pi)^2
    assert sympy.simplify(wres(_radial(1, -2, dim=2)) - 2 * sympy.pi) == 0


def test_sres_uses_grading():
    sig = diagonal_symbol([_radial(1, -1), _radial(3, -1)], grading=(1, -1))
    assert sres(sig) == -4
    assert wres(sig) == 8


# ==============================
#  TRACCIA CANONICA
# ==============================

def test_canonical_trace_matches_convergent_integral():
    assert canonical_trace(_radial(1, -2)) == 2
    assert canonical_trace(_radial(1, -2), radius=HALF) == 4


def test_canonical_trace_non_integer_order():
    assert canonical_trace(_radial(1, -HALF)) == -4
    assert canonical_trace(_radial(1, -HALF * 3)) == 4


def test_canonical_trace_rejects_integer_orders():
    with pytest.raises(ValueError):
        canonical_trace(_radial(1, -1))
    with pytest.raises(ValueError):
        check_trace_order(_radial(1, 2))


def test_canonical_trace_is_linear():
    a = _radial(1, -HALF * 3)
    b = symbol_add(_radial(TrigPoly({0: 2, 1: 1}, dim=1), -HALF * 3), _radial(1, -HALF * 5))
    combined = canonical_trace(symbol_add(a, symbol_scale(b, 2)))
    expected = canonical_trace(a) + 2 * canonical_trace(b)
    assert sympy.simplify(combined - expected) == 0


def test_canonical_supertrace():
    sig = diagonal_symbol([_radial(1, -2), _radial(2, -2)], grading=(1, -1))
    assert canonical_supertrace(sig) == -2
    with pytest.raises(ValueError):
        canonical_supertrace(_radial(1, -2))
