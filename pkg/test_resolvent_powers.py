"""
test_resolvent_powers.py
Parametrice del risolvente, potenze complesse Q^{-z}, logaritmo e funzioni h(Q).
"""

import numpy as np
import pytest
import sympy

from resolvent_powers import (
    HFunctionSpec,
    Weight,
    complex_power_symbol,
    contour_factor,
    h_of_weight,
    log_symbol,
    resolvent_defect_vanishes,
)
from symbol_core import (
    HomTerm,
    TrigPoly,
    Z,
    identity_symbol,
    monomial_symbol,
    star_product,
    symbol_from_terms,
)


DEPTH = 4


def _weight(potential=None, mass=1, depth=DEPTH, **kwargs):
    """xi^2 + mass + V(x) su S^1."""
    terms = [HomTerm(TrigPoly.constant(1), (0,), 2)]
    const = {0: mass}
    const.update(potential or {})
    terms.append(HomTerm(TrigPoly(const, dim=1), (0,), 0))
    return Weight(symbol_from_terms(terms, depth=depth, dim=1), **kwargs)


def test_weight_rejects_other_cuts_and_orders():
    with pytest.raises(ValueError):
        _weight(spectral_cut=1.0)
    with pytest.raises(ValueError):
        Weight(monomial_symbol(1, (0,), radial_exp=-2, depth=DEPTH))
    with pytest.raises(ValueError):
        _weight(patch="strana")


def test_leading_coefficient_must_be_scalar_constant():
    sig = monomial_symbol(TrigPoly({0: 2, 1: 1}, dim=1), (0,), radial_exp=2, depth=DEPTH)
    with pytest.raises(ValueError):
        Weight(sig).leading_coeff
    assert _weight().leading_coeff == 1


@pytest.mark.parametrize("potential", [None, {1: sympy.Rational(1, 2), -1: sympy.Rational(1, 2)},
                                       {2: sympy.I, -2: -sympy.I}])
def test_resolvent_parametrix_inverts_weight(potential):
    assert resolvent_defect_vanishes(_weight(potential), DEPTH)


def test_contour_factor_values():
    assert contour_factor(1) == 1
    assert contour_factor(2) == Z
    assert sympy.expand(contour_factor(3) - Z * (Z + 1) / 2) == 0


def test_power_at_zero_is_identity():
    Q = _weight({1: 1, -1: 1})
    assert complex_power_symbol(Q, 0, DEPTH).equivalent(identity_symbol(depth=DEPTH))


_GROUP_POTENTIALS = [
    None,
    {1: 1, -1: 1},
    {1: sympy.Rational(1, 3), -1: sympy.Rational(1, 3)},
    {2: sympy.I, -2: -sympy.I},
]


def _group_law_cases(count=20, seed=11):
    rng = np.random.default_rng(seed)
    cases = []
    for _ in range(count):
        potential = _GROUP_POTENTIALS[int(rng.integers(len(_GROUP_POTENTIALS)))]
        s = sympy.Rational(int(rng.integers(1, 9)), 4)
        t = sympy.Rational(int(rng.integers(1, 9)), 4)
        cases.append((potential, s, t))
    return cases


@pytest.mark.parametrize("potential, s, t", _group_law_cases())
def test_power_group_law(potential, s, t):
    Q = _weight(potential)
    left = star_product(complex_power_symbol(Q, s, DEPTH), complex_power_symbol(Q, t, DEPTH))
    assert left.equivalent(complex_power_symbol(Q, s + t, DEPTH))


def test_inverse_power_inverts_weight():
    Q = _weight({1: sympy.Rational(1, 3), -1: sympy.Rational(1, 3)})
    inv = complex_power_symbol(Q, 1, DEPTH)
    assert star_product(inv, Q.symbol).equivalent(identity_symbol(depth=DEPTH))


def test_power_family_order_depends_on_z():
    Q = _weight()
    fam = complex_power_symbol(Q, None, DEPTH)
    assert sympy.expand(fam.order + 2 * Z) == 0
    assert fam.free_symbols() == {Z}


def test_log_symbol_leading_term():
    Q = _weight()
    lead = log_symbol(Q, DEPTH).component(0).terms
    assert [t.key for t in lead] == [((0,), sympy.Integer(0), 1)]
    assert lead[0].coeff == TrigPoly.constant(2)


def test_h_function_orders():
    assert HFunctionSpec.identity().is_identity()
    assert HFunctionSpec.polynomial(1, 0, 1).order(2) == 4
    assert HFunctionSpec.power(sympy.Rational(1, 2)).order(2) == -1
    assert HFunctionSpec.composite([0, 1], 2).order(2) == -2
    with pytest.raises(ValueError):
        HFunctionSpec.power(0)


def test_h_evaluate():
    h = HFunctionSpec.composite([1, 1], 1)
    assert h.evaluate(2.0) == pytest.approx((1 + 2) / 2)


def test_h_of_weight_polynomial_is_star_power():
    Q = _weight()
    h = HFunctionSpec.polynomial(0, 0, 1)
    assert h_of_weight(Q, h, DEPTH).equivalent(star_product(Q.symbol, Q.symbol))


def test_h_of_weight_power_matches_complex_power():
    Q = _weight({1: 1, -1: 1})
    s = sympy.Rational(3, 2)
    assert h_of_weight(Q, HFunctionSpec.power(s), DEPTH).equivalent(complex_power_symbol(Q, s, DEPTH))
