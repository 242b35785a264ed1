"""Differential polynomials and pseudo-differential operators against sympy."""

from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from genpentagram.diffpoly import ONE, ZERO, DifferentialPolynomial, var, variational_derivative
from genpentagram.errors import FloorUnderflow, MissingNormalization, NotMonic
from genpentagram.psdo import (PseudoDiffOp, agd_operator, equal_modulo_derivatives,
                               fractional_power, from_json, gbinom, hamiltonian_density,
                               psdo_root, to_json)

from oracles import X, apply_differential_operator, dp_to_sympy, euler_operator

atoms = st.builds(var, st.sampled_from(["k", "κ"]), st.integers(0, 2), st.integers(0, 3))
monomials = st.builds(lambda c, fs: c * _prod(fs),
                      st.fractions(-5, 5, max_denominator=4),
                      st.lists(atoms, min_size=0, max_size=3))
polys = st.lists(monomials, min_size=1, max_size=4).map(lambda ms: sum(ms, ZERO))


def _prod(fs):
    out = ONE
    for f in fs:
        out = out * f
    return out


# --- differential polynomials ------------------------------------------------


@settings(max_examples=60, deadline=None)
@given(polys)
def test_total_derivative_matches_sympy(p):
    assert sp.expand(dp_to_sympy(p.total_derivative()) - sp.diff(dp_to_sympy(p), X)) == 0


@settings(max_examples=60, deadline=None)
@given(polys, polys)
def test_ring_operations_match_sympy(p, q):
    assert sp.expand(dp_to_sympy(p * q) - dp_to_sympy(p) * dp_to_sympy(q)) == 0
    assert sp.expand(dp_to_sympy(p - q) - dp_to_sympy(p) + dp_to_sympy(q)) == 0


@settings(max_examples=40, deadline=None)
@given(polys)
def test_variational_derivative_matches_euler_operator(p):
    got = variational_derivative(p, "k", 3)
    expr = dp_to_sympy(p)
    for i in range(3):
        assert sp.expand(dp_to_sympy(got[i]) - euler_operator(expr, "k", i)) == 0


@settings(max_examples=40, deadline=None)
@given(polys)
def test_total_derivatives_are_null_lagrangians(p):
    assert all(c.is_zero() for c in variational_derivative(p.total_derivative(), "k", 3))
    assert all(c.is_zero() for c in variational_derivative(p.total_derivative(), "κ", 3))


@settings(max_examples=30, deadline=None)
@given(polys)
def test_json_round_trip(p):
    assert DifferentialPolynomial.from_json(p.to_json()) == p


def test_substitution_and_evaluation():
    p = var("k", 0, 1) * var("k", 1) + 3
    q = p.substitute({("k", 0): var("κ", 0) * 2})
    assert q == 2 * var("κ", 0, 1) * var("k", 1) + 3
    val = p.evaluate({("k", 0): [0.0, 2.0], ("k", 1): [5.0]})
    assert val == pytest.approx(13.0)


def test_kappa_alias_and_division():
    assert var("kappa", 2) == var("κ", 2)
    assert (var("k", 1) * 4) / 8 == Fraction(1, 2) * var("k", 1)


# --- pseudo-differential operators --------------------------------------------


def test_generalized_binomial():
    assert gbinom(-1, 3) == -1
    assert gbinom(Fraction(1, 2), 2) == Fraction(-1, 8)
    assert gbinom(5, 2) == 10


small_ops = st.dictionaries(st.integers(0, 3), polys, min_size=1, max_size=3).map(PseudoDiffOp)


@settings(max_examples=25, deadline=None)
@given(small_ops, small_ops)
def test_composition_matches_sympy_action(P, Q):
    f = sp.Function("f")(X)
    lhs = apply_differential_operator(P * Q, f)
    rhs = apply_differential_operator(P, apply_differential_operator(Q, f))
    assert sp.expand(lhs - rhs) == 0


@settings(max_examples=25, deadline=None)
@given(small_ops)
def test_adjoint_is_an_involution(P):
    assert P.adjoint().adjoint() == P


def test_inverse_of_d_composes_to_identity():
    Dinv = PseudoDiffOp.D(-1, floor=-8)
    prod = PseudoDiffOp.D(1) * Dinv
    assert prod.coeff(0) == ONE
    assert all(prod.coeff(a).is_zero() for a in range(-7, 0))


def test_floor_is_the_larger_bound():
    P = PseudoDiffOp({-1: var("k", 0)}, floor=-3)
    Q = PseudoDiffOp.D(2)
    R = P * Q
    assert R.floor == -1
    with pytest.raises(FloorUnderflow):
        R.coeff(-2)
    S = PseudoDiffOp({1: ONE, -2: var("k", 1)}, floor=-4)
    assert (S * P).floor == max(-4 + (-1), -3 + 1)


@pytest.mark.parametrize("order", [2, 3, 4, 5, 6])
def test_root_power_reproduces_operator(order):
    L = agd_operator(order)
    R = psdo_root(L, order)
    P = R ** order
    for a in range(P.floor, order + 1):
        assert P.coeff(a) == L.coeffs.get(a, ZERO), a


@pytest.mark.parametrize("order", [3, 4, 5, 6, 7])
def test_first_root_coefficient(order):
    R = psdo_root(agd_operator(order), order)
    assert R.coeff(-1) == var("k", order - 2) / order


def test_root_coefficients_order_four():
    R = psdo_root(agd_operator(4), 4)
    k0, k1, k2 = var("k", 0), var("k", 1), var("k", 2)
    assert R.coeff(-1) == k2 / 4
    assert R.coeff(-2) == (k1 - Fraction(3, 2) * var("k", 2, 1)) / 4
    assert R.coeff(-3) == (k0 + Fraction(5, 4) * var("k", 2, 2) - Fraction(3, 2) * var("k", 1, 1)
                           - Fraction(3, 8) * k2 * k2) / 4


def test_root_coefficients_order_five():
    R = psdo_root(agd_operator(5), 5)
    k3 = var("k", 3)
    l3 = R.coeff(-3)
    assert l3 == (var("k", 1) - 2 * var("k", 2, 1) + 2 * var("k", 3, 2)) / 5 - Fraction(2, 25) * k3 * k3


def test_root_validation():
    with pytest.raises(NotMonic):
        psdo_root(agd_operator(3) * 2, 3)
    with pytest.raises(MissingNormalization):
        psdo_root(agd_operator(3) + PseudoDiffOp({2: var("k", 5)}), 3)


def test_kdv_hamiltonian():
    h = hamiltonian_density(2, 3)
    u = var("k", 0)
    assert h == Fraction(3, 8) * u * u + Fraction(1, 8) * var("k", 0, 2)
    assert equal_modulo_derivatives(h, Fraction(3, 8) * u * u)


def test_boussinesq_hamiltonian():
    # L = D^3 + k1 D + k0; res L^{2/3} is (2/3) k0 up to a total derivative
    h = hamiltonian_density(3, 2)
    assert equal_modulo_derivatives(h, Fraction(2, 3) * var("k", 0))


def test_residue_order_four_exponent_three_quarters():
    h = hamiltonian_density(4, 3)
    k2 = var("k", 2)
    assert equal_modulo_derivatives(h, Fraction(3, 4) * var("k", 0) - Fraction(3, 32) * k2 * k2)


def test_residue_order_five_exponent_three_fifths():
    h = hamiltonian_density(5, 3)
    k3 = var("k", 3)
    assert equal_modulo_derivatives(h, Fraction(3, 5) * (var("k", 1) - k3 * k3 / 5))


def test_fractional_power_integer_exponent_is_exact_power():
    L = agd_operator(3)
    P = fractional_power(L, 3, 3)
    for a in range(P.floor, 4):
        assert P.coeff(a) == L.coeffs.get(a, ZERO)


def test_operator_json_round_trip():
    R = psdo_root(agd_operator(4), 4, 4)
    assert from_json(to_json(R)) == R
