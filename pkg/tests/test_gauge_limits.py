"""Gauge frames, lifted realizations and measured continuous limits."""

import json
from fractions import Fraction

import numpy as np
import pytest

from genpentagram import dioph
from genpentagram.diffpoly import ZERO, DifferentialPolynomial, var
from genpentagram.errors import ChartFailure, NoCleanOrder, UnsupportedDimension
from genpentagram.gauge import (LiftVectorField, delta_kappa, gauge_matrix, gauge_residual,
                                inverse_dictionary, kappa_dictionary, lift_realization,
                                solve_gauge)
from genpentagram.curves import trig_test_curve
from genpentagram.limits import (_neville, fit_limit, fit_order, gamma_epsilon,
                                 gamma_epsilon_coords, limit_flavor, r0_oracle)
from genpentagram.maps import (pentagram_schema, rp3_three_plane_schema,
                               segment_hyperplane_schema, syst2_schema)
from genpentagram.projective import SmoothLiftedCurve, wilczynski_invariants
from genpentagram.psdo import hamiltonian_density


def _field(dim, coeffs):
    cs = [ZERO] * (dim + 1)
    for i, c in coeffs.items():
        cs[i] = c if isinstance(c, DifferentialPolynomial) else DifferentialPolynomial.constant(c)
    return LiftVectorField(dim, cs)


def _curve(m, variant=0):
    return SmoothLiftedCurve(trig_test_curve(m, variant))


# --- gauge --------------------------------------------------------------------


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_solved_gauge_is_consistent(n):
    assert gauge_residual(n, source="derived").is_zero()
    g, d = solve_gauge(n)
    assert all(g.entry(i, i) == 1 for i in range(n + 1))
    assert all(g.entry(i, j).is_zero() for i in range(n + 1) for j in range(i))
    assert set(d) == {("k", i) for i in range(n)}


@pytest.mark.parametrize("n", [3, 4])
def test_stated_gauge_data_leaves_a_residual(n):
    # the tabulated gauge and dictionary for n = 3, 4 do not solve the gauge equation
    assert not gauge_residual(n).is_zero()
    assert gauge_residual(n, kappa_dictionary(n, "derived"), "derived").is_zero()


def test_stated_gauge_data_is_limited_to_small_n():
    with pytest.raises(UnsupportedDimension):
        gauge_matrix(5)


def test_dictionary_inverse_round_trip():
    fwd = kappa_dictionary(4, "derived")
    inv = inverse_dictionary(4, "derived")
    for i in range(4):
        assert fwd[("k", i)].substitute(inv) == var("k", i)


def test_third_order_lift():
    f = lift_realization(3, hamiltonian_density(4, 3), source="derived")
    assert f.coeffs[3] == -1
    assert f.coeffs[2].is_zero()
    assert f.coeffs[1] == -Fraction(3, 4) * var("k", 2)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_second_derivative_lift(n):
    f = lift_realization(n, hamiltonian_density(n + 1, 2), source="derived")
    assert f.coeffs[2] == -1
    assert all(f.coeffs[i].is_zero() for i in range(1, n + 1) if i != 2)


def test_fourth_order_three_fifths_lift():
    f = lift_realization(4, hamiltonian_density(5, 3), source="derived")
    assert f.coeffs[3] == -1
    assert f.coeffs[1] == -Fraction(3, 5) * var("k", 3)
    dk = delta_kappa(4, hamiltonian_density(5, 3), "derived")
    scale = -1 / dk[2].constant_term()
    assert [c * scale for c in dk] == [Fraction(2, 5) * var("k", 3), ZERO,
                                       DifferentialPolynomial.constant(-1), ZERO]


def test_lift_field_serializes():
    f = lift_realization(3, hamiltonian_density(4, 3), source="derived")
    data = json.loads(json.dumps(f.to_json()))
    assert data["dim"] == 3 and data["coeffs"][0] is None
    assert "Γ'''" in str(f)


# --- normalization oracle -----------------------------------------------------


@pytest.mark.parametrize("m", [2, 3, 4])
def test_translation_needs_no_rescaling(m):
    curve = _curve(m)
    assert r0_oracle(curve, 0.3, _field(m, {1: 1})) == pytest.approx(0.0, abs=1e-9)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_second_derivative_flow_rescaling(m):
    curve = _curve(m, 1)
    k = wilczynski_invariants(curve, 0.3)
    got = r0_oracle(curve, 0.3, _field(m, {2: -1}))
    assert got == pytest.approx(-2 * k[m - 1] / (m + 1), rel=1e-8)


def test_rescaling_oracle_against_finite_differences():
    # evolve the curve along Gamma_t and check det(Gamma, ..., Gamma^(m)) stays 1
    m = 2
    curve = _curve(m, 3)
    field = _field(m, {2: -1, 1: var("k", 1)})
    x = 0.4
    c0 = r0_oracle(curve, x, field)
    jets = curve.jet(x, 2 * m + 2)
    kser = np.array([[wilczynski_invariants(curve, x + d)[1] for d in (-2e-3, 0, 2e-3)]])
    dk = (kser[0, 2] - kser[0, 0]) / 4e-3
    k1 = kser[0, 1]
    # V = c0 Gamma - Gamma'' + k1 Gamma', derivatives up to order m
    V = [c0 * jets[j] - jets[j + 2] + k1 * jets[j + 1] for j in range(m + 1)]
    V[1] += dk * jets[1]
    V[2] += 2 * dk * jets[2]
    # d/dt det = sum of column replacements (the k1'' term multiplies Gamma' in column 2,
    # whose contribution to the determinant vanishes)
    F = jets[:m + 1].T
    total = sum(np.linalg.det(np.column_stack([V[j] if i == j else F[:, i]
                                               for i in range(m + 1)])) for j in range(m + 1))
    assert total == pytest.approx(0.0, abs=1e-5)


# --- fitting helpers ----------------------------------------------------------


def test_order_fit_and_extrapolation():
    eps = np.array([0.1, 0.05, 0.025, 0.0125])
    vals = 3.0 * eps**2 + 0.5 * eps**3
    slope, r2 = fit_order(eps, vals)
    assert slope == pytest.approx(2.0, abs=0.1) and r2 > 0.999
    assert _neville(eps, vals / eps**2) == pytest.approx(3.0, abs=1e-12)


def test_gamma_epsilon_is_normalized_lift_near_gamma():
    curve = _curve(3)
    S = segment_hyperplane_schema(3, (-2, 2))
    v = gamma_epsilon(curve, S, 0.3, 1e-3)
    assert np.linalg.norm(v - curve(0.3)) < 1e-4


def test_chart_failure_for_large_steps():
    with pytest.raises(ChartFailure):
        gamma_epsilon_coords(_curve(3), segment_hyperplane_schema(3, (-2, 2)), 0.3, 0.5)


def test_no_clean_order_is_reported():
    with pytest.raises(NoCleanOrder):
        fit_limit(_curve(2), pentagram_schema(), 0.3, (1e-2, 5e-3, 2.5e-3, 1.25e-3),
                  min_r2=1.1)


# --- measured limits ----------------------------------------------------------


def test_syst2_limit():
    S, field, lit, ladder = limit_flavor("syst2")
    curve = _curve(2)
    rep = fit_limit(curve, S, 0.3, ladder, field=field, literature=lit)
    k = wilczynski_invariants(curve, 0.3)
    assert rep.order == 2
    c = rep.extrapolated_coeffs
    assert c[2] == pytest.approx(1.0, rel=1e-6)
    assert c[1] == pytest.approx(0.0, abs=1e-6)
    assert c[0] == pytest.approx(2 / 3 * k[1], rel=1e-5)
    assert rep.discrepancy < 1e-5


@pytest.mark.parametrize("m,offsets", [(3, (-2, 2)), (3, (-3, 3)), (5, (-2, 2, -3, 3))])
def test_symmetric_segment_hyperplane_limit(m, offsets):
    curve = _curve(m)
    S, field, _, ladder = limit_flavor("seg-hyper", m, offsets)
    rep = fit_limit(curve, S, 0.3, ladder, field=field)
    k = wilczynski_invariants(curve, 0.3)
    assert rep.order == 2
    assert rep.extrapolated_coeffs[2] == pytest.approx(0.5, rel=1e-6)
    assert rep.extrapolated_coeffs[0] == pytest.approx(k[m - 1] / (m + 1), rel=1e-4)
    assert rep.r0_deviation < 1e-4


@pytest.mark.parametrize("m,offsets", [(2, (2,)), (3, (2, 3)), (3, (-2, 3))])
def test_asymmetric_segment_hyperplane_limit_is_first_order(m, offsets):
    rep = fit_limit(_curve(m), segment_hyperplane_schema(m, offsets), 0.3)
    assert rep.order == 1
    assert rep.dominant == 1


@pytest.mark.parametrize("reach", [1, 2, 3])
def test_segment_reach_scales_second_derivative(reach):
    S = segment_hyperplane_schema(3, (-4, 4), reach)
    rep = fit_limit(_curve(3), S, 0.3, (5e-3, 2.5e-3, 1.25e-3, 6.25e-4))
    assert rep.extrapolated_coeffs[2] == pytest.approx(reach**2 / 2, rel=1e-4)


def test_rp3_ansatz_limit():
    S, field, lit, ladder = limit_flavor("rp3-ansatz")
    curve = _curve(3)
    rep = fit_limit(curve, S, 0.3, ladder, field=field, literature=lit)
    c = rep.extrapolated_coeffs
    k = wilczynski_invariants(curve, 0.3)
    assert rep.order == 3
    assert c[1] / c[3] == pytest.approx(0.75 * k[2], rel=1e-4)
    assert c[3] == pytest.approx(-5.0, rel=1e-5)  # M_1 / 6 with M_1 = -30


def test_search_hit_predicts_measured_ratio():
    # an exact search hit with q = 1/8 must show the ratio 6 q k2 = 3/4 k2 in the limit
    hit = next(h for h in dioph.rp3_search(6) if h.key() == ((-4, -3, 1), (-3, -1, 4), (1, 2, 6)))
    S = rp3_three_plane_schema(hit.m, hit.n, hit.r)
    curve = _curve(3, 1)
    rep = fit_limit(curve, S, 0.2, (4e-2, 2e-2, 1e-2, 5e-3))
    c = rep.extrapolated_coeffs
    k = wilczynski_invariants(curve, 0.2)
    assert rep.order == 3
    assert c[1] / c[3] == pytest.approx(6 * float(hit.q) * k[2], rel=1e-3)
    assert c[3] == pytest.approx(float(hit.gamma3), rel=1e-4)


def test_two_subspace_limit():
    S, field, _, ladder = limit_flavor("two-subspace")
    curve = _curve(4)
    rep = fit_limit(curve, S, 0.3, ladder, field=field)
    c = rep.extrapolated_coeffs
    k = wilczynski_invariants(curve, 0.3)
    assert c[1] / c[3] == pytest.approx(0.3 * k[3], rel=1e-3)
    assert float(dioph.rp4_two_subspace_ratio((1, 5, -6), (2, 3, -5))) == pytest.approx(0.3)


def test_three_plane_fourth_order_limit_ratio():
    S, _, _, ladder = limit_flavor("rp4")
    curve = _curve(4)
    rep = fit_limit(curve, S, 0.3, ladder)
    c = rep.extrapolated_coeffs
    k = wilczynski_invariants(curve, 0.3)
    assert c[1] / c[3] == pytest.approx(0.2 * k[3], rel=1e-3)


def test_report_serialization():
    S, field, lit, ladder = limit_flavor("syst2")
    rep = fit_limit(_curve(2), S, 0.3, ladder, field=field, literature=lit)
    data = json.loads(json.dumps(rep.to_json()))
    assert data["schema"] == "syst2" and len(data["epsilons"]) == 4
    rows = rep.csv_rows()
    assert rows[0][:2] == ["row", "eps"] and rows[-1][0] == "literature"


def test_unknown_flavor():
    with pytest.raises(ValueError):
        limit_flavor("nope")
