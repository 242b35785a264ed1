"""The acceptance suite: eleven criteria, each a list of pass/fail checks.

Every criterion is a function ``criterion_N(config) -> CriterionResult``.
Tolerances are module constants; ``AcceptanceConfig.limit_tol`` overrides all
limit-fit tolerances at once (useful as a negative control).
"""

import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import dioph
from .curves import trig_test_curve
from .diffpoly import ZERO, DifferentialPolynomial, var, variational_derivative
from .errors import GeometryError
from .gauge import delta_kappa, gauge_residual, lift_realization
from .limits import THIRD_ORDER_LADDER, evaluate_field, fit_limit, limit_flavor
from .maps import (apply_schema, pentagram_schema, random_convex_polygon, rp3_ansatz_schema,
                   rp4_schema, rp4_two_subspace_schema, segment_hyperplane_schema,
                   syst2_schema)
from .projective import (LiftedPolygon, SmoothLiftedCurve, angular_distance,
                         projective_equivalence, random_sl, wilczynski_invariants)
from .psdo import PseudoDiffOp, agd_operator, hamiltonian_density, psdo_root

CLOSURE_TOL = 1e-9
ORDER_TOL_2 = 0.05
ORDER_TOL_3 = 0.1
COEFF_REL_TOL = 1e-3
GAMMA_COEFF_REL_TOL = 1e-2
SMALL_COEFF_TOL = 1e-3
RATIO_TOL = 1e-2
EQUIVARIANCE_TOL = 1e-9
BASE_POINT = 0.3

SECOND_ORDER_CASES = {
    2: [(2,), (-2,), (3,)],
    3: [(-2, 2), (-3, 3), (2, 3)],
    4: [(-2, 2, 3), (-3, -2, 2), (2, 3, 4)],
    5: [(-2, 2, -3, 3), (-3, 3, -4, 4), (2, 3, 4, 5)],
}
RP4_ROWS = [((7, -1, -7), (3, -1, -3), (6, -3, -4)),
            ((7, -1, -7), (3, -1, -3), (4, -2, -3)),
            ((7, -1, -7), (6, -3, -4), (4, -2, -3))]
RP3_FAMILY = ((5, -2, 3), (-5, 2, 3), (-5, -1, -6))
SQUARE_TRIPLES = ((-1, -2, 3), (-1, 2, -3), (1, -2, -3))


@dataclass
class AcceptanceConfig:
    seed: int = 0
    threads: int = 4
    max_abs_rp4: int = 7
    limit_tol: float = None
    x: float = BASE_POINT

    def tol(self, default):
        return default if self.limit_tol is None else self.limit_tol


@dataclass
class Check:
    label: str
    passed: bool
    detail: str = ""


@dataclass
class CriterionResult:
    number: int
    title: str
    checks: list = field(default_factory=list)
    runtime: float = 0.0
    budget: float = None

    @property
    def passed(self):
        in_time = self.budget is None or self.runtime <= self.budget
        return in_time and all(c.passed for c in self.checks)

    def failed_checks(self):
        out = [c for c in self.checks if not c.passed]
        if self.budget is not None and self.runtime > self.budget:
            out.append(Check("runtime", False, f"{self.runtime:.1f} s > {self.budget} s"))
        return out

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        n_ok = sum(c.passed for c in self.checks)
        text = f"[{status}] {self.number:>2}. {self.title} ({n_ok}/{len(self.checks)} checks, " \
               f"{self.runtime:.1f} s)"
        bad = self.failed_checks()
        if bad:
            text += "; failing: " + "; ".join(f"{c.label}: {c.detail}" for c in bad)
        return text

    def to_json(self):
        return {"number": self.number, "title": self.title, "passed": self.passed,
                "runtime": self.runtime, "budget": self.budget,
                "checks": [{"label": c.label, "passed": c.passed, "detail": c.detail}
                           for c in self.checks]}


def _timed(number, title, budget):
    def wrap(fn):
        def run(config=None):
            config = config or AcceptanceConfig()
            res = CriterionResult(number, title, budget=budget)
            t0 = time.perf_counter()
            fn(config, res.checks)
            res.runtime = time.perf_counter() - t0
            return res
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run
    return wrap


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


# ---------------------------------------------------------------------------
# 1


def _closes(P, Q):
    """Projective equivalence up to an index shift; returns (shift, residual)."""
    for s in range(P.period):
        eq = projective_equivalence(Q, P.shifted(s), tol=CLOSURE_TOL)
        if eq is not None:
            return s, eq.residual
    return None, None


@_timed(1, "Pentagon/hexagon closure", 5.0)
def criterion_1(config, checks):
    """T(P) ~ P on pentagons and T^2(P) ~ P on hexagons, up to relabeling."""
    rng = np.random.default_rng(config.seed)
    S = pentagram_schema()
    for N, iters in ((5, 1), (6, 2)):
        worst, shifts, fails = 0.0, set(), 0
        for _ in range(100):
            P = random_convex_polygon(N, rng)
            Q = P
            for _ in range(iters):
                Q = apply_schema(Q, S, normalize=False)
            s, r = _closes(P, Q)
            if s is None:
                fails += 1
            else:
                worst = max(worst, r)
                shifts.add(s)
        checks.append(Check(f"N={N}, {iters} step(s)", fails == 0,
                            f"{100 - fails}/100 equivalent, max residual {worst:.1e}, "
                            f"index shifts {sorted(shifts)}"))


# ---------------------------------------------------------------------------
# 2 - 4


def _curve(m, variant=0):
    return SmoothLiftedCurve(trig_test_curve(m, variant))


@_timed(2, "Second-order limits of segment-hyperplane maps", 30.0)
def criterion_2(config, checks):
    """Order 2, Gamma'' -> 1/2, Gamma -> -k_{m-1}/(m+1), other coefficients -> 0."""
    x = config.x
    for m, cases in SECOND_ORDER_CASES.items():
        curve = _curve(m)
        k = wilczynski_invariants(curve, x)
        for offs in cases:
            S = segment_hyperplane_schema(m, offs)
            label = f"m={m} offsets={offs}"
            try:
                rep = fit_limit(curve, S, x, order=2)
            except GeometryError as exc:
                checks.append(Check(label, False, f"{type(exc).__name__}: {exc}"))
                continue
            a1, a2 = np.array(rep.series_coeffs[0]), np.array(rep.series_coeffs[1])
            order_ok = abs(rep.fitted_order - 2) <= config.tol(ORDER_TOL_2)
            g2 = a2[2]
            g2_ok = _rel(g2, 0.5) <= config.tol(COEFF_REL_TOL)
            stated0 = -k[m - 1] / (m + 1)
            g0_ok = _rel(a2[0], stated0) <= config.tol(GAMMA_COEFF_REL_TOL)
            others = max(np.max(np.abs(a1)), abs(a2[1]), *np.abs(a2[3:]), 0.0)
            others_ok = others <= config.tol(SMALL_COEFF_TOL)
            detail = (f"order {rep.fitted_order:.3f}, G'' {g2:.6f}, G {a2[0]:.5f} "
                      f"vs -k/(m+1) = {stated0:.5f} (+k/(m+1) = {-stated0:.5f}), "
                      f"eps^1 G' {a1[1]:.4f}, max other {others:.1e}")
            checks.append(Check(label, order_ok and g2_ok and g0_ok and others_ok, detail))


@_timed(3, "Boussinesq-type map syst2", None)
def criterion_3(config, checks):
    """Order 2, Gamma'' -> 1, Gamma' -> 0, Gamma-coefficient = oracle value."""
    x = config.x
    curve = _curve(2)
    S, field_, literature, ladder = limit_flavor("syst2")
    rep = fit_limit(curve, S, x, ladder, field=field_, literature=literature)
    e = rep.extrapolated_coeffs
    checks.append(Check("order 2", abs(rep.fitted_order - 2) <= config.tol(ORDER_TOL_2),
                        f"{rep.fitted_order:.4f}"))
    checks.append(Check("G'' = 1", _rel(e[2], 1.0) <= config.tol(COEFF_REL_TOL), f"{e[2]:.8f}"))
    checks.append(Check("G' = 0", abs(e[1]) <= config.tol(SMALL_COEFF_TOL), f"{e[1]:.2e}"))
    checks.append(Check("G = r0 oracle",
                        _rel(e[0], rep.r0_oracle) <= config.tol(GAMMA_COEFF_REL_TOL),
                        f"measured {e[0]:.6f}, oracle {rep.r0_oracle:.6f}, "
                        f"-2/3 k0 = {rep.literature_coeffs[0]:.6f} (informational)"))


def _third_order_checks(config, checks, label, flavor, target, curve_dim, kidx):
    curve = _curve(curve_dim)
    x = config.x
    S, _, _, ladder = limit_flavor(flavor)
    rep = fit_limit(curve, S, x, ladder)
    k = wilczynski_invariants(curve, x)
    e = np.array(rep.extrapolated_coeffs)
    scale = np.max(np.abs(e))
    ab = max(np.max(np.abs(rep.series_coeffs[0])), np.max(np.abs(rep.series_coeffs[1]))) / scale
    ratio = e[1] / e[3] / k[kidx]
    checks.append(Check(f"{label}: A = B = 0", ab <= config.tol(SMALL_COEFF_TOL),
                        f"max scaled eps, eps^2 coefficient {ab:.1e}"))
    checks.append(Check(f"{label}: order 3", abs(rep.fitted_order - 3) <= config.tol(ORDER_TOL_3),
                        f"{rep.fitted_order:.4f}"))
    checks.append(Check(f"{label}: G'/G''' = {target} k{kidx}",
                        _rel(ratio, float(target)) <= config.tol(RATIO_TOL), f"{ratio:.6f}"))


@_timed(4, "RP^3 third-order limits", 60.0)
def criterion_4(config, checks):
    """The ansatz map realizes the AGD ratio 3/4; equal-square triples give 7/10."""
    _third_order_checks(config, checks, "ansatz(-2,3,-5)", "rp3-ansatz", Fraction(3, 4), 3, 2)
    _third_order_checks(config, checks, "equal squares", "lemma-square", Fraction(7, 10), 3, 2)


# ---------------------------------------------------------------------------
# 5 - 8


@_timed(5, "Exact RP^3 conditions", None)
def criterion_5(config, checks):
    c = dioph.rp3_candidate(*dioph.ansatz_triples(-2, 3, -5))
    checks.append(Check("ansatz q = 1/8", c.c1_holds and c.rank_full and c.q == Fraction(1, 8),
                        f"q = {c.q}"))
    c = dioph.rp3_candidate(*SQUARE_TRIPLES)
    checks.append(Check("equal squares q = 7/60", c.sum_squares_equal and c.q == Fraction(7, 60),
                        f"q = {c.q}"))
    v = dioph.rp3_level_condition(-2, 3, -5)
    checks.append(Check("level(-2,3,-5) = -5/4", v == Fraction(-5, 4), str(v)))


def _canon(triples):
    return tuple(sorted(tuple(sorted(t)) for t in triples))


@_timed(6, "RP^3 minimality", 300.0)
def criterion_6(config, checks):
    h5 = dioph.rp3_search(5, Fraction(1, 8), threads=config.threads)
    checks.append(Check("max_abs 5 empty", not h5, f"{len(h5)} hits"))
    h6 = dioph.rp3_search(6, Fraction(1, 8), threads=config.threads)
    keys = {_canon(c.key()) for c in h6}
    checks.append(Check("max_abs 6 contains the ansatz family", _canon(RP3_FAMILY) in keys,
                        f"{len(h6)} hits"))


def _rp4_row(row):
    m, n, r = (tuple(sorted(t)) for t in row)
    n, r = sorted((n, r))
    return (m, n, r)


@_timed(7, "RP^4 three-plane conditions", 600.0)
def criterion_7(config, checks):
    for i, row in enumerate(RP4_ROWS, 1):
        c = dioph.rp4_three_plane_check(*row)
        checks.append(Check(f"row {i} passes", c.passes,
                            f"condition1 {c.condition1}, rank {c.rank_full}, "
                            f"20 det_x = {20 * c.det_x}, det_m = {c.det_m}, "
                            f"-9 identity {c.identity_holds}, +9 identity "
                            f"{c.flipped_identity_holds}"))
    low = config.max_abs_rp4 - 1
    h6 = dioph.rp4_search(low, threads=config.threads)
    checks.append(Check(f"search({low}) empty", not h6, f"{len(h6)} hits"))
    h7 = dioph.rp4_search(config.max_abs_rp4, threads=config.threads)
    keys = {c.key() for c in h7}
    rows = [_rp4_row(r) for r in RP4_ROWS]
    found = sum(r in keys for r in rows)
    f7 = dioph.rp4_search(config.max_abs_rp4, threads=config.threads, flipped=True)
    fkeys = {c.key() for c in f7}
    checks.append(Check(f"search({config.max_abs_rp4}) contains the rows", found == len(rows),
                        f"{len(h7)} hits, {found}/3 rows; with the +9 identity: {len(f7)} "
                        f"hits, {sum(r in fkeys for r in rows)}/3 rows"))


@_timed(8, "Two-plane RP^4 ratio", None)
def criterion_8(config, checks):
    pairs = dioph.rp4_two_subspace_pairs(7)
    vals = {dioph.rp4_two_subspace_ratio(a, b) for a, b in pairs}
    checks.append(Check("ratio 3/10 on every valid pair in [-7, 7]",
                        bool(pairs) and vals == {Fraction(3, 10)},
                        f"{len(pairs)} pairs, values {sorted(map(str, vals))}"))


# ---------------------------------------------------------------------------
# 9 - 10


def _same_delta(p, q, size):
    a = variational_derivative(p, "k", size)
    b = variational_derivative(q, "k", size)
    return a == b, a, b


def _fmt(vec):
    return "(" + ", ".join(str(v) for v in vec) + ")"


@_timed(9, "Symbolic pseudo-differential operators", 10.0)
def criterion_9(config, checks):
    k0, k1, k2, k3 = (var("k", i) for i in range(4))
    d = DifferentialPolynomial.var
    R = psdo_root(agd_operator(4), 4, 3)
    expected = {1: k2 / 4,
                2: k1 / 4 - Fraction(3, 8) * d("k", 2, 1),
                3: k0 / 4 - Fraction(3, 8) * d("k", 1, 1) + Fraction(5, 16) * d("k", 2, 2)
                - Fraction(3, 32) * k2 * k2}
    for i, want in expected.items():
        got = R.coeff(-i)
        checks.append(Check(f"order 4: l{i}", got == want, str(got)))
    h = hamiltonian_density(4, 3)
    ok, a, _ = _same_delta(h, Fraction(3, 4) * (k0 - k2 * k2 / 8), 3)
    checks.append(Check("delta res L^(3/4)", ok, _fmt(a)))
    h = hamiltonian_density(5, 4)
    ok, a, _ = _same_delta(h, Fraction(4, 5) * (k0 - k2 * k3 / 5), 4)
    checks.append(Check("delta res L^(4/5)", ok, _fmt(a)))
    for N in range(3, 8):
        dk = variational_derivative(hamiltonian_density(N, 2), "k", N - 1)
        want = [ZERO] * (N - 1)
        want[N - 3] = DifferentialPolynomial.constant(Fraction(2, N))
        checks.append(Check(f"delta res L^(2/{N}) = (2/{N}) e_2", dk == want, _fmt(dk)))
    h = hamiltonian_density(5, 3)
    ok, a, b = _same_delta(h, Fraction(3, 5) * (Fraction(11, 5) * k3 * k3 + k1), 4)
    checks.append(Check("delta res L^(3/5) vs 3/5(11/5 k3^2 + k1)", ok,
                        f"computed {_fmt(a)}, expected {_fmt(b)}"))


@_timed(10, "Gauge and lifted realizations", None)
def criterion_10(config, checks):
    k2, k3 = var("k", 2), var("k", 3)
    for n in (3, 4):
        res = gauge_residual(n)
        bad = [(i, j, str(res.entry(i, j))) for i in range(n + 1) for j in range(n + 1)
               if not res.entry(i, j).is_zero()]
        checks.append(Check(f"gauge residual n={n} is zero", not bad,
                            f"nonzero entries {bad}" if bad else ""))
    h4 = hamiltonian_density(5, 3)
    dk = delta_kappa(4, h4)
    # compare up to the constant factor that makes the third entry -1
    c = dk[2].constant_term()
    dk_n = [p / (-c) for p in dk] if c and dk[2].is_constant() else dk
    want = [Fraction(-22, 5) * k3, ZERO, DifferentialPolynomial.constant(-1), ZERO]
    checks.append(Check("delta_kappa H (n=4), up to a constant factor", dk_n == want,
                        f"computed {_fmt(dk)}, rescaled {_fmt(dk_n)}"))
    f3 = lift_realization(3, hamiltonian_density(4, 3))
    ok3 = f3.coeffs[3] == -1 and f3.coeffs[2].is_zero() and f3.coeffs[1] == Fraction(-3, 4) * k2
    checks.append(Check("lift n=3: -G''' - 3/4 k2 G' - r0 G", ok3, str(f3)))
    f4 = lift_realization(4, h4)
    ok4 = (f4.coeffs[3] == -1 and f4.coeffs[1] == Fraction(-27, 5) * k3
           and f4.coeffs[2].is_zero() and f4.coeffs[4].is_zero())
    checks.append(Check("lift n=4: -G''' - 27/5 k3 G' - r0 G", ok4, str(f4)))


# ---------------------------------------------------------------------------
# 11


def _random_dp(rng, family_size=3, max_order=2, terms=3):
    p = ZERO
    for _ in range(terms):
        deg = rng.randint(0, 2)
        mono = DifferentialPolynomial.constant(Fraction(rng.randint(-5, 5), rng.randint(1, 4)))
        for _ in range(deg):
            mono = mono * var("k", rng.randrange(family_size), rng.randint(0, max_order))
        p = p + mono
    return p


def _random_op(rng):
    deg = rng.randint(0, 2)
    coeffs = {a: _random_dp(rng) for a in range(-2, deg + 1)}
    coeffs[deg] = coeffs[deg] + 1
    return PseudoDiffOp(coeffs, floor=-3)


def _random_polygon(m, N, rng):
    return LiftedPolygon(rng.standard_normal((N, m + 1)))


EQUIVARIANCE_SCHEMAS = [
    pentagram_schema(), syst2_schema(), segment_hyperplane_schema(3, (-2, 2)),
    segment_hyperplane_schema(4, (2, 3, 4)), rp3_ansatz_schema(-2, 3, -5),
    rp4_schema(*RP4_ROWS[0]), rp4_two_subspace_schema((1, 5, -6), (2, 3, -5)),
]


@_timed(11, "Property suites", None)
def criterion_11(config, checks):
    rng = random.Random(config.seed)
    tuples = []
    while len(tuples) < 200:
        s = rng.choice((3, 4, 5))
        t = tuple(rng.sample(range(-12, 13), s))
        tuples.append(t)
    sign_bad = [t for t in tuples if dioph.alternating_sign_form(t) != dioph.vandermonde_cramer(t)]
    checks.append(Check("Vandermonde closed form as stated ((-1)^s p)", not sign_bad,
                        f"{len(sign_bad)}/200 mismatches, all with s even: "
                        f"{all(len(t) % 2 == 0 for t in sign_bad)}"))
    closed_bad = [t for t in tuples
                  if dioph.symmetric_invariants(t).M != dioph.vandermonde_cramer(t)]
    checks.append(Check("Vandermonde closed form -p_{i-1}", not closed_bad,
                        f"{len(closed_bad)}/200 mismatches"))

    bad = 0
    for _ in range(50):
        P, Q = _random_op(rng), _random_op(rng)
        res = (P * Q - Q * P).residue()
        dvar = variational_derivative(res, "k", 3)
        if res.constant_term() != 0 or any(not c.is_zero() for c in dvar):
            bad += 1
    checks.append(Check("res [P, Q] is a total derivative", bad == 0, f"{bad}/50 failures"))

    nrng = np.random.default_rng(config.seed)
    worst = 0.0
    for S in EQUIVARIANCE_SCHEMAS:
        P = _random_polygon(S.dim, 2 * S.reach + S.dim + 8, nrng)
        g = random_sl(S.dim + 1, nrng)
        A = apply_schema(P.transformed(g), S, normalize=False)
        B = apply_schema(P, S, normalize=False).transformed(g)
        worst = max(worst, max(angular_distance(A.vertices[i], B.vertices[i])
                               for i in range(P.period)))
    checks.append(Check("projective equivariance of schema maps", worst < EQUIVARIANCE_TOL,
                        f"{len(EQUIVARIANCE_SCHEMAS)} schemas, max angular distance {worst:.1e}"))

    a = [c.key() for c in dioph.rp3_search(6, Fraction(1, 8), threads=1)]
    b = [c.key() for c in dioph.rp3_search(6, Fraction(1, 8), threads=max(2, config.threads))]
    c = [c.key() for c in dioph.rp4_search(5, threads=1, flipped=True)]
    d = [c.key() for c in dioph.rp4_search(5, threads=max(2, config.threads), flipped=True)]
    checks.append(Check("search determinism across thread counts", a == b and c == d,
                        f"rp3: {len(a)} vs {len(b)}, rp4: {len(c)} vs {len(d)}"))


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9, criterion_10, criterion_11]


def run_all(config=None, only=None):
    config = config or AcceptanceConfig()
    out = []
    for i, fn in enumerate(CRITERIA, 1):
        if only and i not in only:
            continue
        out.append(fn(config))
    return out


def measured_field(curve, x, field_, scale=1.0):
    """Predicted coefficients of a field at x (re-exported for reports)."""
    return evaluate_field(curve, x, field_, scale)


__all__ = ["AcceptanceConfig", "CriterionResult", "Check", "CRITERIA", "run_all",
           "THIRD_ORDER_LADDER"]
