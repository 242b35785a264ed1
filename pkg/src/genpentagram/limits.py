"""Continuous limits of schema maps on smooth lifted curves.

For a curve Gamma and a schema S, the points x_{n+o} = Gamma(x + o eps) span
the subspaces whose common line is the image point. Its normalized lift
Gamma_eps, decomposed in the frame (Gamma, ..., Gamma^{(m)}) at x, is expanded
in eps and compared with lifted Hamiltonian flows.

Numerics. Everything is done in frame coordinates at x, with component j
scaled by eps^{-j}. In these coordinates Gamma(x + s eps) is the moment vector
(s^j / j!) plus O(eps), so the intersection stays well conditioned however
small eps is. The image line is computed as a Taylor series in the shift
tau = t / eps, which gives the x-derivatives needed for the normalization
det(Gamma_eps, ..., Gamma_eps^{(m)}) = 1 without finite differences. The
scaling cancels in that determinant because det(frame) = 1.
"""

from dataclasses import asdict, dataclass, field
from math import comb, factorial

import numpy as np

from . import _series
from .errors import ChartFailure, IllConditionedFrame, NoCleanOrder, UnexpectedDimension
from .projective import COND_MAX, SV_RTOL, wilczynski_series

DEFAULT_LADDER = (1e-2, 5e-3, 2.5e-3, 1.25e-3)
THIRD_ORDER_LADDER = (4e-2, 2e-2, 1e-2, 5e-3)
TAYLOR_ORDER = 48
R2_MIN = 0.999


# ---------------------------------------------------------------------------
# frame data


def _frame_expansion(curve, x, order=TAYLOR_ORDER):
    """Rows E_p = F^{-1} Gamma^{(p)}(x) / p!, the Taylor coefficients in frame coordinates."""
    m = curve.dim
    F = curve.frame(x)
    cond = np.linalg.cond(F)
    if not np.isfinite(cond) or cond > COND_MAX:
        raise IllConditionedFrame(f"frame condition number {cond:.3e} at x={x}")
    T = curve.taylor(x, order)
    E = np.linalg.solve(F, T.T).T
    E[:m + 1] = np.diag([1.0 / factorial(p) for p in range(m + 1)])
    return F, E


def frame_decompose(v, curve, x):
    """Coefficients c with v = sum_i c_i Gamma^{(i)}(x)."""
    F = curve.frame(x)
    cond = np.linalg.cond(F)
    if not np.isfinite(cond) or cond > COND_MAX:
        raise IllConditionedFrame(f"frame condition number {cond:.3e} at x={x}")
    v = np.asarray(v, dtype=float)
    c = np.linalg.solve(F, v)
    if np.linalg.norm(F @ c - v) > 1e-10 * max(np.linalg.norm(v), 1e-300):
        raise IllConditionedFrame("frame decomposition residual too large")
    return c


def _scaled_point_series(E, eps, offset, nterms):
    """Series in tau of D_eps F^{-1} Gamma(x + (offset + tau) eps), shape (nterms, m+1)."""
    P, d = E.shape
    out = np.zeros((nterms, d))
    p = np.arange(P)
    for q in range(nterms):
        binom = np.array([comb(int(pp), q) if pp >= q else 0 for pp in p], dtype=float)
        opow = np.array([float(offset) ** (pp - q) if pp >= q else 0.0 for pp in p])
        w = binom * opow
        for j in range(d):
            # eps^{p-j} vanishes identically below p = j in frame coordinates
            rng = p >= j
            out[q, j] = np.sum(w[rng] * E[rng, j] * eps ** (p[rng] - j))
    return out


def _intersection_series(E, eps, schema, nterms):
    """Series of a representative of the image line, in scaled frame coordinates."""
    d = E.shape[1]
    blocks = [[_scaled_point_series(E, eps, o, nterms) for o in offs]
              for offs in schema.subspaces]
    sizes = [len(b) for b in blocks]
    ncols = sum(sizes)
    nrows = (len(blocks) - 1) * d
    A = np.zeros((nterms, nrows + 1, ncols))
    starts = np.cumsum([0] + sizes)
    for b in range(1, len(blocks)):
        r0 = (b - 1) * d
        for a, vec in enumerate(blocks[0]):
            A[:, r0:r0 + d, a] = vec
        for a, vec in enumerate(blocks[b]):
            A[:, r0:r0 + d, starts[b] + a] = -vec
    _, s, vt = np.linalg.svd(A[0, :nrows])
    sv = np.zeros(ncols)
    sv[:s.size] = s
    null = int(np.sum(sv <= SV_RTOL * sv[0]))
    if null != 1:
        raise UnexpectedDimension(f"image line has dimension {null} at eps={eps:g}")
    phi = vt[-1]
    A[0, nrows] = phi
    rhs = np.zeros((nterms, nrows + 1))
    rhs[0, nrows] = 1.0
    z = _series.solve(A, rhs)
    U0 = np.stack(blocks[0], axis=2)  # (nterms, d, s0)
    return _series.matvec(U0, z[:, :sizes[0]])


def gamma_epsilon_coords(curve, schema, x, eps, expansion=None):
    """Frame coordinates of the normalized lift Gamma_eps at x."""
    m = curve.dim
    if schema.dim != m:
        raise ValueError("schema and curve dimensions differ")
    if expansion is None:
        expansion = _frame_expansion(curve, x)
    _, E = expansion
    if (schema.reach + m) * eps > 0.6:
        raise ChartFailure(f"eps={eps:g} too large for the local expansion")
    w = _intersection_series(E, eps, schema, m + 1)
    if w[0, 0] < 0:
        w = -w
    wronski = np.array([w[q] * factorial(q) for q in range(m + 1)])
    delta = np.linalg.det(wronski)
    if delta <= 0:
        raise ChartFailure(f"image curve has no positively oriented normalized lift "
                           f"(det = {delta:.3e})")
    lam = delta ** (-1.0 / (m + 1))
    return lam * w[0] * eps ** np.arange(m + 1)


def gamma_epsilon(curve, schema, x, eps):
    """The normalized lift Gamma_eps(x) of the image curve, as a vector of R^{m+1}."""
    F, E = _frame_expansion(curve, x)
    return F @ gamma_epsilon_coords(curve, schema, x, eps, (F, E))


# ---------------------------------------------------------------------------
# oracles and predictions


def _k_jets(curve, x, order):
    ks = wilczynski_series(curve, x, order)
    return [ks[:, i] for i in range(curve.dim)]


def r0_oracle(curve, x, field, scale=1.0):
    """Gamma-coefficient forced by the normalization under Gamma_t = sum c_i Gamma^{(i)}.

    d/dt det(Gamma, ..., Gamma^{(m)}) is the sum of the m+1 determinants with
    column j replaced by d^j/dx^j Gamma_t. It is affine in c_0 with slope m+1
    (the frame determinant is 1); both values are computed and the zero solved.
    ``field`` holds the explicit coefficients c_1..c_m as DifferentialPolynomials
    in k (``scale`` multiplies them).
    """
    m = curve.dim
    jet = curve.jet(x, 2 * m + 1)
    F = jet[:m + 1].T
    cond = np.linalg.cond(F)
    if not np.isfinite(cond) or cond > COND_MAX:
        raise IllConditionedFrame(f"frame condition number {cond:.3e} at x={x}")
    kj = _k_jets(curve, x, m + 1)
    jets = {("k", i): kj[i] for i in range(m)}
    # derivatives c_i^{(r)}, r = 0..m
    cder = {}
    for i in range(1, m + 1):
        c = field.coeffs[i]
        for r in range(m + 1):
            cder[i, r] = scale * c.evaluate(jets) if not c.is_zero() else 0.0
            c = c.total_derivative()

    def total(c0):
        s = 0.0
        for j in range(m + 1):
            u = c0 * jet[j]
            for i in range(1, m + 1):
                for l in range(j + 1):
                    u = u + comb(j, l) * cder[i, j - l] * jet[i + l]
            G = F.copy()
            G[:, j] = u
            s += np.linalg.det(G)
        return s

    s0 = total(0.0)
    slope = total(1.0) - s0
    return -s0 / slope


def evaluate_field(curve, x, field, scale=1.0):
    """Numeric c_1..c_m of a LiftVectorField at x; c_0 from :func:`r0_oracle`."""
    m = curve.dim
    kj = _k_jets(curve, x, 1)
    jets = {("k", i): kj[i] for i in range(m)}
    vals = [r0_oracle(curve, x, field, scale)]
    vals += [scale * field.coeffs[i].evaluate(jets) for i in range(1, m + 1)]
    return np.array(vals)


# ---------------------------------------------------------------------------
# fitting


def _neville(xs, ys, x0=0.0):
    p = list(ys)
    n = len(xs)
    for k in range(1, n):
        for i in range(n - k):
            p[i] = ((x0 - xs[i + k]) * p[i] + (xs[i] - x0) * p[i + 1]) / (xs[i] - xs[i + k])
    return p[0]


def fit_order(epsilons, values):
    """Slope and R^2 of log|values| against log eps."""
    le = np.log(np.asarray(epsilons, float))
    lv = np.log(np.abs(np.asarray(values, float)))
    slope, intercept = np.polyfit(le, lv, 1)
    pred = slope * le + intercept
    ss_res = float(np.sum((lv - pred) ** 2))
    ss_tot = float(np.sum((lv - lv.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), r2


@dataclass
class LimitReport:
    """Measured eps-expansion of Gamma_eps - Gamma in the frame at x.

    ``frame_coeffs[e][i]`` is the Gamma^{(i)} coefficient at ``epsilons[e]``;
    ``series_coeffs[q-1][i]`` the fitted coefficient of eps^q;
    ``extrapolated_coeffs`` the Richardson limit of frame_coeffs / eps^order.
    """

    schema: str
    curve: str
    x: float
    epsilons: list
    fitted_order: float
    r_squared: float
    order: int
    dominant: int
    frame_coeffs: list
    series_coeffs: list
    extrapolated_coeffs: list
    invariants: list
    predicted_coeffs: list = None
    literature_coeffs: list = None
    discrepancy: float = None
    r0_oracle: float = None
    r0_deviation: float = None
    notes: list = field(default_factory=list)

    def to_json(self):
        return asdict(self)

    def csv_rows(self):
        m1 = len(self.extrapolated_coeffs)
        head = ["row", "eps"] + [f"c{i}" for i in range(m1)]
        rows = [head]
        for e, c in zip(self.epsilons, self.frame_coeffs):
            rows.append(["eps", repr(e)] + [repr(v) for v in c])
        rows.append(["extrapolated", ""] + [repr(v) for v in self.extrapolated_coeffs])
        if self.predicted_coeffs is not None:
            rows.append(["predicted", ""] + [repr(v) for v in self.predicted_coeffs])
        if self.literature_coeffs is not None:
            rows.append(["literature", ""] + [repr(v) for v in self.literature_coeffs])
        return rows


def measure(curve, schema, x, epsilons):
    """Frame coefficients of Gamma_eps - Gamma for each eps, shape (len(eps), m+1)."""
    expansion = _frame_expansion(curve, x)
    out = []
    for eps in epsilons:
        c = gamma_epsilon_coords(curve, schema, x, eps, expansion)
        c[0] -= 1.0
        out.append(c)
    return np.array(out)


def fit_limit(curve, schema, x, epsilons=None, field=None, literature=None, order=None,
              min_r2=R2_MIN):
    """Fit the leading order and coefficients of Gamma_eps - Gamma.

    Parameters
    ----------
    field : LiftVectorField, optional
        Predicted flow; it is scaled to the measured top coefficient and its
        Gamma-coefficient taken from :func:`r0_oracle`.
    literature : callable, optional
        ``literature(k, extrapolated)`` returning a literature prediction of the
        coefficients (None where it makes no statement), recorded next to the
        oracle for comparison.
    order : int, optional
        Force the integer order used for extrapolation.
    """
    eps = sorted((float(e) for e in (epsilons or DEFAULT_LADDER)), reverse=True)
    if len(eps) < 4:
        raise ValueError("need at least 4 epsilons")
    m = curve.dim
    C = measure(curve, schema, x, eps)
    dom = int(np.argmax(np.abs(C[-1])))
    slope, r2 = fit_order(eps, C[:, dom])
    if r2 < min_r2:
        raise NoCleanOrder(f"log-log fit of coefficient {dom} has R^2 = {r2:.5f}")
    p = int(round(slope)) if order is None else int(order)
    # exact polynomial fit c(eps) = sum_{q=1}^{n} a_q eps^q
    V = np.array([[e ** q for q in range(1, len(eps) + 1)] for e in eps])
    series = np.linalg.solve(V, C).tolist()
    extrap = [_neville(eps, C[:, i] / np.power(eps, p)) for i in range(m + 1)]
    k = wilczynski_series(curve, x, 0)[0]
    report = LimitReport(schema.name, getattr(curve, "name", "curve"), float(x), eps,
                         slope, r2, p, dom, C.tolist(), series, list(map(float, extrap)),
                         k.tolist())
    if field is not None:
        top = max(i for i in range(1, m + 1) if not field.coeffs[i].is_zero())
        kj = _k_jets(curve, x, 0)
        jets = {("k", i): kj[i] for i in range(m)}
        scale = extrap[top] / field.coeffs[top].evaluate(jets)
        pred = evaluate_field(curve, x, field, scale)
        report.predicted_coeffs = pred.tolist()
        ref = max(abs(v) for v in extrap)
        report.discrepancy = float(np.max(np.abs(np.array(extrap) - pred)) / ref)
        report.r0_oracle = float(pred[0])
        report.r0_deviation = float(abs(extrap[0] - pred[0]) / max(abs(pred[0]), 1e-12))
    if literature is not None:
        report.literature_coeffs = [None if v is None else float(v) for v in literature(k, extrap)]
    return report


# ---------------------------------------------------------------------------
# named configurations


FLAVORS = ("seg-hyper", "syst2", "rp3-ansatz", "lemma-square", "rp4", "two-subspace")


def _field(dim, coeffs, label):
    from fractions import Fraction

    from .diffpoly import ZERO, DifferentialPolynomial
    from .gauge import LiftVectorField
    cs = [ZERO] * (dim + 1)
    for i, c in coeffs.items():
        cs[i] = c if isinstance(c, DifferentialPolynomial) else DifferentialPolynomial.constant(c)
    return LiftVectorField(dim, cs, True, Fraction(1), {"label": label})


def _agd_field(m, r):
    from .gauge import lift_realization
    from .psdo import hamiltonian_density
    f = lift_realization(m, hamiltonian_density(m + 1, r), source="derived")
    f.meta["label"] = f"AGD res L^({r}/{m + 1})"
    return f


def limit_flavor(flavor, m=None, offsets=None, params=None):
    """Schema, predicted field, literature prediction and default ladder of a flavor.

    Returns
    -------
    (IndexSchema, LiftVectorField, callable, tuple)
        The callable maps (k, extrapolated) to literature coefficients.
    """
    from fractions import Fraction

    from .diffpoly import var
    from .maps import (rp3_ansatz_schema, rp3_three_plane_schema, rp4_schema,
                       rp4_two_subspace_schema, segment_hyperplane_schema, syst2_schema)
    if flavor == "seg-hyper":
        m = 3 if m is None else m
        offsets = offsets or ((-2, 2) if m == 3 else tuple(range(2, m + 1)))
        reach = (params or {}).get("reach", 1)
        S = segment_hyperplane_schema(m, offsets, reach)

        def literature(k, e):
            return [-k[m - 1] / (m + 1), 0.0, 0.5] + [0.0] * (m - 2)
        return S, _agd_field(m, 2), literature, DEFAULT_LADDER
    if flavor == "syst2":
        def literature(k, e):
            return [-2.0 / 3.0 * k[0], 0.0, 1.0]
        return syst2_schema(), _agd_field(2, 2), literature, DEFAULT_LADDER
    if flavor == "rp3-ansatz":
        a, b, c = offsets or (-2, 3, -5)
        def literature(k, e):
            return [None, 0.75 * k[2] * e[3], 0.0, e[3]]
        return rp3_ansatz_schema(a, b, c), _agd_field(3, 3), literature, THIRD_ORDER_LADDER
    if flavor == "lemma-square":
        trip = offsets or ((-1, -2, 3), (-1, 2, -3), (1, -2, -3))
        f = _field(3, {3: 1, 1: Fraction(7, 10) * var("k", 2)}, "G''' + 7/10 k2 G'")
        def literature(k, e):
            return [None, 0.7 * k[2] * e[3], 0.0, e[3]]
        return rp3_three_plane_schema(*trip), f, literature, THIRD_ORDER_LADDER
    if flavor == "rp4":
        trip = offsets or ((7, -1, -7), (3, -1, -3), (6, -3, -4))
        def literature(k, e):
            return [None, 27.0 / 5.0 * k[3] * e[3], 0.0, e[3], 0.0]
        return rp4_schema(*trip), _agd_field(4, 3), literature, THIRD_ORDER_LADDER
    if flavor == "two-subspace":
        pair = offsets or ((1, 5, -6), (2, 3, -5))
        f = _field(4, {3: 1, 1: Fraction(3, 10) * var("k", 3)}, "G''' + 3/10 k3 G'")
        def literature(k, e):
            return [None, 0.3 * k[3] * e[3], 0.0, e[3], 0.0]
        return rp4_two_subspace_schema(*pair), f, literature, THIRD_ORDER_LADDER
    raise ValueError(f"unknown flavor {flavor!r}; choose from {', '.join(FLAVORS)}")
