"""Linear and projective geometry of lifted curves and twisted polygons.

Points of RP^m are represented by vectors of R^{m+1}. A curve is lifted to
its normalized representative Gamma with det(Gamma, Gamma', ..., Gamma^{(m)}) = 1;
polygons carry a monodromy so that V_{i+N} = M V_i.
"""

from dataclasses import dataclass, field, replace
from math import factorial

import numpy as np

from . import _series
from .curves import AffineCurve, FunctionCurve
from .errors import (DegenerateCurve, IllConditionedFrame, NonLiftable,
                     UnexpectedDimension)

# module-level thresholds; pass explicit values to override per call
COND_MAX = 1e8
SV_RTOL = 1e-9
WRONSKIAN_MIN = 1e-12


def sign_normalize(v):
    """Scale-free sign convention: first nonzero component positive."""
    v = np.asarray(v, dtype=float)
    nz = np.flatnonzero(np.abs(v) > 1e-14 * max(np.max(np.abs(v)), 1e-300))
    if nz.size and v[nz[0]] < 0:
        return -v
    return v


def angular_distance(u, w):
    """Angle between the lines spanned by u and w (in [0, pi/2])."""
    u = np.asarray(u, float) / np.linalg.norm(u)
    w = np.asarray(w, float) / np.linalg.norm(w)
    c = abs(float(u @ w))
    s = np.linalg.norm(w - (u @ w) * u)
    return float(np.arctan2(s, c))


# ---------------------------------------------------------------------------
# smooth curves


def _lift_taylor(coeffs, m, order):
    """Taylor coefficients of the normalized lift from those of gamma.

    ``coeffs`` has shape (order + m + 1, m); returns shape (order + 1, m + 1).
    """
    K = order + 1
    # series of gamma^{(i)}(x + t), i = 1..m, truncated to K terms
    cols = []
    for i in range(1, m + 1):
        p = np.arange(K)
        scale = np.array([factorial(int(q) + i) / factorial(int(q)) for q in p])
        cols.append(coeffs[i:i + K] * scale[:, None])
    wmat = np.stack(cols, axis=2)  # (K, m, m): [t, component, column]
    W = _series.det(wmat)
    if abs(W[0]) <= WRONSKIAN_MIN:
        raise DegenerateCurve(f"Wronskian det(gamma', ..., gamma^(m)) = {W[0]:.3e}")
    if W[0] < 0:
        if (m + 1) % 2 == 0:
            raise DegenerateCurve(
                "negative Wronskian has no real normalized lift in even dimension m+1")
        f = -_series.power(-W, -1.0 / (m + 1))
    else:
        f = _series.power(W, -1.0 / (m + 1))
    affine = np.zeros((K, m + 1))
    affine[0, 0] = 1.0
    affine[:, 1:] = coeffs[:K]
    return np.stack([_series.mul(f, affine[:, j]) for j in range(m + 1)], axis=1)


def lift_affine_curve(gamma, x, order=None):
    """Jet (Gamma(x), Gamma'(x), ..., Gamma^{(order)}(x)) of the normalized lift.

    Gamma = W^{-1/(m+1)} (1, gamma) with W = det(gamma', ..., gamma^{(m)}).
    Closed-form curves are differentiated exactly through Taylor-series
    arithmetic; plain callables go through :class:`FunctionCurve`.

    Returns an array of shape (order + 1, m + 1); row j is Gamma^{(j)}(x).
    """
    curve = gamma if isinstance(gamma, AffineCurve) else None
    if curve is None:
        probe = np.atleast_1d(np.asarray(gamma(x), dtype=float))
        curve = FunctionCurve(gamma, probe.size)
    m = curve.dim
    order = m if order is None else order
    coeffs = curve.taylor(x, order + m)
    return _series.derivatives(_lift_taylor(coeffs, m, order))


class SmoothLiftedCurve:
    """Normalized lift Gamma of an affine curve gamma: R -> R^m."""

    def __init__(self, gamma, name=None):
        if not isinstance(gamma, AffineCurve):
            probe = np.atleast_1d(np.asarray(gamma(0.0), dtype=float))
            gamma = FunctionCurve(gamma, probe.size)
        self.affine = gamma
        self.dim = gamma.dim
        self.name = name or getattr(gamma, "name", "curve")

    def taylor(self, x, order):
        """Rows Gamma^{(j)}(x) / j!, j = 0..order."""
        return _lift_taylor(self.affine.taylor(x, order + self.dim), self.dim, order)

    def jet(self, x, order=None):
        order = self.dim if order is None else order
        return _series.derivatives(self.taylor(x, order))

    def __call__(self, x):
        return self.taylor(x, 0)[0]

    def frame(self, x):
        """Matrix with columns Gamma, Gamma', ..., Gamma^{(m)} at x."""
        return self.jet(x, self.dim).T

    def transformed(self, g):
        """The curve g . gamma for g in SL(m+1), as a new lifted curve."""
        return _TransformedCurve(self, np.asarray(g, float))


class _TransformedCurve(SmoothLiftedCurve):
    def __init__(self, base, g):
        self.base = base
        self.g = g
        self.dim = base.dim
        self.name = f"{base.name}@g"

    def taylor(self, x, order):
        # g Gamma is again normalized since det g = 1
        return self.base.taylor(x, order) @ self.g.T


def wilczynski_invariants(curve, x, cond_max=None):
    """Invariants (k_0, ..., k_{m-1}) with Gamma^{(m+1)} + sum_i k_i Gamma^{(i)} = 0."""
    cond_max = COND_MAX if cond_max is None else cond_max
    m = curve.dim
    jet = curve.jet(x, m + 1)
    F = jet[:m + 1].T
    cond = np.linalg.cond(F)
    if not np.isfinite(cond) or cond > cond_max:
        raise IllConditionedFrame(f"frame condition number {cond:.3e} at x={x}")
    c = np.linalg.solve(F, -jet[m + 1])
    scale = max(1.0, float(np.max(np.abs(c))))
    if abs(c[m]) > 1e-6 * scale:
        raise IllConditionedFrame(
            f"Gamma^(m) component {c[m]:.3e} of Gamma^(m+1); lift is not normalized")
    return c[:m]


def wilczynski_series(curve, x, order):
    """Derivatives k_i^{(j)}(x), j = 0..order, as an array of shape (order + 1, m).

    Solves Frame(x+t) k(x+t) = -Gamma^{(m+1)}(x+t) as Taylor series in t.
    """
    m = curve.dim
    K = order + 1
    tay = curve.taylor(x, K + m + 1)
    # series of Gamma^{(i)}(x+t): coefficient p is tay[p+i] (p+i)!/p!
    def deriv_series(i):
        p = np.arange(K)
        s = np.array([factorial(int(q) + i) / factorial(int(q)) for q in p])
        return tay[i:i + K] * s[:, None]
    frame = np.stack([deriv_series(i) for i in range(m + 1)], axis=2)
    rhs = -deriv_series(m + 1)
    k = _series.solve(frame, rhs)
    return _series.derivatives(k)[:, :m]


# ---------------------------------------------------------------------------
# subspaces


def _orth_complement(vectors, rtol):
    A = np.atleast_2d(np.asarray(vectors, dtype=float))
    u, s, vt = np.linalg.svd(A, full_matrices=True)
    rank = int(np.sum(s > rtol * s[0])) if s.size and s[0] > 0 else 0
    return rank, vt[rank:]


def span_intersection(spans, rtol=None):
    """Unit vector spanning the common line of the given linear spans.

    Each span is a list of vectors in R^{m+1}. The intersection is the
    nullspace of the stacked orthogonal complements.
    """
    rtol = SV_RTOL if rtol is None else rtol
    spans = [np.atleast_2d(np.asarray(s, dtype=float)) for s in spans]
    n = spans[0].shape[1]
    normals = []
    for j, s in enumerate(spans):
        rank, comp = _orth_complement(s, rtol)
        if rank != s.shape[0]:
            raise UnexpectedDimension(
                f"span {j} has dimension {rank}, expected {s.shape[0]}")
        normals.append(comp)
    N = np.vstack(normals) if normals else np.zeros((0, n))
    if N.shape[0] == 0:
        raise UnexpectedDimension(f"intersection has dimension {n}, expected 1")
    u, s, vt = np.linalg.svd(N, full_matrices=True)
    sv = np.zeros(n)
    sv[:s.size] = s
    null = int(np.sum(sv <= rtol * max(sv[0], 1e-300)))
    if null != 1:
        raise UnexpectedDimension(f"intersection has dimension {null}, expected 1")
    v = vt[-1]
    return sign_normalize(v / np.linalg.norm(v))


# ---------------------------------------------------------------------------
# polygons


@dataclass(frozen=True)
class LiftedPolygon:
    """One period of a twisted polygon in RP^m, lifted to R^{m+1}.

    ``vertices`` has shape (N, m+1); ``monodromy`` is rescaled to det 1 on
    construction. ``vertex(i)`` extends the sequence by V_{i+N} = M V_i.
    """

    vertices: np.ndarray
    monodromy: np.ndarray = None
    normalized: bool = False
    nonliftable: bool = False
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        V = np.array(self.vertices, dtype=float)
        if V.ndim != 2:
            raise ValueError("vertices must be an (N, m+1) array")
        n, d = V.shape
        if d < 3:
            raise ValueError("polygons live in RP^m with m >= 2")
        if n < d + 1:
            raise ValueError(f"period {n} too small for RP^{d - 1} (need >= {d + 1})")
        M = np.eye(d) if self.monodromy is None else np.array(self.monodromy, float)
        det = np.linalg.det(M)
        if abs(det) < 1e-300:
            raise ValueError("monodromy is singular")
        if det < 0 and d % 2 == 0:
            raise ValueError("monodromy with negative determinant in even dimension")
        M = M / np.sign(det) / abs(det) ** (1.0 / d)
        V.setflags(write=False)
        M.setflags(write=False)
        object.__setattr__(self, "vertices", V)
        object.__setattr__(self, "monodromy", M)

    @property
    def dim(self):
        return self.vertices.shape[1] - 1

    @property
    def period(self):
        return self.vertices.shape[0]

    def vertex(self, i):
        q, r = divmod(i, self.period)
        v = self.vertices[r]
        if q == 0:
            return v
        M = self.monodromy if q > 0 else np.linalg.inv(self.monodromy)
        return np.linalg.matrix_power(M, abs(q)) @ v

    def consecutive_dets(self):
        m = self.dim
        return np.array([np.linalg.det(np.column_stack([self.vertex(i + j)
                                                         for j in range(m + 1)]))
                         for i in range(self.period)])

    def transformed(self, g):
        g = np.asarray(g, float)
        return replace(self, vertices=self.vertices @ g.T,
                       monodromy=g @ self.monodromy @ np.linalg.inv(g))

    def shifted(self, s):
        return replace(self, vertices=np.array([self.vertex(i + s)
                                                for i in range(self.period)]))

    @classmethod
    def from_affine(cls, points, monodromy=None):
        P = np.asarray(points, dtype=float)
        return cls(np.column_stack([np.ones(len(P)), P]), monodromy)


def discrete_normalize(P, tol=1e-12):
    """Rescale vertices by positive scalars so every det(V_i, ..., V_{i+m}) = 1.

    Writing V_i -> lambda_i V_i with lambda periodic, the conditions are the
    circulant system sum_{j=0}^{m} log lambda_{i+j} = -log D_i. When N and m+1
    share a factor the system is singular and solvable only if the
    determinants satisfy a multiplicative consistency condition.
    """
    m, N = P.dim, P.period
    D = P.consecutive_dets()
    flip = 1.0
    if np.all(D < 0) and (m + 1) % 2 == 1:
        flip = -1.0
        D = -D
    if np.any(D <= 0):
        raise NonLiftable(
            f"consecutive determinants change sign: {np.sign(D).astype(int).tolist()}",
            product=float(np.prod(np.sign(D))))
    A = np.zeros((N, N))
    for i in range(N):
        for j in range(m + 1):
            A[i, (i + j) % N] = 1.0
    rhs = -np.log(D)
    mu, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    resid = A @ mu - rhs
    if np.max(np.abs(resid)) > 1e-9:
        product = float(np.exp(np.max(np.abs(resid))))
        raise NonLiftable(
            f"no periodic rescaling normalizes all determinants "
            f"(gcd(N, m+1) > 1 and consistency product {product:.6g} != 1)",
            product=product)
    lam = np.exp(mu) * flip
    out = replace(P, vertices=P.vertices * lam[:, None], normalized=True,
                  nonliftable=False)
    D_new = out.consecutive_dets()
    if np.max(np.abs(D_new - 1.0)) > max(tol, 1e-9):
        raise NonLiftable(f"normalization residual {np.max(np.abs(D_new - 1)):.3e}")
    return out


@dataclass(frozen=True)
class ProjectiveEquivalence:
    transform: np.ndarray
    residual: float


def projective_equivalence(P, Q, tol=1e-9, periods=2):
    """Find g in SL(m+1) with g V_i ~ W_i as projective points, or None.

    Linear least squares on (I - w w^T) g v = 0 over the vertices of
    ``periods`` consecutive periods (which also ties the monodromies).
    """
    if P.dim != Q.dim or P.period != Q.period:
        raise ValueError("polygons must share dimension and period")
    n = P.dim + 1
    rows = []
    for i in range(periods * P.period):
        v = P.vertex(i)
        w = Q.vertex(i)
        v = v / np.linalg.norm(v)
        w = w / np.linalg.norm(w)
        proj = np.eye(n) - np.outer(w, w)
        # vec(g) in row-major order: (g v)_a = sum_b g_ab v_b
        rows.append(np.kron(proj, v[None, :]))
    A = np.vstack(rows)
    _, s, vt = np.linalg.svd(A)
    g = vt[-1].reshape(n, n)
    det = np.linalg.det(g)
    if abs(det) < 1e-14:
        return None
    if det < 0 and n % 2 == 1:
        g = -g
        det = -det
    g = g / abs(det) ** (1.0 / n)
    resid = max(angular_distance(g @ P.vertex(i), Q.vertex(i))
                for i in range(periods * P.period))
    if resid < tol:
        return ProjectiveEquivalence(g, resid)
    return None


def random_sl(n, rng, spread=0.5):
    """Random element of SL(n) near the identity (positive determinant)."""
    g = np.eye(n) + spread * rng.standard_normal((n, n))
    d = np.linalg.det(g)
    while abs(d) < 0.1:
        g = np.eye(n) + spread * rng.standard_normal((n, n))
        d = np.linalg.det(g)
    if d < 0:
        g[:, 0] = -g[:, 0]
        d = -d
    return g / d ** (1.0 / n)
