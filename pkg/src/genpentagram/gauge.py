"""Symbolic frames for lifted projective curves.

Matrices here have entries that are exact differential operators (finite sums
p_j D^j with differential-polynomial coefficients), represented as
:class:`~genpentagram.psdo.PseudoDiffOp` with no floor. Plain matrices of
functions are the special case where every entry has order 0.

Vector conventions: a "natural" vector over the invariants is indexed by i,
component i belonging to k_i (or κ_i). The "frame" ordering used by K, the
gauge and the lifted flows runs from the top index down: component j
(1-based) belongs to k_{n-j}.
"""

from dataclasses import dataclass, field
from fractions import Fraction

from .diffpoly import ONE, ZERO, DifferentialPolynomial, _coerce, pretty, var, variational_derivative
from .errors import UnsupportedDimension
from .psdo import PseudoDiffOp, psdo_mul
from .psdo import pretty as pretty_op

SUPPORTED = (3, 4)


def _check(n):
    if n not in SUPPORTED:
        raise UnsupportedDimension(f"explicit gauge data exists only for n in {SUPPORTED}, got {n}")


class SymbolicMatrix:
    """Rectangular matrix of exact differential operators."""

    def __init__(self, rows):
        self.rows = [[e if isinstance(e, PseudoDiffOp) else PseudoDiffOp.scalar(e)
                      for e in row] for row in rows]
        widths = {len(r) for r in self.rows}
        if len(widths) > 1:
            raise ValueError("ragged matrix")

    @property
    def shape(self):
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def entry(self, i, j):
        """Order-0 entry as a DifferentialPolynomial (raises for operators)."""
        op = self.rows[i][j]
        if any(a != 0 for a in op.coeffs):
            raise ValueError(f"entry ({i},{j}) is a differential operator")
        return op.coeffs.get(0, ZERO)

    def __matmul__(self, other):
        n, k = self.shape
        k2, m = other.shape
        if k != k2:
            raise ValueError("shape mismatch")
        out = []
        for i in range(n):
            row = []
            for j in range(m):
                acc = PseudoDiffOp()
                for l in range(k):
                    acc = acc + psdo_mul(self.rows[i][l], other.rows[l][j])
                row.append(acc)
            out.append(row)
        return SymbolicMatrix(out)

    def __add__(self, other):
        return SymbolicMatrix([[a + b for a, b in zip(r1, r2)]
                               for r1, r2 in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return SymbolicMatrix([[a - b for a, b in zip(r1, r2)]
                               for r1, r2 in zip(self.rows, other.rows)])

    def apply(self, vec):
        """Apply to a column of DifferentialPolynomials."""
        return [sum((op.apply(v) for op, v in zip(row, vec)), ZERO) for row in self.rows]

    def derivative(self):
        """Entrywise x-derivative (entries must be functions)."""
        return SymbolicMatrix([[PseudoDiffOp.scalar(self.entry(i, j).total_derivative())
                                for j in range(self.shape[1])] for i in range(self.shape[0])])

    def map_entries(self, fn):
        return SymbolicMatrix([[op.map_coeffs(fn) for op in row] for row in self.rows])

    def substitute(self, mapping):
        return self.map_entries(lambda p: p.substitute(mapping))

    def adjoint(self):
        """Formal adjoint: transpose with each entry replaced by its adjoint."""
        n, m = self.shape
        return SymbolicMatrix([[self.rows[i][j].adjoint() for i in range(n)]
                               for j in range(m)])

    def trace(self):
        return sum((self.entry(i, i) for i in range(min(self.shape))), ZERO)

    def is_zero(self):
        return all(not op.coeffs for row in self.rows for op in row)

    def __eq__(self, other):
        return isinstance(other, SymbolicMatrix) and self.rows == other.rows

    def to_json(self):
        return {"rows": [[{str(a): op.coeffs[a].to_json() for a in sorted(op.coeffs)}
                          for op in row] for row in self.rows]}

    def pretty(self):
        cells = [[pretty_op(op) if op.coeffs else "0" for op in row] for row in self.rows]
        width = max(len(c) for row in cells for c in row)
        return "\n".join("[ " + "  ".join(c.rjust(width) for c in row) + " ]" for row in cells)

    def __str__(self):
        return self.pretty()


def _k(i, order=0):
    return var("k", i, order)


def _kap(i, order=0):
    return var("κ", i, order)


def khat(n):
    """Companion matrix with subdiagonal ones and last column (-k_0, ..., -k_{n-1}, 0)."""
    if n < 2:
        raise ValueError("n must be >= 2")
    rows = [[ZERO] * (n + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        rows[i][i - 1] = ONE
    for i in range(n):
        rows[i][n] = -_k(i)
    return SymbolicMatrix(rows)


def kappa_matrix(n):
    """The matrix K with first row (0, κ_{n-1}, ..., κ_0) and subdiagonal ones."""
    rows = [[ZERO] * (n + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        rows[i][i - 1] = ONE
    for j in range(1, n + 1):
        rows[0][j] = _kap(n - j)
    return SymbolicMatrix(rows)


def gauge_matrix(n, source="literature"):
    """Upper unitriangular gauge g with entries in the Wilczynski invariants.

    ``source="literature"`` returns the stated matrices for n = 3, 4;
    ``source="derived"`` solves the gauge equation (any n >= 2).
    """
    if source == "derived":
        return solve_gauge(n)[0]
    _check(n)
    if n == 3:
        k2, k1 = _k(2), _k(1)
        rows = [[ONE, ZERO, k2, k1 - _k(2, 1)],
                [ZERO, ONE, ZERO, k2],
                [ZERO, ZERO, ONE, ZERO],
                [ZERO, ZERO, ZERO, ONE]]
    else:
        k3, k2, k1 = _k(3), _k(2), _k(1)
        rows = [[ONE, ZERO, k3, k2 - 2 * _k(3, 1), k1 - _k(2, 1) - _k(3, 2)],
                [ZERO, ONE, ZERO, k3, k2 - _k(3, 1)],
                [ZERO, ZERO, ONE, ZERO, k3],
                [ZERO, ZERO, ZERO, ONE, ZERO],
                [ZERO, ZERO, ZERO, ZERO, ONE]]
    return SymbolicMatrix(rows)


def kappa_dictionary(n, source="literature"):
    """Map ('k', i) -> expression of k_i in the κ invariants."""
    if source == "derived":
        return solve_gauge(n)[1]
    _check(n)
    if n == 3:
        return {("k", 2): -_kap(2),
                ("k", 1): -_kap(1) - _kap(2, 1),
                ("k", 0): -_kap(0) - _kap(1, 1)}
    return {("k", 3): -_kap(3),
            ("k", 2): -_kap(2) - 3 * _kap(3, 1),
            ("k", 1): -_kap(1) - 2 * _kap(2, 1) - 3 * _kap(3, 2),
            ("k", 0): -_kap(0) - _kap(1, 1) - _kap(2, 2) - _kap(3, 3) - _kap(3) * _kap(3, 1)}


def solve_gauge(n):
    """Solve g_x + K̂ g = g K for upper unitriangular g and the invariants κ.

    Writing out the entries, rows i >= 1 of g follow from row i-1 through
    g_{i,j+1} = g_{ij}' + g_{i-1,j}, the last column forces
    g_{in}' + g_{i-1,n} = k_i, and row 0 then yields
    κ_{n-j} = g_{0j}' - g_{0,j+1}, κ_0 = g_{0n}' - k_0. The row-0 entries are
    fixed one superdiagonal at a time, so the solve is exact and unique.

    Returns ``(g, dictionary)`` with the dictionary in the same form as
    :func:`kappa_dictionary`.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    row0 = [ONE] + [ZERO] * n

    def fill(row0):
        g = [[ZERO] * (n + 1) for _ in range(n + 1)]
        g[0] = list(row0)
        for i in range(1, n + 1):
            g[i][i] = ONE
            for j in range(i, n):
                g[i][j + 1] = g[i][j].total_derivative() + g[i - 1][j]
        return g

    for j in range(2, n + 1):
        i = n - j + 1
        g = fill(row0)
        excess = g[i][n].total_derivative() + g[i - 1][n] - _k(i)
        row0[j] = -excess
    g = fill(row0)
    kappa = {}
    for j in range(1, n):
        kappa[n - j] = g[0][j].total_derivative() - g[0][j + 1]
    kappa[0] = g[0][n].total_derivative() - _k(0)
    # invert: κ_i = -k_i + (terms in k_j, j > i)
    dictionary = {}
    for i in range(n - 1, -1, -1):
        rest = kappa[i] + _k(i)
        dictionary[("k", i)] = -_kap(i) + rest.substitute(dictionary)
    return SymbolicMatrix(g), dictionary


def inverse_dictionary(n, source="literature"):
    """Map ('κ', i) -> expression of κ_i in k, by triangular back-substitution.

    Each k_i equals -κ_i plus terms in κ_j with j > i, so solving from the top
    index down is exact.
    """
    fwd = kappa_dictionary(n, source)
    inv = {}
    for i in range(n - 1, -1, -1):
        rest = fwd[("k", i)] + _kap(i)  # the part not involving κ_i
        inv[("κ", i)] = -_k(i) + rest.substitute(inv)
    return inv


def gauge_residual(n, dictionary=None, source="literature"):
    """g_x + K̂ g - g K with k expressed through κ; identically zero when consistent."""
    if source == "literature":
        _check(n)
    d = kappa_dictionary(n, source) if dictionary is None else dictionary
    g = gauge_matrix(n, source).substitute(d)
    kh = khat(n).substitute(d)
    return g.derivative() + kh @ g - g @ kappa_matrix(n)


def frechet_matrix(n, source="literature"):
    """Fréchet derivative δk/δκ of the dictionary, rows k_{n-1}..k_0, columns κ_{n-1}..κ_0.

    Entry (i, l) is the operator sum_j (∂k/∂κ^{(j)}) D^j; it is lower
    triangular with -1 on the diagonal.
    """
    d = kappa_dictionary(n, source)
    rows = []
    for a in range(n):
        expr = d[("k", n - 1 - a)]
        row = []
        for b in range(n):
            idx = n - 1 - b
            coeffs = {}
            for fam, i, order in expr.variables():
                if fam == "κ" and i == idx:
                    coeffs[order] = coeffs.get(order, ZERO) + expr.partial((fam, i, order))
            row.append(PseudoDiffOp(coeffs))
        rows.append(row)
    return SymbolicMatrix(rows)


def change_of_variables_adjoint(n, source="literature"):
    """(δk/δκ)^*, mapping δ_k H to δ_κ H in the frame ordering.

    As the adjoint of a lower-triangular operator matrix it is upper
    triangular, with -1 on the diagonal.
    """
    if source == "literature":
        _check(n)
    return frechet_matrix(n, source).adjoint()


def to_frame_order(vec):
    """Natural order (index 0 first) to frame order (top index first)."""
    return list(reversed(vec))


def from_frame_order(vec):
    return list(reversed(vec))


def delta_kappa(n, density, source="literature"):
    """δ_κ H in the frame ordering, expressed in the Wilczynski invariants k."""
    if source == "literature":
        _check(n)
    d = kappa_dictionary(n, source)
    dk = to_frame_order(variational_derivative(density, "k", n))
    dk_kappa = [p.substitute(d) for p in dk]
    out = change_of_variables_adjoint(n, source).apply(dk_kappa)
    inv = inverse_dictionary(n, source)
    return [p.substitute(inv) for p in out]


@dataclass
class LiftVectorField:
    """Lifted flow Gamma_t = sum_i coeffs[i] Gamma^{(i)}.

    When ``r0_symbolic`` is set, ``coeffs[0]`` is a placeholder: the
    Gamma-coefficient is fixed by the normalization det(Gamma, ..., Gamma^{(m)}) = 1
    and has to be computed (see :func:`genpentagram.limits.r0_oracle`).
    """

    dim: int
    coeffs: list
    r0_symbolic: bool = True
    scale: Fraction = Fraction(1)
    meta: dict = field(default_factory=dict)

    def evaluate(self, k_jets):
        """Numeric coefficients c_1..c_m given k_jets[i] = (k_i, k_i', k_i'', ...)."""
        jets = {("k", i): k_jets[i] for i in range(len(k_jets))}
        return [None if (i == 0 and self.r0_symbolic) else c.evaluate(jets)
                for i, c in enumerate(self.coeffs)]

    def __str__(self):
        parts = []
        for i in range(self.dim, -1, -1):
            name = "Γ" + ("'" * i if i <= 3 else f"^({i})")
            if i == 0 and self.r0_symbolic:
                parts.append(f"r0*{name}")
                continue
            c = self.coeffs[i]
            if c.is_zero():
                continue
            parts.append(f"({pretty(c)})*{name}")
        return "Γ_t = " + " + ".join(parts)

    def to_json(self):
        return {"dim": self.dim, "r0_symbolic": self.r0_symbolic,
                "scale": f"{self.scale.numerator}/{self.scale.denominator}",
                "coeffs": [None if (i == 0 and self.r0_symbolic) else c.to_json()
                           for i, c in enumerate(self.coeffs)]}


def lift_realization(n, density, normalize=True, source="literature"):
    """Lifted projective realization Gamma_t = (Gamma, ..., Gamma^{(n)}) g (r0, δ_κ H).

    With ``normalize`` the field is divided by the absolute value of its
    leading constant coefficient (a time rescaling), so that e.g. the n=3
    AGD flow reads -Gamma''' - 3/4 k2 Gamma' - r0 Gamma.
    """
    if source == "literature":
        _check(n)
    r = delta_kappa(n, density, source)
    g = gauge_matrix(n, source)
    coeffs = [ZERO]
    for i in range(1, n + 1):
        coeffs.append(sum((g.entry(i, j) * r[j - 1] for j in range(1, n + 1)), ZERO))
    scale = Fraction(1)
    if normalize:
        for c in reversed(coeffs[1:]):
            if not c.is_zero():
                if c.is_constant():
                    scale = abs(c.constant_term())
                break
        coeffs = [c / scale for c in coeffs]
    return LiftVectorField(n, coeffs, True, scale)
