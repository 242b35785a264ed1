"""Truncated pseudo-differential operators with differential-polynomial coefficients.

An operator is sum_a c_a D^a over integer orders a. Operators with negative
orders are infinite series; they carry a ``floor`` below which nothing is
known. ``floor=None`` marks an exact finite operator (a differential operator
or a finite Laurent sum known to be exact).
"""

from fractions import Fraction

from .diffpoly import ONE, ZERO, DifferentialPolynomial, _coerce, var, variational_derivative
from .errors import FloorUnderflow, MissingNormalization, NotMonic


def gbinom(a, j):
    """Generalized binomial coefficient C(a, j) for integer a and j >= 0."""
    out = Fraction(1)
    for i in range(j):
        out = out * (a - i) / (i + 1)
    return out


class PseudoDiffOp:
    """Formal series sum_a coeffs[a] D^a, reliable for orders >= floor.

    Parameters
    ----------
    coeffs : dict
        Maps integer orders to DifferentialPolynomial (or rational) coefficients.
    floor : int or None
        Lowest reliable order. ``None`` means the operator is exact.
    """

    __slots__ = ("coeffs", "floor")

    def __init__(self, coeffs=None, floor=None):
        clean = {}
        for a, c in (coeffs or {}).items():
            c = _coerce(c)
            if floor is not None and a < floor:
                continue
            if c:
                clean[int(a)] = c
        self.coeffs = clean
        self.floor = floor

    # construction -------------------------------------------------------

    @classmethod
    def D(cls, power=1, floor=None):
        if power < 0 and floor is None:
            raise ValueError("negative powers of D need an explicit floor")
        return cls({power: ONE}, floor)

    @classmethod
    def scalar(cls, p):
        return cls({0: _coerce(p)})

    # access -------------------------------------------------------------

    @property
    def degree(self):
        return max(self.coeffs, default=None)

    def coeff(self, a):
        if self.floor is not None and a < self.floor:
            raise FloorUnderflow(f"order {a} lies below the truncation floor {self.floor}")
        return self.coeffs.get(a, ZERO)

    def residue(self):
        """Coefficient of D^{-1}."""
        return self.coeff(-1)

    def truncate(self, floor):
        """Drop orders below ``floor`` (and record it as the new floor)."""
        new = floor if self.floor is None else max(floor, self.floor)
        return PseudoDiffOp(self.coeffs, new)

    def __eq__(self, other):
        if not isinstance(other, PseudoDiffOp):
            return NotImplemented
        return self.coeffs == other.coeffs and self.floor == other.floor

    def __repr__(self):
        return f"PseudoDiffOp({pretty(self)}, floor={self.floor})"

    # arithmetic ---------------------------------------------------------

    def __add__(self, other):
        other = _as_op(other)
        floor = _max_floor(self.floor, other.floor)
        out = dict(self.coeffs)
        for a, c in other.coeffs.items():
            out[a] = out.get(a, ZERO) + c
        return PseudoDiffOp(out, floor)

    __radd__ = __add__

    def __neg__(self):
        return PseudoDiffOp({a: -c for a, c in self.coeffs.items()}, self.floor)

    def __sub__(self, other):
        return self + (-_as_op(other))

    def __rsub__(self, other):
        return _as_op(other) - self

    def __mul__(self, other):
        return psdo_mul(self, _as_op(other))

    def __rmul__(self, other):
        return psdo_mul(_as_op(other), self)

    def __pow__(self, p):
        if not isinstance(p, int) or p < 0:
            raise ValueError("only nonnegative integer powers are supported")
        out = PseudoDiffOp({0: ONE})
        for _ in range(p):
            out = psdo_mul(out, self)
        return out

    def adjoint(self):
        """Formal adjoint of a differential operator: (sum p_j D^j)* = sum (-D)^j p_j."""
        if self.floor is not None or any(a < 0 for a in self.coeffs):
            raise ValueError("adjoint is implemented for exact differential operators")
        out = PseudoDiffOp()
        for a, c in self.coeffs.items():
            term = psdo_mul(PseudoDiffOp({a: ONE}), PseudoDiffOp({0: c}))
            out = out + (term if a % 2 == 0 else -term)
        return out

    def apply(self, f):
        """Apply a differential operator to a function given as a DifferentialPolynomial."""
        if any(a < 0 for a in self.coeffs):
            raise ValueError("only differential operators can be applied to functions")
        f = _coerce(f)
        total = ZERO
        for a, c in self.coeffs.items():
            total = total + c * f.total_derivative(a)
        return total

    def map_coeffs(self, fn):
        return PseudoDiffOp({a: fn(c) for a, c in self.coeffs.items()}, self.floor)


def _as_op(x):
    if isinstance(x, PseudoDiffOp):
        return x
    return PseudoDiffOp.scalar(x)


def _max_floor(f1, f2):
    if f1 is None:
        return f2
    if f2 is None:
        return f1
    return max(f1, f2)


def psdo_mul(P, Q):
    """Composition P o Q using D^a o f = sum_j C(a, j) f^{(j)} D^{a-j}.

    The unknown tail of P (orders < floor_P) contaminates the product below
    floor_P + deg Q, and likewise for Q, so the product floor is the larger
    of the two bounds.
    """
    if not P.coeffs or not Q.coeffs:
        floor = _max_floor(None if P.floor is None else P.floor + (Q.degree or 0),
                           None if Q.floor is None else Q.floor + (P.degree or 0))
        return PseudoDiffOp({}, floor)
    degP, degQ = P.degree, Q.degree
    bounds = []
    if P.floor is not None:
        bounds.append(P.floor + degQ)
    if Q.floor is not None:
        bounds.append(Q.floor + degP)
    floor = max(bounds) if bounds else None
    if floor is None and any(a < 0 for a in P.coeffs):
        raise ValueError("composition with an exact negative-order left factor "
                         "is an infinite series; give the operator a floor")
    out = {}
    for a, p in P.coeffs.items():
        for b, q in Q.coeffs.items():
            j = 0
            dq = q
            while True:
                order = a + b - j
                if floor is not None and order < floor:
                    break
                if a >= 0 and j > a:
                    break
                c = gbinom(a, j)
                if c and dq:
                    out[order] = out.get(order, ZERO) + p * dq * c
                j += 1
                dq = dq.total_derivative()
    return PseudoDiffOp(out, floor)


def agd_operator(order, family="k"):
    """L = D^order + sum_{i=0}^{order-2} k_i D^i (no D^{order-1} term)."""
    coeffs = {order: ONE}
    for i in range(order - 1):
        coeffs[i] = var(family, i)
    return PseudoDiffOp(coeffs)


def psdo_root(L, order, depth=None):
    """The root R = D + sum_{i=1}^{depth} l_i D^{-i} with R^order = L.

    Solved triangularly: the D^{order-1-i} coefficient of R^order equals
    order * l_i plus terms in l_1..l_{i-1}. ``depth`` defaults to order + 2
    (that is, n + 3 for an operator of order n + 1). The returned operator has
    floor -depth.
    """
    s = int(order)
    depth = s + 2 if depth is None else int(depth)
    if depth < 1:
        raise ValueError("depth must be >= 1")
    if L.degree != s or L.coeff(s) != ONE:
        raise NotMonic(f"operator must be monic of order {s}")
    if L.coeffs.get(s - 1, ZERO):
        raise MissingNormalization(f"operator has a nonzero D^{s - 1} coefficient")
    ell = {}
    for i in range(1, depth + 1):
        R = PseudoDiffOp({1: ONE, **{-j: ell[j] for j in ell}}, floor=-i)
        target = L.coeffs.get(s - 1 - i, ZERO)
        have = _power_coeff(R, s, s - 1 - i)
        ell[i] = (target - have) / s
    return PseudoDiffOp({1: ONE, **{-j: ell[j] for j in ell}}, floor=-depth)


def _power_coeff(R, s, a):
    """Coefficient of D^a in R^s; R's floor must make it reliable."""
    P = R
    for _ in range(s - 1):
        P = psdo_mul(P, R)
    return P.coeff(a)


def fractional_power(L, order, r, depth=None):
    """L^{r/order} truncated so that the residue is reliable."""
    depth = max(r, 1) if depth is None else depth
    R = psdo_root(L, order, depth)
    return R ** r


def hamiltonian_density(order, r, depth=None):
    """res(L^{r/order}) for the generic operator of the given order."""
    L = agd_operator(order)
    return fractional_power(L, order, r, depth).residue()


def equal_modulo_derivatives(p, q, family="k"):
    """True iff p - q has vanishing variational derivative and zero constant term."""
    diff = _coerce(p) - _coerce(q)
    if diff.constant_term():
        return False
    return all(c.is_zero() for c in variational_derivative(diff, family))


def pretty(P):
    """Operator pretty-printer in decreasing order, with the floor noted."""
    parts = []
    for a in sorted(P.coeffs, reverse=True):
        c = str(P.coeffs[a])
        d = "" if a == 0 else ("D" if a == 1 else f"D^{a}")
        if c == "1" and d:
            parts.append(d)
        else:
            parts.append(f"({c})" + (f"*{d}" if d else ""))
    body = " + ".join(parts) if parts else "0"
    return body if P.floor is None else f"{body} + o(D^{P.floor})"


def to_json(P):
    return {"floor": P.floor,
            "coeffs": [{"order": a, "coeff": P.coeffs[a].to_json()}
                       for a in sorted(P.coeffs, reverse=True)]}


def from_json(data):
    return PseudoDiffOp({int(t["order"]): DifferentialPolynomial.from_json(t["coeff"])
                         for t in data["coeffs"]}, data.get("floor"))
