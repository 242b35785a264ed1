"""Exact differential polynomials in jet variables.

A jet variable is a triple ``(family, index, order)`` standing for the
``order``-th x-derivative of ``family_index``; families are ``"k"`` (Wilczynski
invariants) and ``"κ"`` (the gauge-adapted invariants). A monomial is a sorted
tuple of jet variables with repetition, and a :class:`DifferentialPolynomial`
maps monomials to nonzero :class:`fractions.Fraction` coefficients.
"""

from collections import defaultdict
from fractions import Fraction
from numbers import Rational

FAMILIES = ("k", "κ")
_ALIASES = {"k": "k", "κ": "κ", "kappa": "κ"}


def _family(name):
    try:
        return _ALIASES[name]
    except KeyError:
        raise ValueError(f"unknown jet family {name!r}") from None


def _as_fraction(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"coefficients must be exact rationals, got {type(c).__name__}")


class DifferentialPolynomial:
    """Polynomial with rational coefficients in the variables k_i^{(j)}, κ_i^{(j)}.

    Instances are immutable and hashable. Arithmetic with ints and Fractions
    is supported; floats are rejected so that every result stays exact.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for mono, c in terms.items():
                c = _as_fraction(c)
                if c:
                    clean[tuple(sorted(mono))] = c
        self._terms = clean
        self._hash = None

    # construction -------------------------------------------------------

    @classmethod
    def constant(cls, c):
        return cls({(): c})

    @classmethod
    def var(cls, family, index, order=0):
        return cls({((_family(family), int(index), int(order)),): 1})

    # basic protocol -----------------------------------------------------

    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __bool__(self):
        return bool(self._terms)

    def is_zero(self):
        return not self._terms

    def __eq__(self, other):
        if not isinstance(other, DifferentialPolynomial):
            try:
                other = _coerce(other)
            except TypeError:
                return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self):
        return f"DifferentialPolynomial({self})"

    def __str__(self):
        return pretty(self)

    # arithmetic ---------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        out = dict(self._terms)
        for mono, c in other._terms.items():
            out[mono] = out.get(mono, 0) + c
        return DifferentialPolynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return DifferentialPolynomial({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-_coerce(other))

    def __rsub__(self, other):
        return _coerce(other) - self

    def __mul__(self, other):
        other = _coerce(other)
        if not self._terms or not other._terms:
            return ZERO
        if len(other._terms) == 1 and () in other._terms:
            c = other._terms[()]
            return DifferentialPolynomial({m: c * v for m, v in self._terms.items()})
        out = defaultdict(Fraction)
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                out[tuple(sorted(m1 + m2))] += c1 * c2
        return DifferentialPolynomial(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = _as_fraction(other)
        return DifferentialPolynomial({m: v / c for m, v in self._terms.items()})

    def __pow__(self, p):
        if not isinstance(p, int) or p < 0:
            raise ValueError("only nonnegative integer powers are supported")
        out = ONE
        base = self
        while p:
            if p & 1:
                out = out * base
            base = base * base
            p >>= 1
        return out

    # structure ----------------------------------------------------------

    def variables(self):
        return sorted({v for mono in self._terms for v in mono})

    def constant_term(self):
        return self._terms.get((), Fraction(0))

    def degree(self):
        return max((len(m) for m in self._terms), default=0)

    def families(self):
        return sorted({v[0] for v in self.variables()})

    def is_constant(self):
        return all(m == () for m in self._terms)

    # calculus -----------------------------------------------------------

    def partial(self, var):
        """Partial derivative with respect to one jet variable."""
        var = (_family(var[0]), int(var[1]), int(var[2]))
        out = defaultdict(Fraction)
        for mono, c in self._terms.items():
            n = mono.count(var)
            if n:
                rest = list(mono)
                rest.remove(var)
                out[tuple(rest)] += c * n
        return DifferentialPolynomial(out)

    def total_derivative(self, times=1):
        """Apply the total x-derivative D ``times`` times (Leibniz rule)."""
        p = self
        for _ in range(times):
            out = defaultdict(Fraction)
            for mono, c in p._terms.items():
                for pos, (fam, idx, order) in enumerate(mono):
                    if pos and mono[pos - 1] == mono[pos]:
                        continue  # repeated factor handled by its multiplicity
                    n = mono.count((fam, idx, order))
                    rest = list(mono)
                    rest.remove((fam, idx, order))
                    new = tuple(sorted(rest + [(fam, idx, order + 1)]))
                    out[new] += c * n
            p = DifferentialPolynomial(out)
        return p

    def substitute(self, mapping):
        """Replace base variables (family, index) by differential polynomials.

        ``mapping`` maps ``(family, index)`` to a DifferentialPolynomial; the jet
        variable of order j is replaced by the j-th total derivative of the image.
        Variables absent from ``mapping`` are left untouched.
        """
        cache = {}

        def image(v):
            if v not in cache:
                fam, idx, order = v
                if (fam, idx) in mapping:
                    cache[v] = _coerce(mapping[(fam, idx)]).total_derivative(order)
                else:
                    cache[v] = DifferentialPolynomial({(v,): 1})
            return cache[v]

        total = ZERO
        for mono, c in self._terms.items():
            term = DifferentialPolynomial.constant(c)
            for v in mono:
                term = term * image(v)
            total = total + term
        return total

    def evaluate(self, jets):
        """Numeric value given jets[(family, index)] = sequence of derivatives."""
        total = 0.0
        for mono, c in self._terms.items():
            term = float(c)
            for fam, idx, order in mono:
                term = term * jets[(fam, idx)][order]
            total = total + term
        return total

    # serialization ------------------------------------------------------

    def to_json(self):
        terms = []
        for mono in _sorted_monomials(self._terms):
            c = self._terms[mono]
            terms.append({"coeff": f"{c.numerator}/{c.denominator}",
                          "monomial": [list(v) for v in mono]})
        return {"terms": terms}

    @classmethod
    def from_json(cls, data):
        out = {}
        for t in data["terms"]:
            mono = tuple((_family(v[0]), int(v[1]), int(v[2])) for v in t["monomial"])
            out[tuple(sorted(mono))] = out.get(tuple(sorted(mono)), 0) + Fraction(t["coeff"])
        return cls(out)


def _coerce(x):
    if isinstance(x, DifferentialPolynomial):
        return x
    return DifferentialPolynomial.constant(_as_fraction(x))


ZERO = DifferentialPolynomial()
ONE = DifferentialPolynomial.constant(1)


def var(family, index, order=0):
    """Shorthand for :meth:`DifferentialPolynomial.var`."""
    return DifferentialPolynomial.var(family, index, order)


def dp_total_derivative(p):
    return _coerce(p).total_derivative()


def variational_derivative(p, family="k", size=None):
    """Euler operator: component i is sum_j (-D)^j dp/d(family_i^{(j)}).

    Returns a list indexed by the variable index i = 0..size-1 (``size``
    defaults to one more than the largest index of ``family`` present).
    """
    p = _coerce(p)
    fam = _family(family)
    present = [v for v in p.variables() if v[0] == fam]
    if size is None:
        size = 1 + max((v[1] for v in present), default=-1)
    out = []
    for i in range(size):
        comp = ZERO
        orders = sorted({v[2] for v in present if v[1] == i})
        for j in orders:
            term = p.partial((fam, i, j)).total_derivative(j)
            comp = comp + (term if j % 2 == 0 else -term)
        out.append(comp)
    return out


def _var_key(v):
    return (FAMILIES.index(v[0]), v[1], v[2])


def _mono_key(mono):
    return (len(mono), [_var_key(v) for v in mono])


def _sorted_monomials(terms):
    return sorted(terms, key=_mono_key)


def _var_str(v):
    fam, idx, order = v
    return f"{fam}{idx}" + "'" * order if order <= 3 else f"{fam}{idx}^({order})"


def pretty(p):
    """Deterministic human-readable form, e.g. ``k0 - 1/8*k2^2 + 3/2*k2'``."""
    p = _coerce(p)
    if not p._terms:
        return "0"
    parts = []
    for mono in _sorted_monomials(p._terms):
        c = p._terms[mono]
        factors = []
        for v in dict.fromkeys(mono):
            n = mono.count(v)
            factors.append(_var_str(v) + (f"^{n}" if n > 1 else ""))
        body = "*".join(factors)
        mag = abs(c)
        if not body:
            text = str(mag)
        elif mag == 1:
            text = body
        else:
            text = f"{mag}*{body}"
        parts.append(("-" if c < 0 else "+", text))
    sign, text = parts[0]
    out = ("-" if sign == "-" else "") + text
    for sign, text in parts[1:]:
        out += f" {sign} {text}"
    return out
