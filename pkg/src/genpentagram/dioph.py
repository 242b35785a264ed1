"""Exact admissibility conditions and integer searches for third-order schemas.

A plane spanned by x_{n+m_1}, ..., x_{n+m_s} enters the eps-expansion of a
schema map only through the Cramer quotients M_i of Vandermonde systems in
the offsets. These are signed elementary symmetric polynomials, which turns
the matching conditions into Diophantine equations in the offsets. All
arithmetic here is exact.
"""

from collections import defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import prod

from .errors import DegeneratePlanes, RepeatedEntries

# ---------------------------------------------------------------------------
# exact linear algebra


def _det(rows):
    """Determinant by fraction-exact Gaussian elimination."""
    a = [[Fraction(v) for v in r] for r in rows]
    n = len(a)
    sign = 1
    out = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            sign = -sign
        out *= a[c][c]
        for i in range(c + 1, n):
            f = a[i][c] / a[c][c]
            if f:
                for j in range(c, n):
                    a[i][j] -= f * a[c][j]
    return sign * out


def _rank(rows):
    a = [[Fraction(v) for v in r] for r in rows]
    rank = 0
    ncol = len(a[0]) if a else 0
    for c in range(ncol):
        p = next((i for i in range(rank, len(a)) if a[i][c] != 0), None)
        if p is None:
            continue
        a[rank], a[p] = a[p], a[rank]
        for i in range(len(a)):
            if i != rank and a[i][c] != 0:
                f = a[i][c] / a[rank][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[rank])]
        rank += 1
    return rank


def _cramer(rows, rhs, col):
    A = [list(r) for r in rows]
    for i, r in enumerate(A):
        r[col] = rhs[i]
    return _det(A) / _det(rows)


# ---------------------------------------------------------------------------
# symmetric invariants


def _check_distinct(t):
    if len(set(t)) != len(t):
        raise RepeatedEntries(f"tuple {tuple(t)} has repeated entries")


def elementary_symmetric(t):
    """e_0, ..., e_s of the entries of t."""
    e = [Fraction(1)] + [Fraction(0)] * len(t)
    for v in t:
        for j in range(len(t), 0, -1):
            e[j] += e[j - 1] * v
    return e


def vandermonde_cramer(t):
    """M_i = det A_i / det A, with A the Vandermonde matrix (rows t^0..t^{s-1})
    and A_i the same with row i replaced by t^s."""
    _check_distinct(t)
    s = len(t)
    A = [[Fraction(v) ** r for v in t] for r in range(s)]
    top = [Fraction(v) ** s for v in t]
    d = _det(A)
    out = []
    for i in range(s):
        Ai = [list(r) for r in A]
        Ai[i] = top
        out.append(_det(Ai) / d)
    return tuple(out)


def alternating_sign_form(t):
    """(-1)^s p_{i-1}, with (x - t_1)...(x - t_s) = x^s + p_{s-1}x^{s-1} + ... + p_0.

    This is the sign pattern of the closed form as it is usually quoted (with
    the subscript read so that i = 1 picks the constant term). It agrees with
    :func:`vandermonde_cramer` for odd s only; the correct form is -p_{i-1}.
    """
    s = len(t)
    e = elementary_symmetric(t)
    p = [(-1) ** (s - j) * e[s - j] for j in range(s + 1)]  # coefficient of x^j
    return tuple((-1) ** s * p[i - 1] for i in range(1, s + 1))


@dataclass(frozen=True)
class SymmetricInvariants:
    """Cramer quotients M_1..M_s of an offset tuple, and for s = 3 the derived
    M_4 = M_3 M_2 + M_1 and M_5 = M_3^2 + M_2."""

    tuple: tuple
    M: tuple
    M4: Fraction = None
    M5: Fraction = None

    def __getitem__(self, i):
        """1-based access: inv[1] is M_1."""
        if i == 4 and len(self.M) == 3:
            return self.M4
        if i == 5 and len(self.M) == 3:
            return self.M5
        return self.M[i - 1]

    def to_json(self):
        d = {"tuple": list(self.tuple), "M": [str(v) for v in self.M]}
        if self.M4 is not None:
            d["M4"], d["M5"] = str(self.M4), str(self.M5)
        return d


def symmetric_invariants(t, check=False):
    """M_i = (-1)^{s-i} e_{s-i+1}(t): the solution of t_j^s = sum_i M_i t_j^{i-1}.

    For s = 3 this is M_1 = product, M_2 = -(pairwise sum), M_3 = sum.

    Parameters
    ----------
    t : sequence of int
        Pairwise distinct offsets.
    check : bool
        Recompute by Cramer quotients and assert equality.
    """
    t = tuple(int(v) for v in t)
    _check_distinct(t)
    s = len(t)
    e = elementary_symmetric(t)
    M = tuple((-1) ** (s - i) * e[s - i + 1] for i in range(1, s + 1))
    if check and M != vandermonde_cramer(t):
        raise AssertionError(f"Cramer cross-check failed for {t}")
    if s == 3:
        return SymmetricInvariants(t, M, M[2] * M[1] + M[0], M[2] ** 2 + M[1])
    return SymmetricInvariants(t, M)


# ---------------------------------------------------------------------------
# RP^3: three planes


@dataclass(frozen=True)
class Rp3Candidate:
    """Three offset triples with the exact third-order data of their map.

    ``q`` is gamma_1 / (M_1 k_2); the limit flow is proportional to
    Gamma''' + 6 q k_2 Gamma' + r_0 Gamma. It is None unless C1 holds and the
    system is nonsingular.
    """

    m: tuple
    n: tuple
    r: tuple
    c1_holds: bool
    rank_full: bool
    sum_squares_equal: bool
    q: Fraction = None
    gamma3: Fraction = None
    meq_singular: bool = False

    def key(self):
        return (self.m, self.n, self.r)

    def to_json(self):
        return {"m": list(self.m), "n": list(self.n), "r": list(self.r),
                "c1_holds": self.c1_holds, "rank_full": self.rank_full,
                "sum_squares_equal": self.sum_squares_equal,
                "meq_singular": self.meq_singular,
                "q": None if self.q is None else str(self.q),
                "gamma3": str(self.gamma3)}


def _meq_rhs(inv):
    """Right side of the gamma_1 system per plane, divided by k_2:
    (1/20) m5 A^{-1} e1 - (M_3/12) m4 A^{-1} e1 = M_1 (M_5/20 - M_3^2/12)."""
    M1, M3, M5 = inv[1], inv[3], inv[5]
    return M1 * (M5 / 20 - M3 * M3 / 12)


def rp3_candidate(m, n, r):
    """Check C1 and the rank condition, and solve for q exactly."""
    invs = [symmetric_invariants(t) for t in (m, n, r)]
    for t in (m, n, r):
        if len(t) != 3 or 0 in t:
            raise ValueError(f"triple {tuple(t)} must have three nonzero entries")
    c1 = invs[0][1] == invs[1][1] == invs[2][1]
    check = [[v[2], v[3]] for v in invs]
    rank_full = _rank(check) == 2
    sq = len({sum(x * x for x in t) for t in (m, n, r)}) == 1
    gamma3 = Fraction(invs[0][1], 6)
    q = None
    singular = False
    if c1 and rank_full:
        rows = [[v[2], v[3], 1] for v in invs]
        if _det(rows) == 0:
            singular = True
        else:
            gamma1 = _cramer(rows, [_meq_rhs(v) for v in invs], 0)
            q = gamma1 / invs[0][1]
    return Rp3Candidate(tuple(m), tuple(n), tuple(r), c1, rank_full, sq, q, gamma3, singular)


def rp3_level_condition(a, b, c):
    """(c - 1 + a(b - 1)) / (b - c), exactly. Raises ZeroDivisionError for b = c."""
    return Fraction(c - 1 + a * (b - 1), b - c)


def ansatz_triples(a, b, c):
    return ((-c, a, b), (c, -a, b), (c, -1, a * b))


def _triples(max_abs, allow_zero=False):
    vals = [v for v in range(-max_abs, max_abs + 1) if allow_zero or v]
    return list(combinations(vals, 3))


def _rp3_group(args):
    group, require_q = args
    hits = []
    for a, b, c in combinations(group, 3):
        cand = rp3_candidate(a, b, c)
        if cand.q is not None and (require_q is None or cand.q == require_q):
            hits.append(cand)
    return hits


def _run(fn, jobs, threads):
    if threads and threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * threads))))
    else:
        parts = [fn(j) for j in jobs]
    return [h for part in parts for h in part]


def rp3_search(max_abs, require_q=Fraction(1, 8), threads=1):
    """All unordered triples of planes with offsets in [-max_abs, max_abs] whose
    map has a third-order limit with the given q.

    Triples are canonically sorted; the three planes play symmetric roles and
    are reported in sorted order. C1 (equal products) is used to group the
    enumeration; groups are processed in parallel and merged deterministically.
    """
    if max_abs < 2:
        raise ValueError("max_abs must be >= 2")
    require_q = None if require_q is None else Fraction(require_q)
    groups = defaultdict(list)
    for t in _triples(max_abs):
        groups[prod(t)].append(t)
    jobs = [(groups[p], require_q) for p in sorted(groups) if p and len(groups[p]) >= 3]
    hits = _run(_rp3_group, jobs, threads)
    return sorted(hits, key=Rp3Candidate.key)


# ---------------------------------------------------------------------------
# RP^4: one plane and two hyperplanes through x_n


@dataclass(frozen=True)
class Rp4Check:
    """Conditions for the map cut out by the plane m and the hyperplanes
    through x_n, x_{n+n_i} and x_n, x_{n+r_i}.

    ``det_x`` and ``det_m`` are the two determinants of the gamma_1 equation;
    ``identity_holds`` is 20 det_x = -9 det_m, the form tied to the ratio 27/5,
    ``flipped_identity_holds`` the same with +9.
    """

    m: tuple
    n: tuple
    r: tuple
    condition1: bool
    rank_full: bool
    det_x: Fraction
    det_m: Fraction
    identity_holds: bool
    flipped_identity_holds: bool

    @property
    def passes(self):
        return self.condition1 and self.rank_full and self.identity_holds

    def key(self):
        return (self.m, self.n, self.r)

    def to_json(self):
        return {"m": list(self.m), "n": list(self.n), "r": list(self.r),
                "condition1": self.condition1, "rank_full": self.rank_full,
                "det_x": str(self.det_x), "det_m": str(self.det_m),
                "identity_holds": self.identity_holds,
                "flipped_identity_holds": self.flipped_identity_holds}


def _rp4_dets(M, N, R):
    M1, M2, M3 = M[1], M[2], M[3]
    X = [[M3 * (N[3] - M2) + 2 * (N[2] - 3 * M1), M2 - N[3]],
         [M3 * (R[3] - M2) + 2 * (R[2] - 3 * M1), M2 - R[3]]]
    Mm = [[M1 - N[2], M2 - N[3]], [M1 - R[2], M2 - R[3]]]
    return _det(X), _det(Mm)


def rp4_three_plane_check(m, n, r):
    """Exact checks for one plane (m) and two hyperplanes through x_n (n, r)."""
    M = symmetric_invariants(m)
    N = symmetric_invariants(tuple(n) + (0,))
    R = symmetric_invariants(tuple(r) + (0,))
    cond1 = M[1] * M[3] == N[1] + N[4] * M[1] and M[1] * M[3] == R[1] + R[4] * M[1]
    dx, dm = _rp4_dets(M, N, R)
    return Rp4Check(tuple(m), tuple(n), tuple(r), cond1, dm != 0, dx, dm,
                    20 * dx == -9 * dm, 20 * dx == 9 * dm)


def _rp4_block(args):
    m, cands, flipped = args
    hits = []
    for n, r in combinations(cands, 2):
        chk = rp4_three_plane_check(m, n, r)
        ok = chk.flipped_identity_holds if flipped else chk.identity_holds
        if chk.condition1 and chk.rank_full and ok:
            hits.append(chk)
    return hits


def rp4_search(max_abs, threads=1, flipped=False):
    """Exhaustive search of (m; n, r) with entries in [-max_abs, max_abs].

    The m-plane is distinguished; the two hyperplanes are interchangeable and
    reported with n < r. With ``flipped`` the identity 20 det_x = +9 det_m is
    used instead of -9.
    """
    if max_abs < 2:
        raise ValueError("max_abs must be >= 2")
    trip = _triples(max_abs)
    by_sum = defaultdict(list)
    for t in trip:
        by_sum[sum(t)].append(t)
    # condition1 with n_4 = r_4 = 0 reads M_3 = N_4 = R_4, i.e. equal sums
    jobs = [(m, by_sum[sum(m)], flipped) for m in trip if prod(m) and len(by_sum[sum(m)]) >= 2]
    hits = _run(_rp4_block, jobs, threads)
    return sorted(hits, key=Rp4Check.key)


def rp4_two_subspace_ratio(m, n):
    """gamma_1 / (gamma_3 k_3) for two planes in RP^4, exactly.

    Matching the Gamma''' coefficient at order eps^5 gives
    (M_2 - N_2) gamma_1 = (1/20)(M_1 M_5 - N_1 N_5) once M_1 = N_1 and M_3 = N_3.
    """
    M = symmetric_invariants(m)
    N = symmetric_invariants(n)
    if len(M.M) != 3 or len(N.M) != 3:
        raise ValueError("two-subspace maps take offset triples")
    if 0 in m or 0 in n:
        raise ValueError("offsets must be nonzero")
    if M[1] != N[1] or M[1] == 0:
        raise ValueError("need M_1 = N_1 != 0")
    if M[3] != N[3]:
        raise ValueError("need M_3 = N_3")
    if M[2] == N[2]:
        raise DegeneratePlanes("M_2 = N_2: the two planes coincide")
    gamma1 = (M[1] * M[5] - N[1] * N[5]) / (20 * (M[2] - N[2]))
    gamma3 = Fraction(M[1], 6)
    return gamma1 / gamma3


def rp4_two_subspace_pairs(max_abs):
    """All unordered valid pairs (m, n) with entries in [-max_abs, max_abs]."""
    groups = defaultdict(list)
    for t in _triples(max_abs):
        if prod(t):
            groups[(prod(t), sum(t))].append(t)
    out = []
    for key in sorted(groups):
        for a, b in combinations(groups[key], 2):
            if symmetric_invariants(a)[2] != symmetric_invariants(b)[2]:
                out.append((a, b))
    return out
