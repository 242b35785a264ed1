"""Generalized pentagram maps as intersections of vertex-spanned subspaces.

An :class:`IndexSchema` lists, for each subspace, the offsets o of the
vertices x_{n+o} spanning it. The image T(x_n) is the common line of the
spans in R^{m+1}. Offset 0 is never implied; a schema through x_n lists it.
"""

from dataclasses import dataclass, replace
from math import prod

import numpy as np

from .errors import (DegenerateAnsatz, InvalidOffsets, InvalidSchema, NonLiftable,
                     UnexpectedDimension)
from .projective import LiftedPolygon, angular_distance, discrete_normalize, span_intersection

COINCIDENCE_TOL = 1e-9


class DegenerateOutput(UnexpectedDimension):
    """The intersection is forced combinatorially (a shared spanning vertex) or
    two image vertices coincide within one period."""


@dataclass(frozen=True)
class IndexSchema:
    """Offsets of the spanning vertices of each intersecting subspace.

    Parameters
    ----------
    dim : int
        Dimension m of the projective space.
    subspaces : tuple of tuple of int
        One offset list per subspace; a list of s offsets spans an s-dimensional
        subspace of R^{m+1}.
    name : str, optional
    """

    dim: int
    subspaces: tuple
    name: str = ""

    def __post_init__(self):
        subs = tuple(tuple(int(o) for o in s) for s in self.subspaces)
        object.__setattr__(self, "subspaces", subs)
        m = self.dim
        if m < 2:
            raise InvalidSchema("dim must be >= 2")
        if len(subs) < 2:
            raise InvalidSchema("need at least two subspaces")
        for s in subs:
            if len(set(s)) != len(s):
                raise InvalidSchema(f"offset list {list(s)} has repeated entries")
            if not 2 <= len(s) <= m:
                raise InvalidSchema(f"offset list {list(s)} must have between 2 and {m} entries")
        excess = sum(len(s) for s in subs) - (len(subs) - 1) * (m + 1)
        if excess != 1:
            raise InvalidSchema(
                f"subspaces of dimensions {[len(s) for s in subs]} in R^{m + 1} "
                f"meet generically in dimension {excess}, not 1")

    @property
    def reach(self):
        return max(abs(o) for s in self.subspaces for o in s)

    def to_json(self):
        return {"dim": self.dim, "subspaces": [list(s) for s in self.subspaces],
                "name": self.name}

    @classmethod
    def from_json(cls, data):
        try:
            return cls(int(data["dim"]), tuple(tuple(s) for s in data["subspaces"]),
                       data.get("name", ""))
        except (KeyError, TypeError) as exc:
            raise InvalidSchema(f"malformed schema: {exc}") from None


def pentagram_schema():
    return IndexSchema(2, ((-1, 1), (0, 2)), "pentagram")


def segment_hyperplane_schema(m, hyper_offsets, reach=1):
    """Segment through x_{n-r}, x_{n+r} meeting the hyperplane through x_n and x_{n+k_i}."""
    hyper = tuple(int(o) for o in hyper_offsets)
    if len(hyper) != m - 1:
        raise InvalidOffsets(f"need {m - 1} hyperplane offsets for m={m}, got {len(hyper)}")
    if len(set(hyper)) != len(hyper):
        raise InvalidOffsets(f"hyperplane offsets {list(hyper)} repeat")
    bad = [o for o in hyper if o in (0, reach, -reach)]
    if bad:
        raise InvalidOffsets(f"hyperplane offsets {bad} collide with x_n or the segment")
    name = f"seg-hyper-m{m}" + ("" if reach == 1 else f"-r{reach}") + "-" + \
        ",".join(str(o) for o in hyper)
    return IndexSchema(m, ((-reach, reach), (0,) + hyper), name)


def syst2_schema():
    return IndexSchema(2, ((-2, 1), (-1, 2)), "syst2")


def rp3_ansatz_schema(a, b, c):
    """Planes through the offset triples (-c, a, b), (c, -a, b), (c, -1, ab)."""
    checks = [(c == a, "c = a"), (a == 1, "a = 1"), (b == -1, "b = -1"), (b == c, "b = c")]
    for violated, label in checks:
        if violated:
            raise DegenerateAnsatz(f"excluded ansatz parameters: {label}")
    triples = ((-c, a, b), (c, -a, b), (c, -1, a * b))
    for t in triples:
        if 0 in t:
            raise DegenerateAnsatz(f"triple {t} contains a vanishing offset")
        if len(set(t)) != 3:
            raise DegenerateAnsatz(f"triple {t} has repeated offsets")
    return IndexSchema(3, triples, f"rp3-ansatz({a},{b},{c})")


def rp3_three_plane_schema(m, n, r, name=None):
    """Three planes in RP^3 through arbitrary offset triples."""
    return IndexSchema(3, (tuple(m), tuple(n), tuple(r)), name or f"rp3-planes{tuple(m)}{tuple(n)}{tuple(r)}")


def rp4_schema(m, n, r, name=None):
    """One plane (offsets m) and two hyperplanes through x_n (offsets n+(0,), r+(0,)) in RP^4."""
    return IndexSchema(4, (tuple(m), tuple(n) + (0,), tuple(r) + (0,)),
                       name or f"rp4{tuple(m)}{tuple(n)}{tuple(r)}")


def rp4_two_subspace_schema(m, n, name=None):
    """Two planes in RP^4 (3-dimensional subspaces of R^5)."""
    return IndexSchema(4, (tuple(m), tuple(n)), name or f"rp4-two{tuple(m)}{tuple(n)}")


def _spanning_vectors(P, S, i):
    return [[P.vertex(i + o) for o in offs] for offs in S.subspaces]


def _shared_vertex(P, S, i):
    """True if two different offsets in different subspaces give the same
    projective point (possible on short periods, e.g. x_{n-2} = x_{n+2} on a
    square). The same offset listed in two subspaces is part of the design."""
    flat = [(j, o, P.vertex(i + o)) for j, offs in enumerate(S.subspaces) for o in offs]
    for a in range(len(flat)):
        for b in range(a + 1, len(flat)):
            ja, oa, va = flat[a]
            jb, ob, vb = flat[b]
            if ja != jb and oa != ob and angular_distance(va, vb) < COINCIDENCE_TOL:
                return True
    return False


def image_vertex(P, S, i):
    """T(x_i) as a unit vector, oriented against the first spanning set."""
    spans = _spanning_vectors(P, S, i)
    if _shared_vertex(P, S, i):
        raise DegenerateOutput("subspaces share a spanning vertex", vertex=i)
    try:
        v = span_intersection(spans)
    except UnexpectedDimension as exc:
        raise UnexpectedDimension(str(exc), vertex=i) from None
    ref = np.sum(spans[0], axis=0)
    if v @ ref < 0:
        v = -v
    return v


def apply_schema(P, S, normalize=True):
    """Apply the map T defined by S to every vertex of one period of P.

    The monodromy carries over unchanged. With ``normalize`` the output is
    rescaled by :func:`discrete_normalize`; if that is impossible the unit
    representatives are returned with ``nonliftable=True``.
    """
    if S.dim != P.dim:
        raise InvalidSchema(f"schema is for RP^{S.dim}, polygon lives in RP^{P.dim}")
    out = np.array([image_vertex(P, S, i) for i in range(P.period)])
    for a in range(P.period):
        for b in range(a + 1, P.period):
            if angular_distance(out[a], out[b]) < COINCIDENCE_TOL:
                raise DegenerateOutput(f"image vertices {a} and {b} coincide", vertex=b)
    Q = replace(P, vertices=out, normalized=False, nonliftable=False,
                meta={**P.meta, "schema": S.name})
    if not normalize:
        return Q
    try:
        return discrete_normalize(Q)
    except NonLiftable as exc:
        return replace(Q, nonliftable=True, meta={**Q.meta, "nonliftable": str(exc)})


def iterate_schema(P, S, iters, normalize=True):
    out = [P]
    for _ in range(iters):
        out.append(apply_schema(out[-1], S, normalize))
    return out


def offset_products(S):
    return [prod(s) for s in S.subspaces]


def random_convex_polygon(N, rng, jitter=0.25):
    """Closed convex N-gon in the affine chart, lifted as (1, x, y)."""
    while True:
        base = 2 * np.pi * np.arange(N) / N
        ang = np.sort(base + jitter * (2 * np.pi / N) * rng.uniform(-1, 1, N))
        rad = 1 + 0.2 * rng.uniform(-1, 1, N)
        pts = np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])
        if _is_strictly_convex(pts):
            return LiftedPolygon.from_affine(pts)


def regular_polygon(N):
    ang = 2 * np.pi * np.arange(N) / N
    return LiftedPolygon.from_affine(np.column_stack([np.cos(ang), np.sin(ang)]))


def _is_strictly_convex(pts):
    n = len(pts)
    signs = []
    for i in range(n):
        a, b, c = pts[i], pts[(i + 1) % n], pts[(i + 2) % n]
        cross = (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
        signs.append(cross > 1e-9)
    # turning number one: total angle 2 pi with all left turns
    return all(signs)
