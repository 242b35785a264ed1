# %% [markdown]
# # Polygon maps
# The pentagram map fixes pentagons and is an involution on hexagons, up to
# projective equivalence. On longer polygons it and the `syst2` map commute
# with projective transformations.

# %%
import numpy as np

from genpentagram.maps import (apply_schema, iterate_schema, pentagram_schema,
                               random_convex_polygon, syst2_schema)
from genpentagram.projective import projective_equivalence, random_sl

rng = np.random.default_rng(0)


def equivalent(P, Q):
    return any(projective_equivalence(P, Q.shifted(s)) for s in range(Q.period))


# %%
pentagon = random_convex_polygon(5, rng)
print("pentagon fixed:", equivalent(apply_schema(pentagon, pentagram_schema()), pentagon))
hexagon = random_convex_polygon(6, rng)
twice = iterate_schema(hexagon, pentagram_schema(), 2, normalize=False)[-1]
print("hexagon involution:", equivalent(twice, hexagon))

# %%
P = random_convex_polygon(12, rng)
g = random_sl(3, rng)
for S in (pentagram_schema(), syst2_schema()):
    lhs = apply_schema(P.transformed(g), S, normalize=False)
    rhs = apply_schema(P, S, normalize=False).transformed(g)
    print(S.name, "equivariant:", projective_equivalence(lhs, rhs) is not None)
