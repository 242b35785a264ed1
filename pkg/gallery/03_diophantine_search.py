# %% [markdown]
# # Exact index searches
# All arithmetic is rational. The RP^3 search groups offset triples by their
# product. The RP^4 search checks the determinant identity in both sign
# conventions.

# %%
from genpentagram import dioph

for h in dioph.rp3_search(6):
    print(h.key(), "q =", h.q, "gamma3 =", h.gamma3)

# %%
for t in [(1, -2), (1, -2, 4), (1, -2, 4, 5)]:
    print(t, "Cramer", [str(v) for v in dioph.vandermonde_cramer(t)], "alternating form",
          [str(v) for v in dioph.alternating_sign_form(t)])

# %%
rows = [((7, -1, -7), (3, -1, -3), (6, -3, -4)),
        ((7, -1, -7), (3, -1, -3), (4, -2, -3)),
        ((7, -1, -7), (6, -3, -4), (4, -2, -3))]
for row in rows:
    chk = dioph.rp4_three_plane_check(*row)
    print(row, "det_x", chk.det_x, "det_m", chk.det_m,
          "20 det_x / det_m =", 20 * chk.det_x / chk.det_m)

# %%
for a, b in dioph.rp4_two_subspace_pairs(7):
    print(a, b, "ratio", dioph.rp4_two_subspace_ratio(a, b))
