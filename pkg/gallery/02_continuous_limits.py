# %% [markdown]
# # Continuous limits
# Each map is applied to the vertices Gamma(x + j eps) of a smooth curve. The
# image is expanded in the frame (Gamma, Gamma', ..., Gamma^(m)). The leading
# order and coefficients are then compared with the lifted flow and its
# normalization term r0.

# %%
from genpentagram.curves import trig_test_curve
from genpentagram.limits import fit_limit, limit_flavor
from genpentagram.maps import segment_hyperplane_schema
from genpentagram.projective import SmoothLiftedCurve, wilczynski_invariants


def show(flavor, m=None, offsets=None):
    S, field, lit, ladder = limit_flavor(flavor, m, offsets)
    curve = SmoothLiftedCurve(trig_test_curve(S.dim))
    rep = fit_limit(curve, S, 0.3, ladder, field=field, literature=lit)
    k = wilczynski_invariants(curve, 0.3)
    c = rep.extrapolated_coeffs
    print(f"{rep.schema}: order {rep.fitted_order:.3f}, coefficients "
          + ", ".join(f"{v:+.5f}" for v in c))
    print(f"    oracle {', '.join(f'{v:+.5f}' for v in rep.predicted_coeffs)}; "
          f"top invariant k_{S.dim - 1} = {k[-1]:+.5f}")
    return rep, k


# %% Second order: symmetric hyperplane offsets and syst2
show("seg-hyper", 3, (-2, 2))
show("syst2")

# %% Asymmetric offsets leave a first-order tangential term
curve = SmoothLiftedCurve(trig_test_curve(3))
rep = fit_limit(curve, segment_hyperplane_schema(3, (2, 3)), 0.3)
print("offsets (2, 3): order", round(rep.fitted_order, 3), "G' coefficient",
      round(rep.extrapolated_coeffs[1], 5))

# %% Third order: ratios of the Gamma' and Gamma''' coefficients
for flavor, idx in (("rp3-ansatz", 2), ("lemma-square", 2), ("rp4", 3), ("two-subspace", 3)):
    rep, k = show(flavor)
    c = rep.extrapolated_coeffs
    print(f"    ratio G'/G''' = {c[1] / c[3] / k[idx]:.4f} k_{idx}")
