# %% [markdown]
# # AGD Hamiltonians and their lifted realizations
# Residues of fractional powers of L = D^(n+1) + k_(n-1) D^(n-1) + ... are
# computed exactly. They are then pushed through the gauge to flows on the
# normalized lift.

# %%
from genpentagram.gauge import delta_kappa, gauge_residual, lift_realization
from genpentagram.psdo import hamiltonian_density, pretty, psdo_root, agd_operator
from genpentagram.diffpoly import variational_derivative

R = psdo_root(agd_operator(4), 4, 3)
print("L^(1/4) =", pretty(R))
h = hamiltonian_density(5, 3)
print("res L^(3/5) =", h)
print("variational derivative:", [str(c) for c in variational_derivative(h, "k", 4)])

# %%
for n in (3, 4):
    print(f"n={n}: tabulated gauge consistent: {gauge_residual(n).is_zero()}, "
          f"solved gauge consistent: {gauge_residual(n, source='derived').is_zero()}")
    for r in range(2, n + 1):
        print("   ", f"res L^({r}/{n + 1}):",
              lift_realization(n, hamiltonian_density(n + 1, r), source="derived"))

# %%
print("delta_kappa (n=4):", [str(c) for c in delta_kappa(4, h, "derived")])
