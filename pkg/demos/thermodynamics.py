"""Thermodynamic bookkeeping for the two-qubit, three-bath system.

With the exact detailed-balance rates the unified generator keeps the Gibbs
state of the reference Hamiltonian fixed when all baths share a temperature.
With three different temperatures it drives a steady heat flow from hot to
cold, and the entropy production stays non-negative along the way.
"""

import numpy as np

from unified_qme import TimeGrid, build, builtin_two_qubit_three_bath, entropy_production, gibbs_state, propagate
from unified_qme import stationarity_residual

for gamma in ("exact_kms", "high_temp"):
    spec = builtin_two_qubit_three_bath(temperatures=(300, 300, 300), gamma=gamma)
    split = spec.split()
    g = build("unified", split, spec.coupling_operators(), spec.bath_descriptors())
    rho_b = gibbs_state(split.h0, spec.bath_descriptors()[0].beta)
    print(f"{gamma:<10} baths at 300 K: ||L rho_beta||_1 = {stationarity_residual(g, rho_b):.2e}")

spec = builtin_two_qubit_three_bath(temperatures=(300, 400, 350), gamma="exact_kms")
split = spec.split()
baths = spec.bath_descriptors()
g = build("unified", split, spec.coupling_operators(), baths)
traj = propagate(g, spec.initial_state(), TimeGrid.spanning(20000.0, 4.0))
ep = entropy_production(traj, g, {b.label: b.beta for b in baths})

print(f"\nthree temperatures: min entropy production {ep.min_sigma:.3e} cm^-1")
print("heat current into each bath at 20 ps (cm^-2):")
for b in baths:
    print(f"  {b.label} ({b.meta['temperature']:.0f} K): {ep.heat_currents[b.label][-1]: .4e}")
total = sum(v[-1] for v in ep.heat_currents.values())
print(f"  sum: {total:.2e}  (steady state: energy is conserved)")
print(f"entropy production at 20 ps: {ep.sigma[-1]:.4e}, approached from {np.max(ep.sigma):.3e}")
