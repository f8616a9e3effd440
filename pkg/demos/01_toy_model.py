"""Three qubits on a line, with qubits 0 and 2 sharing a Bell pair.

No Hamiltonian with only 0-1 and 1-2 couplings can have this state as a
non-degenerate ground state. The quantitative version: whatever the
couplings, (E_1 - E_0)/E_tot <= 2(1 - F^2), where F is the overlap of the
state with the ground space.
"""

import numpy as np

from gapbound import (assemble, check_membership, correlated_decomposition, dephased_correlated_state,
                      diagonalize, line_topology, overlap_with_ground, sample_random_respecting, unification_bound)
from gapbound.qstate import bell, embed_pair

topology = line_topology((2, 2, 2))
psi = embed_pair(bell(), (0, 2), (2, 2, 2))

# The dephased state (|000><000| + |101><101|)/2 has the same 0-1 and 1-2
# marginals as psi. That is the only fact the bound needs.
rho = dephased_correlated_state(correlated_decomposition(psi, [0], [2]))
print("membership:", check_membership(rho, psi, topology).to_dict())
print("rho eigenvalues:", np.round(rho.eigenvalues()[:3], 6))

ratios, allowed = [], []
for seed in range(300):
    s = diagonalize(assemble(sample_random_respecting(topology, seed)))
    F = overlap_with_ground(psi, s).fidelity
    rep = unification_bound(s, rho.eigenvalues(), F)
    assert rep.satisfied
    ratios.append(s.gap / s.e_tot)
    allowed.append(rep.inputs["gap_bound"] / s.e_tot)

ratios, allowed = np.array(ratios), np.array(allowed)
print(f"seeds: {len(ratios)}")
print(f"largest gap ratio seen      {ratios.max():.4f}")
print(f"smallest headroom 2(1-F^2) - ratio  {np.min(allowed - ratios):.4f}")

# Hamiltonians whose ground state is close to psi must have a small gap.
close = allowed < 1.5
print(f"seeds with 2(1-F^2) < 1.5: {close.sum()}, their max gap ratio {ratios[close].max(initial=0):.4f}")
