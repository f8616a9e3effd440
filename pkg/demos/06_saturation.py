"""How close can a line Hamiltonian get to the toy-model bound?

A Nelder-Mead search over the coefficients of H_01 + H_12 maximizes the gap
ratio while keeping the Bell-pair overlap above a target. Along the way,
every visited point stays under (1 - F^2)/rho_2 for the maximal-entropy
member of the marginal-agreement set.

Random restarts rarely push the overlap much past 0.65 here, and the gap
ratio found stays well below the bound: the inequality is far from tight for
this state and topology.
"""

from gapbound import OptimizerConfig, line_topology, saturation_search
from gapbound.qstate import bell, embed_pair

topology = line_topology((2, 2, 2))
psi = embed_pair(bell(), (0, 2), (2, 2, 2))

for target in (0.3, 0.5, 0.65):
    res = saturation_search(psi, topology, target, OptimizerConfig(restarts=4, max_iterations=300, seed=1))
    worst = max(r * res.rho_eigenvalues[1] - (1 - f * f) for f, r in res.trajectory)
    print(f"target F {target}: F={res.fidelity:.4f} gap ratio={res.gap_ratio:.4f} "
          f"bound={res.bound:.4f} worst trajectory excess={worst:.2e}")
