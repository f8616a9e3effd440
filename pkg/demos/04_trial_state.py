"""A second state with the same marginals sharpens the gap bound.

For psi = Bell(0,2) (x) |0> and phi = (|00> - |11>)/sqrt(2) (x) |0>, the two
states agree on every line marginal and are orthogonal. With theta = pi/2
the gap obeys E_1 - E_0 <= (1 - F^2)/F^2 E_tot, about half of the
2(1 - F^2) E_tot obtained from the uniform mixture when F is close to 1.
"""

import math

from gapbound import (PureState, assemble, check_membership, diagonalize, line_topology, overlap_with_ground,
                      sample_random_respecting, trial_bound, unification_bound)
from gapbound.qstate import bell, embed_pair

topology = line_topology((2, 2, 2))
psi = embed_pair(bell(), (0, 2), (2, 2, 2))
phi = embed_pair(PureState.from_vector((2, 2), [1, 0, 0, -1]), (0, 2), (2, 2, 2))
print("phi agrees with psi:", check_membership(phi, psi, topology).passed)
print("<psi|phi> =", psi.overlap(phi))

print(" seed      F     gap/E_tot  trial  mixture")
shown = 0
for seed in range(500):
    s = diagonalize(assemble(sample_random_respecting(topology, seed)))
    F = overlap_with_ground(psi, s).fidelity
    if F < 0.6:
        continue
    trial = trial_bound(s, F, math.pi / 2)
    mix = unification_bound(s, [0.5, 0.5], F).inputs["gap_bound"]
    print(f"{seed:5d}  {F:.3f}  {s.gap / s.e_tot:9.4f}  {trial.rhs / s.e_tot:6.3f}  {mix / s.e_tot:6.3f}")
    shown += 1
    if shown == 8:
        break

for F in (0.9, 0.99, 0.999):
    print(f"F={F}: mixture / trial = 2F^2 = {2 * F * F:.4f}")
