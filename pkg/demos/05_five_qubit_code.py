"""The five-qubit code and multi-level gap bounds.

Correcting every single-qubit error is equivalent to all code states sharing
their two-qubit marginals, with vanishing cross terms. Any pairwise
Hamiltonian then has its two lowest levels within (1 - F^2) E_tot of each
other whenever a code state has ground-space overlap F.
"""

import numpy as np

from gapbound import (assemble, diagonalize, five_qubit_code, k_local_topology, kl_check, overlap_with_ground,
                      qecc_bound, sample_random_respecting, singletons, subspace_agreement_check)
from gapbound.qecc import CodeSubspace

code = five_qubit_code()
pairwise = k_local_topology((2,) * 5, 2)
print("error correction:", kl_check(code, singletons(5)).to_dict())
agreement = subspace_agreement_check(code, pairwise)
print("marginal agreement:", agreement.to_dict())

# The repetition code protects against bit flips only; both checks fail.
rep = CodeSubspace((2, 2, 2), np.eye(8)[:, [0, 7]])
print("span{000,111}: kl", kl_check(rep, singletons(3)).passed,
      "agreement", subspace_agreement_check(rep, k_local_topology((2, 2, 2), 2)).passed)

worst = np.inf
for seed in range(100):
    s = diagonalize(assemble(sample_random_respecting(pairwise, seed)))
    F = overlap_with_ground(code.state(0), s).fidelity
    r = qecc_bound(s, code, F, agreement)
    worst = min(worst, r.slack / s.e_tot)
print(f"100 random pairwise Hamiltonians, min slack / E_tot = {worst:.4f}")
