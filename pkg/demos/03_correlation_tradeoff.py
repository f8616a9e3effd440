"""Matched-outcome correlation between uncoupled qubits limits the gap.

For a ground state psi of a line Hamiltonian, measure qubits 0 and 2 in the
computational basis. With C the probability of matched outcomes and F = 1,
the matched probabilities weighted by excitation energies are at most
C(1 - C) E_tot: both perfect correlation and perfect anticorrelation leave
no room for an excited-state weight.
"""

import numpy as np

from gapbound import (PureState, assemble, correlation_bound, diagonalize, joint_measurement_distribution,
                      line_topology, sample_random_respecting)

topology = line_topology((2, 2, 2))
rows = []
for seed in range(400):
    s = diagonalize(assemble(sample_random_respecting(topology, seed)))
    ground = PureState((2, 2, 2), s.vectors[:, 0])
    joint = joint_measurement_distribution(ground, [0], [2])
    rep = correlation_bound(s, joint, 1.0)
    rows.append((joint.correlation, rep.lhs / s.e_tot, rep.rhs / s.e_tot))

rows = np.array(rows)
print("   C bin     max lhs/E_tot   max rhs/E_tot")
for lo in np.arange(0, 1, 0.2):
    sel = (rows[:, 0] >= lo) & (rows[:, 0] < lo + 0.2)
    if sel.any():
        print(f"  [{lo:.1f},{lo + 0.2:.1f})  {rows[sel, 1].max():12.4f}  {rows[sel, 2].max():14.4f}")
print("violations:", int(np.sum(rows[:, 1] > rows[:, 2] + 1e-9)))
