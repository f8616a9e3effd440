"""GHZ and the Ising chain: an exact ground state forces degeneracy.

-Z0Z1 - Z1Z2 has GHZ as an exact ground state. Every pair marginal of GHZ
is also a marginal of the rank-2 mixture (|000><000| + |111><111|)/2, so any
pairwise Hamiltonian with GHZ in its ground space has at least a two-fold
degenerate ground level.
"""

from gapbound import (assemble, degeneracy_bound_exact, diagonalize, ghz, k_local_topology, max_entropy_state,
                      named_model, overlap_with_ground)

spec = named_model("zz_chain", 3)
s = diagonalize(assemble(spec))
print(s.summary())

psi = ghz(3)
print("F =", overlap_with_ground(psi, s).fidelity)

topology = k_local_topology((2, 2, 2), 2)
res = max_entropy_state(psi, topology)
print("max-entropy eigenvalues:", res.state.eigenvalues().round(6))
print("iterations:", res.iterations, "deviation:", res.deviation)

bound = degeneracy_bound_exact(psi, topology, res.state)
print(f"degeneracy bound {bound}, actual degeneracy {s.ground_degeneracy}")

# Adding a transverse field breaks the degeneracy and moves GHZ off the ground space.
tfim = diagonalize(assemble(named_model("transverse_ising", 3, J=1.0, h=0.3)))
print("transverse field h=0.3: F =", round(overlap_with_ground(psi, tfim).fidelity, 4),
      "degeneracy", tfim.ground_degeneracy)
