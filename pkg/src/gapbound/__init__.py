"""Spectral gaps versus ground-state correlations for Hamiltonians that
respect a coupling topology.

Submodules
----------
topology     hypergraph coupling topologies
qstate       states, partial traces, Schmidt and correlation structure
hamiltonian  local-term Hamiltonians and exact diagonalization
bounds       the gap/correlation inequalities and membership checks
extremal     max-entropy members and bound-saturation search
qecc         code subspaces and the multi-level bound
cli          command-line driver
"""

from .bounds import (BoundReport, MembershipReport, check_membership, correlation_bound,
                     degeneracy_bound_exact, n_span_product, trace_inequality_bounds, trial_bound,
                     unification_bound)
from .extremal import MaxEntResult, OptimizerConfig, SaturationResult, max_entropy_state, saturation_search
from .hamiltonian import (HamiltonianSpec, LocalTerm, Spectrum, assemble, diagonalize, named_model,
                          overlap_with_ground, parse_spec, sample_random_respecting, spectrum_of)
from .qecc import CodeSubspace, five_qubit_code, kl_check, qecc_bound, singletons, subspace_agreement_check
from .qstate import (DensityMatrix, JointDistribution, PureState, correlated_decomposition,
                     dephased_correlated_state, ghz, joint_measurement_distribution, make_reference_state,
                     partial_trace, schmidt_decompose, truncate_to_perfect)
from .topology import (CouplingTopology, derive_from_error_set, k_local_topology, line_topology, parse_topology,
                       respects)

__all__ = [
    "assemble",
    "BoundReport",
    "check_membership",
    "CodeSubspace",
    "correlated_decomposition",
    "correlation_bound",
    "CouplingTopology",
    "degeneracy_bound_exact",
    "DensityMatrix",
    "dephased_correlated_state",
    "derive_from_error_set",
    "diagonalize",
    "five_qubit_code",
    "ghz",
    "HamiltonianSpec",
    "joint_measurement_distribution",
    "JointDistribution",
    "k_local_topology",
    "kl_check",
    "line_topology",
    "LocalTerm",
    "make_reference_state",
    "max_entropy_state",
    "MaxEntResult",
    "MembershipReport",
    "n_span_product",
    "named_model",
    "OptimizerConfig",
    "overlap_with_ground",
    "parse_spec",
    "parse_topology",
    "partial_trace",
    "PureState",
    "qecc_bound",
    "respects",
    "sample_random_respecting",
    "saturation_search",
    "SaturationResult",
    "schmidt_decompose",
    "singletons",
    "Spectrum",
    "spectrum_of",
    "subspace_agreement_check",
    "trace_inequality_bounds",
    "trial_bound",
    "truncate_to_perfect",
    "unification_bound",
]

__version__ = "0.1.0"
