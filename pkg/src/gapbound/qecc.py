"""Code subspaces, error-correction conditions and the multi-level bound."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .bounds import BoundReport, HypothesisError, _jsonable, default_tolerance
from .hamiltonian import Spectrum
from .operators import apply_local, pauli_string, product_basis, trace_norm
from .qstate import PureState, partial_trace_operator
from .topology import CouplingTopology, check_dims

FIVE_QUBIT_STABILIZERS = ("XZZXI", "IXZZX", "XIXZZ", "ZXIXZ")


class CodeError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class CodeSubspace:
    """Orthonormal basis (columns of ``basis``) of a code space."""

    dims: tuple[int, ...]
    basis: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        total = check_dims(dims)
        b = np.asarray(self.basis, dtype=complex)
        if b.ndim != 2 or b.shape[0] != total or b.shape[1] == 0:
            raise CodeError(f"basis must have shape ({total}, k>0), got {b.shape}")
        dev = np.max(np.abs(b.conj().T @ b - np.eye(b.shape[1])))
        if dev > 1e-10:
            raise CodeError(f"code basis is not orthonormal (Gram deviation {dev:.3g})")
        b = b.copy()
        b.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "basis", b)

    @property
    def k(self) -> int:
        return self.basis.shape[1]

    @property
    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.conj().T

    def state(self, j: int) -> PureState:
        return PureState(self.dims, self.basis[:, j])

    @classmethod
    def from_states(cls, dims: Sequence[int], vectors: Iterable) -> "CodeSubspace":
        """Orthonormalize the given vectors (Gram-Schmidt in order)."""
        mat = np.array([np.asarray(v, dtype=complex) for v in vectors]).T
        q, r = np.linalg.qr(mat)
        keep = np.abs(np.diag(r)) > 1e-10
        if not np.all(keep):
            raise CodeError("code vectors are linearly dependent")
        # fix the phase so the first vector is unchanged up to normalization
        q = q * np.sign(np.diag(r))
        return cls(tuple(dims), q)


def _stabilizer_projector(generators: Sequence[str]) -> np.ndarray:
    n = len(generators[0])
    p = np.eye(2 ** n, dtype=complex)
    for g in generators:
        if len(g) != n:
            raise CodeError("stabilizer generators have different lengths")
        p = p @ (np.eye(2 ** n) + pauli_string(g)) / 2
    return p


def code_from_stabilizers(generators: Sequence[str]) -> CodeSubspace:
    """Joint +1 eigenspace of commuting Pauli generators, with a basis taken
    by projecting computational basis states in order."""
    p = _stabilizer_projector(generators)
    n = len(generators[0])
    vecs: list[np.ndarray] = []
    for i in range(2 ** n):
        v = p[:, i].copy()
        for u in vecs:
            v -= np.vdot(u, v) * u
        norm = np.linalg.norm(v)
        if norm > 1e-8:
            vecs.append(v / norm)
    if not vecs:
        raise CodeError("stabilizer group has an empty code space")
    return CodeSubspace((2,) * n, np.array(vecs).T)


def five_qubit_code() -> CodeSubspace:
    """The [[5,1,3]] code with logical basis ``P|00000>``, ``P|11111>``."""
    p = _stabilizer_projector(FIVE_QUBIT_STABILIZERS)
    zero = p[:, 0] / np.linalg.norm(p[:, 0])
    one = p[:, -1] / np.linalg.norm(p[:, -1])
    code = CodeSubspace((2,) * 5, np.array([zero, one]).T)
    for g in FIVE_QUBIT_STABILIZERS:
        s = pauli_string(g)
        if not np.allclose(s @ code.basis, code.basis, atol=1e-12):
            raise CodeError(f"stabilizer {g} does not fix the code")
    return code


def parse_code(document: str | dict | list) -> CodeSubspace:
    """Either ``{"dims": [...], "states": [[[re, im], ...], ...]}`` or
    ``{"stabilizers": ["XZZXI", ...]}``."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise CodeError(f"malformed code JSON: {exc}") from None
    if isinstance(document, dict) and "stabilizers" in document:
        return code_from_stabilizers(document["stabilizers"])
    try:
        dims = document["dims"]
        vecs = [[complex(re, im) for re, im in state] for state in document["states"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise CodeError(f"malformed code document: {exc}") from None
    return CodeSubspace.from_states(dims, vecs)


def singletons(n: int) -> list[tuple[int]]:
    return [(i,) for i in range(n)]


@dataclass(frozen=True)
class KLReport:
    passed: bool
    worst_violation: float
    worst: dict | None
    tolerance: float
    pairs_checked: int

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict:
        return {"check": "kl", "passed": self.passed, "worst_violation": self.worst_violation,
                "worst": self.worst, "tolerance": self.tolerance, "pairs_checked": self.pairs_checked}


def kl_check(code: CodeSubspace, error_set: Iterable[Iterable[int]], tolerance: float = 1e-10) -> KLReport:
    """Check ``P A^dag B P = gamma P`` for all basis operators ``A`` on
    ``s1`` and ``B`` on ``s2``, ``s1, s2`` in the error set.

    The operators are unnormalized product Gell-Mann matrices (Pauli strings
    for qubits). The violation is ``||M - gamma I||`` in operator norm with
    ``M = <j1|A^dag B|j2>`` and ``gamma = tr(M)/k``.
    """
    sets = [tuple(sorted(set(int(v) for v in s))) for s in error_set]
    if not sets or any(not s for s in sets):
        raise CodeError("error set must be a nonempty collection of nonempty sets")
    v = code.basis
    k = code.k
    applied: dict[tuple[int, ...], list[np.ndarray]] = {}
    for s in dict.fromkeys(sets):
        ops = product_basis([code.dims[i] for i in s])
        applied[s] = [apply_local(op, s, code.dims, v) for op in ops]
    worst = 0.0
    worst_info = None
    checked = 0
    for i1, s1 in enumerate(sets):
        for i2, s2 in enumerate(sets):
            a_stack = np.array(applied[s1])
            b_stack = np.array(applied[s2])
            # m[a, b] = (A_a V)^dag (B_b V)
            m = np.einsum("xik,yil->xykl", a_stack.conj(), b_stack)
            checked += m.shape[0] * m.shape[1]
            gamma = np.trace(m, axis1=2, axis2=3) / k
            resid = m - gamma[:, :, None, None] * np.eye(k)
            norms = np.linalg.norm(resid, ord=2, axis=(2, 3)) if k > 1 else np.zeros(m.shape[:2])
            idx = np.unravel_index(np.argmax(norms), norms.shape)
            if norms[idx] > worst:
                worst = float(norms[idx])
                worst_info = {"s1": list(s1), "s2": list(s2), "A": int(idx[0]), "B": int(idx[1])}
    return KLReport(worst <= tolerance, worst, worst_info, tolerance, checked)


@dataclass(frozen=True)
class AgreementReport:
    passed: bool
    diagonal_deviation: float
    cross_term_norm: float
    worst_hyperedge: tuple[int, ...] | None
    failed_condition: str | None
    tolerance: float

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict:
        return {"check": "agreement", "passed": self.passed,
                "diagonal_deviation": self.diagonal_deviation, "cross_term_norm": self.cross_term_norm,
                "worst_hyperedge": None if self.worst_hyperedge is None else list(self.worst_hyperedge),
                "failed_condition": self.failed_condition, "tolerance": self.tolerance}


def subspace_agreement_check(code: CodeSubspace, topology: CouplingTopology,
                             tolerance: float = 1e-10) -> AgreementReport:
    """Every code state has the same marginal on every hyperedge, and every
    cross term ``tr_rest |j1><j2|`` (``j1 != j2``) vanishes in trace norm."""
    if code.dims != topology.dims:
        raise CodeError("code and topology dimensions differ")
    v = code.basis
    k = code.k
    diag_dev = cross = 0.0
    worst_e = None
    worst_score = 0.0
    for e in topology.hyperedges:
        ref = partial_trace_operator(v[:, 0], v[:, 0], code.dims, e)
        d_e = c_e = 0.0
        for j1 in range(k):
            for j2 in range(k):
                red = partial_trace_operator(v[:, j1], v[:, j2], code.dims, e)
                if j1 == j2:
                    d_e = max(d_e, trace_norm(red - ref))
                else:
                    c_e = max(c_e, trace_norm(red))
        diag_dev = max(diag_dev, d_e)
        cross = max(cross, c_e)
        if max(d_e, c_e) > worst_score:
            worst_score = max(d_e, c_e)
            worst_e = e
    failed = None
    if diag_dev > tolerance:
        failed = "diagonal"
    elif cross > tolerance:
        failed = "cross"
    return AgreementReport(failed is None, diag_dev, cross, worst_e, failed, tolerance)


def qecc_bound(spectrum: Spectrum, code: CodeSubspace, F: float, agreement: AgreementReport,
               tolerance: float | None = None) -> BoundReport:
    """``E_{k-1} - E_0 <= (1 - F^2) E_tot`` for a ``k``-dimensional code
    certified by ``agreement`` for the Hamiltonian's topology."""
    if not agreement.passed:
        raise HypothesisError("code subspace agreement was not certified")
    if not (-1e-12 <= F <= 1 + 1e-12):
        raise ValueError(f"F must lie in [0, 1], got {F!r}")
    F = min(1.0, max(0.0, F))
    k = code.k
    if k > spectrum.dim:
        raise ValueError("code dimension exceeds Hilbert-space dimension")
    inputs = {"F": F, "k": k}
    tol = default_tolerance(spectrum.e_tot) if tolerance is None else tolerance
    if spectrum.e_tot == 0.0:
        return BoundReport("qecc", 0.0, 0.0, tol, inputs, ("E_tot = 0: Hamiltonian proportional to identity",))
    lhs = float(spectrum.energies[k - 1] - spectrum.energies[0])
    rhs = (1.0 - F * F) * spectrum.e_tot
    return BoundReport("qecc", lhs, rhs, tol, inputs, ("k is a lower bound on N_space",))


def code_to_json(code: CodeSubspace) -> str:
    return json.dumps(_jsonable({"dims": list(code.dims),
                                 "states": [[[z.real, z.imag] for z in code.basis[:, j]]
                                            for j in range(code.k)]}))
