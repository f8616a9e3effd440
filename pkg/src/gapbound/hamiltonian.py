"""Hamiltonians built from support-local terms, and exact diagonalization."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .operators import embed, is_hermitian, pauli_string, product_basis
from .qstate import PureState
from .topology import CouplingTopology, check_dims

DEGENERACY_TOL = 1e-8
DEGENERACY_FLOOR = 1e-12


class HamiltonianError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LocalTerm:
    """Hermitian ``operator`` acting on the subsystems in ``support``.

    ``coefficients`` records the operator-basis expansion when the term was
    sampled; ``pauli`` records the string it was built from, if any.
    """

    support: tuple[int, ...]
    operator: np.ndarray
    pauli: str | None = None
    coeff: float | None = None
    coefficients: np.ndarray | None = None

    def __post_init__(self):
        support = tuple(int(s) for s in self.support)
        if len(set(support)) != len(support):
            raise HamiltonianError(f"duplicate subsystem in support {list(support)}")
        if not support:
            raise HamiltonianError("support must be nonempty")
        op = np.asarray(self.operator, dtype=complex)
        if not is_hermitian(op):
            raise HamiltonianError(f"operator on {list(support)} is not Hermitian")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "operator", op)

    @classmethod
    def from_pauli(cls, support: Sequence[int], label: str, coeff: float = 1.0) -> "LocalTerm":
        if len(label) != len(support):
            raise HamiltonianError(f"Pauli string {label!r} does not match support {list(support)}")
        return cls(tuple(support), coeff * pauli_string(label), pauli=label.upper(), coeff=float(coeff))

    def to_dict(self) -> dict:
        if self.pauli is not None:
            return {"support": list(self.support), "pauli": self.pauli, "coeff": self.coeff}
        return {"support": list(self.support),
                "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in self.operator]}


@dataclass(frozen=True, eq=False)
class HamiltonianSpec:
    dims: tuple[int, ...]
    terms: tuple[LocalTerm, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        n = len(dims)
        for t in self.terms:
            for s in t.support:
                if not (0 <= s < n):
                    raise HamiltonianError(f"term support {list(t.support)} outside {n} subsystems")
            expected = int(np.prod([dims[s] for s in t.support]))
            if t.operator.shape != (expected, expected):
                raise HamiltonianError(
                    f"operator shape {t.operator.shape} does not match support {list(t.support)}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "terms", tuple(self.terms))

    def to_dict(self) -> dict:
        return {"dims": list(self.dims), "terms": [t.to_dict() for t in self.terms]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def parse_spec(document: str | dict) -> HamiltonianSpec:
    """Read ``{"dims": [...], "terms": [{"support", "pauli", "coeff"} |
    {"support", "matrix"}]}``. Matrix entries are numbers or ``[re, im]``."""
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise HamiltonianError(f"malformed Hamiltonian JSON: {exc}") from None
    try:
        dims = document["dims"]
        raw_terms = document["terms"]
    except (KeyError, TypeError) as exc:
        raise HamiltonianError(f"Hamiltonian document missing key {exc}") from None
    terms = []
    for raw in raw_terms:
        try:
            support = raw["support"]
            if "pauli" in raw:
                terms.append(LocalTerm.from_pauli(support, raw["pauli"], float(raw.get("coeff", 1.0))))
            else:
                rows = [[complex(*z) if isinstance(z, list) else complex(z) for z in row]
                        for row in raw["matrix"]]
                terms.append(LocalTerm(tuple(support), np.array(rows, dtype=complex)))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, HamiltonianError):
                raise
            raise HamiltonianError(f"malformed term {raw!r}: {exc}") from None
    return HamiltonianSpec(tuple(dims), tuple(terms))


def assemble(spec: HamiltonianSpec) -> np.ndarray:
    """Dense matrix of ``sum_terms op (x) identity``."""
    total = check_dims(spec.dims)
    h = np.zeros((total, total), dtype=complex)
    for t in spec.terms:
        h += embed(t.operator, t.support, spec.dims)
    return (h + h.conj().T) / 2


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Full ascending eigensystem of a Hamiltonian.

    ``vectors[:, j]`` is the eigenvector for ``energies[j]``.
    """

    energies: np.ndarray
    vectors: np.ndarray
    ground_degeneracy: int
    degeneracy_tol: float

    @property
    def dim(self) -> int:
        return self.energies.shape[0]

    @property
    def e0(self) -> float:
        return float(self.energies[0])

    @property
    def e_max(self) -> float:
        return float(self.energies[-1])

    @property
    def e_tot(self) -> float:
        return float(self.energies[-1] - self.energies[0])

    @property
    def gap(self) -> float:
        """``E_1 - E_0`` (zero when the ground level is degenerate)."""
        if self.dim < 2:
            return 0.0
        return float(self.energies[1] - self.energies[0])

    @property
    def ground_vectors(self) -> np.ndarray:
        return self.vectors[:, :self.ground_degeneracy]

    @property
    def ground_projector(self) -> np.ndarray:
        g = self.ground_vectors
        return g @ g.conj().T

    def summary(self) -> dict:
        return {"E0": self.e0, "E1": float(self.energies[1]) if self.dim > 1 else self.e0,
                "gap": self.gap, "E_tot": self.e_tot,
                "ground_degeneracy": self.ground_degeneracy, "dim": self.dim}


def diagonalize(h: np.ndarray, degeneracy_tol: float = DEGENERACY_TOL) -> Spectrum:
    """Dense Hermitian eigendecomposition.

    Levels with ``E_j - E_0 <= degeneracy_tol * max(E_tot, 1e-12)`` count
    as ground states.
    """
    h = np.asarray(h, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise HamiltonianError(f"expected a square matrix, got shape {h.shape}")
    if not is_hermitian(h, atol=1e-10 * max(1.0, float(np.max(np.abs(h))) if h.size else 1.0)):
        raise HamiltonianError("matrix is not Hermitian")
    h = (h + h.conj().T) / 2
    try:
        w, v = np.linalg.eigh(h)
    except np.linalg.LinAlgError as exc:
        cond = np.linalg.cond(h) if np.all(np.isfinite(h)) else float("nan")
        raise HamiltonianError(f"eigensolver failed ({exc}); condition number {cond:.3g}") from exc
    e_tot = w[-1] - w[0]
    cut = degeneracy_tol * max(e_tot, DEGENERACY_FLOOR)
    deg = int(np.sum(w - w[0] <= cut))
    w.setflags(write=False)
    v.setflags(write=False)
    return Spectrum(w, v, deg, degeneracy_tol)


def spectrum_of(spec: HamiltonianSpec, degeneracy_tol: float = DEGENERACY_TOL) -> Spectrum:
    return diagonalize(assemble(spec), degeneracy_tol)


@dataclass(frozen=True)
class Overlap:
    """Overlap ``F`` of a state with the ground space, and the normalized
    projected ground state (``None`` when ``F`` vanishes)."""

    fidelity: float
    projected: PureState | None


def overlap_with_ground(psi: PureState, spectrum: Spectrum) -> Overlap:
    """``F = sqrt(<psi|P0|psi>)`` with ``P0`` the ground-space projector."""
    if psi.dimension != spectrum.dim:
        raise HamiltonianError(f"state dimension {psi.dimension} != spectrum dimension {spectrum.dim}")
    g = spectrum.ground_vectors
    c = g.conj().T @ psi.amplitudes
    weight = float(np.real(np.vdot(c, c)))
    f = float(np.sqrt(min(1.0, max(0.0, weight))))
    projected = None
    if f > 1e-12:
        projected = PureState.from_vector(psi.dims, g @ c)
    return Overlap(f, projected)


def sample_random_respecting(topology: CouplingTopology, seed: int, scale: float = 1.0) -> HamiltonianSpec:
    """One random term per hyperedge.

    Each term is ``sum_a c_a B_a`` over the trace-orthonormal product
    Gell-Mann basis of the hyperedge without the identity element, with
    ``c_a`` i.i.d. standard normal times ``scale``. Hyperedges are visited in
    canonical order and coefficients drawn in basis order.
    """
    rng = np.random.default_rng(seed)
    terms = []
    for e in topology.hyperedges:
        basis = product_basis([topology.dims[i] for i in e], normalized=True, include_identity=False)
        coeffs = rng.standard_normal(len(basis)) * scale
        op = np.tensordot(coeffs, np.array(basis), axes=1)
        terms.append(LocalTerm(e, op, coefficients=coeffs))
    return HamiltonianSpec(topology.dims, tuple(terms))


def spec_from_coefficients(topology: CouplingTopology, coeffs: np.ndarray) -> HamiltonianSpec:
    """Inverse of the sampler layout: stacked coefficients -> spec."""
    coeffs = np.asarray(coeffs, dtype=float)
    terms = []
    offset = 0
    for e in topology.hyperedges:
        basis = product_basis([topology.dims[i] for i in e], normalized=True, include_identity=False)
        c = coeffs[offset:offset + len(basis)]
        if len(c) != len(basis):
            raise HamiltonianError("coefficient vector too short for topology")
        offset += len(basis)
        terms.append(LocalTerm(e, np.tensordot(c, np.array(basis), axes=1), coefficients=c.copy()))
    if offset != len(coeffs):
        raise HamiltonianError("coefficient vector too long for topology")
    return HamiltonianSpec(topology.dims, tuple(terms))


def n_coefficients(topology: CouplingTopology) -> int:
    return sum(int(np.prod([topology.dims[i] for i in e])) ** 2 - 1 for e in topology.hyperedges)


def _bonds(n: int, boundary: str) -> list[tuple[int, int]]:
    if boundary not in ("open", "periodic"):
        raise HamiltonianError(f"boundary must be 'open' or 'periodic', got {boundary!r}")
    bonds = [(i, i + 1) for i in range(n - 1)]
    if boundary == "periodic" and n > 2:
        bonds.append((0, n - 1))
    return bonds


def named_model(name: str, n: int, J: float = 1.0, h: float = 1.0, boundary: str = "open") -> HamiltonianSpec:
    """Qubit chains: ``heisenberg_chain`` ``J sum (XX+YY+ZZ)``,
    ``transverse_ising`` ``-J sum ZZ - h sum X``, ``zz_chain`` ``-sum ZZ``."""
    if n < 2:
        raise HamiltonianError("chains need at least two sites")
    dims = (2,) * n
    check_dims(dims)
    bonds = _bonds(n, boundary)
    terms: list[LocalTerm] = []
    if name == "heisenberg_chain":
        for b in bonds:
            terms.extend(LocalTerm.from_pauli(b, p, J) for p in ("XX", "YY", "ZZ"))
    elif name == "transverse_ising":
        terms.extend(LocalTerm.from_pauli(b, "ZZ", -J) for b in bonds)
        terms.extend(LocalTerm.from_pauli((i,), "X", -h) for i in range(n))
    elif name == "zz_chain":
        terms.extend(LocalTerm.from_pauli(b, "ZZ", -1.0) for b in bonds)
    else:
        raise HamiltonianError(f"unknown model {name!r}")
    return HamiltonianSpec(dims, tuple(terms))
