"""Pure states, density matrices, partial traces and the correlation
structure between two subsystem groups.

Throughout, a *tripartition* names two disjoint subsystem groups,
``system1`` and ``system3``; everything else is ``system2``. Groups may be
aggregates of several elementary subsystems.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.stats import unitary_group

from .topology import check_dims

NORM_TOL = 1e-12
ABSENT_THRESHOLD = 1e-12


class StateError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class PureState:
    dims: tuple[int, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        total = check_dims(dims)
        amp = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amp.shape[0] != total:
            raise StateError(f"expected {total} amplitudes for dims {list(dims)}, got {amp.shape[0]}")
        norm = np.linalg.norm(amp)
        if abs(norm - 1.0) > NORM_TOL:
            raise StateError(f"state is not normalized (norm {norm!r})")
        amp = amp.copy()
        amp.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "amplitudes", amp)

    @classmethod
    def from_vector(cls, dims: Sequence[int], vec) -> "PureState":
        """Normalize ``vec`` and wrap it."""
        vec = np.asarray(vec, dtype=complex).reshape(-1)
        norm = np.linalg.norm(vec)
        if norm == 0:
            raise StateError("zero vector cannot be normalized")
        return cls(tuple(dims), vec / norm)

    @property
    def dimension(self) -> int:
        return self.amplitudes.shape[0]

    def density_matrix(self) -> "DensityMatrix":
        return DensityMatrix(self.dims, np.outer(self.amplitudes, self.amplitudes.conj()))

    def overlap(self, other: "PureState") -> complex:
        """``<self|other>``"""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def to_dict(self) -> dict:
        return {"dims": list(self.dims),
                "amplitudes": [[float(a.real), float(a.imag)] for a in self.amplitudes]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, doc: dict) -> "PureState":
        try:
            dims = doc["dims"]
            amps = np.array([complex(re, im) for re, im in doc["amplitudes"]])
        except (KeyError, TypeError, ValueError) as exc:
            raise StateError(f"malformed state document: {exc}") from None
        return cls.from_vector(dims, amps)

    @classmethod
    def from_json(cls, text: str) -> "PureState":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise StateError(f"malformed state JSON: {exc}") from None


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    dims: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        total = check_dims(dims) if len(dims) else 1
        m = np.asarray(self.matrix, dtype=complex)
        if m.shape != (total, total):
            raise StateError(f"expected {total}x{total} matrix, got {m.shape}")
        if not np.allclose(m, m.conj().T, atol=1e-12, rtol=0):
            raise StateError("density matrix is not Hermitian")
        m = (m + m.conj().T) / 2
        tr = np.trace(m).real
        if abs(tr - 1.0) > 1e-12:
            raise StateError(f"density matrix trace is {tr!r}, expected 1")
        low = np.linalg.eigvalsh(m)[0]
        if low < -1e-10:
            raise StateError(f"density matrix has negative eigenvalue {low!r}")
        m.setflags(write=False)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", m)

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues in descending order."""
        return np.linalg.eigvalsh(self.matrix)[::-1]

    def rank(self, rel_threshold: float = 1e-8) -> int:
        w = self.eigenvalues()
        return int(np.sum(w > rel_threshold * w[0]))

    def entropy(self) -> float:
        """Von Neumann entropy in nats."""
        w = self.eigenvalues()
        w = w[w > 1e-300]
        return float(-np.sum(w * np.log(w)))


def _keep_list(keep, n: int) -> list[int]:
    keep = sorted({int(k) for k in keep})
    if not keep:
        raise StateError("keep must be nonempty")
    for k in keep:
        if not (0 <= k < n):
            raise StateError(f"unknown subsystem {k}")
    return keep


def partial_trace_operator(ket: np.ndarray, bra: np.ndarray, dims: Sequence[int], keep) -> np.ndarray:
    """``tr_{not keep} |ket><bra|`` for vectors over ``dims``."""
    dims = list(dims)
    keep = _keep_list(keep, len(dims))
    traced = [i for i in range(len(dims)) if i not in keep]
    a = np.asarray(ket, dtype=complex).reshape(dims)
    b = np.asarray(bra, dtype=complex).reshape(dims)
    out = np.tensordot(a, b.conj(), axes=(traced, traced))
    dk = int(np.prod([dims[i] for i in keep]))
    return out.reshape(dk, dk)


def partial_trace(state: PureState | DensityMatrix, keep) -> DensityMatrix:
    """Reduced density matrix on ``keep`` (subsystem order preserved)."""
    dims = list(state.dims)
    n = len(dims)
    keep = _keep_list(keep, n)
    kept_dims = tuple(dims[i] for i in keep)
    if isinstance(state, PureState):
        red = partial_trace_operator(state.amplitudes, state.amplitudes, dims, keep)
    else:
        traced = [i for i in range(n) if i not in keep]
        t = state.matrix.reshape(dims + dims)
        # contract each traced ket axis with its bra partner
        letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
        if 2 * n > len(letters):
            raise StateError("too many subsystems for partial trace")
        ket_idx = list(letters[:n])
        bra_idx = list(letters[n:2 * n])
        for i in traced:
            bra_idx[i] = ket_idx[i]
        out_idx = "".join(ket_idx[i] for i in keep) + "".join(bra_idx[i] for i in keep)
        red = np.einsum("".join(ket_idx) + "".join(bra_idx) + "->" + out_idx, t)
        dk = int(np.prod(kept_dims))
        red = red.reshape(dk, dk)
    return DensityMatrix(kept_dims, red)


# ---------------------------------------------------------------------------
# Schmidt structure


@dataclass(frozen=True, eq=False)
class SchmidtData:
    """Schmidt decomposition across a bipartition ``left | right``."""

    left: tuple[int, ...]
    right: tuple[int, ...]
    coefficients: np.ndarray
    left_basis: np.ndarray
    right_basis: np.ndarray
    degeneracies: tuple[int, ...]
    group_tolerance: float

    @property
    def probabilities(self) -> np.ndarray:
        return self.coefficients ** 2

    @property
    def schmidt_number(self) -> int:
        return int(sum(self.degeneracies))


def _group_degeneracies(values: np.ndarray, rel_tol: float, zero: float) -> tuple[int, ...]:
    groups: list[int] = []
    anchor = None
    for v in values:
        if v <= zero:
            break
        if anchor is not None and abs(anchor - v) <= rel_tol * anchor:
            groups[-1] += 1
        else:
            groups.append(1)
            anchor = v
    return tuple(groups)


def schmidt_decompose(psi: PureState, left, group_tolerance: float = 1e-8) -> SchmidtData:
    """Schmidt decomposition of ``psi`` between ``left`` and the complement.

    ``degeneracies`` groups the nonzero coefficients (descending) whose
    relative spread is within ``group_tolerance``; coefficients with
    ``p_j <= 1e-12`` are treated as zero.
    """
    n = len(psi.dims)
    left = tuple(_keep_list(left, n))
    right = tuple(i for i in range(n) if i not in left)
    if not right:
        raise StateError("bipartition needs two nonempty groups")
    dl = int(np.prod([psi.dims[i] for i in left]))
    mat = psi.amplitudes.reshape(psi.dims).transpose(left + right).reshape(dl, -1)
    u, s, vh = np.linalg.svd(mat, full_matrices=False)
    degs = _group_degeneracies(s, group_tolerance, np.sqrt(ABSENT_THRESHOLD))
    return SchmidtData(left, right, s, u, vh.T, degs, group_tolerance)


# ---------------------------------------------------------------------------
# Joint measurement statistics between system 1 and system 3


@dataclass(frozen=True)
class Tripartition:
    """Permutation bookkeeping for ``system1 | system2 | system3``."""

    dims: tuple[int, ...]
    system1: tuple[int, ...]
    system3: tuple[int, ...]

    def __post_init__(self):
        n = len(self.dims)
        s1 = tuple(sorted(self.system1))
        s3 = tuple(sorted(self.system3))
        if not s1 or not s3:
            raise StateError("system1 and system3 must be nonempty")
        if set(s1) & set(s3):
            raise StateError("system1 and system3 overlap")
        for v in s1 + s3:
            if not (0 <= v < n):
                raise StateError(f"unknown subsystem {v}")
        object.__setattr__(self, "system1", s1)
        object.__setattr__(self, "system3", s3)

    @property
    def system2(self) -> tuple[int, ...]:
        used = set(self.system1) | set(self.system3)
        return tuple(i for i in range(len(self.dims)) if i not in used)

    @property
    def order(self) -> list[int]:
        return list(self.system1) + list(self.system2) + list(self.system3)

    def group_dims(self) -> tuple[int, int, int]:
        d = self.dims
        return (int(np.prod([d[i] for i in self.system1])),
                int(np.prod([d[i] for i in self.system2])) if self.system2 else 1,
                int(np.prod([d[i] for i in self.system3])))

    def to_tensor(self, vec: np.ndarray) -> np.ndarray:
        """Natural-order vector -> array of shape ``(d1, d2, d3)``."""
        return np.asarray(vec).reshape(self.dims).transpose(self.order).reshape(self.group_dims())

    def from_tensor(self, t: np.ndarray) -> np.ndarray:
        """Inverse of :meth:`to_tensor`."""
        order = self.order
        t = np.asarray(t).reshape([self.dims[i] for i in order])
        inv = [order.index(k) for k in range(len(self.dims))]
        return t.transpose(inv).reshape(-1)


def _check_basis(basis, d: int, name: str) -> np.ndarray:
    b = np.eye(d, dtype=complex) if basis is None else np.asarray(basis, dtype=complex)
    if b.shape != (d, d):
        raise StateError(f"{name} must be a {d}x{d} matrix of column vectors, got {b.shape}")
    dev = np.max(np.abs(b.conj().T @ b - np.eye(d)))
    if dev > 1e-10:
        raise StateError(f"{name} is not orthonormal (Gram deviation {dev:.3g})")
    return b


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """``p[j, k]``: probability of outcome ``j`` on system 1 and ``k`` on
    system 3. ``assignment`` lists matched ``(j, k)`` outcome pairs."""

    p: np.ndarray
    assignment: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if np.any(self.p < -1e-15):
            raise StateError("negative probability")
        if abs(self.p.sum() - 1.0) > 1e-10:
            raise StateError(f"joint distribution sums to {self.p.sum()!r}")

    @property
    def matched(self) -> np.ndarray:
        """Probabilities of matched outcomes, in assignment order."""
        return np.array([self.p[j, k] for j, k in self.assignment])

    @property
    def correlation(self) -> float:
        """C: probability that the two outcomes match."""
        return float(min(1.0, max(0.0, self.matched.sum())))


def _amplitude_tensor(psi: PureState, part: Tripartition, basis1, basis3):
    d1, _, d3 = part.group_dims()
    b1 = _check_basis(basis1, d1, "basis1")
    b3 = _check_basis(basis3, d3, "basis3")
    t = part.to_tensor(psi.amplitudes)
    amp = np.einsum("aj,amb,bk->jmk", b1.conj(), t, b3.conj())
    return amp, b1, b3


def _assignment(p: np.ndarray, policy: str) -> tuple[tuple[int, int], ...]:
    d1, d3 = p.shape
    if policy == "identity":
        return tuple((j, j) for j in range(min(d1, d3)))
    if policy == "maximize":
        rows, cols = linear_sum_assignment(-p)
        return tuple(sorted((int(r), int(c)) for r, c in zip(rows, cols)))
    raise StateError(f"unknown assignment policy {policy!r}")


def joint_measurement_distribution(psi: PureState, system1, system3, basis1=None, basis3=None,
                                   assignment: str = "identity") -> JointDistribution:
    """Outcome statistics for local measurements on systems 1 and 3.

    Bases are given as matrices whose columns are the measurement vectors
    (computational basis when omitted). ``assignment="maximize"`` matches
    outcomes so as to maximize the agreement probability.
    """
    part = Tripartition(psi.dims, tuple(system1), tuple(system3))
    amp, _, _ = _amplitude_tensor(psi, part, basis1, basis3)
    p = np.sum(np.abs(amp) ** 2, axis=1)
    return JointDistribution(p, _assignment(p, assignment))


@dataclass(frozen=True, eq=False)
class CorrelatedDecomposition:
    """``psi = sum_jk sqrt(p_jk) |j>|e_jk>|k>`` with respect to local bases.

    ``middle[j, k]`` is the normalized middle-system state, or ``None``
    when ``p[j, k]`` is below the absent threshold.
    """

    partition: Tripartition
    basis1: np.ndarray
    basis3: np.ndarray
    p: np.ndarray
    middle: tuple[tuple[np.ndarray | None, ...], ...]
    assignment: tuple[tuple[int, int], ...]
    threshold: float = ABSENT_THRESHOLD

    def weighted_middle(self, j: int, k: int) -> np.ndarray:
        e = self.middle[j][k]
        d2 = self.partition.group_dims()[1]
        if e is None:
            return np.zeros(d2, dtype=complex)
        return np.sqrt(self.p[j, k]) * e

    def _product(self, j: int, k: int, mid: np.ndarray) -> np.ndarray:
        t = np.einsum("a,m,b->amb", self.basis1[:, j], mid, self.basis3[:, k])
        return self.partition.from_tensor(t)

    def reconstruct(self) -> np.ndarray:
        d1, d2, d3 = self.partition.group_dims()
        out = np.zeros(d1 * d2 * d3, dtype=complex)
        for j in range(d1):
            for k in range(d3):
                if self.middle[j][k] is not None:
                    out += self._product(j, k, self.weighted_middle(j, k))
        return out

    @property
    def correlation(self) -> float:
        return float(sum(self.p[j, k] for j, k in self.assignment))

    def is_perfect(self, tol: float = 1e-10) -> bool:
        matched = set(self.assignment)
        off = sum(self.p[j, k] for j in range(self.p.shape[0]) for k in range(self.p.shape[1])
                  if (j, k) not in matched)
        return off < tol


def correlated_decomposition(psi: PureState, system1, system3, basis1=None, basis3=None,
                             assignment: str = "identity",
                             threshold: float = ABSENT_THRESHOLD) -> CorrelatedDecomposition:
    part = Tripartition(psi.dims, tuple(system1), tuple(system3))
    amp, b1, b3 = _amplitude_tensor(psi, part, basis1, basis3)
    p = np.sum(np.abs(amp) ** 2, axis=1)
    middle = tuple(
        tuple(amp[j, :, k] / np.sqrt(p[j, k]) if p[j, k] > threshold else None
              for k in range(p.shape[1]))
        for j in range(p.shape[0])
    )
    return CorrelatedDecomposition(part, b1, b3, p, middle, _assignment(p, assignment), threshold)


def truncate_to_perfect(decomp: CorrelatedDecomposition) -> tuple[PureState, float]:
    """Keep only the matched-outcome terms and renormalize.

    Returns ``(psi_prime, C)``; ``|<psi'|psi>|^2 = C``.
    """
    c = decomp.correlation
    if c <= ABSENT_THRESHOLD:
        raise StateError("no correlated component: C is zero")
    vec = np.zeros(int(np.prod(decomp.partition.dims)), dtype=complex)
    for j, k in decomp.assignment:
        if decomp.middle[j][k] is not None:
            vec += decomp._product(j, k, decomp.weighted_middle(j, k))
    return PureState.from_vector(decomp.partition.dims, vec), c


def dephased_correlated_state(decomp: CorrelatedDecomposition, tol: float = 1e-10) -> DensityMatrix:
    """``sum_j p_jj |j><j| (x) |e_jj><e_jj| (x) |j><j|`` for a perfectly
    correlated decomposition."""
    if not decomp.is_perfect(tol):
        raise StateError("decomposition is not perfectly correlated; call truncate_to_perfect first")
    dim = int(np.prod(decomp.partition.dims))
    rho = np.zeros((dim, dim), dtype=complex)
    for j, k in decomp.assignment:
        if decomp.middle[j][k] is not None:
            v = decomp._product(j, k, decomp.weighted_middle(j, k))
            rho += np.outer(v, v.conj())
    rho /= np.trace(rho).real
    return DensityMatrix(decomp.partition.dims, rho)


# ---------------------------------------------------------------------------
# Reference states


def basis_state(dims: Sequence[int], digits: Sequence[int]) -> PureState:
    dims = tuple(dims)
    if len(digits) != len(dims) or any(not (0 <= x < d) for x, d in zip(digits, dims)):
        raise StateError(f"invalid basis digits {list(digits)} for dims {list(dims)}")
    vec = np.zeros(int(np.prod(dims)), dtype=complex)
    vec[np.ravel_multi_index(tuple(digits), dims)] = 1.0
    return PureState(dims, vec)


def product_state(factors: Sequence[np.ndarray]) -> PureState:
    vec = np.ones(1, dtype=complex)
    dims = []
    for f in factors:
        f = np.asarray(f, dtype=complex)
        vec = np.kron(vec, f / np.linalg.norm(f))
        dims.append(f.shape[0])
    return PureState.from_vector(dims, vec)


def max_entangled(d: int = 2) -> PureState:
    """``sum_j |jj> / sqrt(d)``."""
    if d < 2:
        raise StateError("dimension must be >= 2")
    vec = np.eye(d, dtype=complex).reshape(-1) / np.sqrt(d)
    return PureState((d, d), vec)


def bell() -> PureState:
    return max_entangled(2)


def ghz(n: int, d: int = 2) -> PureState:
    if n < 2:
        raise StateError("GHZ needs at least two subsystems")
    dims = (d,) * n
    vec = np.zeros(d ** n, dtype=complex)
    for j in range(d):
        vec[np.ravel_multi_index((j,) * n, dims)] = 1.0
    return PureState.from_vector(dims, vec)


def haar_random(dims: Sequence[int], seed: int) -> PureState:
    rng = np.random.default_rng(seed)
    total = int(np.prod(dims))
    vec = rng.standard_normal(total) + 1j * rng.standard_normal(total)
    return PureState.from_vector(dims, vec)


def embed_pair(pair_state: PureState, sites: tuple[int, int], dims: Sequence[int],
               others=None) -> PureState:
    """Place a two-site state on ``sites``; remaining sites get the
    product ``others`` (list of vectors, default ``|0>`` each)."""
    dims = tuple(dims)
    n = len(dims)
    rest = [i for i in range(n) if i not in sites]
    if others is None:
        others = [np.eye(dims[i], dtype=complex)[0] for i in rest]
    vec = pair_state.amplitudes
    for o in others:
        vec = np.kron(vec, np.asarray(o, dtype=complex) / np.linalg.norm(o))
    order = list(sites) + rest
    t = vec.reshape([dims[i] for i in order])
    t = t.transpose([order.index(k) for k in range(n)])
    return PureState(dims, t.reshape(-1))


def random_local_unitary(dims: Sequence[int], seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    u = np.ones((1, 1), dtype=complex)
    for d in dims:
        u = np.kron(u, unitary_group.rvs(d, random_state=rng))
    return u


def make_reference_state(kind: str, **params) -> PureState:
    """Named constructors: ``bell``, ``max_entangled`` (d), ``ghz`` (n, d),
    ``product`` (dims, digits), ``haar`` (dims, seed), ``bell_pair``
    (dims, sites)."""
    if kind == "bell":
        return bell()
    if kind == "max_entangled":
        return max_entangled(int(params.get("d", 2)))
    if kind == "ghz":
        return ghz(int(params["n"]), int(params.get("d", 2)))
    if kind == "product":
        return basis_state(params["dims"], params["digits"])
    if kind == "haar":
        return haar_random(params["dims"], int(params["seed"]))
    if kind == "bell_pair":
        dims = params["dims"]
        return embed_pair(bell(), tuple(params.get("sites", (0, len(dims) - 1))), dims)
    raise StateError(f"unknown reference state {kind!r}")
