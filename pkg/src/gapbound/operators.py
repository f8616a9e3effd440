"""Operator bases and tensor-embedding helpers.

The Hermitian basis for a ``d``-level system is the generalized Gell-Mann
set, ordered as

    identity, symmetric (j<k, lexicographic), antisymmetric (j<k,
    lexicographic), diagonal (l = 1 .. d-1)

For ``d = 2`` this is exactly ``I, X, Y, Z``. Multi-site bases are tensor
products in lexicographic order over the per-site index, first site
slowest. This ordering is what makes seeded Hamiltonian samples portable.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Sequence

import numpy as np

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


@lru_cache(maxsize=None)
def _gell_mann(d: int) -> tuple[np.ndarray, ...]:
    mats = [np.eye(d, dtype=complex)]
    for j, k in itertools.combinations(range(d), 2):
        m = np.zeros((d, d), dtype=complex)
        m[j, k] = m[k, j] = 1.0
        mats.append(m)
    for j, k in itertools.combinations(range(d), 2):
        m = np.zeros((d, d), dtype=complex)
        m[j, k] = -1j
        m[k, j] = 1j
        mats.append(m)
    for l in range(1, d):
        diag = np.zeros(d)
        diag[:l] = 1.0
        diag[l] = -l
        mats.append(np.diag(diag * np.sqrt(2.0 / (l * (l + 1)))).astype(complex))
    for m in mats:
        m.setflags(write=False)
    return tuple(mats)


def local_basis(d: int, normalized: bool = False) -> list[np.ndarray]:
    """Generalized Gell-Mann basis of ``d x d`` Hermitian matrices.

    With ``normalized=False`` the non-identity elements have unit operator
    norm entries (Pauli matrices for ``d = 2``). With ``normalized=True``
    every element satisfies ``tr(A B) = delta``.
    """
    if d < 2:
        raise ValueError(f"local dimension must be >= 2, got {d}")
    mats = list(_gell_mann(d))
    if not normalized:
        return mats
    out = [mats[0] / np.sqrt(d)]
    out.extend(m / np.sqrt(2.0) for m in mats[1:])
    return out


def product_basis(dims: Sequence[int], normalized: bool = False,
                  include_identity: bool = True) -> list[np.ndarray]:
    """Tensor-product basis over several sites, first site slowest."""
    per_site = [local_basis(d, normalized) for d in dims]
    out = []
    for idx in itertools.product(*(range(len(b)) for b in per_site)):
        if not include_identity and not any(idx):
            continue
        op = np.ones((1, 1), dtype=complex)
        for site, i in enumerate(idx):
            op = np.kron(op, per_site[site][i])
        out.append(op)
    return out


def pauli_string(label: str) -> np.ndarray:
    """Dense matrix of a Pauli string such as ``"XZZXI"``."""
    op = np.ones((1, 1), dtype=complex)
    for ch in label.upper():
        try:
            op = np.kron(op, PAULI[ch])
        except KeyError:
            raise ValueError(f"invalid Pauli letter {ch!r} in {label!r}") from None
    return op


def embed(op: np.ndarray, support: Sequence[int], dims: Sequence[int]) -> np.ndarray:
    """Return ``op`` acting on ``support`` tensored with identity elsewhere.

    ``support`` may be in any order; the rows/columns of ``op`` are indexed
    by the support subsystems in that order.
    """
    dims = list(dims)
    n = len(dims)
    support = list(support)
    rest = [i for i in range(n) if i not in support]
    order = support + rest
    d_rest = int(np.prod([dims[i] for i in rest])) if rest else 1
    big = np.kron(op, np.eye(d_rest, dtype=complex))
    shape = [dims[i] for i in order]
    big = big.reshape(shape + shape)
    pos = [order.index(k) for k in range(n)]
    big = big.transpose(pos + [n + p for p in pos])
    total = int(np.prod(dims))
    return big.reshape(total, total)


def apply_local(op: np.ndarray, support: Sequence[int], dims: Sequence[int],
                vecs: np.ndarray) -> np.ndarray:
    """Apply a support-local operator to the columns of ``vecs`` without
    building the full matrix."""
    dims = list(dims)
    n = len(dims)
    support = list(support)
    vecs = np.asarray(vecs, dtype=complex)
    single = vecs.ndim == 1
    if single:
        vecs = vecs[:, None]
    k = vecs.shape[1]
    t = vecs.reshape(dims + [k])
    ds = [dims[i] for i in support]
    op_t = np.asarray(op, dtype=complex).reshape(ds + ds)
    m = len(support)
    out = np.tensordot(op_t, t, axes=(list(range(m, 2 * m)), support))
    # tensordot puts the new support axes first; move them back in place
    rest = [i for i in range(n + 1) if i not in support]
    current = support + rest
    out = np.moveaxis(out, list(range(n + 1)), current)
    out = out.reshape(-1, k)
    return out[:, 0] if single else out


def is_hermitian(m: np.ndarray, atol: float = 1e-12) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and np.allclose(m, m.conj().T, atol=atol, rtol=0)


def trace_norm(m: np.ndarray) -> float:
    """Sum of singular values."""
    m = np.asarray(m)
    if m.size == 0:
        return 0.0
    return float(np.sum(np.linalg.svd(m, compute_uv=False)))
