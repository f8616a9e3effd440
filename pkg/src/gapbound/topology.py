"""Coupling topologies as hypergraphs over subsystems."""

from __future__ import annotations

import itertools
import json
import os
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Sequence

import numpy as np

if TYPE_CHECKING:
    from .hamiltonian import HamiltonianSpec

DEFAULT_DIM_CAP = 2 ** 14


class TopologyError(ValueError):
    """Malformed or inconsistent topology document."""


class DimensionCapError(ValueError):
    """Total Hilbert-space dimension exceeds the configured cap."""


def dim_cap() -> int:
    """Active dimension cap; ``GAPBOUND_DIM_CAP`` overrides the default."""
    raw = os.environ.get("GAPBOUND_DIM_CAP")
    if raw is None:
        return DEFAULT_DIM_CAP
    try:
        return int(raw)
    except ValueError:
        raise TopologyError(f"GAPBOUND_DIM_CAP must be an integer, got {raw!r}") from None


def check_dims(dims: Sequence[int], cap: int | None = None) -> int:
    """Validate local dimensions and return the total dimension."""
    cap = dim_cap() if cap is None else cap
    if len(dims) == 0:
        raise TopologyError("at least one subsystem is required")
    for d in dims:
        if int(d) != d or d < 2:
            raise TopologyError(f"local dimension must be an integer >= 2, got {d}")
    total = int(np.prod([int(d) for d in dims], dtype=object))
    if total > cap:
        raise DimensionCapError(f"total dimension {total} exceeds cap {cap}")
    return total


@dataclass(frozen=True)
class CouplingTopology:
    """Hypergraph ``G = (V, E)``: subsystems with local dimensions, and the
    subsets of subsystems that a Hamiltonian term may couple.

    Hyperedges are stored as sorted index tuples in a canonical order
    (by size, then lexicographically).
    """

    dims: tuple[int, ...]
    hyperedges: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.dims)
        check_dims(self.dims)
        seen = set()
        for e in self.hyperedges:
            if len(e) == 0:
                raise TopologyError("hyperedges must be nonempty")
            if len(set(e)) != len(e):
                raise TopologyError(f"hyperedge {list(e)} repeats a label")
            for v in e:
                if not (0 <= v < n):
                    raise TopologyError(f"hyperedge {list(e)} references unknown label {v}")
            key = tuple(sorted(e))
            if key in seen:
                raise TopologyError(f"duplicate hyperedge {list(key)}")
            seen.add(key)
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "hyperedges", _canonical(self.hyperedges))

    @classmethod
    def from_edges(cls, dims: Sequence[int], hyperedges: Iterable[Iterable[int]]) -> "CouplingTopology":
        return cls(tuple(dims), tuple(tuple(e) for e in hyperedges))

    @property
    def n_subsystems(self) -> int:
        return len(self.dims)

    @property
    def dimension(self) -> int:
        return int(np.prod(self.dims))

    def covers(self, support: Iterable[int]) -> bool:
        """True if ``support`` lies inside some hyperedge."""
        s = set(support)
        return any(s <= set(e) for e in self.hyperedges)

    def to_dict(self) -> dict:
        return {"dims": list(self.dims), "hyperedges": [list(e) for e in self.hyperedges]}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _canonical(edges) -> tuple[tuple[int, ...], ...]:
    edges = {tuple(sorted(int(v) for v in e)) for e in edges}
    return tuple(sorted(edges, key=lambda e: (len(e), e)))


def parse_topology(document: str | dict) -> CouplingTopology:
    """Build a topology from ``{"dims": [...], "hyperedges": [[...], ...]}``.

    ``document`` may be JSON text or an already-decoded mapping.
    """
    if isinstance(document, (str, bytes)):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as exc:
            raise TopologyError(f"malformed topology JSON: {exc}") from None
    if not isinstance(document, dict):
        raise TopologyError("topology document must be a JSON object")
    try:
        dims = document["dims"]
        edges = document["hyperedges"]
    except KeyError as exc:
        raise TopologyError(f"topology document missing key {exc}") from None
    if not isinstance(dims, list) or not all(isinstance(d, int) and not isinstance(d, bool) for d in dims):
        raise TopologyError("'dims' must be a list of integers")
    if not isinstance(edges, list) or not all(
        isinstance(e, list) and all(isinstance(v, int) and not isinstance(v, bool) for v in e) for e in edges
    ):
        raise TopologyError("'hyperedges' must be a list of integer lists")
    return CouplingTopology.from_edges(dims, edges)


def line_topology(dims: Sequence[int], periodic: bool = False) -> CouplingTopology:
    n = len(dims)
    edges = [(i, i + 1) for i in range(n - 1)]
    if periodic and n > 2:
        edges.append((0, n - 1))
    return CouplingTopology.from_edges(dims, edges)


def k_local_topology(dims: Sequence[int], k: int) -> CouplingTopology:
    """All hyperedges with exactly ``k`` subsystems (sub-edges are implied)."""
    n = len(dims)
    return CouplingTopology.from_edges(dims, itertools.combinations(range(n), k))


@dataclass(frozen=True)
class RespectsResult:
    respects: bool
    witness: int | None = None
    support: tuple[int, ...] | None = None

    def __bool__(self) -> bool:
        return self.respects


def respects(spec: "HamiltonianSpec", topology: CouplingTopology) -> RespectsResult:
    """Check that every term of the given decomposition sits inside a hyperedge.

    ``witness`` is the index of the first violating term.
    """
    if tuple(spec.dims) != topology.dims:
        raise TopologyError(f"spec dims {list(spec.dims)} differ from topology dims {list(topology.dims)}")
    for i, term in enumerate(spec.terms):
        expected = int(np.prod([spec.dims[s] for s in term.support]))
        if term.operator.shape != (expected, expected):
            raise TopologyError(
                f"term {i} operator shape {term.operator.shape} does not match support {list(term.support)}"
            )
        if not topology.covers(term.support):
            return RespectsResult(False, i, tuple(term.support))
    return RespectsResult(True)


def derive_from_error_set(error_set: Iterable[Iterable[int]], dims: Sequence[int]) -> CouplingTopology:
    """Topology whose hyperedges are every ``e`` inside ``s1 | s2`` for
    ``s1, s2`` in the error set, stored by the unions themselves.

    Unions contained in another union are dropped; they are implied.
    """
    sets = [frozenset(int(v) for v in s) for s in error_set]
    if not sets:
        raise TopologyError("error set must be nonempty")
    n = len(dims)
    for s in sets:
        if not s:
            raise TopologyError("error-set elements must be nonempty")
        if not all(0 <= v < n for v in s):
            raise TopologyError(f"error-set element {sorted(s)} references unknown label")
    unions = {a | b for a in sets for b in sets}
    maximal = [u for u in unions if not any(u < other for other in unions)]
    return CouplingTopology.from_edges(dims, (sorted(u) for u in maximal))
