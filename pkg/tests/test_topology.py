import itertools
import json

import pytest
from hypothesis import given, strategies as st

from gapbound.hamiltonian import HamiltonianSpec, LocalTerm, sample_random_respecting
from gapbound.topology import (CouplingTopology, DimensionCapError, TopologyError, derive_from_error_set,
                               parse_topology, respects)


def test_parse_line_topology():
    top = parse_topology('{"dims":[2,2,2],"hyperedges":[[0,1],[1,2]]}')
    assert top.dims == (2, 2, 2)
    assert top.hyperedges == ((0, 1), (1, 2))


def test_parse_three_body_hyperedge():
    top = parse_topology({"dims": [2, 2, 2], "hyperedges": [[0, 1], [0, 2], [0, 1, 2]]})
    assert (0, 1, 2) in top.hyperedges
    assert len(top.hyperedges) == 3


@pytest.mark.parametrize("doc", [
    '{"dims":[2],"hyperedges":[[0,1]]}',
    '{"dims":[1,2],"hyperedges":[[0]]}',
    '{"dims":[2,2],"hyperedges":[[0,1],[1,0]]}',
    '{"dims":[2,2],"hyperedges":[[]]}',
    '{"dims":[2,2]}',
    '{"dims":[2,2],"hyperedges":[[0,1]',
    '[1, 2]',
])
def test_parse_rejects(doc):
    with pytest.raises(TopologyError):
        parse_topology(doc)


def test_dimension_cap(monkeypatch):
    with pytest.raises(DimensionCapError):
        parse_topology({"dims": [2] * 15, "hyperedges": [[0]]})
    monkeypatch.setenv("GAPBOUND_DIM_CAP", str(2 ** 15))
    assert parse_topology({"dims": [2] * 15, "hyperedges": [[0]]}).dimension == 2 ** 15


def test_round_trip_canonical():
    top = parse_topology('{"dims":[2,3,2],"hyperedges":[[2,1],[0],[1,0]]}')
    again = parse_topology(top.to_json())
    assert again == top
    assert json.loads(top.to_json())["hyperedges"] == [[0], [0, 1], [1, 2]]


def _term(support, label):
    return LocalTerm.from_pauli(support, label)


def test_respects_line(line3):
    spec = HamiltonianSpec((2, 2, 2), (_term((0, 1), "XX"), _term((1, 2), "ZZ")))
    assert respects(spec, line3).respects


def test_respects_witness(line3):
    spec = HamiltonianSpec((2, 2, 2), (_term((0, 1), "XX"), _term((0, 2), "XX")))
    res = respects(spec, line3)
    assert not res
    assert res.witness == 1 and res.support == (0, 2)


def test_respects_sub_edge():
    top = CouplingTopology.from_edges((2, 2, 2), [(0, 1, 2)])
    spec = HamiltonianSpec((2, 2, 2), (_term((0, 1), "XX"),))
    assert respects(spec, top)


def test_respects_dimension_mismatch(line3):
    bad = HamiltonianSpec((2, 2, 2, 2), (_term((0, 1), "XX"),))
    with pytest.raises(TopologyError):
        respects(bad, line3)


def test_derive_singletons_five_qubits():
    top = derive_from_error_set([(i,) for i in range(5)], (2,) * 5)
    assert set(top.hyperedges) == set(itertools.combinations(range(5), 2))


def test_derive_single_element():
    top = derive_from_error_set([(0, 1)], (2, 2, 2))
    assert top.hyperedges == ((0, 1),)


def test_derive_brute_force_three_singletons():
    # oracle: all unions s1 | s2 enumerated by hand, then keep maximal ones
    s = [{0}, {1}, {2}]
    unions = {frozenset(a | b) for a in s for b in s}
    maximal = {tuple(sorted(u)) for u in unions if not any(u < v for v in unions)}
    assert maximal == {(0, 1), (0, 2), (1, 2)}
    assert set(derive_from_error_set(s, (2, 2, 2)).hyperedges) == maximal


def test_derive_empty():
    with pytest.raises(TopologyError):
        derive_from_error_set([], (2, 2))


edge_sets = st.sets(st.frozensets(st.integers(0, 3), min_size=1, max_size=3), min_size=1, max_size=6)


@given(edge_sets, edge_sets, st.integers(0, 2 ** 16))
def test_respects_is_monotone(e1, e2, seed):
    small = CouplingTopology.from_edges((2,) * 4, e1)
    big = CouplingTopology.from_edges((2,) * 4, e1 | e2)
    spec = sample_random_respecting(small, seed)
    assert respects(spec, small)
    assert respects(spec, big)


@given(st.sets(st.frozensets(st.integers(0, 3), min_size=1, max_size=2), min_size=1, max_size=5))
def test_derived_edges_dominate_all_unions(error_set):
    top = derive_from_error_set(error_set, (2,) * 4)
    for a in error_set:
        for b in error_set:
            assert top.covers(a | b)
