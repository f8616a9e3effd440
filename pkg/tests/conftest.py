import numpy as np
import pytest

from gapbound.qstate import bell, embed_pair, ghz
from gapbound.topology import k_local_topology, line_topology


@pytest.fixture
def line3():
    return line_topology((2, 2, 2))


@pytest.fixture
def pairwise3():
    return k_local_topology((2, 2, 2), 2)


@pytest.fixture
def ghz3():
    return ghz(3)


@pytest.fixture
def bell13():
    """Bell pair on subsystems 0 and 2, |0> on subsystem 1."""
    return embed_pair(bell(), (0, 2), (2, 2, 2))


def random_hermitian(rng, d):
    m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (m + m.conj().T) / 2


def brute_partial_trace(rho, dims, keep):
    """Index-loop partial trace; deliberately slow and independent."""
    import itertools
    n = len(dims)
    keep = sorted(keep)
    traced = [i for i in range(n) if i not in keep]
    dk = int(np.prod([dims[i] for i in keep]))
    out = np.zeros((dk, dk), dtype=complex)
    kept_ranges = [range(dims[i]) for i in keep]
    tr_ranges = [range(dims[i]) for i in traced]
    for a in itertools.product(*kept_ranges):
        for b in itertools.product(*kept_ranges):
            total = 0j
            for t in itertools.product(*tr_ranges):
                ia = [0] * n
                ib = [0] * n
                for pos, i in enumerate(keep):
                    ia[i] = a[pos]
                    ib[i] = b[pos]
                for pos, i in enumerate(traced):
                    ia[i] = ib[i] = t[pos]
                total += rho[np.ravel_multi_index(ia, dims), np.ravel_multi_index(ib, dims)]
            out[np.ravel_multi_index(a, [dims[i] for i in keep]),
                np.ravel_multi_index(b, [dims[i] for i in keep])] = total
    return out


def brute_force_ghz_block(ghz3, steps=41):
    """Entropy maximum over span{|000>, |111>} states [[a, c], [c*, 1-a]]
    whose pair marginals match GHZ, found by grid search.

    Marginals are linear in (a, Re c, Im c), so the index-loop partial trace
    is evaluated once per generator and combined.
    """
    import itertools
    pairs = [(0, 1), (0, 2), (1, 2)]

    def embed(block):
        full = np.zeros((8, 8), dtype=complex)
        full[np.ix_([0, 7], [0, 7])] = block
        return full

    gens = [np.array([[1, 0], [0, -1]]), np.array([[0, 1], [1, 0]]), np.array([[0, 1j], [-1j, 0]])]
    offset = np.diag([0.0, 1.0])
    marg = {e: [brute_partial_trace(embed(g), (2, 2, 2), e) for g in [offset] + gens] for e in pairs}
    target = {e: brute_partial_trace(ghz3.density_matrix().matrix, (2, 2, 2), e) for e in pairs}
    best, best_s = None, -np.inf
    grid = np.linspace(-0.5, 0.5, steps)
    for a, re, im in itertools.product(np.linspace(0, 1, steps), grid, grid):
        block = offset + a * gens[0] + re * gens[1] + im * gens[2]
        w = np.linalg.eigvalsh(block)
        if w.min() < -1e-12:
            continue
        ok = True
        for e in pairs:
            m = marg[e][0] + a * marg[e][1] + re * marg[e][2] + im * marg[e][3]
            if np.abs(np.linalg.eigvalsh(m - target[e])).sum() > 1e-9:
                ok = False
                break
        if not ok:
            continue
        w = w[w > 1e-15]
        s = float(-(w * np.log(w)).sum())
        if s > best_s:
            best, best_s = embed(block), s
    return best
