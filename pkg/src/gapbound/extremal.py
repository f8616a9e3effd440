"""Extremal members of the marginal-agreement set, and a search for
Hamiltonians that push the gap bounds.

Max-entropy construction
------------------------
Any state agreeing with ``psi`` on hyperedge ``e`` is supported inside
``supp(rho_e) (x) H_rest``. The intersection ``V`` of these subspaces is
computed first, and the exponential family ``exp(sum_e Lambda_e)`` is
fitted on ``V`` only. Without this reduction, states on the boundary of the
positive cone (for instance the GHZ mixture) are reachable only as a
divergent limit of the dual variables.
"""

from __future__ import annotations

import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import minimize

from .bounds import _jsonable, check_membership
from .hamiltonian import (HamiltonianSpec, diagonalize, assemble, n_coefficients, overlap_with_ground,
                          spec_from_coefficients)
from .operators import apply_local, product_basis
from .qstate import DensityMatrix, PureState, partial_trace
from .topology import CouplingTopology, respects

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class MaxEntResult:
    state: DensityMatrix
    deviation: float
    rank: int
    duals: dict[tuple[int, ...], np.ndarray]
    iterations: int
    converged: bool
    support_dim: int
    entropy: float

    def to_dict(self) -> dict:
        return {
            "rank_lower_bound": self.rank,
            "deviation": self.deviation,
            "iterations": self.iterations,
            "converged": self.converged,
            "support_dim": self.support_dim,
            "entropy": self.entropy,
            "eigenvalues": self.state.eigenvalues().tolist(),
            "duals": {",".join(map(str, e)): [[[z.real, z.imag] for z in row] for row in lam]
                      for e, lam in self.duals.items()},
            "note": "rank is a lower bound on the maximal rank over the agreement set",
        }

    def to_json(self) -> str:
        return json.dumps(_jsonable(self.to_dict()), sort_keys=True)


def agreement_support(psi: PureState, topology: CouplingTopology, threshold: float = 1e-12) -> np.ndarray:
    """Orthonormal basis (columns) of the subspace that contains the support
    of every state agreeing with ``psi`` on all hyperedges."""
    dims = psi.dims
    basis = np.eye(psi.dimension, dtype=complex)
    for e in topology.hyperedges:
        w, u = np.linalg.eigh(partial_trace(psi, e).matrix)
        kernel = u[:, w <= threshold * max(1.0, w[-1])]
        if kernel.shape[1] == 0:
            continue
        proj = kernel @ kernel.conj().T
        # keep the part of the current subspace annihilated by the kernel projector
        m = apply_local(proj, e, dims, basis)
        ns = null_space(m, rcond=1e-10)
        basis = basis @ ns
        if basis.shape[1] == 0:
            raise RuntimeError("empty agreement support; psi should always lie inside it")
    return basis


def _features(psi: PureState, topology: CouplingTopology, v: np.ndarray):
    """Compressed hyperedge basis operators and their target expectations."""
    feats, targets, owners = [], [], []
    for e in topology.hyperedges:
        for op in product_basis([psi.dims[i] for i in e], normalized=True, include_identity=False):
            applied = apply_local(op, e, psi.dims, v)
            feats.append(v.conj().T @ applied)
            targets.append(float(np.real(np.vdot(psi.amplitudes, apply_local(op, e, psi.dims, psi.amplitudes)))))
            owners.append((e, op))
    if feats:
        return np.array(feats), np.array(targets), owners
    k = v.shape[1]
    return np.zeros((0, k, k), dtype=complex), np.zeros(0), owners


def _gibbs(theta: np.ndarray, feats: np.ndarray):
    k = feats.shape[1]
    K = np.tensordot(theta, feats, axes=1) if len(theta) else np.zeros((k, k), dtype=complex)
    K = (K + K.conj().T) / 2
    w, u = np.linalg.eigh(K)
    top = w.max()
    ew = np.exp(w - top)
    z = ew.sum()
    log_z = top + math.log(z)
    sigma = (u * (ew / z)) @ u.conj().T
    return log_z, sigma


def _max_deviation(sigma_full: np.ndarray, psi: PureState, topology: CouplingTopology) -> float:
    rho = DensityMatrix(psi.dims, _clean(sigma_full))
    return check_membership(rho, psi, topology).max_deviation


def _clean(m: np.ndarray) -> np.ndarray:
    m = (m + m.conj().T) / 2
    return m / np.trace(m).real


def max_entropy_state(psi: PureState, topology: CouplingTopology, max_iterations: int = 5000,
                      tolerance: float = 1e-6, rank_threshold: float = 1e-8) -> MaxEntResult:
    """Entropy-maximizing state with the same hyperedge marginals as ``psi``.

    Fitted by gradient ascent on the concave dual (equivalently, descent on
    ``log Z(theta) - theta . t``) with Barzilai-Borwein trial steps and
    Armijo backtracking. Stops once the largest trace-norm marginal
    deviation is at most ``tolerance``; otherwise returns the last iterate
    with ``converged=False`` and its true deviation.
    """
    if tuple(psi.dims) != topology.dims:
        raise ValueError("state and topology dimensions differ")
    v = agreement_support(psi, topology)
    k = v.shape[1]
    feats, targets, owners = _features(psi, topology, v)
    theta = np.zeros(len(targets))

    def dual(th):
        log_z, sigma = _gibbs(th, feats)
        expect = np.real(np.einsum("aij,ji->a", feats, sigma))
        return log_z - th @ targets, expect - targets, sigma

    f, grad, sigma = dual(theta)
    step = 1.0
    prev_theta = prev_grad = None
    iterations = 0
    deviation = _max_deviation(v @ sigma @ v.conj().T, psi, topology)
    while deviation > tolerance and iterations < max_iterations and k > 1:
        iterations += 1
        if prev_grad is not None:
            s = theta - prev_theta
            y = grad - prev_grad
            sy = float(s @ y)
            if sy > 1e-300:
                step = float(s @ s) / sy
        step = min(max(step, 1e-8), 1e8)
        gg = float(grad @ grad)
        while True:
            cand = theta - step * grad
            fc, gc, sc = dual(cand)
            if fc <= f - 1e-4 * step * gg or step < 1e-14:
                break
            step *= 0.5
        prev_theta, prev_grad = theta, grad
        theta, f, grad, sigma = cand, fc, gc, sc
        deviation = _max_deviation(v @ sigma @ v.conj().T, psi, topology)
    converged = deviation <= tolerance
    if not converged:
        log.warning("max-entropy fit stopped at deviation %.3g after %d iterations", deviation, iterations)
    state = DensityMatrix(psi.dims, _clean(v @ sigma @ v.conj().T))
    duals: dict[tuple[int, ...], np.ndarray] = {}
    for t, (e, op) in zip(theta, owners):
        duals[e] = duals.get(e, 0) + t * op
    for e in topology.hyperedges:
        if e not in duals:
            d = int(np.prod([psi.dims[i] for i in e]))
            duals[e] = np.zeros((d, d), dtype=complex)
    return MaxEntResult(state, deviation, state.rank(rank_threshold), duals, iterations, converged, k,
                        state.entropy())


# ---------------------------------------------------------------------------
# Saturation search


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 20
    max_iterations: int = 400
    seed: int = 0
    penalty: float = 10.0
    jobs: int = 1


@dataclass(frozen=True, eq=False)
class SaturationResult:
    spec: HamiltonianSpec
    coefficients: np.ndarray
    fidelity: float
    gap_ratio: float
    bound: float
    target_fidelity: float
    rho_eigenvalues: tuple[float, ...]
    restarts: tuple[dict, ...] = field(default=())
    trajectory: tuple[tuple[float, float], ...] = field(default=())

    def to_dict(self) -> dict:
        return {"F": self.fidelity, "gap_ratio": self.gap_ratio, "bound": self.bound,
                "target_F": self.target_fidelity, "coefficients": self.coefficients.tolist(),
                "rho_eigenvalues": list(self.rho_eigenvalues), "restarts": list(self.restarts),
                "spec": self.spec.to_dict()}

    def to_json(self) -> str:
        return json.dumps(_jsonable(self.to_dict()), sort_keys=True)


def gap_and_overlap(topology: CouplingTopology, coeffs: np.ndarray, psi: PureState) -> tuple[float, float]:
    """``((E_1 - E_0)/E_tot, F)`` for the Hamiltonian with these coefficients."""
    spec = spec_from_coefficients(topology, coeffs)
    spec_ = diagonalize(assemble(spec))
    if spec_.e_tot <= 0:
        return 0.0, 1.0
    return spec_.gap / spec_.e_tot, overlap_with_ground(psi, spec_).fidelity


def implied_gap_bound(F: float, rho_eigs) -> float:
    """Largest gap ratio compatible with the unification bound: since its
    lhs is at least ``rho_2 (E_1 - E_0)``, the ratio is at most
    ``(1 - F^2) / rho_2``."""
    r = np.sort(np.asarray(rho_eigs, dtype=float))[::-1]
    if len(r) < 2 or r[1] <= 0:
        return math.inf
    return (1.0 - F * F) / r[1]


def _one_restart(index: int, psi, topology, target_f, config, n):
    rng = np.random.default_rng(config.seed + index)
    x0 = rng.standard_normal(n)
    x0 /= np.linalg.norm(x0)
    path: list[tuple[float, float]] = []

    def objective(x):
        norm = np.linalg.norm(x)
        if norm == 0:
            return 1e3
        ratio, f = gap_and_overlap(topology, x / norm, psi)
        return -(ratio - config.penalty * max(0.0, target_f - f))

    def record(xk):
        ratio, f = gap_and_overlap(topology, xk / np.linalg.norm(xk), psi)
        path.append((f, ratio))

    res = minimize(objective, x0, method="Nelder-Mead", callback=record,
                   options={"maxiter": config.max_iterations, "xatol": 1e-8, "fatol": 1e-10})
    x = res.x / np.linalg.norm(res.x)
    return index, x, float(-res.fun), path, int(res.nit)


def saturation_search(psi: PureState, topology: CouplingTopology, target_f: float,
                      config: OptimizerConfig | None = None, rho_eigs=None) -> SaturationResult:
    """Derivative-free search for a Hamiltonian respecting ``topology`` with
    a large gap ratio while keeping ``F >= target_f``.

    Coefficients are normalized to unit Euclidean norm. ``rho_eigs`` fixes
    the member whose implied gap bound is reported (default: the
    max-entropy member). Reported values are recomputed from the final spec.
    """
    config = config or OptimizerConfig()
    if not (0.0 <= target_f <= 1.0):
        raise ValueError("target F must lie in [0, 1]")
    if rho_eigs is None:
        rho_eigs = max_entropy_state(psi, topology).state.eigenvalues()
    rho_eigs = tuple(float(x) for x in np.clip(rho_eigs, 0, None))
    n = n_coefficients(topology)
    work = [(i, psi, topology, target_f, config, n) for i in range(config.restarts)]
    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            results = list(pool.map(lambda a: _one_restart(*a), work))
    else:
        results = [_one_restart(*a) for a in work]
    results.sort(key=lambda r: r[0])
    best = max(results, key=lambda r: (r[2], -r[0]))
    log_rows = tuple({"restart": i, "seed": config.seed + i, "objective": obj, "iterations": nit}
                     for i, _, obj, _, nit in results)
    trajectory = tuple(p for r in results for p in r[3])
    x = best[1]
    spec = spec_from_coefficients(topology, x)
    if not respects(spec, topology):
        raise RuntimeError("search produced a spec outside the topology")
    ratio, f = gap_and_overlap(topology, x, psi)
    return SaturationResult(spec, x, f, ratio, implied_gap_bound(f, rho_eigs), target_f, rho_eigs,
                            log_rows, trajectory)
