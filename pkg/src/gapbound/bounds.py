"""Gap-versus-correlation inequalities evaluated on concrete spectra.

Every evaluator is a pure formula. Certifying its hypotheses (membership
of ``rho`` in the marginal-agreement set, the angle between ``psi`` and
``phi``, exactness of a ground state) is the caller's job; the helpers
:func:`check_membership` and :func:`~gapbound.qecc.subspace_agreement_check`
exist for that.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from .hamiltonian import Spectrum
from .operators import trace_norm
from .qstate import DensityMatrix, JointDistribution, PureState, SchmidtData, partial_trace
from .topology import CouplingTopology

CSV_COLUMNS = ("boundName", "seed", "F", "C", "theta", "lhs", "rhs", "slack", "satisfied")


class BoundError(ValueError):
    pass


class HypothesisError(BoundError):
    """A bound's precondition was not certified."""


def default_tolerance(e_tot: float) -> float:
    return 1e-9 * max(e_tot, 1.0)


@dataclass(frozen=True)
class BoundReport:
    bound: str
    lhs: float
    rhs: float
    tolerance: float
    inputs: dict[str, Any] = field(default_factory=dict)
    notes: tuple[str, ...] = ()

    @property
    def slack(self) -> float:
        if math.isinf(self.rhs):
            return math.inf
        return self.rhs - self.lhs

    @property
    def satisfied(self) -> bool:
        return self.slack >= -self.tolerance

    def to_dict(self) -> dict:
        d = asdict(self)
        d["slack"] = self.slack
        d["satisfied"] = self.satisfied
        d["notes"] = list(self.notes)
        return d

    def to_json(self) -> str:
        return json.dumps(_jsonable(self.to_dict()), sort_keys=True)

    def csv_row(self, seed: int | None = None) -> list[str]:
        def fmt(x):
            return "" if x is None else repr(float(x))
        return [self.bound, "" if seed is None else str(seed), fmt(self.inputs.get("F")),
                fmt(self.inputs.get("C")), fmt(self.inputs.get("theta")), fmt(self.lhs),
                fmt(self.rhs), fmt(self.slack), str(self.satisfied).lower()]


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return _jsonable(x.tolist())
    if isinstance(x, (np.floating, float)):
        x = float(x)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, np.integer):
        return int(x)
    return x


def _check_prob(name: str, x: float) -> float:
    if not (-1e-12 <= x <= 1 + 1e-12):
        raise BoundError(f"{name} must lie in [0, 1], got {x!r}")
    return min(1.0, max(0.0, float(x)))


def trace_inequality_bounds(a: np.ndarray, b: np.ndarray) -> tuple[float, float, float]:
    """``(lambda(A)desc . lambda(B)asc, lambda(A)desc . lambda(B)desc, tr(AB))``.

    For Hermitian ``A``, ``B`` the middle value is bracketed by the outer two.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise BoundError(f"dimension mismatch: {a.shape} vs {b.shape}")
    la = np.linalg.eigvalsh(a)[::-1]
    lb = np.linalg.eigvalsh(b)
    lower = float(la @ lb)
    upper = float(la @ lb[::-1])
    tr = float(np.real(np.einsum("ij,ji->", a, b)))
    return lower, upper, tr


# ---------------------------------------------------------------------------
# Membership in R_G(psi)


@dataclass(frozen=True)
class MembershipReport:
    deviations: dict[tuple[int, ...], float]
    tolerance: float

    @property
    def max_deviation(self) -> float:
        return max(self.deviations.values(), default=0.0)

    @property
    def passed(self) -> bool:
        return all(v <= self.tolerance for v in self.deviations.values())

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict:
        return {"deviations": {",".join(map(str, e)): v for e, v in self.deviations.items()},
                "max_deviation": self.max_deviation, "tolerance": self.tolerance,
                "passed": self.passed}


def check_membership(rho: DensityMatrix | PureState, psi: PureState, topology: CouplingTopology,
                     tolerance: float = 1e-8) -> MembershipReport:
    """Trace-norm distance between the marginals of ``rho`` and ``psi`` on
    every hyperedge."""
    if tuple(rho.dims) != tuple(psi.dims) or tuple(psi.dims) != topology.dims:
        raise BoundError("state and topology dimensions differ")
    devs = {}
    for e in topology.hyperedges:
        devs[e] = trace_norm(partial_trace(rho, e).matrix - partial_trace(psi, e).matrix)
    return MembershipReport(devs, tolerance)


# ---------------------------------------------------------------------------
# Energy bounds


def _sorted_probs(values, name: str) -> np.ndarray:
    v = np.sort(np.asarray(values, dtype=float))[::-1]
    if np.any(v < -1e-10) or np.any(v > 1 + 1e-10):
        raise BoundError(f"{name} entries must lie in [0, 1]")
    return np.clip(v, 0.0, 1.0)


def _zero_scale(name: str, inputs: dict, spectrum: Spectrum, tolerance: float | None) -> BoundReport | None:
    if spectrum.e_tot == 0.0:
        tol = default_tolerance(0.0) if tolerance is None else tolerance
        return BoundReport(name, 0.0, 0.0, tol, inputs, ("E_tot = 0: Hamiltonian proportional to identity",))
    return None


def unification_bound(spectrum: Spectrum, rho_eigs, F: float, tolerance: float | None = None) -> BoundReport:
    """``sum_j (E_j - E_0) rho_{j+1} <= (1 - F^2) E_tot``.

    ``rho_eigs`` are the eigenvalues of a state agreeing with ``psi`` on
    every hyperedge; they are sorted descending here.
    """
    F = _check_prob("F", F)
    rho = _sorted_probs(rho_eigs, "rho eigenvalues")
    if abs(rho.sum() - 1.0) > 1e-10:
        raise BoundError(f"rho eigenvalues sum to {rho.sum()!r}")
    if len(rho) > spectrum.dim:
        raise BoundError(f"{len(rho)} eigenvalues for a {spectrum.dim}-dimensional space")
    inputs = {"F": F, "rho_eigenvalues": rho[rho > 0].tolist()}
    if len(rho) > 1 and rho[1] > 0:
        # lhs >= rho_2 (E_1 - E_0), so the gap is at most rhs / rho_2
        inputs["gap_bound"] = (1.0 - F * F) * spectrum.e_tot / rho[1]
    z = _zero_scale("unification", inputs, spectrum, tolerance)
    if z is not None:
        return z
    e = spectrum.energies
    lhs = float(np.sum((e[:len(rho)] - e[0]) * rho))
    rhs = (1.0 - F * F) * spectrum.e_tot
    tol = default_tolerance(spectrum.e_tot) if tolerance is None else tolerance
    return BoundReport("unification", lhs, rhs, tol, inputs)


def correlation_bound(spectrum: Spectrum, joint: JointDistribution, F: float,
                      tolerance: float | None = None) -> BoundReport:
    """``sum_j p_{j+1,j+1} (E_j - E_0) <= C (sqrt(1-C) + sqrt(1-F^2))^2 E_tot``
    with matched-outcome probabilities sorted descending."""
    F = _check_prob("F", F)
    diag = _sorted_probs(joint.matched, "matched probabilities")
    c = joint.correlation
    notes = []
    if F == 1.0:
        notes.append("F = 1: rhs reduces to C(1-C)E_tot")
    if abs(c - 1.0) <= 1e-12:
        notes.append("C = 1: rhs reduces to (1-F^2)E_tot")
    inputs = {"F": F, "C": c, "matched": diag.tolist()}
    z = _zero_scale("correlation", inputs, spectrum, tolerance)
    if z is not None:
        return z
    e = spectrum.energies
    m = min(len(diag), spectrum.dim)
    lhs = float(np.sum(diag[:m] * (e[:m] - e[0])))
    rhs = c * (math.sqrt(max(0.0, 1.0 - c)) + math.sqrt(max(0.0, 1.0 - F * F))) ** 2 * spectrum.e_tot
    tol = default_tolerance(spectrum.e_tot) if tolerance is None else tolerance
    return BoundReport("correlation", lhs, rhs, tol, inputs, tuple(notes))


def trial_g(theta: float, F: float) -> float:
    """``g(theta, F) = 1 - (F cos(theta) + sqrt(1-F^2) sin(theta))^2``"""
    return 1.0 - (F * math.cos(theta) + math.sqrt(max(0.0, 1.0 - F * F)) * math.sin(theta)) ** 2


def trial_bound(spectrum: Spectrum, F: float, theta: float, tolerance: float | None = None) -> BoundReport:
    """``E_1 - E_0 <= (1 - F^2) / g(theta, F) E_tot`` for a second state at
    angle ``theta`` from ``psi`` with the same hyperedge marginals."""
    F = _check_prob("F", F)
    if not (-1e-12 <= theta <= math.pi / 2 + 1e-12):
        raise BoundError(f"theta must lie in [0, pi/2], got {theta!r}")
    theta = min(math.pi / 2, max(0.0, theta))
    g = trial_g(theta, F)
    inputs = {"F": F, "theta": theta, "g": g}
    z = _zero_scale("trial", inputs, spectrum, tolerance)
    if z is not None:
        return z
    tol = default_tolerance(spectrum.e_tot) if tolerance is None else tolerance
    if g <= 1e-12:
        return BoundReport("trial", spectrum.gap, math.inf, tol, inputs, ("vacuous: g(theta, F) vanishes",))
    rhs = (1.0 - F * F) / g * spectrum.e_tot
    return BoundReport("trial", spectrum.gap, rhs, tol, inputs)


def n_span_product(schmidt: SchmidtData) -> int:
    """``sum_k d_k^2`` over groups of equal nonzero Schmidt coefficients."""
    return int(sum(d * d for d in schmidt.degeneracies))


def degeneracy_bound_exact(psi: PureState, topology: CouplingTopology, rho: DensityMatrix,
                           rank_threshold: float = 1e-8, membership_tolerance: float = 1e-8) -> int:
    """Lower bound on the ground degeneracy of any Hamiltonian respecting
    ``topology`` that has ``psi`` as an exact ground state: the rank of a
    certified member ``rho``."""
    report = check_membership(rho, psi, topology, membership_tolerance)
    if not report.passed:
        raise HypothesisError(f"rho does not agree with psi on all hyperedges "
                              f"(max deviation {report.max_deviation:.3g})")
    return rho.rank(rank_threshold)
