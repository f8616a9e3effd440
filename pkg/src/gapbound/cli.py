"""Command-line driver: ``gapbound {spectrum,sweep,maxent,saturate,qecc-check}``.

Exit codes: 0 success, 2 parse error, 3 dimension cap, 4 hypothesis
failure, 5 check failure.

State recipes (``--state``):

    ghz                 GHZ on all subsystems of the topology
    bell:I,J            Bell pair on subsystems I, J; |0> elsewhere
    product:0,1,0       computational basis state
    haar:SEED           Haar-random state
    code5:J             logical basis state J of the five-qubit code
    file:PATH           JSON state ``{"dims": [...], "amplitudes": [[re, im], ...]}``
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import bounds, extremal, qecc
from .bounds import BoundError, BoundReport, HypothesisError, _jsonable
from .hamiltonian import (HamiltonianError, HamiltonianSpec, assemble, diagonalize, named_model,
                          overlap_with_ground, parse_spec, sample_random_respecting)
from .qstate import (PureState, StateError, basis_state, bell, correlated_decomposition,
                     dephased_correlated_state, embed_pair, ghz, haar_random, joint_measurement_distribution)
from .topology import (CouplingTopology, DimensionCapError, TopologyError, derive_from_error_set,
                       k_local_topology, parse_topology, respects)

CSV_VERSION = "gapbound-sweep v1"

EXIT_OK, EXIT_PARSE, EXIT_CAP, EXIT_HYPOTHESIS, EXIT_CHECK = 0, 2, 3, 4, 5


class CLIError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


# ---------------------------------------------------------------------------
# argument helpers


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise CLIError(f"cannot read {path}: {exc}", EXIT_PARSE) from None


def parse_seeds(text: str) -> range:
    """``A..B`` inclusive, or a single integer."""
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            seeds = range(int(a), int(b) + 1)
        else:
            seeds = range(int(text), int(text) + 1)
    except ValueError:
        raise CLIError(f"invalid seed range {text!r}", EXIT_PARSE) from None
    if len(seeds) == 0:
        raise CLIError(f"empty seed range {text!r}", EXIT_PARSE)
    return seeds


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise CLIError(f"expected comma-separated integers, got {text!r}", EXIT_PARSE) from None


def build_state(recipe: str, dims) -> PureState:
    kind, _, arg = recipe.partition(":")
    dims = tuple(dims)
    try:
        if kind == "ghz":
            if len(set(dims)) != 1:
                raise CLIError("ghz needs equal local dimensions", EXIT_PARSE)
            return ghz(len(dims), dims[0])
        if kind == "bell":
            sites = _int_list(arg) if arg else [0, len(dims) - 1]
            if len(sites) != 2 or dims[sites[0]] != 2 or dims[sites[1]] != 2:
                raise CLIError("bell:I,J needs two qubit sites", EXIT_PARSE)
            return embed_pair(bell(), (sites[0], sites[1]), dims)
        if kind == "product":
            return basis_state(dims, _int_list(arg))
        if kind == "haar":
            return haar_random(dims, int(arg))
        if kind == "code5":
            code = qecc.five_qubit_code()
            if dims != code.dims:
                raise CLIError("code5 needs a five-qubit topology", EXIT_PARSE)
            return code.state(int(arg or 0))
        if kind == "file":
            psi = PureState.from_json(_read(arg))
            if psi.dims != dims:
                raise CLIError("state dims differ from topology dims", EXIT_PARSE)
            return psi
    except (StateError, ValueError, IndexError) as exc:
        if isinstance(exc, CLIError):
            raise
        raise CLIError(f"bad state recipe {recipe!r}: {exc}", EXIT_PARSE) from None
    raise CLIError(f"unknown state recipe {recipe!r}", EXIT_PARSE)


def load_topology(path: str) -> CouplingTopology:
    return parse_topology(_read(path))


def load_code(text: str) -> qecc.CodeSubspace:
    if text == "five_qubit":
        return qecc.five_qubit_code()
    return qecc.parse_code(_read(text))


def error_set(text: str, n: int) -> list[tuple[int, ...]]:
    if text == "singletons":
        return qecc.singletons(n)
    if text == "pairs":
        return [tuple(e) for e in k_local_topology((2,) * n, 2).hyperedges]
    try:
        doc = json.loads(_read(text))
        return [tuple(int(v) for v in s) for s in doc]
    except (json.JSONDecodeError, TypeError, ValueError) as exc:
        raise CLIError(f"malformed error set: {exc}", EXIT_PARSE) from None


def _dump(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=2)


# ---------------------------------------------------------------------------
# commands


def cmd_spectrum(args, out) -> int:
    spec = parse_spec(_read(args.spec))
    s = diagonalize(assemble(spec), args.degeneracy_tol)
    summary = s.summary()
    if s.e_tot == 0.0:
        summary["note"] = "E_tot = 0: every level is degenerate with the ground level"
    if args.json:
        out.write(_dump(summary) + "\n")
    else:
        for key in ("E0", "E1", "gap", "E_tot", "ground_degeneracy", "dim"):
            out.write(f"{key}: {summary[key]!r}\n")
        if "note" in summary:
            out.write(f"note: {summary['note']}\n")
    return EXIT_OK


class SweepContext:
    """Seed-independent inputs of a sweep, certified once up front."""

    def __init__(self, args):
        self.args = args
        self.topology = load_topology(args.topology)
        self.dims = self.topology.dims
        self.bounds = [b.strip() for b in args.bound.split(",")]
        for b in self.bounds:
            if b not in ("unification", "correlation", "trial", "qecc"):
                raise CLIError(f"unknown bound {b!r}", EXIT_PARSE)
        self.fixed_spec: HamiltonianSpec | None = None
        if args.model:
            self.fixed_spec = _parse_model(args.model)
        elif args.spec:
            self.fixed_spec = parse_spec(_read(args.spec))
        if self.fixed_spec is not None:
            verdict = respects(self.fixed_spec, self.topology)
            if not verdict:
                raise CLIError(f"Hamiltonian term {verdict.witness} violates the topology", EXIT_HYPOTHESIS)
        self.system1 = _int_list(args.system1) if args.system1 else [0]
        self.system3 = _int_list(args.system3) if args.system3 else [len(self.dims) - 1]
        self.code = None
        if "qecc" in self.bounds:
            self.code = load_code(args.code)
            if self.code.dims != self.dims:
                raise CLIError("code dims differ from topology dims", EXIT_PARSE)
            agreement = qecc.subspace_agreement_check(self.code, self.topology, args.cert_tol)
            if not agreement.passed:
                raise CLIError("code subspace agreement failed for this topology", EXIT_HYPOTHESIS)
            self.agreement = agreement
        self.psi = build_state(args.state, self.dims) if args.state else (
            self.code.state(0) if self.code is not None else None)
        if self.psi is None:
            raise CLIError("--state is required", EXIT_PARSE)
        self.rho_eigs = None
        if "unification" in self.bounds:
            self.rho_eigs = self._certified_rho()
        self.theta = None
        if "trial" in self.bounds:
            if not args.phi:
                raise CLIError("--phi is required for the trial bound", EXIT_PARSE)
            phi = build_state(args.phi, self.dims)
            rep = bounds.check_membership(phi, self.psi, self.topology, args.cert_tol)
            if not rep.passed:
                raise CLIError("phi does not agree with psi on all hyperedges", EXIT_HYPOTHESIS)
            self.theta = math.acos(min(1.0, abs(self.psi.overlap(phi))))

    def _certified_rho(self):
        kind = self.args.rho
        if kind == "pure":
            rho = self.psi.density_matrix()
        elif kind == "dephased":
            try:
                dec = correlated_decomposition(self.psi, self.system1, self.system3)
                rho = dephased_correlated_state(dec)
            except StateError as exc:
                raise CLIError(f"dephased member unavailable: {exc}", EXIT_HYPOTHESIS) from None
        elif kind == "maxent":
            res = extremal.max_entropy_state(self.psi, self.topology)
            rho = res.state
        else:
            raise CLIError(f"unknown --rho {kind!r}", EXIT_PARSE)
        rep = bounds.check_membership(rho, self.psi, self.topology, self.args.cert_tol)
        if not rep.passed:
            raise CLIError(f"rho membership failed (deviation {rep.max_deviation:.3g})", EXIT_HYPOTHESIS)
        return rho.eigenvalues()

    def run_seed(self, seed: int) -> list[BoundReport]:
        spec = self.fixed_spec or sample_random_respecting(self.topology, seed, self.args.scale)
        s = diagonalize(assemble(spec))
        F = overlap_with_ground(self.psi, s).fidelity
        tol = self.args.tol
        reports = []
        for b in self.bounds:
            if b == "unification":
                reports.append(bounds.unification_bound(s, self.rho_eigs, F, tol))
            elif b == "correlation":
                joint = joint_measurement_distribution(self.psi, self.system1, self.system3,
                                                       assignment=self.args.assignment)
                reports.append(bounds.correlation_bound(s, joint, F, tol))
            elif b == "trial":
                reports.append(bounds.trial_bound(s, F, self.theta, tol))
            elif b == "qecc":
                reports.append(qecc.qecc_bound(s, self.code, F, self.agreement, tol))
        return reports


def _parse_model(text: str) -> HamiltonianSpec:
    """``name:n[,J[,h]][:periodic]``"""
    parts = text.split(":")
    try:
        nums = [float(x) for x in parts[1].split(",")] if len(parts) > 1 else []
        n = int(nums[0])
        kw = {}
        if len(nums) > 1:
            kw["J"] = nums[1]
        if len(nums) > 2:
            kw["h"] = nums[2]
        boundary = parts[2] if len(parts) > 2 else "open"
        return named_model(parts[0], n, boundary=boundary, **kw)
    except (IndexError, ValueError) as exc:
        if isinstance(exc, HamiltonianError):
            raise
        raise CLIError(f"bad model {text!r}; expected name:n[,J[,h]][:periodic]", EXIT_PARSE) from None


def sweep_rows(ctx: SweepContext, seeds, jobs: int = 1) -> list[tuple[int, BoundReport]]:
    """Reports in seed order regardless of completion order."""
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            per_seed = list(pool.map(ctx.run_seed, seeds))
    else:
        per_seed = [ctx.run_seed(s) for s in seeds]
    return [(seed, rep) for seed, reps in zip(seeds, per_seed) for rep in reps]


def cmd_sweep(args, out) -> int:
    ctx = SweepContext(args)
    seeds = parse_seeds(args.seeds)
    rows = sweep_rows(ctx, seeds, args.jobs)
    violations = sum(not r.satisfied for _, r in rows)
    finite = [r.slack for _, r in rows if not math.isinf(r.slack)]
    min_slack = min(finite) if finite else None
    if args.json:
        doc = {"version": CSV_VERSION,
               "rows": [dict(r.to_dict(), seed=seed) for seed, r in rows],
               "summary": {"rows": len(rows), "violations": violations, "min_slack": min_slack}}
        out.write(_dump(doc) + "\n")
    else:
        buf = io.StringIO()
        buf.write(f"# {CSV_VERSION}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(bounds.CSV_COLUMNS)
        for seed, r in rows:
            w.writerow(r.csv_row(seed))
        buf.write(f"# rows={len(rows)} violations={violations} min_slack={min_slack!r}\n")
        out.write(buf.getvalue())
    return EXIT_OK if violations == 0 else EXIT_CHECK


def cmd_maxent(args, out) -> int:
    topology = load_topology(args.topology)
    psi = build_state(args.state, topology.dims)
    res = extremal.max_entropy_state(psi, topology, args.max_iterations, args.tol)
    doc = res.to_dict()
    doc["membership"] = bounds.check_membership(res.state, psi, topology, max(args.tol, 1e-8)).to_dict()
    out.write(_dump(doc) + "\n")
    return EXIT_OK if res.converged else EXIT_CHECK


def cmd_saturate(args, out) -> int:
    topology = load_topology(args.topology)
    psi = build_state(args.state, topology.dims)
    config = extremal.OptimizerConfig(restarts=args.restarts, max_iterations=args.max_iterations,
                                      seed=args.seed, penalty=args.penalty, jobs=args.jobs)
    res = extremal.saturation_search(psi, topology, args.target_f, config)
    out.write(res.to_json() + "\n")
    return EXIT_OK if res.gap_ratio <= res.bound + 1e-8 else EXIT_CHECK


def cmd_qecc_check(args, out) -> int:
    code = load_code(args.code)
    n = len(code.dims)
    errors = error_set(args.errors, n)
    kl = qecc.kl_check(code, errors, args.tol)
    topology = load_topology(args.topology) if args.topology else derive_from_error_set(errors, code.dims)
    agreement = qecc.subspace_agreement_check(code, topology, args.tol)
    doc = {"k": code.k, "error_set": [list(s) for s in errors], "topology": topology.to_dict(),
           "kl": kl.to_dict(), "agreement": agreement.to_dict(),
           "passed": kl.passed and agreement.passed}
    out.write(_dump(doc) + "\n")
    return EXIT_OK if doc["passed"] else EXIT_CHECK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gapbound", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("spectrum", help="diagonalize a Hamiltonian spec file")
    sp.add_argument("spec")
    sp.add_argument("--json", action="store_true")
    sp.add_argument("--degeneracy-tol", type=float, default=1e-8)
    sp.set_defaults(func=cmd_spectrum)

    sw = sub.add_parser("sweep", help="evaluate bounds over seeded random Hamiltonians")
    sw.add_argument("--topology", required=True)
    sw.add_argument("--state", help="state recipe (see module docs)")
    sw.add_argument("--seeds", default="0")
    sw.add_argument("--bound", default="unification",
                    help="comma-separated: unification, correlation, trial, qecc")
    sw.add_argument("--rho", default="maxent", choices=["maxent", "dephased", "pure"])
    sw.add_argument("--phi", help="state recipe for the trial bound")
    sw.add_argument("--code", default="five_qubit", help="five_qubit or a code JSON file")
    sw.add_argument("--model", help="named model instead of random: name:n[,J[,h]][:periodic]")
    sw.add_argument("--spec", help="Hamiltonian spec file instead of random")
    sw.add_argument("--system1", help="comma-separated subsystems of system 1")
    sw.add_argument("--system3", help="comma-separated subsystems of system 3")
    sw.add_argument("--assignment", default="identity", choices=["identity", "maximize"])
    sw.add_argument("--scale", type=float, default=1.0)
    sw.add_argument("--tol", type=float, default=None, help="satisfaction tolerance")
    sw.add_argument("--cert-tol", type=float, default=1e-8, help="hypothesis certification tolerance")
    sw.add_argument("--jobs", type=int, default=1)
    sw.add_argument("--json", action="store_true")
    sw.add_argument("--output")
    sw.set_defaults(func=cmd_sweep)

    me = sub.add_parser("maxent", help="max-entropy member of the agreement set")
    me.add_argument("--topology", required=True)
    me.add_argument("--state", required=True)
    me.add_argument("--tol", type=float, default=1e-6)
    me.add_argument("--max-iterations", type=int, default=5000)
    me.add_argument("--json", action="store_true", help="accepted for symmetry; output is always JSON")
    me.add_argument("--output")
    me.set_defaults(func=cmd_maxent)

    sa = sub.add_parser("saturate", help="search for gap-maximizing Hamiltonians")
    sa.add_argument("--topology", required=True)
    sa.add_argument("--state", required=True)
    sa.add_argument("--target-f", type=float, default=0.95)
    sa.add_argument("--restarts", type=int, default=20)
    sa.add_argument("--max-iterations", type=int, default=400)
    sa.add_argument("--seed", type=int, default=0)
    sa.add_argument("--penalty", type=float, default=10.0)
    sa.add_argument("--jobs", type=int, default=1)
    sa.add_argument("--json", action="store_true", help="accepted for symmetry; output is always JSON")
    sa.add_argument("--output")
    sa.set_defaults(func=cmd_saturate)

    qc = sub.add_parser("qecc-check", help="error-correction and agreement checks for a code")
    qc.add_argument("--code", default="five_qubit")
    qc.add_argument("--errors", default="singletons", help="singletons, pairs, or a JSON file")
    qc.add_argument("--topology", help="defaults to the topology derived from the error set")
    qc.add_argument("--tol", type=float, default=1e-10)
    qc.add_argument("--json", action="store_true", help="accepted for symmetry; output is always JSON")
    qc.add_argument("--output")
    qc.set_defaults(func=cmd_qecc_check)
    return p


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    out = io.StringIO()
    try:
        code = args.func(args, out)
    except CLIError as exc:
        stderr.write(f"gapbound: {exc}\n")
        return exc.code
    except DimensionCapError as exc:
        stderr.write(f"gapbound: {exc}\n")
        return EXIT_CAP
    except HypothesisError as exc:
        stderr.write(f"gapbound: {exc}\n")
        return EXIT_HYPOTHESIS
    except (TopologyError, HamiltonianError, StateError, qecc.CodeError, BoundError) as exc:
        stderr.write(f"gapbound: {exc}\n")
        return EXIT_PARSE
    text = out.getvalue()
    if getattr(args, "output", None):
        Path(args.output).write_text(text)
    else:
        stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
