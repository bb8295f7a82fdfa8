"""Command-line front end: ``arithlat <command> [options]``.

Every command prints a report (plain text, or JSON with ``--json``) and
exits with 0 on pass, 1 on a failed or unresolved check, 2 when a resource
guard trips and 3 on bad input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import intersection, lattice, liealg, modring, qfield
from .errors import InvalidInput, SizeError, VerificationFailed, DomainError, ShapeError, SingularError
from .linalg import FieldMatrix
from .report import BUDGET_EXHAUSTED, FAIL, PASS, UNRESOLVED, Report, stopwatch

EXIT_PASS, EXIT_FAIL, EXIT_GUARD, EXIT_INPUT = 0, 1, 2, 3


def _exit_code(report: Report) -> int:
    if report.status == PASS:
        return EXIT_PASS
    if report.status == BUDGET_EXHAUSTED:
        return EXIT_GUARD
    return EXIT_FAIL


def _load_matrix(path: Optional[str]) -> Optional[FieldMatrix]:
    if path is None:
        return None
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidInput(f"cannot read {path}: {exc}") from exc
    return FieldMatrix.from_json(text)


def _failed(name: str, exc: VerificationFailed, params: dict) -> Report:
    witness = exc.witness if exc.witness is not None else {"message": str(exc)}
    return Report(name, FAIL, witness, params=params)


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def cmd_verify_units(generator: Optional[str] = None) -> Report:
    g = qfield.FieldElement.parse(generator) if generator else None
    try:
        return qfield.verify_fundamental_unit(g)
    except VerificationFailed as exc:
        return _failed("verify_fundamental_unit", exc, {"generator": generator})


NONSQUARE_TARGETS = {
    "-1": qfield.FieldElement(-1),
    "2+x^2": qfield.FieldElement(2, 0, 1),
    "-(2+x^2)": qfield.FieldElement(-2, 0, -1),
}


def cmd_verify_nonsquares(modulus: int = 4) -> Report:
    with stopwatch() as sw:
        squares = modring.all_squares(modulus)
        verdict = {name: modring.reduce(e, modulus) in squares for name, e in NONSQUARE_TARGETS.items()}
    params = {"modulus": modulus, "squares_in_ring": len(squares)}
    witness = {"is_square": verdict}
    if any(verdict.values()):
        return Report("verify_nonsquares", FAIL, witness, sw.elapsed_ms, params)
    return Report("verify_nonsquares", PASS, witness, sw.elapsed_ms, params)


def cmd_verify_lie(n: int = 3) -> Report:
    params = {"n": n}
    if n > 5:
        raise SizeError("the Lie suite is limited to n <= 5")
    with stopwatch() as sw:
        rel = liealg.ad_relations(n)
        try:
            norm = liealg.normal_coefficient_vanishes(n)
        except VerificationFailed as exc:
            return _failed("verify_lie", exc, params)
        v0 = liealg.v0_action(n)
    params.update(norm.params)
    params["ad_relations"] = {k: (str(v) if not isinstance(v, bool) else v) for k, v in rel.items()}
    params["v0_derivation_matrix"] = [[str(x) for x in r] for r in v0["matrix"]]
    if not rel["ok"]:
        return Report("verify_lie", FAIL, {"ad_relations": params["ad_relations"]}, sw.elapsed_ms, params)
    return Report("verify_lie", PASS, None, sw.elapsed_ms, params)


def cmd_verify_power_orbit(element: str = "3 2 2 2", modulus: int = 4) -> Report:
    u = qfield.FieldElement.parse(element)
    with stopwatch() as sw:
        ok = modring.no_power_hits_minus_one(u, modulus)
        orbit = modring.power_orbit(modring.reduce(u, modulus))
    params = {"element": element, "modulus": modulus}
    witness = {"orbit": [list(e.coeffs) for e in orbit]}
    return Report("power_orbit", PASS if ok else FAIL, witness, sw.elapsed_ms, params)


def cmd_pipeline(n: int = 3, gamma: Optional[FieldMatrix] = None, t: Optional[FieldMatrix] = None,
                 instance: str = "constructed", denom_bound: int = 10 ** 6) -> Report:
    if gamma is None or t is None:
        if instance == "constructed":
            g0, t0 = intersection.constructed_instance()
            g0 = g0.g
        elif instance == "degenerate":
            g0, t0 = intersection.degenerate_instance()
            g0 = g0.g
        elif instance == "identity":
            g0, t0 = FieldMatrix.identity(n), intersection.default_direction(n)
        else:
            raise InvalidInput(f"unknown instance {instance!r}")
        gamma = gamma if gamma is not None else g0
        t = t if t is not None else t0
    params = {"n": gamma.n_rows, "instance": instance, "denom_bound": denom_bound}
    with stopwatch() as sw:
        result = intersection.sign_criterion(gamma, t, lattice.LatticeSpec(gamma.n_rows), denom_bound)
    if isinstance(result, intersection.SamePositive):
        witness = {"stage": "complete", "abar": result.abar.to_dict(), "bbar": result.bbar.to_dict()}
        return Report("pipeline", PASS, witness, sw.elapsed_ms, params)
    witness = {"stage": result.stage, "reason": result.reason}
    return Report("pipeline", UNRESOLVED, witness, sw.elapsed_ms, params)


def cmd_verify_all(n: int = 3) -> list[Report]:
    """The whole suite in dependency order."""
    reports = [
        cmd_verify_units(),
        cmd_verify_nonsquares(4),
        cmd_verify_power_orbit(),
        cmd_membership(None, n),
        cmd_transversality(None),
        cmd_pipeline(3, instance="constructed"),
        cmd_verify_lie(n),
    ]
    return reports


# ---------------------------------------------------------------------------
# thin wrappers
# ---------------------------------------------------------------------------

def cmd_membership(matrix: Optional[FieldMatrix], n: int = 3) -> Report:
    with stopwatch() as sw:
        if matrix is None:
            spec = lattice.LatticeSpec(n)
            checks = {
                "identity": lattice.is_member(FieldMatrix.identity(n), spec),
                "a_generator": lattice.a_generator(spec, [1, -1] + [0] * (n - 2)).certified,
                "b_generator": lattice.b_generator(spec, FieldMatrix.identity(n - 1), 1).certified,
            }
            shear = [[1 if i == j or (i, j) == (0, 1) else 0 for j in range(n)] for i in range(n)]
            checks["shear_rejected"] = not lattice.is_member(FieldMatrix(shear), spec)
            ok = all(checks.values())
            params = {"n": n}
        else:
            spec = lattice.LatticeSpec(matrix.n_rows)
            ok = lattice.is_member(matrix, spec)
            checks = {"member": ok}
            params = {"n": matrix.n_rows}
    return Report("membership", PASS if ok else FAIL, checks, sw.elapsed_ms, params)


def cmd_reduce(matrix: FieldMatrix, modulus: int) -> Report:
    with stopwatch() as sw:
        img = lattice.reduce_matrix(matrix, modulus)
        witness = {
            "entries": [[list(e.coeffs) for e in row] for row in img.rows],
            "det": list(img.det().coeffs),
            "in_kernel": img.is_identity(),
        }
    return Report("reduce", PASS, witness, sw.elapsed_ms, {"modulus": modulus})


def cmd_solve_star(gamma: FieldMatrix, t: FieldMatrix, modulus: Optional[int] = None,
                   require_invertible: bool = False) -> Report:
    params = {"modulus": modulus, "require_invertible": require_invertible}
    with stopwatch() as sw:
        sys_ = intersection.build_star_system(gamma, t)
        basis = intersection.solution_basis(sys_)
        witness = {"dimension": len(basis), "basis": [b.to_dict() for b in basis]}
        ok = True
        if modulus is not None:
            res = intersection.find_mod_solution(sys_, modulus, require_invertible)
            witness.update({
                "solvable_mod": res.solvable,
                "clearing_factor": res.clearing_factor,
                "module_size": res.module_size,
                "scanned": res.scanned,
            })
            ok = res.solvable
    return Report("solve_star", PASS if ok else FAIL, witness, sw.elapsed_ms, params)


def cmd_enumerate(n: int, box: int, distance: float, budget: int = lattice.DEFAULT_NODE_BUDGET) -> Report:
    params = {"n": n, "box": box, "distance": distance, "budget": budget}
    with stopwatch() as sw:
        res = lattice.enumerate_members(lattice.LatticeSpec(n), box, distance, budget)
    witness = {"count": len(res), "nodes": res.nodes, "members": [m.to_dict() for m in res.members]}
    status = BUDGET_EXHAUSTED if res.budget_exhausted else PASS
    return Report("enumerate", status, witness, sw.elapsed_ms, params)


def cmd_distance(matrix: FieldMatrix, digits: int = qfield.DEFAULT_DIGITS) -> Report:
    with stopwatch() as sw:
        d = lattice.symmetric_space_distance(matrix, qfield.Embedding("PLUS", digits))
    return Report("distance", PASS, {"distance": str(d)}, sw.elapsed_ms, {"digits": digits})


def cmd_transversality(k: Optional[FieldMatrix]) -> Report:
    k = intersection.K0 if k is None else k
    with stopwatch() as sw:
        conj = liealg.conjugated_singular_vector(k)
        transverse = liealg.transversality_check(k)
    witness = {"conjugated": conj.to_dict(), "transverse": transverse}
    return Report("transversality", PASS if transverse else FAIL, witness, sw.elapsed_ms, {"n": k.n_rows})


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the report as JSON")
    common.add_argument("--out", help="also write the JSON report to this file")

    parser = argparse.ArgumentParser(prog="arithlat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run a named verification suite")
    vsub = verify.add_subparsers(dest="suite", required=True)
    p = vsub.add_parser("units", parents=[common], help="the fundamental unit")
    p.add_argument("--generator", help="alternative generator 'c0 c1 c2 c3' (negative control)")
    p = vsub.add_parser("nonsquares", parents=[common], help="non-squares modulo m")
    p.add_argument("--modulus", type=int, default=4)
    p = vsub.add_parser("lie", parents=[common], help="Lie-algebra suite")
    p.add_argument("--n", type=int, default=3)
    p = vsub.add_parser("all", parents=[common], help="every suite in order")
    p.add_argument("--n", type=int, default=3)

    p = sub.add_parser("pipeline", parents=[common], help="sign criterion end to end")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--gamma", help="JSON matrix file")
    p.add_argument("--t", help="JSON matrix file")
    p.add_argument("--instance", default="constructed", choices=["constructed", "degenerate", "identity"])
    p.add_argument("--denom-bound", type=int, default=10 ** 6)

    p = sub.add_parser("membership", parents=[common], help="lattice membership")
    p.add_argument("--matrix", help="JSON matrix file (default: built-in checks)")
    p.add_argument("--n", type=int, default=3)

    p = sub.add_parser("reduce", parents=[common], help="reduce a matrix modulo m")
    p.add_argument("--matrix", required=True)
    p.add_argument("--modulus", type=int, required=True)

    p = sub.add_parser("solve-star", parents=[common], help="solve the linear system for gamma, t")
    p.add_argument("--gamma", required=True)
    p.add_argument("--t", required=True)
    p.add_argument("--modulus", type=int)
    p.add_argument("--require-invertible", action="store_true")

    p = sub.add_parser("enumerate", parents=[common], help="bounded enumeration of members")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--box", type=int, default=1)
    p.add_argument("--distance", type=float, default=1.0)
    p.add_argument("--budget", type=int, default=lattice.DEFAULT_NODE_BUDGET)

    p = sub.add_parser("distance", parents=[common], help="symmetric-space distance")
    p.add_argument("--matrix", required=True)
    p.add_argument("--digits", type=int, default=qfield.DEFAULT_DIGITS)

    p = sub.add_parser("transversality", parents=[common], help="transversality for a rotation")
    p.add_argument("--k", help="JSON rational orthogonal matrix (default: the built-in rotation)")

    p = sub.add_parser("power-orbit", parents=[common], help="does a power of u reach -1 mod m")
    p.add_argument("--element", default="3 2 2 2")
    p.add_argument("--modulus", type=int, default=4)
    return parser


def _dispatch(args) -> list[Report]:
    cmd = args.command
    if cmd == "verify":
        if args.suite == "units":
            return [cmd_verify_units(args.generator)]
        if args.suite == "nonsquares":
            return [cmd_verify_nonsquares(args.modulus)]
        if args.suite == "lie":
            return [cmd_verify_lie(args.n)]
        return cmd_verify_all(args.n)
    if cmd == "pipeline":
        return [cmd_pipeline(args.n, _load_matrix(args.gamma), _load_matrix(args.t),
                             args.instance, args.denom_bound)]
    if cmd == "membership":
        return [cmd_membership(_load_matrix(args.matrix), args.n)]
    if cmd == "reduce":
        return [cmd_reduce(_load_matrix(args.matrix), args.modulus)]
    if cmd == "solve-star":
        return [cmd_solve_star(_load_matrix(args.gamma), _load_matrix(args.t),
                               args.modulus, args.require_invertible)]
    if cmd == "enumerate":
        return [cmd_enumerate(args.n, args.box, args.distance, args.budget)]
    if cmd == "distance":
        return [cmd_distance(_load_matrix(args.matrix), args.digits)]
    if cmd == "transversality":
        return [cmd_transversality(_load_matrix(args.k))]
    if cmd == "power-orbit":
        return [cmd_verify_power_orbit(args.element, args.modulus)]
    raise InvalidInput(f"unknown command {cmd}")  # pragma: no cover


def _render(reports: list[Report], as_json: bool) -> str:
    if as_json:
        if len(reports) == 1:
            return reports[0].to_json(indent=2)
        return json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True)
    lines = []
    width = max(len(r.check_name) for r in reports)
    for r in reports:
        lines.append(f"{r.check_name:<{width}}  {r.status.upper():<16} {r.elapsed_ms:9.1f} ms")
        if r.status != PASS and r.witness is not None:
            lines.append(f"  witness: {json.dumps(r.witness, sort_keys=True, default=str)}")
    return "\n".join(lines)


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        reports = _dispatch(args)
    except SizeError as exc:
        print(f"resource guard: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (InvalidInput, DomainError, ShapeError, SingularError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    print(_render(reports, args.json))
    if args.out:
        payload = reports[0].to_dict() if len(reports) == 1 else [r.to_dict() for r in reports]
        Path(args.out).write_text(json.dumps(payload, indent=2, sort_keys=True, default=str))
    return max(_exit_code(r) for r in reports)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
