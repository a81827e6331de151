"""Command-line front end.

Exit status: 0 when every requested equality holds, 1 when a verification
fails, 2 on malformed or out-of-scope input.
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from .battery import battery_texts
from .chern import (ConventionError, ScopeError, calibrate, chern_local, scope_guard,
                    verify_cardy, verify_hrr)
from .ext import (ExtError, NotGradable, ext_basis, ext_dims_graded, hom_complex,
                  is_closed)
from .mf import MFError
from .milnor import (hessian_residue, milnor_ring, rational_det, residue,
                     residue_pairing_matrix)
from .poly import ParseError
from .problem import ProblemError, parse_problem

OK, FAILED, BAD_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _load(path: str):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return parse_problem(text)
    except (ProblemError, ParseError, MFError) as exc:
        raise InputError(f"{path}: {exc}") from exc


def _run_request(job):
    """Worker entry point: ``(problem text, request index, method)`` -> report dict."""
    text, index, method = job
    pf = parse_problem(text)
    kind, a, b = pf.requests[index]
    label = f"{pf.name}: {a} {b}" if pf.name else f"{a} {b}"
    if kind == "verify":
        report = verify_hrr(pf.mfs[a], pf.mfs[b], method, name=label)
    else:
        (pa, alpha), (pb, beta) = pf.endos[a], pf.endos[b]
        report = verify_cardy(alpha, beta, pf.mfs[pa], pf.mfs[pb], method, name=label)
    return report.to_dict()


def _jobs_for(texts, kinds, method):
    jobs = []
    for text in texts:
        pf = parse_problem(text)
        for i, (kind, _, _) in enumerate(pf.requests):
            if kind in kinds:
                jobs.append((text, i, method))
    return jobs


def _run_jobs(jobs, workers: int):
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_run_request, jobs))
    return [_run_request(j) for j in jobs]


def _summary(d: dict) -> str:
    from .chern import VerificationReport
    return VerificationReport.from_dict(d).summary()


def _emit_reports(reports, as_json: bool, out) -> int:
    for d in reports:
        print(json.dumps(d, sort_keys=True) if as_json else _summary(d), file=out)
    failed = [d for d in reports if not d["equal"]]
    if not as_json:
        print(f"{len(reports) - len(failed)}/{len(reports)} equalities hold", file=out)
    return FAILED if failed else OK


def cmd_requests(args, kinds, out) -> int:
    if args.command == "battery":
        texts = battery_texts()
    else:
        pf = _load(args.file)
        if not any(k in kinds for k, _, _ in pf.requests):
            raise InputError(f"{args.file}: no {' or '.join(kinds)} requests")
        try:
            scope_guard(pf.w)
        except ScopeError as exc:
            raise InputError(str(exc)) from exc
        for kind, a, b in pf.requests:
            if kind == "cardy" and "cardy" in kinds:
                for ref in (a, b):
                    of, mat = pf.endos[ref]
                    if not is_closed(pf.mfs[of], mat):
                        raise InputError(f"{args.file}: endomorphism {ref} of {of} is not closed")
        texts = [Path(args.file).read_text()]
    return _emit_reports(_run_jobs(_jobs_for(texts, kinds, args.method), args.jobs),
                         args.json, out)


def cmd_chern(args, out) -> int:
    pf = _load(args.file)
    mr = _milnor(pf.w)
    c = chern_local(_mf(pf, args.mf), mr)
    if args.json:
        print(json.dumps({"mf": args.mf, "n": c.n, "milnor_class": str(c.milnor_class)}), file=out)
    else:
        top = " ^ ".join(f"d{v}" for v in pf.ring.names)
        print(f"ch({args.mf}) = ({c.milnor_class}) {top}", file=out)
    return OK


def cmd_ext(args, out) -> int:
    pf = _load(args.file)
    p, q = _mf(pf, args.p), _mf(pf, args.q)
    try:
        h = hom_complex(p, q)
    except ExtError as exc:
        raise InputError(str(exc)) from exc
    result = {}
    status = OK
    if args.method in ("groebner", "both"):
        b = ext_basis(h)
        result["groebner"] = [b.dim(0), b.dim(1)]
        result["basis_even"] = [m.to_text() for m in b.representatives(0)]
        result["basis_odd"] = [m.to_text() for m in b.representatives(1)]
    if args.method in ("graded", "both"):
        try:
            g = ext_dims_graded(h)
            result["graded"] = [g.dim_even, g.dim_odd]
        except NotGradable as exc:
            if args.method == "graded":
                raise InputError(str(exc)) from exc
    dims = {tuple(result[k]) for k in ("groebner", "graded") if k in result}
    if len(dims) > 1:
        status = FAILED
    even, odd = next(iter(dims))
    result["euler"] = even - odd
    if args.json:
        print(json.dumps(result, sort_keys=True), file=out)
    else:
        print(f"Ext({args.p}, {args.q}): dims {even}|{odd}, euler {even - odd}", file=out)
        for k in ("groebner", "graded"):
            if k in result:
                print(f"  {k}: {result[k][0]}|{result[k][1]}", file=out)
        for k in ("basis_even", "basis_odd"):
            for m in result.get(k, []):
                print(f"  {k[6:]} class {m}", file=out)
        if status:
            print("methods disagree", file=out)
    return status


def cmd_milnor(args, out) -> int:
    pf = _load(args.file)
    mr = _milnor(pf.w)
    hess = hessian_residue(mr)
    det = rational_det(residue_pairing_matrix(mr))
    info = {"w": str(pf.w), "mu": mr.mu, "basis": [str(b) for b in mr.basis_polys()],
            "weights": [str(u) for u in mr.weights] if mr.weights else None,
            "hessian_residue": str(hess), "pairing_det": str(det)}
    if args.json:
        print(json.dumps(info), file=out)
    else:
        print(f"w = {info['w']}\nmu = {mr.mu}\nbasis: {', '.join(info['basis'])}", file=out)
        if info["weights"]:
            print(f"weights: {', '.join(info['weights'])}", file=out)
        print(f"Res[hess] = {hess}, pairing determinant = {det}", file=out)
    return OK if hess == mr.mu and det != 0 else FAILED


def cmd_residue(args, out) -> int:
    pf = _load(args.file)
    mr = _milnor(pf.w)
    try:
        g = pf.ring.parse(args.poly)
    except ParseError as exc:
        raise InputError(str(exc)) from exc
    value = residue(g, mr)
    if args.json:
        print(json.dumps({"poly": str(g), "residue": str(value)}), file=out)
    else:
        print(f"Res[{g}] = {value}", file=out)
    return OK


def _milnor(w):
    try:
        return milnor_ring(w)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


def _mf(pf, name):
    try:
        return pf.mf(name)
    except ProblemError as exc:
        raise InputError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit JSON (one object per line)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")
    common.add_argument("--method", choices=("groebner", "graded", "both"), default="both")
    common.add_argument("--calibration-report", action="store_true",
                        help="print the involution-sign calibration record first")
    parser = argparse.ArgumentParser(prog="mfhrr",
                                     description="Exact HRR and Cardy checks for matrix factorizations")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (("verify", "check HRR for every verify request"),
                           ("cardy", "check Cardy for every cardy request")):
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.add_argument("file")
    sp = sub.add_parser("chern", parents=[common], help="local Chern character")
    sp.add_argument("file")
    sp.add_argument("mf")
    sp = sub.add_parser("ext", parents=[common], help="Ext dimensions and basis")
    sp.add_argument("file")
    sp.add_argument("p")
    sp.add_argument("q")
    sp = sub.add_parser("milnor", parents=[common], help="Milnor ring of w")
    sp.add_argument("file")
    sp = sub.add_parser("residue", parents=[common], help="Grothendieck residue of a polynomial")
    sp.add_argument("file")
    sp.add_argument("poly")
    sub.add_parser("battery", parents=[common], help="run the built-in battery")
    return parser


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return BAD_INPUT if exc.code else OK
    try:
        if args.calibration_report:
            rec = calibrate().to_dict()
            if args.json:
                print(json.dumps({"calibration": rec}), file=out)
            else:
                print(f"involution convention: {rec['convention']}", file=out)
                for c in rec["cases"]:
                    print(f"  {c['name']}: lhs {c['lhs']}, rhs {c['rhs']}", file=out)
        if args.command in ("verify", "battery"):
            kinds = ("verify",) if args.command == "verify" else ("verify", "cardy")
            return cmd_requests(args, kinds, out)
        if args.command == "cardy":
            return cmd_requests(args, ("cardy",), out)
        return {"chern": cmd_chern, "ext": cmd_ext, "milnor": cmd_milnor,
                "residue": cmd_residue}[args.command](args, out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT
    except ConventionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FAILED
    except ExtError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return FAILED


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
