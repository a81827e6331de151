"""Plain-text problem files: one ring, one potential, named factorizations.

Example::

    # D4 singularity
    name D4 rank-one factorization
    ring x, y
    w = x^3 + x*y^2
    mf P = koszul(x, x^2 + y^2)
    mf Q = shift(P)
    endo a of P = [[x, 0], [0, x]]
    endo b of Q = [[1, 0], [0, 1]]
    verify P Q
    cardy a b

Lines are ``name``, ``ring``, ``w =``, ``mf NAME =``, ``endo NAME of MF =``,
``verify MF MF`` and ``cardy ENDO ENDO``; ``#`` starts a comment.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .chern import VerificationReport, verify_cardy, verify_hrr
from .matrix import PolyMatrix
from .mf import MatrixFactorization, parse_matrix, parse_mf, validate_mf
from .poly import ParseError, Poly, Ring

_NAME = r"[A-Za-z_][A-Za-z_0-9]*"
_MF = re.compile(rf"^mf\s+({_NAME})\s*=\s*(.+)$")
_ENDO = re.compile(rf"^endo\s+({_NAME})\s+of\s+({_NAME})\s*=\s*(.+)$")
_REQ = re.compile(rf"^(verify|cardy)\s+({_NAME})\s+({_NAME})$")


class ProblemError(ValueError):
    """Malformed or inconsistent problem file; carries the line number."""

    def __init__(self, message: str, line: int = 0):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


@dataclass
class ProblemFile:
    ring: Ring
    w: Poly
    mfs: dict[str, MatrixFactorization] = field(default_factory=dict)
    endos: dict[str, tuple[str, PolyMatrix]] = field(default_factory=dict)
    requests: list[tuple[str, str, str]] = field(default_factory=list)
    name: str = ""

    def mf(self, name: str) -> MatrixFactorization:
        if name not in self.mfs:
            raise ProblemError(f"unknown factorization {name!r}")
        return self.mfs[name]


def parse_problem(text: str) -> ProblemFile:
    ring = w = None
    title = ""
    mfs: dict[str, MatrixFactorization] = {}
    endos: dict[str, tuple[str, PolyMatrix]] = {}
    requests: list[tuple[str, str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if line.startswith("name ") or line == "name":
                title = line[4:].strip()
            elif line.startswith("ring "):
                if ring is not None:
                    raise ProblemError("ring declared twice", lineno)
                names = [s.strip() for s in line[5:].split(",")]
                if not all(re.fullmatch(_NAME, s) for s in names):
                    raise ProblemError(f"bad variable list {line[5:]!r}", lineno)
                ring = Ring(*names)
            elif line.startswith("w ") or line.startswith("w="):
                if ring is None:
                    raise ProblemError("w given before ring", lineno)
                if w is not None:
                    raise ProblemError("w given twice", lineno)
                w = ring.parse(line.split("=", 1)[1])
            elif m := _MF.match(line):
                if w is None:
                    raise ProblemError("mf given before w", lineno)
                name, expr = m.groups()
                mf = parse_mf(expr, ring, w, mfs)
                if mf.w != w and mf.w != -w:
                    raise ProblemError(f"{name} factorizes {mf.w}, not w", lineno)
                bad = validate_mf(mf)
                if bad is not None:
                    raise ProblemError(f"{name} is not a matrix factorization: {bad}", lineno)
                mfs[name] = mf
            elif m := _ENDO.match(line):
                name, of, mat = m.groups()
                if of not in mfs:
                    raise ProblemError(f"unknown factorization {of!r}", lineno)
                a = parse_matrix(mat, ring)
                if a.shape != (mfs[of].rank, mfs[of].rank):
                    raise ProblemError(f"{name} has shape {a.shape}, {of} has rank {mfs[of].rank}",
                                       lineno)
                endos[name] = (of, a)
            elif m := _REQ.match(line):
                kind, a, b = m.groups()
                table = mfs if kind == "verify" else endos
                for ref in (a, b):
                    if ref not in table:
                        raise ProblemError(f"unknown name {ref!r} in {kind} request", lineno)
                requests.append((kind, a, b))
            else:
                raise ProblemError(f"cannot parse {line!r}", lineno)
        except ParseError as exc:
            raise ProblemError(str(exc), lineno) from exc
        except ValueError as exc:
            if isinstance(exc, ProblemError):
                raise
            raise ProblemError(str(exc), lineno) from exc
    if ring is None or w is None:
        raise ProblemError("a problem needs a ring line and a w line")
    return ProblemFile(ring, w, mfs, endos, requests, title)


def run_problem(pf: ProblemFile, method: str = "both",
                kinds: tuple[str, ...] = ("verify", "cardy")) -> list[VerificationReport]:
    reports = []
    for kind, a, b in pf.requests:
        if kind not in kinds:
            continue
        label = f"{pf.name}: {a} {b}" if pf.name else f"{a} {b}"
        if kind == "verify":
            reports.append(verify_hrr(pf.mfs[a], pf.mfs[b], method, name=label))
        else:
            (pa, alpha), (pb, beta) = pf.endos[a], pf.endos[b]
            reports.append(verify_cardy(alpha, beta, pf.mfs[pa], pf.mfs[pb], method, name=label))
    return reports
