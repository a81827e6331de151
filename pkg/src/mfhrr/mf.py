"""Matrix factorizations ``delta = [[0, d1], [d0, 0]]`` with ``delta^2 = w``.

The free module is ``E = E0 + E1`` with the even basis listed first;
``d1 : E1 -> E0`` is ``r0 x r1`` and ``d0 : E0 -> E1`` is ``r1 x r0``.

Tensor products use ``delta = delta_P (x) 1 + 1 (x) delta_Q`` with
``(1 (x) delta_Q)(e (x) f) = (-1)^{|e|} e (x) delta_Q f`` and the even part
ordered ``P0Q0, P1Q1``, the odd part ``P1Q0, P0Q1``.  This is the
repository-wide convention; every constructor re-validates ``delta^2 = w``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Mapping, Sequence

from .matrix import PolyMatrix, block_matrix
from .poly import ParseError, Poly, Ring, is_weighted_homogeneous


class MFError(ValueError):
    pass


class NotGradableError(MFError):
    """No consistent internal degrees exist (``NOT_GRADABLE``)."""


@dataclass(frozen=True, eq=False)
class MatrixFactorization:
    w: Poly
    d1: PolyMatrix
    d0: PolyMatrix
    internal_degrees: tuple[Fraction, ...] | None = None
    label: str = ""

    def __post_init__(self):
        r0, r1 = self.d1.shape
        if self.d0.shape != (r1, r0):
            raise MFError(f"d1 is {self.d1.shape} so d0 must be {(r1, r0)}, got {self.d0.shape}")
        if self.internal_degrees is not None and len(self.internal_degrees) != r0 + r1:
            raise MFError("internal_degrees must list one degree per basis element")

    @property
    def ring(self) -> Ring:
        return self.w.ring

    @property
    def r0(self) -> int:
        return self.d1.shape[0]

    @property
    def r1(self) -> int:
        return self.d1.shape[1]

    @property
    def rank(self) -> int:
        return self.r0 + self.r1

    def parity(self, i: int) -> int:
        return 0 if i < self.r0 else 1

    def delta(self) -> PolyMatrix:
        ring = self.ring
        return block_matrix(ring, [[PolyMatrix.zeros(ring, self.r0, self.r0), self.d1],
                                   [self.d0, PolyMatrix.zeros(ring, self.r1, self.r1)]])

    def __str__(self) -> str:
        return self.label or f"explicit{{d1={self.d1.to_text()}, d0={self.d0.to_text()}}}"


@dataclass(frozen=True)
class Violation:
    product: str
    entry: tuple[int, int]
    got: Poly
    expected: Poly

    def __str__(self) -> str:
        return (f"{self.product} entry {self.entry}: {self.got} != {self.expected}")


def validate_mf(m: MatrixFactorization, w: Poly | None = None) -> Violation | None:
    """First entry where ``d1 d0 = w I`` or ``d0 d1 = w I`` fails, else None."""
    w = m.w if w is None else w
    for name, prod in (("d1*d0", m.d1 @ m.d0), ("d0*d1", m.d0 @ m.d1)):
        size = prod.shape[0]
        for i in range(size):
            for j in range(size):
                expected = w if i == j else w.ring.zero()
                if prod[i, j] != expected:
                    return Violation(name, (i, j), prod[i, j], expected)
    return None


def _checked(m: MatrixFactorization) -> MatrixFactorization:
    v = validate_mf(m)
    if v is not None:
        raise MFError(f"not a matrix factorization of {m.w}: {v}")
    return m


def explicit_mf(w: Poly, d1, d0, internal_degrees=None, label: str = "") -> MatrixFactorization:
    ring = w.ring
    d1 = d1 if isinstance(d1, PolyMatrix) else PolyMatrix(ring, d1)
    d0 = d0 if isinstance(d0, PolyMatrix) else PolyMatrix(ring, d0)
    if internal_degrees is not None:
        internal_degrees = tuple(Fraction(q) for q in internal_degrees)
    m = MatrixFactorization(w, d1, d0, internal_degrees, label)
    if not label:
        m = replace(m, label=f"explicit{{d1={d1.to_text()}, d0={d0.to_text()}}}")
    return _checked(m)


def koszul_mf(a: Poly, b: Poly) -> MatrixFactorization:
    """Rank 1|1 factorization ``d1 = (a)``, ``d0 = (b)`` of ``w = ab``."""
    ring = a.ring
    return _checked(MatrixFactorization(a * b, PolyMatrix(ring, [[a]]), PolyMatrix(ring, [[b]]),
                                        None, f"koszul({a}, {b})"))


def _embed(m: MatrixFactorization, ring: Ring) -> MatrixFactorization:
    if m.ring == ring:
        return m
    return replace(m, w=m.w.embed(ring), d1=m.d1.embed(ring), d0=m.d0.embed(ring))


def tensor_mf(m: MatrixFactorization, n: MatrixFactorization) -> MatrixFactorization:
    """Factorization of ``w_m + w_n`` on ``E (x) F`` over the union of the rings."""
    ring = m.ring.union(n.ring)
    m, n = _embed(m, ring), _embed(n, ring)
    dm, dn = m.delta(), n.delta()
    # basis of E (x) F: even = P0Q0, P1Q1; odd = P1Q0, P0Q1
    order = ([(a, b) for a in range(m.r0) for b in range(n.r0)]
             + [(a, b) for a in range(m.r0, m.rank) for b in range(n.r0, n.rank)]
             + [(a, b) for a in range(m.r0, m.rank) for b in range(n.r0)]
             + [(a, b) for a in range(m.r0) for b in range(n.r0, n.rank)])
    r0 = m.r0 * n.r0 + m.r1 * n.r1
    z = ring.zero()
    rows = []
    for (a2, b2) in order:
        row = []
        for (a, b) in order:
            entry = z
            if b2 == b:
                entry = entry + dm[a2, a]
            if a2 == a:
                s = dn[b2, b]
                entry = entry + (-s if m.parity(a) else s)
            row.append(entry)
        rows.append(row)
    full = PolyMatrix(ring, rows)
    size = len(order)
    d1 = full.block(range(0, r0), range(r0, size))
    d0 = full.block(range(r0, size), range(0, r0))
    degs = None
    if m.internal_degrees is not None and n.internal_degrees is not None:
        degs = tuple(m.internal_degrees[a] + n.internal_degrees[b] for a, b in order)
    return _checked(MatrixFactorization(m.w + n.w, d1, d0, degs, f"tensor({m}, {n})"))


def shift_mf(m: MatrixFactorization) -> MatrixFactorization:
    """Suspension: swap parities, ``d1' = -d0``, ``d0' = -d1``."""
    degs = None
    if m.internal_degrees is not None:
        degs = m.internal_degrees[m.r0:] + m.internal_degrees[:m.r0]
    return _checked(MatrixFactorization(m.w, -m.d0, -m.d1, degs, f"shift({m})"))


def dual_mf(m: MatrixFactorization) -> MatrixFactorization:
    """``Hom(E, O)`` with ``delta^v phi = -(-1)^{|phi|} phi o delta``: a factorization of ``-w``.

    On the dual bases this gives ``d1' = d0^T`` and ``d0' = -d1^T``.
    """
    degs = None
    if m.internal_degrees is not None:
        degs = tuple(-q for q in m.internal_degrees)
    return _checked(MatrixFactorization(-m.w, m.d0.T, -m.d1.T, degs, f"dual({m})"))


def sum_mf(m: MatrixFactorization, n: MatrixFactorization) -> MatrixFactorization:
    if m.w != n.w:
        raise MFError(f"cannot add factorizations of {m.w} and {n.w}")
    ring = m.ring
    d1 = block_matrix(ring, [[m.d1, PolyMatrix.zeros(ring, m.r0, n.r1)],
                             [PolyMatrix.zeros(ring, n.r0, m.r1), n.d1]])
    d0 = block_matrix(ring, [[m.d0, PolyMatrix.zeros(ring, m.r1, n.r0)],
                             [PolyMatrix.zeros(ring, n.r1, m.r0), n.d0]])
    degs = None
    if m.internal_degrees is not None and n.internal_degrees is not None:
        degs = (m.internal_degrees[:m.r0] + n.internal_degrees[:n.r0]
                + m.internal_degrees[m.r0:] + n.internal_degrees[n.r0:])
    return _checked(MatrixFactorization(m.w, d1, d0, degs, f"sum({m}, {n})"))


def sum_endomorphisms(m: MatrixFactorization, n: MatrixFactorization,
                      a: PolyMatrix, b: PolyMatrix) -> PolyMatrix:
    """Block-diagonal ``a + b`` on ``sum_mf(m, n)`` (same basis order)."""
    ring = m.ring
    idx = list(range(m.r0)) + [m.rank + i for i in range(n.r0)] \
        + list(range(m.r0, m.rank)) + [m.rank + i for i in range(n.r0, n.rank)]
    big = block_matrix(ring, [[a, PolyMatrix.zeros(ring, m.rank, n.rank)],
                              [PolyMatrix.zeros(ring, n.rank, m.rank), b]])
    return PolyMatrix(ring, [[big[i, j] for j in idx] for i in idx])


# -- gradings ------------------------------------------------------------------

def infer_internal_degrees(m: MatrixFactorization,
                           weights: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Degrees ``q`` with ``deg(delta_ij) + q_i = q_j + 1/2`` (``deg w = 1``).

    Uses the stored ``internal_degrees`` when present (after checking them),
    otherwise propagates from basis element 0 along nonzero entries;
    unconnected pieces start at degree 0.
    """
    delta = m.delta()
    half = Fraction(1, 2)
    n = m.rank
    entries = {}
    for i in range(n):
        for j in range(n):
            p = delta[i, j]
            if p:
                if not is_weighted_homogeneous(p, weights):
                    raise NotGradableError(f"entry ({i},{j}) = {p} is not weighted homogeneous")
                entries[(i, j)] = next(iter(p.weighted_degrees(weights)))
    if m.internal_degrees is not None:
        q = m.internal_degrees
        for (i, j), d in entries.items():
            if d + q[i] != q[j] + half:
                raise NotGradableError(f"internal degrees inconsistent at entry ({i},{j})")
        return q
    q: list[Fraction | None] = [None] * n
    for start in range(n):
        if q[start] is not None:
            continue
        q[start] = Fraction(0)
        stack = [start]
        while stack:
            k = stack.pop()
            for (i, j), d in entries.items():
                if j == k and q[i] is None:
                    q[i] = q[j] + half - d
                    stack.append(i)
                elif i == k and q[j] is None:
                    q[j] = d + q[i] - half
                    stack.append(j)
    for (i, j), d in entries.items():
        if d + q[i] != q[j] + half:
            raise NotGradableError(f"no consistent internal degrees (entry ({i},{j}))")
    return tuple(q)


# -- expression language ---------------------------------------------------------

def split_top_level(text: str, sep: str = ",") -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
            if depth < 0:
                raise ParseError("unbalanced brackets", text, len("".join(cur)))
        if ch == sep and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if depth:
        raise ParseError("unbalanced brackets", text, len(text))
    parts.append("".join(cur))
    return [p.strip() for p in parts]


def parse_matrix(text: str, ring: Ring) -> PolyMatrix:
    """``[[a, b], [c, d]]`` into a polynomial matrix."""
    text = text.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ParseError("matrix must be written [[...], ...]", text, 0)
    rows = []
    for row in split_top_level(text[1:-1]):
        if not (row.startswith("[") and row.endswith("]")):
            raise ParseError("matrix row must be written [...]", row, 0)
        rows.append([ring.parse(e) for e in split_top_level(row[1:-1])])
    width = len(rows[0]) if rows else 0
    if any(len(r) != width for r in rows):
        raise ParseError("ragged matrix", text, 0)
    return PolyMatrix(ring, rows, width)


_CALL = re.compile(r"^([A-Za-z_][A-Za-z_0-9]*)\s*\((.*)\)$", re.S)


def parse_mf(text: str, ring: Ring, w: Poly | None = None,
             env: Mapping[str, MatrixFactorization] | None = None) -> MatrixFactorization:
    """Evaluate an expression such as ``tensor(koszul(x, x^2), shift(P))``."""
    env = env or {}
    text = text.strip()
    if text in env:
        return env[text]
    if text.startswith("explicit"):
        body = text[len("explicit"):].strip()
        if not (body.startswith("{") and body.endswith("}")):
            raise ParseError("explicit{d1=[[...]], d0=[[...]]} expected", text, 0)
        fields = {}
        for item in split_top_level(body[1:-1]):
            key, _, val = item.partition("=")
            fields[key.strip()] = parse_matrix(val, ring)
        if set(fields) != {"d1", "d0"}:
            raise ParseError("explicit factorization needs exactly d1 and d0", text, 0)
        target = w if w is not None else (fields["d1"] @ fields["d0"])[0, 0]
        return explicit_mf(target, fields["d1"], fields["d0"])
    m = _CALL.match(text)
    if not m:
        raise ParseError(f"cannot parse factorization expression {text!r}", text, 0)
    head, args = m.group(1), split_top_level(m.group(2))
    if head == "koszul":
        if len(args) != 2:
            raise ParseError("koszul takes two polynomials", text, 0)
        return koszul_mf(ring.parse(args[0]), ring.parse(args[1]))
    unary = {"dual": dual_mf, "shift": shift_mf}
    binary = {"tensor": tensor_mf, "sum": sum_mf}
    if head in unary:
        if len(args) != 1:
            raise ParseError(f"{head} takes one argument", text, 0)
        return unary[head](parse_mf(args[0], ring, w, env))
    if head in binary:
        if len(args) != 2:
            raise ParseError(f"{head} takes two arguments", text, 0)
        # inner pieces of a tensor are factorizations of their own potentials
        inner_w = None if head == "tensor" else w
        return binary[head](parse_mf(args[0], ring, inner_w, env),
                            parse_mf(args[1], ring, inner_w, env))
    raise ParseError(f"unknown constructor {head!r}", text, 0)
