"""Small dense matrices over Q[x1..xn]."""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .poly import Poly, Ring


class PolyMatrix:
    __slots__ = ("ring", "rows", "shape")

    def __init__(self, ring: Ring, rows: Sequence[Sequence[Poly | int | Fraction]],
                 ncols: int | None = None):
        self.ring = ring
        fixed = []
        for row in rows:
            fixed.append(tuple(e if isinstance(e, Poly) else ring.const(e) for e in row))
        self.rows: tuple[tuple[Poly, ...], ...] = tuple(fixed)
        if ncols is None:
            ncols = len(self.rows[0]) if self.rows else 0
        if any(len(r) != ncols for r in self.rows):
            raise ValueError("ragged matrix")
        self.shape = (len(self.rows), ncols)

    @classmethod
    def zeros(cls, ring: Ring, nrows: int, ncols: int) -> PolyMatrix:
        z = ring.zero()
        return cls(ring, [[z] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, ring: Ring, n: int) -> PolyMatrix:
        one, z = ring.one(), ring.zero()
        return cls(ring, [[one if i == j else z for j in range(n)] for i in range(n)], n)

    @classmethod
    def parse(cls, ring: Ring, rows: Sequence[Sequence[str]]) -> PolyMatrix:
        return cls(ring, [[ring.parse(t) for t in row] for row in rows])

    def __getitem__(self, ij: tuple[int, int]) -> Poly:
        return self.rows[ij[0]][ij[1]]

    def __iter__(self):
        return iter(self.rows)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PolyMatrix) and self.shape == other.shape and self.rows == other.rows

    def __hash__(self) -> int:
        return hash(self.rows)

    def is_zero(self) -> bool:
        return not any(e for row in self.rows for e in row)

    def __add__(self, other: PolyMatrix) -> PolyMatrix:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return PolyMatrix(self.ring, [[a + b for a, b in zip(r1, r2)]
                                      for r1, r2 in zip(self.rows, other.rows)], self.shape[1])

    def __neg__(self) -> PolyMatrix:
        return PolyMatrix(self.ring, [[-a for a in r] for r in self.rows], self.shape[1])

    def __sub__(self, other: PolyMatrix) -> PolyMatrix:
        return self + (-other)

    def scale(self, c) -> PolyMatrix:
        return PolyMatrix(self.ring, [[a * c for a in r] for r in self.rows], self.shape[1])

    def __matmul__(self, other: PolyMatrix) -> PolyMatrix:
        n, k = self.shape
        k2, m = other.shape
        if k != k2:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        z = self.ring.zero()
        cols = list(zip(*other.rows)) if m else []
        out = []
        for row in self.rows:
            new = []
            for col in cols:
                acc = z
                for a, b in zip(row, col):
                    if a and b:
                        acc = acc + a * b
                new.append(acc)
            out.append(new)
        return PolyMatrix(self.ring, out, m)

    def transpose(self) -> PolyMatrix:
        n, m = self.shape
        return PolyMatrix(self.ring, [[self.rows[i][j] for i in range(n)] for j in range(m)], n)

    @property
    def T(self) -> PolyMatrix:
        return self.transpose()

    def block(self, rows: range, cols: range) -> PolyMatrix:
        return PolyMatrix(self.ring, [[self.rows[i][j] for j in cols] for i in rows], len(cols))

    def map(self, f) -> PolyMatrix:
        return PolyMatrix(self.ring, [[f(a) for a in r] for r in self.rows], self.shape[1])

    def embed(self, ring: Ring) -> PolyMatrix:
        return PolyMatrix(ring, [[a.embed(ring) for a in r] for r in self.rows], self.shape[1])

    def to_text(self) -> str:
        return "[" + ", ".join("[" + ", ".join(str(a) for a in r) + "]" for r in self.rows) + "]"

    def __repr__(self) -> str:
        return f"PolyMatrix({self.to_text()})"


def block_matrix(ring: Ring, blocks: Sequence[Sequence[PolyMatrix]]) -> PolyMatrix:
    rows = []
    for brow in blocks:
        height = brow[0].shape[0]
        for i in range(height):
            row = []
            for b in brow:
                row.extend(b.rows[i])
            rows.append(row)
    ncols = sum(b.shape[1] for b in blocks[0]) if blocks else 0
    return PolyMatrix(ring, rows, ncols)
