"""Differential forms with coefficients in Z/2-graded polynomial matrices.

An element of ``Omega (x) End(E)`` is stored as ``{I: A_I}`` meaning
``sum_I dx_I (x) A_I`` with ``I`` a sorted tuple of variable indices and
``A_I`` a square :class:`PolyMatrix` on ``E = E0 + E1`` (even basis first).
The Koszul sign rule is applied in exactly one place, :func:`wedge_mul`:

    (dx_I (x) A)(dx_J (x) B) = (-1)^{|A| |J|} dx_I ^ dx_J (x) AB

after splitting ``A`` into its block-even and block-odd parts.
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Mapping

from .matrix import PolyMatrix
from .poly import Poly, Ring

FormIndex = tuple[int, ...]


def wedge_indices(I: FormIndex, J: FormIndex) -> tuple[int, FormIndex]:
    """``dx_I ^ dx_J = sign * dx_K``; sign 0 when the sets overlap."""
    if set(I) & set(J):
        return 0, ()
    inversions = sum(1 for i in I for j in J if i > j)
    return (-1 if inversions % 2 else 1), tuple(sorted(I + J))


class FormPoly:
    """A polynomial differential form ``sum_I f_I dx_I``."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: Ring, terms: Mapping[FormIndex, Poly] | None = None):
        self.ring = ring
        self.terms: dict[FormIndex, Poly] = {tuple(I): p for I, p in (terms or {}).items() if p}

    def __add__(self, other: FormPoly) -> FormPoly:
        terms = dict(self.terms)
        for I, p in other.terms.items():
            terms[I] = terms[I] + p if I in terms else p
        return FormPoly(self.ring, terms)

    def __neg__(self) -> FormPoly:
        return FormPoly(self.ring, {I: -p for I, p in self.terms.items()})

    def __sub__(self, other: FormPoly) -> FormPoly:
        return self + (-other)

    def scale(self, c) -> FormPoly:
        return FormPoly(self.ring, {I: p * c for I, p in self.terms.items()})

    def wedge(self, other: FormPoly) -> FormPoly:
        terms: dict[FormIndex, Poly] = {}
        for I, p in self.terms.items():
            for J, q in other.terms.items():
                s, K = wedge_indices(I, J)
                if s:
                    terms[K] = terms.get(K, self.ring.zero()) + p * q * s
        return FormPoly(self.ring, terms)

    def component(self, I: FormIndex) -> Poly:
        return self.terms.get(tuple(I), self.ring.zero())

    def top_coefficient(self) -> Poly:
        """Coefficient ``f`` of ``f dx_1 ... dx_n``."""
        return self.component(tuple(range(self.ring.nvars)))

    def degree_part(self, p: int) -> FormPoly:
        return FormPoly(self.ring, {I: f for I, f in self.terms.items() if len(I) == p})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FormPoly) and self.terms == other.terms

    def __repr__(self) -> str:
        if not self.terms:
            return "FormPoly(0)"
        parts = []
        for I in sorted(self.terms, key=lambda I: (len(I), I)):
            dx = "^".join(f"d{self.ring.names[i]}" for i in I)
            parts.append(f"({self.terms[I]})" + (f"*{dx}" if dx else ""))
        return "FormPoly(" + " + ".join(parts) + ")"


class SuperMatrixForm:
    """Element of ``Omega (x) End(E)`` with block ranks ``r0|r1``."""

    __slots__ = ("ring", "r0", "r1", "comps")

    def __init__(self, ring: Ring, r0: int, r1: int,
                 comps: Mapping[FormIndex, PolyMatrix] | None = None):
        self.ring = ring
        self.r0 = r0
        self.r1 = r1
        size = r0 + r1
        clean = {}
        for I, A in (comps or {}).items():
            if A.shape != (size, size):
                raise ValueError(f"component shape {A.shape} does not match {r0}|{r1}")
            if not A.is_zero():
                clean[tuple(I)] = A
        self.comps: dict[FormIndex, PolyMatrix] = clean

    @property
    def size(self) -> int:
        return self.r0 + self.r1

    def row_parity(self, i: int) -> int:
        return 0 if i < self.r0 else 1

    @classmethod
    def from_matrix(cls, m: PolyMatrix, r0: int, r1: int) -> SuperMatrixForm:
        """A 0-form (pure endomorphism)."""
        return cls(m.ring, r0, r1, {(): m})

    @classmethod
    def identity(cls, ring: Ring, r0: int, r1: int) -> SuperMatrixForm:
        return cls(ring, r0, r1, {(): PolyMatrix.identity(ring, r0 + r1)})

    @classmethod
    def zero(cls, ring: Ring, r0: int, r1: int) -> SuperMatrixForm:
        return cls(ring, r0, r1, {})

    def _check(self, other: SuperMatrixForm):
        if (self.r0, self.r1) != (other.r0, other.r1):
            raise ValueError(f"block shape mismatch {self.r0}|{self.r1} vs {other.r0}|{other.r1}")

    def __add__(self, other: SuperMatrixForm) -> SuperMatrixForm:
        self._check(other)
        comps = dict(self.comps)
        for I, A in other.comps.items():
            comps[I] = comps[I] + A if I in comps else A
        return SuperMatrixForm(self.ring, self.r0, self.r1, comps)

    def __neg__(self) -> SuperMatrixForm:
        return SuperMatrixForm(self.ring, self.r0, self.r1, {I: -A for I, A in self.comps.items()})

    def __sub__(self, other: SuperMatrixForm) -> SuperMatrixForm:
        return self + (-other)

    def scale(self, c) -> SuperMatrixForm:
        return SuperMatrixForm(self.ring, self.r0, self.r1,
                               {I: A.scale(c) for I, A in self.comps.items()})

    def __matmul__(self, other: SuperMatrixForm) -> SuperMatrixForm:
        return wedge_mul(self, other)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, SuperMatrixForm) and (self.r0, self.r1) == (other.r0, other.r1)
                and self.comps == other.comps)

    def is_zero(self) -> bool:
        return not self.comps

    def split_endo_parity(self, A: PolyMatrix) -> tuple[PolyMatrix, PolyMatrix]:
        """``A = A_even + A_odd`` by block position."""
        z = self.ring.zero()
        even = [[a if self.row_parity(i) == self.row_parity(j) else z
                 for j, a in enumerate(row)] for i, row in enumerate(A.rows)]
        odd = [[a if self.row_parity(i) != self.row_parity(j) else z
                for j, a in enumerate(row)] for i, row in enumerate(A.rows)]
        return PolyMatrix(self.ring, even, self.size), PolyMatrix(self.ring, odd, self.size)

    def parity(self) -> int | None:
        """Total parity (form degree + block parity) if homogeneous, else None."""
        seen = set()
        for I, A in self.comps.items():
            for i, row in enumerate(A.rows):
                for j, a in enumerate(row):
                    if a:
                        seen.add((len(I) + self.row_parity(i) + self.row_parity(j)) % 2)
        if len(seen) > 1:
            return None
        return seen.pop() if seen else 0

    def degree_part(self, p: int) -> SuperMatrixForm:
        return SuperMatrixForm(self.ring, self.r0, self.r1,
                               {I: A for I, A in self.comps.items() if len(I) == p})

    def min_form_degree(self) -> int | None:
        return min((len(I) for I in self.comps), default=None)

    def __repr__(self) -> str:
        return f"SuperMatrixForm({self.r0}|{self.r1}, {self.comps!r})"


def wedge_mul(a: SuperMatrixForm, b: SuperMatrixForm) -> SuperMatrixForm:
    a._check(b)
    out: dict[FormIndex, PolyMatrix] = {}
    for I, A in a.comps.items():
        A_even, A_odd = a.split_endo_parity(A)
        for J, B in b.comps.items():
            sign, K = wedge_indices(I, J)
            if not sign:
                continue
            if len(J) % 2:
                prod = (A_even @ B) - (A_odd @ B)
            else:
                prod = A @ B
            if sign < 0:
                prod = -prod
            out[K] = out[K] + prod if K in out else prod
    return SuperMatrixForm(a.ring, a.r0, a.r1, out)


def supertrace(m: SuperMatrixForm) -> FormPoly:
    terms = {}
    for I, A in m.comps.items():
        s = m.ring.zero()
        for i in range(m.size):
            entry = A[i, i]
            if entry:
                s = s - entry if m.row_parity(i) else s + entry
        terms[I] = s
    return FormPoly(m.ring, terms)


def entrywise_d(m: PolyMatrix, r0: int, r1: int) -> SuperMatrixForm:
    """``dm = sum_k (d m / d x_k) dx_k`` entrywise."""
    comps = {(k,): m.map(lambda p, k=k: p.diff(k)) for k in range(m.ring.nvars)}
    return SuperMatrixForm(m.ring, r0, r1, comps)


def exp_truncated(m: SuperMatrixForm) -> SuperMatrixForm:
    """``sum_{p=0}^{n} m^p / p!``, exact because forms of degree > n vanish."""
    if () in m.comps:
        raise ValueError("exp_truncated needs an element without a 0-form part")
    n = m.ring.nvars
    result = SuperMatrixForm.identity(m.ring, m.r0, m.r1)
    power = SuperMatrixForm.identity(m.ring, m.r0, m.r1)
    for p in range(1, n + 1):
        power = wedge_mul(power, m)
        if power.is_zero():
            break
        result = result + power.scale(Fraction(1, factorial(p)))
    return result
