"""Exact multivariate polynomials over the rationals.

A :class:`Poly` is an immutable sparse map from dense exponent tuples to
nonzero :class:`fractions.Fraction` coefficients, tied to a :class:`Ring`
(an ordered tuple of variable names).  Everything downstream (Groebner
bases, residues, matrix factorizations) is built on this type, so no
floating point ever enters the system.
"""
from __future__ import annotations

import itertools
import re
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

Exps = tuple[int, ...]
Scalar = int | Fraction


class ParseError(ValueError):
    """Raised on malformed polynomial text; ``pos`` is a 0-based offset."""

    def __init__(self, message: str, text: str = "", pos: int = 0):
        self.text = text
        self.pos = pos
        where = f" at position {pos}" if text else ""
        super().__init__(f"{message}{where}")


class Ring:
    """The polynomial ring Q[x1..xn] with named variables."""

    __slots__ = ("names", "_index")

    def __init__(self, *names: str):
        if len(names) == 1 and not isinstance(names[0], str):
            names = tuple(names[0])
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        for name in names:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", name):
                raise ValueError(f"bad variable name {name!r}")
        self.names: tuple[str, ...] = tuple(names)
        self._index = {name: i for i, name in enumerate(self.names)}

    @property
    def nvars(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        return self._index[name]

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Ring) and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __repr__(self) -> str:
        return f"Ring({', '.join(map(repr, self.names))})"

    def zero(self) -> Poly:
        return Poly(self, {})

    def one(self) -> Poly:
        return self.const(1)

    def const(self, c: Scalar) -> Poly:
        c = Fraction(c)
        return Poly(self, {(0,) * self.nvars: c} if c else {})

    def monomial(self, exps: Sequence[int], coeff: Scalar = 1) -> Poly:
        exps = tuple(exps)
        if len(exps) != self.nvars or min(exps, default=0) < 0:
            raise ValueError(f"bad exponent vector {exps} for {self}")
        c = Fraction(coeff)
        return Poly(self, {exps: c} if c else {})

    def var(self, name: str | int) -> Poly:
        i = name if isinstance(name, int) else self.index(name)
        exps = [0] * self.nvars
        exps[i] = 1
        return Poly(self, {tuple(exps): Fraction(1)})

    def gens(self) -> tuple[Poly, ...]:
        return tuple(self.var(i) for i in range(self.nvars))

    def parse(self, text: str) -> Poly:
        return parse_poly(text, self)

    def union(self, other: Ring) -> Ring:
        """Variables of ``self`` followed by the new ones of ``other``."""
        extra = [v for v in other.names if v not in self]
        return Ring(*self.names, *extra)


class Poly:
    """Immutable sparse polynomial; ``terms`` maps exponent tuples to Fractions."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: Ring, terms: Mapping[Exps, Fraction] | None = None):
        self.ring = ring
        self.terms: dict[Exps, Fraction] = {
            e: (c if type(c) is Fraction else Fraction(c))
            for e, c in (terms or {}).items() if c
        }
        self._hash = None

    # -- basic queries -------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        zero = (0,) * self.ring.nvars
        return all(e == zero for e in self.terms)

    def constant_coeff(self) -> Fraction:
        return self.terms.get((0,) * self.ring.nvars, Fraction(0))

    def coeff(self, exps: Sequence[int]) -> Fraction:
        return self.terms.get(tuple(exps), Fraction(0))

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def weighted_degrees(self, weights: Sequence[Fraction]) -> set[Fraction]:
        return {sum((Fraction(a) * u for a, u in zip(e, weights)), Fraction(0))
                for e in self.terms}

    def __len__(self) -> int:
        return len(self.terms)

    # -- arithmetic ----------------------------------------------------
    def _coerce(self, other) -> Poly:
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise ValueError(f"ring mismatch: {self.ring} vs {other.ring}")
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        return NotImplemented

    def __add__(self, other) -> Poly:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e, 0) + c
            if s:
                terms[e] = s
            else:
                terms.pop(e, None)
        return Poly(self.ring, terms)

    __radd__ = __add__

    def __neg__(self) -> Poly:
        return Poly(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> Poly:
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other) -> Poly:
        return (-self) + other

    def __mul__(self, other) -> Poly:
        if isinstance(other, (int, Fraction)):
            if not other:
                return self.ring.zero()
            return Poly(self.ring, {e: c * other for e, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms: dict[Exps, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return Poly(self.ring, terms)

    __rmul__ = __mul__

    def __truediv__(self, other: Scalar) -> Poly:
        if not isinstance(other, (int, Fraction)):
            return NotImplemented
        return self * (Fraction(1) / Fraction(other))

    def __pow__(self, k: int) -> Poly:
        if k < 0:
            raise ValueError("negative power")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def mul_monomial(self, exps: Exps, coeff: Scalar = 1) -> Poly:
        coeff = Fraction(coeff)
        return Poly(self.ring, {tuple(a + b for a, b in zip(e, exps)): c * coeff
                                for e, c in self.terms.items()})

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            return self.terms == self.ring.const(other).terms
        if not isinstance(other, Poly):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    # -- calculus and evaluation ----------------------------------------
    def diff(self, i: int) -> Poly:
        """Formal partial derivative in variable ``i`` (0-based)."""
        if not 0 <= i < self.ring.nvars:
            raise IndexError(f"variable index {i} out of range for {self.ring}")
        terms = {}
        for e, c in self.terms.items():
            if e[i]:
                d = list(e)
                d[i] -= 1
                terms[tuple(d)] = c * e[i]
        return Poly(self.ring, terms)

    def evaluate(self, point: Sequence[Scalar]) -> Fraction:
        total = Fraction(0)
        for e, c in self.terms.items():
            term = c
            for v, a in zip(point, e):
                if a:
                    term *= Fraction(v) ** a
            total += term
        return total

    def embed(self, ring: Ring) -> Poly:
        """Rewrite in a ring containing all of this ring's variable names."""
        if ring == self.ring:
            return self
        pos = [ring.index(name) for name in self.ring.names]
        terms = {}
        for e, c in self.terms.items():
            new = [0] * ring.nvars
            for p, a in zip(pos, e):
                new[p] = a
            terms[tuple(new)] = c
        return Poly(ring, terms)

    def primitive(self) -> tuple[Fraction, Poly]:
        """Split as ``content * p`` with p integral, coprime, positive lead."""
        if not self.terms:
            return Fraction(0), self
        den = reduce(lcm, (c.denominator for c in self.terms.values()), 1)
        nums = [int(c * den) for c in self.terms.values()]
        g = reduce(gcd, nums)
        lead = self.terms[max(self.terms, key=degrevlex_key)]
        if lead < 0:
            g = -g
        content = Fraction(g, den)
        return content, self * (1 / content)

    # -- printing ------------------------------------------------------
    def sorted_terms(self) -> list[tuple[Exps, Fraction]]:
        return sorted(self.terms.items(), key=lambda t: degrevlex_key(t[0]),
                      reverse=True)

    def __str__(self) -> str:
        return format_poly(self)

    def __repr__(self) -> str:
        return f"Poly({str(self)!r}, {self.ring.names})"


def degrevlex_key(exps: Exps) -> tuple:
    return (sum(exps), tuple(-a for a in reversed(exps)))


def format_poly(p: Poly) -> str:
    if not p.terms:
        return "0"
    out = []
    for k, (e, c) in enumerate(p.sorted_terms()):
        sign = "-" if c < 0 else "+"
        c = abs(c)
        factors = []
        for name, a in zip(p.ring.names, e):
            if a == 1:
                factors.append(name)
            elif a > 1:
                factors.append(f"{name}^{a}")
        if c != 1 or not factors:
            factors.insert(0, str(c))
        body = "*".join(factors)
        if k == 0:
            out.append(body if sign == "+" else f"-{body}")
        else:
            out.append(f" {sign} {body}")
    return "".join(out)


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\S))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:  # only trailing whitespace left
            break
        if m.group(1) is not None:
            tokens.append(("num", m.group(1), m.start(1)))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), m.start(2)))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^":
                raise ParseError(f"unexpected character {ch!r}", text, m.start(3))
            tokens.append((ch, ch, m.start(3)))
        pos = m.end()
    return tokens


def parse_poly(text: str, ring: Ring) -> Poly:
    """Parse ``text`` like ``"3/2*x^2*y - y + 1"`` into a polynomial.

    Terms are joined by ``+``/``-``; a term is a product (``*``) of
    rational coefficients ``a`` or ``a/b`` and powers ``var^k``.
    """
    tokens = _tokenize(text)
    if not tokens:
        raise ParseError("empty polynomial", text, 0)
    i = 0
    result: dict[Exps, Fraction] = {}

    def peek():
        return tokens[i] if i < len(tokens) else ("end", "", len(text))

    def expect(kind):
        nonlocal i
        tok = peek()
        if tok[0] != kind:
            what = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ParseError(f"expected {kind}, found {what}", text, tok[2])
        i += 1
        return tok

    first = True
    while True:
        sign = 1
        tok = peek()
        if tok[0] in ("+", "-"):
            sign = -1 if tok[0] == "-" else 1
            i += 1
        elif not first:
            break
        first = False
        coeff = Fraction(sign)
        exps = [0] * ring.nvars
        while True:
            tok = peek()
            if tok[0] == "num":
                i += 1
                value = Fraction(int(tok[1]))
                if peek()[0] == "/":
                    i += 1
                    den = int(expect("num")[1])
                    if den == 0:
                        raise ParseError("zero denominator", text, tokens[i - 1][2])
                    value /= den
                coeff *= value
            elif tok[0] == "name":
                i += 1
                if tok[1] not in ring:
                    raise ParseError(f"unknown variable {tok[1]!r}", text, tok[2])
                power = 1
                if peek()[0] == "^":
                    i += 1
                    power = int(expect("num")[1])
                exps[ring.index(tok[1])] += power
            else:
                what = "end of input" if tok[0] == "end" else repr(tok[1])
                raise ParseError(f"expected coefficient or variable, found {what}",
                                 text, tok[2])
            if peek()[0] == "*":
                i += 1
                continue
            break
        e = tuple(exps)
        result[e] = result.get(e, 0) + coeff
    if i != len(tokens):
        tok = tokens[i]
        raise ParseError(f"unexpected {tok[1]!r}", text, tok[2])
    return Poly(ring, result)


class MonomialOrder:
    """A global monomial order: ``degrevlex``, ``lex`` or weighted degrevlex.

    ``key(exps)`` returns a tuple whose natural ordering is the monomial
    order, so larger keys mean larger monomials.
    """

    KINDS = ("degrevlex", "lex", "wdegrevlex")

    def __init__(self, kind: str = "degrevlex",
                 weights: Sequence[Scalar] | None = None):
        if kind not in self.KINDS:
            raise ValueError(f"unknown monomial order {kind!r}")
        if kind == "wdegrevlex":
            if not weights or any(Fraction(u) <= 0 for u in weights):
                raise ValueError("weighted order needs positive weights")
            self.weights = tuple(Fraction(u) for u in weights)
        else:
            self.weights = None
        self.kind = kind
        self._cache: dict[Exps, tuple] = {}

    def key(self, exps: Exps) -> tuple:
        k = self._cache.get(exps)
        if k is None:
            if self.kind == "degrevlex":
                k = degrevlex_key(exps)
            elif self.kind == "lex":
                k = exps
            else:
                wdeg = sum(a * u for a, u in zip(exps, self.weights))
                k = (wdeg, degrevlex_key(exps))
            self._cache[exps] = k
        return k

    def lead(self, p: Poly) -> Exps:
        return max(p.terms, key=self.key)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, MonomialOrder) and self.kind == other.kind
                and self.weights == other.weights)

    def __hash__(self) -> int:
        return hash((self.kind, self.weights))

    def __repr__(self) -> str:
        if self.weights:
            return f"MonomialOrder({self.kind!r}, {list(map(str, self.weights))})"
        return f"MonomialOrder({self.kind!r})"

    def __getstate__(self):
        return {"kind": self.kind, "weights": self.weights}

    def __setstate__(self, state):
        self.kind = state["kind"]
        self.weights = state["weights"]
        self._cache = {}


DEGREVLEX = MonomialOrder("degrevlex")


def partial_derivative(p: Poly, i: int) -> Poly:
    """``d p / d x_i`` with a 1-based variable index."""
    if not 1 <= i <= p.ring.nvars:
        raise IndexError(f"variable index {i} out of range 1..{p.ring.nvars}")
    return p.diff(i - 1)


def det(matrix: Sequence[Sequence[Poly]], ring: Ring | None = None) -> Poly:
    """Exact determinant by the Leibniz expansion (matrices here are tiny)."""
    n = len(matrix)
    if n == 0:
        if ring is None:
            raise ValueError("ring needed for an empty determinant")
        return ring.one()
    ring = matrix[0][0].ring if isinstance(matrix[0][0], Poly) else ring
    total = ring.zero()
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for a, b in itertools.combinations(perm, 2) if a > b)
        term = ring.one()
        for row, col in enumerate(perm):
            entry = matrix[row][col]
            if not entry:
                break
            term = term * entry
        else:
            total = total + (-term if inversions % 2 else term)
    return total


def hessian(w: Poly) -> list[list[Poly]]:
    n = w.ring.nvars
    first = [w.diff(i) for i in range(n)]
    return [[first[i].diff(j) for j in range(n)] for i in range(n)]


def hessian_det(w: Poly) -> Poly:
    return det(hessian(w), w.ring)


def _solve_affine(rows: list[list[Fraction]], rhs: list[Fraction], n: int):
    """Row-reduce ``rows @ u = rhs``; return (particular, nullspace basis) or None."""
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((k for k in range(r, len(aug)) if aug[k][c]), None)
        if piv is None:
            continue
        aug[r], aug[piv] = aug[piv], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [v * inv for v in aug[r]]
        for k in range(len(aug)):
            if k != r and aug[k][c]:
                f = aug[k][c]
                aug[k] = [a - f * b for a, b in zip(aug[k], aug[r])]
        pivots.append(c)
        r += 1
    if any(row[n] for row in aug[r:]):
        return None
    particular = [Fraction(0)] * n
    for k, c in enumerate(pivots):
        particular[c] = aug[k][n]
    free = [c for c in range(n) if c not in pivots]
    null = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for k, c in enumerate(pivots):
            v[c] = -aug[k][f]
        null.append(v)
    return particular, null


def quasi_homogeneous_weights(w: Poly) -> tuple[Fraction, ...] | None:
    """Positive rational weights making every monomial of ``w`` weight 1.

    When the weights are not unique, the solution with the smallest spread
    (sum of squared deviations from the mean weight) is returned; it is
    unique and equals the all-equal vector whenever that is a solution.
    Returns ``None`` if no positive solution of that form exists.
    """
    n = w.ring.nvars
    if not w.terms or w.constant_coeff():
        return None
    rows = [[Fraction(a) for a in e] for e in w.terms]
    solved = _solve_affine(rows, [Fraction(1)] * len(rows), n)
    if solved is None:
        return None
    u0, null = solved
    if null:
        # Minimise |P(u0 + N t)|^2 with P the projection orthogonal to (1..1):
        # normal equations (PN)^T (PN) t = -(PN)^T P u0.
        def centre(v):
            m = sum(v) / n
            return [a - m for a in v]
        pn = [centre(v) for v in null]
        pu = centre(u0)
        k = len(null)
        gram = [[sum(a * b for a, b in zip(pn[i], pn[j])) for j in range(k)]
                for i in range(k)]
        rhs = [-sum(a * b for a, b in zip(pn[i], pu)) for i in range(k)]
        sol = _solve_affine(gram, rhs, k)
        t = sol[0] if sol is not None else [Fraction(0)] * k
        u0 = [u0[i] + sum(t[j] * null[j][i] for j in range(k)) for i in range(n)]
    if any(u <= 0 for u in u0):
        return None
    return tuple(u0)


def is_weighted_homogeneous(p: Poly, weights: Sequence[Fraction]) -> bool:
    return len(p.weighted_degrees(weights)) <= 1


def monomials_of_weight(weights: Sequence[int], target: int) -> list[Exps]:
    """All exponent vectors with ``sum(a_i * weights_i) == target`` (integer weights)."""
    out: list[Exps] = []
    n = len(weights)

    def rec(i, remaining, prefix):
        if i == n:
            if remaining == 0:
                out.append(tuple(prefix))
            return
        wi = weights[i]
        for a in range(remaining // wi + 1):
            prefix.append(a)
            rec(i + 1, remaining - a * wi, prefix)
            prefix.pop()

    if target >= 0:
        rec(0, target, [])
    return out


def polys(ring: Ring, texts: Iterable[str]) -> list[Poly]:
    return [parse_poly(t, ring) for t in texts]
