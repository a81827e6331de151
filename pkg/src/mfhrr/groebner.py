"""Buchberger's algorithm for ideals and submodules of free modules R^r.

Module elements are tuples of :class:`~mfhrr.poly.Poly`.  Terms of R^r are
ordered position-over-term with the *lower* position preferred, which makes
the graph construction ``(g_j | e_j)`` an elimination order: one Groebner
run yields a basis of the submodule, the expression of every basis element
in the inputs, and a Groebner basis of the syzygy module.

Internally vectors are dicts ``{(pos, exps): int}`` kept primitive, so all
reductions run on Python integers; conversion to Fractions happens only at
the API boundary.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from itertools import product
from math import gcd, lcm
from typing import Sequence

from .poly import DEGREVLEX, MonomialOrder, Poly, Ring

Term = tuple[int, tuple[int, ...]]
IVec = dict[Term, int]


class _Infinite:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITE"

    def __reduce__(self):
        return (_Infinite, ())


INFINITE = _Infinite()


class RankMismatch(ValueError):
    pass


# -- integer vector helpers ---------------------------------------------------

def _primitive(vec: IVec, key) -> IVec:
    if not vec:
        return vec
    g = reduce(gcd, vec.values())
    lead = vec[max(vec, key=key)]
    if lead < 0:
        g = -g
    if g == 1:
        return vec
    return {t: c // g for t, c in vec.items()}


def _to_ivec(vec: Sequence[Poly]) -> tuple[IVec, Fraction]:
    """Integer vector ``v`` and scale ``s`` with ``vec == s * v``."""
    den = 1
    for p in vec:
        for c in p.terms.values():
            den = lcm(den, c.denominator)
    out = {}
    for pos, p in enumerate(vec):
        for e, c in p.terms.items():
            out[(pos, e)] = int(c * den)
    return out, Fraction(1, den)


def _from_ivec(vec: IVec, ring: Ring, rank: int, scale: Fraction = Fraction(1)) -> tuple[Poly, ...]:
    comps: list[dict] = [{} for _ in range(rank)]
    for (pos, e), c in vec.items():
        comps[pos][e] = c * scale
    return tuple(Poly(ring, t) for t in comps)


def _divides(a: tuple[int, ...], b: tuple[int, ...]) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm_exps(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def _sub_exps(a, b):
    return tuple(x - y for x, y in zip(a, b))


class _Elem:
    __slots__ = ("lt", "lc", "terms")

    def __init__(self, lt: Term, lc: int, terms: IVec):
        self.lt = lt
        self.lc = lc
        self.terms = terms


class _Engine:
    """Term ordering plus reduction/S-vector primitives for one run."""

    def __init__(self, order: MonomialOrder):
        self.order = order
        self._keys: dict[Term, tuple] = {}

    def tkey(self, t: Term):
        k = self._keys.get(t)
        if k is None:
            k = (-t[0], self.order.key(t[1]))
            self._keys[t] = k
        return k

    def elem(self, vec: IVec) -> _Elem:
        vec = _primitive(vec, self.tkey)
        lt = max(vec, key=self.tkey)
        return _Elem(lt, vec[lt], vec)

    def reduce(self, f: IVec, elems: list[_Elem], index: dict[int, list[int]],
               full: bool = True, record: dict | None = None) -> tuple[IVec, int]:
        """Reduce ``f``; returns ``(r, s)`` with ``s*f = sum q_i g_i + r``.

        ``record`` (if given) accumulates the quotients ``q_i`` as
        ``{elem_index: {shift_exps: int}}``.
        """
        f = dict(f)
        rem: IVec = {}
        scale = 1
        tkey = self.tkey
        while f:
            t = max(f, key=tkey)
            c = f[t]
            pos, exps = t
            div = None
            for idx in index.get(pos, ()):
                if _divides(elems[idx].lt[1], exps):
                    div = idx
                    break
            if div is None:
                if not full:
                    rem.update(f)
                    break
                rem[t] = c
                del f[t]
                continue
            g = elems[div]
            shift = _sub_exps(exps, g.lt[1])
            d = gcd(c, g.lc)
            a = g.lc // d
            b = c // d
            if a != 1:
                f = {k: v * a for k, v in f.items()}
                rem = {k: v * a for k, v in rem.items()}
                scale *= a
                if record is not None:
                    for q in record.values():
                        for s in q:
                            q[s] *= a
            for (p, e), v in g.terms.items():
                k = (p, tuple(x + y for x, y in zip(e, shift)))
                nv = f.get(k, 0) - b * v
                if nv:
                    f[k] = nv
                else:
                    f.pop(k, None)
            if record is not None:
                q = record.setdefault(div, {})
                q[shift] = q.get(shift, 0) + b
        return rem, scale

    def spoly(self, f: _Elem, g: _Elem) -> IVec:
        m = _lcm_exps(f.lt[1], g.lt[1])
        sf = _sub_exps(m, f.lt[1])
        sg = _sub_exps(m, g.lt[1])
        d = gcd(f.lc, g.lc)
        a = g.lc // d
        b = f.lc // d
        out: IVec = {}
        for (p, e), v in f.terms.items():
            k = (p, tuple(x + y for x, y in zip(e, sf)))
            out[k] = out.get(k, 0) + a * v
        for (p, e), v in g.terms.items():
            k = (p, tuple(x + y for x, y in zip(e, sg)))
            nv = out.get(k, 0) - b * v
            if nv:
                out[k] = nv
            else:
                out.pop(k, None)
        return {k: v for k, v in out.items() if v}


def _buchberger_internal(vectors: list[IVec], order: MonomialOrder,
                         ideal: bool) -> tuple[_Engine, list[_Elem]]:
    """Reduced Groebner basis (primitive integer vectors, sorted by lead)."""
    eng = _Engine(order)
    elems: list[_Elem] = []
    active: list[int] = []
    index: dict[int, list[int]] = {}
    pairs: dict[tuple[int, int], Term] = {}
    heap: list = []

    def rebuild_index():
        index.clear()
        for i in active:
            index.setdefault(elems[i].lt[0], []).append(i)

    def update(h: int):
        hl = elems[h].lt
        cands = [g for g in active if elems[g].lt[0] == hl[0]]
        lcms = {g: _lcm_exps(hl[1], elems[g].lt[1]) for g in cands}

        def coprime(g):
            return ideal and all(not (x and y) for x, y in zip(hl[1], elems[g].lt[1]))

        kept = []
        for k, g1 in enumerate(cands):
            l1 = lcms[g1]
            if coprime(g1):
                kept.append(g1)
                continue
            rest = cands[k + 1:] + kept
            if not any(_divides(lcms[g2], l1) for g2 in rest if g2 != g1):
                kept.append(g1)
        new_pairs = [g for g in kept if not coprime(g)]
        for (g1, g2), l in list(pairs.items()):
            if l[0] != hl[0] or not _divides(hl[1], l[1]):
                continue
            l1h = _lcm_exps(elems[g1].lt[1], hl[1])
            l2h = _lcm_exps(elems[g2].lt[1], hl[1])
            if l1h != l[1] and l2h != l[1]:
                del pairs[(g1, g2)]
        for g in new_pairs:
            key = (g, h)
            lt = (hl[0], lcms[g])
            pairs[key] = lt
            heapq.heappush(heap, (sum(lt[1]), eng.tkey(lt), key))
        active[:] = [g for g in active if not (elems[g].lt[0] == hl[0]
                                               and _divides(hl[1], elems[g].lt[1]))]
        active.append(h)
        rebuild_index()

    # Insert inputs one at a time, each reduced against what is present.
    for v in sorted((v for v in vectors if v), key=lambda v: eng.tkey(max(v, key=eng.tkey))):
        r, _ = eng.reduce(v, elems, index)
        if r:
            elems.append(eng.elem(r))
            update(len(elems) - 1)

    while heap:
        _, _, key = heapq.heappop(heap)
        if key not in pairs:
            continue
        del pairs[key]
        s = eng.spoly(elems[key[0]], elems[key[1]])
        if not s:
            continue
        r, _ = eng.reduce(s, elems, index)
        if r:
            elems.append(eng.elem(r))
            update(len(elems) - 1)

    # Interreduce tails to reach the reduced basis.
    basis = [elems[i] for i in active]
    basis.sort(key=lambda e: eng.tkey(e.lt))
    final: list[_Elem] = []
    for k, g in enumerate(basis):
        others = basis[:k] + basis[k + 1:]
        idx: dict[int, list[int]] = {}
        for j, o in enumerate(others):
            idx.setdefault(o.lt[0], []).append(j)
        tail = dict(g.terms)
        lc = tail.pop(g.lt)
        r, s = eng.reduce(tail, others, idx)
        r[g.lt] = lc * s
        final.append(eng.elem(r))
    return eng, final


# -- public API ---------------------------------------------------------------

def _as_vector(g) -> tuple[Poly, ...]:
    return (g,) if isinstance(g, Poly) else tuple(g)


@dataclass(frozen=True, eq=False)
class DivisionRecord:
    """``f = sum(cofactors[i] * generators[i]) + remainder``."""

    remainder: tuple[Poly, ...]
    cofactors: tuple[Poly, ...]


@dataclass(frozen=True, eq=False)
class GroebnerBasis:
    """Reduced Groebner basis of a submodule of R^rank (rank 1: an ideal).

    ``generators`` are monic.  When built with ``track=True``,
    ``transform[i]`` expresses ``generators[i]`` in the original inputs and
    ``syzygies`` is a Groebner basis of the relations among the inputs.
    """

    generators: tuple[tuple[Poly, ...], ...]
    order: MonomialOrder
    rank: int
    ring: Ring
    reduced: bool = True
    inputs: tuple[tuple[Poly, ...], ...] = ()
    transform: tuple[tuple[Poly, ...], ...] | None = None
    syzygies: tuple[tuple[Poly, ...], ...] | None = None
    _elems: list = field(default_factory=list, repr=False)
    _scales: list = field(default_factory=list, repr=False)

    def __len__(self) -> int:
        return len(self.generators)

    @property
    def is_ideal(self) -> bool:
        return self.rank == 1

    def polys(self) -> list[Poly]:
        """Generators of an ideal basis as plain polynomials."""
        return [g[0] for g in self.generators]

    def leading_terms(self) -> list[Term]:
        return [e.lt for e in self._elems]

    def _index(self) -> dict[int, list[int]]:
        idx: dict[int, list[int]] = {}
        for j, e in enumerate(self._elems):
            idx.setdefault(e.lt[0], []).append(j)
        return idx

    def engine(self) -> _Engine:
        return _Engine(self.order)

    def lift(self, cofactors: Sequence[Poly]) -> tuple[Poly, ...]:
        """Re-express cofactors on ``generators`` as cofactors on ``inputs``."""
        if self.transform is None:
            raise ValueError("basis was built without track=True")
        out = [self.ring.zero() for _ in self.inputs]
        for c, row in zip(cofactors, self.transform):
            if c:
                for j, t in enumerate(row):
                    if t:
                        out[j] = out[j] + c * t
        return tuple(out)


def buchberger(gens: Sequence, order: MonomialOrder = DEGREVLEX,
               track: bool = False, rank: int | None = None) -> GroebnerBasis:
    """Reduced Groebner basis of the submodule generated by ``gens``.

    ``gens`` holds polynomials (ideal case) or equal-length tuples of
    polynomials.  With ``track=True`` the graph construction is used so the
    result also carries a transformation matrix and the input syzygies.
    """
    vecs = [_as_vector(g) for g in gens]
    if not vecs and rank is None:
        raise ValueError("need at least one generator or an explicit rank")
    r = len(vecs[0]) if vecs else rank
    if any(len(v) != r for v in vecs) or (rank is not None and rank != r):
        raise RankMismatch("generators have inconsistent rank")
    ring = next((p.ring for v in vecs for p in v), None)
    if ring is None:
        raise ValueError("cannot infer the ring from an empty generator list")
    m = len(vecs)
    inputs = tuple(vecs)
    if track:
        zero = ring.zero()
        one = ring.one()
        aug = [v + tuple(one if j == i else zero for j in range(m))
               for i, v in enumerate(vecs)]
        ivecs = [_to_ivec(v)[0] for v in aug]
        eng, elems = _buchberger_internal(ivecs, order, ideal=False)
        main, syz = [], []
        for e in elems:
            (main if e.lt[0] < r else syz).append(e)
        gens_out, transform, scales = [], [], []
        for e in main:
            full = _from_ivec(e.terms, ring, r + m, Fraction(1, e.lc))
            gens_out.append(full[:r])
            transform.append(full[r:])
            scales.append(Fraction(1, e.lc))
        syzygies = []
        for e in syz:
            shifted = {(p - r, ex): c for (p, ex), c in e.terms.items()}
            syzygies.append(_from_ivec(shifted, ring, m))
        first = [_Elem(e.lt, e.lc, {t: c for t, c in e.terms.items() if t[0] < r})
                 for e in main]
        return GroebnerBasis(tuple(gens_out), order, r, ring, True, inputs,
                             tuple(transform), tuple(syzygies), first, scales)
    ivecs = [_to_ivec(v)[0] for v in vecs]
    eng, elems = _buchberger_internal(ivecs, order, ideal=(r == 1))
    gens_out = [_from_ivec(e.terms, ring, r, Fraction(1, e.lc)) for e in elems]
    return GroebnerBasis(tuple(gens_out), order, r, ring, True, inputs, None, None,
                         elems, [Fraction(1, e.lc) for e in elems])


def normal_form_with_cofactors(f, gb: GroebnerBasis) -> DivisionRecord:
    """Divide ``f`` by ``gb``; cofactors refer to ``gb.generators``."""
    vec = _as_vector(f)
    if len(vec) != gb.rank:
        raise RankMismatch(f"vector of rank {len(vec)} against basis of rank {gb.rank}")
    iv, s0 = _to_ivec(vec)
    record: dict = {}
    rem, scale = gb.engine().reduce(iv, gb._elems, gb._index(), record=record)
    factor = s0 / scale
    remainder = _from_ivec(rem, gb.ring, gb.rank, factor)
    cof = []
    for i, e in enumerate(gb._elems):
        q = record.get(i, {})
        # internal element = lc * monic generator
        cof.append(Poly(gb.ring, {sh: Fraction(c) * e.lc * factor for sh, c in q.items()}))
    return DivisionRecord(remainder, tuple(cof))


def normal_form(f, gb: GroebnerBasis) -> tuple[Poly, ...] | Poly:
    """Unique normal form; returns a Poly when ``f`` is a Poly."""
    vec = _as_vector(f)
    if len(vec) != gb.rank:
        raise RankMismatch(f"vector of rank {len(vec)} against basis of rank {gb.rank}")
    iv, s0 = _to_ivec(vec)
    rem, scale = gb.engine().reduce(iv, gb._elems, gb._index())
    out = _from_ivec(rem, gb.ring, gb.rank, s0 / scale)
    return out[0] if isinstance(f, Poly) else out


def syzygy_basis(m: Sequence[Sequence[Poly]], ring: Ring | None = None) -> list[tuple[Poly, ...]]:
    """Generators of ``{v : m v = 0}`` for an r x c polynomial matrix ``m``."""
    rows = [list(r) for r in m]
    if ring is None:
        ring = rows[0][0].ring
    r = len(rows)
    c = len(rows[0]) if rows else 0
    if c == 0:
        return []
    if r == 0:
        return [tuple(ring.one() if i == j else ring.zero() for i in range(c)) for j in range(c)]
    columns = [tuple(rows[i][j] for i in range(r)) for j in range(c)]
    gb = buchberger(columns, track=True)
    return list(gb.syzygies)


def s_vector(f: tuple[Poly, ...], g: tuple[Poly, ...], order: MonomialOrder = DEGREVLEX):
    """Rational S-vector of two module elements (``None`` if positions differ)."""
    eng = _Engine(order)
    fi, fs = _to_ivec(f)
    gi, gs = _to_ivec(g)
    ef, eg = eng.elem(fi), eng.elem(gi)
    if ef.lt[0] != eg.lt[0]:
        return None
    return _from_ivec(eng.spoly(ef, eg), f[0].ring, len(f))


def is_groebner(gb: GroebnerBasis) -> bool:
    """Buchberger's criterion: every S-vector reduces to zero."""
    eng = gb.engine()
    idx = gb._index()
    for i, a in enumerate(gb._elems):
        for b in gb._elems[i + 1:]:
            if a.lt[0] != b.lt[0]:
                continue
            r, _ = eng.reduce(eng.spoly(a, b), gb._elems, idx)
            if r:
                return False
    return True


def standard_monomials(gb: GroebnerBasis):
    """Standard terms ``(pos, exps)`` of R^rank / gb, or INFINITE."""
    n = gb.ring.nvars
    by_pos: dict[int, list[tuple[int, ...]]] = {}
    for pos, e in gb.leading_terms():
        by_pos.setdefault(pos, []).append(e)
    out = []
    for pos in range(gb.rank):
        leads = by_pos.get(pos, [])
        bounds = []
        for i in range(n):
            pure = [e[i] for e in leads if all(a == 0 for j, a in enumerate(e) if j != i)]
            if not pure:
                return INFINITE
            bounds.append(min(pure))
        for e in product(*(range(b) for b in bounds)):
            if not any(_divides(l, e) for l in leads):
                out.append((pos, tuple(e)))
    return out


def quotient_dim(gb: GroebnerBasis):
    """``dim_Q R^rank / <gb>`` or INFINITE."""
    std = standard_monomials(gb)
    return INFINITE if std is INFINITE else len(std)


def eliminate(gb: GroebnerBasis, first: int) -> GroebnerBasis:
    """Basis of ``M cap (0 + R^{rank-first})``, positions shifted down by ``first``.

    Valid because position-over-term with lower positions preferred is an
    elimination order for the first ``first`` positions.
    """
    rank = gb.rank - first
    elems = []
    for e in gb._elems:
        if e.lt[0] >= first:
            terms = {(p - first, ex): c for (p, ex), c in e.terms.items()}
            elems.append(_Elem((e.lt[0] - first, e.lt[1]), e.lc, terms))
    gens = tuple(_from_ivec(e.terms, gb.ring, rank, Fraction(1, e.lc)) for e in elems)
    return GroebnerBasis(gens, gb.order, rank, gb.ring, True, (), None, None,
                         elems, [Fraction(1, e.lc) for e in elems])

