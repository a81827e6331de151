"""Milnor rings and Grothendieck residues of isolated singularities.

The residue ``Res[g dx / (d1 w, ..., dn w)]`` at the origin is computed with
the transformation law: find ``x_i^{N_i} = sum_j T_ij d_j w`` and take the
coefficient of ``prod x_i^{N_i - 1}`` in ``g * det(T)``.  The Hessian
identity ``Res[hess(w)] = mu`` is the normalisation cross-check.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .groebner import (INFINITE, GroebnerBasis, buchberger, normal_form,
                       normal_form_with_cofactors, standard_monomials)
from .poly import DEGREVLEX, Poly, det, hessian_det, quasi_homogeneous_weights


class NonIsolatedError(ValueError):
    """The Jacobian ideal has infinite colength (``NON_ISOLATED``)."""


class NotQuasiHomogeneousWarning(UserWarning):
    """``w`` admits no positive quasi-homogeneous weights."""


@dataclass(frozen=True, eq=False)
class MilnorRing:
    w: Poly
    jacobian: tuple[Poly, ...]
    jacobian_gb: GroebnerBasis
    basis: tuple[tuple[int, ...], ...]
    mu: int
    weights: tuple[Fraction, ...] | None

    @property
    def ring(self):
        return self.w.ring

    @property
    def n(self) -> int:
        return self.w.ring.nvars

    def reduce(self, g: Poly) -> Poly:
        """Milnor normal form of ``g``."""
        return normal_form(g, self.jacobian_gb)

    def basis_polys(self) -> list[Poly]:
        return [self.ring.monomial(e) for e in self.basis]

    def coordinates(self, g: Poly) -> list[Fraction]:
        nf = self.reduce(g)
        return [nf.coeff(e) for e in self.basis]


def milnor_ring(w: Poly) -> MilnorRing:
    if w.is_constant():
        raise ValueError("w must be non-constant")
    jac = tuple(w.diff(i) for i in range(w.ring.nvars))
    gb = buchberger(jac, DEGREVLEX, track=True)
    std = standard_monomials(gb)
    if std is INFINITE:
        raise NonIsolatedError(f"Jacobian ideal of {w} has infinite colength")
    weights = quasi_homogeneous_weights(w)
    if weights is None:
        warnings.warn(f"{w} is not quasi-homogeneous", NotQuasiHomogeneousWarning,
                      stacklevel=2)
    basis = tuple(sorted((e for _, e in std), key=lambda e: (sum(e), e)))
    return MilnorRing(w, jac, gb, basis, len(basis), weights)


@dataclass(frozen=True, eq=False)
class ResidueData:
    """``x_i^{powers[i]} = sum_j cofactor_matrix[i][j] * d_j w``."""

    powers: tuple[int, ...]
    cofactor_matrix: tuple[tuple[Poly, ...], ...]
    det_T: Poly

    def check(self, mr: MilnorRing) -> bool:
        ring = mr.ring
        for i, (N, row) in enumerate(zip(self.powers, self.cofactor_matrix)):
            lhs = ring.var(i) ** N
            rhs = ring.zero()
            for t, d in zip(row, mr.jacobian):
                rhs = rhs + t * d
            if lhs != rhs:
                return False
        return True


def variable_power_membership(mr: MilnorRing, extra: Sequence[int] | None = None) -> ResidueData:
    """Least ``N_i`` with ``x_i^{N_i}`` in the Jacobian ideal, plus cofactors.

    ``extra`` raises each power by the given amount (used to check that
    the residue does not depend on this choice).
    """
    ring = mr.ring
    powers, rows = [], []
    for i in range(mr.n):
        x = ring.var(i)
        N = 1
        while normal_form(x ** N, mr.jacobian_gb):
            N += 1
        if extra:
            N += extra[i]
        rec = normal_form_with_cofactors(x ** N, mr.jacobian_gb)
        assert not any(rec.remainder)
        powers.append(N)
        rows.append(mr.jacobian_gb.lift(rec.cofactors))
    return ResidueData(tuple(powers), tuple(rows), det(rows, ring))


def residue(g: Poly, mr: MilnorRing, data: ResidueData | None = None) -> Fraction:
    """``Res_0[g dx_1..dx_n / (d_1 w, ..., d_n w)]``."""
    if data is None:
        data = _residue_data(mr)
    target = tuple(N - 1 for N in data.powers)
    total = Fraction(0)
    # coefficient of x^target in g * det_T, without forming the product
    for e1, c1 in g.terms.items():
        need = tuple(t - a for t, a in zip(target, e1))
        if min(need) < 0:
            continue
        c2 = data.det_T.terms.get(need)
        if c2:
            total += c1 * c2
    return total


def _residue_data(mr: MilnorRing) -> ResidueData:
    cached = mr.__dict__.get("_residue_data")
    if cached is None:
        cached = variable_power_membership(mr)
        object.__setattr__(mr, "_residue_data", cached)
    return cached


def residue_pairing_matrix(mr: MilnorRing) -> list[list[Fraction]]:
    basis = mr.basis_polys()
    return [[residue(a * b, mr) for b in basis] for a in basis]


def rational_det(m: list[list[Fraction]]) -> Fraction:
    m = [list(map(Fraction, row)) for row in m]
    n = len(m)
    sign = 1
    out = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if m[r][c]), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            sign = -sign
        out *= m[c][c]
        inv = 1 / m[c][c]
        for r in range(c + 1, n):
            f = m[r][c] * inv
            if f:
                m[r] = [a - f * b for a, b in zip(m[r], m[c])]
    return sign * out


def hessian_residue(mr: MilnorRing) -> Fraction:
    return residue(hessian_det(mr.w), mr)
