import random
import warnings
from fractions import Fraction
from math import prod

import pytest

from mfhrr.milnor import (NonIsolatedError, NotQuasiHomogeneousWarning, hessian_residue,
                          milnor_ring, rational_det, residue, residue_pairing_matrix,
                          variable_power_membership)
from mfhrr.poly import Ring, quasi_homogeneous_weights

from conftest import random_poly

R1 = Ring("x")
R2 = Ring("x", "y")
R3 = Ring("x", "y", "z")

QH = [
    (R1, "x^2"), (R1, "x^3"), (R1, "x^6"),
    (R2, "x*y"), (R2, "x^2 + y^2"), (R2, "x^3 + y^3"), (R2, "x^3 + x*y^2"),
    (R2, "x^4 + y^3"), (R2, "x^2*y + y^5"),
    (R3, "x^2 + y^2 + z^2"), (R3, "x^3 + y^3 + z^3"), (R3, "x^3 + y*z"),
]


def milnor_orlik(weights):
    """mu = prod (1/u_i - 1) for a quasi-homogeneous isolated singularity."""
    return prod((1 / u - 1) for u in weights)


@pytest.mark.parametrize("ring, w", QH)
def test_mu_matches_weight_formula(ring, w):
    mr = milnor_ring(ring.parse(w))
    assert mr.mu == milnor_orlik(quasi_homogeneous_weights(mr.w))


@pytest.mark.parametrize("ring, w, mu", [
    (R2, "x^3 + y^3", 4), (R2, "x*y", 1), (R2, "x^3 + x*y^2", 4),
    (R3, "x^3 + y^3 + z^3", 8), (R3, "x^2 + y^2 + z^2", 1),
])
def test_mu_examples(ring, w, mu):
    assert milnor_ring(ring.parse(w)).mu == mu


@pytest.mark.parametrize("ring, w", QH)
def test_hessian_residue_is_mu(ring, w):
    mr = milnor_ring(ring.parse(w))
    assert hessian_residue(mr) == mr.mu


@pytest.mark.parametrize("ring, w", QH)
def test_pairing_nondegenerate(ring, w):
    mr = milnor_ring(ring.parse(w))
    assert rational_det(residue_pairing_matrix(mr)) != 0


def test_residue_xy():
    mr = milnor_ring(R2.parse("x*y"))
    assert residue(R2.one(), mr) == -1


@pytest.mark.parametrize("exps", [(2,), (3, 4), (2, 3, 4), (4, 4)])
def test_brieskorn_pham_closed_form(exps):
    """Res[g dx / (a_i x_i^{a_i - 1})] = coeff of prod x_i^{a_i - 2} in g / prod a_i."""
    ring = [R1, R2, R3][len(exps) - 1]
    w = sum((ring.var(i) ** a for i, a in enumerate(exps)), ring.zero())
    mr = milnor_ring(w)
    rng = random.Random(sum(exps))
    socle = tuple(a - 2 for a in exps)
    for _ in range(50):
        g = random_poly(rng, ring, sum(socle) + 2, 6, allow_fractions=True)
        assert residue(g, mr) == g.coeff(socle) / prod(exps)


def test_residue_vanishes_on_jacobian_ideal():
    rng = random.Random(7)
    for ring, w in QH:
        mr = milnor_ring(ring.parse(w))
        for _ in range(20):
            g = sum((random_poly(rng, ring, 2, 3) * j for j in mr.jacobian), ring.zero())
            assert residue(g, mr) == 0


def test_residue_is_representative_independent():
    rng = random.Random(8)
    for ring, w in QH:
        mr = milnor_ring(ring.parse(w))
        for _ in range(20):
            g = random_poly(rng, ring, 4, 5, allow_fractions=True)
            assert residue(g, mr) == residue(mr.reduce(g), mr)


def test_transformation_matrix_identity():
    for ring, w in QH:
        mr = milnor_ring(ring.parse(w))
        data = variable_power_membership(mr)
        assert data.check(mr)


def test_basis_and_coordinates():
    mr = milnor_ring(R2.parse("x^3 + y^3"))
    assert set(mr.basis) == {(0, 0), (1, 0), (0, 1), (1, 1)}
    assert mr.coordinates(R2.parse("x^2 + x*y")) == [
        1 if e == (1, 1) else 0 for e in mr.basis]


def test_non_isolated_raises():
    with pytest.raises(NonIsolatedError):
        milnor_ring(R2.parse("x^2"))


def test_non_quasi_homogeneous_warns():
    with pytest.warns(NotQuasiHomogeneousWarning):
        mr = milnor_ring(R1.parse("x^2 + x^3"))
    assert mr.weights is None


def test_rational_det():
    assert rational_det([[Fraction(1, 2), 1], [3, 4]]) == -1
    assert rational_det([[1, 2], [2, 4]]) == 0
