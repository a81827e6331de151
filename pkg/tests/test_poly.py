import random
from fractions import Fraction

import pytest
import sympy
from hypothesis import given, strategies as st

from mfhrr.poly import (DEGREVLEX, MonomialOrder, ParseError, Ring, det, hessian_det,
                        is_weighted_homogeneous, monomials_of_weight, parse_poly,
                        partial_derivative, quasi_homogeneous_weights)

from conftest import random_poly

R2 = Ring("x", "y")
R3 = Ring("x", "y", "z")
SX, SY, SZ = sympy.symbols("x y z")


def to_sympy(p):
    syms = sympy.symbols(p.ring.names)
    return sympy.expand(sum(sympy.Rational(c.numerator, c.denominator)
                            * sympy.Mul(*(s ** a for s, a in zip(syms, e)))
                            for e, c in p.terms.items()))


exps3 = st.tuples(*[st.integers(0, 3)] * 3)
polys3 = st.dictionaries(exps3, st.fractions(min_value=-5, max_value=5, max_denominator=4),
                         max_size=5).map(lambda d: R3.zero() + __import__("mfhrr").poly.Poly(R3, d))


def test_parse_basic():
    p = R2.parse("3*x^2 - 1/2*x*y + y^3 - 7")
    assert p.coeff((2, 0)) == 3
    assert p.coeff((1, 1)) == Fraction(-1, 2)
    assert p.coeff((0, 3)) == 1
    assert p.constant_coeff() == -7


def test_parse_whitespace_insignificant():
    assert R2.parse(" x *y+ 2 * x") == R2.parse("x*y + 2*x")
    assert R2.parse("-x") == -R2.var("x")


@pytest.mark.parametrize("text", ["x^", "x + * y", "q + 1", "x^-1", "(x+y)", "1/0", "", "3x"])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        R2.parse(text)


@given(polys3)
def test_format_parse_round_trip(p):
    assert parse_poly(str(p), R3) == p


@given(polys3, polys3, polys3)
def test_ring_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a - a == R3.zero()


@given(polys3, polys3)
def test_arithmetic_matches_sympy(a, b):
    assert to_sympy(a * b) == sympy.expand(to_sympy(a) * to_sympy(b))
    assert to_sympy(a - b) == sympy.expand(to_sympy(a) - to_sympy(b))


@given(polys3, polys3)
def test_leibniz_rule(a, b):
    for i in range(3):
        assert (a * b).diff(i) == a.diff(i) * b + a * b.diff(i)


def test_partial_derivative_is_one_based():
    p = R2.parse("x^3*y + y^2")
    assert partial_derivative(p, 1) == R2.parse("3*x^2*y")
    assert partial_derivative(p, 2) == R2.parse("x^3 + 2*y")


def test_evaluate():
    assert R2.parse("x^2 - 1/2*y").evaluate([3, 4]) == 7


def test_degrevlex_order():
    k = DEGREVLEX.key
    # x > y > z, and for equal degree the smallest last exponent wins
    assert k((1, 0, 0)) > k((0, 1, 0)) > k((0, 0, 1))
    assert k((1, 0, 1)) < k((0, 2, 0))
    assert k((2, 0, 0)) > k((0, 0, 1))


def test_degrevlex_matches_sympy():
    rng = random.Random(5)
    for _ in range(200):
        a = tuple(rng.randint(0, 3) for _ in range(3))
        b = tuple(rng.randint(0, 3) for _ in range(3))
        if a == b:
            continue
        mine = DEGREVLEX.key(a) > DEGREVLEX.key(b)
        theirs = sympy.polys.orderings.grevlex(a) > sympy.polys.orderings.grevlex(b)
        assert mine == theirs


def test_weighted_order_rejects_nonpositive():
    with pytest.raises(ValueError):
        MonomialOrder("wdegrevlex", [1, 0])


def test_det_matches_sympy(rng):
    for _ in range(50):
        m = [[random_poly(rng, R2, 2, 2) for _ in range(3)] for _ in range(3)]
        sm = sympy.Matrix([[to_sympy(e) for e in row] for row in m])
        assert to_sympy(det(m)) == sympy.expand(sm.det())


def test_hessian_det_examples():
    assert hessian_det(R2.parse("x^3 + y^3")) == R2.parse("36*x*y")
    assert hessian_det(R2.parse("x*y")) == R2.const(-1)


@pytest.mark.parametrize("w, weights", [
    ("x^3 + y^3", (Fraction(1, 3), Fraction(1, 3))),
    ("x*y", (Fraction(1, 2), Fraction(1, 2))),
    ("x^3 + x*y^2", (Fraction(1, 3), Fraction(1, 3))),
    ("x^4 + y^2", (Fraction(1, 4), Fraction(1, 2))),
])
def test_quasi_homogeneous_weights(w, weights):
    p = R2.parse(w)
    assert quasi_homogeneous_weights(p) == weights
    assert is_weighted_homogeneous(p, weights)


def test_weights_none_for_non_quasi_homogeneous():
    assert quasi_homogeneous_weights(R2.parse("x^2 + x^3")) is None
    assert quasi_homogeneous_weights(R2.parse("x^2 + 1")) is None


def test_weights_underdetermined_picks_balanced_solution():
    # x*y alone allows u + v = 1; the balanced choice is (1/2, 1/2)
    w = quasi_homogeneous_weights(R3.parse("x*y + z^2"))
    assert w == (Fraction(1, 2), Fraction(1, 2), Fraction(1, 2))


def test_monomials_of_weight():
    got = set(monomials_of_weight([1, 2], 4))
    assert got == {(4, 0), (2, 1), (0, 2)}
    assert monomials_of_weight([1, 1], -1) == []


def test_embed_into_larger_ring():
    p = R2.parse("x*y + 1")
    q = p.embed(R3)
    assert q == R3.parse("x*y + 1")
