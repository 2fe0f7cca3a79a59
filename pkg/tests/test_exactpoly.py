from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qhblowup.exactpoly import MonomialOrder, ParseError, PolyRing, rational

R = PolyRing(["x", "y", "z"])

coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=4)
monos = st.tuples(*[st.integers(0, 3)] * 3)
polys = st.dictionaries(monos, coeffs, max_size=5).map(R.from_terms)


@given(polys, polys, polys)
@settings(max_examples=60, deadline=None)
def test_ring_laws(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == R.zero()
    assert a * R.one() == a


@given(polys)
@settings(max_examples=60, deadline=None)
def test_parse_of_str_is_identity(a):
    assert R.parse(str(a)) == a


@given(polys, st.dictionaries(st.sampled_from("xyz"), coeffs))
@settings(max_examples=40, deadline=None)
def test_specialize_is_a_ring_map(a, values):
    b = R.parse("x*y - 2*z + 1/3")
    assert (a * b).specialize(values) == a.specialize(values) * b.specialize(values)
    assert (a + b).specialize(values) == a.specialize(values) + b.specialize(values)


def test_canonical_rendering():
    S = PolyRing(["E", "H"])
    p = S.parse("2*H^2 + E^2 - 5/2*E*H")
    assert str(p) == "E^2 - 5/2*E*H + 2*H^2"
    assert str(S.zero()) == "0"
    assert str(-S.parse("E")) == "-E"


def test_parser_implicit_products_and_errors():
    assert R.parse("2x y^2") == R.parse("2*x*y^2")
    assert R.parse("(x + y)^2") == R.parse("x^2 + 2*x*y + y^2")
    assert R.parse("x/2") == R.parse("1/2*x")
    with pytest.raises(ParseError):
        R.parse("x/y")
    with pytest.raises(ParseError):
        R.parse("w + 1")


def test_floats_refused():
    with pytest.raises(TypeError):
        rational(0.5)
    with pytest.raises(TypeError):
        R.constant(0.5)
    assert rational("7/3") == Fraction(7, 3)


def test_orders_and_leading_terms():
    p = R.parse("x*z^2 + y^3 + x^2")
    assert R.monomial_str(p.leading_monomial()) == "y^3"
    lex = R.with_order(MonomialOrder("lex"))
    assert lex.monomial_str(p.coerce(lex).leading_monomial()) == "x^2"
    weighted = PolyRing(["x", "q"], [1, 3])
    assert weighted.parse("x^2 + q").leading_monomial() == (0, 1)
    assert weighted.parse("x^3 - q").weighted_degree() == 3


def test_substitute_and_merge():
    p = R.parse("x^2 - y")
    assert p.substitute({"x": R.parse("y + 1")}) == R.parse("y^2 + y + 1")
    S = PolyRing(["t"])
    mixed = p + S.parse("t")
    assert set(mixed.ring.names) == {"x", "y", "z", "t"}
