from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from blowup_chern import BiLaurentPoly, ParseError, WindowViolation, format_poly, parse_poly, validate_bundle
from blowup_chern.laurent import in_window, window_monomials

coeffs = st.fractions(min_value=-20, max_value=20, max_denominator=7).filter(lambda c: c != 0)
polys = st.dictionaries(st.tuples(st.integers(-6, 6), st.integers(0, 6)), coeffs, max_size=6).map(BiLaurentPoly)


@given(polys)
def test_print_parse_round_trip(p):
    assert parse_poly(format_poly(p)) == p


@given(polys, polys, polys)
def test_ring_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert a * b == b * a
    assert a - a == BiLaurentPoly.zero()


@given(polys)
def test_chart_change(p):
    v = p.to_v_chart()
    for (k, i), c in p.items():
        assert v.coeff(i - k, i) == c
    assert p.is_u_holomorphic() == all(k >= 0 for k, _ in p)


def test_parse_examples():
    p = parse_poly("3*z*u^2 - 1/2*z^-1*u")
    assert p.coeff(1, 2) == 3 and p.coeff(-1, 1) == Fraction(-1, 2)
    assert format_poly(p) == "-1/2*z^-1*u + 3*z*u^2"
    assert parse_poly("u") == BiLaurentPoly.monomial(0, 1)
    assert parse_poly("0") == BiLaurentPoly.zero()
    assert parse_poly("1/2 u^3") == BiLaurentPoly.monomial(0, 3, Fraction(1, 2))
    assert parse_poly(" - z * u + z u ") == BiLaurentPoly.zero()


@pytest.mark.parametrize("text", ["", "3*", "z^", "u^-1", "z^1.5", "(u", "u)", "z^-", "x", "1/0"])
def test_parse_errors(text):
    with pytest.raises((ParseError, ZeroDivisionError, ValueError)) as info:
        parse_poly(text)
    if isinstance(info.value, ParseError):
        assert 0 <= info.value.position <= len(text)
        assert info.value.expected


def test_parse_error_position():
    with pytest.raises(ParseError) as info:
        parse_poly("z + * u")
    assert info.value.position == 4


def test_window():
    assert window_monomials(0) == [] and window_monomials(1) == []
    assert window_monomials(2) == [(0, 1), (1, 1), (1, 2)]
    for j in range(6):
        mons = window_monomials(j)
        assert len(mons) == max(j - 1, 0) * (2 * j - 1)
        assert all(in_window(j, m) for m in mons)
    validate_bundle(3, "u + z^2*u^4 + z^-1*u")
    with pytest.raises(WindowViolation):
        validate_bundle(3, "z^3*u")
    with pytest.raises(WindowViolation):
        validate_bundle(1, "u")
    with pytest.raises(ValueError):
        validate_bundle(-1, "0")


def test_transition_round_trip():
    b = validate_bundle(3, "u - 2*z*u^2")
    a, c = parse_poly("1 + z*u"), parse_poly("u^2 + z^-1")
    assert b.from_v(*b.to_v(a, c)) == (a, c)
