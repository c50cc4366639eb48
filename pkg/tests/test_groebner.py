from fractions import Fraction

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from blowup_chern.groebner import Lifter, groebner, syzygies
from blowup_chern.linalg import span_rank
from blowup_chern.local_algebra import XYPoly, terms_to_vector, vector_to_terms

coeff = st.integers(-3, 3).filter(bool).map(Fraction)
mono = st.tuples(st.integers(0, 3), st.integers(0, 3))
polys = st.dictionaries(mono, coeff, max_size=3).map(XYPoly)


def columns_strategy(rank, max_cols=3):
    vec = st.tuples(*[polys] * rank).filter(any)
    return st.lists(vec, min_size=1, max_size=max_cols)


def as_terms(cols):
    return [vector_to_terms(c) for c in cols]


@given(columns_strategy(2), st.sampled_from(["grevlex", "grlex", "lex"]))
def test_s_polynomials_reduce_to_zero(cols, order):
    gb = groebner(as_terms(cols), 2, order)
    n = len(gb.elements)
    for i in range(n):
        for k in range(i + 1, n):
            s = gb.s_polynomial(i, k)
            if s:
                r, _ = gb.reduce(s)
                assert not r
    for c in as_terms(cols):
        assert gb.contains(c)


@given(columns_strategy(2))
def test_syzygy_identity(cols):
    syz = syzygies(as_terms(cols), 2)
    for s in syz:
        total = [XYPoly(), XYPoly()]
        for idx, poly in s.items():
            f = XYPoly(poly)
            for comp in range(2):
                total[comp] = total[comp] + f * cols[idx][comp]
        assert not any(total)


def test_koszul_syzygy():
    x, y = XYPoly.x(), XYPoly.y()
    syz = syzygies(as_terms([(x,), (y,)]), 1)
    assert len(syz) == 1
    s = syz[0]
    vec = (XYPoly(s.get(0, {})), XYPoly(s.get(1, {})))
    assert vec in ((y, -x), (-y, x))


@given(columns_strategy(2), polys, polys)
def test_lifter_recovers_combination(cols, f, g):
    target = [XYPoly(), XYPoly()]
    for comp in range(2):
        target[comp] = f * cols[0][comp] + g * cols[-1][comp]
    coeffs = Lifter(as_terms(cols), 2).lift(vector_to_terms(tuple(target)))
    assert coeffs is not None
    back = [XYPoly(), XYPoly()]
    for idx, poly in coeffs.items():
        for comp in range(2):
            back[comp] = back[comp] + XYPoly(poly) * cols[idx][comp]
    assert tuple(back) == tuple(target)


def test_lifter_rejects_non_members():
    x, y = XYPoly.x(), XYPoly.y()
    lifter = Lifter(as_terms([(x * x,), (y,)]), 1)
    assert lifter.lift(vector_to_terms((x,))) is None


def macaulay_quotient_dim(cols, rank, m):
    """dim R^rank / (span(cols) + m^m R^rank) by plain linear algebra on degree < m."""
    basis = [(c, a, d - a) for c in range(rank) for d in range(m) for a in range(d + 1)]
    index = {t: i for i, t in enumerate(basis)}
    rows = []
    for col in cols:
        for d in range(m):
            for a in range(d + 1):
                shift = XYPoly({(a, d - a): 1})
                vec = {}
                for comp, poly in enumerate(col):
                    for (pa, pb), v in (shift * poly).items():
                        if pa + pb < m:
                            vec[index[(comp, pa, pb)]] = v
                if vec:
                    rows.append(vec)
    return len(basis) - span_rank(rows, len(basis))


@given(columns_strategy(2), st.integers(1, 5), st.sampled_from(["grevlex", "lex"]))
def test_truncated_dimension_matches_macaulay_matrix(cols, m, order):
    gb = groebner(as_terms(cols), 2, order, truncate=m)
    assert gb.quotient_dimension() == macaulay_quotient_dim(cols, 2, m)


@pytest.mark.parametrize(
    "gens",
    [["x**2", "x*y", "y**2"], ["x - x**2", "y"], ["x**3 - y**2", "x*y"], ["y**2 + x**3", "x**2*y + x"]],
)
@pytest.mark.parametrize("m", [3, 6])
def test_truncated_dimension_matches_sympy_ideal(gens, m):
    x, y = sympy.symbols("x y")
    exprs = [sympy.sympify(g) for g in gens]
    power = [x**a * y ** (m - a) for a in range(m + 1)]
    G = sympy.groebner(exprs + power, x, y, order="grevlex")
    leads = [sympy.Poly(g, x, y).monoms(order="grevlex")[0] for g in G.exprs]
    expected = sum(
        1
        for d in range(m)
        for a in range(d + 1)
        if not any(a >= la and d - a >= lb for la, lb in leads)
    )
    cols = [(XYPoly({k: Fraction(int(v)) for k, v in sympy.Poly(e, x, y).as_dict().items()}),) for e in exprs]
    assert groebner(as_terms(cols), 1, "grevlex", truncate=m).quotient_dimension() == expected


def test_known_quotients():
    x, y = XYPoly.x(), XYPoly.y()
    gb = groebner(as_terms([(x * x,), (x * y,), (y * y,)]), 1, truncate=8)
    assert gb.quotient_dimension() == 3
    assert terms_to_vector(vector_to_terms((x, y)), 2) == (x, y)
