from fractions import Fraction

import pytest

from blowup_chern import Presentation, RankDeficient, XYPoly, double_dual_map, l_of_Q
from blowup_chern.local_algebra import (
    colength,
    double_dual,
    dual,
    hom_to_ring,
    local_kernel_basis,
    local_generator_count,
    minimal_relation_count,
    minimalize_relations,
    prune,
    rank_two_kernel,
    transpose_cokernel,
    truncated_dimension,
)

x, y = XYPoly.x(), XYPoly.y()
one, zero = XYPoly.const(1), XYPoly()


def power_ideal_module(j):
    """``R + m^j`` presented by the ``j + 1`` monomials of ``m^j`` and a free summand."""
    gens = j + 2
    rels = []
    for k in range(1, j + 1):
        rel = [zero] * gens
        rel[k - 1] = y
        rel[k] = -x
        rels.append(tuple(rel))
    return Presentation(gens, tuple(rels))


@pytest.mark.parametrize("order", ["grevlex", "grlex"])
@pytest.mark.parametrize("r", [1, 2, 3])
def test_free_module_is_reflexive(r, order):
    P = Presentation(r)
    assert dual(P, order).gens == r
    assert len(dual(dual(P, order), order).relations) == 0
    assert colength(double_dual_map(P, order).cokernel(), 4, order).value == 0


def test_maximal_ideal_plus_free():
    # R^3 / (y e1 - x e2) is m + R: its double dual is R^2 with cokernel R/m
    M = Presentation(3, ((y, -x, zero),))
    hom = hom_to_ring(M)
    assert set(hom.generators) == {(zero, zero, one), (x, y, zero)}
    assert not hom.presentation.relations
    assert l_of_Q(M) == 1


@pytest.mark.parametrize("j", range(1, 5))
def test_power_of_maximal_ideal(j):
    P = power_ideal_module(j)
    assert l_of_Q(P) == j * (j + 1) // 2
    assert local_generator_count(P) == j + 2
    assert minimal_relation_count(P) == j


def test_presentation_independence():
    base = Presentation(3, ((y, -x, zero),))
    # a redundant generator g4 = x*g1 + g3 and a redundant relation
    redundant = Presentation(
        4,
        (
            (y, -x, zero, zero),
            (x, zero, one, -one),
            (y * y, -x * y, zero, zero),
        ),
    )
    assert l_of_Q(base) == l_of_Q(redundant) == 1
    assert len(minimalize_relations(redundant).relations) == 2
    assert local_generator_count(redundant) == 3


def test_prune_removes_unit_generators():
    P = Presentation(3, ((y, -x, zero), (x, zero, XYPoly.const(2))))
    Q = prune(P)
    assert Q.gens == 2 and len(Q.relations) == 1
    for m in (2, 5):
        assert truncated_dimension(P, m) == truncated_dimension(Q, m)


def test_torsion_module_has_no_dual():
    with pytest.raises(RankDeficient):
        double_dual(Presentation(1, ((x,), (y,))))


def test_colength_examples():
    assert colength(Presentation(1, ((x - x * x,), (y,)))).value == 1
    assert colength(Presentation(1, ((x * x,), (x * y,), (y * y,)))).value == 3
    res = colength(Presentation(1, ((x ** 3,), (y ** 2,))), m0=2)
    assert res.value == 6 and res.history[-1][1] == res.history[-2][1]


def test_colength_m_plus_two_stable():
    P = power_ideal_module(3)
    C = double_dual_map(P).cokernel()
    res = colength(C)
    assert truncated_dimension(prune(C), res.m + 2) == res.value


def _apply(columns, syz):
    return tuple(sum((c[k] * s for c, s in zip(columns, syz)), XYPoly()) for k in range(2))


def test_rank_two_kernel_divides_out_common_factor():
    cols = [(x * x, zero), (x * y, zero), (zero, one)]
    assert rank_two_kernel(cols) == (y, -x, zero) or rank_two_kernel(cols) == (-y, x, zero)
    assert rank_two_kernel([(x, zero), (y, zero), (x + y, zero)]) is None


def test_local_kernel_basis_for_square_of_maximal_ideal():
    cols = [(x * x, zero), (x * y, zero), (y * y, zero), (zero, one)]
    basis = local_kernel_basis(cols)
    assert len(basis) == 2
    assert all(_apply(cols, s) == (zero, zero) for s in basis)
    # Ext^1 of m^2 + R has length l(R/m^2) = 3
    assert colength(transpose_cokernel(Presentation(4, basis))).value == 3


def test_local_kernel_basis_rejects_non_saturated_candidates():
    cols = [(x, zero), (y, zero), (zero, x), (zero, y)]
    # x times a genuine syzygy: the minors share the factor x, so it cannot be part of a basis
    bad = (x * y, -x * x, zero, zero)
    basis = local_kernel_basis(cols, [bad])
    assert bad not in basis
    assert colength(transpose_cokernel(Presentation(4, basis))).value == 2


@pytest.mark.parametrize("j", [1, 2, 3])
def test_ext_route_matches_double_dual(j):
    P = power_ideal_module(j)
    minimal = minimalize_relations(P)
    assert len(minimal.relations) == minimal.gens - 2
    assert colength(transpose_cokernel(minimal)).value == l_of_Q(P) == j * (j + 1) // 2


def test_colength_stops_at_first_repeat():
    res = colength(Presentation(1, ((x * x,), (y,))), m0=1)
    assert res.value == 2 and res.m == 2
    assert [m for m, _ in res.history] == [1, 2, 3]
