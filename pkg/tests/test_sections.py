from fractions import Fraction

import pytest

from blowup_chern import XYPoly, build_presentation, build_sections_module, l_of_Q_for_bundle, parse_poly, validate_bundle
from blowup_chern.cech import h0, is_section
from blowup_chern.local_algebra import local_generator_count
from blowup_chern.report import SweepConfig, random_p
from blowup_chern.sections import act, act_x, act_y, embed, q_length

ZERO, ONE = parse_poly("0"), parse_poly("1")


def sec(a, b):
    return (parse_poly(a), parse_poly(b))


def test_action_examples():
    assert act_x(sec("0", "1")) == sec("0", "u")
    assert act_y(sec("0", "1")) == sec("0", "z*u")
    # x b1 - y b0 in the split j = 2 case
    b0, b1 = sec("0", "1"), sec("0", "z")
    lhs = act_x(b1)
    rhs = act_y(b0)
    assert (lhs[0] - rhs[0], lhs[1] - rhs[1]) == (ZERO, ZERO)


def test_action_commutes_and_matches_polynomial_action():
    s = sec("u - z*u^2", "3 + z - z^2*u")
    assert act_x(act_y(s)) == act_y(act_x(s))
    f = XYPoly({(2, 0): 1, (0, 1): -3})
    ax = act_x(act_x(s))
    ay = act_y(s)
    assert act(f, s) == (ax[0] - ay[0].scalar_mul(3), ax[1] - ay[1].scalar_mul(3))


def test_action_preserves_sections():
    b = validate_bundle(3, "u")
    s = sec("-u", "z^3")
    assert is_section(b, *s)
    assert is_section(b, *act_x(s)) and is_section(b, *act_y(s))


def test_embedding_is_linear_over_the_action():
    b = validate_bundle(2, "u")
    s = sec("-u", "z^2")
    x, y = XYPoly.x(), XYPoly.y()
    assert embed(b, act_x(s)) == tuple(x * c for c in embed(b, s))
    assert embed(b, act_y(s)) == tuple(y * c for c in embed(b, s))


@pytest.mark.parametrize("j", range(0, 6))
def test_split_presentation_shape(j):
    P = build_presentation(validate_bundle(j, "0"))
    assert P.gens == j + 2 if j else P.gens == 2
    assert local_generator_count(P) == P.gens
    # m^j needs j relations
    assert len(P.relations) == j


@pytest.mark.parametrize("j", range(2, 6))
def test_p_equals_u_presentation_shape(j):
    P = build_presentation(validate_bundle(j, "u"))
    assert P.gens == 3 and len(P.relations) == 1


def test_generator_levels_for_p_equals_u():
    module = build_sections_module(validate_bundle(3, "u"))
    assert module.generators.levels == (0, 0, 0)
    split = build_sections_module(validate_bundle(3, "0"))
    assert split.generators.levels == (0, 0, 0, 0, 3)


@pytest.mark.parametrize("j, text", [(2, "0"), (3, "u"), (4, "u"), (3, "z*u + 2*z^2*u^2")])
def test_tower_consistency(j, text):
    b = validate_bundle(j, text)
    module = build_sections_module(b)
    assert module.presented_dims == module.tower.dims()
    for n, dim in enumerate(module.presented_dims):
        if n >= j - 2:
            assert h0(b, n) == dim
        else:
            assert h0(b, n) >= dim


@pytest.mark.parametrize("j, text, expected", [(4, "0", 10), (4, "u", 1), (2, "z*u", 1)])
def test_l_of_Q(j, text, expected):
    assert l_of_Q_for_bundle(validate_bundle(j, text)) == expected


@pytest.mark.parametrize("j, text", [(3, "0"), (3, "u"), (3, "z^-1*u + z*u^3")])
def test_l_of_Q_stable_when_N_grows(j, text):
    b = validate_bundle(j, text)
    base = q_length(b)
    assert q_length(b, N=base.sections_N + 2).value == base.value
    assert q_length(b, m0=base.colength_m + 2).value == base.value


def test_zu_value_survives_doubled_truncations():
    b = validate_bundle(2, "z*u")
    base = q_length(b)
    doubled = q_length(b, N=2 * base.sections_N, m0=2 * base.colength_m)
    assert base.value == doubled.value == 1


@pytest.mark.parametrize("j", [2, 3])
def test_scaling_invariance(j):
    cfg = SweepConfig(j=j, samples=4, seed=5)
    for idx in range(4):
        p = random_p(cfg, idx)
        values = {l_of_Q_for_bundle(validate_bundle(j, p.scalar_mul(Fraction(c)))) for c in (1, 2, Fraction(-1, 3))}
        assert len(values) == 1


def test_trivial_bundle_is_free():
    module = build_sections_module(validate_bundle(0, "0"))
    assert module.minimal.gens == 2 and not module.minimal.relations


@pytest.mark.parametrize("j, text", [(2, "z*u"), (3, "0"), (3, "u"), (3, "z^-1*u + z*u^3"), (3, "2*z*u^2 - z*u^3")])
def test_ext_route_matches_double_dual(j, text):
    b = validate_bundle(j, text)
    assert q_length(b, via="ext").value == q_length(b, via="double-dual").value


def test_four_generator_module_gets_a_certified_local_basis():
    b = validate_bundle(4, "-3*z^2*u - 4*z^3*u - 2*z^-1*u^2 + 2*z*u^2 - 2*z^3*u^2 + 5*u^3 - 4*z*u^4 - 5*z^2*u^4 - 3*z^3*u^5 - z^3*u^6")
    module = build_sections_module(b)
    assert module.minimal.gens == 4 and len(module.minimal.relations) == 2
    for rel in module.minimal.relations:
        image = [sum((e[k] * c for e, c in zip(module.embedding, rel)), XYPoly()) for k in range(2)]
        assert not any(image)
    assert q_length(b).value == 2


@pytest.mark.parametrize("j", [2, 3])
def test_ext_route_matches_double_dual_on_random_samples(j):
    cfg = SweepConfig(j=j, samples=6, seed=31)
    for idx in range(6):
        b = validate_bundle(j, random_p(cfg, idx))
        assert q_length(b, via="ext").value == q_length(b, via="double-dual").value
