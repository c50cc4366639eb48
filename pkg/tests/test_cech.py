"""Cech engine checks against line-bundle cohomology on P^1.

For ``p = 0`` the bundle splits, and the graded pieces of the thickening
``l_n`` are ``O(j + i) + O(-j + i)`` for ``i = 0..n``.  Their cohomology on
``P^1`` gives an oracle that does not use the Cech engine at all.
"""

from fractions import Fraction

import pytest

from blowup_chern import h0, h0_sections, h1, parse_poly, r1_length, validate_bundle
from blowup_chern.cech import coboundary_matrix, default_window, enlarge, image_dim, is_section, profile, restriction_kernel_dim
from blowup_chern.laurent import format_poly
from blowup_chern.report import SweepConfig, random_p


def h0_p1(d):
    return max(d + 1, 0)


def h1_p1(d):
    return max(-d - 1, 0)


def split_h1(j, n):
    return sum(h1_p1(-j + i) + h1_p1(j + i) for i in range(n + 1))


def split_h0(j, n):
    return sum(h0_p1(-j + i) + h0_p1(j + i) for i in range(n + 1))


@pytest.mark.parametrize("j", range(0, 6))
def test_split_profile_matches_line_bundles(j):
    b = validate_bundle(j, "0")
    for n in range(j + 3):
        assert h1(b, n) == split_h1(j, n)
        assert h0(b, n) == split_h0(j, n)


@pytest.mark.parametrize("j", range(2, 5))
def test_window_enlargement_does_not_change_h1(j):
    cfg = SweepConfig(j=j, samples=3, seed=11)
    for idx in range(3):
        b = validate_bundle(j, random_p(cfg, idx))
        for n in (0, j, 2 * j):
            w = default_window(b, n)
            assert h1(b, n, window=enlarge(w, 4)) == h1(b, n)


def test_coboundary_shape_and_window_guard():
    b = validate_bundle(2, "u")
    data = coboundary_matrix(b, 1)
    assert data.matrix.rows == len(data.basis.rows)
    assert data.matrix.cols == len(data.columns)
    with pytest.raises(ValueError):
        coboundary_matrix(b, 1, window=(0, 5))


@pytest.mark.parametrize("j", range(2, 6))
def test_p_equals_u_h1_is_constant(j):
    b = validate_bundle(j, "u")
    assert [h1(b, n) for n in range(j + 2)] == [j - 1] * (j + 2)


def test_r1_length_examples():
    assert r1_length(validate_bundle(3, "0")).value == 3
    assert r1_length(validate_bundle(5, "0")).value == 10
    res = r1_length(validate_bundle(3, "u"))
    assert res.value == 2 and res.certified
    assert res.horizon >= 2 * 3 + 1
    assert all(d == res.value for d in res.image_dims)


def test_r1_length_trivial_cases():
    assert r1_length(validate_bundle(0, "0")).value == 0
    assert r1_length(validate_bundle(1, "0")).value == 0


def test_image_dims_decrease_to_limit():
    b = validate_bundle(4, "0")
    dims = [image_dim(b, 8, n) for n in range(0, 9)]
    assert dims[-1] == h1(b, 8)
    assert dims[0] <= h1(b, 0)
    assert max(dims) == r1_length(b).value


@pytest.mark.parametrize("text", ["0", "u", "z*u - 3*u^2"])
def test_exact_sections_are_sections(text):
    b = validate_bundle(3, text)
    secs = h0_sections(b, 7, max_u_degree=5)
    assert secs
    for a, c in secs:
        assert is_section(b, a, c)


def test_section_examples_for_p_equals_u():
    b = validate_bundle(3, "u")
    z, u = parse_poly("z"), parse_poly("u")
    one, zero = parse_poly("1"), parse_poly("0")
    assert is_section(b, zero, one)
    assert is_section(b, zero, z)
    assert is_section(b, -u, z * z * z)
    assert not is_section(b, zero, z * z)


def test_scaling_p_preserves_profile():
    b1 = validate_bundle(3, "z*u + 2*u^2")
    b2 = validate_bundle(3, parse_poly("z*u + 2*u^2").scalar_mul(Fraction(-3)))
    assert [r.h1 for r in profile(b1, 5)] == [r.h1 for r in profile(b2, 5)]


@pytest.mark.parametrize("j", range(2, 6))
def test_p_equals_u_restrictions_are_isomorphisms(j):
    b = validate_bundle(j, "u")
    assert all(restriction_kernel_dim(b, n) == 0 for n in range(1, j + 2))


def test_split_sections_on_the_reduced_line():
    # on l_0 only the beta's survive; alpha = (1, 0) first appears as (u^j, 0)
    b = validate_bundle(2, "0")
    secs = h0_sections(b, 0)
    assert len(secs) == h0(b, 0) == 3
    assert all(a == parse_poly("0") for a, _ in secs)
    assert {format_poly(c) for _, c in secs} == {"1", "z", "z^2"}
    assert not is_section(b, parse_poly("1"), parse_poly("0"))
    assert is_section(b, parse_poly("u^2"), parse_poly("0"))
