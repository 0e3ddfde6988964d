import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hyptutte import hyp2
from hyptutte.fuchsian import (GenusTooSmall, enumerate_elements, reduce, regular_group,
                               side_pairing_check, tokens, word_inv, word_mul)
from hyptutte.hyp2 import HPoint

from conftest import points_from_seed

GENERA = [2, 3]

word_tokens = st.lists(st.sampled_from(["a1", "b1", "A1", "B1", "a2", "b2", "A2", "B2"]),
                       max_size=8)


def test_genus_too_small():
    with pytest.raises(GenusTooSmall):
        regular_group(1)


@pytest.mark.parametrize("g", GENERA)
def test_relator_is_identity(g):
    assert regular_group(g).relator_residual() < 1e-9


def test_genus_four_relator_needs_double_length():
    grp = regular_group(4)
    # float generators alone round too coarsely for a 16-letter product
    assert grp.relator_residual() > 1e-9
    hi, lo = np.eye(3), np.zeros((3, 3))
    for t in tokens(grp.relator_word()):
        hi, lo = hyp2.matmul_dd(hi, lo, grp.word_matrix(t), grp.word_matrix_lo(t))
    assert np.max(np.abs((hi - np.eye(3)) + lo)) < 1e-20


@pytest.mark.parametrize("g", GENERA)
def test_generators_are_isometries(g):
    grp = regular_group(g)
    assert len(grp.generators) == 4 * g
    for gen in grp.generators:
        assert gen.is_valid(1e-13)
        inv = grp.word_matrix(word_inv(gen.word))
        assert np.abs(gen.mat @ inv - np.eye(3)).max() < 1e-12


@pytest.mark.parametrize("g", GENERA)
def test_translation_length_is_twice_inradius(g):
    # cosh(2h) = 2 cot^2(pi / 4g) - 1 for the regular 4g-gon with angle 2 pi / 4g
    grp = regular_group(g)
    expected = math.acosh(2 / math.tan(math.pi / (4 * g)) ** 2 - 1)
    for gen in grp.generators:
        assert hyp2.dist(grp.base, gen @ grp.base) == pytest.approx(expected, abs=1e-12)


@pytest.mark.parametrize("g", GENERA)
def test_side_pairings(g):
    errs = side_pairing_check(regular_group(g))
    assert max(errs.values()) < 1e-12


@pytest.mark.parametrize("g", GENERA)
def test_corner_angles_tile(g):
    grp = regular_group(g)
    ang = grp.polygon_angles()
    assert abs(ang.sum() - 2 * math.pi) < 1e-9
    assert np.allclose(ang, 2 * math.pi / (4 * g), atol=1e-12)


@pytest.mark.parametrize("g", GENERA)
def test_polygon_area(g):
    # fan triangulation from the center with the determinant area formula
    grp = regular_group(g)
    pts = np.array([p.coords for p in grp.polygon])
    o = np.broadcast_to(grp.base.coords, pts.shape)
    fan = hyp2.triangle_area_arr(o, pts, np.roll(pts, -1, axis=0)).sum()
    assert fan == pytest.approx(4 * math.pi * (g - 1), abs=1e-10)
    assert grp.polygon_area() == pytest.approx(4 * math.pi * (g - 1), abs=1e-10)


@given(word_tokens)
def test_word_inverse(toks):
    w = "".join(toks)
    assert word_mul(w, word_inv(w)) == ""
    assert word_inv(word_inv(w)) == word_mul(w)


@given(word_tokens, word_tokens)
def test_word_matrix_is_homomorphism(t1, t2):
    grp = regular_group(2)
    w1, w2 = "".join(t1), "".join(t2)
    lhs = grp.word_matrix(word_mul(w1, w2))
    rhs = grp.word_matrix(w1) @ grp.word_matrix(w2)
    assert np.abs(lhs - rhs).max() < 1e-9 * max(1.0, np.abs(rhs).max())


def test_word_parsing():
    assert tokens("a1B12") == ["a1", "B12"]
    assert word_mul("a1b1", "B1A1") == ""
    assert word_mul("e") == ""
    with pytest.raises(ValueError):
        tokens("x1")


def test_enumerate_counts():
    grp = regular_group(2)
    words = enumerate_elements(grp, 2)
    assert words[0] == ""
    assert len(words) == 1 + 8 + 8 * 7
    assert len(set(words)) == len(words)


def _inner_margin(grp, q):
    d0 = hyp2.dist_arr(grp.base.coords, q)
    return min(hyp2.dist_arr(g.mat @ grp.base.coords, q) for g in grp.generators) - d0


@pytest.mark.parametrize("g", GENERA)
def test_reduce_lands_in_polygon(g):
    grp = regular_group(g)
    for x in points_from_seed(5, 200, 6.0):
        q, elem = reduce(grp, HPoint(x))
        assert grp.inside(q, tol=1e-9)
        assert np.allclose((elem @ HPoint(x)).coords, q.coords, rtol=1e-9, atol=1e-9)
        assert np.abs(elem.mat - grp.word_matrix(elem.word)).max() == 0.0


@given(st.integers(0, 2**31 - 1), st.integers(0, 7))
def test_reduce_gauge_consistent(seed, k):
    grp = regular_group(2)
    x = points_from_seed(seed, 1, 4.0)[0]
    q, _ = reduce(grp, HPoint(x))
    if _inner_margin(grp, q.coords) < 1e-6:
        return  # on a side of the polygon the representative is not unique
    gx = grp.generators[k] @ HPoint(x)
    q2, _ = reduce(grp, gx)
    assert hyp2.dist(q, q2) < 1e-9
