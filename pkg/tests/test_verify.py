import math
import time

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hyptutte import hyp2
from hyptutte.hyp2 import HPoint, TangentVec
from hyptutte.simplicial import subdivide
from hyptutte.verify import (cat0_gaps, cat0_oracle, embedding_report, gauss_bonnet, orientation,
                             orientation_signs, overlapping_faces, vertex_angle_sums)
from hyptutte.weights import DegenerateFace

from conftest import points_from_seed


def swapped(m, a=3, b=4):
    x = np.array(m.lifts)
    x[[a, b]] = x[[b, a]]
    return m.with_lifts(x)


def test_solved_mappings_pass(solved0, solved1):
    for m in (solved0, solved1):
        r = embedding_report(m)
        assert r.passed
        assert np.all(r.orientation == 1)
        assert np.max(r.vertex_residuals) < 1e-9
        assert np.max(r.face_residuals) < 1e-10
        assert r.area_residual < 1e-8


def test_total_area_is_4pi_at_every_resolution(solved0):
    _, total0 = gauss_bonnet(solved0)
    _, total1 = gauss_bonnet(subdivide(solved0))
    assert total0 < 1e-8 and total1 < 1e-8


def test_report_text(solved0):
    text = embedding_report(solved0).to_text()
    fields = dict(line.split(": ", 1) for line in text.strip().splitlines())
    assert fields["verdict"] == "pass"
    assert fields["faces"] == fields["positive_faces"] == str(len(solved0.complex.faces))
    assert fields["flipped_faces"] == fields["degenerate_faces"] == "none"
    assert float(fields["total_area_residual"]) < 1e-8
    assert "overlapping_pairs" not in fields


def test_swapped_lifts_fail_with_flips_listed(solved0):
    r = embedding_report(swapped(solved0))
    assert not r.passed
    assert r.flipped
    assert "verdict: fail" in r.to_text()
    for f in r.flipped:
        assert r.orientation[f] <= 0


def test_orientation_is_antisymmetric(solved0):
    for f in solved0.complex.faces[::17]:
        i, j, k = (int(t) for t in f)
        assert orientation(solved0, (i, j, k)) == 1
        assert orientation(solved0, (i, k, j)) == -1


def test_orientation_matches_vectorised_signs(solved0):
    m = swapped(solved0)
    signs = orientation_signs(m)
    for k in range(0, len(m.complex.faces), 5):
        assert orientation(m, m.complex.faces[k]) == signs[k]


def test_reflection_with_reversed_faces_stays_positive(solved0):
    refl = np.diag([1.0, -1.0, 1.0])
    for p in solved0.face_points()[::11]:
        q = p @ refl.T
        a, b, c = HPoint(q[0]), HPoint(q[2]), HPoint(q[1])
        u, v = hyp2.log(a, b), hyp2.log(a, c)
        assert hyp2.oriented_side(u, v) == 1


def test_angle_sums_are_topological(solved0):
    # an embedded star closes to 2 pi whatever the geometry, so a small move changes nothing
    x = np.array(solved0.lifts)
    x[10] = hyp2.exp_arr(x[10], hyp2.from_frame(x[10], np.array([0.1, 0.0])))
    assert np.max(vertex_angle_sums(solved0.with_lifts(x))) < 1e-9
    # pushing a vertex across its link folds the star
    c = solved0.complex
    j = c.neighbors(10)[0]
    y = solved0.labels.act(c.index[(10, j)], solved0.lifts[j])
    x[10] = hyp2.exp_arr(y, -0.5 * hyp2.log_arr(y, solved0.lifts[10]))
    r = embedding_report(solved0.with_lifts(x))
    assert np.max(r.vertex_residuals) > 1e-3 and not r.passed


def test_degenerate_face_is_reported(solved0):
    c = solved0.complex
    i, j = (int(t) for t in c.faces[0][:2])
    x = np.array(solved0.lifts)
    x[i] = solved0.labels.act(c.index[(i, j)], solved0.lifts[j])
    m = solved0.with_lifts(x)
    r = embedding_report(m)
    assert not r.passed and 0 in r.degenerate
    with pytest.raises(DegenerateFace):
        orientation(m, c.faces[0])
    with pytest.raises(DegenerateFace):
        vertex_angle_sums(m)


def test_paranoid_overlap_check(solved0):
    assert overlapping_faces(solved0) == []
    r = embedding_report(solved0, paranoid=True)
    assert r.passed and r.overlaps == []
    assert "overlapping_pairs: 0" in r.to_text()
    bad = overlapping_faces(swapped(solved0))
    assert bad and all(a < b for a, b in bad)


def test_cat0_oracle_full_run():
    t0 = time.perf_counter()
    rep = cat0_oracle(10_000, seed=0)
    assert time.perf_counter() - t0 < 5.0
    assert rep.passed
    assert rep.max_violation_1 <= 1e-12 and rep.max_violation_2 <= 1e-12
    assert rep.collinear_gap_1 <= 1e-11 and rep.collinear_gap_2 <= 1e-11
    assert rep.near_degenerate_slack > 0


def test_cat0_oracle_rejects_bad_sample_count():
    with pytest.raises(ValueError):
        cat0_oracle(0)


@given(st.integers(0, 2 ** 31))
def test_cat0_inequalities_hold(seed):
    x, y, z = (points_from_seed(seed + k, 64) for k in range(3))
    g1, g2 = cat0_gaps(x, y, z)
    scale = np.maximum(1.0, hyp2.dist_arr(x, y) ** 2)
    assert np.all(g1 >= -1e-12)
    assert np.all(g2 / scale >= -1e-12)


def test_cat0_equality_on_geodesic():
    x, y = points_from_seed(1, 100), points_from_seed(2, 100)
    for t in (0.0, 0.3, 1.0):
        z = hyp2.exp_arr(x, t * hyp2.log_arr(x, y))
        g1, g2 = cat0_gaps(x, y, z)
        assert np.max(np.abs(g1)) < 1e-11
        assert np.max(np.abs(g2) / np.maximum(1, hyp2.dist_arr(x, y) ** 2)) < 1e-11


def test_oriented_side_of_reflected_pair():
    p = HPoint.origin()
    u, v = TangentVec(p, np.array([1.0, 0.0, 0.0])), TangentVec(p, np.array([0.0, 1.0, 0.0]))
    assert hyp2.oriented_side(u, v) == 1 and hyp2.oriented_side(v, u) == -1
    assert math.isclose(hyp2.angle(u, v), math.pi / 2)
