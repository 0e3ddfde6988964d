import numpy as np
import pytest
from hypothesis import given, strategies as st

from hyptutte import hyp2
from hyptutte.gmap import (DeckLabels, GeodesicMapping, LabelMismatch, Weights, check_cocycle,
                           check_involution, distance_X, edge_vector, energy, gauge, normalize,
                           normalized_residual, residue)
from hyptutte.simplicial import builtin_mapping
from hyptutte.verify import embedding_report
from hyptutte.weights import mvc

GEN = st.sampled_from(["a1", "b1", "A1", "B1", "a2", "b2", "A2", "B2", "a1b2", "B1A2"])


def test_weights_must_be_positive(mesh0):
    c = mesh0.complex
    vals = np.ones(len(c.halfedges))
    vals[3] = 0.0
    with pytest.raises(ValueError, match="weights must be positive"):
        Weights(c, vals)
    with pytest.raises(ValueError):
        Weights(c, np.ones(5))


def test_weight_helpers(mesh0):
    c = mesh0.complex
    w = Weights.random(c, 10.0, np.random.default_rng(0))
    assert 1.0 <= w.values.min() and w.values.max() <= 10.0
    assert w.condition <= 10.0
    assert np.allclose((2 * w).values, 2 * w.values)
    assert np.allclose(w.vertex_totals(), [w.values[c.out_start[i]:c.out_end[i]].sum()
                                           for i in range(c.n)])
    s = w.symmetrized()
    assert np.array_equal(s, s[c.twin])


def test_labels_are_words(mesh0):
    labels = mesh0.labels
    grp = mesh0.group
    for h in range(0, len(labels.words), 11):
        assert np.array_equal(labels.mats[h], grp.word_matrix(labels.words[h]))
    i, j = mesh0.complex.halfedges[5]
    assert labels[(i, j)].word == labels.word(i, j)
    changed = labels.replace({(int(i), int(j)): "a1"})
    assert changed != labels and changed.word(i, j) == "a1"


def test_edge_vectors_match_scalar_api(mesh1):
    v = mesh1.edge_vectors()
    lengths = mesh1.lengths()
    he = mesh1.complex.halfedges
    for h in range(0, len(he), 97):
        i, j = (int(t) for t in he[h])
        ev = edge_vector(mesh1, (i, j))
        y = hyp2.HPoint(mesh1.labels[(i, j)].mat @ mesh1.point(j).coords)
        assert np.allclose(ev.vec, hyp2.log(mesh1.point(i), y).vec, atol=1e-14)
        assert np.allclose(ev.vec, v[h], atol=1e-15)
        assert ev.norm() == pytest.approx(lengths[h], abs=1e-13)


def test_residue_matches_loop(mesh1):
    w = Weights.random(mesh1.complex, 5.0, np.random.default_rng(1))
    r = mesh1.residues(w)
    for i in (0, 50, 300):
        loop = np.zeros(3)
        for j in mesh1.complex.neighbors(i):
            loop += w[(i, j)] * edge_vector(mesh1, (i, j)).vec
        assert np.allclose(residue(mesh1, w, i).vec, loop, atol=1e-13)
        assert np.allclose(r[i], loop, atol=1e-13)


def test_energy_matches_edge_sum(mesh0):
    w = Weights.random(mesh0.complex, 5.0, np.random.default_rng(2))
    total = 0.0
    for i, j in mesh0.complex.edges:
        wij = 0.5 * (w[(i, j)] + w[(j, i)])
        total += 0.5 * wij * hyp2.dist(mesh0.point(i), mesh0.labels[(i, j)] @ mesh0.point(j)) ** 2
    assert energy(mesh0, w) == pytest.approx(total, rel=1e-12)


def test_distance_x(mesh0, g2):
    assert distance_X(mesh0, mesh0) == 0.0
    other = gauge(mesh0, 3, "a1")
    with pytest.raises(LabelMismatch):
        distance_X(mesh0, other)


def test_cocycle_and_involution_on_builtin(g2, g3):
    for grp in (g2, g3):
        for refine in (0, 1):
            m = builtin_mapping(grp, refine=refine)
            assert np.max(check_involution(m)) < 1e-9
            assert np.max(check_cocycle(m)) < 1e-9


def test_bad_labels_are_caught(mesh0):
    h = 0
    i, j = (int(t) for t in mesh0.complex.halfedges[h])
    bad = mesh0.labels.replace({(i, j): "a1"})
    assert np.max(check_involution(bad)) > 1e-3
    assert np.max(check_cocycle(bad)) > 1e-3


@given(st.integers(0, 141), GEN)
def test_gauge_invariance(i, word):
    m = _solved0()
    w = Weights.uniform(m.complex)
    g = gauge(m, i, word)
    assert np.max(check_cocycle(g)) < 1e-9
    assert np.max(check_involution(g)) < 1e-9
    assert np.max(np.abs(g.lengths() - m.lengths())) < 1e-10
    r0 = hyp2.tnorm_at(m.lifts, m.residues(w))
    r1 = hyp2.tnorm_at(g.lifts, g.residues(w))
    assert np.max(np.abs(r0 - r1)) < 1e-10
    assert np.max(np.abs(mvc(g).values - mvc(m).values)) < 1e-10
    a, b = embedding_report(m), embedding_report(g)
    assert a.passed == b.passed
    assert np.array_equal(a.orientation, b.orientation)
    assert np.max(np.abs(a.vertex_residuals - b.vertex_residuals)) < 1e-10
    assert np.max(np.abs(a.face_residuals - b.face_residuals)) < 1e-10
    assert abs(a.area_residual - b.area_residual) < 1e-10


@given(st.integers(0, 141), GEN)
def test_gauge_roundtrip(i, word):
    m = _solved0()
    back = gauge(gauge(m, i, word), i, hyp2.inverse(m.group.element(word)))
    assert back.labels == m.labels
    assert distance_X(back, m) < 1e-10


def test_normalize_moves_vertex_into_polygon(solved0):
    far = gauge(solved0, 0, "a1b1a2")
    assert not far.group.inside(far.point(0))
    back = normalize(far)
    assert back.group.inside(back.point(0), tol=1e-12)
    assert back.labels == solved0.labels


def test_lifts_projected(mesh0):
    x = np.array(mesh0.lifts)
    x[:, 2] += 1e-6
    m = GeodesicMapping(mesh0.complex, mesh0.labels, x)
    assert np.max(np.abs(hyp2.mink(m.lifts, m.lifts) + 1)) < 1e-12
    with pytest.raises(ValueError):
        GeodesicMapping(mesh0.complex, mesh0.labels, x[:-1])


def test_normalized_residual_scale_invariant(mesh0):
    w = Weights.random(mesh0.complex, 5.0, np.random.default_rng(3))
    assert normalized_residual(mesh0, 10 * w) == pytest.approx(normalized_residual(mesh0, w), rel=1e-12)


_CACHE = {}


def _solved0():
    if "m" not in _CACHE:
        from hyptutte.balance import solve
        from hyptutte.fuchsian import regular_group
        m = builtin_mapping(regular_group(2))
        _CACHE["m"], _ = solve(m, Weights.uniform(m.complex))
    return _CACHE["m"]
