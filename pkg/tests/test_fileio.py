import numpy as np
import pytest
from hypothesis import given, strategies as st

from hyptutte.balance import NoConvergence, SolverConfig, solve
from hyptutte.fileio import (FormatError, read_config, read_group, read_mapping, read_mesh,
                             read_mesh_or_mapping, read_weights, write_config, write_group,
                             write_mapping, write_mesh, write_trace, write_weights)
from hyptutte.gmap import Weights


def test_mesh_roundtrip(tmp_path, mesh1):
    p = tmp_path / "m.mesh"
    write_mesh(p, mesh1.complex, mesh1.labels)
    c, labels = read_mesh(p)
    assert c == mesh1.complex and labels == mesh1.labels
    q = tmp_path / "again.mesh"
    write_mesh(q, c, labels)
    assert p.read_bytes() == q.read_bytes()
    assert read_mesh_or_mapping(p)[2] is None


def test_mapping_roundtrip_is_bit_identical(tmp_path, solved1):
    p = tmp_path / "m.map"
    write_mapping(p, solved1)
    m = read_mapping(p)
    assert np.array_equal(m.lifts, solved1.lifts)
    assert m.labels == solved1.labels
    assert np.array_equal(m.labels.mats, solved1.labels.mats)
    q = tmp_path / "again.map"
    write_mapping(q, m)
    assert p.read_bytes() == q.read_bytes()
    c, labels, lifts = read_mesh_or_mapping(p)
    assert np.array_equal(lifts, solved1.lifts)


@given(st.lists(st.floats(1e-300, 1e300, allow_nan=False), min_size=1, max_size=20))
def test_weights_roundtrip_any_positive_values(tmp_path_factory, mesh0, vals):
    c = mesh0.complex
    v = np.resize(np.array(vals), len(c.halfedges))
    w = Weights(c, v)
    p = tmp_path_factory.mktemp("w") / "w.txt"
    write_weights(p, w)
    assert np.array_equal(read_weights(p, c).values, w.values)


def test_group_roundtrip(tmp_path, g2):
    p = tmp_path / "g.txt"
    write_group(p, g2)
    mats = read_group(p)
    assert list(mats) == g2.names
    for name, mat in mats.items():
        assert np.array_equal(mat, g2.generator(name).mat)


def test_config_roundtrip(tmp_path):
    cfg = SolverConfig(tau=0.3, eps=1e-11, max_iters=1234, backtrack=0.25)
    p = tmp_path / "cfg.txt"
    write_config(p, cfg, seed=7)
    kw, seed = read_config(p)
    assert SolverConfig(**kw) == cfg and seed == 7
    p.write_text("tau = 0.4\nmax-iters 10  # comment\n")
    kw, seed = read_config(p)
    assert kw == {"tau": 0.4, "max_iters": 10} and seed is None


def test_trace_file(tmp_path, mesh0):
    with pytest.raises(NoConvergence) as exc:
        solve(mesh0, Weights.uniform(mesh0.complex), SolverConfig(max_iters=4))
    p = tmp_path / "sub" / "t.trace"
    write_trace(p, exc.value.trace)
    lines = p.read_text().splitlines()
    assert lines[0].startswith("# not converged")
    rows = [l.split() for l in lines[2:]]
    assert len(rows) == 5 and rows[0][2] == "nan"
    assert [float(r[1]) for r in rows] == exc.value.trace.residuals


@pytest.mark.parametrize("body, msg", [
    ("nonsense\n", "not a mesh"),
    ("hyptutte-mesh v1\ngenus 2\nvertices x\n", "bad count"),
    ("hyptutte-mesh v1\ngenus 2\nvertices 4\nedges 1\n0 1\n", "i j word"),
    ("hyptutte-mesh v1\ngenus 2\nvertices 4\n", "end of file"),
])
def test_malformed_mesh(tmp_path, body, msg):
    p = tmp_path / "bad.mesh"
    p.write_text(body)
    with pytest.raises(FormatError, match=msg):
        read_mesh(p)


def test_genus_one_mesh_is_rejected(tmp_path):
    p = tmp_path / "g1.mesh"
    p.write_text("hyptutte-mesh v1\ngenus 1\nvertices 1\nedges 0\nfaces 0\n")
    with pytest.raises(ValueError):
        read_mesh(p)


def test_mesh_with_trailing_data_is_rejected(tmp_path, solved0):
    p = tmp_path / "m.map"
    write_mapping(p, solved0)
    with pytest.raises(FormatError, match="trailing"):
        read_mesh(p)


def test_mapping_lift_count_must_match(tmp_path, solved0):
    p = tmp_path / "m.map"
    write_mapping(p, solved0)
    text = p.read_text().replace(f"lifts {solved0.complex.n}", "lifts 3")
    p.write_text(text)
    with pytest.raises(FormatError, match="expected"):
        read_mapping(p)


def test_weights_errors(tmp_path, mesh0):
    c = mesh0.complex
    p = tmp_path / "w.txt"
    write_weights(p, Weights.uniform(c))
    lines = p.read_text().splitlines()
    p.write_text("\n".join(lines[:-1]) + "\n")
    with pytest.raises(FormatError, match="missing"):
        read_weights(p, c)
    i, j = c.halfedges[0]
    p.write_text("\n".join(lines).replace(f"\n{i} {j} 1\n", f"\n{i} {j} 0\n", 1) + "\n")
    with pytest.raises(ValueError, match="weights must be positive"):
        read_weights(p, c)
    p.write_text(lines[0] + "\n0 0 1\n")
    with pytest.raises(FormatError, match="not an edge"):
        read_weights(p, c)
