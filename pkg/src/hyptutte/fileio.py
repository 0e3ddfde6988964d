"""Plain-text file formats.

Floats are written with 17 significant digits, which is enough for every
double to survive a write-then-read unchanged.  Deck labels are stored as
generator words (``e`` for the identity) and matrices are rebuilt from the
words, so labels roundtrip exactly as well.

Mesh::

    hyptutte-mesh v1
    genus 2
    vertices 142
    edges 864
    0 1 a1B1
    ...
    faces 288
    0 1 2
    ...

A mapping file is a mesh file followed by ``lifts n`` and one line of three
hyperboloid coordinates per vertex.
"""

from __future__ import annotations

import os
from dataclasses import asdict, fields

import numpy as np

from .balance import SolverConfig, SolveTrace
from .fuchsian import SurfaceGroup, regular_group
from .gmap import DeckLabels, GeodesicMapping, Weights
from .simplicial import Complex

MESH_HEADER = "hyptutte-mesh v1"
WEIGHTS_HEADER = "hyptutte-weights v1"


class FormatError(ValueError):
    pass


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _lines(path):
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if line:
                yield line


class _Reader:
    def __init__(self, path):
        self.path = path
        self.it = _lines(path)
        self.lineno = 0

    def next(self) -> str:
        try:
            self.lineno += 1
            return next(self.it)
        except StopIteration:
            raise FormatError(f"{self.path}: unexpected end of file") from None

    def keyed(self, key: str) -> str:
        parts = self.next().split()
        if len(parts) != 2 or parts[0] != key:
            raise FormatError(f"{self.path}: expected '{key} <value>'")
        return parts[1]

    def count(self, key: str) -> int:
        val = self.keyed(key)
        try:
            return int(val)
        except ValueError:
            raise FormatError(f"{self.path}: bad count for '{key}'") from None

    def rest(self):
        return list(self.it)


# ---------------------------------------------------------------------------
# mesh and mapping
# ---------------------------------------------------------------------------

def _mesh_lines(c: Complex, labels: DeckLabels) -> list[str]:
    out = [MESH_HEADER, f"genus {labels.group.genus}", f"vertices {c.n}",
           f"edges {len(c.halfedges)}"]
    for (i, j), w in zip(c.halfedges, labels.words):
        out.append(f"{i} {j} {w or 'e'}")
    out.append(f"faces {len(c.faces)}")
    out.extend(f"{i} {j} {k}" for i, j, k in c.faces)
    return out


def _read_mesh(r: _Reader):
    if r.next() != MESH_HEADER:
        raise FormatError(f"{r.path}: not a mesh file (missing '{MESH_HEADER}')")
    group = regular_group(r.count("genus"))
    n = r.count("vertices")
    ne = r.count("edges")
    edges = {}
    for _ in range(ne):
        parts = r.next().split()
        if len(parts) != 3:
            raise FormatError(f"{r.path}: edge lines are 'i j word'")
        edges[(int(parts[0]), int(parts[1]))] = "" if parts[2] == "e" else parts[2]
    nf = r.count("faces")
    faces = []
    for _ in range(nf):
        parts = r.next().split()
        if len(parts) != 3:
            raise FormatError(f"{r.path}: face lines are 'i j k'")
        faces.append([int(p) for p in parts])
    c = Complex(n, np.array(faces, dtype=np.int64).reshape(-1, 3))
    if len(edges) != len(c.halfedges):
        raise FormatError(f"{r.path}: edge list does not match faces")
    try:
        words = [edges[(int(i), int(j))] for i, j in c.halfedges]
    except KeyError as exc:
        raise FormatError(f"{r.path}: missing label for edge {exc.args[0]}") from None
    return c, DeckLabels(group, c, words)


def write_mesh(path, c: Complex, labels: DeckLabels) -> None:
    with open(path, "w") as fh:
        fh.write("\n".join(_mesh_lines(c, labels)) + "\n")


def read_mesh(path) -> tuple[Complex, DeckLabels]:
    r = _Reader(path)
    out = _read_mesh(r)
    if r.rest():
        raise FormatError(f"{path}: trailing data after faces")
    return out


def write_mapping(path, m: GeodesicMapping) -> None:
    lines = _mesh_lines(m.complex, m.labels)
    lines.append(f"lifts {m.complex.n}")
    lines.extend(" ".join(_fmt(v) for v in x) for x in m.lifts)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_mapping(path) -> GeodesicMapping:
    r = _Reader(path)
    c, labels = _read_mesh(r)
    n = r.count("lifts")
    if n != c.n:
        raise FormatError(f"{path}: expected {c.n} lifts, found {n}")
    x = np.empty((n, 3))
    for i in range(n):
        parts = r.next().split()
        if len(parts) != 3:
            raise FormatError(f"{path}: lift lines have three coordinates")
        x[i] = [float(p) for p in parts]
    return GeodesicMapping(c, labels, x)


def read_mesh_or_mapping(path):
    """``(complex, labels, lifts or None)`` from either file type."""
    r = _Reader(path)
    c, labels = _read_mesh(r)
    rest = r.rest()
    if not rest:
        return c, labels, None
    m = read_mapping(path)
    return c, labels, m.lifts


# ---------------------------------------------------------------------------
# weights
# ---------------------------------------------------------------------------

def write_weights(path, w: Weights) -> None:
    lines = [WEIGHTS_HEADER]
    lines.extend(f"{i} {j} {_fmt(v)}" for (i, j), v in zip(w.complex.halfedges, w.values))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_weights(path, c: Complex) -> Weights:
    """Weights aligned with ``c``; every directed edge must appear once."""
    r = _Reader(path)
    if r.next() != WEIGHTS_HEADER:
        raise FormatError(f"{path}: not a weights file (missing '{WEIGHTS_HEADER}')")
    vals = np.full(len(c.halfedges), np.nan)
    for line in r.rest():
        parts = line.split()
        if len(parts) != 3:
            raise FormatError(f"{path}: weight lines are 'i j value'")
        key = (int(parts[0]), int(parts[1]))
        if key not in c.index:
            raise FormatError(f"{path}: {key} is not an edge of the mesh")
        vals[c.index[key]] = float(parts[2])
    if np.any(np.isnan(vals)):
        raise FormatError(f"{path}: missing weights for some edges")
    return Weights(c, vals)


# ---------------------------------------------------------------------------
# group
# ---------------------------------------------------------------------------

def write_group(path, group: SurfaceGroup) -> None:
    lines = [f"genus {group.genus}"]
    for name in group.names:
        lines.append(name)
        lines.extend(" ".join(_fmt(v) for v in row) for row in group.generator(name).mat)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_group(path) -> dict[str, np.ndarray]:
    """Generator matrices by word, as written by :func:`write_group`."""
    r = _Reader(path)
    parts = r.next().split()
    if len(parts) != 2 or parts[0] != "genus":
        raise FormatError(f"{path}: expected 'genus g' header")
    rest = r.rest()
    if len(rest) % 4:
        raise FormatError(f"{path}: each generator is a word plus three rows")
    out = {}
    for k in range(0, len(rest), 4):
        mat = np.array([[float(v) for v in row.split()] for row in rest[k + 1:k + 4]])
        if mat.shape != (3, 3):
            raise FormatError(f"{path}: generator {rest[k]} is not 3x3")
        out[rest[k]] = mat
    return out


# ---------------------------------------------------------------------------
# solver config and traces
# ---------------------------------------------------------------------------

_CONFIG_TYPES = {f.name: f.type for f in fields(SolverConfig)}


def write_config(path, cfg: SolverConfig, seed: int | None = None) -> None:
    lines = [f"{k} {_fmt(v) if isinstance(v, float) else v}" for k, v in asdict(cfg).items()]
    if seed is not None:
        lines.append(f"seed {seed}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def read_config(path) -> tuple[dict, int | None]:
    """Solver settings as keyword arguments, plus the seed if present."""
    kw, seed = {}, None
    for line in _lines(path):
        parts = line.replace("=", " ").split()
        if len(parts) != 2:
            raise FormatError(f"{path}: config lines are 'key value'")
        key, val = parts[0].replace("-", "_"), parts[1]
        if key == "seed":
            seed = int(val)
        elif key in _CONFIG_TYPES:
            kw[key] = float(val) if _CONFIG_TYPES[key] in (float, "float") else int(val)
        else:
            raise FormatError(f"{path}: unknown setting '{key}'")
    return kw, seed


def write_trace(path, trace: SolveTrace) -> None:
    lines = [f"# {trace.summary()}", "# sweep mu tau energy"]
    taus = [float("nan")] + list(trace.taus)
    for k, (mu, t, e) in enumerate(zip(trace.residuals, taus, trace.energies)):
        lines.append(f"{k} {_fmt(mu)} {_fmt(t)} {_fmt(e)}")
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
