"""Closed oriented triangulated surfaces, the builtin meshes, and subdivision."""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import hyp2
from .fuchsian import SurfaceGroup, word_inv, word_mul
from .gmap import DeckLabels, DegenerateEdge, GeodesicMapping


@dataclass(frozen=True)
class Issue:
    kind: str
    where: tuple = ()

    def __str__(self):
        return f"{self.kind} {self.where}" if self.where else self.kind


class InvalidComplex(ValueError):
    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("; ".join(str(i) for i in self.issues[:5]))


class Complex:
    """Triangulated closed surface given by ``n`` and oriented faces.

    Construction never fails on bad combinatorics; run :func:`validate`.
    The derived connectivity (``halfedges``, ``twin``, ...) assumes a valid
    complex.
    """

    def __init__(self, n: int, faces):
        faces = np.array(faces, dtype=np.int64).reshape(-1, 3)
        faces.flags.writeable = False
        self.n = int(n)
        self.faces = faces

    def __eq__(self, other):
        return (isinstance(other, Complex) and self.n == other.n
                and np.array_equal(self.faces, other.faces))

    def __hash__(self):
        return hash((self.n, self.faces.tobytes()))

    def __repr__(self):
        return f"Complex(n={self.n}, faces={len(self.faces)})"

    @cached_property
    def halfedges(self) -> np.ndarray:
        f = self.faces
        d = np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]])
        d = np.unique(d, axis=0)
        d.flags.writeable = False
        return d

    @cached_property
    def index(self) -> dict:
        return {(int(i), int(j)): h for h, (i, j) in enumerate(self.halfedges)}

    def index_array(self, i, j) -> np.ndarray:
        """Vectorised lookup of directed edges ``(i[k], j[k])``."""
        he = self.halfedges
        key = he[:, 0] * self.n + he[:, 1]
        q = np.asarray(i) * self.n + np.asarray(j)
        pos = np.searchsorted(key, q)
        if np.any(pos >= len(key)) or np.any(key[np.minimum(pos, len(key) - 1)] != q):
            raise KeyError("not a directed edge of the complex")
        return pos

    @cached_property
    def twin(self) -> np.ndarray:
        he = self.halfedges
        return self.index_array(he[:, 1], he[:, 0])

    @cached_property
    def out_start(self) -> np.ndarray:
        return np.searchsorted(self.halfedges[:, 0], np.arange(self.n))

    @cached_property
    def out_end(self) -> np.ndarray:
        return np.searchsorted(self.halfedges[:, 0], np.arange(self.n), side="right")

    @cached_property
    def edges(self) -> np.ndarray:
        he = self.halfedges
        return he[he[:, 0] < he[:, 1]]

    @cached_property
    def face_of(self) -> np.ndarray:
        """Face containing each directed edge."""
        f = self.faces
        out = np.empty(len(self.halfedges), dtype=np.int64)
        for a, b in ((0, 1), (1, 2), (2, 0)):
            out[self.index_array(f[:, a], f[:, b])] = np.arange(len(f))
        return out

    @cached_property
    def third(self) -> np.ndarray:
        """Vertex opposite each directed edge in its face."""
        f = self.faces
        out = np.empty(len(self.halfedges), dtype=np.int64)
        for a, b, c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
            out[self.index_array(f[:, a], f[:, b])] = f[:, c]
        return out

    def neighbors(self, i: int) -> list[int]:
        return [int(j) for j in self.halfedges[self.out_start[i]:self.out_end[i], 1]]

    @property
    def num_edges(self) -> int:
        return len(self.edges)


def validate(c: Complex) -> list[Issue]:
    """Everything that keeps ``c`` from being a closed oriented simplicial surface."""
    issues: list[Issue] = []
    f = c.faces
    if np.any(f < 0) or np.any(f >= c.n):
        return [Issue("VertexOutOfRange")]
    for t, (i, j, k) in enumerate(f.tolist()):
        if i == j or j == k or k == i:
            issues.append(Issue("SelfLoop", (t,)))
    seen: dict = {}
    for t, tri in enumerate(f.tolist()):
        key = frozenset(tri)
        if key in seen:
            issues.append(Issue("RepeatedFace", (seen[key], t)))
        seen[key] = t
    if issues:
        return issues

    directed = defaultdict(list)
    undirected = defaultdict(list)
    for t, (i, j, k) in enumerate(f.tolist()):
        for a, b in ((i, j), (j, k), (k, i)):
            directed[(a, b)].append(t)
            undirected[(min(a, b), max(a, b))].append(t)
    for e, ts in sorted(undirected.items()):
        if len(ts) == 1:
            issues.append(Issue("BoundaryEdge", e))
        elif len(ts) > 2:
            issues.append(Issue("NonManifoldEdge", e))
    for d, ts in sorted(directed.items()):
        if len(ts) > 1 and len(undirected[(min(d), max(d))]) == 2:
            issues.append(Issue("InconsistentOrientation", d))

    used = np.zeros(c.n, dtype=bool)
    used[f.reshape(-1)] = True
    for v in np.flatnonzero(~used):
        issues.append(Issue("IsolatedVertex", (int(v),)))
    if issues:
        return issues

    # link of every vertex must be a single cycle
    link = defaultdict(dict)
    for i, j, k in f.tolist():
        link[i][j] = k
        link[j][k] = i
        link[k][i] = j
    for v in range(c.n):
        nxt = link[v]
        start = next(iter(nxt))
        cur, steps = nxt[start], 1
        while cur != start and cur in nxt and steps <= len(nxt):
            cur, steps = nxt[cur], steps + 1
        if cur != start or steps != len(nxt):
            issues.append(Issue("NonManifoldVertex", (v,)))

    adj = defaultdict(set)
    for i, j in undirected:
        adj[i].add(j)
        adj[j].add(i)
    seen_v = {0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in adj[u] - seen_v:
            seen_v.add(v)
            queue.append(v)
    if len(seen_v) != c.n:
        issues.append(Issue("Disconnected", (c.n - len(seen_v),)))
    return issues


def euler_char(c: Complex) -> int:
    return c.n - c.num_edges + len(c.faces)


def genus(c: Complex) -> int:
    return (2 - euler_char(c)) // 2


# ---------------------------------------------------------------------------
# builtin mesh
# ---------------------------------------------------------------------------

def _barycentric(faces, pts, boundary):
    """One barycentric subdivision of a planar triangulated disk in the hyperboloid.

    ``boundary`` maps ``frozenset({a, b})`` of boundary edges to a polygon side.
    Returns new ``(faces, pts, boundary, side_of)`` where ``side_of`` lists the
    polygon sides each new boundary vertex lies on.
    """
    pts = list(pts)
    mids: dict = {}
    new_boundary = {}

    def mid(a, b):
        key = frozenset((a, b))
        if key not in mids:
            mids[key] = len(pts)
            pts.append(hyp2.midpoint_arr(pts[a], pts[b]))
            if key in boundary:
                s = boundary[key]
                new_boundary[frozenset((a, mids[key]))] = s
                new_boundary[frozenset((mids[key], b))] = s
        return mids[key]

    out = []
    for a, b, c in faces:
        s = pts[a] + pts[b] + pts[c]
        g = len(pts)
        pts.append(hyp2.project_arr(s / np.sqrt(-hyp2.mink(s, s))))
        mab, mbc, mca = mid(a, b), mid(b, c), mid(c, a)
        out += [(a, mab, g), (mab, b, g), (b, mbc, g),
                (mbc, c, g), (c, mca, g), (mca, a, g)]
    return out, pts, new_boundary


def builtin_mesh(group: SurfaceGroup, rounds: int = 2):
    """Triangulate the quotient of the fundamental polygon.

    The polygon is coned to its center and barycentrically subdivided
    ``rounds`` times (two rounds are needed for a simplicial quotient).
    Vertices on paired sides are identified through the generators; the
    returned lifts are points of the subdivided polygon, so the initial
    mapping is itself an embedded geodesic triangulation.

    Returns
    -------
    (Complex, DeckLabels, ndarray)
        Vertex 0 is the polygon center.
    """
    n4 = 4 * group.genus
    pts = [group.base.coords] + [p.coords for p in group.polygon]
    faces = [(0, 1 + j, 1 + (j + 1) % n4) for j in range(n4)]
    boundary = {frozenset((1 + j, 1 + (j + 1) % n4)): j for j in range(n4)}
    for _ in range(rounds):
        faces, pts, boundary = _barycentric(faces, pts, boundary)
    pts = np.array(pts)

    side_of = defaultdict(set)
    for e, s in boundary.items():
        for v in e:
            side_of[v].add(s)

    # links[v] = [(u, word)] with pts[u] = word . pts[v]
    links = defaultdict(list)
    bverts = sorted(side_of)
    for g, (src, dst) in zip(group.generators, group.sides):
        cand = [u for u in bverts if dst in side_of[u]]
        for v in bverts:
            if src not in side_of[v]:
                continue
            y = g.mat @ pts[v]
            u = min(cand, key=lambda u: np.abs(pts[u] - y).max())
            if np.abs(pts[u] - y).max() > 1e-9 * max(1.0, y[2]):
                raise RuntimeError("side pairing does not match subdivided sides")
            links[v].append((u, g.word))

    # spanning trees over the identifications: pts[v] = gamma[v] . pts[root[v]]
    root, gamma = {}, {}
    for v in range(len(pts)):
        if v in root:
            continue
        root[v], gamma[v] = v, ""
        queue = deque([v])
        while queue:
            a = queue.popleft()
            for u, w in links[a]:
                if u not in root:
                    root[u], gamma[u] = v, word_mul(w, gamma[a])
                    queue.append(u)

    reps = sorted(set(root.values()))
    qid = {r: k for k, r in enumerate(reps)}
    qfaces = [(qid[root[a]], qid[root[b]], qid[root[c]]) for a, b, c in faces]
    c = Complex(len(reps), qfaces)
    issues = validate(c)
    if issues:
        raise InvalidComplex(issues)

    # one label per undirected edge, the reverse as its inverse word
    words = {}
    for a, b, d in faces:
        for s, t in ((a, b), (b, d), (d, a)):
            i, j = qid[root[s]], qid[root[t]]
            if (i, j) in words:
                continue
            w = word_mul(word_inv(gamma[s]), gamma[t])
            words[(i, j)] = w
            words[(j, i)] = word_inv(w)
    labels = DeckLabels(group, c, [words[(int(i), int(j))] for i, j in c.halfedges])
    lifts = pts[reps]
    for v in range(len(pts)):
        g = group.word_matrix(gamma[v])
        if np.abs(g @ lifts[qid[root[v]]] - pts[v]).max() > 1e-9 * max(1.0, pts[v][2]):
            raise RuntimeError("inconsistent vertex identification")
    return c, labels, lifts


def builtin_mapping(group: SurfaceGroup, refine: int = 0) -> GeodesicMapping:
    c, labels, lifts = builtin_mesh(group)
    m = GeodesicMapping(c, labels, lifts)
    for _ in range(refine):
        m = subdivide(m)
    return m


def subdivide(m: GeodesicMapping) -> GeodesicMapping:
    """1-to-4 midpoint subdivision.

    The new vertex on edge ``(a, b)``, ``a < b``, sits at the geodesic midpoint
    of ``x_a`` and ``A_ab x_b``; edges between new vertices get the labels
    forced by the cocycle condition.  Old lifts are untouched.
    """
    c = m.complex
    lengths = m.lengths()
    if np.any(lengths < hyp2.ZERO_TOL):
        raise DegenerateEdge("cannot subdivide a degenerate edge")
    edges = c.edges
    n, ne = c.n, len(edges)
    eid = {}
    for e, (a, b) in enumerate(edges.tolist()):
        eid[(a, b)] = eid[(b, a)] = e
    heads = m.heads()
    h_ab = c.index_array(edges[:, 0], edges[:, 1])
    mids = hyp2.midpoint_arr(m.lifts[edges[:, 0]], heads[h_ab])
    lifts = np.vstack([m.lifts, mids])

    def to_mid(v, e):
        # label from old vertex v to the midpoint of edge e
        a, b = edges[e]
        return "" if v == a else m.labels.word(int(b), int(a))

    faces, words = [], {}

    def put(s, t, w):
        words[(s, t)] = w
        words[(t, s)] = word_inv(w)

    for i, j, k in c.faces.tolist():
        eij, ejk, eki = eid[(i, j)], eid[(j, k)], eid[(k, i)]
        mij, mjk, mki = n + eij, n + ejk, n + eki
        faces += [(i, mij, mki), (j, mjk, mij), (k, mki, mjk), (mij, mjk, mki)]
        for v, e, mv in ((i, eij, mij), (j, eij, mij), (j, ejk, mjk),
                         (k, ejk, mjk), (k, eki, mki), (i, eki, mki)):
            put(v, mv, to_mid(v, e))
        # midpoint-to-midpoint edges through the shared corner vertex
        put(mij, mjk, word_mul(word_inv(to_mid(j, eij)), to_mid(j, ejk)))
        put(mjk, mki, word_mul(word_inv(to_mid(k, ejk)), to_mid(k, eki)))
        put(mki, mij, word_mul(word_inv(to_mid(i, eki)), to_mid(i, eij)))

    nc = Complex(n + ne, faces)
    labels = DeckLabels(m.group, nc, [words[(int(s), int(t))] for s, t in nc.halfedges])
    return GeodesicMapping(nc, labels, lifts)
