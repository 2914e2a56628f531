"""Several sources with delays, and the pointed-map variant built on top.

A quadrangulation with delayed sources is labeled by
``min_j (dist(v, w_j) + delay_j)``; the exploration then runs from all
sources at once and produces a labeled map with one face per source.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import InputError, NotBipartite, NotWellLabeled, SourcesInvalid
from .forward_bijection import DegState, red_edges
from .reverse_bijection import AreaComplex
from .surface_core import (
    EmbeddedMap,
    bfs_distances,
    check_bipartite_quadrangulation,
    euler_type,
    flag_order,
    polygon_flags,
    read_polygons,
    two_colouring,
)


@dataclass(frozen=True)
class DelayedSources:
    """Ordered sources (vertex ids), their delays and optional marked flags."""

    vertices: tuple
    delays: tuple
    corners: tuple = None

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "delays", tuple(self.delays))
        if self.corners is not None:
            object.__setattr__(self, "corners", tuple(self.corners))
        if len(self.vertices) != len(self.delays):
            raise SourcesInvalid("one delay per source is required")
        if len(set(self.vertices)) != len(self.vertices):
            raise SourcesInvalid("sources must be distinct")
        if self.corners is not None and len(self.corners) != len(self.vertices):
            raise SourcesInvalid("one marked corner per source is required")

    @property
    def k(self):
        return len(self.vertices)


@dataclass(frozen=True)
class Violation:
    condition: str
    witnesses: tuple
    message: str


def validate_sources(q, s):
    """``None`` when ``s`` is admissible on ``q``, else the first violation."""
    try:
        two_colouring(q)
    except NotBipartite:
        return Violation("bipartite", (), "the map is not bipartite")
    if not s.vertices:
        return Violation("zero-delay", (), "no sources")
    for v in s.vertices:
        if not 0 <= v < q.n_vertices:
            return Violation("vertex", (v,), f"source {v} is not a vertex")
    if s.corners is not None:
        for v, f in zip(s.vertices, s.corners):
            if not 0 <= f < q.size or q.vertex_of[f] != v:
                return Violation("corner", (v, f), f"flag {f} is not incident to source {v}")
    if min(s.delays) != 0:
        return Violation("zero-delay", (min(s.delays),), "the smallest delay must be 0")
    dist = [bfs_distances(q, w) for w in s.vertices]
    for i, j in itertools.combinations(range(s.k), 2):
        dq = dist[i][s.vertices[j]]
        diff = s.delays[i] - s.delays[j]
        if abs(diff) >= dq:
            return Violation(
                "delay-gap", (s.vertices[i], s.vertices[j]), f"|{diff}| is not below the distance {dq}"
            )
        if (diff + dq) % 2:
            return Violation("parity", (s.vertices[i], s.vertices[j]), f"{diff} + {dq} is odd")
    return None


def ell_d(q, s):
    """Distance from the delayed sources, per vertex."""
    bad = validate_sources(q, s)
    if bad is not None:
        raise SourcesInvalid(f"{bad.condition}: {bad.message}")
    best = None
    for w, d in zip(s.vertices, s.delays):
        dist = bfs_distances(q, w)
        row = [x + d for x in dist]
        best = row if best is None else [min(a, b) for a, b in zip(best, row)]
    return best


@dataclass(frozen=True)
class KRootedMap:
    """Labeled map with ordered faces, each entered at a distinguished corner.

    Sides are numbered face after face starting at each face's root corner;
    ``corner_labels[c]`` is the label at the start of side ``c``.  The tuple
    of fields is itself a canonical form.
    """

    face_sizes: tuple
    mate: tuple
    twisted: tuple
    corner_labels: tuple

    def __post_init__(self):
        for name in ("face_sizes", "mate", "twisted", "corner_labels"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        total = sum(self.face_sizes)
        if len(self.mate) != total or len(self.twisted) != total or len(self.corner_labels) != total:
            raise InputError("side arrays do not match the face sizes")
        for s, t in enumerate(self.mate):
            if not 0 <= t < total or t == s or self.mate[t] != s:
                raise InputError(f"side {s} is not properly paired")
            if self.twisted[t] != self.twisted[s]:
                raise InputError(f"twist bits of sides {s} and {t} disagree")
        m = self.embedded
        seen = {}
        for c, lab in enumerate(self.corner_labels):
            v = m.vertex_of[2 * c]
            if seen.setdefault(v, lab) != lab:
                raise InputError(f"corners of vertex {v} carry different labels")

    @property
    def k(self):
        return len(self.face_sizes)

    @property
    def n_edges(self):
        return sum(self.face_sizes) // 2

    @property
    def first_sides(self):
        return tuple(itertools.accumulate((0,) + self.face_sizes[:-1]))

    @property
    def embedded(self):
        t0, t1, t2 = polygon_flags(self.face_sizes, self.mate, self.twisted)
        return EmbeddedMap(tuple(t0), tuple(t1), tuple(t2), 0)

    @property
    def root_flags(self):
        return tuple(2 * b for b in self.first_sides)

    def vertex_labels(self):
        m = self.embedded
        labels = [0] * m.n_vertices
        for c, lab in enumerate(self.corner_labels):
            labels[m.vertex_of[2 * c]] = lab
        return labels

    @property
    def surface(self):
        return euler_type(self.embedded)

    def is_well_labeled(self):
        cl = self.corner_labels
        roots = [cl[b] for b in self.first_sides]
        if min(roots) != 1 or min(cl) < 1:
            return False
        for b, size in zip(self.first_sides, self.face_sizes):
            if cl[b] != min(cl[b : b + size]):
                return False
        m = self.embedded
        lab = self.vertex_labels()
        return all(abs(lab[m.vertex_of[f]] - lab[m.vertex_of[m.tau0[f]]]) <= 1 for f in range(m.size))

    @classmethod
    def from_embedded(cls, m, root_flags, labels):
        """Encode ``m`` read from ``root_flags`` (one per face), labels per vertex."""
        sizes, mate, twisted, sides = read_polygons(m, root_flags)
        cl = [labels[m.vertex_of[a]] for a, _ in sides]
        return cls(tuple(sizes), tuple(mate), tuple(twisted), tuple(cl))

    @classmethod
    def from_unicellular(cls, u):
        u = u.normalised()
        return cls((2 * u.n,), u.mate, u.twist, u.corner_labels())


def sources_key(q, flags, labels=None):
    """Canonical bytes for ``q`` with ordered marked flags (first one is the root)."""
    from array import array

    m = q.rerooted(flags[0])
    order, queue = flag_order(m)
    t0, t1, t2 = m.tau0, m.tau1, m.tau2
    code = array("q", [m.size, len(flags)])
    code.extend(x for f in queue for x in (order[t0[f]], order[t1[f]], order[t2[f]]))
    code.extend(order[f] for f in flags)
    if labels is not None:
        code.extend(labels[m.vertex_of[f]] for f in queue)
    return code.tobytes()


def phi_multi(q, s, check=False):
    """Labeled map with ``k`` ordered rooted faces of a corner-marked source set."""
    if s.corners is None:
        raise SourcesInvalid("every source needs a marked corner")
    check_bipartite_quadrangulation(q)
    labels = ell_d(q, s)
    deg = DegState(q, labels, list(s.corners), check=check).run()
    red, red_labels, roots = red_edges(deg)
    if red.n_faces != s.k:
        raise SourcesInvalid(f"exploration produced {red.n_faces} faces for {s.k} sources")
    return KRootedMap.from_embedded(red, roots, red_labels)


def lambda_multi(mk, check=False):
    """Inverse of :func:`phi_multi`: ``(q, sources)`` with ``q`` rooted at source 1."""
    if not mk.is_well_labeled():
        raise NotWellLabeled("k-rooted map is not well labeled")
    ac = AreaComplex(mk.face_sizes, mk.mate, mk.twisted, mk.corner_labels, check=check).run()
    q, labels, roots, _ = ac.quadrangulation()
    vertices = tuple(q.vertex_of[r] for r in roots)
    s = DelayedSources(vertices, tuple(labels[v] for v in vertices), tuple(roots))
    if check:
        if ell_d(q, s) != labels:
            raise NotWellLabeled("labels differ from the distance to the delayed sources")
    return q, s


# --- pointed maps ---------------------------------------------------------


def extremal_vertices(q, v0):
    """Vertices strictly farther from ``v0`` than each of their neighbours."""
    dist = bfs_distances(q, v0)
    adj = q.adjacency()
    return [u for u in range(q.n_vertices) if all(dist[u] > dist[v] for v in adj[u])]


def first_flags(q):
    """First flag of every vertex in the breadth-first flag order from the root."""
    _, queue = flag_order(q)
    first = [-1] * q.n_vertices
    for f in queue:
        v = q.vertex_of[f]
        if first[v] < 0:
            first[v] = f
    return first


@dataclass(frozen=True)
class PointedResult:
    map: KRootedMap
    pointed_flag: int  # a flag of ``map.embedded`` at the pointed vertex
    sources: DelayedSources


def ab_labels(q, v0):
    dist = bfs_distances(q, v0)
    top = max(dist)
    return [top - x for x in dist]


def ab_forward(q, v0):
    """Pointed quadrangulation -> labeled map whose faces match extremal vertices.

    Sources are the extremal vertices ordered by first appearance in the
    breadth-first flag order of ``q``; each is marked at its first flag.
    """
    check_bipartite_quadrangulation(q)
    lab = ab_labels(q, v0)
    ext = extremal_vertices(q, v0)
    first = first_flags(q)
    ext.sort(key=lambda v: flag_order(q)[0][first[v]])
    s = DelayedSources(tuple(ext), tuple(lab[v] for v in ext), tuple(first[v] for v in ext))
    deg = DegState(q, lab, list(s.corners)).run()
    red, red_labels, roots = red_edges(deg)
    mk = KRootedMap.from_embedded(red, roots, red_labels)
    flag = 2 * mk.corner_labels.index(max(mk.corner_labels))
    return PointedResult(mk, flag, s)


def pointed_labels(mk, pointed_flag):
    """Labels ``1 + ecc - dist(., pointed)`` on the faces-ordered map."""
    m = mk.embedded
    dist = bfs_distances(m, m.vertex_of[pointed_flag])
    top = max(dist)
    return [1 + top - x for x in dist]


def ab_backward(mk, pointed_flag):
    """Pointed map -> ``(q, v0, sources)`` with ``q`` rooted at source 1.

    Labels of ``mk`` are ignored and recomputed from the pointed vertex; each
    face is re-entered at its first corner of minimum label.
    """
    m = mk.embedded
    lab = pointed_labels(mk, pointed_flag)
    roots = []
    for b, size in zip(mk.first_sides, mk.face_sizes):
        face = [lab[m.vertex_of[2 * (b + t)]] for t in range(size)]
        roots.append(2 * (b + face.index(min(face))))
    q, s = lambda_multi(KRootedMap.from_embedded(m, roots, lab))
    ql = ell_d(q, s)
    return q, ql.index(max(ql)), s
