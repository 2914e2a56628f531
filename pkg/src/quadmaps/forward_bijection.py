"""From a rooted bipartite quadrangulation to a well-labeled one-face map.

The construction first grows a directed "exploration graph" (blue vertices
sitting in faces of the quadrangulation, blue edges crossing its edges), level
by level in the distance labels, then draws one red edge per face.  The red
edges form the one-face map.

Everything is phrased with flags of the quadrangulation, so no global
orientation is ever consulted.  Conventions used throughout:

* an edge side (a *slot*) is named by ``min(f, tau0 f)``; blue edges cross
  edges, so each slot is owned by at most one blue vertex of that face;
* a corner is a flag pair ``{f, tau1 f}``;
* a position on the tour of the blue graph is an *entering flag* ``g``: the
  tour has just arrived at the blue vertex owning ``slot(g)``.
"""

from __future__ import annotations

from collections import Counter
from enum import Enum

from .errors import InternalInvariantViolated, LabelsNotDistances, NotQuadrangulation
from .surface_core import (
    EmbeddedMap,
    bfs_distances,
    check_bipartite_quadrangulation,
    from_embedded,
)


class FaceKind(str, Enum):
    NO_BLUE = "a"
    ONE_DEG2 = "b"
    ONE_DEG3 = "c"
    TWO_1_2 = "d"
    TWO_1_3 = "e"
    SIMPLE = "simple"


_KIND_BY_DEGREES = {
    (): FaceKind.NO_BLUE,
    (2,): FaceKind.ONE_DEG2,
    (3,): FaceKind.ONE_DEG3,
    (1, 2): FaceKind.TWO_1_2,
    (1, 3): FaceKind.TWO_1_3,
}

_ALLOWED = {
    (FaceKind.NO_BLUE, FaceKind.ONE_DEG2),
    (FaceKind.ONE_DEG2, FaceKind.ONE_DEG3),
    (FaceKind.ONE_DEG2, FaceKind.TWO_1_2),
    (FaceKind.ONE_DEG3, FaceKind.TWO_1_3),
    (FaceKind.TWO_1_2, FaceKind.TWO_1_3),
}


def classify_faces(q, labels):
    """Tag each face ``("simple" | "growing", level)``.

    Simple faces read ``(i-1, i, i-1, i)`` around their boundary, growing faces
    ``(i-1, i, i+1, i)``.
    """
    if not q.is_quadrangulation():
        raise NotQuadrangulation("some face does not have degree 4")
    vo, t0 = q.vertex_of, q.tau0
    for f in range(q.size):
        if abs(labels[vo[f]] - labels[vo[t0[f]]]) != 1:
            raise LabelsNotDistances(f"labels across the edge of flag {f} do not differ by 1")
    lo = [None] * q.n_faces
    hi = [None] * q.n_faces
    for f, face in enumerate(q.face_of):
        x = labels[vo[f]]
        if lo[face] is None or x < lo[face]:
            lo[face] = x
        if hi[face] is None or x > hi[face]:
            hi[face] = x
    out = []
    for a, b in zip(lo, hi):
        if b - a == 1:
            out.append(("simple", b))
        elif b - a == 2:
            out.append(("growing", a + 1))
        else:
            raise LabelsNotDistances("face labels span more than two levels")
    return out


class DegState:
    """The exploration graph under construction, one or several sources.

    ``sources`` is a list of flags, one per source vertex; each flag marks the
    root corner of its source.  Vertex labels must differ by exactly one
    along every edge and every source must be a local minimum.
    """

    def __init__(self, q, labels, sources, check=False, on_step=None):
        self.q = q
        self.labels = list(labels)
        self.sources = list(sources)
        self.check = check
        self.on_step = on_step
        t0 = q.tau0
        size = q.size
        self.slot = [f if f < t0[f] else t0[f] for f in range(size)]
        vo = q.vertex_of
        self.flag_label = [self.labels[vo[f]] for f in range(size)]
        self.owner = [-1] * size
        self.blue_face = []
        self.blue_slots = []
        self.blue_out = []
        self.blue_comp = []
        self.blue_edges = []  # (tail, head, crossed slot) in order of creation
        self.face_blue = [[] for _ in range(q.n_faces)]
        types = classify_faces(q, self.labels)
        self.face_type = types
        self.kind = [
            FaceKind.SIMPLE if t == "simple" else FaceKind.NO_BLUE for t, _ in types
        ]
        self.face_lo = [lvl - 1 for _, lvl in types]
        self.growing = [t == "growing" for t, _ in types]
        self.free = Counter()
        for f in range(size):
            if f == min(f, t0[f], q.tau2[f], t0[q.tau2[f]]):
                self.free[min(self.flag_label[f], self.flag_label[t0[f]])] += 1
        self.n_free = q.n_edges
        self.lvc = []
        self.current = 0
        self.chosen = {}
        self.level = 1
        self.steps = 0
        self._init_cycles()

    # -- bookkeeping ---------------------------------------------------

    def _new_blue(self, face, comp):
        b = len(self.blue_face)
        self.blue_face.append(face)
        self.blue_slots.append([])
        self.blue_out.append(-1)
        self.blue_comp.append(comp)
        self.face_blue[face].append(b)
        return b

    def _give(self, b, s):
        if self.owner[s] >= 0:
            raise InternalInvariantViolated(f"edge side {s} already crossed", self.dump())
        self.owner[s] = b
        self.blue_slots[b].append(s)

    def _cross(self, f):
        lbl = min(self.flag_label[f], self.flag_label[self.q.tau0[f]])
        self.free[lbl] -= 1
        self.n_free -= 1

    def _update_kind(self, face):
        if not self.growing[face]:
            return
        degrees = tuple(sorted(len(self.blue_slots[b]) for b in self.face_blue[face]))
        new = _KIND_BY_DEGREES.get(degrees)
        old = self.kind[face]
        if new is None or (new != old and (old, new) not in _ALLOWED):
            raise InternalInvariantViolated(
                f"face {face} went from kind {old.value} to blue degrees {degrees}", self.dump()
            )
        self.kind[face] = new

    def dump(self):
        return {
            "level": self.level,
            "blue_face": list(self.blue_face),
            "blue_slots": [list(s) for s in self.blue_slots],
            "blue_out": list(self.blue_out),
            "lvc": list(self.lvc),
            "kinds": [k.value for k in self.kind],
        }

    # -- construction --------------------------------------------------

    def _init_cycles(self):
        t1, t2 = self.q.tau1, self.q.tau2
        fo = self.q.face_of
        for j, r in enumerate(self.sources):
            x = r
            while True:
                b = self._new_blue(fo[x], j)
                self._give(b, self.slot[x])
                self._give(b, self.slot[t1[x]])
                self.blue_out[b] = self.slot[t1[x]]
                self._cross(t1[x])
                x = t2[t1[x]]
                if x == r:
                    break
            self.lvc.append(self.q.tau0[r])
        for b, s in enumerate(self.blue_out):
            self.blue_edges.append((b, self.owner[self.slot[t2[s]]], s))
        for face in range(self.q.n_faces):
            self._update_kind(face)
        if self.check:
            self.check_invariants()

    def advance(self, g):
        """Next entering flag along the tour of the blue graph."""
        t0, t1 = self.q.tau0, self.q.tau1
        owner, slot = self.owner, self.slot
        w = owner[slot[g]]
        x = t1[g]
        guard = 8
        while owner[slot[x]] != w:
            x = t1[t0[x]]
            guard -= 1
            if guard < 0:
                raise InternalInvariantViolated("tour lost its blue vertex", self.dump())
        return self.q.tau2[x]

    def tour(self, comp=None):
        """The tour of one blue component from its LVC, as entering flags."""
        start = self.lvc[self.current if comp is None else comp]
        out = [start]
        g = self.advance(start)
        while g != start:
            out.append(g)
            g = self.advance(g)
        return out

    def _find_face(self, i):
        fo = self.q.face_of
        k = len(self.lvc)
        limit = 4 * self.q.size + 8
        j = self.current
        g = start = self.lvc[j]
        hops = 0
        switches = 0
        while True:
            face = fo[g]
            if self.growing[face] and self.face_lo[face] == i - 1 and len(self.face_blue[face]) == 1:
                self.current = j
                return face
            g = self.advance(g)
            hops += 1
            if g == start:
                j = (j + 1) % k
                g = start = self.lvc[j]
                switches += 1
            if switches > k or hops > limit * k:
                raise InternalInvariantViolated(f"no face to grow at level {i}", self.dump())

    def _choose_entry(self, face, i):
        t0, t1 = self.q.tau0, self.q.tau1
        flags = self.face_flags[face]
        free = sorted({self.slot[f] for f in flags if self.owner[self.slot[f]] < 0})
        if len(free) == 1:
            s = free[0]
            return s if self.flag_label[s] == i else t0[s]
        if len(free) != 2:
            raise InternalInvariantViolated(f"face {face} has {len(free)} free sides", self.dump())
        (u,) = self.face_blue[face]
        s = self.blue_out[u]
        x = s if self.flag_label[s] == i - 1 else t0[s]
        if self.flag_label[x] != i - 1 or self.flag_label[t0[x]] != i:
            raise InternalInvariantViolated("out-edge of the lone blue vertex has the wrong label", self.dump())
        return t1[t0[x]]

    def step(self):
        """One round: choose a face, grow one blue path.  False when done."""
        if self.n_free == 0:
            return False
        while self.free[self.level] == 0:
            self.level += 1
        i = self.level
        q = self.q
        t0, t1, t2 = q.tau0, q.tau1, q.tau2
        fo = q.face_of
        face = self._find_face(i)
        y = self._choose_entry(face, i)
        if self.owner[self.slot[y]] >= 0 or self.flag_label[y] != i:
            raise InternalInvariantViolated("chosen entry edge is not free at level i", self.dump())
        comp = self.blue_comp[self.face_blue[face][0]]
        self.chosen[face] = y
        v = self._new_blue(face, comp)
        self._give(v, self.slot[y])
        self.blue_out[v] = self.slot[y]
        self._cross(y)
        self._update_kind(face)
        tail = v
        g = t2[y]
        while True:
            t = t1[g]
            if self.flag_label[t0[t]] == i - 1:
                w = self.owner[self.slot[t]]
                if w < 0:
                    raise InternalInvariantViolated("no blue vertex at the level i-1 corner", self.dump())
                self._give(w, self.slot[g])
                self.blue_edges.append((tail, w, self.slot[g]))
                self._update_kind(fo[g])
                self.current = self.blue_comp[w]
                # the new path drains into w, possibly another source's tree
                for x in range(v, len(self.blue_face)):
                    self.blue_comp[x] = self.current
                self.lvc[self.current] = t0[g]
                break
            b = self._new_blue(fo[g], comp)
            self._give(b, self.slot[g])
            self._give(b, self.slot[t])
            self.blue_out[b] = self.slot[t]
            self._cross(t)
            self.blue_edges.append((tail, b, self.slot[g]))
            self._update_kind(fo[g])
            tail = b
            g = t2[t]
        self.steps += 1
        if self.check:
            self.check_invariants()
        if self.on_step is not None:
            self.on_step(self)
        return True

    def run(self):
        while self.step():
            pass
        if any(o < 0 for o in (self.owner[s] for s in set(self.slot))):
            raise InternalInvariantViolated("an edge side was never crossed", self.dump())
        return self

    @property
    def face_flags(self):
        try:
            return self._face_flags
        except AttributeError:
            self._face_flags = self.q.face_flags()
            return self._face_flags

    # -- invariants ----------------------------------------------------

    def successor(self, b):
        s = self.blue_out[b]
        return self.owner[self.slot[self.q.tau2[s]]]

    def check_invariants(self):
        """Assert that the blue graph is a set of cycles with in-trees and
        that each growing face is in one of the five allowed configurations."""
        n_blue = len(self.blue_face)
        succ = []
        for b in range(n_blue):
            s = self.blue_out[b]
            if s not in self.blue_slots[b]:
                raise InternalInvariantViolated(f"blue vertex {b} does not own its out-edge", self.dump())
            nxt = self.successor(b)
            if nxt < 0:
                raise InternalInvariantViolated(f"blue edge from {b} ends nowhere", self.dump())
            if self.blue_comp[nxt] != self.blue_comp[b]:
                raise InternalInvariantViolated("blue edge joins two components", self.dump())
            succ.append(nxt)
        # each blue vertex has out-degree one; count the cycles
        state = [0] * n_blue
        cycles = 0
        for b in range(n_blue):
            path = []
            x = b
            while state[x] == 0:
                state[x] = 1
                path.append(x)
                x = succ[x]
            if state[x] == 1:
                cycles += 1
            for y in path:
                state[y] = 2
        if cycles != len(self.sources):
            raise InternalInvariantViolated(f"blue graph has {cycles} cycles", self.dump())
        # every incoming edge of b crosses a side that b owns
        indeg = Counter(succ)
        for b in range(n_blue):
            if indeg[b] + 1 != len(self.blue_slots[b]):
                raise InternalInvariantViolated(f"blue vertex {b} has a dangling side", self.dump())
        t0 = self.q.tau0
        fl = self.flag_label
        for face in range(self.q.n_faces):
            if not self.growing[face]:
                continue
            i = self.face_lo[face] + 1
            blues = self.face_blue[face]
            degrees = tuple(sorted(len(self.blue_slots[b]) for b in blues))
            kind = _KIND_BY_DEGREES.get(degrees)
            if kind is None or kind != self.kind[face]:
                raise InternalInvariantViolated(f"face {face} has blue degrees {degrees}", self.dump())
            for b in blues:
                levels = sorted(min(fl[s], fl[t0[s]]) for s in self.blue_slots[b])
                expected = {
                    1: [i],
                    2: [i - 1, i - 1],
                    3: [i - 1, i - 1, i],
                }[len(levels)]
                if levels != expected:
                    raise InternalInvariantViolated(
                        f"blue vertex {b} in face {face} crosses edges of levels {levels}", self.dump()
                    )


def build_deg(q, check=False, on_step=None):
    """Run the exploration from the root vertex of ``q`` to completion."""
    check_bipartite_quadrangulation(q)
    labels = bfs_distances(q, q.root_vertex)
    return DegState(q, labels, [q.root], check=check, on_step=on_step).run()


def occupied_corners(deg):
    """Flags of ``deg.q`` that lie in a red corner, with their red numbering."""
    q = deg.q
    t0, t1 = q.tau0, q.tau1
    fl = deg.flag_label
    size = q.size
    occupied = [False] * size
    for face, flags in enumerate(deg.face_flags):
        if deg.growing[face]:
            y = deg.chosen.get(face)
            if y is None:
                raise InternalInvariantViolated(f"growing face {face} never chosen", deg.dump())
            ends = (y, t0[y])
        else:
            top = max(fl[f] for f in flags)
            ends = [f for f in flags if fl[f] == top and f < t1[f]]
        for f in ends:
            occupied[f] = occupied[t1[f]] = True
    rid = [-1] * size
    flags_in_order = [f for f in range(size) if occupied[f]]
    for k, f in enumerate(flags_in_order):
        rid[f] = k
    return occupied, rid, flags_in_order


def red_corner_of(q, occupied, f):
    """First occupied flag met turning from the side of ``f`` around its vertex."""
    t1, t2 = q.tau1, q.tau2
    y = t2[f]
    while not occupied[y]:
        y = t2[t1[y]]
    return y


def red_edges(deg):
    """Red map of a finished exploration.

    Returns ``(red, labels, roots)``: an :class:`EmbeddedMap` rooted at the
    first source's corner, labels indexed by its vertex ids, and one red root
    flag per source.
    """
    q = deg.q
    t0, t1, t2 = q.tau0, q.tau1, q.tau2
    occupied, rid, flags_in_order = occupied_corners(deg)
    m = len(flags_in_order)
    r0 = [0] * m
    r1 = [0] * m
    r2 = [0] * m
    for f in flags_in_order:
        a = rid[f]
        r2[a] = rid[t1[f]]
        x = t0[f]
        while not occupied[x]:
            x = t0[t1[x]]
        r0[a] = rid[x]
        x = t2[f]
        while not occupied[x]:
            x = t2[t1[x]]
        r1[a] = rid[x]
    roots = [rid[red_corner_of(q, occupied, t0[r])] for r in deg.sources]
    red = EmbeddedMap(tuple(r0), tuple(r1), tuple(r2), roots[0])
    vo = q.vertex_of
    labels = [0] * red.n_vertices
    for f in flags_in_order:
        labels[red.vertex_of[rid[f]]] = deg.labels[vo[f]]
    return red, labels, roots


def extract_red_edges(q, deg):
    red, labels, _ = red_edges(deg)
    if red.n_faces != 1:
        raise InternalInvariantViolated(f"red map has {red.n_faces} faces", deg.dump())
    return from_embedded(red, labels)


def quad_to_unicellular(q, check=False):
    """The well-labeled one-face map of a rooted bipartite quadrangulation."""
    deg = build_deg(q, check=check)
    return extract_red_edges(q, deg)


phi = quad_to_unicellular


def label_statistics(q):
    """``(vertex histogram, edge histogram)`` of distances from the root vertex.

    The first counts vertices at distance ``i >= 1``; the second counts edges
    between distance ``i`` and ``i - 1``.
    """
    dist = bfs_distances(q, q.root_vertex)
    verts = Counter(d for d in dist if d > 0)
    vo, t0, t2 = q.vertex_of, q.tau0, q.tau2
    edges = Counter()
    for f in range(q.size):
        if f == min(f, t0[f], t2[f], t0[t2[f]]):
            edges[max(dist[vo[f]], dist[vo[t0[f]]])] += 1
    return verts, edges
