"""Maps on arbitrary surfaces as flag systems, and one-face maps as glued polygons.

A flag is a (vertex, edge, side) incidence.  Three fixed-point-free involutions
act on flags: ``tau0`` moves to the other end of the edge, ``tau1`` to the next
edge around the vertex (staying in the same face), ``tau2`` to the other side
of the edge.  No global orientation is ever needed, which is what makes the
non-orientable case work.

Polygon encoding.  A one-face map with ``n`` edges is a ``2n``-gon whose sides
are glued in pairs.  Side ``s`` (0-based internally, 1-based in files) owns
flags ``2s`` (at its start corner) and ``2s + 1`` (at its end corner).
"""

from __future__ import annotations

from array import array
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .errors import (
    IndexOutOfRange,
    InputError,
    MatchingInvalid,
    NotBipartite,
    NotQuadrangulation,
)


def orbits(size, *gens):
    """Label every point of ``range(size)`` by its orbit under ``gens``.

    Orbits are numbered in increasing order of their smallest element.
    Returns ``(ids, count)``.
    """
    ids = [-1] * size
    count = 0
    for start in range(size):
        if ids[start] >= 0:
            continue
        ids[start] = count
        stack = [start]
        while stack:
            f = stack.pop()
            for g in gens:
                x = g[f]
                if ids[x] < 0:
                    ids[x] = count
                    stack.append(x)
        count += 1
    return ids, count


@dataclass(frozen=True)
class SurfaceType:
    h: Fraction
    orientable: bool

    def __post_init__(self):
        h = Fraction(self.h)
        object.__setattr__(self, "h", h)
        if h < 0 or (2 * h).denominator != 1:
            raise InputError(f"surface type must be a nonnegative half-integer, got {h}")
        if self.orientable and h.denominator != 1:
            raise InputError("orientable surfaces have integer type")
        if not self.orientable and h == 0:
            raise InputError("the sphere is orientable")

    @property
    def euler_characteristic(self):
        return 2 - 2 * self.h

    @property
    def name(self):
        if self.orientable:
            return f"S{int(self.h)}"
        if self.h.denominator == 1:
            return f"N{int(self.h)}"
        return f"N{float(self.h)}"

    @classmethod
    def parse(cls, text):
        text = text.strip()
        try:
            if text[:1] in ("S", "s"):
                return cls(Fraction(int(text[1:])), True)
            if text[:1] in ("N", "n"):
                return cls(Fraction(text[1:]), False)
        except (ValueError, ZeroDivisionError):
            pass
        raise InputError(f"unknown surface name {text!r}; use S<k> or N<h>")

    def __str__(self):
        return self.name


SPHERE = SurfaceType(Fraction(0), True)


@dataclass(frozen=True, eq=False)
class EmbeddedMap:
    """A rooted map given by three involutions on ``range(4e)``."""

    tau0: tuple
    tau1: tuple
    tau2: tuple
    root: int = 0

    def __post_init__(self):
        for name in ("tau0", "tau1", "tau2"):
            value = getattr(self, name)
            if not isinstance(value, tuple):
                object.__setattr__(self, name, tuple(value))
        self.check()

    def check(self):
        size = len(self.tau0)
        if size == 0 or size % 4 or len(self.tau1) != size or len(self.tau2) != size:
            raise InputError("flag count must be a positive multiple of 4")
        if not 0 <= self.root < size:
            raise IndexOutOfRange(f"root flag {self.root} outside [0, {size})")
        for name, t in (("tau0", self.tau0), ("tau1", self.tau1), ("tau2", self.tau2)):
            for f in range(size):
                g = t[f]
                if not 0 <= g < size or g == f or t[g] != f:
                    raise InputError(f"{name} is not a fixed-point-free involution at flag {f}")
        t0, t2 = self.tau0, self.tau2
        for f in range(size):
            if t0[t2[f]] != t2[t0[f]]:
                raise InputError(f"tau0 and tau2 do not commute at flag {f}")
            if t0[f] == t2[f]:
                raise InputError(f"tau0 and tau2 agree at flag {f}")
        if orbits(size, self.tau0, self.tau1, self.tau2)[1] != 1:
            raise InputError("map is not connected")

    @property
    def size(self):
        return len(self.tau0)

    @property
    def n_edges(self):
        return len(self.tau0) // 4

    @cached_property
    def _vertices(self):
        return orbits(self.size, self.tau1, self.tau2)

    @cached_property
    def _edges(self):
        return orbits(self.size, self.tau0, self.tau2)

    @cached_property
    def _faces(self):
        return orbits(self.size, self.tau0, self.tau1)

    @property
    def vertex_of(self):
        return self._vertices[0]

    @property
    def edge_of(self):
        return self._edges[0]

    @property
    def face_of(self):
        return self._faces[0]

    @property
    def n_vertices(self):
        return self._vertices[1]

    @property
    def n_faces(self):
        return self._faces[1]

    @property
    def root_vertex(self):
        return self.vertex_of[self.root]

    def rerooted(self, flag):
        return EmbeddedMap(self.tau0, self.tau1, self.tau2, flag)

    def vertex_flags(self):
        out = [[] for _ in range(self.n_vertices)]
        for f, v in enumerate(self.vertex_of):
            out[v].append(f)
        return out

    def face_flags(self):
        out = [[] for _ in range(self.n_faces)]
        for f, v in enumerate(self.face_of):
            out[v].append(f)
        return out

    def degree(self, v):
        return sum(1 for x in self.vertex_of if x == v) // 2

    def adjacency(self):
        """Vertex adjacency lists, with multiplicity, one entry per half-edge."""
        adj = [[] for _ in range(self.n_vertices)]
        vo, t0, t2 = self.vertex_of, self.tau0, self.tau2
        for f in range(self.size):
            if f < t2[f]:  # one flag per half-edge
                adj[vo[f]].append(vo[t0[f]])
        return adj

    def is_quadrangulation(self):
        counts = [0] * self.n_faces
        for x in self.face_of:
            counts[x] += 1
        return all(c == 8 for c in counts)

    def __eq__(self, other):
        return isinstance(other, EmbeddedMap) and canonical_code(self) == canonical_code(other)

    def __hash__(self):
        return hash(canonical_code(self))


def is_orientable(m):
    """Two-colour the flag graph; orientable iff that succeeds."""
    colour = [-1] * m.size
    colour[0] = 0
    stack = [0]
    while stack:
        f = stack.pop()
        for t in (m.tau0, m.tau1, m.tau2):
            g = t[f]
            if colour[g] < 0:
                colour[g] = 1 - colour[f]
                stack.append(g)
            elif colour[g] == colour[f]:
                return False
    return True


def euler_type(m):
    h = Fraction(m.n_edges - m.n_vertices - m.n_faces + 2, 2)
    return SurfaceType(h, is_orientable(m))


def bfs_distances(m, v):
    """Graph distances from vertex ``v`` (indexed by vertex id)."""
    adj = m.adjacency()
    dist = [-1] * m.n_vertices
    dist[v] = 0
    queue = deque([v])
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if dist[y] < 0:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def two_colouring(m, start=None):
    """Vertex 2-colouring with ``start`` (default: root vertex) coloured 0."""
    if start is None:
        start = m.root_vertex
    adj = m.adjacency()
    colour = [-1] * m.n_vertices
    colour[start] = 0
    stack = [start]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if colour[y] < 0:
                colour[y] = 1 - colour[x]
                stack.append(y)
            elif colour[y] == colour[x]:
                raise NotBipartite(f"vertices {x} and {y} are adjacent with the same colour")
    return colour


def check_bipartite_quadrangulation(q):
    if not q.is_quadrangulation():
        raise NotQuadrangulation("some face does not have degree 4")
    return two_colouring(q)


def flag_order(m):
    """Breadth-first numbering of flags from the root (``tau0``, ``tau1``, ``tau2``).

    Returns ``(order, queue)`` with ``queue[order[f]] == f``.
    """
    t0, t1, t2 = m.tau0, m.tau1, m.tau2
    order = [-1] * len(t0)
    order[m.root] = 0
    queue = [m.root]
    i = 0
    while i < len(queue):
        f = queue[i]
        i += 1
        for g in (t0[f], t1[f], t2[f]):
            if order[g] < 0:
                order[g] = len(queue)
                queue.append(g)
    return order, queue


def canonical_code(m, labels=None):
    """Relabeling-invariant byte code of a rooted map.

    Flags are numbered in breadth-first order from the root, trying ``tau0``,
    ``tau1``, ``tau2`` in that order.  ``labels`` (indexed by vertex id) are
    appended per flag when given.
    """
    t0, t1, t2 = m.tau0, m.tau1, m.tau2
    size = len(t0)
    order, queue = flag_order(m)
    code = array("q", [size])
    code.extend(x for f in queue for x in (order[t0[f]], order[t1[f]], order[t2[f]]))
    if labels is not None:
        vo = m.vertex_of
        code.extend(labels[vo[f]] for f in queue)
    return code.tobytes()


def tutte_quadrangulation(m):
    """The bipartite quadrangulation of a rooted map (black = vertices of ``m``).

    Flag ``2f + c`` of the result sits on the quadrangulation edge drawn in the
    corner of flag ``f``, at its black end (``c = 0``) or white end (``c = 1``).
    """
    size = m.size
    t0 = [0] * (2 * size)
    t1 = [0] * (2 * size)
    t2 = [0] * (2 * size)
    for f in range(size):
        for c in (0, 1):
            t0[2 * f + c] = 2 * f + 1 - c
            t2[2 * f + c] = 2 * m.tau1[f] + c
        t1[2 * f] = 2 * m.tau2[f]
        t1[2 * f + 1] = 2 * m.tau0[f] + 1
    return EmbeddedMap(tuple(t0), tuple(t1), tuple(t2), 2 * m.root)


def tutte_map(q):
    """Inverse of :func:`tutte_quadrangulation`; the root vertex is black."""
    colour = check_bipartite_quadrangulation(q)
    vo = q.vertex_of
    black = [f for f in range(q.size) if colour[vo[f]] == 0]
    index = {f: i for i, f in enumerate(black)}
    t0, t1, t2 = q.tau0, q.tau1, q.tau2
    m0 = tuple(index[t0[t1[t0[f]]]] for f in black)
    m1 = tuple(index[t2[f]] for f in black)
    m2 = tuple(index[t1[f]] for f in black)
    return EmbeddedMap(m0, m1, m2, index[q.root])


# --- polygons -------------------------------------------------------------


def polygon_flags(face_sizes, mate, twisted):
    """Involutions for polygons of the given sizes glued by ``mate``.

    Sides are numbered consecutively through the polygons.  A straight pair
    glues start to end (a cylinder); a twisted pair glues start to start.
    """
    total = sum(face_sizes)
    t0 = [0] * (2 * total)
    t1 = [0] * (2 * total)
    t2 = [0] * (2 * total)
    base = 0
    for size in face_sizes:
        for k in range(size):
            s = base + k
            nxt = base + (k + 1) % size
            t0[2 * s] = 2 * s + 1
            t0[2 * s + 1] = 2 * s
            t1[2 * s + 1] = 2 * nxt
            t1[2 * nxt] = 2 * s + 1
        base += size
    for s in range(total):
        t = mate[s]
        if twisted[s]:
            t2[2 * s] = 2 * t
            t2[2 * s + 1] = 2 * t + 1
        else:
            t2[2 * s] = 2 * t + 1
            t2[2 * s + 1] = 2 * t
    return t0, t1, t2


def read_polygons(m, root_flags):
    """Walk each face from its root flag; return the polygon encoding.

    Returns ``(face_sizes, mate, twisted, sides)`` where ``sides[s]`` is the
    (start flag, end flag) pair of side ``s`` in ``m``.
    """
    where = [None] * m.size
    sides = []
    face_sizes = []
    t0, t1 = m.tau0, m.tau1
    for r in root_flags:
        f = r
        count = 0
        while True:
            g = t0[f]
            if where[f] is not None:
                raise InputError("root flags do not select distinct faces")
            where[f] = (len(sides), 0)
            where[g] = (len(sides), 1)
            sides.append((f, g))
            count += 1
            f = t1[g]
            if f == r:
                break
        face_sizes.append(count)
    if any(w is None for w in where):
        raise InputError("root flags miss a face")
    mate = []
    twisted = []
    for a, _ in sides:
        t, end = where[m.tau2[a]]
        mate.append(t)
        twisted.append(end == 0)
    return face_sizes, mate, twisted, sides


def _normalise_pairs(n, straight, twisted):
    size = 2 * n
    pairs = []
    seen = set()
    for group, flag in ((straight, False), (twisted, True)):
        for pair in group:
            a, b = sorted(pair)
            if not (1 <= a <= size and 1 <= b <= size):
                raise IndexOutOfRange(f"side index outside [1, {size}] in pair {pair}")
            if a == b or a in seen or b in seen:
                raise MatchingInvalid(f"side used twice in pair {pair}")
            seen.update((a, b))
            pairs.append((a, b, flag))
    if len(seen) != size:
        raise MatchingInvalid(f"matching covers {len(seen)} of {size} sides")
    pairs.sort()
    return tuple(pairs)


@dataclass(frozen=True)
class UnicellularMap:
    """A one-face map: a ``2n``-gon with glued sides, optionally labelled.

    ``pairs`` holds ``(a, b, twisted)`` with ``1 <= a < b <= 2n``.  The root is
    the corner at the start of ``root_side``, walked forwards when
    ``root_orient`` is +1 and backwards when it is -1.  ``labels`` lists vertex
    labels in order of first visit along the tour from the root.
    """

    n: int
    pairs: tuple
    root_side: int = 1
    root_orient: int = 1
    labels: tuple | None = None

    def __post_init__(self):
        if self.n < 1:
            raise InputError("a one-face map needs at least one edge")
        straight = [(a, b) for a, b, t in self.pairs if not t]
        twisted = [(a, b) for a, b, t in self.pairs if t]
        object.__setattr__(self, "pairs", _normalise_pairs(self.n, straight, twisted))
        if not 1 <= self.root_side <= 2 * self.n:
            raise IndexOutOfRange(f"root side {self.root_side} outside [1, {2 * self.n}]")
        if self.root_orient not in (1, -1):
            raise InputError("root orientation must be +1 or -1")
        if self.labels is not None:
            labels = tuple(int(x) for x in self.labels)
            object.__setattr__(self, "labels", labels)
            if len(labels) != self.n_vertices:
                raise InputError(f"expected {self.n_vertices} labels, got {len(labels)}")
            if labels[0] != 1:
                raise InputError("root vertex label must be 1")
            cv = self.corner_vertex
            for a, b, _ in self.pairs:
                for s in (a - 1, b - 1):
                    u, v = cv[s], cv[(s + 1) % (2 * self.n)]
                    if abs(labels[u] - labels[v]) > 1:
                        raise InputError(f"labels differ by more than 1 along side {s + 1}")

    @cached_property
    def mate(self):
        out = [0] * (2 * self.n)
        for a, b, _ in self.pairs:
            out[a - 1] = b - 1
            out[b - 1] = a - 1
        return out

    @cached_property
    def twist(self):
        out = [False] * (2 * self.n)
        for a, b, t in self.pairs:
            out[a - 1] = out[b - 1] = t
        return out

    @property
    def straight(self):
        return frozenset((a, b) for a, b, t in self.pairs if not t)

    @property
    def twisted(self):
        return frozenset((a, b) for a, b, t in self.pairs if t)

    @property
    def root_flag(self):
        s = self.root_side - 1
        if self.root_orient == 1:
            return 2 * s
        return 2 * ((s - 1) % (2 * self.n)) + 1

    @cached_property
    def embedded(self):
        t0, t1, t2 = polygon_flags([2 * self.n], self.mate, self.twist)
        return EmbeddedMap(tuple(t0), tuple(t1), tuple(t2), self.root_flag)

    @cached_property
    def _tour(self):
        m = self.embedded
        vo = m.vertex_of
        size = 2 * self.n
        s0 = self.root_side - 1
        corners = [(s0 + self.root_orient * k) % size for k in range(size)]
        rename = {}
        visit = []
        for s in corners:
            v = rename.setdefault(vo[2 * s], len(rename))
            visit.append((s + 1, v))
        cv = [0] * size
        for s, v in visit:
            cv[s - 1] = v
        return visit, cv, len(rename), [rename[v] for v in range(m.n_vertices)]

    @property
    def corner_vertex(self):
        """Vertex id (tour numbering) of the corner at the start of each side."""
        return self._tour[1]

    @property
    def n_vertices(self):
        return self._tour[2]

    @property
    def tour_vertex_of_embedded(self):
        """Map from vertex ids of :attr:`embedded` to tour-order vertex ids."""
        return self._tour[3]

    @property
    def surface(self):
        h = Fraction(self.n - self.n_vertices + 1, 2)
        return SurfaceType(h, not any(t for _, _, t in self.pairs))

    def corner_labels(self):
        cv = self.corner_vertex
        return [self.labels[cv[s]] for s in range(2 * self.n)]

    def with_labels(self, labels):
        return UnicellularMap(self.n, self.pairs, self.root_side, self.root_orient, labels)

    def edges(self):
        """Vertex pairs (tour ids) of every edge, one entry per gluing."""
        cv = self.corner_vertex
        size = 2 * self.n
        return [(cv[a - 1], cv[a % size]) for a, _, _ in self.pairs]

    def normalised(self):
        if self.root_side == 1 and self.root_orient == 1:
            return self
        return from_embedded(self.embedded, self._labels_by_embedded_vertex())

    def _labels_by_embedded_vertex(self):
        if self.labels is None:
            return None
        rename = self.tour_vertex_of_embedded
        return [self.labels[rename[v]] for v in range(len(rename))]

    def rerooted(self, flag, shift_labels=True):
        """Same map rooted at ``flag`` of :attr:`embedded`, labels shifted to root 1."""
        labels = self._labels_by_embedded_vertex()
        m = self.embedded.rerooted(flag)
        if labels is not None and shift_labels:
            d = 1 - labels[m.root_vertex]
            labels = [x + d for x in labels]
        return from_embedded(m, labels)

    def code(self):
        labels = self._labels_by_embedded_vertex()
        return canonical_code(self.embedded, labels)


def build_from_polygon(n, straight, twisted, root_side=1, root_orient=1, labels=None):
    pairs = [(a, b, False) for a, b in straight] + [(a, b, True) for a, b in twisted]
    return UnicellularMap(n, tuple(pairs), root_side, root_orient, labels)


def to_embedded(u):
    return u.embedded


def tour(u):
    """Corners along the face boundary from the root: ``(side, vertex)`` pairs."""
    return list(u._tour[0])


def from_embedded(m, labels=None):
    """Normalised polygon encoding (root side 1, forward) of a one-face map.

    ``labels`` is indexed by vertex ids of ``m``; the root vertex label becomes
    the first entry of the result's label tuple.
    """
    sizes, mate, twisted, sides = read_polygons(m, [m.root])
    if len(sizes) != 1:
        raise InputError("map has more than one face")
    pairs = tuple((s + 1, mate[s] + 1, twisted[s]) for s in range(len(mate)) if s < mate[s])
    out_labels = None
    if labels is not None:
        seen = {}
        vo = m.vertex_of
        for a, _ in sides:
            v = vo[a]
            if v not in seen:
                seen[v] = labels[v]
        out_labels = tuple(seen.values())
    return UnicellularMap(len(mate) // 2, pairs, 1, 1, out_labels)
