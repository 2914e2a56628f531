"""From a well-labeled one-face map back to its quadrangulation.

The map is cut open into its polygon.  A central vertex of label 0 is joined to
every label-1 corner, and then internal (black) edges are added level by level,
each time splitting one *area* of the polygon.  Every area carries exactly one
blue vertex; blue edges cross internal edges, and the blue graph is walked in
the same way as in the forward direction to decide where to split next.
Finally the polygon sides are glued back and the internal edges form the
quadrangulation.

Areas are boundary cycles of half-edges, with the area on the left.  Half-edges
``0 .. 2n-1`` are the polygon sides (side ``s`` runs from corner ``s`` to the
next corner of its polygon); internal half-edges come in twin pairs after
that.  Several polygons are supported so the same engine serves maps with
several faces.

A position on the blue tour is ``2*h + end``: the tour has just entered the
area of internal half-edge ``h``, at its origin (``end = 0``) or at its
destination (``end = 1``).
"""

from __future__ import annotations


from .errors import (
    InputError,
    InternalInvariantViolated,
    LabelTooSmall,
    NotWellLabeled,
    IndexOutOfRange,
)
from .surface_core import EmbeddedMap, bfs_distances

T1, T2, T3 = 1, 2, 3


class AreaComplex:
    """Polygons, internal edges, areas and blue graph during the reverse run.

    ``face_sizes``, ``mate`` and ``twisted`` describe the glued polygons;
    ``corner_label[c]`` is the label of the corner at the start of side ``c``.
    The first side of each polygon starts at its root corner, which must carry
    the minimum label of that polygon.
    """

    def __init__(self, face_sizes, mate, twisted, corner_label, check=False, on_step=None):
        self.face_sizes = list(face_sizes)
        self.mate = list(mate)
        self.twisted = list(twisted)
        self.check = check
        self.on_step = on_step
        total = sum(self.face_sizes)
        self.n_sides = total
        k = len(self.face_sizes)
        self.vertex_label = list(corner_label) + [0] * k
        # half-edge arrays
        self.org = []
        self.dst = []
        self.nxt = []
        self.prv = []
        self.twin = []
        self.area = []
        base = 0
        self.polygon_of = []
        self.first_side = []
        for j, size in enumerate(self.face_sizes):
            self.first_side.append(base)
            for t in range(size):
                s = base + t
                self.org.append(s)
                self.dst.append(base + (t + 1) % size)
                self.nxt.append(base + (t + 1) % size)
                self.prv.append(base + (t - 1) % size)
                self.twin.append(-1)
                self.area.append(-1)
                self.polygon_of.append(j)
            base += size
        self.n_areas = 0
        self.area_rep = []
        self.area_out = []
        self.area_info = []
        self.area_birth = []
        self.linked = [False] * total
        self.successor = [-1] * total
        self.unlinked = {}
        self.corner_count = {}
        for c in range(total):
            lbl = corner_label[c]
            self.corner_count[lbl] = self.corner_count.get(lbl, 0) + 1
            self.unlinked[lbl] = self.unlinked.get(lbl, 0) + 1
        self.lvc = []
        self.spoke0 = []
        self.current = 0
        self.level = 1
        self.steps = 0
        self.last_t3 = -1
        self.history = []
        self._initialise()

    # -- half-edge primitives -----------------------------------------

    def _new_pair(self, u, v):
        a = len(self.org)
        self.org += [u, v]
        self.dst += [v, u]
        self.nxt += [-1, -1]
        self.prv += [-1, -1]
        self.twin += [a + 1, a]
        self.area += [-1, -1]
        return a, a + 1

    def _link(self, h, x):
        self.nxt[h] = x
        self.prv[x] = h

    def _insert(self, hu, hv):
        """Add an edge from the end of ``hu`` to the end of ``hv``.

        Both half-edges lie on one boundary cycle, which is split in two.
        Returns ``(a, b)``: ``a`` runs u -> v and continues after ``hv``;
        ``b`` runs v -> u and continues after ``hu``.
        """
        a, b = self._new_pair(self.dst[hu], self.dst[hv])
        na, nb = self.nxt[hv], self.nxt[hu]
        self._link(hu, a)
        self._link(a, na)
        self._link(hv, b)
        self._link(b, nb)
        return a, b

    def cycle(self, h):
        out = [h]
        x = self.nxt[h]
        while x != h:
            out.append(x)
            x = self.nxt[x]
        return out

    def _new_area(self, rep, out):
        a = self.n_areas
        self.n_areas += 1
        self.area_rep.append(rep)
        self.area_out.append(out)
        self.area_info.append(None)
        self.area_birth.append(self.steps)
        for h in self.cycle(rep):
            self.area[h] = a
        return a

    def _classify(self, a):
        """``(type, min label, e)`` of area ``a``; ``e`` is None when undefined."""
        ns = self.n_sides
        lab = self.vertex_label
        hs = self.cycle(self.area_rep[a])
        internal = [h for h in hs if h >= ns]
        sides = [h for h in hs if h < ns]
        low = min(lab[self.org[h]] for h in hs)
        if len(internal) == 1 and len(sides) == 1:
            info = (T1, low, None)
        elif len(internal) == 3 and len(sides) == 1:
            info = (T3, low, sides[0])
        elif len(internal) == 2 and sides:
            pa = next(h for h in internal if self.nxt[h] < ns)
            bp = next(h for h in internal if self.prv[h] < ns)
            out = self.area_out[a]
            if out == pa:
                e = self.nxt[pa]
            elif out == bp:
                e = self.prv[bp]
            else:
                raise InternalInvariantViolated(f"area {a} leaves through a wrong edge", self.dump())
            if lab[self.org[e]] == lab[self.dst[e]]:
                e = None
            info = (T2, low, e)
        else:
            raise InternalInvariantViolated(
                f"area {a} has {len(internal)} internal edges and {len(sides)} sides", self.dump()
            )
        self.area_info[a] = info
        return info

    def info(self, a):
        got = self.area_info[a]
        return got if got is not None else self._classify(a)

    def dump(self):
        return {
            "level": self.level,
            "steps": self.steps,
            "areas": [self.cycle(r) for r in self.area_rep],
            "out": list(self.area_out),
            "lvc": list(self.lvc),
        }

    # -- construction --------------------------------------------------

    def _link_corner(self, c, parent):
        if self.linked[c]:
            raise InternalInvariantViolated(f"corner {c} linked twice", self.dump())
        self.linked[c] = True
        self.successor[c] = parent
        self.unlinked[self.vertex_label[c]] -= 1

    def _initialise(self):
        lab = self.vertex_label
        for j, size in enumerate(self.face_sizes):
            base = self.first_side[j]
            w = self.n_sides + j
            low = min(lab[base : base + size])
            if lab[base] != low:
                raise NotWellLabeled(f"root corner of polygon {j + 1} does not carry its minimum label")
            lab[w] = low - 1
            spokes = [base + t for t in range(size) if lab[base + t] == low]
            m = len(spokes)
            pairs = [self._new_pair(c, w) for c in spokes]  # (c -> w, w -> c)
            for k, c in enumerate(spokes):
                into, _ = pairs[(k + 1) % m]
                _, away = pairs[k]
                nxt_c = spokes[(k + 1) % m]
                self._link(base + (nxt_c - base - 1) % size, into)
                self._link(into, away)
                self._link(away, c)
                self._link_corner(c, w)
            for k in range(m):
                _, away = pairs[k]
                self._new_area(away, away)
            self.spoke0.append(pairs[0][0])
            self.lvc.append(2 * pairs[0][0])
        for a in range(self.n_areas):
            self._classify(a)
        self.history.append(("init", self.n_areas))
        if self.check:
            self.check_invariants()

    def advance(self, state):
        h, end = state >> 1, state & 1
        ns = self.n_sides
        if end:
            x = self.nxt[h]
            while x < ns:
                x = self.nxt[x]
        else:
            x = self.prv[h]
            while x < ns:
                x = self.prv[x]
        return 2 * self.twin[x] + end

    def _acceptable(self, a, i):
        kind, low, e = self.info(a)
        if low != i - 1 or kind == T1 or e is None:
            return None
        co = self.area[self.mate[e]]
        if self.info(co)[0] != T2:
            return None
        return e

    def _find_area(self, i):
        k = len(self.lvc)
        limit = 4 * len(self.org) + 8
        j = self.current
        st = start = self.lvc[j]
        hops = 0
        switches = 0
        while True:
            a = self.area[st >> 1]
            e = self._acceptable(a, i)
            if e is not None:
                self.current = j
                return a, e
            st = self.advance(st)
            hops += 1
            if st == start:
                j = (j + 1) % k
                st = start = self.lvc[j]
                switches += 1
            if switches > k or hops > limit * k:
                raise InternalInvariantViolated(f"no area to split at level {i}", self.dump())

    def step(self):
        """Split one area.  Returns False once every corner is linked."""
        lab = self.vertex_label
        while True:
            nxt_level = self.level + 1
            if self.corner_count.get(nxt_level, 0) == 0:
                return False
            if self.unlinked.get(nxt_level, 0) == 0:
                self.level = nxt_level
                continue
            break
        i = self.level
        chosen, e = self._find_area(i)
        et = self.mate[e]
        target = self.area[et]
        ns = self.n_sides
        hs = self.cycle(self.area_rep[target])
        pa = next(h for h in hs if h >= ns and self.nxt[h] < ns)
        bp = next(h for h in hs if h >= ns and self.prv[h] < ns)
        arc = []
        x = self.nxt[pa]
        while x != bp:
            arc.append(x)
            x = self.nxt[x]
        if lab[self.org[et]] == i and et == arc[0]:
            forward = True
            v = self.org[et]
        elif lab[self.dst[et]] == i and et == arc[-1]:
            forward = False
            v = self.dst[et]
        else:
            raise InternalInvariantViolated("matched side is not at an end of its arc", self.dump())
        if forward:
            ends = [s for s in arc[:-1] if lab[self.dst[s]] == i + 1]
        else:
            ends = [s for s in reversed(arc[1:]) if lab[self.org[s]] == i + 1]
        created = []
        last = et
        a = b = -1
        for s in ends:
            if forward:
                a, b = self._insert(pa, s)
                self._link_corner(self.dst[s], v)
            else:
                # ``s`` starts at the corner; the side before it ends there
                a, b = self._insert(self.prv[s], last)
                self._link_corner(self.org[s], v)
                last = a
            created.append(self._new_area(b, b))
        self.area_rep[target] = pa
        for h in self.cycle(pa):
            self.area[h] = target
        self.area_info[target] = None
        self.area_birth[target] = self.steps + 1
        for c in created:
            self._classify(c)
        kind = self._classify(target)[0]
        if kind != T3:
            raise InternalInvariantViolated("last piece of a split is not of type T3", self.dump())
        self.last_t3 = target
        self.lvc[self.current] = 2 * a + (1 if forward else 0)
        self.history.append((chosen, e, et, v, len(ends)))
        self.steps += 1
        if self.check:
            self.check_invariants()
        if self.on_step is not None:
            self.on_step(self)
        return True

    def run(self):
        while self.step():
            pass
        if self.check:
            self.check_final()
        return self

    # -- invariants ----------------------------------------------------

    def cotype(self, a):
        e = self.info(a)[2]
        if e is None:
            return None
        return self.info(self.area[self.mate[e]])[0]

    def check_invariants(self):
        t2_cot1 = 0
        for a in range(self.n_areas):
            kind, _, e = self._classify(a)
            if e is None:
                continue
            co = self.cotype(a)
            if kind == T3:
                allowed = (T1, T2) if a == self.last_t3 else (T1,)
                if co not in allowed:
                    raise InternalInvariantViolated(f"T3 area {a} has cotype T{co}", self.dump())
            elif kind == T2 and co == T1:
                t2_cot1 += 1
        if t2_cot1 > 1:
            raise InternalInvariantViolated(f"{t2_cot1} areas of type T2 with cotype T1", self.dump())

    def type_counts(self):
        counts = {T1: 0, T2: 0, T3: 0}
        for a in range(self.n_areas):
            counts[self.info(a)[0]] += 1
        return counts

    def check_final(self):
        counts = self.type_counts()
        if counts[T1] != counts[T3]:
            raise InternalInvariantViolated(
                f"{counts[T1]} areas of type T1 but {counts[T3]} of type T3", self.dump()
            )
        if not all(self.linked):
            raise InternalInvariantViolated("a corner was never linked", self.dump())

    # -- gluing --------------------------------------------------------

    def quadrangulation(self):
        """Glue the polygons back; returns ``(q, labels, roots, corner_vertex)``.

        ``labels`` is indexed by vertex ids of ``q``; ``roots`` has one flag per
        polygon, at its central vertex; ``corner_vertex[c]`` is the vertex of
        ``q`` at polygon corner ``c``.
        """
        ns = self.n_sides
        nh = len(self.org) - ns
        size = 2 * nh
        t0 = [0] * size
        t1 = [0] * size
        t2 = [0] * size
        nxt, prv, mate, tw, twin = self.nxt, self.prv, self.mate, self.twisted, self.twin

        def flag(h, end):
            return 2 * (h - ns) + end

        for h in range(ns, len(self.org)):
            fo, fd = flag(h, 0), flag(h, 1)
            t0[fo], t0[fd] = fd, fo
            t2[fo] = flag(twin[h], 1)
            t2[fd] = flag(twin[h], 0)
            # around the destination of h
            x = nxt[h]
            end = 0
            if x < ns:
                s = mate[x]
                if tw[x]:
                    x, end = prv[s], 1
                else:
                    x, end = nxt[s], 0
                if x < ns:
                    raise InternalInvariantViolated("two sides meet after gluing", self.dump())
            t1[fd] = flag(x, end)
            x = prv[h]
            end = 1
            if x < ns:
                s = mate[x]
                if tw[x]:
                    x, end = nxt[s], 0
                else:
                    x, end = prv[s], 1
                if x < ns:
                    raise InternalInvariantViolated("two sides meet after gluing", self.dump())
            t1[fo] = flag(x, end)
        roots = [flag(h, 1) for h in self.spoke0]
        q = EmbeddedMap(tuple(t0), tuple(t1), tuple(t2), roots[0])
        labels = [0] * q.n_vertices
        corner_vertex = [-1] * ns
        vo = q.vertex_of
        for h in range(ns, len(self.org)):
            v = vo[flag(h, 0)]
            labels[v] = self.vertex_label[self.org[h]]
            if self.org[h] < ns:
                corner_vertex[self.org[h]] = v
        return q, labels, roots, corner_vertex


def _polygon_data(u):
    if u.labels is None:
        raise NotWellLabeled("the map carries no labels")
    if min(u.labels) < 1:
        raise NotWellLabeled("labels must be positive")
    if u.labels[0] != 1:
        raise NotWellLabeled("root vertex must have label 1")
    u = u.normalised()
    return u, [2 * u.n], u.mate, u.twist, u.corner_labels()


def build_area_complex(u, check=False, on_step=None):
    u, sizes, mate, tw, cl = _polygon_data(u)
    return AreaComplex(sizes, mate, tw, cl, check=check, on_step=on_step).run()


def unicellular_to_quad(u, check=False):
    """The rooted bipartite quadrangulation of a well-labeled one-face map."""
    ac = build_area_complex(u, check=check)
    q, labels, _, _ = ac.quadrangulation()
    if check:
        if not q.is_quadrangulation():
            raise InternalInvariantViolated("glued map is not a quadrangulation", ac.dump())
        if bfs_distances(q, q.root_vertex) != labels:
            raise InternalInvariantViolated("labels are not distances to the central vertex", ac.dump())
    return q


lambda_ = unicellular_to_quad


class Geodesics:
    """Quadrangulation of ``u`` together with the corner-to-vertex map.

    Corners are 1-based side indices of the normalised polygon of ``u``.
    """

    def __init__(self, u):
        self.u, _, _, _, self.corner_label = _polygon_data(u)
        self.complex = build_area_complex(self.u)
        self.q, self.labels, _, self.corner_vertex = self.complex.quadrangulation()
        self._dist = {}

    def _corner(self, c):
        if not 1 <= c <= len(self.corner_label):
            raise IndexOutOfRange(f"corner {c} outside [1, {len(self.corner_label)}]")
        return c - 1

    def successor(self, c):
        i = self._corner(c)
        if self.corner_label[i] <= 1:
            raise LabelTooSmall("corners of label 1 are linked to the central vertex")
        return self.complex.successor[i] + 1

    def simple_geodesic(self, c):
        chain = [c]
        while self.corner_label[chain[-1] - 1] > 1:
            chain.append(self.successor(chain[-1]))
        return chain

    def distances_from(self, v):
        got = self._dist.get(v)
        if got is None:
            got = self._dist[v] = bfs_distances(self.q, v)
        return got

    def distance_bound_check(self, c1, c2):
        a, b = self._corner(c1), self._corner(c2)
        lab = self.corner_label
        size = len(lab)
        ab = (b - a) % size
        one = min(lab[(a + t) % size] for t in range(ab + 1))
        other = min(lab[(b + t) % size] for t in range((size - ab) % size + 1))
        bound = lab[a] + lab[b] - 2 * (max(one, other) - 1)
        actual = self.distances_from(self.corner_vertex[a])[self.corner_vertex[b]]
        return bound, actual, actual <= bound


def successor(u, c):
    return Geodesics(u).successor(c)


def distance_bound_check(u, c1, c2):
    return Geodesics(u).distance_bound_check(c1, c2)


def check_well_labeled(u):
    if u.labels is None or min(u.labels) < 1 or u.labels[0] != 1:
        raise NotWellLabeled("labels must be positive with root label 1")
    for x, y in u.edges():
        if abs(u.labels[x] - u.labels[y]) > 1:
            raise InputError("labels differ by more than one along an edge")
    return True
