"""Exhaustive generation of small one-face maps, labelings and quadrangulations.

One-face maps with ``n`` edges are listed as perfect matchings of the ``2n``
polygon sides (smallest unmatched side first, partners in increasing order),
each pair carrying a straight/twisted bit.  Labelings are enumerated by
choosing an increment in {-1, 0, +1} along a breadth-first spanning tree and
discarding assignments that break a non-tree edge.

An independent generator over raw flag systems (all maps with ``e`` edges,
deduplicated by canonical code) is kept as an oracle for tiny sizes.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import MismatchReport, SizeTooLarge
from .surface_core import (
    SPHERE,
    EmbeddedMap,
    SurfaceType,
    UnicellularMap,
    canonical_code,
    euler_type,
    polygon_flags,
    tutte_quadrangulation,
)

ORACLE_MAX_EDGES = 3


def double_factorial(k):
    return math.prod(range(k, 0, -2)) if k > 0 else 1


def matchings(size, first=None):
    """Perfect matchings of ``range(size)`` as lists of ``(a, b)``, ``a < b``.

    ``first`` optionally fixes the partner of side 0 (used to split work).
    """
    def rec(free):
        if not free:
            yield []
            return
        a = free[0]
        for k in range(1, len(free)):
            b = free[k]
            if first is not None and a == 0 and b != first:
                continue
            rest = free[1:k] + free[k + 1 :]
            for tail in rec(rest):
                yield [(a, b)] + tail

    yield from rec(list(range(size)))


def corner_vertices(size, pairs):
    """Vertex id (first-visit order) of every polygon corner, and the count."""
    parent = list(range(size))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b, tw in pairs:
        a1, b1 = (a + 1) % size, (b + 1) % size
        if tw:
            joins = ((a, b), (a1, b1))
        else:
            joins = ((a, b1), (a1, b))
        for x, y in joins:
            rx, ry = find(x), find(y)
            if rx != ry:
                parent[max(rx, ry)] = min(rx, ry)
    names = {}
    out = []
    for c in range(size):
        out.append(names.setdefault(find(c), len(names)))
    return out, len(names)


def gluings(n, surface=None, first=None):
    """Yield ``(pairs, corner_vertex, n_vertices)`` for one-face maps.

    ``pairs`` holds 0-based ``(a, b, twisted)``.  With ``surface`` given, only
    gluings of that type are produced (twists are skipped for orientable
    targets, since any twisted pair makes a one-face map non-orientable).
    """
    size = 2 * n
    want_v = None
    if surface is not None:
        want_v = n + 1 - int(2 * surface.h)
        if want_v < 1:
            return
    bits_options = [(False,)] * n if surface is not None and surface.orientable else None
    for m in matchings(size, first):
        if bits_options is not None:
            bit_iter = [tuple(False for _ in m)]
        else:
            bit_iter = itertools.product((False, True), repeat=n)
        for bits in bit_iter:
            if surface is not None and not surface.orientable and not any(bits):
                continue
            pairs = tuple((a, b, t) for (a, b), t in zip(m, bits))
            cv, nv = corner_vertices(size, pairs)
            if want_v is not None and nv != want_v:
                continue
            yield pairs, cv, nv


def enumerate_unicellular(n, surface=None):
    """Every rooted one-face map with ``n`` edges (optionally of one type)."""
    for pairs, _, _ in gluings(n, surface):
        yield UnicellularMap(n, tuple((a + 1, b + 1, t) for a, b, t in pairs))


def raw_gluing_count(n):
    return double_factorial(2 * n - 1) * 2**n


# --- labelings ------------------------------------------------------------


def _edges(size, pairs, cv):
    return [(cv[a], cv[(a + 1) % size]) for a, _, _ in pairs]


@lru_cache(maxsize=None)
def _increments(k):
    if k == 0:
        return np.zeros((1, 0), dtype=np.int16)
    grids = np.meshgrid(*([np.array([-1, 0, 1], dtype=np.int16)] * k), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def _spanning_order(nv, edges):
    adj = [[] for _ in range(nv)]
    for x, y in edges:
        adj[x].append(y)
        adj[y].append(x)
    parent = [-1] * nv
    order = [0]
    seen = [False] * nv
    seen[0] = True
    for x in order:
        for y in adj[x]:
            if not seen[y]:
                seen[y] = True
                parent[y] = x
                order.append(y)
    return order, parent


def labelings_array(nv, edges, well=False):
    """All valid labelings as rows (vertex ids in tour order), root label 1."""
    order, parent = _spanning_order(nv, edges)
    inc = _increments(nv - 1)
    lab = np.empty((inc.shape[0], nv), dtype=np.int16)
    lab[:, 0] = 1
    for k, v in enumerate(order[1:]):
        lab[:, v] = lab[:, parent[v]] + inc[:, k]
    ok = np.ones(inc.shape[0], dtype=bool)
    for x, y in edges:
        ok &= np.abs(lab[:, x] - lab[:, y]) <= 1
    if well:
        ok &= lab.min(axis=1) >= 1
    return lab[ok]


def _count_labelings(nv, edges):
    key = (nv, tuple(sorted(tuple(sorted(e)) for e in edges)))
    got = _LABEL_CACHE.get(key)
    if got is None:
        arr = labelings_array(nv, edges)
        got = (arr.shape[0], int((arr.min(axis=1) >= 1).sum()))
        _LABEL_CACHE[key] = got
    return got


_LABEL_CACHE = {}


def enumerate_labelings(u, well=False):
    """Labelings of ``u`` as tuples in tour order of its vertices."""
    size = 2 * u.n
    pairs = [(a - 1, b - 1, t) for a, b, t in u.pairs]
    arr = labelings_array(u.n_vertices, _edges(size, pairs, u.corner_vertex), well)
    for row in arr:
        yield tuple(int(x) for x in row)


def enumerate_labeled(n, surface, well=False):
    """Labeled (or well-labeled) one-face maps of a given type."""
    for pairs, cv, nv in gluings(n, surface):
        base = UnicellularMap(n, tuple((a + 1, b + 1, t) for a, b, t in pairs))
        for row in labelings_array(nv, _edges(2 * n, pairs, cv), well):
            yield base.with_labels(tuple(int(x) for x in row))


# --- independent flag-system generator --------------------------------


def _involutions(items):
    if not items:
        yield {}
        return
    a = items[0]
    for k in range(1, len(items)):
        b = items[k]
        for rest in _involutions(items[1:k] + items[k + 1 :]):
            rest[a] = b
            rest[b] = a
            yield rest


def enumerate_rooted_maps(e):
    """All rooted maps with ``e`` edges on every surface, by brute force.

    Flags of edge ``k`` are ``4k..4k+3`` with ``tau0`` and ``tau2`` fixed;
    every fixed-point-free ``tau1`` is tried and isomorphic copies are
    removed by canonical code.
    """
    if e > ORACLE_MAX_EDGES:
        raise SizeTooLarge(f"brute-force map generation is limited to {ORACLE_MAX_EDGES} edges")
    size = 4 * e
    t0 = [0] * size
    t2 = [0] * size
    for k in range(e):
        f = 4 * k
        t0[f], t0[f + 1], t0[f + 2], t0[f + 3] = f + 1, f, f + 3, f + 2
        t2[f], t2[f + 2], t2[f + 1], t2[f + 3] = f + 2, f, f + 3, f + 1
    t0, t2 = tuple(t0), tuple(t2)
    seen = set()
    for inv in _involutions(list(range(size))):
        t1 = tuple(inv[f] for f in range(size))
        try:
            m = EmbeddedMap(t0, t1, t2, 0)
        except Exception:
            continue  # disconnected
        code = canonical_code(m)
        if code not in seen:
            seen.add(code)
            yield m


def enumerate_quadrangulations_by_flags(n, surface=None):
    """Rooted bipartite quadrangulations with ``n`` faces via the map bijection."""
    for m in enumerate_rooted_maps(n):
        if surface is None or euler_type(m) == surface:
            yield tutte_quadrangulation(m)


# --- count tables ---------------------------------------------------------


@dataclass
class CountTable:
    surface: SurfaceType
    n: int
    counts: dict = field(default_factory=dict)

    def row(self):
        c = self.counts
        return {
            "surface": self.surface.name,
            "h": str(self.surface.h),
            "orientable": int(self.surface.orientable),
            "n": self.n,
            "unicellular": c.get("unicellular"),
            "labeled": c.get("labeled"),
            "well_labeled": c.get("well_labeled"),
            "quadrangulations": c.get("quadrangulations"),
        }


COUNT_COLUMNS = [
    "surface",
    "h",
    "orientable",
    "n",
    "unicellular",
    "labeled",
    "well_labeled",
    "quadrangulations",
]


def sphere_quadrangulations(n):
    return 2 * 3**n * math.factorial(2 * n) // (math.factorial(n + 2) * math.factorial(n))


def _count_partition(args):
    n, surface, first, bijective = args
    from .reverse_bijection import AreaComplex

    uni = labeled = well = 0
    codes = set()
    size = 2 * n
    for pairs, cv, nv in gluings(n, surface, first):
        uni += 1
        edges = _edges(size, pairs, cv)
        if not bijective:
            a, b = _count_labelings(nv, edges)
            labeled += a
            well += b
            continue
        arr = labelings_array(nv, edges)
        labeled += arr.shape[0]
        mate = [0] * size
        tw = [False] * size
        for a, b, t in pairs:
            mate[a], mate[b] = b, a
            tw[a] = tw[b] = t
        for row in arr[arr.min(axis=1) >= 1]:
            well += 1
            cl = [int(row[cv[c]]) for c in range(size)]
            q = AreaComplex([size], mate, tw, cl).run().quadrangulation()[0]
            codes.add(canonical_code(q))
    return uni, labeled, well, codes


def count_table(surface, n, bijective=True, jobs=1):
    """Counts of one-face maps, labelings and (via the bijection) quadrangulations."""
    parts = [(n, surface, b, bijective) for b in range(1, 2 * n)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_count_partition, parts))
    else:
        results = [_count_partition(p) for p in parts]
    uni = sum(r[0] for r in results)
    labeled = sum(r[1] for r in results)
    well = sum(r[2] for r in results)
    counts = {"unicellular": uni, "labeled": labeled, "well_labeled": well}
    if bijective:
        codes = set()
        total = 0
        for r in results:
            total += len(r[3])
            codes |= r[3]
        if len(codes) != total or total != well:
            raise MismatchReport(
                f"{surface.name} n={n}: {well} well-labeled maps gave {len(codes)} distinct quadrangulations",
                first=("injectivity", n),
            )
        counts["quadrangulations"] = len(codes)
        counts["pointed_pairs"] = len(codes) * (n + 2 - int(2 * surface.h))
    return CountTable(surface, n, counts)


def verify_counts(surface, n_max, bijective=True, jobs=1):
    """Count tables for ``n = 1..n_max`` with the counting identities asserted."""
    from .genfun import pp_count

    tables = []
    for n in range(1, n_max + 1):
        t = count_table(surface, n, bijective=bijective, jobs=jobs)
        c = t.counts
        if bijective:
            if c["well_labeled"] != c["quadrangulations"]:
                raise MismatchReport(f"n={n}: well-labeled != quadrangulations", first=("well-labeled vs quadrangulations", n))
            if 2 * c["labeled"] != c["pointed_pairs"]:
                raise MismatchReport(
                    f"n={n}: 2*labeled={2 * c['labeled']} but pointed pairs={c['pointed_pairs']}",
                    first=("labeled vs pointed pairs", n),
                )
            if surface == SPHERE and c["quadrangulations"] != sphere_quadrangulations(n):
                raise MismatchReport(f"sphere n={n}: closed form disagrees", first=("sphere", n))
            if surface == SurfaceType(Fraction(1, 2), False) and c["quadrangulations"] != pp_count(n):
                raise MismatchReport(f"projective plane n={n}: pp_count disagrees", first=("pp", n))
        tables.append(t)
    return tables


# --- 2-to-1 transfer and its matching oracle ------------------------------


def transfer(q, v0_flag):
    """Labeled map and sign obtained by re-rooting at ``v0_flag``.

    ``q`` is rooted at its original root; ``v0_flag`` is any flag at the
    pointed vertex.  The original root edge marks the new root corner, and
    the sign records whether the original root vertex is the endpoint of
    that edge farther from the pointed vertex.
    """
    from .forward_bijection import DegState, occupied_corners, red_corner_of, red_edges
    from .surface_core import bfs_distances, from_embedded

    q2 = q.rerooted(v0_flag)
    labels = bfs_distances(q2, q2.root_vertex)
    deg = DegState(q2, labels, [v0_flag]).run()
    red, red_labels, _ = red_edges(deg)
    vo, t0 = q.vertex_of, q.tau0
    rho = q.root
    higher_is_root = labels[vo[rho]] > labels[vo[t0[rho]]]
    f = rho if higher_is_root else t0[rho]
    occupied, rid, _ = occupied_corners(deg)
    m = red.rerooted(rid[red_corner_of(q2, occupied, f)])
    shift = 1 - red_labels[m.root_vertex]
    u = from_embedded(m, [x + shift for x in red_labels])
    return u, ("+" if higher_is_root else "-")


def build_oracle_matching(surface, n, d):
    """Perfect matching between pointed quadrangulations and signed labeled maps.

    Left nodes are ``(q, v0)`` with ``deg(v0) = d``; right nodes are
    ``(labeled map, sign)`` whose map has ``d`` corners of minimum label.
    Each left node is joined once per flag at ``v0``.  Returns
    ``(matching, left_degrees, right_degrees)`` where degrees count edges
    with multiplicity.
    """
    import networkx as nx

    if n > ORACLE_MAX_EDGES:
        raise SizeTooLarge(f"oracle matching is limited to n <= {ORACLE_MAX_EDGES}")
    g = nx.Graph()
    left_deg = Counter()
    right_deg = Counter()
    for q in enumerate_quadrangulations_by_flags(n, surface):
        qc = canonical_code(q)
        vf = q.vertex_flags()
        for v, flags in enumerate(vf):
            if len(flags) != 2 * d:
                continue
            left = ("q", qc, v)
            g.add_node(left, bipartite=0)
            for f in flags:
                u, eps = transfer(q, f)
                right = ("u", u.code(), eps)
                g.add_node(right, bipartite=1)
                g.add_edge(left, right)
                left_deg[left] += 1
                right_deg[right] += 1
    for u in enumerate_labeled(n, surface):
        cl = u.corner_labels()
        if cl.count(min(cl)) == d:
            for eps in "+-":
                right = ("u", u.code(), eps)
                if right not in right_deg:
                    right_deg[right] += 0
                    g.add_node(right, bipartite=1)
    left_nodes = [x for x in g.nodes if x[0] == "q"]
    if not left_nodes:
        return {}, left_deg, right_deg
    matching = nx.bipartite.hopcroft_karp_matching(g, top_nodes=left_nodes)
    return {k: v for k, v in matching.items() if k[0] == "q"}, left_deg, right_deg


# --- several faces ----------------------------------------------------------


def compositions(total, k):
    """Ordered ways to write ``total`` as ``k`` positive parts."""
    for cuts in itertools.combinations(range(1, total), k - 1):
        yield tuple(b - a for a, b in zip((0,) + cuts, cuts + (total,)))


def enumerate_k_rooted(n, k, surface=None):
    """Well-labeled maps with ``n`` edges and ``k`` ordered, rooted faces.

    Each face is entered at a corner of its minimum label and the smallest
    of these root labels is 1.
    """
    from .multipoint import KRootedMap

    size = 2 * n
    for sizes in compositions(size, k):
        for m in matchings(size):
            for bits in itertools.product((False, True), repeat=n):
                mate = [0] * size
                tw = [False] * size
                for (a, b), t in zip(m, bits):
                    mate[a], mate[b] = b, a
                    tw[a] = tw[b] = t
                t0, t1, t2 = polygon_flags(sizes, mate, tw)
                try:
                    emb = EmbeddedMap(tuple(t0), tuple(t1), tuple(t2), 0)
                except Exception:
                    continue  # disconnected
                if emb.n_faces != k:
                    raise AssertionError("polygon gluing changed the face count")
                if surface is not None and euler_type(emb) != surface:
                    continue
                cv = [emb.vertex_of[2 * c] for c in range(size)]
                nv = emb.n_vertices
                edges = [(emb.vertex_of[f], emb.vertex_of[emb.tau0[f]]) for f in range(0, 2 * size, 2)]
                firsts = list(itertools.accumulate((0,) + sizes[:-1]))
                for row in labelings_array(nv, edges):
                    row = row - row.min() + 1
                    cl = [int(row[cv[c]]) for c in range(size)]
                    roots = [cl[b] for b in firsts]
                    if min(roots) != 1:
                        continue
                    if any(cl[b] != min(cl[b : b + s]) for b, s in zip(firsts, sizes)):
                        continue
                    yield KRootedMap(sizes, tuple(mate), tuple(tw), tuple(cl))
