"""Shared strategies and oracle values for the test modules."""

import json
from pathlib import Path

from hypothesis import strategies as st

from quadmaps.surface_core import SurfaceType, UnicellularMap

FROZEN = json.loads((Path(__file__).parent / "oracle" / "frozen.json").read_text())

SMALL_SURFACES = ["S0", "N0.5", "S1", "N1"]


def surface(name):
    return SurfaceType.parse(name)


@st.composite
def gluings(draw, max_n=5):
    n = draw(st.integers(1, max_n))
    perm = draw(st.permutations(list(range(1, 2 * n + 1))))
    twists = draw(st.lists(st.booleans(), min_size=n, max_size=n))
    pairs = tuple((perm[2 * i], perm[2 * i + 1], twists[i]) for i in range(n))
    root = draw(st.integers(1, 2 * n))
    orient = draw(st.sampled_from([1, -1]))
    return UnicellularMap(n, pairs, root, orient)


def admissible_sources(q, k):
    """Every corner-marked delayed source set of size ``k`` on ``q``."""
    from itertools import permutations, product

    from quadmaps.multipoint import DelayedSources, validate_sources

    flags_at = [[f for f in range(q.size) if q.vertex_of[f] == v] for v in range(q.n_vertices)]
    out = []
    for vs in permutations(range(q.n_vertices), k):
        for delays in product(range(q.n_vertices), repeat=k):
            if validate_sources(q, DelayedSources(vs, delays)) is None:
                for corners in product(*[flags_at[v] for v in vs]):
                    out.append(DelayedSources(vs, delays, corners))
    return out
