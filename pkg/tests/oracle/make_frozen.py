"""Regenerate ``frozen.json`` from brute force that shares no code with the bijections.

Maps come from the flag-system generator (every involution ``tau1`` on
``4e`` flags); labelings are counted by trying every label vector.

    python3 tests/oracle/make_frozen.py
"""

import itertools
import json
import math
from collections import Counter
from fractions import Fraction
from pathlib import Path

from quadmaps.enumeration import enumerate_rooted_maps
from quadmaps.surface_core import euler_type


def labelings(m):
    """``(all, positive)`` labelings with root label 1 and |difference| <= 1 on edges."""
    nv = m.n_vertices
    root = m.root_vertex
    edges = {(m.vertex_of[f], m.vertex_of[m.tau0[f]]) for f in range(m.size)}
    others = [v for v in range(nv) if v != root]
    total = positive = 0
    span = range(1 - nv, nv + 1)
    for values in itertools.product(span, repeat=len(others)):
        lab = dict(zip(others, values))
        lab[root] = 1
        if all(abs(lab[a] - lab[b]) <= 1 for a, b in edges):
            total += 1
            positive += min(lab.values()) >= 1
    return total, positive


def main():
    labeled = Counter()
    well = Counter()
    maps = Counter()
    for e in (1, 2, 3):
        for m in enumerate_rooted_maps(e):
            s = euler_type(m).name
            maps[(s, e)] += 1
            if m.n_faces == 1:
                a, b = labelings(m)
                labeled[(s, e)] += a
                well[(s, e)] += b
    names = sorted({s for s, _ in maps})
    out = {"labeled": {}, "well_labeled": {}, "rooted_maps": {}}
    for s in names:
        out["labeled"][s] = [labeled[(s, e)] for e in (1, 2, 3)]
        out["well_labeled"][s] = [well[(s, e)] for e in (1, 2, 3)]
        out["rooted_maps"][s] = [maps[(s, e)] for e in (1, 2, 3)]
    # Motzkin bridges by direct walk enumeration
    out["bridges"] = [
        sum(1 for w in itertools.product((-1, 0, 1), repeat=k) if sum(w) == 0) for k in range(0, 9)
    ]
    # sphere closed form, exact rationals
    out["sphere"] = [
        int(Fraction(2 * 3**n * math.factorial(2 * n), math.factorial(n + 2) * math.factorial(n)))
        for n in range(1, 8)
    ]
    path = Path(__file__).with_name("frozen.json")
    path.write_text(json.dumps(out, indent=1, sort_keys=True) + "\n")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
