"""Contour kernel for forests hung in the corners of a polygon.

A sampled one-face map is written as a word over ``{+1, -1, 0}``: ``+1``
steps down a tree edge, ``-1`` climbs back, ``0`` is a core side leading to
the next corner.  The kernel pairs every ``+1`` with its ``-1`` and labels
the start of every step.

Set ``QUADMAPS_NO_NUMBA=1`` to force the vectorised numpy version.
"""

from __future__ import annotations

import os

import numpy as np

USE_NUMBA = os.environ.get("QUADMAPS_NO_NUMBA", "") in ("", "0")

if USE_NUMBA:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover
        USE_NUMBA = False


def contour_numpy(steps, inc, corner_label):
    """``(mate, label)`` for a contour word; ``mate`` is -1 on core sides."""
    steps = np.asarray(steps, dtype=np.int64)
    n = len(steps)
    height = np.concatenate(([0], np.cumsum(steps)[:-1]))
    edge = np.flatnonzero(steps)
    level = height[edge] - (steps[edge] < 0)
    order = edge[np.lexsort((edge, level))]
    ups, downs = order[0::2], order[1::2]
    mate = np.full(n, -1, dtype=np.int64)
    mate[ups] = downs
    mate[downs] = ups
    delta = np.zeros(n, dtype=np.int64)
    delta[ups] = inc[ups]
    delta[downs] = -inc[ups]
    walk = np.concatenate(([0], np.cumsum(delta)[:-1]))
    tree = np.concatenate(([0], np.cumsum(steps == 0)[:-1]))
    tree = np.minimum(tree, len(corner_label) - 1)
    return mate, np.asarray(corner_label, dtype=np.int64)[tree] + walk


def _contour_loop(steps, inc, corner_label):
    n = steps.shape[0]
    mate = np.full(n, -1, dtype=np.int64)
    label = np.zeros(n, dtype=np.int64)
    stack = np.zeros(n, dtype=np.int64)
    top = 0
    tree = 0
    cur = corner_label[0]
    for i in range(n):
        label[i] = cur
        s = steps[i]
        if s > 0:
            stack[top] = i
            top += 1
            cur += inc[i]
        elif s < 0:
            top -= 1
            j = stack[top]
            mate[i] = j
            mate[j] = i
            cur -= inc[j]
        else:
            tree += 1
            if tree < corner_label.shape[0]:
                cur = corner_label[tree]
    return mate, label


if USE_NUMBA:
    _contour_jit = njit(cache=True)(_contour_loop)

    def contour(steps, inc, corner_label):
        return _contour_jit(
            np.ascontiguousarray(steps, dtype=np.int64),
            np.ascontiguousarray(inc, dtype=np.int64),
            np.ascontiguousarray(corner_label, dtype=np.int64),
        )

else:
    contour = contour_numpy
