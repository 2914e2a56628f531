"""Uniform random labeled one-face maps and the distance statistics they carry.

For type ``h >= 1`` a labeled one-face map is a scheme whose edges are
stretched into labeled chains, with a labeled plane tree hung in every
corner of the resulting core.  Sampling runs that decomposition backwards:

1. scheme and normalised labeling, weighted by their share of the count;
2. total core length;
3. label gaps between scheme levels;
4. chain lengths, then uniform chain walks;
5. a uniform forest on the core corners, with uniform label increments;
6. a uniform root flag.

The projective plane replaces the scheme by a single cycle and the sphere by
a single tree.  Weights are Python integers (``exact``) or floats scaled by
powers of 3 with the core length truncated far in the tail (``float``).
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import InputError, RejectionBudgetExceeded, SizeTooLarge, UnsupportedSurface
from .genfun import (
    _u_in_z,
    compose_nonneg,
    enumerate_schemes,
    mul_nonneg,
    rational_in_u,
    scheme_statistics,
    surjections,
)
from .kernels import contour
from .surface_core import SurfaceType, UnicellularMap

EXACT_MAX_N = 512
FLOAT_TAIL = 10.0  # core lengths beyond FLOAT_TAIL * sqrt(n) + 40 are dropped in float mode


@dataclass(frozen=True)
class SampleConfig:
    surface: SurfaceType
    n: int
    seed: int
    replicates: int = 1
    mode: str = "auto"

    def __post_init__(self):
        if self.n < 1:
            raise InputError("n must be at least 1")
        if self.replicates < 1:
            raise InputError("replicates must be at least 1")
        if not 0 <= self.seed < 2**64:
            raise InputError("seed must fit in 64 unsigned bits")
        if self.mode not in ("auto", "exact", "float"):
            raise InputError(f"unknown mode {self.mode!r}")
        if self.mode == "exact" and self.n > EXACT_MAX_N:
            raise SizeTooLarge(f"exact sampling is limited to n <= {EXACT_MAX_N}")

    @property
    def resolved_mode(self):
        if self.mode == "auto":
            return "exact" if self.n <= EXACT_MAX_N else "float"
        return self.mode


@dataclass(frozen=True)
class StatsRecord:
    radius: int
    profile: tuple  # profile[i] = vertices at distance i from the pointed vertex
    normalized_radius: float


# --- randomness -------------------------------------------------------------


def make_rng(seed, *stream):
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, *stream])))


def rand_below(rng, bound):
    """Uniform integer in ``[0, bound)`` for any positive Python int."""
    if bound <= 0:
        raise ValueError("bound must be positive")
    if bound <= 2**63:
        return int(rng.integers(bound))
    bits = bound.bit_length()
    words = (bits + 63) // 64
    mask = (1 << bits) - 1
    while True:
        raw = rng.bit_generator.random_raw(words)
        x = int.from_bytes(np.asarray(raw, dtype="<u8").tobytes(), "little") & mask
        if x < bound:
            return x


def choose(rng, weights):
    """Index drawn proportionally to ``weights`` (ints: exact; floats: scaled)."""
    if isinstance(weights, np.ndarray) and weights.dtype.kind == "f":
        cum = np.cumsum(weights)
        if not cum[-1] > 0:
            raise InputError("no positive weight to choose from")
        return int(np.searchsorted(cum, rng.random() * cum[-1], side="right"))
    total = sum(weights)
    if total <= 0:
        raise InputError("no positive weight to choose from")
    r = rand_below(rng, total)
    for i, w in enumerate(weights):
        if r < w:
            return i
        r -= w
    raise AssertionError("unreachable")


# --- trinomial tables ---------------------------------------------------------


class _Trinomials:
    """Rows of ``(1 + y + y^2)^k``; ``float`` rows are divided by ``3^k``."""

    def __init__(self, exact):
        self.exact = exact
        self.rows = [[1] if exact else np.ones(1)]

    def row(self, k):
        while len(self.rows) <= k:
            prev = self.rows[-1]
            if self.exact:
                nxt = [0] * (len(prev) + 2)
                for i, c in enumerate(prev):
                    nxt[i] += c
                    nxt[i + 1] += c
                    nxt[i + 2] += c
            else:
                nxt = np.zeros(len(prev) + 2)
                nxt[:-2] += prev
                nxt[1:-1] += prev
                nxt[2:] += prev
                nxt /= 3.0
            self.rows.append(nxt)
        return self.rows[k]

    def walks(self, k, delta):
        """Walks of ``k`` steps in {-1, 0, 1} with displacement ``delta``."""
        if abs(delta) > k:
            return 0
        return self.row(k)[k + delta]

    def zpow(self, p, j):
        """``[z^j] U^p`` where ``U = z (1 + U + U^2)``."""
        if p == 0:
            return 1 if j == 0 else 0
        if p > j:
            return 0
        c = self.row(j)[j - p]
        return p * c // j if self.exact else p * c / j


@lru_cache(maxsize=4)
def _tri(exact):
    return _Trinomials(exact)


def _float_zpow_matrix(lmax):
    """``P[p, j] = [z^j] U^p / 3^j`` for ``0 <= p, j <= lmax``."""
    tri = _tri(False)
    mat = np.zeros((lmax + 1, lmax + 1))
    mat[0, 0] = 1.0
    for j in range(1, lmax + 1):
        row = tri.row(j)
        p = np.arange(1, j + 1)
        mat[1 : j + 1, j] = p * row[j - p] / j
    return mat


# --- counting helpers -----------------------------------------------------------


def _float_lmax(n):
    return min(n, int(FLOAT_TAIL * math.sqrt(n)) + 40)


def _forest_weights(n, lmax, exact):
    """Weights over core length ``L`` of the forests hung in ``2L`` corners.

    Exact: ``[t^(n-L)] T^(2L) = 3^(n-L) (L/n) C(2n, n-L)``.  Float: the same
    times ``3^L / (3^n C(2n, n))``, matching the ``3^-L`` scaling of the core.
    """
    if exact:
        out = [0]
        for L in range(1, lmax + 1):
            num = 3 ** (n - L) * L * math.comb(2 * n, n - L)
            out.append(num // n)
        return out
    L = np.arange(lmax + 1, dtype=float)
    lg = math.lgamma
    logc = np.array([lg(2 * n + 1) - lg(n - x + 1) - lg(n + x + 1) for x in range(lmax + 1)])
    logc -= lg(2 * n + 1) - 2 * lg(n + 1)
    w = L / n * np.exp(logc)
    w[0] = 0.0
    return w


def _gap_tables(d, top):
    """``tables[j][x]``: ways to write ``x`` as ``sum_{i >= j} d_i g_i`` with ``g_i >= 1``."""
    tables = [None] * (len(d) + 1)
    tables[len(d)] = [1] + [0] * top
    for j in range(len(d) - 1, -1, -1):
        nxt = tables[j + 1]
        cur = [0] * (top + 1)
        for x in range(top + 1):
            g = 1
            while d[j] * g <= x:
                cur[x] += nxt[x - d[j] * g]
                g += 1
        tables[j] = cur
    return tables


def _uniform_walk(rng, k, delta, exact):
    """Uniform sequence of ``k`` steps in {-1, 0, 1} summing to ``delta``."""
    ups = list(range(max(0, delta), (k + delta) // 2 + 1))
    if exact:
        w = [math.comb(k, u) * math.comb(k - u, u - delta) for u in ups]
    else:
        lg = math.lgamma
        logw = np.array([-lg(u + 1) - lg(u - delta + 1) - lg(k - 2 * u + delta + 1) for u in ups])
        w = np.exp(logw - logw.max())
    u = ups[choose(rng, w)]
    steps = np.zeros(k, dtype=np.int64)
    steps[:u] = 1
    steps[u : 2 * u - delta] = -1
    return rng.permutation(steps)


def _uniform_forest_word(rng, trees, edges):
    """Contour word of a uniform sequence of ``trees`` plane trees with ``edges`` edges.

    Returns ``+1``/``-1`` tree steps with ``0`` after each tree.  Built from a
    uniform arrangement of ``edges`` up-steps and ``edges + trees``
    down-steps, rotated to one of its ``trees`` good cyclic shifts.
    """
    size = 2 * edges + trees
    word = np.full(size, -1, dtype=np.int64)
    word[:edges] = 1
    word = rng.permutation(word)
    s = np.concatenate(([0], np.cumsum(word)))
    pre = np.concatenate(([np.iinfo(np.int64).max], np.minimum.accumulate(s[:-1])))[:size]
    suf = np.minimum.accumulate(s[::-1])[::-1]  # suf[j] = min s[j..size]
    ok = s[:size] < pre
    after = np.empty(size, dtype=np.int64)
    after[:-1] = suf[1:size]
    after[-1] = s[size]
    ok &= after > s[:size] - trees
    if size > 1:
        ok[0] = s[1:size].min() > -trees
    else:
        ok[0] = True
    starts = np.flatnonzero(ok)
    if len(starts) != trees:
        raise AssertionError(f"cyclic lemma gave {len(starts)} rotations for {trees} trees")
    j = int(starts[rng.integers(trees)])
    word = np.concatenate((word[j:], word[:j]))
    walk = np.cumsum(word)
    record = np.minimum.accumulate(np.concatenate(([0], walk)))[:-1]
    word[walk < record] = 0
    return word


# --- core structures -------------------------------------------------------------


@dataclass
class _Core:
    """Core of a one-face map: sides with mates, twists and start labels."""

    mate: list
    twisted: list
    start_label: list
    vertex_labels: list  # one per core vertex


@dataclass(frozen=True)
class Draw:
    """A sampled labeled one-face map as a polygon, before normalisation."""

    n: int
    mate: np.ndarray
    twisted: np.ndarray
    corner_label: np.ndarray
    vertex_labels: np.ndarray
    mode: str

    def to_unicellular(self):
        pairs = tuple(
            (i + 1, int(j) + 1, bool(self.twisted[i])) for i, j in enumerate(self.mate) if i < j
        )
        u = UnicellularMap(self.n, pairs)
        labels = [0] * u.n_vertices
        for s, v in enumerate(u.corner_vertex):
            labels[v] = int(self.corner_label[s])
        shift = 1 - labels[0]
        return u.with_labels([x + shift for x in labels])


def _dress(rng, core, n):
    """Hang a uniform labeled forest in the corners of ``core``; return a Draw."""
    r = len(core.mate)
    trees = max(r, 1)
    word = _uniform_forest_word(rng, trees, n - r // 2)
    inc = rng.integers(-1, 2, size=len(word))
    labels0 = np.asarray(core.start_label if r else [0], dtype=np.int64)
    mate, label = contour(word, inc, labels0)
    if r == 0:
        word, mate, label, inc = word[:-1], mate[:-1], label[:-1], inc[:-1]
    pos = np.flatnonzero(word == 0)
    twisted = np.zeros(len(word), dtype=bool)
    for c in range(r):
        mate[pos[c]] = pos[core.mate[c]]
        twisted[pos[c]] = core.twisted[c]
    ups = word == 1
    tree_labels = label[ups] + inc[ups]
    core_labels = np.asarray(core.vertex_labels if r else [0], dtype=np.int64)
    return mate, twisted, label, np.concatenate((core_labels, tree_labels))


def _scheme_core(scheme, lstar, gaps, lengths, walks):
    heights = [0]
    for g in gaps:
        heights.append(heights[-1] + g)
    lab = [heights[x - 1] for x in lstar]
    sides = 2 * scheme.n_edges
    k_side = [0] * sides
    for (a, b, _), k in zip(scheme.pairs, lengths):
        k_side[a] = k_side[b] = k
    offset = [0] * (sides + 1)
    for s in range(sides):
        offset[s + 1] = offset[s] + k_side[s]
    total = offset[-1]
    mate = [0] * total
    twisted = [False] * total
    start = [0] * total
    vertex_labels = list(lab)
    for (a, b, t), (u, _), k, steps in zip(scheme.pairs, scheme.edges, lengths, walks):
        prefix = [lab[u]]
        for x in steps:
            prefix.append(prefix[-1] + int(x))
        vertex_labels.extend(prefix[1:k])
        for i in range(k):
            sa = offset[a] + i
            start[sa] = prefix[i]
            if t:
                sb = offset[b] + i
                start[sb] = prefix[i]
            else:
                sb = offset[b] + k - 1 - i
                start[sb] = prefix[i + 1]
            mate[sa], mate[sb] = sb, sa
            twisted[sa] = twisted[sb] = t
    return _Core(mate, twisted, start, vertex_labels)


def _cycle_core(steps):
    k = len(steps)
    prefix = [0]
    for x in steps[:-1]:
        prefix.append(prefix[-1] + int(x))
    mate = [(c + k) % (2 * k) for c in range(2 * k)]
    return _Core(mate, [True] * (2 * k), prefix + prefix, prefix)


# --- weight tables ---------------------------------------------------------------


class _SchemeTable:
    """Key weights for one surface of type ``h >= 1`` and one size."""

    def __init__(self, surface, n, exact):
        self.n = n
        self.exact = exact
        self.lmax = n if exact else _float_lmax(n)
        classes = {}
        schemes = enumerate_schemes(surface)
        for idx, s in enumerate(schemes):
            for k in range(1, s.n_vertices + 1):
                for f in surjections(s.n_vertices, k):
                    e_eq, e_ne, d = scheme_statistics(s, f)
                    key = (s.n_edges, e_eq, e_ne, tuple(sorted(d)))
                    classes.setdefault(key, []).append((idx, f))
        self.schemes = schemes
        self.keys = sorted(classes)
        self.classes = [classes[k] for k in self.keys]
        forest = _forest_weights(n, self.lmax, exact)
        lcm = math.lcm(*(k[0] for k in self.keys))
        self.by_length = []
        self.alpha = []
        totals = []
        if exact:
            uz = list(_u_in_z(self.lmax))
        else:
            pmat = _float_zpow_matrix(self.lmax)
        for key, members in zip(self.keys, self.classes):
            e, e_eq, e_ne, d = key
            r = rational_in_u(e, e_eq, e_ne, d, self.lmax)
            a = rational_in_u(e, e_eq, e_ne, (), self.lmax)
            if exact:
                per_l = [f * c for f, c in zip(forest, compose_nonneg(r, uz, self.lmax))]
                self.alpha.append(compose_nonneg(a, uz, self.lmax))
                totals.append(len(members) * (lcm // e) * sum(per_l))
            else:
                per_l = forest * (np.asarray(r, dtype=float) @ pmat)
                self.alpha.append(np.asarray(a, dtype=float) @ pmat)
                totals.append(len(members) / e * per_l.sum())
            self.by_length.append(per_l)
        self.totals = totals if exact else np.asarray(totals)


@lru_cache(maxsize=16)
def _scheme_table(surface, n, exact):
    return _SchemeTable(surface, n, exact)


@lru_cache(maxsize=16)
def _cycle_weights(n, exact):
    lmax = n if exact else _float_lmax(n)
    tri = _tri(exact)
    if exact:
        return [0] + [tri.walks(k, 0) * 3 ** (n - k) * math.comb(2 * n, n - k) for k in range(1, lmax + 1)]
    lg = math.lgamma
    w = np.zeros(lmax + 1)
    base = lg(2 * n + 1) - 2 * lg(n + 1)
    for k in range(1, lmax + 1):
        w[k] = tri.walks(k, 0) * math.exp(lg(2 * n + 1) - lg(n - k + 1) - lg(n + k + 1) - base)
    return w


# --- the sampler ------------------------------------------------------------------


def _sample_scheme_core(rng, surface, n, exact):
    table = _scheme_table(surface, n, exact)
    tri = _tri(exact)
    ki = choose(rng, table.totals)
    members = table.classes[ki]
    idx, lstar = members[rand_below(rng, len(members))]
    scheme = table.schemes[idx]
    L = choose(rng, table.by_length[ki])
    _, _, d = scheme_statistics(scheme, lstar)
    alpha = table.alpha[ki]
    gaps_ways = _gap_tables(d, L)
    d_lo = sum(d)
    ds = [D for D in range(d_lo, L + 1) if gaps_ways[0][D]]
    if exact:
        w = []
        for D in ds:
            inner = sum(alpha[i] * tri.zpow(D, L - i) for i in range(L - D + 1))
            w.append(gaps_ways[0][D] * inner)
    else:
        w = np.array(
            [
                gaps_ways[0][D]
                * sum(alpha[i] * tri.zpow(D, L - i) for i in range(L - D + 1))
                for D in ds
            ]
        )
    D = ds[choose(rng, w)]
    gaps = []
    rest = D
    for j, dj in enumerate(d):
        opts = [g for g in range(1, rest // dj + 1) if gaps_ways[j + 1][rest - dj * g]]
        g = opts[choose(rng, [gaps_ways[j + 1][rest - dj * g] for g in opts])]
        gaps.append(g)
        rest -= dj * g
    heights = [0]
    for g in gaps:
        heights.append(heights[-1] + g)
    deltas = [heights[lstar[v] - 1] - heights[lstar[u] - 1] for u, v in scheme.edges]
    lengths = _split_lengths(rng, tri, deltas, L, exact)
    walks = [_uniform_walk(rng, k, delta, exact) for k, delta in zip(lengths, deltas)]
    return _scheme_core(scheme, lstar, gaps, lengths, walks), L


def _split_lengths(rng, tri, deltas, total, exact):
    """Chain lengths ``k_e >= 1`` summing to ``total``, weighted by walk counts."""
    rows = []
    for delta in deltas:
        if exact:
            rows.append([0] + [tri.walks(k, delta) for k in range(1, total + 1)])
        else:
            row = np.array([tri.walks(k, delta) for k in range(total + 1)], dtype=float)
            row[0] = 0.0
            rows.append(row)
    suffix = [None] * (len(rows) + 1)
    suffix[-1] = [1] + [0] * total if exact else np.eye(1, total + 1)[0]
    for i in range(len(rows) - 1, -1, -1):
        if exact:
            suffix[i] = mul_nonneg(rows[i], suffix[i + 1], total)
        else:
            suffix[i] = np.convolve(rows[i], suffix[i + 1])[: total + 1]
    out = []
    left = total
    for i, row in enumerate(rows):
        nxt = suffix[i + 1]
        if exact:
            w = [row[k] * nxt[left - k] for k in range(left + 1)]
        else:
            w = row[: left + 1] * nxt[left::-1]
        k = choose(rng, w)
        out.append(k)
        left -= k
    return out


def sample_draw(surface, n, rng, mode="exact"):
    """One uniform labeled one-face map as a :class:`Draw`."""
    exact = mode == "exact"
    if exact and n > EXACT_MAX_N:
        raise SizeTooLarge(f"exact sampling is limited to n <= {EXACT_MAX_N}")
    if surface.h == 0:
        core = _Core([], [], [], [])
    elif surface.h == Fraction(1, 2):
        if surface.orientable:
            raise UnsupportedSurface("type 1/2 is non-orientable")
        k = choose(rng, _cycle_weights(n, exact))
        core = _cycle_core(_uniform_walk(rng, k, 0, exact))
    else:
        if n < 2 * surface.h:
            raise UnsupportedSurface(f"no one-face map with {n} edges on {surface.name}")
        core, _ = _sample_scheme_core(rng, surface, n, exact)
    mate, twisted, label, vlabels = _dress(rng, core, n)
    return Draw(n, mate, twisted, label, vlabels, mode)


def sample_labeled_unicellular(cfg, replicate=0):
    """Uniform labeled one-face map with ``cfg.n`` edges on ``cfg.surface``."""
    rng = make_rng(cfg.seed, cfg.n, replicate)
    return _rooted(rng, sample_draw(cfg.surface, cfg.n, rng, cfg.resolved_mode))


def _rooted(rng, draw):
    u = draw.to_unicellular()
    return u.rerooted(rand_below(rng, 4 * draw.n))


def sample_well_labeled(surface, n, rng, mode="exact", budget=None):
    """Uniform well-labeled map: labeled draws kept when the root is a minimum.

    Returns ``(map, attempts)``.
    """
    budget = budget if budget is not None else 100 * (n + 2)
    for attempt in range(1, budget + 1):
        draw = sample_draw(surface, n, rng, mode)
        flag = rand_below(rng, 4 * n)
        u = draw.to_unicellular().rerooted(flag)
        if u.labels[0] == min(u.labels):
            return u, attempt
    raise RejectionBudgetExceeded(f"no well-labeled map in {budget} attempts at n={n}")


def sample_quadrangulation(surface, n, seed, replicate=0, budget=None):
    """Uniform rooted bipartite quadrangulation with ``n`` faces."""
    from .reverse_bijection import unicellular_to_quad

    rng = make_rng(seed, n, replicate)
    mode = "exact" if n <= EXACT_MAX_N else "float"
    u, _ = sample_well_labeled(surface, n, rng, mode, budget)
    return unicellular_to_quad(u)


# --- statistics ----------------------------------------------------------------


def _record(labels, n):
    labels = np.asarray(labels, dtype=np.int64)
    lo = int(labels.min())
    counts = np.bincount(labels - lo)
    profile = (1,) + tuple(int(c) for c in counts)
    radius = len(counts)
    return StatsRecord(radius, profile, radius / (8 * n / 9) ** 0.25)


def stats(u):
    """Radius and distance profile seen from the extra pointed vertex."""
    if u.labels is None:
        raise InputError("stats need a labeled map")
    return _record(u.labels, u.n)


def draw_stats(draw):
    return _record(draw.vertex_labels, draw.n)


# --- experiments ----------------------------------------------------------------

SAMPLE_COLUMNS = ["surface", "h", "n", "seed", "replicate", "radius", "norm_radius", "profile_json", "mode"]


def _row(surface, n, seed, replicate, rec, mode):
    return {
        "surface": surface.name,
        "h": str(surface.h),
        "n": n,
        "seed": seed,
        "replicate": replicate,
        "radius": rec.radius,
        "norm_radius": f"{rec.normalized_radius:.6f}",
        "profile_json": json.dumps(list(rec.profile), separators=(",", ":")),
        "mode": mode,
    }


def _one_replicate(args):
    surface, n, seed, replicate, mode = args
    rng = make_rng(seed, n, replicate)
    draw = sample_draw(surface, n, rng, mode)
    return _row(surface, n, seed, replicate, draw_stats(draw), mode)


def _map_jobs(tasks, jobs):
    if jobs <= 1:
        return [_one_replicate(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_one_replicate, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))


def sample_rows(cfg, jobs=1):
    """One CSV row per replicate."""
    tasks = [(cfg.surface, cfg.n, cfg.seed, r, cfg.resolved_mode) for r in range(cfg.replicates)]
    return _map_jobs(tasks, jobs)


@dataclass(frozen=True)
class ScalingResult:
    rows: list
    summary: dict  # n -> {"median", "q25", "q75", "iqr"}

    def median_spread(self):
        """Largest pairwise relative difference between medians."""
        meds = [v["median"] for v in self.summary.values()]
        return max(abs(a - b) / min(a, b) for a in meds for b in meds)


def experiment_scaling(surface, sizes, replicates, seed, jobs=1, mode="auto"):
    sizes = list(sizes)
    if sizes != sorted(sizes):
        raise InputError("sizes must be ascending")
    if replicates < 1:
        raise InputError("replicates must be at least 1")
    tasks = []
    for n in sizes:
        m = mode if mode != "auto" else ("exact" if n <= EXACT_MAX_N else "float")
        tasks.extend((surface, n, seed, r, m) for r in range(replicates))
    rows = _map_jobs(tasks, jobs)
    summary = {}
    for n in sizes:
        vals = np.array([float(r["norm_radius"]) for r in rows if r["n"] == n])
        q25, med, q75 = np.percentile(vals, [25, 50, 75])
        summary[n] = {"median": float(med), "q25": float(q25), "q75": float(q75), "iqr": float(q75 - q25)}
    return ScalingResult(rows, summary)


def summary_rows(surface, seed, result):
    out = []
    for n, s in result.summary.items():
        out.append(
            {
                "surface": surface.name,
                "h": str(surface.h),
                "n": n,
                "seed": seed,
                "replicate": "summary",
                "radius": "",
                "norm_radius": f"{s['median']:.6f}",
                "profile_json": json.dumps({k: round(v, 6) for k, v in s.items()}, separators=(",", ":")),
                "mode": "exact" if n <= EXACT_MAX_N else "float",
            }
        )
    return out
