from collections import Counter

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats as sps

from helpers import FROZEN, surface
from quadmaps import kernels
from quadmaps.errors import InputError, RejectionBudgetExceeded, SizeTooLarge, UnsupportedSurface
from quadmaps.reverse_bijection import check_well_labeled, unicellular_to_quad
from quadmaps.sampler import (
    EXACT_MAX_N,
    SampleConfig,
    _uniform_forest_word,
    _uniform_walk,
    choose,
    draw_stats,
    experiment_scaling,
    make_rng,
    rand_below,
    sample_draw,
    sample_labeled_unicellular,
    sample_quadrangulation,
    sample_rows,
    sample_well_labeled,
    stats,
    summary_rows,
)
from quadmaps.surface_core import bfs_distances, euler_type


def _key(u):
    return (u.pairs, u.root_side, u.root_orient, u.labels)


# --- random primitives ---------------------------------------------------


@pytest.mark.parametrize("bound", [1, 7, 2**63, 2**63 + 1, 3**100])
def test_rand_below_range(bound):
    rng = make_rng(1)
    assert all(0 <= rand_below(rng, bound) < bound for _ in range(200))


def test_rand_below_big_bound_is_uniform():
    rng = make_rng(2)
    bound = 3 * 2**70
    counts = Counter(rand_below(rng, bound) * 3 // bound for _ in range(6000))
    assert sps.chisquare([counts[i] for i in range(3)]).pvalue > 1e-4


def test_rand_below_rejects_nonpositive():
    with pytest.raises(ValueError):
        rand_below(make_rng(0), 0)


@pytest.mark.parametrize("weights", [[1, 0, 3], np.array([0.5, 0.0, 1.5])])
def test_choose_frequencies(weights):
    rng = make_rng(3)
    counts = Counter(choose(rng, weights) for _ in range(8000))
    assert counts[1] == 0
    assert abs(counts[2] / 8000 - 0.75) < 0.03


def test_choose_needs_positive_weight():
    with pytest.raises(InputError):
        choose(make_rng(0), [0, 0])


@given(st.integers(1, 30), st.integers(-30, 30), st.integers(0, 2**32), st.booleans())
def test_walk_steps_and_displacement(k, delta, seed, exact):
    if abs(delta) > k:
        return
    w = _uniform_walk(make_rng(seed), k, delta, exact)
    assert len(w) == k and int(w.sum()) == delta and set(w.tolist()) <= {-1, 0, 1}


@given(st.integers(1, 12), st.integers(0, 40), st.integers(0, 2**32))
def test_forest_word_is_a_forest(trees, edges, seed):
    word = _uniform_forest_word(make_rng(seed), trees, edges)
    assert len(word) == 2 * edges + trees
    assert int((word == 0).sum()) == trees and word[-1] == 0
    h = 0
    for s in word.tolist():
        if s == 0:
            assert h == 0
        h += s
        assert h >= 0


def test_forest_words_are_uniform():
    # 2 trees, 2 edges: C(2 trees, 2 edges) = 5 forests; each equally likely
    rng = make_rng(4)
    counts = Counter(tuple(_uniform_forest_word(rng, 2, 2).tolist()) for _ in range(5000))
    assert len(counts) == 5
    assert sps.chisquare(list(counts.values())).pvalue > 1e-3


# --- contour kernel -------------------------------------------------------


@given(st.integers(1, 8), st.integers(0, 60), st.integers(0, 2**32))
def test_kernel_versions_agree(trees, edges, seed):
    rng = make_rng(seed)
    word = _uniform_forest_word(rng, trees, edges)
    inc = rng.integers(-1, 2, size=len(word))
    start = rng.integers(-5, 6, size=trees)
    m1, l1 = kernels.contour_numpy(word, inc, start)
    m2, l2 = kernels._contour_loop(word, inc, start)
    m3, l3 = kernels.contour(word, inc, start)
    assert np.array_equal(m1, m2) and np.array_equal(l1, l2)
    assert np.array_equal(m1, m3) and np.array_equal(l1, l3)
    ups = np.flatnonzero(word == 1)
    assert np.array_equal(word[m1[ups]], -np.ones(len(ups)))


# --- draws ------------------------------------------------------------------


@pytest.mark.parametrize("name", ["S0", "N0.5", "S1", "N1", "N1.5"])
@pytest.mark.parametrize("mode", ["exact", "float"])
def test_draws_land_on_the_surface(name, mode):
    s = surface(name)
    rng = make_rng(5)
    for n in (4, 9, 40):
        u = sample_draw(s, n, rng, mode).to_unicellular()
        assert u.n == n and u.surface == s and u.labels[0] == 1
        assert len(u.labels) == n + 1 - int(2 * s.h)


@pytest.mark.parametrize("name, n", [("N1.5", 2), ("S2", 10), ("N2", 10)])
def test_unsupported_requests(name, n):
    with pytest.raises(UnsupportedSurface):
        sample_draw(surface(name), n, make_rng(0))


def test_exact_size_limit():
    with pytest.raises(SizeTooLarge):
        sample_draw(surface("S0"), EXACT_MAX_N + 1, make_rng(0), "exact")
    with pytest.raises(SizeTooLarge):
        SampleConfig(surface("S0"), EXACT_MAX_N + 1, 0, mode="exact")


@pytest.mark.parametrize(
    "kwargs", [dict(n=0), dict(replicates=0), dict(seed=-1), dict(seed=2**64), dict(mode="fast")]
)
def test_config_errors(kwargs):
    base = dict(surface=surface("N1"), n=10, seed=1)
    base.update(kwargs)
    with pytest.raises(InputError):
        SampleConfig(**base)


def test_resolved_mode():
    assert SampleConfig(surface("N1"), EXACT_MAX_N, 1).resolved_mode == "exact"
    assert SampleConfig(surface("N1"), EXACT_MAX_N + 1, 1).resolved_mode == "float"


def test_same_seed_same_map():
    cfg = SampleConfig(surface("N1"), 60, 123)
    assert sample_labeled_unicellular(cfg, 3) == sample_labeled_unicellular(cfg, 3)
    assert sample_labeled_unicellular(cfg, 3) != sample_labeled_unicellular(cfg, 4)


@pytest.mark.parametrize(
    "name, n, well",
    [("S0", 3, False), ("N0.5", 3, False), ("S1", 3, False), ("N1", 3, True), ("N1", 2, False)],
)
def test_small_sizes_are_uniform(name, n, well):
    s = surface(name)
    rng = make_rng(6)
    target = FROZEN["well_labeled" if well else "labeled"][name][n - 1]
    draws = 40 * target
    counts = Counter()
    for _ in range(draws):
        if well:
            u, _ = sample_well_labeled(s, n, rng)
        else:
            u = sample_draw(s, n, rng).to_unicellular().rerooted(rand_below(rng, 4 * n))
        counts[_key(u)] += 1
    assert len(counts) == target
    assert sps.chisquare(list(counts.values())).pvalue > 1e-3


def test_well_labeled_budget():
    with pytest.raises(RejectionBudgetExceeded):
        for seed in range(50):
            sample_well_labeled(surface("N1"), 200, make_rng(seed), budget=1)


# --- statistics -------------------------------------------------------------


def test_stats_agree_with_distances_in_the_quadrangulation():
    s = surface("N1")
    rng = make_rng(7)
    for _ in range(100):
        u, _ = sample_well_labeled(s, 30, rng)
        check_well_labeled(u)
        q = unicellular_to_quad(u)
        assert euler_type(q) == s
        dist = bfs_distances(q, q.root_vertex)
        rec = stats(u)
        assert rec.radius == max(dist)
        assert rec.profile == tuple(Counter(dist)[i] for i in range(max(dist) + 1))


def test_draw_stats_match_unicellular_stats():
    rng = make_rng(8)
    draw = sample_draw(surface("N1"), 50, rng)
    assert draw_stats(draw) == stats(draw.to_unicellular())


def test_stats_need_labels():
    u = sample_draw(surface("S0"), 3, make_rng(0)).to_unicellular().with_labels(None)
    with pytest.raises(InputError):
        stats(u)


def test_sample_quadrangulation_is_deterministic():
    a = sample_quadrangulation(surface("N1"), 20, 99)
    b = sample_quadrangulation(surface("N1"), 20, 99)
    assert a == b and a.n_faces == 20 and euler_type(a) == surface("N1")


# --- experiments ---------------------------------------------------------------


def test_rows_do_not_depend_on_jobs():
    cfg = SampleConfig(surface("N1"), 40, 11, replicates=6)
    assert sample_rows(cfg, jobs=1) == sample_rows(cfg, jobs=2)


def test_scaling_summary():
    s = surface("N1")
    res = experiment_scaling(s, [16, 64], 30, seed=3)
    assert len(res.rows) == 60
    assert set(res.summary) == {16, 64}
    for v in res.summary.values():
        assert v["q25"] <= v["median"] <= v["q75"]
    assert res.median_spread() >= 0
    rows = summary_rows(s, 3, res)
    assert [r["replicate"] for r in rows] == ["summary", "summary"]


def test_scaling_rejects_unsorted_sizes():
    with pytest.raises(InputError):
        experiment_scaling(surface("N1"), [64, 16], 2, seed=1)


@pytest.mark.parametrize("flag, expected", [("1", "False"), ("0", "True")])
def test_kernel_env_flag(flag, expected):
    import os
    import subprocess
    import sys

    env = dict(os.environ, QUADMAPS_NO_NUMBA=flag)
    code = "from quadmaps import kernels; print(kernels.USE_NUMBA, kernels.contour is kernels.contour_numpy)"
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.split() == [expected, str(expected == "False")]
