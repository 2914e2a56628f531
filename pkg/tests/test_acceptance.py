"""One test per acceptance criterion; each prints a PASS/FAIL line."""

import math
import time
from collections import Counter

import pytest
from scipy import stats as sps

from helpers import SMALL_SURFACES, admissible_sources, surface
from quadmaps.enumeration import (
    count_table,
    enumerate_k_rooted,
    enumerate_labeled,
    enumerate_quadrangulations_by_flags,
)
from quadmaps.forward_bijection import build_deg, label_statistics, quad_to_unicellular
from quadmaps.genfun import Q_series, asymptotic_fit, expected_exponent, pp_count
from quadmaps.multipoint import (
    ab_backward,
    ab_forward,
    ab_labels,
    ell_d,
    extremal_vertices,
    lambda_multi,
    phi_multi,
    pointed_labels,
    sources_key,
)
from quadmaps.reverse_bijection import Geodesics, build_area_complex, unicellular_to_quad
from quadmaps.sampler import experiment_scaling, make_rng, rand_below, sample_draw, sample_well_labeled
from quadmaps.surface_core import bfs_distances, canonical_code

SEED = 20261016
KLEIN = surface("N1")


@pytest.fixture
def report(capsys, request):
    start = time.perf_counter()

    def emit(number, ok, detail):
        secs = time.perf_counter() - start
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail} ({secs:.1f}s)")
        assert ok, detail

    return emit


def _quads():
    for name in SMALL_SURFACES:
        for n in (1, 2, 3):
            for q in enumerate_quadrangulations_by_flags(n, surface(name)):
                yield name, n, q


def _wells():
    for name in SMALL_SURFACES:
        for n in (1, 2, 3):
            for u in enumerate_labeled(n, surface(name), well=True):
                yield name, n, u


_SAMPLED = {}


def _sampled_klein(n, count):
    key = (n, count)
    if key not in _SAMPLED:
        rng = make_rng(SEED, n)
        _SAMPLED[key] = [sample_well_labeled(KLEIN, n, rng)[0] for _ in range(count)]
    return _SAMPLED[key]


def test_criterion_01_sphere_counts(report):
    got = [count_table(surface("S0"), n).counts["quadrangulations"] for n in range(1, 8)]
    want = [2 * 3**n * math.factorial(2 * n) // (math.factorial(n + 2) * math.factorial(n)) for n in range(1, 8)]
    report(1, got == want, f"sphere counts {got} vs closed form {want}")


def test_criterion_02_projective_plane_counts(report):
    got = [count_table(surface("N0.5"), n).counts["quadrangulations"] for n in range(1, 6)]
    want = [pp_count(n) for n in range(1, 6)]
    ok = got == want and want[:2] == [1, 10]
    report(2, ok, f"bijective counts {got} vs pp_count {want}")


def test_criterion_03_round_trips(report):
    fails = checked = 0
    for _, _, q in _quads():
        checked += 1
        fails += canonical_code(unicellular_to_quad(quad_to_unicellular(q))) != canonical_code(q)
    for _, _, u in _wells():
        checked += 1
        fails += quad_to_unicellular(unicellular_to_quad(u)).code() != u.code()
    sampled = 0
    for u in _sampled_klein(50, 1000):
        q = unicellular_to_quad(u)
        u2 = quad_to_unicellular(q)
        fails += u2.code() != u.code()
        fails += canonical_code(unicellular_to_quad(u2)) != canonical_code(q)
        sampled += 1
    report(3, fails == 0, f"{checked} exhaustive and {sampled} sampled Klein maps at n=50, {fails} failures")


def test_criterion_04_label_histograms(report):
    fails = checked = 0
    for _, _, q in _quads():
        u = quad_to_unicellular(q)
        verts, edges = label_statistics(q)
        corner_hist = Counter(u.corner_labels())
        fails += Counter(u.labels) != verts or corner_hist != edges
        checked += 1
    report(4, fails == 0, f"vertex and corner histograms on {checked} quadrangulations, {fails} mismatches")


def test_criterion_05_deg_invariants(report):
    steps = runs = 0
    for _, _, q in _quads():
        deg = build_deg(q, check=True)
        steps += deg.steps
        runs += 1
    for u in _sampled_klein(50, 1000)[:200]:
        steps += build_deg(unicellular_to_quad(u), check=True).steps
        runs += 1
    report(5, True, f"invariants held after all {steps} steps of {runs} explorations")


def test_criterion_06_reverse_invariants(report):
    steps = runs = 0
    for _, _, u in _wells():
        ac = build_area_complex(u, check=True)
        c = ac.type_counts()
        assert c[1] == c[3]
        steps += ac.steps
        runs += 1
    for u in _sampled_klein(50, 1000)[:200]:
        steps += build_area_complex(u, check=True).steps
        runs += 1
    report(6, True, f"area invariants and T1/T3 balance held over {steps} steps of {runs} runs")


def test_criterion_07_series_vs_enumeration(report):
    bad = []
    for name in ("N1", "S1"):
        s = surface(name)
        q = Q_series(s, 6)
        for n in range(1, 7):
            lab = count_table(s, n, bijective=False).counts["labeled"]
            if q[n] != 2 * lab:
                bad.append((name, n, q[n], 2 * lab))
    report(7, not bad, f"[t^n]Q = 2 x labeled for Klein bottle and torus, n <= 6; mismatches {bad}")


@pytest.mark.parametrize("name", ["N1", "N1.5"])
def test_criterion_08_asymptotics(report, name):
    s = surface(name)
    fit = asymptotic_fit(Q_series(s, 1000).coeffs, s.h)
    want = float(expected_exponent(s.h))
    ok = abs(fit.growth / 12 - 1) < 0.01 and abs(fit.exponent - want) <= 0.15
    report(8, ok, f"{name}: ratio {fit.growth:.4f}, exponent {fit.exponent:.4f} (target {want})")


def test_criterion_09_distance_bound(report):
    rng = make_rng(SEED, 9)
    violations = pairs = 0
    for u in _sampled_klein(100, 100):
        g = Geodesics(u)
        for _ in range(100):
            c1 = 1 + rand_below(rng, 2 * u.n)
            c2 = 1 + rand_below(rng, 2 * u.n)
            violations += not g.distance_bound_check(c1, c2)[2]
            pairs += 1
    report(9, violations == 0, f"{pairs} corner pairs on 100 Klein maps at n=100, {violations} violations")


def test_criterion_10_multipoint(report):
    fails = from_q = from_m = pointed = 0
    for _, _, q in _quads():
        for k in (1, 2):
            for s in admissible_sources(q, k):
                lab = ell_d(q, s)
                fails += any(
                    abs(lab[q.vertex_of[f]] - lab[q.vertex_of[q.tau0[f]]]) != 1 for f in range(q.size)
                )
                q2, s2 = lambda_multi(phi_multi(q, s))
                fails += s2.delays != s.delays or sources_key(q2, s2.corners) != sources_key(q, s.corners)
                from_q += 1
        for v0 in range(q.n_vertices):
            res = ab_forward(q, v0)
            ext = extremal_vertices(q, v0)
            m = res.map.embedded
            fails += m.n_faces != len(ext) or m.n_vertices != q.n_vertices - len(ext)
            lab = ab_labels(q, v0)
            kept = Counter(lab[v] for v in range(q.n_vertices) if v not in ext)
            fails += Counter(pointed_labels(res.map, res.pointed_flag)) != kept
            q3, v3, _ = ab_backward(res.map, res.pointed_flag)
            q1 = q.rerooted(res.sources.corners[0])
            mark1 = [int(x == v0) for x in range(q1.n_vertices)]
            mark3 = [int(x == v3) for x in range(q3.n_vertices)]
            fails += canonical_code(q3, mark3) != canonical_code(q1, mark1)
            pointed += 1
    for name in SMALL_SURFACES:
        for n in (1, 2, 3):
            for k in (1, 2):
                for mk in enumerate_k_rooted(n, k, surface(name)):
                    fails += phi_multi(*lambda_multi(mk)) != mk
                    from_m += 1
    detail = f"{from_q} sourced quadrangulations, {from_m} k-rooted maps, {pointed} pointed maps; {fails} failures"
    report(10, fails == 0, detail)


def test_criterion_11a_sampler_chi_square(report):
    classes = count_table(KLEIN, 4, bijective=False).counts["labeled"]
    rng = make_rng(SEED, 11)
    counts = Counter()
    draws = 10**5
    for _ in range(draws):
        u = sample_draw(KLEIN, 4, rng).to_unicellular().rerooted(rand_below(rng, 16))
        counts[(u.pairs, u.root_side, u.root_orient, u.labels)] += 1
    observed = list(counts.values()) + [0] * (classes - len(counts))
    p = sps.chisquare(observed).pvalue
    ok = len(counts) <= classes and p > 0.01
    report("11a", ok, f"{draws} draws over {len(counts)}/{classes} classes, chi-square p = {p:.4f}")


def test_criterion_11b_scaling(report):
    res = experiment_scaling(KLEIN, [2**10, 2**12, 2**14], 1000, seed=SEED)
    meds = {n: round(v["median"], 4) for n, v in res.summary.items()}
    spread = res.median_spread()
    report("11b", spread <= 0.10, f"medians {meds}, largest pairwise gap {spread:.2%}")


def test_criterion_12_counting_identity(report):
    bad = []
    for name in SMALL_SURFACES:
        s = surface(name)
        for n in (1, 2, 3):
            c = count_table(s, n).counts
            if 2 * c["labeled"] != c["quadrangulations"] * (n + 2 - int(2 * s.h)):
                bad.append((name, n))
    sphere2 = count_table(surface("S0"), 2).counts
    ok = not bad and sphere2["labeled"] == 18 and sphere2["quadrangulations"] * 4 == 36
    report(12, ok, f"2 x labeled = sum of (n+2-2h) on all small cases; sphere n=2: 36 = 2 x {sphere2['labeled']}")
