import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import SMALL_SURFACES, surface
from quadmaps.enumeration import enumerate_labeled, enumerate_quadrangulations_by_flags
from quadmaps.errors import (
    InternalInvariantViolated,
    LabelTooSmall,
    NotQuadrangulation,
    NotWellLabeled,
)
from quadmaps.forward_bijection import (
    DegState,
    build_deg,
    classify_faces,
    label_statistics,
    quad_to_unicellular,
)
from quadmaps.reverse_bijection import (
    Geodesics,
    build_area_complex,
    check_well_labeled,
    unicellular_to_quad,
)
from quadmaps.surface_core import UnicellularMap, bfs_distances, canonical_code


def _well(name, n):
    return list(enumerate_labeled(n, surface(name), well=True))


@pytest.mark.parametrize("name", SMALL_SURFACES)
@pytest.mark.parametrize("n", [1, 2, 3])
def test_reverse_then_forward(name, n):
    for u in _well(name, n):
        q = unicellular_to_quad(u, check=True)
        assert q.is_quadrangulation() and q.n_faces == n
        assert quad_to_unicellular(q, check=True).code() == u.code()


@pytest.mark.parametrize("name", SMALL_SURFACES)
@pytest.mark.parametrize("n", [1, 2, 3])
def test_forward_then_reverse(name, n):
    for q in enumerate_quadrangulations_by_flags(n, surface(name)):
        u = quad_to_unicellular(q)
        assert u.surface == surface(name)
        assert canonical_code(unicellular_to_quad(u)) == canonical_code(q)


def test_single_face_sphere():
    u = UnicellularMap(1, ((1, 2, False),), labels=(1, 2))
    q = unicellular_to_quad(u)
    assert (q.n_vertices, q.n_edges, q.n_faces) == (3, 2, 1)
    assert sorted(bfs_distances(q, q.root_vertex)) == [0, 1, 2]


def test_labels_read_as_distances():
    for u in _well("N1", 3):
        q = unicellular_to_quad(u)
        dist = bfs_distances(q, q.root_vertex)
        hist, _ = label_statistics(q)
        assert sorted(hist.elements()) == sorted(u.labels)
        assert max(dist) == max(u.labels)


def test_not_well_labeled_rejected():
    u = UnicellularMap(1, ((1, 2, False),), labels=(1, 0))
    with pytest.raises(NotWellLabeled):
        unicellular_to_quad(u)
    with pytest.raises(NotWellLabeled):
        check_well_labeled(u)


def test_forward_rejects_non_quadrangulation():
    u = UnicellularMap(3, ((1, 6, False), (2, 5, False), (3, 4, False)))
    with pytest.raises(NotQuadrangulation):
        quad_to_unicellular(u.embedded)


def test_invariants_fire_on_corruption():
    q = unicellular_to_quad(_well("S0", 2)[0])
    deg = DegState(q, bfs_distances(q, q.root_vertex), [q.root]).run()
    deg.blue_out[0] = deg.blue_out[-1] if len(deg.blue_out) > 1 else -1
    with pytest.raises((InternalInvariantViolated, IndexError)):
        deg.check_invariants()


def test_deg_hook_sees_every_step():
    q = unicellular_to_quad(_well("N1", 3)[7])
    seen = []
    build_deg(q, check=True, on_step=lambda s: seen.append(s.steps))
    assert seen == list(range(1, len(seen) + 1)) and seen


def test_area_complex_type_counts_balance():
    for u in _well("N0.5", 3):
        ac = build_area_complex(u, check=True)
        counts = ac.type_counts()
        assert counts[1] == counts[3]


def test_face_classes():
    for u in _well("S1", 3):
        q = unicellular_to_quad(u)
        kinds = classify_faces(q, bfs_distances(q, q.root_vertex))
        assert {k for k, _ in kinds} <= {"simple", "growing"}


@given(st.integers(0, 83), st.data())
def test_geodesic_chain_descends(index, data):
    u = _WELL_N1[index]
    g = Geodesics(u)
    c = data.draw(st.integers(1, 2 * u.n))
    chain = g.simple_geodesic(c)
    labels = [g.corner_label[x - 1] for x in chain]
    assert labels == list(range(labels[0], 0, -1))[: len(labels)]
    if labels[0] == 1:
        with pytest.raises(LabelTooSmall):
            g.successor(c)


_WELL_N1 = _well("N1", 3)


@given(st.integers(0, 83), st.data())
def test_distance_bound_random_pairs(index, data):
    u = _WELL_N1[index]
    g = Geodesics(u)
    c1 = data.draw(st.integers(1, 2 * u.n))
    c2 = data.draw(st.integers(1, 2 * u.n))
    bound, actual, ok = g.distance_bound_check(c1, c2)
    assert ok and actual <= bound
