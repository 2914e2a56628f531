from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import gluings
from quadmaps.errors import IndexOutOfRange, InputError, MatchingInvalid, NotBipartite
from quadmaps.surface_core import (
    SPHERE,
    EmbeddedMap,
    SurfaceType,
    UnicellularMap,
    bfs_distances,
    canonical_code,
    euler_type,
    from_embedded,
    is_orientable,
    orbits,
    read_polygons,
    tutte_map,
    tutte_quadrangulation,
    two_colouring,
)


@pytest.mark.parametrize(
    "name, h, orientable",
    [("S0", 0, True), ("S2", 2, True), ("N0.5", Fraction(1, 2), False), ("N1", 1, False), ("N1.5", Fraction(3, 2), False)],
)
def test_surface_names_round_trip(name, h, orientable):
    s = SurfaceType.parse(name)
    assert (s.h, s.orientable) == (Fraction(h), orientable)
    assert SurfaceType.parse(s.name) == s
    assert s.euler_characteristic == 2 - 2 * s.h


@pytest.mark.parametrize("bad", ["X1", "S0.5", "N0", "N-1", "", "S"])
def test_bad_surface_names(bad):
    with pytest.raises(InputError):
        SurfaceType.parse(bad)


def test_orbits_partition():
    ids, count = orbits(6, [1, 0, 3, 2, 5, 4])
    assert count == 3 and ids[0] == ids[1] != ids[2]


def test_single_edge_maps():
    plane = UnicellularMap(1, ((1, 2, False),))
    loop = UnicellularMap(1, ((1, 2, True),))
    assert plane.surface == SPHERE and plane.n_vertices == 2
    assert loop.surface == SurfaceType(Fraction(1, 2), False) and loop.n_vertices == 1


@pytest.mark.parametrize(
    "pairs, err",
    [
        (((1, 2, False), (2, 3, False)), MatchingInvalid),
        (((1, 5, False), (2, 3, False)), IndexOutOfRange),
        (((1, 2, False),), MatchingInvalid),
    ],
)
def test_unicellular_validation(pairs, err):
    with pytest.raises(err):
        UnicellularMap(2, pairs)


def test_labels_must_be_lipschitz():
    with pytest.raises(InputError):
        UnicellularMap(1, ((1, 2, False),), labels=(1, 3))
    with pytest.raises(InputError):
        UnicellularMap(1, ((1, 2, False),), labels=(2, 1))


@given(gluings())
def test_one_face_euler_relation(u):
    m = u.embedded
    assert m.n_faces == 1
    assert m.n_vertices - m.n_edges + 1 == u.surface.euler_characteristic
    assert euler_type(m) == u.surface
    assert is_orientable(m) == (not any(t for *_, t in u.pairs))


@given(gluings(), st.data())
def test_rerooting_preserves_code_class(u, data):
    flag = data.draw(st.integers(0, 4 * u.n - 1))
    v = u.rerooted(flag)
    assert v.surface == u.surface
    assert sorted(canonical_code(v.embedded.rerooted(f)) for f in range(4 * u.n)) == sorted(
        canonical_code(u.embedded.rerooted(f)) for f in range(4 * u.n)
    )


@given(gluings())
def test_normalised_reads_back(u):
    w = u.normalised()
    assert (w.root_side, w.root_orient) == (1, 1)
    assert w.code() == u.code()
    assert from_embedded(w.embedded) == w


@given(gluings(max_n=4))
def test_tutte_quadrangulation_inverts(u):
    m = u.embedded
    q = tutte_quadrangulation(m)
    assert q.is_quadrangulation() and q.n_faces == u.n
    two_colouring(q)
    assert canonical_code(tutte_map(q)) == canonical_code(m)


def test_read_polygons_one_face():
    u = UnicellularMap(2, ((1, 3, True), (2, 4, False)))
    sizes, mate, twisted, _ = read_polygons(u.embedded, [u.embedded.root])
    assert sizes == [4] and sorted(mate) == [0, 1, 2, 3]


def test_odd_cycle_not_bipartite():
    # a single loop: the vertex is adjacent to itself
    u = UnicellularMap(1, ((1, 2, True),))
    with pytest.raises(NotBipartite):
        two_colouring(u.embedded)


def test_bfs_distances_path():
    u = UnicellularMap(2, ((1, 4, False), (2, 3, False)))
    m = u.embedded
    assert sorted(bfs_distances(m, m.root_vertex)) == [0, 1, 2]


def test_embedded_map_rejects_non_involution():
    with pytest.raises(InputError):
        EmbeddedMap((1, 0, 3, 2), (0, 2, 1, 3), (2, 3, 0, 1), 0)
