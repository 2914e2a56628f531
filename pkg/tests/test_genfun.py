import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import FROZEN, surface
from quadmaps.errors import InsufficientData, UnsupportedSurface
from quadmaps.genfun import (
    Q_series,
    Series,
    asymptotic_fit,
    bridges,
    enumerate_schemes,
    expected_exponent,
    mul_int,
    mul_nonneg,
    pp_count,
    rooted_counts,
    series_B,
    series_T,
    series_U,
    sphere_count,
)


def naive_mul(a, b, order):
    out = [0] * (order + 1)
    for i, x in enumerate(a[: order + 1]):
        for j, y in enumerate(b[: order + 1 - i]):
            out[i + j] += x * y
    return out


def motzkin_walks(n):
    """Nonnegative {-1, 0, +1} walks of length ``n`` from 0 to 0, by brute force."""
    count = 0
    for steps in itertools.product((-1, 0, 1), repeat=n):
        h = 0
        for s in steps:
            h += s
            if h < 0:
                break
        else:
            count += h == 0
    return count


ints = st.lists(st.integers(-(10**30), 10**30), min_size=1, max_size=25)


@given(ints, ints, st.integers(0, 30))
def test_signed_product_matches_schoolbook(a, b, order):
    assert mul_int(a, b, order) == naive_mul(a, b, order)


@given(
    st.lists(st.integers(0, 2**200), min_size=1, max_size=40),
    st.lists(st.integers(0, 2**200), min_size=1, max_size=40),
)
def test_packed_product_matches_schoolbook(a, b):
    order = len(a) + len(b)
    assert mul_nonneg(a, b, order) == naive_mul(a, b, order)


@given(st.lists(st.fractions(max_denominator=20), min_size=2, max_size=12))
def test_reciprocal_inverts(coeffs):
    if coeffs[0] == 0:
        coeffs[0] = Fraction(1)
    s = Series.of(coeffs)
    one = s * s.reciprocal()
    assert list(one.coeffs) == [1] + [0] * s.order


def test_reciprocal_of_zero_constant():
    with pytest.raises(ZeroDivisionError):
        Series.of([0, 1]).reciprocal()


@given(
    st.lists(st.integers(-5, 5), min_size=1, max_size=8),
    st.lists(st.integers(-5, 5), min_size=1, max_size=8),
)
def test_compose_matches_powers(outer, inner):
    inner = [0] + inner
    order = 8
    got = Series.of(outer, order).compose(Series.of(inner, order))
    want = [0] * (order + 1)
    power = [1] + [0] * order
    for c in outer:
        want = [w + c * p for w, p in zip(want, power)]
        power = naive_mul(power, inner, order)
    assert list(got.coeffs) == want


def test_tree_series_closed_form():
    t = series_T(20)
    assert [t[n] for n in range(21)] == [3**n * math.comb(2 * n, n) // (n + 1) for n in range(21)]


def test_u_solves_its_equation():
    order = 40
    u = series_U(order)
    z = series_T(order) ** 2
    z = z.shift(1)
    assert u == z * (u * u + u + 1)


@pytest.mark.parametrize("n", range(1, 11))
def test_u_in_z_counts_motzkin_walks(n):
    from quadmaps.genfun import _u_in_z

    assert _u_in_z(12)[n] == motzkin_walks(n - 1)


def test_b_series_definition():
    order = 15
    b = series_B(order)
    x = (series_U(order) * 2 + 1).shift(1)
    assert b - b * x == x


@pytest.mark.parametrize("k, value", list(enumerate(FROZEN["bridges"])))
def test_bridges(k, value):
    assert bridges(k) == value


@pytest.mark.parametrize("n, value", list(enumerate(FROZEN["sphere"], start=1)))
def test_sphere_count(n, value):
    assert sphere_count(n) == value


@pytest.mark.parametrize("n, value", list(enumerate(FROZEN["rooted_maps"]["N0.5"], start=1)))
def test_projective_plane_count(n, value):
    assert pp_count(n) == value


@pytest.mark.parametrize("name", ["S1", "N1", "N1.5"])
def test_scheme_series_matches_brute_force(name):
    q = Q_series(surface(name), 3)
    for n, lab in enumerate(FROZEN["labeled"][name], start=1):
        assert q[n] == 2 * lab


@pytest.mark.parametrize("name", ["S1", "N1", "N1.5", "N0.5", "S0"])
def test_rooted_counts_match_brute_force(name):
    counts = rooted_counts(surface(name), 3)
    assert counts[1:] == FROZEN["rooted_maps"][name]


@pytest.mark.parametrize("name", ["S1", "N1", "N1.5"])
def test_rooted_counts_are_integers(name):
    assert all(isinstance(c, int) and c >= 0 for c in rooted_counts(surface(name), 25))


@pytest.mark.parametrize("name", ["S1", "N1", "N1.5"])
def test_schemes_have_no_small_degrees(name):
    s = surface(name)
    schemes = list(enumerate_schemes(s))
    assert schemes
    for sc in schemes:
        assert min(sc.degrees()) >= 3
        assert sc.unicellular().surface == s
        assert sc.n_edges - sc.n_vertices + 1 == 2 * s.h


@pytest.mark.parametrize("name", ["S0", "N0.5", "S2", "N2"])
def test_unsupported_surface(name):
    with pytest.raises(UnsupportedSurface):
        Q_series(surface(name), 5)


def test_fit_needs_data():
    with pytest.raises(InsufficientData):
        asymptotic_fit([1] * 10)


@pytest.mark.parametrize("name", ["S1", "N1"])
def test_fit_exponent_at_moderate_order(name):
    s = surface(name)
    fit = asymptotic_fit(Q_series(s, 400).coeffs, s.h)
    assert abs(fit.growth - 12) < 0.12
    assert abs(fit.exponent - float(expected_exponent(s.h))) < 0.2
