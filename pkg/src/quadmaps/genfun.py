"""Exact truncated power series and the scheme expansion of pointed-map counts.

Every labeled one-face map of type ``h >= 1`` reduces to a *scheme*, a
one-face map without vertices of degree 1 or 2, and the series of all maps
with a given normalised scheme is a rational function of the series ``U``.
Summing over the finitely many schemes gives ``Q(t)``, whose ``n``-th
coefficient counts rooted quadrangulations with ``n`` faces and a marked
vertex.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import gmpy2

from .errors import InsufficientData, InternalInvariantViolated, UnsupportedSurface
from .surface_core import SurfaceType

# --- dense series ---------------------------------------------------------


def _pack(coeffs, width):
    nbytes = width // 8
    return int.from_bytes(b"".join(int(c).to_bytes(nbytes, "little") for c in coeffs), "little")


def _unpack(x, width, count):
    nbytes = width // 8
    x = int(x)
    raw = x.to_bytes(max(1, (x.bit_length() + 7) // 8), "little")[: nbytes * count]
    return [int.from_bytes(raw[i * nbytes : (i + 1) * nbytes], "little") for i in range(count)]


def mul_nonneg(a, b, order):
    """Product of two nonnegative integer coefficient lists, truncated at ``order``.

    Uses Kronecker substitution: both lists are packed into one big integer
    with slots wide enough that no carry crosses a slot.
    """
    a = a[: order + 1]
    b = b[: order + 1]
    if not a or not b:
        return [0] * (order + 1)
    bound = max(a).bit_length() + max(b).bit_length() + min(len(a), len(b)).bit_length() + 1
    width = (bound + 7) // 8 * 8
    prod = gmpy2.mpz(_pack(a, width)) * gmpy2.mpz(_pack(b, width))
    out = _unpack(prod, width, min(order + 1, len(a) + len(b) - 1))
    return out + [0] * (order + 1 - len(out))


def mul_int(a, b, order):
    """Signed integer product via four nonnegative products."""
    ap = [max(x, 0) for x in a]
    an = [max(-x, 0) for x in a]
    bp = [max(x, 0) for x in b]
    bn = [max(-x, 0) for x in b]
    terms = []
    for x, y, sign in ((ap, bp, 1), (an, bn, 1), (ap, bn, -1), (an, bp, -1)):
        if any(x) and any(y):
            terms.append((sign, mul_nonneg(x, y, order)))
    out = [0] * (order + 1)
    for sign, t in terms:
        for i, v in enumerate(t):
            out[i] += sign * v
    return out


@dataclass(frozen=True)
class Series:
    """Truncated series ``c_0 + c_1 t + ... + c_N t^N`` with exact coefficients."""

    coeffs: tuple

    @classmethod
    def of(cls, coeffs, order=None):
        c = list(coeffs)
        if order is not None:
            c = (c + [0] * (order + 1))[: order + 1]
        return cls(tuple(c))

    @property
    def order(self):
        return len(self.coeffs) - 1

    def __getitem__(self, n):
        return self.coeffs[n] if 0 <= n < len(self.coeffs) else 0

    def _is_int(self):
        return all(isinstance(c, int) for c in self.coeffs)

    def _align(self, other):
        if not isinstance(other, Series):
            other = Series.of([other], self.order)
        n = min(self.order, other.order)
        return self.coeffs[: n + 1], other.coeffs[: n + 1], n

    def __add__(self, other):
        a, b, _ = self._align(other)
        return Series(tuple(x + y for x, y in zip(a, b)))

    __radd__ = __add__

    def __sub__(self, other):
        a, b, _ = self._align(other)
        return Series(tuple(x - y for x, y in zip(a, b)))

    def __neg__(self):
        return Series(tuple(-x for x in self.coeffs))

    def __mul__(self, other):
        if not isinstance(other, Series):
            return Series(tuple(other * x for x in self.coeffs))
        a, b, n = self._align(other)
        da = _common_denominator(a)
        db = _common_denominator(b)
        ia = [int(x * da) for x in a]
        ib = [int(x * db) for x in b]
        prod = mul_int(ia, ib, n)
        if da == 1 and db == 1:
            return Series(tuple(prod))
        d = da * db
        return Series(tuple(_normal(Fraction(x, d)) for x in prod))

    __rmul__ = __mul__

    def __pow__(self, k):
        out = Series.of([1], self.order)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def shift(self, k):
        """Multiply by ``t^k`` (keeping the order)."""
        return Series(tuple([0] * k + list(self.coeffs[: len(self.coeffs) - k])))

    def t_derivative(self):
        """Apply ``t d/dt``."""
        return Series(tuple(n * c for n, c in enumerate(self.coeffs)))

    def reciprocal(self):
        """``1 / self`` for a series with nonzero constant term."""
        c0 = self.coeffs[0]
        if c0 == 0:
            raise ZeroDivisionError("constant term is zero")
        out = [Fraction(1) / c0 if not isinstance(c0, int) or abs(c0) != 1 else c0]
        for n in range(1, len(self.coeffs)):
            s = sum(self.coeffs[k] * out[n - k] for k in range(1, n + 1))
            out.append(_normal(-s / c0) if not isinstance(c0, int) or abs(c0) != 1 else -s * c0)
        return Series(tuple(out))

    def compose(self, inner):
        """``self(inner(t))`` for ``inner`` with zero constant term."""
        if inner[0] != 0:
            raise ValueError("inner series must have zero constant term")
        n = min(self.order, inner.order)
        r = [self[k] for k in range(n + 1)]
        if all(isinstance(c, int) and c >= 0 for c in r) and all(
            isinstance(c, int) and c >= 0 for c in inner.coeffs
        ):
            return Series(tuple(compose_nonneg(r, list(inner.coeffs[: n + 1]), n)))
        acc = Series.of([r[n]], n)
        for k in range(n - 1, -1, -1):
            acc = acc * inner + r[k]
        return acc

    def is_integral(self):
        return all(Fraction(c).denominator == 1 for c in self.coeffs)

    def as_ints(self):
        if not self.is_integral():
            raise ValueError("series has non-integer coefficients")
        return [int(c) for c in self.coeffs]


def _common_denominator(cs):
    d = 1
    for c in cs:
        if isinstance(c, Fraction):
            d = d * c.denominator // math.gcd(d, c.denominator)
    return d


def _normal(x):
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x.numerator)
    return x


def compose_nonneg(r, inner, order):
    """``sum_k r_k inner^k`` truncated at ``order`` (all entries nonnegative ints).

    Horner's rule from the top; since ``inner`` has valuation at least 1 the
    partial sum at depth ``k`` is only needed to order ``order - k``.
    """
    acc = [r[order]]
    for k in range(order - 1, -1, -1):
        need = order - k
        prod = mul_nonneg(acc, inner, need) if any(acc) else [0] * (need + 1)
        prod[0] += r[k]
        acc = prod
    return acc + [0] * (order + 1 - len(acc))


# --- T, U, B ----------------------------------------------------------------


@lru_cache(maxsize=8)
def _t_coeffs(order):
    # T = 1 + 3 t T^2, solved one coefficient at a time
    t = [1]
    for n in range(1, order + 1):
        t.append(3 * sum(t[i] * t[n - 1 - i] for i in range(n)))
    return tuple(t)


def series_T(order):
    return Series(_t_coeffs(order))


@lru_cache(maxsize=8)
def _u_coeffs(order):
    # U = A (1 + U + U^2) with A = t T^2
    t = _t_coeffs(order)
    a = [0] + mul_nonneg(list(t), list(t), order)[:order]
    u = [0] * (order + 1)
    u2 = [0] * (order + 1)
    for n in range(1, order + 1):
        u2[n - 1] = sum(u[i] * u[n - 1 - i] for i in range(1, n - 1))
        v = a[n]
        for i in range(1, n):
            v += a[i] * (u[n - i] + u2[n - i])
        u[n] = v
    return tuple(u)


def series_U(order):
    return Series(_u_coeffs(order))


def series_B(order):
    """``t (1 + 2U) / (1 - t (1 + 2U))``."""
    u = series_U(order)
    x = (u * 2 + 1).shift(1)
    return x * (Series.of([1], order) - x).reciprocal()


@lru_cache(maxsize=8)
def _u_in_z(order):
    # U as a series in z = t T^2:  U = z (1 + U + U^2)
    u = [0] * (order + 1)
    for n in range(1, order + 1):
        sq = sum(u[i] * u[n - 1 - i] for i in range(1, n - 1))
        u[n] = (1 if n == 1 else 0) + u[n - 1] + sq
    return tuple(u)


# --- schemes ----------------------------------------------------------------


@dataclass(frozen=True)
class Scheme:
    """A rooted one-face map with every vertex of degree at least 3."""

    n_edges: int
    pairs: tuple  # 0-based (a, b, twisted)
    n_vertices: int
    edges: tuple  # (vertex, vertex) per pair

    def degrees(self):
        deg = Counter()
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return [deg[v] for v in range(self.n_vertices)]

    def unicellular(self):
        from .surface_core import UnicellularMap

        return UnicellularMap(self.n_edges, tuple((a + 1, b + 1, t) for a, b, t in self.pairs))


MAX_SCHEME_H = Fraction(3, 2)  # type 2 would mean about 17!! * 2**9 gluings


def _check_h(surface):
    if surface.h < 1:
        raise UnsupportedSurface(
            f"{surface.name}: the scheme expansion needs type >= 1; use pp_count for the projective plane"
        )


@lru_cache(maxsize=None)
def enumerate_schemes(surface):
    """All rooted schemes of the given type, by brute force over gluings."""
    from .enumeration import corner_vertices, matchings

    _check_h(surface)
    if surface.h > MAX_SCHEME_H:
        raise UnsupportedSurface(
            f"{surface.name}: the scheme census searches all gluings and stops at type {MAX_SCHEME_H}"
        )
    h2 = int(2 * surface.h)
    out = []
    for e in range(1, 3 * h2 - 3 + 1):
        nv = e + 1 - h2
        if nv < 1 or 2 * e < 3 * nv:
            continue
        size = 2 * e
        bit_sets = (
            [(False,) * e] if surface.orientable else list(itertools.product((False, True), repeat=e))
        )
        for m in matchings(size):
            for bits in bit_sets:
                if not surface.orientable and not any(bits):
                    continue
                pairs = tuple((a, b, t) for (a, b), t in zip(m, bits))
                cv, got = corner_vertices(size, pairs)
                if got != nv:
                    continue
                deg = Counter(cv)
                if min(deg.values()) < 3:
                    continue
                edges = tuple((cv[a], cv[(a + 1) % size]) for a, _, _ in pairs)
                out.append(Scheme(e, pairs, nv, edges))
    return tuple(out)


def surjections(nv, k):
    for f in itertools.product(range(1, k + 1), repeat=nv):
        if len(set(f)) == k:
            yield f


def scheme_statistics(scheme, lstar):
    """``(e_equal, e_different, d)`` with ``d[j-2]`` for ``j = 2..K``."""
    k = max(lstar)
    e_eq = e_ne = 0
    d = [0] * (k - 1)
    for a, b in scheme.edges:
        la, lb = sorted((lstar[a], lstar[b]))
        if la == lb:
            e_eq += 1
        else:
            e_ne += 1
            for j in range(la + 1, lb + 1):
                d[j - 2] += 1
    return e_eq, e_ne, tuple(d)


@lru_cache(maxsize=None)
def scheme_terms(surface):
    """Multiset of ``(|E|, e_equal, e_different, sorted d)`` over normalised schemes."""
    terms = Counter()
    for s in enumerate_schemes(surface):
        for k in range(1, s.n_vertices + 1):
            for f in surjections(s.n_vertices, k):
                e_eq, e_ne, d = scheme_statistics(s, f)
                terms[(s.n_edges, e_eq, e_ne, tuple(sorted(d)))] += 1
    return terms


def _key_rational(e_eq, e_ne, d):
    """Numerator polynomial in ``U`` and the multiset of ``1 - U^s`` factors below it."""
    num = [0] * (e_eq + sum(d)) + [1]
    for _ in range(e_eq):
        num = _poly_mul(num, [1, 2])
    for _ in range(e_ne):
        num = _poly_mul(num, [1, 1, 1])
    return num, Counter(d)


def _poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _poly_add(a, b):
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, y in enumerate(b):
        out[i] += y
    return out


def _one_minus_power(step, mult):
    p = [1]
    f = [1] + [0] * (step - 1) + [-1]
    for _ in range(mult):
        p = _poly_mul(p, f)
    return p


def rational_in_u(e, e_eq, e_ne, d, order):
    """Coefficients in ``U`` of ``U^a (1+2U)^a (1+U+U^2)^b / (1-U^2)^e * prod U^d/(1-U^d)``."""
    num, den = _key_rational(e_eq, e_ne, d)
    den[2] += e
    c = (num + [0] * (order + 1))[: order + 1]
    for step, mult in den.items():
        for _ in range(mult):
            for i in range(step, len(c)):
                c[i] += c[i - step]
    return c


@lru_cache(maxsize=4)
def _u_powers(order, top):
    u = list(_u_coeffs(order))
    powers = [[1] + [0] * order]
    for _ in range(top):
        powers.append(mul_nonneg(powers[-1], u, order))
    return powers


def reciprocal_int(d, order):
    """``1/d`` for an integer series with ``d[0] == 1`` (Newton iteration)."""
    if d[0] != 1:
        raise ValueError("constant term must be 1")
    y = [1]
    prec = 1
    while prec <= order:
        prec = min(2 * prec, order + 1)
        dy = mul_int(d[:prec], y, prec - 1)
        corr = [-x for x in dy]
        corr[0] += 2
        y = mul_int(y, corr, prec - 1)
    return (y + [0] * (order + 1))[: order + 1]


def eval_rational_at_u(num, den, order):
    """``num(U(t)) / den(U(t))`` for integer polynomials with ``den[0] == 1``."""
    top = max(len(num), len(den)) - 1
    powers = _u_powers(order, top)

    def at_u(poly):
        out = [0] * (order + 1)
        for k, c in enumerate(poly):
            if c:
                for i, v in enumerate(powers[k]):
                    if v:
                        out[i] += c * v
        return out

    return mul_int(at_u(num), reciprocal_int(at_u(den), order), order)


def scheme_gf(scheme, lstar, order):
    """Series of labeled one-face maps whose normalised scheme is ``(scheme, lstar)``."""
    e_eq, e_ne, d = scheme_statistics(scheme, lstar)
    num, den = _key_rational(e_eq, e_ne, d)
    den[2] += scheme.n_edges
    den_poly = [1]
    for step, mult in den.items():
        den_poly = _poly_mul(den_poly, _one_minus_power(step, mult))
    g = Series(tuple(eval_rational_at_u(num, den_poly, order)))
    return g.t_derivative() * Fraction(1, scheme.n_edges)


def Q_series(surface, order):
    """``sum_n (n + 2 - 2h) q(n) t^n`` assembled from all normalised schemes."""
    _check_h(surface)
    terms = scheme_terms(surface)
    lcm = 1
    for e, *_ in terms:
        lcm = lcm * e // math.gcd(lcm, e)
    dens = {}
    for (e, e_eq, e_ne, d), mult in terms.items():
        _, den = _key_rational(e_eq, e_ne, d)
        den[2] += e
        dens[(e, e_eq, e_ne, d)] = den
    common = Counter()
    for den in dens.values():
        for step, m in den.items():
            common[step] = max(common[step], m)
    total = [0]
    for key, mult in sorted(terms.items()):
        e, e_eq, e_ne, d = key
        num, _ = _key_rational(e_eq, e_ne, d)
        for step, m in common.items():
            num = _poly_mul(num, _one_minus_power(step, m - dens[key][step]))
        total = _poly_add(total, [mult * (lcm // e) * x for x in num])
    den_poly = [1]
    for step, m in sorted(common.items()):
        den_poly = _poly_mul(den_poly, _one_minus_power(step, m))
    g = eval_rational_at_u(total, den_poly, order)
    out = []
    for n, c in enumerate(g):
        num = 2 * n * c
        if num % lcm:
            raise InternalInvariantViolated(f"coefficient {n} of Q is not an integer")
        out.append(num // lcm)
    return Series(tuple(out))


def rooted_counts(surface, order):
    """``q(n)`` for ``n = 0..order`` (rooted maps with ``n`` edges)."""
    if surface.h == 0:
        return [1] + [sphere_count(n) for n in range(1, order + 1)]
    if surface.h == Fraction(1, 2) and not surface.orientable:
        return [0] + [pp_count(n) for n in range(1, order + 1)]
    q = Q_series(surface, order)
    h2 = int(2 * surface.h)
    out = []
    for n in range(order + 1):
        w = n + 2 - h2
        if w <= 0:
            out.append(0)
            continue
        if q[n] % w:
            raise InternalInvariantViolated(f"[t^{n}]Q is not divisible by {w}")
        out.append(q[n] // w)
    return out


def sphere_count(n):
    return 2 * 3**n * math.factorial(2 * n) // (math.factorial(n + 2) * math.factorial(n))


# --- projective plane ------------------------------------------------------


def bridges(k):
    """Walks of ``k`` steps in {-1, 0, +1} from 0 back to 0."""
    total = 0
    for b in range(k // 2 + 1):
        a = k - 2 * b
        total += math.factorial(k) // (math.factorial(a) * math.factorial(b) ** 2)
    return total


def pp_count(n):
    """Rooted maps with ``n`` edges on the projective plane (exact)."""
    total = Fraction(0)
    for k in range(1, n + 1):
        total += Fraction(4 * bridges(k), n + k) * math.comb(2 * n - 1, n - k) * 3 ** (n - k)
    total *= Fraction(n, n + 1)
    if total.denominator != 1:
        raise InternalInvariantViolated(f"projective-plane count for n={n} is not an integer")
    return int(total)


# --- asymptotics ----------------------------------------------------------


@dataclass(frozen=True)
class AsymptoticFit:
    growth: float
    exponent: float
    constant: float
    window: tuple


def asymptotic_fit(coeffs, h=None, start=None, corrections=4):
    """Estimate ``a_n ~ C n^beta 12^n`` from a coefficient list.

    ``growth`` is the last ratio ``a_N / a_{N-1}``.  ``beta`` comes from a
    least-squares fit of ``log(a_n 12^-n)`` on ``1, log n`` and the
    corrections ``n^(-j/4)``, ``j = 1..corrections``, that the quartic-root
    singularity of ``U`` produces.
    """
    import numpy as np

    a = [int(c) for c in coeffs]
    big_n = len(a) - 1
    if big_n < 50 or a[-1] <= 0 or a[-2] <= 0:
        raise InsufficientData("need at least 50 positive coefficients")
    growth = float(Fraction(a[-1], a[-2]))
    lo = start if start is not None else big_n // 4
    ns = np.arange(lo, big_n + 1, dtype=float)
    y = np.array([_log_int(a[int(n)]) - n * math.log(12) for n in ns])
    cols = [np.ones_like(ns), np.log(ns)] + [ns ** (-j / 4) for j in range(1, corrections + 1)]
    x = np.stack(cols, axis=1)
    coef, *_ = np.linalg.lstsq(x, y, rcond=None)
    return AsymptoticFit(growth, float(coef[1]), float(math.exp(coef[0])), (lo, big_n))


def _log_int(x):
    b = x.bit_length()
    if b < 1000:
        return math.log(x)
    s = b - 900
    return math.log(x >> s) + s * math.log(2)


def expected_exponent(h):
    """Exponent of ``n`` in the pointed count: one more than for rooted maps."""
    return 5 * (Fraction(h) - 1) / 2 + 1


def p_h_constant(surface):
    """``(inner sum, p_h)`` for the leading constant of rooted-map counts.

    The inner sum runs over cubic schemes with all labels distinct of
    ``prod_j 1/d(j)``.
    """
    from math import gamma

    _check_h(surface)
    if surface.orientable:
        raise UnsupportedSurface("the constant formula is stated for non-orientable surfaces")
    h = Fraction(surface.h)
    k = int(4 * h - 2)
    inner = Fraction(0)
    for s in enumerate_schemes(surface):
        if s.n_vertices != k:
            continue
        for f in itertools.permutations(range(1, k + 1)):
            _, _, d = scheme_statistics(s, f)
            term = Fraction(1)
            for x in d:
                term /= x
            inner += term
    hf = float(h)
    p = 3**hf / ((6 * hf - 3) * 2 ** (11 * hf - 7) * gamma((5 * hf - 3) / 2)) * float(inner)
    return inner, p
