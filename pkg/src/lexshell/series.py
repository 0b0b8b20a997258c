"""Exact truncated power series, permutation groups and Molien series."""

from __future__ import annotations

import math
from collections import Counter, deque
from fractions import Fraction
from itertools import permutations
from typing import Iterable, Sequence

DEFAULT_DEGREE = 40
MAX_GROUP_ORDER = 10 ** 6
MAX_MONOMIALS = 5 * 10 ** 6


class SeriesError(ValueError):
    pass


class TruncatedSeries:
    """Power series in q with exact rational coefficients through q^D."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable, degree: int | None = None):
        cs = [Fraction(x) for x in coeffs]
        if degree is not None:
            cs = (cs + [Fraction(0)] * (degree + 1))[: degree + 1]
        if not cs:
            raise SeriesError("a series needs at least the constant term")
        self.coeffs = cs

    @classmethod
    def one(cls, degree: int) -> "TruncatedSeries":
        return cls([1], degree)

    @classmethod
    def monomial(cls, exponent: int, degree: int, coeff=1) -> "TruncatedSeries":
        cs = [0] * (degree + 1)
        if exponent <= degree:
            cs[exponent] = coeff
        return cls(cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, i: int) -> Fraction:
        return self.coeffs[i]

    def __len__(self) -> int:
        return len(self.coeffs)

    def _other(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            if other.degree != self.degree:
                raise SeriesError("degree bounds differ")
            return other
        return TruncatedSeries([other], self.degree)

    def __add__(self, other):
        o = self._other(other)
        return TruncatedSeries([a + b for a, b in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return TruncatedSeries([a - b for a, b in zip(self.coeffs, o.coeffs)])

    def __neg__(self):
        return TruncatedSeries([-a for a in self.coeffs])

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return TruncatedSeries([a * other for a in self.coeffs])
        o = self._other(other)
        D = self.degree
        out = [Fraction(0)] * (D + 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j in range(D + 1 - i):
                    out[i + j] += a * o.coeffs[j]
        return TruncatedSeries(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, TruncatedSeries):
            return TruncatedSeries([a / other for a in self.coeffs])
        o = self._other(other)
        if o.coeffs[0] == 0:
            raise SeriesError("divisor has zero constant term")
        inv0 = 1 / o.coeffs[0]
        out = []
        for i in range(self.degree + 1):
            acc = self.coeffs[i] - sum(out[j] * o.coeffs[i - j] for j in range(i))
            out.append(acc * inv0)
        return TruncatedSeries(out)

    def __eq__(self, other):
        if isinstance(other, TruncatedSeries):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __repr__(self):
        terms = [f"{c}q^{i}" for i, c in enumerate(self.coeffs) if c]
        return f"TruncatedSeries({' + '.join(terms) or '0'}; O(q^{self.degree + 1}))"

    def div_cyclotomic(self, r: int) -> "TruncatedSeries":
        """Divide by (1 - q^r)."""
        return series_div_cyclotomic(self, r)

    def mul_cyclotomic(self, r: int) -> "TruncatedSeries":
        """Multiply by (1 - q^r)."""
        cs = list(self.coeffs)
        for i in range(len(cs) - 1, r - 1, -1):
            cs[i] -= cs[i - r]
        return TruncatedSeries(cs)

    def integers(self) -> list:
        """Coefficients as ints; raises if any is not integral."""
        out = []
        for c in self.coeffs:
            if c.denominator != 1:
                raise SeriesError(f"non-integral coefficient {c}")
            out.append(int(c))
        return out


def series_div_cyclotomic(s: TruncatedSeries, r: int) -> TruncatedSeries:
    """t with t * (1 - q^r) = s through the degree bound."""
    if r < 1:
        raise SeriesError("cyclotomic factor needs r >= 1")
    cs = list(s.coeffs)
    for i in range(r, len(cs)):
        cs[i] += cs[i - r]
    return TruncatedSeries(cs)


def polynomial_series(coeffs: Sequence[int], degree: int) -> TruncatedSeries:
    return TruncatedSeries(list(coeffs), degree)


# ---------------------------------------------------------------------------
# permutation groups
# ---------------------------------------------------------------------------

def _compose(p: tuple, q: tuple) -> tuple:
    """(p o q)(i) = p[q[i]]."""
    return tuple(p[i] for i in q)


class PermGroup:
    """Permutation group on {0..N-1} given by generators (images as tuples)."""

    def __init__(self, degree: int, generators: Iterable[Sequence[int]], cap: int = MAX_GROUP_ORDER):
        self.degree = degree
        self.generators = [tuple(g) for g in generators]
        for g in self.generators:
            if sorted(g) != list(range(degree)):
                raise SeriesError(f"generator {g} is not a permutation of 0..{degree - 1}")
        self.cap = cap
        self._elements: list | None = None

    def elements(self) -> list:
        if self._elements is None:
            ident = tuple(range(self.degree))
            seen = {ident}
            queue = deque([ident])
            while queue:
                p = queue.popleft()
                for g in self.generators:
                    q = _compose(g, p)
                    if q not in seen:
                        seen.add(q)
                        if len(seen) > self.cap:
                            raise SeriesError(f"group order exceeds cap {self.cap}")
                        queue.append(q)
            self._elements = sorted(seen)
        return self._elements

    def order(self) -> int:
        return len(self.elements())


def cycle_type(p: Sequence[int]) -> tuple:
    seen = [False] * len(p)
    lengths = []
    for i in range(len(p)):
        if not seen[i]:
            n = 0
            j = i
            while not seen[j]:
                seen[j] = True
                j = p[j]
                n += 1
            lengths.append(n)
    return tuple(sorted(lengths))


def symmetric_group(n: int) -> PermGroup:
    gens = []
    if n >= 2:
        gens.append((1, 0) + tuple(range(2, n)))
        gens.append(tuple(range(1, n)) + (0,))
    return PermGroup(n, gens)


def trivial_group(n: int) -> PermGroup:
    return PermGroup(n, [])


def wreath_product_group(k: int, n: int) -> PermGroup:
    """S_k wr S_n permuting the entries of n rows of length k (row i = k*i .. k*i+k-1)."""
    N = k * n
    ident = list(range(N))
    gens = []
    if k >= 2:
        g = ident[:]
        g[0], g[1] = 1, 0
        gens.append(tuple(g))
        g = ident[:]
        g[:k] = list(range(1, k)) + [0]
        gens.append(tuple(g))
    if n >= 2:
        g = ident[:]
        for a in range(k):
            g[a], g[k + a] = k + a, a
        gens.append(tuple(g))
        gens.append(tuple((x + k) % N for x in range(N)))
    return PermGroup(N, gens)


def wreath_elements(k: int, n: int):
    """Every element of S_k wr S_n, generated directly (independent of closure)."""
    for rows in permutations(range(n)):
        for inner in _product_perms(k, n):
            yield tuple(k * rows[x // k] + inner[x // k][x % k] for x in range(k * n))


def _product_perms(k: int, n: int):
    if n == 0:
        yield ()
        return
    for head in permutations(range(k)):
        for tail in _product_perms(k, n - 1):
            yield (head,) + tail


# ---------------------------------------------------------------------------
# Molien series and its orbit-counting oracle
# ---------------------------------------------------------------------------

def molien(g: PermGroup, degree: int = DEFAULT_DEGREE) -> TruncatedSeries:
    """(1/|G|) sum over elements of prod over cycles 1/(1 - q^len)."""
    types = Counter(cycle_type(p) for p in g.elements())
    total = TruncatedSeries([0], degree)
    for ct, mult in sorted(types.items()):
        term = TruncatedSeries.one(degree)
        for length in ct:
            term = series_div_cyclotomic(term, length)
        total = total + term * mult
    return total / g.order()


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for a in range(total, -1, -1):
        for rest in _compositions(total - a, parts - 1):
            yield (a,) + rest


def monomial_orbit_count(g: PermGroup, degree: int, limit: int = MAX_MONOMIALS) -> int:
    """Orbits of degree-d monomials, found by flooding orbits with the generators."""
    N = g.degree
    if N == 0:
        return int(degree == 0)
    if math.comb(degree + N - 1, N - 1) > limit:
        raise SeriesError("too many monomials to enumerate")
    seen: set = set()
    orbits = 0
    for v in _compositions(degree, N):
        if v in seen:
            continue
        orbits += 1
        seen.add(v)
        stack = [v]
        while stack:
            w = stack.pop()
            for p in g.generators:
                u = [0] * N
                for i, e in enumerate(w):
                    u[p[i]] = e
                u = tuple(u)
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
    return orbits
