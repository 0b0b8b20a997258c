"""The quotient complex of the Boolean algebra B_kn by the wreath product S_k wr S_n.

A maximal chain of B_kn is a permutation word (the element added at each
rank).  Rows are the blocks {k(i-1)+1, ..., ki}; the group permutes entries
within rows and permutes rows.  Chain orbits are identified by the sorted
multiset of per-row occupancy histories.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .complex import (
    BalancedComplex,
    ComplexError,
    complex_from_codes,
    flag_f,
    sorted_colors,
    verify_partitioning,
)
from .series import DEFAULT_DEGREE, TruncatedSeries, series_div_cyclotomic

MAX_LETTERS = 12

HONEST_ASCENT = "honest-ascent"
HONEST_DESCENT = "honest-descent"
SWAP_ASCENT = "swap-ascent"


class WreathError(ComplexError):
    pass


def _row(k: int, x: int) -> int:
    return (x - 1) // k


def wreath_key(k: int, n: int, chain: Sequence, support: Sequence[int]) -> tuple:
    """Canonical key of a chain of subsets of {1..kn} with the given rank support."""
    support = tuple(support)
    if len(chain) != len(support):
        raise WreathError("chain length differs from its support size")
    N = k * n
    prev = set()
    for a, r in zip(chain, support):
        a = set(a)
        if len(a) != r or not prev <= a or (prev and prev == a) or not a <= set(range(1, N + 1)):
            raise WreathError(f"malformed chain element {sorted(a)} at rank {r}")
        prev = a
    hist = [[0] * len(chain) for _ in range(n)]
    for t, a in enumerate(chain):
        for x in a:
            hist[_row(k, x)][t] += 1
    return (support, tuple(sorted(tuple(h) for h in hist)))


def chain_of_word(word: Sequence[int], support: Sequence[int]) -> list:
    return [frozenset(word[:r]) for r in support]


def wreath_keyfn(k: int, n: int):
    def keyfn(word, support):
        return wreath_key(k, n, chain_of_word(word, support), support)
    return keyfn


def canonical_rep(k: int, word: Sequence[int]) -> tuple:
    """Lexicographically smallest word in the orbit of ``word``.

    Rows are renumbered by first appearance and entries within a row are
    renumbered in order of appearance.
    """
    rows: dict = {}
    used: dict = {}
    out = []
    for x in word:
        r = _row(k, x)
        if r not in rows:
            rows[r] = len(rows)
            used[r] = 0
        used[r] += 1
        out.append(k * rows[r] + used[r])
    return tuple(out)


def is_orbit_rep(k: int, word: Sequence[int]) -> bool:
    return tuple(word) == canonical_rep(k, word)


def facet_count(k: int, n: int) -> int:
    return math.factorial(k * n) // (math.factorial(k) ** n * math.factorial(n))


def enumerate_wreath_facets(k: int, n: int, cap: int = MAX_LETTERS) -> list:
    """Lex-minimal orbit representatives of the maximal chains, in lex order."""
    N = k * n
    if N > cap:
        raise WreathError(f"kn = {N} exceeds the cap {cap}")
    out: list = []
    word: list = []
    used = [0] * n

    def rec(opened: int):
        if len(word) == N:
            out.append(tuple(word))
            return
        for r in range(opened + (opened < n)):
            if used[r] < k:
                used[r] += 1
                word.append(k * r + used[r])
                rec(max(opened, r + 1))
                word.pop()
                used[r] -= 1

    rec(0)
    return out


def classify_positions(n: int, rep: Sequence[int]) -> tuple:
    """Ascent/descent class of each rank 1..2n-1 of a representative (k = 2).

    Honest descents are plain descents.  A swap ascent sits between 2i-1 and
    an immediately following 2i+1 when 2i+2 later comes before 2i.
    """
    rep = tuple(rep)
    if len(rep) != 2 * n or sorted(rep) != list(range(1, 2 * n + 1)) or not is_orbit_rep(2, rep):
        raise WreathError(f"{rep} is not an orbit representative for k=2, n={n}")
    pos = {x: t for t, x in enumerate(rep)}
    out = []
    for t in range(2 * n - 1):
        a, b = rep[t], rep[t + 1]
        if a > b:
            out.append(HONEST_DESCENT)
        elif a % 2 == 1 and b == a + 2 and a + 3 <= 2 * n and pos[a + 3] < pos[a + 1]:
            out.append(SWAP_ASCENT)
        else:
            out.append(HONEST_ASCENT)
    return tuple(out)


def classified_descents(classes: Sequence[str]) -> frozenset:
    return frozenset(r + 1 for r, c in enumerate(classes) if c != HONEST_ASCENT)


def _codes(k: int, n: int, facets: list) -> np.ndarray:
    """Integer encoding of wreath_key for every facet and support mask."""
    N = k * n
    d = N - 1
    base = N + 1
    positions = np.empty((len(facets), n, k), dtype=np.int64)
    for f, w in enumerate(facets):
        slots = [[] for _ in range(n)]
        for t, x in enumerate(w):
            slots[_row(k, x)].append(t + 1)
        positions[f] = slots
    wide = base ** N >= 2 ** 62
    dtype = object if wide else np.int64
    weights_in = np.array([base ** j for j in range(k)], dtype=dtype)
    row_base = base ** k
    weights_out = np.array([row_base ** i for i in range(n)], dtype=dtype)
    codes = np.empty((len(facets), 1 << d), dtype=dtype)
    for m in range(1 << d):
        ranks = [r for r in range(1, N) if m >> (r - 1) & 1]
        bucket = np.searchsorted(np.array(ranks, dtype=np.int64), np.arange(N + 1), side="left")
        b = bucket[positions].astype(dtype)
        rows = np.sort((b * weights_in).sum(axis=2), axis=1)
        codes[:, m] = (rows * weights_out).sum(axis=1)
    return codes


def wreath_complex(k: int, n: int, cap: int = MAX_LETTERS) -> BalancedComplex:
    facets = enumerate_wreath_facets(k, n, cap)
    d = k * n - 1
    return complex_from_codes(d, facets, _codes(k, n, facets), wreath_keyfn(k, n))


# ---------------------------------------------------------------------------
# Hilbert series of the face ring and Garsia-Stanton numerators
# ---------------------------------------------------------------------------

def face_ring_hilbert(c: BalancedComplex, degree: int = DEFAULT_DEGREE) -> TruncatedSeries:
    """Sum over supports T of f_T * prod over r in T of q^r / (1 - q^r).

    Vertices of color r carry degree equal to their rank label.
    """
    total = TruncatedSeries([0], degree)
    for t, count in sorted(flag_f(c).items(), key=lambda kv: sorted(kv[0])):
        if not count:
            continue
        ranks = [c.labels[x - 1] for x in t]
        term = TruncatedSeries.monomial(sum(ranks), degree, count)
        for r in ranks:
            term = series_div_cyclotomic(term, r)
        total = total + term
    return total


def gs_numerator(c: BalancedComplex, assignment: Sequence) -> list:
    """Coefficients of sum over facets of q^(sum of ranks in G_i)."""
    verdict = verify_partitioning(c, assignment)
    if not verdict.passed:
        raise WreathError(f"assignment is not a partitioning (cell of support {sorted(verdict.witness)})")
    degs = [sum(c.labels[x - 1] for x in g) for g in assignment]
    out = [0] * (max(degs) + 1 if degs else 1)
    for e in degs:
        out[e] += 1
    return out


def hilbert_numerator(c: BalancedComplex, degree: int = DEFAULT_DEGREE, factors: int | None = None) -> TruncatedSeries:
    """face_ring_hilbert times prod_{r=1..factors} (1 - q^r); factors defaults to d."""
    s = face_ring_hilbert(c, degree)
    for r in range(1, (c.d if factors is None else factors) + 1):
        s = s.mul_cyclotomic(r)
    return s


def exponent_witness(c: BalancedComplex, order: Sequence[int], group: Sequence[Sequence[int]]) -> list:
    """Minimal new faces of whichever member of ``group`` comes last in ``order``."""
    from .complex import minimal_new_faces

    index = {tuple(w): i for i, w in enumerate(c.facets)}
    members = {index[tuple(w)] for w in group}
    last = max(p for p, f in enumerate(order) if f in members)
    return minimal_new_faces(c, order, last)

