"""Pure balanced boolean cell complexes given by facets and a face-key function.

A cell is identified by a pair ``(facet, support)``; two such pairs denote the
same cell exactly when the key function agrees on them.  Everything else
(flag vectors, intersections with earlier facets, links, homology) is derived
from a memoized table of integer cell ids of shape ``(facets, 2**d)``.

Supports are bit masks over the colors ``1..d`` internally (bit ``r-1`` set for
color ``r``); the public functions accept and return ``frozenset`` of colors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Sequence

import numpy as np

MAX_COLORS = 16

KeyFn = Callable[[Any, tuple], Hashable]


class ComplexError(ValueError):
    pass


class DuplicateFacetError(ComplexError):
    def __init__(self, first: int, second: int):
        super().__init__(f"facets {first} and {second} have the same full-support key")
        self.pair = (first, second)


class CellNotFoundError(ComplexError):
    pass


class BudgetExceeded(RuntimeError):
    def __init__(self, nodes: int):
        super().__init__(f"search budget of {nodes} nodes exhausted")
        self.nodes = nodes


# ---------------------------------------------------------------------------
# support helpers
# ---------------------------------------------------------------------------

def to_mask(colors: Iterable[int]) -> int:
    m = 0
    for c in colors:
        m |= 1 << (c - 1)
    return m


def to_colors(mask: int) -> frozenset:
    out = []
    r = 1
    while mask:
        if mask & 1:
            out.append(r)
        mask >>= 1
        r += 1
    return frozenset(out)


def sorted_colors(mask: int) -> tuple:
    return tuple(sorted(to_colors(mask)))


def _as_mask(support) -> int:
    if isinstance(support, (int, np.integer)):
        return int(support)
    return to_mask(support)


def _popcounts(d: int) -> np.ndarray:
    return np.array([bin(m).count("1") for m in range(1 << d)], dtype=np.int64)


# ---------------------------------------------------------------------------
# the complex
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class BalancedComplex:
    """Facets plus a table of cell ids, one row per facet, one column per support.

    ``labels`` names the colors 1..d (e.g. the original ranks of a link).
    """

    d: int
    facets: list
    table: np.ndarray
    keyfn: KeyFn | None = None
    labels: tuple = ()
    ncells: int = field(init=False)
    cell_support: np.ndarray = field(init=False, repr=False)
    cell_facet: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if not self.labels:
            self.labels = tuple(range(1, self.d + 1))
        nf = len(self.facets)
        self.ncells = int(self.table.max()) + 1 if nf else 0
        self.cell_support = np.zeros(self.ncells, dtype=np.int64)
        self.cell_facet = np.full(self.ncells, -1, dtype=np.int64)
        # first facet (in index order) containing each cell
        for m in range(1 << self.d):
            col = self.table[:, m]
            self.cell_support[col] = m
            ids, first = np.unique(col, return_index=True)
            self.cell_facet[ids] = first

    @property
    def full(self) -> int:
        return (1 << self.d) - 1

    def __len__(self) -> int:
        return len(self.facets)

    def cell(self, facet: int, support) -> int:
        return int(self.table[facet, _as_mask(support)])

    def cells_of_support(self, support) -> np.ndarray:
        return np.unique(self.table[:, _as_mask(support)])

    def key(self, facet: int, support) -> Hashable:
        if self.keyfn is None:
            return self.cell(facet, support)
        return self.keyfn(self.facets[facet], sorted_colors(_as_mask(support)))


def _intern(d: int, columns: Sequence[Sequence[Hashable]], nf: int) -> np.ndarray:
    table = np.empty((nf, 1 << d), dtype=np.int64)
    next_id = 0
    for m in range(1 << d):
        seen: dict = {}
        col = columns[m]
        for i in range(nf):
            k = col[i]
            cid = seen.get(k)
            if cid is None:
                cid = seen[k] = next_id
                next_id += 1
            table[i, m] = cid
    return table


def _check_distinct(table: np.ndarray, d: int) -> None:
    top = table[:, (1 << d) - 1]
    first: dict = {}
    for i, cid in enumerate(top.tolist()):
        if cid in first:
            raise DuplicateFacetError(first[cid], i)
        first[cid] = i


def build_complex(d: int, facets: Sequence, keyfn: KeyFn, labels: tuple = ()) -> BalancedComplex:
    """Memoize ``keyfn(facet, support)`` for every facet and every support.

    ``keyfn`` receives the support as a sorted tuple of colors.
    """
    if not 0 <= d <= MAX_COLORS:
        raise ComplexError(f"color count {d} outside 0..{MAX_COLORS}")
    facets = list(facets)
    supports = [sorted_colors(m) for m in range(1 << d)]
    columns = [[keyfn(f, s) for f in facets] for s in supports]
    table = _intern(d, columns, len(facets))
    _check_distinct(table, d)
    return BalancedComplex(d, facets, table, keyfn, labels)


def complex_from_codes(d: int, facets: Sequence, codes: np.ndarray, keyfn: KeyFn | None = None,
                       labels: tuple = ()) -> BalancedComplex:
    """Fast path: ``codes[i, mask]`` is already a canonical key (any integer)."""
    codes = np.asarray(codes)
    nf = len(facets)
    table = np.empty((nf, 1 << d), dtype=np.int64)
    offset = 0
    for m in range(1 << d):
        _, inv = np.unique(codes[:, m], return_inverse=True)
        inv = inv.reshape(-1)
        table[:, m] = inv + offset
        offset += int(inv.max()) + 1 if nf else 0
    _check_distinct(table, d)
    return BalancedComplex(d, list(facets), table, keyfn, labels)


def _reindex(d: int, facets: list, sub: np.ndarray, keyfn, labels) -> BalancedComplex:
    """Build a complex from a sub-table whose entries are parent cell ids."""
    return complex_from_codes(d, facets, sub, keyfn, labels)


# ---------------------------------------------------------------------------
# flag vectors
# ---------------------------------------------------------------------------

def flag_f(c: BalancedComplex) -> dict:
    """Number of cells of each support; the empty support counts 1."""
    out = {}
    for m in range(1 << c.d):
        out[to_colors(m)] = int(len(np.unique(c.table[:, m]))) if len(c) else int(m == 0)
    return out


def _flag_f_array(c: BalancedComplex) -> list:
    if not len(c):
        return [1] + [0] * ((1 << c.d) - 1)
    return [int(len(np.unique(c.table[:, m]))) for m in range(1 << c.d)]


def flag_h(c: BalancedComplex) -> dict:
    """h_S = sum over T in S of (-1)^|S-T| f_T."""
    h = _flag_f_array(c)
    for r in range(c.d):
        bit = 1 << r
        for m in range(1 << c.d):
            if m & bit:
                h[m] -= h[m ^ bit]
    return {to_colors(m): h[m] for m in range(1 << c.d)}


def f_vector(c: BalancedComplex) -> tuple:
    """Cell counts by dimension 0..d-1 (the empty cell omitted)."""
    pc = _popcounts(c.d)
    f = _flag_f_array(c)
    return tuple(sum(f[m] for m in range(1 << c.d) if pc[m] == i + 1) for i in range(c.d))


# ---------------------------------------------------------------------------
# intersections with earlier facets
# ---------------------------------------------------------------------------

def _order(c: BalancedComplex, order) -> list:
    order = list(range(len(c))) if order is None else [int(i) for i in order]
    if sorted(order) != list(range(len(c))):
        raise ComplexError("order is not a permutation of the facet indices")
    return order


def _maximal(shared: np.ndarray, d: int) -> list:
    """Maximal masks of a down-closed boolean family."""
    out = []
    for m in np.flatnonzero(shared).tolist():
        if all(not shared[m | (1 << r)] for r in range(d) if not m >> r & 1):
            out.append(m)
    return out


def _minimal(new: np.ndarray, d: int) -> list:
    out = []
    for m in np.flatnonzero(new).tolist():
        if all(not new[m ^ (1 << r)] for r in range(d) if m >> r & 1):
            out.append(m)
    return out


def _descent_mask(shared: np.ndarray, d: int) -> int:
    full = (1 << d) - 1
    dm = 0
    for r in range(d):
        if shared[full ^ (1 << r)]:
            dm |= 1 << r
    return dm


def _pure_codim_one(shared: np.ndarray, d: int, masks: np.ndarray) -> bool:
    full = (1 << d) - 1
    dm = _descent_mask(shared, d)
    bad = shared & ((full & ~masks & dm) == 0) & (masks != full)
    return not bad.any()


def topological_descents(c: BalancedComplex, order, j: int) -> frozenset:
    """Colors r such that the face of the j-th facet omitting r lies in an earlier facet."""
    order = _order(c, order)
    full = c.full
    row = c.table[order[j]]
    earlier = c.table[order[:j]]
    out = []
    for r in range(c.d):
        m = full ^ (1 << r)
        if j and (earlier[:, m] == row[m]).any():
            out.append(r + 1)
    return frozenset(out)


def descent_sets(c: BalancedComplex, order=None) -> list:
    """Topological descent sets of every step, in order position."""
    order = _order(c, order)
    present = np.zeros(c.ncells, dtype=bool)
    out = []
    for f in order:
        row = c.table[f]
        out.append(to_colors(_descent_mask(present[row], c.d)))
        present[row] = True
    return out


def minimal_new_faces(c: BalancedComplex, order, j: int) -> list:
    """Minimal supports of the faces of step j not contained in any earlier facet."""
    order = _order(c, order)
    present = np.zeros(c.ncells, dtype=bool)
    for f in order[:j]:
        present[c.table[f]] = True
    new = ~present[c.table[order[j]]]
    return [to_colors(m) for m in _minimal(new, c.d)]


@dataclass
class ShellingCertificate:
    order: list
    steps: list  # per step: maximal shared supports (list of frozensets)
    passed: bool
    failure: tuple | None = None  # (step, witness support, codimension)

    def __bool__(self):
        return self.passed


def verify_shelling(c: BalancedComplex, order=None) -> ShellingCertificate:
    """Check that every facet meets the earlier ones in a pure codimension-one subcomplex."""
    order = _order(c, order)
    d = c.d
    present = np.zeros(c.ncells, dtype=bool)
    steps = []
    failure = None
    for j, f in enumerate(order):
        row = c.table[f]
        shared = present[row]
        maxi = _maximal(shared, d) if j else []
        steps.append([to_colors(m) for m in maxi])
        if failure is None:
            for m in maxi:
                if bin(m).count("1") != d - 1:
                    failure = (j, to_colors(m), d - bin(m).count("1"))
                    break
        present[row] = True
    return ShellingCertificate(order, steps, failure is None, failure)


class _Cover:
    """Multiset of cells already placed, for backtracking searches."""

    def __init__(self, c: BalancedComplex):
        self.c = c
        self.count = np.zeros(c.ncells, dtype=np.int64)
        self.masks = np.arange(1 << c.d)

    def ok(self, f: int, first: bool) -> bool:
        if first:
            return True
        return _pure_codim_one(self.count[self.c.table[f]] > 0, self.c.d, self.masks)

    def add(self, f: int, sign: int) -> None:
        self.count[self.c.table[f]] += sign


def shelling_exists(c: BalancedComplex, budget: int = 10 ** 8):
    """Exhaustive backtracking for a shelling order.

    Returns a verified order or ``None`` when the search tree is exhausted.
    Prefixes are explored in increasing facet index; failed prefix sets are
    remembered since the shelling condition at a step only depends on the set
    of earlier facets.
    """
    nf = len(c)
    if nf == 0:
        return []
    cover = _Cover(c)
    dead: set = set()
    nodes = 0
    order: list = []

    def extend(placed: int) -> bool:
        nonlocal nodes
        if len(order) == nf:
            return True
        if placed in dead:
            return False
        for f in range(nf):
            if placed >> f & 1:
                continue
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded(budget)
            if not cover.ok(f, not order):
                continue
            cover.add(f, 1)
            order.append(f)
            if extend(placed | 1 << f):
                return True
            order.pop()
            cover.add(f, -1)
        dead.add(placed)
        return False

    if extend(0):
        assert verify_shelling(c, order).passed
        return list(order)
    return None


# ---------------------------------------------------------------------------
# partitionings
# ---------------------------------------------------------------------------

@dataclass
class PartitionVerdict:
    passed: bool
    witness: frozenset | None = None  # support of an offending cell
    witness_facet: int | None = None  # a facet containing it
    covering: list = field(default_factory=list)  # facets whose interval contains it

    def __bool__(self):
        return self.passed


def _superset_masks(g: int, d: int) -> list:
    full = (1 << d) - 1
    free = full & ~g
    out = []
    s = free
    while True:
        out.append(g | s)
        if s == 0:
            break
        s = (s - 1) & free
    return out


def verify_partitioning(c: BalancedComplex, assignment: Sequence) -> PartitionVerdict:
    """Every cell must lie in exactly one interval [G_i, F_i]."""
    if len(assignment) != len(c):
        raise ComplexError("assignment length differs from facet count")
    counts = np.zeros(c.ncells, dtype=np.int64)
    masks = []
    for i, g in enumerate(assignment):
        gm = _as_mask(g)
        if gm & ~c.full:
            raise ComplexError(f"minimal face of facet {i} uses colors outside 1..{c.d}")
        masks.append(gm)
        counts[c.table[i, _superset_masks(gm, c.d)]] += 1
    bad = np.flatnonzero(counts != 1)
    if not len(bad):
        return PartitionVerdict(True)
    cid = int(bad[0])
    m = int(c.cell_support[cid])
    covering = [i for i, gm in enumerate(masks) if gm & m == gm and c.table[i, m] == cid]
    return PartitionVerdict(False, to_colors(m), int(c.cell_facet[cid]), covering)


def descent_assignment(c: BalancedComplex, order=None) -> list:
    """Minimal faces from descent sets, indexed by facet (not by step)."""
    order = _order(c, order)
    out = [None] * len(c)
    for f, ds in zip(order, descent_sets(c, order)):
        out[f] = ds
    return out


def descent_order(c: BalancedComplex, assignment: Sequence):
    """An order whose topological descent sets are ``assignment``, or ``None``.

    Each ridge must have exactly one facet that does not list the missing
    color, and that facet must come before the others containing the ridge.
    ``None`` means some ridge breaks this or the precedences form a cycle.
    """
    from graphlib import CycleError, TopologicalSorter

    full = c.full
    owners: dict = {}
    sharers: dict = {}
    for i, g in enumerate(assignment):
        gm = _as_mask(g)
        for r in range(c.d):
            cell = int(c.table[i, full ^ (1 << r)])
            sharers.setdefault(cell, []).append(i)
            if not gm >> r & 1:
                owners.setdefault(cell, []).append(i)
    ts = TopologicalSorter({i: set() for i in range(len(c))})
    for cell, fs in sharers.items():
        own = owners.get(cell, [])
        if len(own) != 1:
            return None
        for i in fs:
            if i != own[0]:
                ts.add(i, own[0])
    try:
        order = list(ts.static_order())
    except CycleError:
        return None
    if [frozenset(x) for x in descent_sets(c, order)] != [frozenset(assignment[f]) for f in order]:
        return None
    return order


def partitioning_exists(c: BalancedComplex, budget: int = 10 ** 8):
    """Exact-cover search (Knuth's algorithm X) over intervals [G, F_i].

    Returns a list of minimal faces indexed by facet, or ``None``.
    """
    nf = len(c)
    if nf == 0:
        return []
    d = c.d
    rows: dict = {}
    for i in range(nf):
        for g in range(1 << d):
            cells = c.table[i, _superset_masks(g, d)].tolist()
            rows[(i, g)] = [("F", i)] + cells
    cols: dict = {}
    for r, cs in rows.items():
        for col in cs:
            cols.setdefault(col, set()).add(r)
    nodes = 0
    solution: list = []

    def select(r):
        removed = []
        for j in rows[r]:
            for i in cols[j]:
                for k in rows[i]:
                    if k != j:
                        cols[k].remove(i)
            removed.append(cols.pop(j))
        return removed

    def deselect(r, removed):
        for j in reversed(rows[r]):
            cols[j] = removed.pop()
            for i in cols[j]:
                for k in rows[i]:
                    if k != j:
                        cols[k].add(i)

    def _colkey(col):
        return (0, col[1]) if isinstance(col, tuple) else (1, col)

    def search() -> bool:
        nonlocal nodes
        if not cols:
            return True
        col = min(cols, key=lambda k: (len(cols[k]), _colkey(k)))
        for r in sorted(cols[col]):
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded(budget)
            solution.append(r)
            removed = select(r)
            if search():
                return True
            deselect(r, removed)
            solution.pop()
        return False

    if not search():
        return None
    out = [None] * nf
    for i, g in solution:
        out[i] = to_colors(g)
    assert verify_partitioning(c, out).passed
    return out


# ---------------------------------------------------------------------------
# derived complexes
# ---------------------------------------------------------------------------

def _column_map(colors: Sequence[int], base: int = 0) -> list:
    """Original masks of base | (sub-mask over ``colors``), indexed by sub-mask."""
    out = []
    for u in range(1 << len(colors)):
        m = base
        for t, col in enumerate(colors):
            if u >> t & 1:
                m |= 1 << (col - 1)
        out.append(m)
    return out


def link(c: BalancedComplex, facet: int, support) -> BalancedComplex:
    """Link of the cell ``(facet, support)``: cells containing it, minus it."""
    s = _as_mask(support)
    if not 0 <= facet < len(c) or s & ~c.full:
        raise CellNotFoundError(f"no cell ({facet}, {sorted_colors(s)})")
    cid = c.table[facet, s]
    rows = np.flatnonzero(c.table[:, s] == cid)
    rest = [r for r in range(1, c.d + 1) if not s >> (r - 1) & 1]
    cols = _column_map(rest, s)
    sub = c.table[np.ix_(rows, cols)]
    labels = tuple(c.labels[r - 1] for r in rest)
    keyfn = None
    if c.keyfn is not None:
        base = c.keyfn
        lab = {t + 1: r for t, r in enumerate(rest)}
        own = sorted_colors(s)

        def keyfn(f, colors, _b=base, _l=lab, _o=own):
            return _b(f, tuple(sorted(_o + tuple(_l[x] for x in colors))))
    return _reindex(len(rest), [c.facets[r] for r in rows.tolist()], sub, keyfn, labels)


def rank_select(c: BalancedComplex, support) -> BalancedComplex:
    """Restriction to the colors in ``support``; facets are its distinct cells."""
    s = _as_mask(support)
    colors = sorted(to_colors(s))
    col = c.table[:, s]
    _, first = np.unique(col, return_index=True)
    rows = np.sort(first)
    cols = _column_map(colors)
    sub = c.table[np.ix_(rows, cols)]
    labels = tuple(c.labels[r - 1] for r in colors)
    keyfn = None
    if c.keyfn is not None:
        base = c.keyfn
        lab = {t + 1: r for t, r in enumerate(colors)}

        def keyfn(f, cs, _b=base, _l=lab):
            return _b(f, tuple(_l[x] for x in cs))
    return _reindex(len(colors), [c.facets[r] for r in rows.tolist()], sub, keyfn, labels)


def sub_complex(c: BalancedComplex, facet_indices: Sequence[int]) -> BalancedComplex:
    rows = np.asarray(list(facet_indices), dtype=np.int64)
    return _reindex(c.d, [c.facets[r] for r in rows.tolist()], c.table[rows], c.keyfn, c.labels)


# ---------------------------------------------------------------------------
# crossing condition
# ---------------------------------------------------------------------------

@dataclass
class CrossingVerdict:
    passed: bool
    witness: tuple | None = None  # (earlier facet, later facet, support of sigma)
    checked: int = 0

    def __bool__(self):
        return self.passed


def _runs(mask: int, d: int) -> int:
    runs, prev = 0, False
    for r in range(d):
        cur = bool(mask >> r & 1)
        if cur and not prev:
            runs += 1
        prev = cur
    return runs


def check_crossing(c: BalancedComplex, order=None) -> CrossingVerdict:
    """Crossing condition for every later facet, earlier facet and shared face.

    For a shared face sigma containing colors 1..r (r maximal over the whole
    intersection) whose complement is disconnected, some earlier facet must
    share with the later one a face tau > sigma whose complement is a single
    run r+1..s.
    """
    order = _order(c, order)
    d, full = c.d, c.full
    nm = 1 << d
    masks = np.arange(nm)
    disconnected = np.array([_runs(full & ~m, d) >= 2 for m in range(nm)])
    prefix = [(1 << r) - 1 for r in range(d + 1)]
    present = np.zeros(c.ncells, dtype=bool)
    checked = 0
    for pos, k in enumerate(order):
        rowk = c.table[k]
        earlier_shared = present[rowk]
        for j in order[:pos]:
            sh = c.table[j] == rowk
            r = max(t for t in range(d + 1) if sh[prefix[t]])
            cand = sh & disconnected & ((masks & prefix[r]) == prefix[r])
            for m in np.flatnonzero(cand).tolist():
                checked += 1
                above = m >> r
                s1 = r + (above & -above).bit_length()  # smallest color of sigma above r
                ok = False
                run = 0
                for s in range(r + 1, s1):
                    run |= 1 << (s - 1)
                    if earlier_shared[full ^ run]:
                        ok = True
                        break
                if not ok:
                    return CrossingVerdict(False, (j, k, to_colors(m)), checked)
        present[rowk] = True
    return CrossingVerdict(True, None, checked)
