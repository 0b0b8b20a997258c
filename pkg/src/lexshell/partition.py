"""The quotient complex of the partition lattice Pi_n by S_n.

Ranks run coarse to fine: rank = number of blocks - 1, so the proper part
uses ranks (colors) 1..n-2.  A maximal chain orbit is a binary tree of block
splits; the planar order of its leaves is the "balls and bars" picture, and
the chain-labelling records where each new bar lands.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .complex import BalancedComplex, ComplexError, build_complex, flag_h, to_colors

MAX_N = 9


class PartitionError(ComplexError):
    pass


# ---------------------------------------------------------------------------
# concrete chains and forest keys
# ---------------------------------------------------------------------------

def _normalize_partition(n: int, p) -> tuple:
    blocks = tuple(sorted((frozenset(b) for b in p), key=lambda b: (min(b), len(b))))
    seen = set()
    for b in blocks:
        if not b or seen & b:
            raise PartitionError(f"blocks of {p} are empty or overlap")
        seen |= b
    if seen != set(range(1, n + 1)):
        raise PartitionError(f"{p} is not a partition of 1..{n}")
    return blocks


def _refines(fine: tuple, coarse: tuple) -> bool:
    return all(any(b <= c for c in coarse) for b in fine)


def validate_chain(n: int, chain: Sequence, support: Sequence[int] | None = None) -> list:
    """Normalize a chain of set partitions (coarse first) and check its ranks."""
    out = [_normalize_partition(n, p) for p in chain]
    for a, b in zip(out, out[1:]):
        if len(b) <= len(a) or not _refines(b, a):
            raise PartitionError("chain elements must strictly refine upward")
    ranks = [len(p) - 1 for p in out]
    if support is not None and list(support) != ranks:
        raise PartitionError(f"chain ranks {ranks} differ from support {list(support)}")
    return out


def partition_key(n: int, chain: Sequence, support: Sequence[int] | None = None) -> tuple:
    """Canonical code of the refinement forest of a chain.

    Nodes are blocks, one level per chain element, edges are containments
    between consecutive levels, labels are block sizes; children codes are
    sorted recursively.  Equal codes exactly for chains in one S_n-orbit.
    """
    levels = [(frozenset(range(1, n + 1)),)] + validate_chain(n, chain, support)

    def code(block, j):
        if j + 1 == len(levels):
            return (len(block),)
        kids = sorted(code(b, j + 1) for b in levels[j + 1] if b <= block)
        return (len(block), tuple(kids))

    return (tuple(len(p) - 1 for p in levels[1:]), code(levels[0][0], 0))


# ---------------------------------------------------------------------------
# the split tree and the chain-labelling
# ---------------------------------------------------------------------------

INF = 10 ** 6


class SplitTree:
    """A chain orbit built one split at a time, with a planar order on blocks.

    With ``sort=True`` the block-sort step is applied after every split; with
    ``sort=False`` the labelling is the plain bar position.
    """

    def __init__(self, n: int, sort: bool = True, concrete: bool = True):
        self.n = n
        self.sort = sort
        self.size = [n]
        self.parent = [-1]
        self.children: list = [None]
        self.created = [0]
        self.split_at = [None]
        self.members = [frozenset(range(1, n + 1))] if concrete else None
        self.rank = 0
        self.steps: list = []  # (index in planar order, smaller size, larger size)
        self.labels: list = []
        self.orders: list = []  # planar order of block sizes after each step

    def copy(self) -> "SplitTree":
        t = SplitTree.__new__(SplitTree)
        t.n, t.sort, t.rank = self.n, self.sort, self.rank
        t.size = self.size[:]
        t.parent = self.parent[:]
        t.children = [None if c is None else c[:] for c in self.children]
        t.created = self.created[:]
        t.split_at = self.split_at[:]
        t.members = None if self.members is None else self.members[:]
        t.steps = self.steps[:]
        t.labels = self.labels[:]
        t.orders = self.orders[:]
        return t

    # planar structure -------------------------------------------------
    def leaves(self, node: int = 0) -> list:
        ch = self.children[node]
        if ch is None:
            return [node]
        return self.leaves(ch[0]) + self.leaves(ch[1])

    def offset(self, node: int) -> int:
        off = 0
        while self.parent[node] >= 0:
            p = self.parent[node]
            if self.children[p][1] == node:
                off += self.size[self.children[p][0]]
            node = p
        return off

    def bars(self, node: int = 0) -> list:
        """Bar positions inside ``node``, relative to its left end."""
        out: list = []

        def walk(x, off):
            ch = self.children[x]
            if ch is None:
                return
            out.append(off + self.size[ch[0]])
            walk(ch[0], off)
            walk(ch[1], off + self.size[ch[0]])

        walk(node, 0)
        return sorted(out)

    def twin(self, node: int) -> int | None:
        p = self.parent[node]
        if p < 0:
            return None
        a, b = self.children[p]
        other = b if a == node else a
        return other if self.size[other] == self.size[node] else None

    def ancestors(self, node: int) -> list:
        out = []
        while self.parent[node] >= 0:
            node = self.parent[node]
            out.append(node)
        return out

    # splitting --------------------------------------------------------
    def classes(self) -> list:
        """Leftmost leaf of each equivalence class of current blocks, in planar order."""
        out = []
        for x in self.leaves():
            if self.size[x] < 2:
                continue
            t = self.twin(x)
            if t is not None and self.children[t] is None and t in out:
                continue
            out.append(x)
        return out

    def leftmost_equivalent(self, node: int) -> int:
        t = self.twin(node)
        if t is not None and self.children[t] is None and self.children[node] is None:
            lv = self.leaves()
            return min(node, t, key=lv.index)
        return node

    def _sort_key(self, node: int) -> tuple:
        word = self.bars(node)
        word = tuple(word + [INF] * (self.size[node] - 1 - len(word)))
        first = self.split_at[node]
        return (word, INF if first is None else first)

    def _block_sort(self, node: int) -> None:
        x = node
        while x >= 0:
            t = self.twin(x)
            if t is not None:
                p = self.parent[x]
                left, right = self.children[p]
                if self._sort_key(right) < self._sort_key(left):
                    self.children[p] = [right, left]
            x = self.parent[x]

    def split(self, node: int, a: int, members: frozenset | None = None) -> tuple:
        """Split the class of ``node`` into blocks of sizes a <= size - a.

        Returns the label of the new covering relation.
        """
        if self.children[node] is not None:
            raise PartitionError(f"block {node} is not present")
        s = self.size[node]
        b = s - a
        if not 1 <= a <= b:
            raise PartitionError(f"cannot split a block of size {s} with a smaller part of size {a}")
        node = self.leftmost_equivalent(node)
        index = self.leaves().index(node)
        self.rank += 1
        kids = []
        for part in (a, b):
            kids.append(len(self.size))
            self.size.append(part)
            self.parent.append(node)
            self.children.append(None)
            self.created.append(self.rank)
            self.split_at.append(None)
        if self.members is not None:
            m = self.members[node]
            if members is None:
                small = frozenset(sorted(m)[:a])
            else:
                small = members if len(members) == a else m - members
            self.members += [small, m - small]
        self.children[node] = kids
        self.split_at[node] = self.rank
        if self.sort:
            self._block_sort(node)
        bar = self.offset(node) + self.size[self.children[node][0]]
        if self.sort:
            anc = tuple(self.split_at[x] for x in reversed(self.ancestors(node)))
            label = (bar, tuple(self.bars()), anc)
        else:
            label = bar
        self.steps.append((index, a, b))
        self.labels.append(label)
        self.orders.append(tuple(self.size[x] for x in self.leaves()))
        return label

    # keys -------------------------------------------------------------
    def present(self, node: int, r: int) -> bool:
        s = self.split_at[node]
        return self.created[node] <= r and (s is None or s > r)

    def _descend(self, node: int, r: int) -> list:
        s = self.split_at[node]
        if s is None or s > r:
            return [node]
        a, b = self.children[node]
        return self._descend(a, r) + self._descend(b, r)

    def key(self, support: Sequence[int]) -> tuple:
        """Forest key of the chain restricted to ``support`` (same as partition_key)."""
        support = tuple(support)

        def code(x, j):
            if j == len(support):
                return (self.size[x],)
            kids = sorted(code(y, j + 1) for y in self._descend(x, support[j]))
            return (self.size[x], tuple(kids))

        return (support, code(0, 0))

    def chain(self, support: Sequence[int]) -> list:
        """Concrete chain of set partitions at the given ranks."""
        if self.members is None:
            raise PartitionError("tree was built without concrete members")
        return [[self.members[x] for x in self._descend(0, r)] for r in support]

    def encoding(self) -> "FacetEncoding":
        return FacetEncoding(self.n, tuple(self.steps), self.sort)


@dataclass(frozen=True)
class FacetEncoding:
    """Bar-insertion record: (planar index of split block, smaller child, larger child)."""

    n: int
    steps: tuple
    sort: bool = True

    def replay(self) -> SplitTree:
        t = SplitTree(self.n, self.sort)
        for index, a, b in self.steps:
            lv = t.leaves()
            if not 0 <= index < len(lv) or t.size[lv[index]] != a + b:
                raise PartitionError(f"encoding splits a block that is not present: {(index, a, b)}")
            node = lv[index]
            if t.leftmost_equivalent(node) != node:
                raise PartitionError(f"step {(index, a, b)} does not split the leftmost equivalent block")
            t.split(node, a)
        return t

    def word(self) -> tuple:
        return tuple(x for step in self.steps for x in step)


def label_facet(enc: FacetEncoding) -> list:
    """Label of each step (ranks 1..n-2) of a facet under the block-sort labelling."""
    t = FacetEncoding(enc.n, enc.steps, True).replay()
    return list(t.labels)


def tree_from_chain(n: int, chain: Sequence, sort: bool = True) -> SplitTree:
    """Replay a saturated chain from the one-block partition (coarse first)."""
    chain = validate_chain(n, chain)
    if len(chain[0]) != 2 and n > 1:
        raise PartitionError("chain must start at rank 1")
    for a, b in zip(chain, chain[1:]):
        if len(b) != len(a) + 1:
            raise PartitionError("chain must be saturated")
    t = SplitTree(n, sort)
    where = {frozenset(range(1, n + 1)): 0}
    prev = [frozenset(range(1, n + 1))]
    for p in chain:
        old = next(b for b in prev if b not in p)
        parts = sorted((b for b in p if b < old), key=len)
        node = where.pop(old)
        target = t.leftmost_equivalent(node)
        if target != node:
            # the twins are interchangeable; follow the chain through the swap
            other = next(k for k, v in where.items() if v == target)
            where[other] = node
            node = target
        t.split(node, len(parts[0]))
        kids = t.children[node]
        sizes = {x: t.size[x] for x in kids}
        small, large = (kids if sizes[kids[0]] <= sizes[kids[1]] else kids[::-1])
        if sizes[small] == sizes[large]:
            small, large = kids
        where[parts[0]] = small
        where[parts[1]] = large
        prev = list(p)
    return t


def presort_labels(n: int, chain: Sequence) -> tuple:
    """Bar positions of a saturated chain with no block sort."""
    return tuple(tree_from_chain(n, chain, sort=False).labels)


# ---------------------------------------------------------------------------
# facets
# ---------------------------------------------------------------------------

@dataclass
class PartitionFacet:
    encoding: FacetEncoding
    labels: tuple
    tree: SplitTree = field(repr=False, compare=False)
    tied: bool = False

    def key(self, support) -> tuple:
        return self.tree.key(support)


def _grow(n: int, sort: bool, depth: int):
    out = []

    def rec(t: SplitTree):
        if t.rank == depth:
            out.append(t)
            return
        for x in t.classes():
            for a in range(1, t.size[x] // 2 + 1):
                u = t.copy()
                u.split(x, a)
                rec(u)

    rec(SplitTree(n, sort))
    return out


def enumerate_partition_facets(n: int, cap: int = MAX_N, sort: bool = True) -> list:
    """One facet per maximal-chain orbit, sorted by label sequence."""
    if n > cap:
        raise PartitionError(f"n = {n} exceeds the cap {cap}")
    if n < 3:
        raise PartitionError("Pi_n has an empty proper part for n < 3")
    trees = _grow(n, sort, n - 2)
    facets = [PartitionFacet(t.encoding(), tuple(t.labels), t) for t in trees]
    facets.sort(key=lambda f: (f.labels, f.encoding.word()))
    for a, b in zip(facets, facets[1:]):
        if a.labels == b.labels:
            a.tied = b.tied = True
    return facets


def _keyfn(facet: PartitionFacet, support: tuple) -> tuple:
    return facet.key(support)


@lru_cache(maxsize=8)
def partition_complex(n: int, cap: int = MAX_N) -> BalancedComplex:
    """Delta(Pi_n)/S_n with facets in lexicographic label order."""
    facets = enumerate_partition_facets(n, cap)
    return build_complex(n - 2, facets, _keyfn)


def b_s_table(n: int, cap: int = MAX_N) -> dict:
    """b_S(n) for every S in {1..n-2}, via h at the dual support {n-1-i}."""
    h = flag_h(partition_complex(n, cap))
    return {s: h[frozenset(n - 1 - i for i in s)] for s in h}


def full_descent_facets(n: int) -> list:
    """Facet indices whose topological descent set (lex order) is all of 1..n-2."""
    from .complex import descent_sets

    c = partition_complex(n)
    full = to_colors(c.full)
    return [i for i, ds in enumerate(descent_sets(c)) if ds == full]


def facet_from_labels(n: int, labels: Sequence) -> FacetEncoding:
    """Rebuild an encoding whose block-sort labels are ``labels``.

    Tied facets share a label sequence; the one with the smallest step word
    is returned.
    """
    labels = [tuple(x) if isinstance(x, list) else x for x in labels]
    want = [(lab[0], tuple(lab[1]), tuple(lab[2])) for lab in labels]

    def rec(t: SplitTree):
        if t.rank == len(want):
            return t.encoding()
        for x in t.classes():
            for a in range(1, t.size[x] // 2 + 1):
                u = t.copy()
                if u.split(x, a) == want[t.rank]:
                    hit = rec(u)
                    if hit is not None:
                        return hit
        return None

    found = rec(SplitTree(n, True))
    if found is None:
        raise PartitionError("no facet carries these labels")
    return found


def conjecture_scan(n: int, cap: int = MAX_N) -> list:
    """(S, b_S(n), reduced GF(2) Betti of the rank selection at the dual of S) for every S."""
    from .complex import rank_select
    from .homology import reduced_betti_gf2

    c = partition_complex(n, cap)
    bs = b_s_table(n, cap)
    rows = []
    for s in sorted(bs, key=lambda x: (len(x), sorted(x))):
        dual = frozenset(n - 1 - i for i in s)
        betti = reduced_betti_gf2(rank_select(c, dual))
        rows.append((tuple(sorted(s)), bs[s], tuple(betti)))
    return rows


# ---------------------------------------------------------------------------
# the projective-plane link
# ---------------------------------------------------------------------------

RP2_CHAIN = (
    [{1, 2, 3, 4}, {5, 6, 7, 8}],
    [{1}, {2, 3, 4}, {5}, {6, 7, 8}],
    [{1}, {2}, {3, 4}, {5}, {6}, {7, 8}],
)
RP2_SUPPORT = (1, 3, 5)


@dataclass
class Rp2Report:
    facet: int
    support: tuple
    link_labels: tuple
    f_vector: tuple
    betti: list
    euler: int


def rp2_witness() -> Rp2Report:
    from .complex import f_vector, link
    from .homology import betti_gf2, euler_characteristic

    c = partition_complex(8)
    target = partition_key(8, RP2_CHAIN, RP2_SUPPORT)
    hits = [i for i, f in enumerate(c.facets) if f.key(RP2_SUPPORT) == target]
    if not hits:
        raise PartitionError("the projective-plane cell was not found")
    lk = link(c, hits[0], RP2_SUPPORT)
    return Rp2Report(hits[0], RP2_SUPPORT, lk.labels, f_vector(lk), betti_gf2(lk),
                     euler_characteristic(lk))


# ---------------------------------------------------------------------------
# the increasing chain condition on rooted intervals
# ---------------------------------------------------------------------------

@dataclass
class IccWitness:
    root_support: tuple
    top: int  # rank of the interval's top element; n - 1 means the top of Pi_n
    first_labels: tuple
    offending_labels: tuple
    reason: str


@dataclass
class IccVerdict:
    passed: bool
    intervals: int
    witness: IccWitness | None = None
    label_increasing: int = 0  # non-first extensions whose label word is weakly increasing

    def __bool__(self):
        return self.passed


def _weakly_increasing(word) -> bool:
    return all(a <= b for a, b in zip(word, word[1:]))


def _interval_verdict(words: list, faces: list, inner: list) -> tuple:
    """Core test on one rooted interval.

    ``words[e]`` is the label word of extension e, ``faces[e][t]`` the id of
    its face with rank t removed.  Returns (ok, first, offender, reason).
    """
    order = sorted(range(len(words)), key=lambda e: words[e])
    for a, b in zip(order, order[1:]):
        if words[a] == words[b]:
            return False, a, b, "tied label words"
    seen: dict = {t: set() for t in inner}
    clean = []
    for e in order:
        if not any(faces[e][t] in seen[t] for t in inner):
            clean.append(e)
        for t in inner:
            seen[t].add(faces[e][t])
    first = order[0]
    if clean != [first]:
        bad = next((e for e in clean if e != first), first)
        return False, first, bad, "non-first extension without topological descent"
    return True, first, None, ""


def check_icc(n: int, scope: str = "all", cap: int = 7, sample: int = 50, seed: int = 0) -> IccVerdict:
    """Topological increasing chain condition on rooted edge-intervals of Delta(Pi_n)/S_n."""
    import random

    if scope not in ("all", "sample"):
        raise PartitionError(f"unknown scope {scope!r}")
    if scope == "all" and n > cap:
        raise PartitionError(f"exhaustive check capped at n = {cap}")
    c = partition_complex(n)
    d = c.d
    pairs = [(i, j) for i in range(d) for j in range(i + 2, d + 2)]
    if scope == "sample":
        rnd = random.Random(seed)
        pairs = rnd.sample(pairs, min(sample, len(pairs)))
    total = 0
    increasing = 0
    for i, j in pairs:
        low = (1 << i) - 1
        root_mask = low | ((1 << (j - 1)) if j <= d else 0)
        top = (1 << min(j, d)) - 1
        inner = [t for t in range(i + 1, min(j, d + 1)) if t <= d and t < j]
        cells = c.cells_of_support(top)
        groups: dict = {}
        for x in cells:
            f = int(c.cell_facet[x])
            groups.setdefault(int(c.table[f, root_mask]), []).append(x)
        for root, ext in groups.items():
            total += 1
            words, faces = [], []
            for x in ext:
                f = int(c.cell_facet[x])
                words.append(tuple(c.facets[f].labels[i:min(j, d)]))
                faces.append({t: int(c.table[f, top ^ (1 << (t - 1))]) for t in inner})
            ok, first, bad, reason = _interval_verdict(words, faces, inner)
            increasing += sum(1 for e, w in enumerate(words) if e != first and _weakly_increasing(w))
            if not ok:
                w = IccWitness(tuple(sorted(to_colors(root_mask))), j, words[first], words[bad], reason)
                return IccVerdict(False, total, w, increasing)
    return IccVerdict(True, total, None, increasing)


# the interval from 11|11 to 1|1|9|2|2|7 in Pi_22, built on its own
ELEVEN_ELEVEN_INTERVAL = (22, (11, 11), ((1, 1, 9), (2, 2, 7)))


def standalone_interval(n: int, root_sizes: tuple, targets: tuple, sort: bool) -> list:
    """Saturated chains from a two-block root partition to the partition
    refining each root block into the target sizes.

    Returns split trees of the chain orbits, one per orbit.
    """
    if sum(root_sizes) != n or len(root_sizes) != len(targets):
        raise PartitionError("root sizes and targets do not match")
    if len(root_sizes) != 2:
        raise PartitionError("the root must have two blocks")
    start = SplitTree(n, sort)
    start.split(0, min(root_sizes))
    depth = sum(len(t) - 1 for t in targets)
    base_rank = start.rank
    out = []

    def final_ok(t: SplitTree) -> bool:
        got = []
        for x in t.leaves():
            y = x
            while t.created[y] > base_rank:
                y = t.parent[y]
            got.append((y, t.size[x]))
        per: dict = {}
        for y, s in got:
            per.setdefault(y, []).append(s)
        return sorted(tuple(sorted(v)) for v in per.values()) == sorted(tuple(sorted(v)) for v in targets)

    def rec(t: SplitTree):
        if t.rank - base_rank == depth:
            if final_ok(t):
                out.append(t)
            return
        for x in t.classes():
            for a in range(1, t.size[x] // 2 + 1):
                u = t.copy()
                u.split(x, a)
                rec(u)

    rec(start)
    return out


def interval_icc(n: int, root_sizes: tuple, targets: tuple, sort: bool) -> IccVerdict:
    """The increasing chain condition on one standalone rooted interval."""
    chains = standalone_interval(n, root_sizes, targets, sort)
    lo = chains[0].rank - sum(len(t) - 1 for t in targets)
    hi = chains[0].rank
    inner = list(range(lo + 1, hi))
    base = list(range(1, lo + 1))
    words, faces = [], []
    for t in chains:
        words.append(tuple(t.labels[lo:hi]))
        faces.append({r: t.key(base + [s for s in inner if s != r] + [hi]) for r in inner})
    ok, first, bad, reason = _interval_verdict(words, faces, inner)
    increasing = sum(1 for e, w in enumerate(words) if e != first and _weakly_increasing(w))
    w = None if ok else IccWitness(tuple(base) + (hi,), hi, words[first], words[bad], reason)
    return IccVerdict(ok, 1, w, increasing)
