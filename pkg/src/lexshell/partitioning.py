"""Partitionings of Delta(Pi_n)/S_n and of the link subcomplexes behind its non-shelling steps.

Link model: m equivalent blocks B_1..B_m of size k+1 next to a block L of
size l > k+1.  Splitters B_1 | B_2 | ... are inserted left to right at ranks
1..m-1; rank m separates B_m from L.  Slot s (1..k) splits the s-th singleton
off every block, block sigma_s(t) at rank s*m + t; afterwards L sheds
singletons.  The link ranks are l*m + t with 0 <= l <= k and 1 <= t < m.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import permutations, product
from typing import Sequence

from .complex import (
    BalancedComplex,
    ComplexError,
    build_complex,
    descent_sets,
    flag_h,
    to_colors,
    verify_partitioning,
    verify_shelling,
)
from .partition import partition_complex, partition_key


class PartitioningError(ComplexError):
    pass


def _inverse(p: Sequence[int]) -> tuple:
    inv = [0] * len(p)
    for i, x in enumerate(p):
        inv[x - 1] = i + 1
    return tuple(inv)


def _check_perm(p: Sequence[int], m: int) -> tuple:
    p = tuple(p)
    if sorted(p) != list(range(1, m + 1)):
        raise PartitioningError(f"{p} is not a permutation of 1..{m}")
    return p


def transition_words(m: int, sigmas: Sequence[Sequence[int]]) -> list:
    """rho_l = sigma_{l-1}^{-1} o sigma_l for l = 1..k, and rho_0 = sigma_k^{-1}, in one-line form."""
    sig = [_check_perm(s, m) for s in sigmas]
    if sig[0] != tuple(range(1, m + 1)):
        raise PartitioningError("sigma_0 must be the identity")
    k = len(sig) - 1
    rho = [None] * (k + 1)
    for l in range(1, k + 1):
        inv = _inverse(sig[l - 1])
        rho[l] = tuple(inv[x - 1] for x in sig[l])
    rho[0] = _inverse(sig[k])
    return rho


def swap_twins(m: int, sigmas: Sequence[Sequence[int]]) -> tuple:
    """Exchange the labels of blocks m-1 and m in every slot after the first permutation."""
    def tau(x):
        return m if x == m - 1 else m - 1 if x == m else x
    return (tuple(sigmas[0]),) + tuple(tuple(tau(x) for x in s) for s in sigmas[1:])


def link_subcomplex_minimal_face(m: int, k: int, sigmas: Sequence[Sequence[int]],
                                 equivalent_last: bool = False) -> frozenset:
    """Ranks l*m + t where rho_l has a descent at t.

    With ``equivalent_last`` blocks m-1 and m are twins and the bar between
    them is no splitter.  If the last slot fills block m before block m-1 the
    twins are relabelled, which moves the wrap-around descent into the first
    slot; rank m - 1 is never returned.
    """
    if len(sigmas) != k + 1:
        raise PartitioningError(f"expected {k + 1} permutations, got {len(sigmas)}")
    transition_words(m, sigmas)
    if equivalent_last and m >= 2:
        last = _inverse(sigmas[k])
        if last[m - 2] > last[m - 1]:
            sigmas = swap_twins(m, sigmas)
    rho = transition_words(m, sigmas)
    out = set()
    for l, word in enumerate(rho):
        for t in range(1, m):
            if word[t - 1] > word[t]:
                out.add(l * m + t)
    return frozenset(out)


# ---------------------------------------------------------------------------
# the embedded link subcomplex, built by brute force from forest keys
# ---------------------------------------------------------------------------

@dataclass
class LinkModel:
    """Brute-force link subcomplex for (m, k).

    With ``twins`` there is no block L: the last split creates B_{m-1} | B_m
    at rank m - 1, slot s fills at ranks s*m + t - 1, and facets are taken
    with block m - 1 filled before block m in the first slot.
    """

    m: int
    k: int
    twins: bool = False
    l: int = 0

    def __post_init__(self):
        if self.m < 1 or self.k < 1 or (self.twins and self.m < 2):
            raise PartitioningError("need m >= 1 and k >= 1 (m >= 2 with twins)")
        if self.twins:
            self.l = 0
        elif self.l <= self.k + 1:
            self.l = self.k + 2
        self.n = self.m * (self.k + 1) + self.l

    def rank(self, slot: int, t: int) -> int:
        """Model rank of formula rank slot*m + t."""
        if not self.twins or slot == 0:
            return slot * self.m + t
        return slot * self.m + t - 1

    @property
    def formula_ranks(self) -> tuple:
        m = self.m
        top = m - 1 if self.twins else m
        return tuple(t for t in range(1, top)) + tuple(
            s * m + t for s in range(1, self.k + 1) for t in range(1, m))

    @property
    def link_ranks(self) -> tuple:
        return tuple(self.rank(r // self.m, r % self.m) for r in self.formula_ranks)

    @property
    def face_ranks(self) -> tuple:
        m, k = self.m, self.k
        if self.twins:
            return tuple(m - 1 + s * m for s in range(k))
        return tuple(s * m for s in range(1, k + 2)) + tuple(range((k + 1) * m + 1, self.n - 1))

    def block(self, b: int) -> list:
        w = self.k + 1
        return list(range((b - 1) * w + 1, b * w + 1))

    def partition(self, sigmas: Sequence[Sequence[int]], r: int) -> list:
        m, k = self.m, self.k
        big = list(range(m * (k + 1) + 1, self.n + 1))
        created = m - 1 if self.twins else m
        if r < created:
            head = [self.block(b) for b in range(1, r + 1)]
            rest = [x for b in range(r + 1, m + 1) for x in self.block(b)] + big
            return head + [rest]
        out = []
        pos = [None] + [_inverse(s) for s in sigmas[1:]]
        for b in range(1, m + 1):
            c = sum(1 for s in range(1, k + 1) if self.rank(s, pos[s][b - 1]) <= r)
            xs = self.block(b)
            out += [[x] for x in xs[:c]]
            if xs[c:]:
                out.append(xs[c:])
        if big:
            e = max(0, r - (k + 1) * m)
            out += [[x] for x in big[:e]]
            out.append(big[e:])
        return out

    def chain(self, sigmas: Sequence[Sequence[int]], ranks: Sequence[int]) -> list:
        return [self.partition(sigmas, r) for r in ranks]

    def facets(self) -> list:
        ident = tuple(range(1, self.m + 1))
        perms = list(permutations(ident))
        out = [(ident,) + rest for rest in product(perms, repeat=self.k)]
        if self.twins:
            m = self.m
            out = [f for f in out if _inverse(f[1])[m - 2] < _inverse(f[1])[m - 1]]
        return out

    def minimal_face(self, sigmas: Sequence[Sequence[int]]) -> frozenset:
        """Formula minimal face in model ranks."""
        g = link_subcomplex_minimal_face(self.m, self.k, sigmas, self.twins)
        return frozenset(self.rank(r // self.m, r % self.m) for r in g)

    def complex(self) -> BalancedComplex:
        lr = self.link_ranks
        fr = self.face_ranks

        def keyfn(sigmas, colors):
            ranks = sorted(set(fr) | {lr[c - 1] for c in colors})
            return partition_key(self.n, self.chain(sigmas, ranks), ranks)

        return build_complex(len(lr), self.facets(), keyfn, labels=lr)

    def to_colors(self, ranks) -> frozenset:
        index = {r: i + 1 for i, r in enumerate(self.link_ranks)}
        return frozenset(index[r] for r in ranks)

    def to_ranks(self, colors) -> frozenset:
        return frozenset(self.link_ranks[c - 1] for c in colors)


# ---------------------------------------------------------------------------
# extending a face of the link subcomplex to the facet whose interval holds it
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LinkFace:
    """A face of the link subcomplex up to relabelling interchangeable blocks.

    ``segments`` are runs of consecutive blocks between included splitters;
    ``batches[b]`` records, for block b and each slot, the index of the run of
    fills (between included slot ranks) in which b was filled.
    """

    m: int
    k: int
    support: frozenset
    segments: tuple
    batches: tuple

    def signature(self) -> tuple:
        return tuple(tuple(sorted(self.batches[b - 1] for b in seg)) for seg in self.segments)


def _cuts(m: int, support: frozenset, slot: int) -> list:
    return sorted(t for t in range(1, m) if slot * m + t in support)


def link_face(m: int, k: int, sigmas: Sequence[Sequence[int]], support) -> LinkFace:
    """The face of support ``support`` (link ranks) in the facet given by ``sigmas``."""
    support = frozenset(support)
    model_ranks = {s * m + t for s in range(k + 1) for t in range(1, m)}
    if not support <= model_ranks:
        raise PartitioningError(f"ranks {sorted(support - model_ranks)} are not link ranks")
    transition_words(m, sigmas)
    if len(sigmas) != k + 1:
        raise PartitioningError(f"expected {k + 1} permutations")
    splits = _cuts(m, support, 0)
    bounds = [0] + splits + [m]
    segments = tuple(tuple(range(a + 1, b + 1)) for a, b in zip(bounds, bounds[1:]))
    batches = [[0] * k for _ in range(m)]
    for s in range(1, k + 1):
        cuts = _cuts(m, support, s)
        for t, b in enumerate(sigmas[s], start=1):
            batches[b - 1][s - 1] = sum(1 for c in cuts if c < t)
    return LinkFace(m, k, support, segments, tuple(tuple(v) for v in batches))


def extend_face_to_facet(face: LinkFace) -> tuple:
    """The unique facet containing ``face`` whose minimal face lies in its support."""
    m, k = face.m, face.k
    vec = [None] * (m + 1)
    for seg in face.segments:
        got = sorted((face.batches[b - 1] for b in seg), key=lambda v: v[::-1])
        for b, v in zip(seg, got):
            vec[b] = v
    sigmas = [tuple(range(1, m + 1))]
    for s in range(1, k + 1):
        prev = _inverse(sigmas[-1])
        order = sorted(range(1, m + 1), key=lambda b: (vec[b][s - 1], prev[b - 1]))
        sigmas.append(tuple(order))
        counts = [0] * (len(_cuts(m, face.support, s)) + 1)
        for b in order:
            counts[vec[b][s - 1]] += 1
        if any(x == 0 for x in counts):
            raise PartitioningError(f"slot {s} has an empty run of fills")
    return tuple(sigmas)


# ---------------------------------------------------------------------------
# similar blocks inside facets of Delta(Pi_n)/S_n
# ---------------------------------------------------------------------------

@dataclass
class SimilarGroup:
    """m equal blocks created left to right from one parent, then refined entirely.

    ``blocks`` are tree nodes in creation order (for twins, the twin refined
    first comes first).  ``splitters[t-1]`` is the rank creating the bar
    between blocks t and t+1; the bar created at ``created`` (rank at which all
    blocks exist) is not a splitter.  ``steps`` lists (rank, block index,
    slot, restricted rank) for every refinement in the window.
    """

    parent: int
    size: int
    blocks: tuple
    twins: bool
    splitters: tuple
    created: int
    finished: int
    steps: tuple

    @property
    def m(self) -> int:
        return len(self.blocks)

    def link_ranks(self, top: int) -> frozenset:
        inner = range(self.created + 1, min(self.finished, top + 1))
        return frozenset(self.splitters) | frozenset(r for r in inner if r != self.finished)

    def shape(self) -> tuple:
        return (self.size, self.m, self.twins, self.splitters, self.created, self.finished)


def _owner(tree, node: int, blocks: dict) -> int | None:
    while node >= 0:
        if node in blocks:
            return blocks[node]
        node = tree.parent[node]
    return None


def _local_replay(tree, block: int):
    """Replay the refinement of one block as a chain of Pi_b; returns (tree, node map)."""
    from .partition import SplitTree

    inner = []

    def walk(x):
        ch = tree.children[x]
        if ch is None:
            return
        inner.append(x)
        for y in ch:
            walk(y)

    walk(block)
    inner.sort(key=lambda x: tree.split_at[x])
    local = SplitTree(tree.size[block], tree.sort, concrete=False)
    where = {block: 0}
    ranks = []
    for x in inner:
        kids = sorted(tree.children[x])
        node = where[x]
        if local.leftmost_equivalent(node) != node:
            raise PartitioningError("block refinement disagrees with its local replay")
        local.split(node, tree.size[kids[0]])
        lk = sorted(local.children[node])
        where[kids[0]], where[kids[1]] = lk[0], lk[1]
        ranks.append(tree.split_at[x])
    return local, ranks


def similar_groups(tree, top: int) -> list:
    """Every similar-block group of a facet whose window holds only its refinements."""
    tree = complete_tree(tree)
    out = []
    for p in range(len(tree.size)):
        if tree.children[p] is None:
            continue
        blocks, splitters = [], []
        cur, r = p, tree.split_at[p]
        twins = False
        size = None
        while True:
            kids = tree.children[cur]
            if kids is None or tree.split_at[cur] != r:
                break
            a, b = sorted(kids, key=lambda x: (tree.size[x], x))
            if size is None:
                size = tree.size[a]
            if tree.size[a] != size:
                break
            if tree.size[b] == size:
                blocks += [a, b]
                twins = True
                r += 1
                break
            blocks.append(a)
            splitters.append(r)
            cur, r = b, r + 1
        if not twins:
            if len(blocks) < 2:
                continue
            splitters.pop()  # the bar next to the remaining block is not a splitter
        created = r - 1
        if size is None or size < 2 or len(blocks) < 2:
            continue
        if twins and tree.split_at[blocks[-1]] < tree.split_at[blocks[-2]]:
            blocks[-2], blocks[-1] = blocks[-1], blocks[-2]
        index = {x: i + 1 for i, x in enumerate(blocks)}
        owner = {}
        for x in range(len(tree.size)):
            if tree.children[x] is not None and tree.split_at[x] > created:
                owner[tree.split_at[x]] = _owner(tree, x, index)
        finished = created
        while owner.get(finished + 1) is not None:
            finished += 1
        refined = all(tree.children[x] is None or tree.split_at[x] > created for x in blocks)
        done = all(_leaf_count(tree, x) == tree.size[x] and _last_split(tree, x) <= finished for x in blocks)
        if not (refined and done):
            continue
        steps = []
        for i, x in enumerate(blocks, start=1):
            local, ranks = _local_replay(tree, x)
            for rho, (rank, lab) in enumerate(zip(ranks, local.labels), start=1):
                steps.append((rank, i, lab[0] if isinstance(lab, tuple) else lab, rho))
        steps.sort()
        out.append(SimilarGroup(p, size, tuple(blocks), twins, tuple(splitters), created, finished, tuple(steps)))
    return out


def complete_tree(tree):
    """The facet tree with its implicit last split (to all singletons) carried out."""
    if tree.rank != tree.n - 2:
        return tree
    t = tree.copy()
    t.members = None
    last = next(x for x in t.leaves() if t.size[x] == 2)
    t.split(last, 1)
    return t


def _leaf_count(tree, x: int) -> int:
    ch = tree.children[x]
    return 1 if ch is None else _leaf_count(tree, ch[0]) + _leaf_count(tree, ch[1])


def _last_split(tree, x: int) -> int:
    ch = tree.children[x]
    if ch is None:
        return -1
    return max(tree.split_at[x], _last_split(tree, ch[0]), _last_split(tree, ch[1]))


def _relabel(steps: tuple, m: int) -> tuple:
    def tau(i):
        return m if i == m - 1 else m - 1 if i == m else i
    return tuple((r, tau(i), s, rho) for r, i, s, rho in steps)


def _similarity_pass(steps: tuple, m: int, restricted: dict, top: int) -> tuple:
    """One sweep of the evolving block order; returns (ranks, final order)."""
    sigma = list(range(1, m + 1))
    cls = {i: 0 for i in sigma}
    fresh = 1
    hist: dict = {i: [] for i in sigma}
    ranks = set()
    prev = None
    for r, i, s, rho in steps:
        pos = {b: sigma.index(b) for b in sigma}
        if prev is not None and prev[0] <= top:
            pr, pi, ps, prho, ppos = prev
            if pi != i:
                if (ps, ppos[pi]) > (s, ppos[i]):
                    ranks.add(pr)
            elif prho in restricted.get(i, ()):
                ranks.add(pr)
                cls[i] = fresh
                fresh += 1
            # a step outside a class splits it by progress
            for c in set(cls.values()) - {cls[i]}:
                members = [b for b in sigma if cls[b] == c]
                lengths = {len(hist[b]) for b in members}
                if len(lengths) > 1:
                    for L in sorted(lengths)[1:]:
                        for b in members:
                            if len(hist[b]) == L:
                                cls[b] = fresh
                        fresh += 1
        hist[i].append(s)
        for b in sigma:
            if b != i and cls[b] == cls[i]:
                a, c = hist[i], hist[b]
                short, long_ = (a, c) if len(a) <= len(c) else (c, a)
                if long_[:len(short)] != short:
                    cls[i] = fresh
                    fresh += 1
                    break
        slots = [p for p, b in enumerate(sigma) if cls[b] == cls[i]]
        members = [sigma[p] for p in slots if sigma[p] != i] + [i]
        for p, b in zip(slots, members):
            sigma[p] = b
        prev = (r, i, s, rho, pos)
    return ranks, sigma


def group_minimal_face(group: SimilarGroup, restricted: dict, top: int) -> tuple:
    """Minimal-face ranks contributed by a similar-block group, and whether twins were swapped."""
    m = group.m
    ranks, sigma = _similarity_pass(group.steps, m, restricted, top)
    swapped = False
    if group.twins and sigma.index(m - 1) > sigma.index(m):
        swapped = True
        restricted = {({m - 1: m, m: m - 1}.get(i, i)): g for i, g in restricted.items()}
        ranks, sigma = _similarity_pass(_relabel(group.steps, m), m, restricted, top)
    for t, r in enumerate(group.splitters, start=1):
        if sigma.index(t) > sigma.index(t + 1):
            ranks.add(r)
    return frozenset(ranks), swapped


@dataclass
class PartitioningResult:
    n: int
    assignment: list  # per facet (lex order): frozenset of ranks
    provenance: list
    passed: bool
    counterexample: dict | None = None
    histogram_matches: bool = False
    families: list = field(default_factory=list)

    def __bool__(self):
        return self.passed


_CACHE: dict = {}


def _restricted_faces(tree, group: SimilarGroup) -> dict:
    """Minimal face (restricted ranks) of each block's own chain in Delta(Pi_b)/S_b."""
    b = group.size
    if b < 4:
        return {}
    sub = build_partitioning(b)
    if not sub.passed:
        raise PartitioningError(f"no verified partitioning for n = {b}")
    c = partition_complex(b)
    index = {f.labels: i for i, f in enumerate(c.facets)}
    tree = complete_tree(tree)
    out = {}
    for i, x in enumerate(group.blocks, start=1):
        local, _ = _local_replay(tree, x)
        out[i] = sub.assignment[index[tuple(local.labels[: b - 2])]]
    return out


def build_partitioning(n: int, link_rule: str = "similarity") -> PartitioningResult:
    """Descent sets at shelling steps, link rules for the families behind non-shelling steps.

    ``link_rule`` is "similarity" (the evolving-order construction) or
    "search" (exact cover of each family's link, for comparison).
    """
    from .complex import link as link_of, minimal_new_faces, partitioning_exists

    key = (n, link_rule)
    if key in _CACHE:
        return _CACHE[key]
    c = partition_complex(n)
    d = c.d
    order = list(range(len(c.facets)))
    ds = descent_sets(c, order)
    assignment = [frozenset(x) for x in ds]
    provenance: list = [{"rule": "shelling-step"} for _ in order]
    families = []
    assigned = set()
    nonshelling = [j for j in order if len(minimal_new_faces(c, order, j)) > 1]
    for j in nonshelling:
        if j in assigned:
            continue
        mins = minimal_new_faces(c, order, j)
        varying = frozenset().union(*mins) - frozenset.intersection(*mins)
        groups = [g for g in similar_groups(c.facets[j].tree, d) if varying <= g.link_ranks(d)]
        if not groups:
            res = PartitioningResult(n, assignment, provenance, False,
                                     {"reason": "non-shelling step without a similar-block group",
                                      "facet": j, "minimal_new_faces": [sorted(x) for x in mins]})
            _CACHE[key] = res
            return res
        g = max(groups, key=lambda x: (x.size * x.m, -x.created))
        lr = g.link_ranks(d)
        outside = sum(1 << (r - 1) for r in range(1, d + 1) if r not in lr)
        cell = int(c.table[j, outside])
        members = [i for i in order if int(c.table[i, outside]) == cell]
        fam = {"facet": j, "members": members, "shape": g.shape(), "link_ranks": sorted(lr)}
        families.append(fam)
        if link_rule == "search":
            lk = link_of(c, j, to_colors(outside))
            found = partitioning_exists(lk)
            if found is None:
                fam["search"] = "no partitioning of the link"
                continue
            pos = {id(f): i for i, f in enumerate(lk.facets)}
            for i in members:
                ext = assignment[i] - lr
                g_link = frozenset(lk.labels[x - 1] for x in found[pos[id(c.facets[i])]])
                assignment[i] = ext | g_link
                provenance[i] = {"rule": "link-search", "family": len(families) - 1}
                assigned.add(i)
            continue
        for i in members:
            gs = [x for x in similar_groups(c.facets[i].tree, d) if x.shape() == g.shape()]
            if not gs:
                fam["stray"] = fam.get("stray", []) + [i]
                continue
            gi = gs[0]
            g_link, swapped = group_minimal_face(gi, _restricted_faces(c.facets[i].tree, gi), d)
            assignment[i] = (assignment[i] - lr) | g_link
            provenance[i] = {"rule": "link", "family": len(families) - 1, "block_size": gi.size,
                             "m": gi.m, "twins": gi.twins, "swapped": swapped,
                             "steps": [list(s) for s in gi.steps]}
            assigned.add(i)
    verdict = verify_partitioning(c, assignment)
    counter = None
    if not verdict.passed:
        counter = {"reason": "cell not covered exactly once", "support": sorted(verdict.witness),
                   "facet": verdict.witness_facet, "covering": verdict.covering}
    h = flag_h(c)
    hist: dict = {}
    for g in assignment:
        hist[frozenset(g)] = hist.get(frozenset(g), 0) + 1
    matches = all(hist.get(s, 0) == v for s, v in h.items()) and set(hist) <= set(h)
    res = PartitioningResult(n, assignment, provenance, verdict.passed, counter, matches, families)
    _CACHE[key] = res
    return res
