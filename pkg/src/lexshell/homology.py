"""Cellular homology over GF(2) for balanced boolean cell complexes."""

from __future__ import annotations

import numpy as np

from .complex import BalancedComplex, ComplexError


class BoundaryError(ComplexError):
    """The boundary of a boundary was nonzero: the key function is inconsistent."""


def _rank(rows: list) -> int:
    basis: dict = {}
    rank = 0
    for v in rows:
        while v:
            p = v.bit_length() - 1
            b = basis.get(p)
            if b is None:
                basis[p] = v
                rank += 1
                break
            v ^= b
    return rank


def cells_by_dimension(c: BalancedComplex) -> list:
    """Cell ids of dimension 0..d-1, each list sorted."""
    pc = np.array([bin(m).count("1") for m in c.cell_support.tolist()], dtype=np.int64)
    return [np.flatnonzero(pc == i + 1).tolist() for i in range(c.d)]


def boundary_rows(c: BalancedComplex, cells: list, faces: list) -> list:
    """Boundary of each cell as a bit set over the positions in ``faces``."""
    index = {cid: t for t, cid in enumerate(faces)}
    out = []
    for cid in cells:
        m = int(c.cell_support[cid])
        f = int(c.cell_facet[cid])
        v = 0
        for r in range(c.d):
            if m >> r & 1:
                v ^= 1 << index[int(c.table[f, m ^ (1 << r)])]
        out.append(v)
    return out


def betti_gf2(c: BalancedComplex, check: bool = True) -> list:
    """Unreduced Betti numbers beta_0..beta_{d-1} over GF(2); [] for d = 0."""
    if c.d == 0:
        return []
    dims = cells_by_dimension(c)
    bnd = [[0] * len(dims[0])]
    for p in range(1, c.d):
        bnd.append(boundary_rows(c, dims[p], dims[p - 1]))
    if check:
        for p in range(2, c.d):
            lower = bnd[p - 1]
            for v in bnd[p]:
                acc = 0
                t = 0
                while v:
                    if v & 1:
                        acc ^= lower[t]
                    v >>= 1
                    t += 1
                if acc:
                    raise BoundaryError(f"boundary of boundary nonzero in dimension {p}")
    ranks = [_rank(rows) for rows in bnd] + [0]
    return [len(dims[p]) - ranks[p] - ranks[p + 1] for p in range(c.d)]


def reduced_betti_gf2(c: BalancedComplex) -> list:
    """Reduced Betti numbers indexed from -1: entry 0 is beta~_{-1}."""
    if c.d == 0:
        return [1 if len(c) else 0]
    b = betti_gf2(c)
    nonempty = len(c) > 0
    return [0 if nonempty else 1, b[0] - 1 if nonempty else 0] + b[1:]


def euler_characteristic(c: BalancedComplex) -> int:
    return sum((-1) ** p * len(cells) for p, cells in enumerate(cells_by_dimension(c)))
