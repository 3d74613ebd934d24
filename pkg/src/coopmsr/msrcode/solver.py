"""Exact sparse elimination for the erased columns of the parity-check matrix.

Rows ``(t, a)`` for fixed ``a`` form row block ``a``; the erased symbols
``c_{e, b}`` for fixed ``b`` form unknown block ``b``. Every row block holds
the diagonal entries of all erased nodes, so pairing row block ``a`` with
unknown block ``a`` is a perfect block matching. Strongly connected components
of the block dependency graph then give a block-triangular form: each
component is a small dense system, solved after the components it refers to.
The whole restricted matrix has full column rank iff every diagonal block does.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from ..gf import SingularMatrixError, left_inverse
from .params import CodeParams
from .rows import row_structure

CHUNK = 1 << 15


@dataclass
class _Group:
    eq_ids: np.ndarray  # (N, s*r)
    unk_ids: np.ndarray  # (N, s*e)
    left_inv: np.ndarray  # (s*e, s*r)


@dataclass
class _Level:
    rows: np.ndarray
    matrix: csr_matrix  # the restricted matrix sliced to ``rows``
    groups: list = field(default_factory=list)


@dataclass
class ErasurePlan:
    params: CodeParams
    erased: tuple[int, ...]
    singular: list  # component member lists whose block is rank deficient
    levels: list
    n_components: int
    largest_component: int

    @property
    def invertible(self) -> bool:
        return not self.singular

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        """Unknowns (ell*e, B) from right-hand side (r*ell, B), both block-major."""
        if self.singular:
            raise SingularMatrixError(
                f"erasure pattern {self.erased} is not decodable", -1
            )
        p = self.params.p
        x = np.zeros((len(self.erased) * self.params.ell, rhs.shape[1]), dtype=np.int64)
        for level in self.levels:
            local = (rhs[level.rows] - level.matrix @ x) % p
            offset = 0
            for grp in level.groups:
                n_blocks, width = grp.eq_ids.shape
                chunk = local[offset:offset + n_blocks * width].reshape(n_blocks, width, -1)
                offset += n_blocks * width
                sol = np.einsum("ij,njb->nib", grp.left_inv, chunk) % p
                x[grp.unk_ids.ravel()] = sol.reshape(-1, rhs.shape[1])
        return x


def build_plan(params: CodeParams, erased) -> ErasurePlan:
    erased = tuple(sorted(set(int(j) for j in erased)))
    if not erased:
        raise ValueError("nothing erased")
    for j in erased:
        if not 1 <= j <= params.n:
            raise ValueError(f"node {j} outside [1, {params.n}]")
    n_e, r, ell, p = len(erased), params.r, params.ell, params.p
    lookup = np.full(params.n + 1, -1, dtype=np.int64)
    lookup[list(erased)] = np.arange(n_e)

    eq_parts, unk_parts, coef_parts, src_parts, dst_parts = [], [], [], [], []
    for start in range(0, ell, CHUNK):
        a = np.arange(start, min(ell, start + CHUNK), dtype=np.int64)
        ent = row_structure(params, a)
        ent = ent.take(lookup[ent.node] >= 0)
        blk = a[ent.row]
        unk = ent.col * n_e + lookup[ent.node]
        for t in range(1, r + 1):
            eq_parts.append(blk * r + (t - 1))
            unk_parts.append(unk)
            coef_parts.append(ent.coef(params, t))
        src_parts.append(blk)
        dst_parts.append(ent.col)
    eq = np.concatenate(eq_parts)
    unk = np.concatenate(unk_parts)
    coef = np.concatenate(coef_parts)
    src = np.concatenate(src_parts)
    dst = np.concatenate(dst_parts)
    A = csr_matrix((coef, (eq, unk)), shape=(r * ell, n_e * ell), dtype=np.int64)

    graph = csr_matrix((np.ones(src.size, dtype=np.int8), (src, dst)), shape=(ell, ell))
    n_comp, labels = connected_components(graph, directed=True, connection="strong")
    labels = labels.astype(np.int64)

    # longest dependency chain below each component
    cs, cd = labels[src], labels[dst]
    keep = cs != cd
    cs, cd = cs[keep], cd[keep]
    if cs.size:
        pairs = np.unique(cs * n_comp + cd)
        cs, cd = pairs // n_comp, pairs % n_comp
    level = np.zeros(n_comp, dtype=np.int64)
    while True:
        new = level.copy()
        np.maximum.at(new, cs, level[cd] + 1)
        if np.array_equal(new, level):
            break
        level = new

    sizes = np.bincount(labels, minlength=n_comp)
    order = np.lexsort((np.arange(ell), labels))
    starts = np.concatenate([[0], np.cumsum(sizes)[:-1]])
    pos = np.empty(ell, dtype=np.int64)
    pos[order] = np.arange(ell) - starts[labels[order]]
    members_sorted = order  # grouped by label, ascending block index

    # dense diagonal blocks, grouped by component size
    blk_of_eq, t_of_eq = eq // r, eq % r
    blk_of_unk, e_of_unk = unk // n_e, unk % n_e
    inside = labels[blk_of_eq] == labels[blk_of_unk]
    comp_of = labels[blk_of_eq[inside]]
    lrow = pos[blk_of_eq[inside]] * r + t_of_eq[inside]
    lcol = pos[blk_of_unk[inside]] * n_e + e_of_unk[inside]
    lval = coef[inside]

    singular = []
    groups_by_level: dict[int, list] = {}
    for s in np.unique(sizes):
        s = int(s)
        comps = np.nonzero(sizes == s)[0]
        slot = np.full(n_comp, -1, dtype=np.int64)
        slot[comps] = np.arange(comps.size)
        sel = slot[comp_of] >= 0
        mats = np.zeros((comps.size, s * r, s * n_e), dtype=np.int64)
        mats[slot[comp_of[sel]], lrow[sel], lcol[sel]] = lval[sel]
        uniq, which = np.unique(mats.reshape(comps.size, -1), axis=0, return_inverse=True)
        which = which.ravel()
        members = members_sorted[(starts[comps][:, None] + np.arange(s)[None, :])]
        inverses = []
        for mat in uniq:
            try:
                inverses.append(left_inverse(mat.reshape(s * r, s * n_e), params.field))
            except SingularMatrixError:
                inverses.append(None)
        for u, inv in enumerate(inverses):
            hit = which == u
            if inv is None:
                singular.extend(members[hit].tolist())
                continue
            for lev in np.unique(level[comps[hit]]):
                pick = hit & (level[comps] == lev)
                mem = members[pick]
                eq_ids = (mem[:, :, None] * r + np.arange(r)).reshape(mem.shape[0], -1)
                unk_ids = (mem[:, :, None] * n_e + np.arange(n_e)).reshape(mem.shape[0], -1)
                groups_by_level.setdefault(int(lev), []).append(_Group(eq_ids, unk_ids, inv))

    levels = []
    if not singular:
        for lev in sorted(groups_by_level):
            groups = groups_by_level[lev]
            rows = np.concatenate([g.eq_ids.ravel() for g in groups])
            levels.append(_Level(rows=rows, matrix=A[rows], groups=groups))
    return ErasurePlan(
        params=params,
        erased=erased,
        singular=singular,
        levels=levels,
        n_components=int(n_comp),
        largest_component=int(sizes.max()),
    )
