"""Lazy generation of parity-check rows.

Row ``(t, a)`` of the parity-check matrix is never stored. Its support does
not depend on ``t``: each entry is ``(node j, column b, mult, point)`` with
coefficient ``mult * point**(t-1)``, where ``mult`` is 1 or tau. Blocks of rows
are generated together as flat numpy arrays.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from ..gf import FieldElement
from .params import CodeParams


class RowEntries(NamedTuple):
    row: np.ndarray  # position within the requested block of rows
    node: np.ndarray  # 1-based node index
    col: np.ndarray  # coordinate b inside the node
    mult: np.ndarray  # 1 or tau
    pid: np.ndarray  # evaluation point id

    def coef(self, params: CodeParams, t: int) -> np.ndarray:
        return self.mult * params.powers[t - 1][self.pid] % params.p

    def take(self, mask) -> RowEntries:
        return RowEntries(*(arr[mask] for arr in self))

    def __len__(self):
        return self.row.shape[0]


def coeff_f(params: CodeParams, x: int, v: int) -> FieldElement:
    """Multiplier on a group-digit substitution: 1 when ``x < v``, tau when ``x > v``."""
    if x == v:
        raise ValueError("coeff_f is undefined on the diagonal (x == v)")
    return params.field(1 if x < v else params.tau)


def coeff_chi(params: CodeParams, a: int, rho: int, j: int) -> int:
    if not params.g < rho <= params.m:
        raise ValueError(f"rho={rho} is not a pair digit")
    om0, om1 = params.pairmap.omega(j)
    d = params.space.digit(a, rho)
    return int((rho in om0 and d == 0) or (rho in om1 and d == 1))


def _check_disjoint_rules(params: CodeParams):
    # the substitution families of one node touch pairwise different digits,
    # so their columns cannot collide with each other or with the diagonal
    pm = params.pairmap
    for j in range(1, params.n + 1):
        om0, om1 = pm.omega(j)
        grp = pm.group_of(j)
        used = [grp[0]] if grp else []
        used += list(om0) + list(om1)
        if len(set(used)) != len(used):
            raise AssertionError(f"substitution digits of node {j} overlap: {sorted(used)}")


def row_structure(params: CodeParams, a) -> RowEntries:
    """Support of rows ``a`` (any ``t``) for every node."""
    _check_disjoint_rules(params)
    a = np.asarray(a, dtype=np.int64).ravel()
    sp, pm = params.space, params.pairmap
    r, tau = params.r, params.tau
    rows = np.arange(a.size, dtype=np.int64)
    parts = []

    def emit(sel_rows, j, cols, mult, pid):
        k = sel_rows.size
        if k:
            parts.append((sel_rows, np.full(k, j), cols, np.full(k, mult), np.full(k, pid)))

    for j in range(1, params.n + 1):
        emit(rows, j, a, 1, params.lambda_id(j))
        grp = pm.group_of(j)
        if grp is not None:
            u, v = grp
            sel = rows[sp.digits_of(a, u) == v]
            for vp in range(r):
                if vp != v:
                    emit(sel, j, sp.substitute_array(a[sel], u, vp),
                         tau if vp < v else 1, params.lambda_id(pm.node(u, vp)))
        om0, om1 = pm.omega(j)
        for digit_val, omega in ((0, om0), (1, om1)):
            for rho in sorted(omega):
                sel = rows[sp.digits_of(a, rho) == digit_val]
                for w in range(2, r):
                    emit(sel, j, sp.substitute_array(a[sel], rho, w), 1, params.gamma_id(w - 1))
    if not parts:
        empty = np.zeros(0, dtype=np.int64)
        return RowEntries(empty, empty, empty, empty, empty)
    cols = [np.concatenate([p[i] for p in parts]).astype(np.int64) for i in range(5)]
    return RowEntries(*cols)


def parity_row(params: CodeParams, t: int, a: int) -> list[tuple[int, int, FieldElement]]:
    """Sparse row ``(t, a)``: sorted ``(node, column, coefficient)`` triples."""
    if not 1 <= t <= params.r:
        raise ValueError(f"t={t} outside [1, {params.r}]")
    if not 0 <= a < params.ell:
        raise ValueError(f"row {a} outside [0, {params.ell})")
    ent = row_structure(params, [a])
    coef = ent.coef(params, t)
    seen = {}
    for j, b, c in zip(ent.node.tolist(), ent.col.tolist(), coef.tolist()):
        if (j, b) in seen:
            raise AssertionError(f"generation rules collide at node {j}, column {b}")
        seen[(j, b)] = params.field(c)
    return sorted((j, b, c) for (j, b), c in seen.items())


def row_block_matrix(params: CodeParams, a: np.ndarray, t: int, ent: RowEntries | None = None):
    """CSR matrix of rows ``(t, a)`` against flattened columns ``(j-1)*ell + b``."""
    from scipy.sparse import csr_matrix

    if ent is None:
        ent = row_structure(params, a)
    return csr_matrix(
        (ent.coef(params, t), (ent.row, (ent.node - 1) * params.ell + ent.col)),
        shape=(len(a), params.n * params.ell),
        dtype=np.int64,
    )
