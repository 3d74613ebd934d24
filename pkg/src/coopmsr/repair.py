"""Two-phase cooperative repair of two failed nodes.

Intra-group pairs ``(i1, i2)`` in group ``u`` (digits ``v1 < v2``): newcomer
``i1`` uses parity rows ``A(u, v1)``, ``i2`` uses ``A(u, v2)``. Rows are
processed shell by shell (suffix weight ascending); after each shell the two
newcomers swap one bundled symbol per row and untangle the pairs with a 2x2
solve.

Cross-group pairs with digit ``rho``: ``i1`` uses ``A(rho, 0)``, ``i2`` uses
``A(rho, 1)``. Each newcomer solves its rows locally in dependency order, then
one collaboration round hands over the partner's symbols it recovered.

Helpers never compute: every downloaded symbol is a stored coordinate read
verbatim.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

import numpy as np
from scipy.sparse import csr_matrix

from .gf import SingularMatrixError, solve_dense
from .msrcode import CodeParams, repair_bounds, row_structure
from .msrcode.rows import RowEntries

COORD_LOG_LIMIT = 1 << 16


class RepairError(RuntimeError):
    """The protocol could not proceed; indicates a construction bug."""


@dataclass(frozen=True)
class RepairPlan:
    i1: int
    i2: int
    case: str  # "intra" or "cross"
    digit: int  # u (intra) or rho (cross)
    row_digits: tuple[int, int]  # digit values selecting the two row sets
    n_shells: int

    @property
    def failed(self) -> tuple[int, int]:
        return (self.i1, self.i2)

    def rows(self, params: CodeParams, which: int) -> np.ndarray:
        """Row set used by newcomer ``which`` (0 for i1, 1 for i2)."""
        return params.space.axis_array(self.digit, self.row_digits[which])

    def describe(self) -> dict:
        key = "u" if self.case == "intra" else "rho"
        out = {"case": self.case, key: self.digit}
        if self.case == "intra":
            out["v1"], out["v2"] = self.row_digits
        return out


def plan(params: CodeParams, i1: int, i2: int) -> RepairPlan:
    if i1 == i2:
        raise ValueError(f"the two failed nodes must differ, got ({i1}, {i2})")
    if not (1 <= i1 <= params.n and 1 <= i2 <= params.n):
        raise ValueError(f"nodes must lie in [1, {params.n}], got ({i1}, {i2})")
    i1, i2 = min(i1, i2), max(i1, i2)
    cls = params.pairmap.classify(i1, i2)
    if cls.intra:
        _, v1 = params.pairmap.group_of(i1)
        _, v2 = params.pairmap.group_of(i2)
        digits = (v1, v2)
    else:
        digits = (0, 1)
    return RepairPlan(i1, i2, cls.kind, cls.digit, digits, params.m - params.g + 1)


@dataclass
class Message:
    round: int
    src: int
    dst: int
    kind: str  # "download" or "collab"
    symbols: int

    def to_dict(self) -> dict:
        return {"round": self.round, "from": self.src, "to": self.dst,
                "kind": self.kind, "symbols": self.symbols}


@dataclass
class RepairTranscript:
    pair: tuple[int, int]
    case: dict
    ell: int
    per_helper_access: dict = field(default_factory=dict)  # helper -> count
    accessed: dict = field(default_factory=dict)  # helper -> set, small ell only
    messages: list = field(default_factory=list)
    rounds: int = 0
    fixpoint_passes: list = field(default_factory=list)
    bound_gamma: int = 0
    bound_gamma_a: int = 0

    def record_access(self, helper: int, coords: np.ndarray):
        self.per_helper_access[helper] = self.per_helper_access.get(helper, 0) + coords.size
        if self.ell <= COORD_LOG_LIMIT:
            self.accessed.setdefault(helper, set()).update(coords.tolist())

    def send(self, rnd: int, src: int, dst: int, kind: str, symbols: int):
        self.messages.append(Message(rnd, src, dst, kind, int(symbols)))

    @property
    def downloaded(self) -> int:
        return sum(m.symbols for m in self.messages if m.kind == "download")

    @property
    def collaborated(self) -> int:
        return sum(m.symbols for m in self.messages if m.kind == "collab")

    @property
    def gamma(self) -> int:
        return self.downloaded + self.collaborated

    @property
    def gamma_a(self) -> int:
        return sum(self.per_helper_access.values())

    def to_dict(self) -> dict:
        return {
            "pair": list(self.pair),
            "case": self.case,
            "per_helper_access": [
                {"helper": h, "accessed": c} for h, c in sorted(self.per_helper_access.items())
            ],
            "downloaded": self.downloaded,
            "collaborated": self.collaborated,
            "gamma": self.gamma,
            "gamma_a": self.gamma_a,
            "bound_gamma": self.bound_gamma,
            "bound_gamma_a": self.bound_gamma_a,
            "rounds": self.rounds,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


class HelperRead(NamedTuple):
    node: int
    index: np.ndarray  # sorted coordinates read
    values: np.ndarray  # (len(index), B)


def helper_read(codeword: np.ndarray, p: int, plan_: RepairPlan, params: CodeParams,
                transcript: RepairTranscript | None = None) -> HelperRead:
    """Read helper ``p``'s coordinates in the union of the plan's two row sets."""
    if p in plan_.failed:
        raise ValueError(f"node {p} is a failed node, not a helper")
    idx = np.union1d(plan_.rows(params, 0), plan_.rows(params, 1))
    vals = np.asarray(codeword)[p - 1][idx]
    if vals.ndim == 1:
        vals = vals[:, None]
    if transcript is not None:
        transcript.record_access(p, idx)
    return HelperRead(p, idx, vals)


class _View:
    """What one newcomer knows: values and a mask over (node, coordinate)."""

    def __init__(self, params: CodeParams, batch: int):
        self.vals = np.zeros((params.n, params.ell, batch), dtype=np.int64)
        self.mask = np.zeros((params.n, params.ell), dtype=bool)

    def put(self, node: int, idx: np.ndarray, vals: np.ndarray):
        self.vals[node - 1, idx] = vals
        self.mask[node - 1, idx] = True


class _Slot(NamedTuple):
    node: int
    pos: int | None  # digit substituted, None for the row index itself
    value: int
    slot: int
    weight: int  # component weight inside a bundled slot
    bundle: bool


def _solve_rows(params: CodeParams, view: _View, rows: np.ndarray, slots: list[_Slot],
                ent: RowEntries | None = None):
    """Solve the r equations of every row in ``rows`` for its r slot unknowns.

    Returns the slot values, shape (len(rows), r, B), and the entries used.
    Every referenced symbol outside the slots must already be known.
    """
    p, r, sp = params.p, params.r, params.space
    if ent is None:
        ent = row_structure(params, rows)
    a = rows[ent.row]
    slot_of = np.full(len(ent), -1, dtype=np.int64)
    weight_of = np.ones(len(ent), dtype=np.int64)
    for s in slots:
        target = a if s.pos is None else sp.substitute_array(a, s.pos, s.value)
        hit = (ent.node == s.node) & (ent.col == target)
        if np.any(slot_of[hit] >= 0):
            raise RepairError("slot rules overlap")
        slot_of[hit] = s.slot
        weight_of[hit] = s.weight
    known = slot_of < 0
    if not np.all(view.mask[ent.node[known] - 1, ent.col[known]]):
        raise RepairError("row references a symbol the newcomer has not obtained yet")

    n_rows, batch = rows.size, view.vals.shape[2]
    rhs = np.zeros((n_rows, r, batch), dtype=np.int64)
    mats = np.zeros((n_rows, r, r), dtype=np.int64)
    filled = np.zeros((n_rows, r), dtype=np.int64)
    kn_vals = view.vals[ent.node[known] - 1, ent.col[known]]
    sl = ~known
    inv_w = {int(w): pow(int(w), p - 2, p) for w in np.unique(weight_of[sl])}
    inv_w = np.vectorize(inv_w.__getitem__, otypes=[np.int64])(weight_of[sl]) if sl.any() else weight_of[sl]
    np.add.at(filled, (ent.row[sl], slot_of[sl]), 1)
    n_known = int(known.sum())
    for t in range(1, r + 1):
        coef = ent.coef(params, t)
        gather = csr_matrix((coef[known], (ent.row[known], np.arange(n_known))),
                            shape=(n_rows, n_known), dtype=np.int64)
        rhs[:, t - 1] = (-(gather @ kn_vals)) % p
        scaled = coef[sl] * inv_w % p
        mats[ent.row[sl], t - 1, slot_of[sl]] = scaled
        # bundle components must agree on the shared slot coefficient
        if not np.array_equal(mats[ent.row[sl], t - 1, slot_of[sl]], scaled):
            raise RepairError("bundled symbols carry inconsistent coefficients")
    if np.any(filled == 0):
        raise RepairError("some unknown slot does not occur in its row")

    out = np.empty((n_rows, r, batch), dtype=np.int64)
    uniq, which = np.unique(mats.reshape(n_rows, -1), axis=0, return_inverse=True)
    which = which.ravel()
    for u, mat in enumerate(uniq):
        hit = which == u
        try:
            inv = solve_dense(mat.reshape(r, r), np.eye(r, dtype=np.int64), params.field)
        except SingularMatrixError as exc:
            raise RepairError(f"local system is singular: {exc}") from exc
        out[hit] = np.einsum("ij,njb->nib", inv, rhs[hit]) % p
    return out, ent


def _store(view: _View, params: CodeParams, rows: np.ndarray, slots: list[_Slot], sol: np.ndarray):
    sp = params.space
    for s in slots:
        if s.bundle:
            continue
        cols = rows if s.pos is None else sp.substitute_array(rows, s.pos, s.value)
        view.put(s.node, cols, sol[:, s.slot])


def _download(params, codeword, plan_, transcript, views):
    helpers = [h for h in range(1, params.n + 1) if h not in plan_.failed]
    for h in helpers:
        read = helper_read(codeword, h, plan_, params, transcript)
        for which, newcomer in enumerate(plan_.failed):
            rows = plan_.rows(params, which)
            pos = np.searchsorted(read.index, rows)
            views[which].put(h, rows, read.values[pos])
            transcript.send(0, h, newcomer, "download", rows.size)


def repair_intra(params: CodeParams, plan_: RepairPlan, codeword: np.ndarray,
                 transcript: RepairTranscript | None = None):
    """Intra-group repair; returns ``(c_i1, c_i2, transcript)``."""
    if plan_.case != "intra":
        raise ValueError("plan is not an intra-group plan")
    transcript, c, batch, single = _prepare(params, plan_, codeword, transcript)
    p, sp, tau = params.p, params.space, params.tau
    i1, i2 = plan_.failed
    u = plan_.digit
    v1, v2 = plan_.row_digits
    views = (_View(params, batch), _View(params, batch))
    _download(params, c, plan_, transcript, views)

    slots1 = [_Slot(i1, u, v, v, 1, False) for v in range(params.r) if v != v2]
    slots1 += [_Slot(i1, u, v2, v2, 1, True), _Slot(i2, None, 0, v2, 1, True)]
    slots2 = [_Slot(i2, u, v, v, 1, False) for v in range(params.r) if v != v1]
    slots2 += [_Slot(i1, None, 0, v1, 1, True), _Slot(i2, u, v1, v1, tau, True)]

    rows1_all, rows2_all = plan_.rows(params, 0), plan_.rows(params, 1)
    shell1, shell2 = sp.suffix_weights(rows1_all), sp.suffix_weights(rows2_all)
    pair_mat = np.array([[1, 1], [1, tau]], dtype=np.int64)
    for s in range(plan_.n_shells):
        rows1 = rows1_all[shell1 == s]
        rows2 = rows2_all[shell2 == s]
        if rows1.size == 0 and rows2.size == 0:
            continue
        sol1, _ = _solve_rows(params, views[0], rows1, slots1)
        sol2, _ = _solve_rows(params, views[1], rows2, slots2)
        _store(views[0], params, rows1, slots1, sol1)
        _store(views[1], params, rows2, slots2, sol2)
        bundle1 = sol1[:, v2]  # c_{i1, a(u,v2)} + c_{i2, a},      a in A(u,v1)
        bundle2 = sol2[:, v1]  # c_{i1, a''} + tau c_{i2, a''(u,v1)}, a'' in A(u,v2)
        transcript.rounds += 1
        transcript.send(transcript.rounds, i1, i2, "collab", rows1.size)
        transcript.send(transcript.rounds, i2, i1, "collab", rows2.size)
        partner = sp.substitute_array(rows1, u, v2)
        order = np.searchsorted(rows2, partner)
        if not np.array_equal(rows2[order], partner):
            raise RepairError("shell row sets of the two newcomers do not pair up")
        rhs = np.stack([bundle1, bundle2[order]])  # (2, N, B)
        flat = solve_dense(pair_mat, rhs.reshape(2, -1), params.field)
        flat = flat.reshape(rhs.shape)
        c_i1_partner, c_i2_rows1 = flat[0], flat[1]
        for view in views:
            view.put(i1, partner, c_i1_partner)
            view.put(i2, rows1, c_i2_rows1)

    return _finish(params, plan_, views, transcript, single)


def repair_cross(params: CodeParams, plan_: RepairPlan, codeword: np.ndarray,
                 transcript: RepairTranscript | None = None):
    """Cross-group repair; returns ``(c_i1, c_i2, transcript)``."""
    if plan_.case != "cross":
        raise ValueError("plan is not a cross-group plan")
    transcript, c, batch, single = _prepare(params, plan_, codeword, transcript)
    i1, i2 = plan_.failed
    rho = plan_.digit
    views = (_View(params, batch), _View(params, batch))
    _download(params, c, plan_, transcript, views)

    slots1 = [_Slot(i1, None, 0, 0, 1, False), _Slot(i2, None, 0, 1, 1, False)]
    slots1 += [_Slot(i1, rho, w, w, 1, False) for w in range(2, params.r)]
    slots2 = [_Slot(i2, None, 0, 0, 1, False), _Slot(i1, None, 0, 1, 1, False)]
    slots2 += [_Slot(i2, rho, w, w, 1, False) for w in range(2, params.r)]

    for which, slots in ((0, slots1), (1, slots2)):
        passes = _fixpoint(params, views[which], plan_.rows(params, which), slots)
        transcript.fixpoint_passes.append(passes)

    # single collaboration round
    rows1, rows2 = plan_.rows(params, 0), plan_.rows(params, 1)
    transcript.rounds = 1
    transcript.send(1, i1, i2, "collab", rows1.size)
    transcript.send(1, i2, i1, "collab", rows2.size)
    views[1].put(i2, rows1, views[0].vals[i2 - 1, rows1])
    views[0].put(i1, rows2, views[1].vals[i1 - 1, rows2])
    return _finish(params, plan_, views, transcript, single)


def _fixpoint(params: CodeParams, view: _View, rows: np.ndarray, slots: list[_Slot]) -> int:
    """Solve every row once all its non-slot symbols are known; returns the pass count."""
    sp = params.space
    ent = row_structure(params, rows)
    a = rows[ent.row]
    is_slot = np.zeros(len(ent), dtype=bool)
    for s in slots:
        target = a if s.pos is None else sp.substitute_array(a, s.pos, s.value)
        is_slot |= (ent.node == s.node) & (ent.col == target)
    pending = np.ones(rows.size, dtype=bool)
    passes = 0
    while pending.any():
        passes += 1
        missing = ~is_slot & ~view.mask[ent.node - 1, ent.col]
        blocked = np.zeros(rows.size, dtype=bool)
        blocked[ent.row[missing]] = True
        ready = pending & ~blocked
        if not ready.any():
            raise RepairError(
                f"fixpoint stalled with {int(pending.sum())} unsolved rows after {passes} passes"
            )
        sel = rows[ready]
        sol, _ = _solve_rows(params, view, sel, slots)
        _store(view, params, sel, slots, sol)
        pending &= ~ready
    return passes


def _prepare(params, plan_, codeword, transcript):
    c = np.asarray(codeword, dtype=np.int64)
    single = c.ndim == 2
    if single:
        c = c[:, :, None]
    if c.shape[:2] != (params.n, params.ell):
        raise ValueError(f"codeword shape {c.shape} does not match ({params.n}, {params.ell})")
    if transcript is None:
        transcript = RepairTranscript(plan_.failed, plan_.describe(), params.ell)
    b = repair_bounds(params.n, params.k, params.ell)
    transcript.bound_gamma, transcript.bound_gamma_a = b["gamma"], b["gamma_a"]
    return transcript, c, c.shape[2], single


def _finish(params, plan_, views, transcript, single):
    out = []
    for which, node in enumerate(plan_.failed):
        if not views[which].mask[node - 1].all():
            raise RepairError(f"newcomer {node} ended with unrecovered symbols")
        vals = views[which].vals[node - 1]
        out.append(vals[:, 0] if single else vals)
    return out[0], out[1], transcript


def repair(params: CodeParams, codeword: np.ndarray, i1: int, i2: int):
    """Repair nodes ``i1`` and ``i2`` of ``codeword`` from the other n-2 nodes.

    The failed nodes' stored values are never read.
    """
    pl = plan(params, i1, i2)
    if pl.case == "intra":
        return repair_intra(params, pl, codeword)
    return repair_cross(params, pl, codeword)


@dataclass
class OptimalityVerdict:
    ok: bool
    gamma: int
    gamma_a: int
    bound_gamma: int
    bound_gamma_a: int
    verbatim_reads: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def check_optimal(transcript: RepairTranscript, params: CodeParams) -> OptimalityVerdict:
    """Exact equality with the cut-set bounds at d = n-2, h = 2."""
    d, h = params.n - 2, 2
    denom = d - params.k + h
    bound_gamma = Fraction((d + h - 1) * h * params.ell, denom)
    bound_gamma_a = Fraction(d * h * params.ell, denom)
    downloads: dict = {}
    for msg in transcript.messages:
        if msg.kind == "download":
            downloads[msg.src] = downloads.get(msg.src, 0) + msg.symbols
    # a helper sends each accessed coordinate exactly once, to one newcomer
    verbatim = downloads == transcript.per_helper_access
    ok = (
        transcript.gamma == bound_gamma
        and transcript.gamma_a == bound_gamma_a
        and verbatim
    )
    return OptimalityVerdict(ok, transcript.gamma, transcript.gamma_a,
                             int(bound_gamma), int(bound_gamma_a), verbatim)
