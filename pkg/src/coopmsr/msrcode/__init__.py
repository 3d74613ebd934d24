"""The (n, k, r^m) cooperative MSR code: parity rows, encoding, decoding, MDS check."""

from __future__ import annotations

import os
from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .params import CodeParams, make_params, repair_bounds
from .rows import RowEntries, coeff_chi, coeff_f, parity_row, row_block_matrix, row_structure
from .solver import CHUNK, ErasurePlan, build_plan

__all__ = [
    "CodeParams",
    "ErasurePlan",
    "MDSVerdict",
    "RowEntries",
    "coeff_chi",
    "coeff_f",
    "encode",
    "erasure_decode",
    "make_params",
    "max_ell",
    "parity_row",
    "random_codeword",
    "repair_bounds",
    "row_block_matrix",
    "row_structure",
    "syndrome",
    "verify_mds",
]

DEFAULT_MAX_ELL = 8192

_plans: dict = {}


class BeyondMDSRadius(ValueError):
    pass


def max_ell(default: int = DEFAULT_MAX_ELL) -> int:
    """ell guard for brute-force checks, overridable via ``COOP_MSR_MAX_ELL``."""
    env = os.environ.get("COOP_MSR_MAX_ELL")
    return int(env) if env else default


def _batched(params: CodeParams, c: np.ndarray, nodes: int) -> tuple[np.ndarray, bool]:
    c = np.asarray(c, dtype=np.int64)
    if c.ndim not in (2, 3) or c.shape[0] != nodes or c.shape[1] != params.ell:
        raise ValueError(
            f"expected shape ({nodes}, {params.ell}[, batch]), got {c.shape}"
        )
    if c.ndim == 2:
        return c[:, :, None], True
    return c, False


def syndrome(params: CodeParams, codeword: np.ndarray) -> np.ndarray:
    """``H c`` as an array of shape ``(r, ell[, batch])``; row ``(t, a)`` at ``[t-1, a]``."""
    c, single = _batched(params, codeword, params.n)
    flat = c.reshape(params.n * params.ell, -1) % params.p
    out = np.empty((params.r, params.ell, flat.shape[1]), dtype=np.int64)
    for start in range(0, params.ell, CHUNK):
        a = np.arange(start, min(params.ell, start + CHUNK), dtype=np.int64)
        ent = row_structure(params, a)
        for t in range(1, params.r + 1):
            out[t - 1, a] = (row_block_matrix(params, a, t, ent) @ flat) % params.p
    return out[..., 0] if single else out


def plan_for(params: CodeParams, erased) -> ErasurePlan:
    key = (params.key, tuple(sorted(erased)))
    plan = _plans.get(key)
    if plan is None:
        plan = build_plan(params, erased)
        _plans[key] = plan
    return plan


def _complete(params: CodeParams, c: np.ndarray, erased: tuple[int, ...], cache: bool) -> np.ndarray:
    """Fill the erased nodes of batched codeword ``c`` (n, ell, B) in place."""
    plan = plan_for(params, erased) if cache else build_plan(params, erased)
    idx = [j - 1 for j in erased]
    c[idx] = 0
    rhs = (-syndrome(params, c)) % params.p
    rhs = rhs.transpose(1, 0, 2).reshape(params.ell * params.r, -1)
    x = plan.solve(rhs).reshape(params.ell, len(erased), -1)
    c[idx] = x.transpose(1, 0, 2)
    return c


def encode(params: CodeParams, data: np.ndarray) -> np.ndarray:
    """Systematic encoding: nodes 1..k carry ``data`` verbatim."""
    d, single = _batched(params, data, params.k)
    c = np.zeros((params.n, params.ell, d.shape[2]), dtype=np.int64)
    c[: params.k] = d % params.p
    _complete(params, c, tuple(range(params.k + 1, params.n + 1)), cache=True)
    return c[..., 0] if single else c


def erasure_decode(params: CodeParams, codeword: np.ndarray, erased, cache: bool = False) -> np.ndarray:
    """The unique completion of ``codeword`` given that nodes ``erased`` are lost.

    Values stored at erased nodes are ignored. The result is checked to have
    zero syndrome.
    """
    erased = tuple(sorted(set(int(j) for j in erased)))
    if len(erased) > params.r:
        raise BeyondMDSRadius(
            f"{len(erased)} erasures is beyond the MDS radius r={params.r}"
        )
    c, single = _batched(params, codeword, params.n)
    c = c.copy()
    if erased:
        _complete(params, c, erased, cache=cache)
        if np.any(syndrome(params, c)):
            raise AssertionError("decoded word fails the parity check")
    return c[..., 0] if single else c


def random_codeword(params: CodeParams, rng: np.random.Generator, batch: int | None = None) -> np.ndarray:
    shape = (params.k, params.ell) if batch is None else (params.k, params.ell, batch)
    return encode(params, params.field.random(shape, rng))


@dataclass
class MDSVerdict:
    ok: bool
    subsets_checked: int
    subsets_total: int
    failing_subset: tuple[int, ...] | None = None
    largest_block: int = 0

    def to_dict(self) -> dict:
        return {
            "mds": self.ok,
            "subsets_checked": self.subsets_checked,
            "subsets_total": self.subsets_total,
            "failing_subset": list(self.failing_subset) if self.failing_subset else None,
            "largest_block": self.largest_block,
        }


def verify_mds(params: CodeParams, limit: int | None = None) -> MDSVerdict:
    """Check that every set of r column blocks of H is invertible, exactly."""
    limit = max_ell() if limit is None else limit
    if params.ell > limit:
        raise ValueError(
            f"ell={params.ell} exceeds the brute-force guard {limit}; "
            "pick smaller (n, k) or raise COOP_MSR_MAX_ELL"
        )
    total = comb(params.n, params.r)
    largest = 0
    for count, subset in enumerate(combinations(range(1, params.n + 1), params.r), 1):
        plan = build_plan(params, subset)
        largest = max(largest, plan.largest_component)
        if not plan.invertible:
            return MDSVerdict(False, count, total, subset, largest)
    return MDSVerdict(True, total, total, None, largest)
