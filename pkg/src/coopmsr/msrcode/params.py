from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..gf import DEFAULT_PRIME, Field
from ..pairmap import PairMap, build as build_pairmap
from ..rindex import MAX_LOG2_ELL, IndexSpace

# sparse int64 products accumulate many p^2 terms; keep p^2 well below 2^63
MAX_PRIME = 1 << 24


@dataclass(frozen=True, eq=False)
class CodeParams:
    """Everything needed to regenerate the (n, k, r^m) code deterministically.

    Evaluation points are stored as plain residues. ``point_id`` numbering:
    lambda_j is ``j - 1``, gamma_w is ``n + w - 1``.
    """

    n: int
    k: int
    field: Field
    lambdas: tuple[int, ...]
    gammas: tuple[int, ...]
    tau: int
    pairmap: PairMap = field(repr=False)
    space: IndexSpace = field(repr=False)
    powers: np.ndarray = field(repr=False)

    @property
    def r(self) -> int:
        return self.n - self.k

    @property
    def m(self) -> int:
        return self.space.m

    @property
    def g(self) -> int:
        return self.space.g

    @property
    def ell(self) -> int:
        return self.space.ell

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def key(self) -> tuple:
        return (self.n, self.k, self.p, self.lambdas, self.gammas, self.tau)

    def __eq__(self, other):
        return isinstance(other, CodeParams) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def lambda_id(self, j: int) -> int:
        return j - 1

    def gamma_id(self, w: int) -> int:
        return self.n + w - 1

    @property
    def points(self) -> tuple[int, ...]:
        return self.lambdas + self.gammas

    def bounds(self) -> dict:
        return repair_bounds(self.n, self.k, self.ell)


def repair_bounds(n: int, k: int, ell: int, h: int = 2, d: int | None = None) -> dict:
    """Cut-set lower bounds on total bandwidth and total access."""
    d = n - h if d is None else d
    denom = d - k + h
    gamma = (d + h - 1) * h * ell
    gamma_a = d * h * ell
    if gamma % denom or gamma_a % denom:
        raise ValueError("bounds are not integral for these parameters")
    return {"gamma": gamma // denom, "gamma_a": gamma_a // denom}


def make_params(
    n: int,
    k: int,
    p: int = DEFAULT_PRIME,
    lambdas=None,
    gammas=None,
    tau: int | None = None,
) -> CodeParams:
    if not (n > k >= 1):
        raise ValueError(f"need n > k >= 1, got n={n}, k={k}")
    r = n - k
    if r < 2:
        raise ValueError(f"need r = n - k >= 2 for two-erasure repair, got r={r}")
    if p >= MAX_PRIME:
        raise ValueError(f"p={p} too large for exact int64 accumulation (limit 2^24)")
    F = Field(p)
    if p <= n + r - 2:
        raise ValueError(f"field too small: need p > n + r - 2 = {n + r - 2}, got p={p}")
    lambdas = tuple(range(1, n + 1)) if lambdas is None else tuple(int(x) % p for x in lambdas)
    gammas = tuple(n + w for w in range(1, r - 1)) if gammas is None else tuple(int(x) % p for x in gammas)
    tau = p - 1 if tau is None else int(tau) % p
    if len(lambdas) != n:
        raise ValueError(f"expected {n} lambdas, got {len(lambdas)}")
    if len(gammas) != r - 2:
        raise ValueError(f"expected {r - 2} gammas, got {len(gammas)}")
    if len(set(lambdas + gammas)) != n + r - 2:
        raise ValueError("lambdas and gammas must be pairwise distinct")
    if tau in (0, 1):
        raise ValueError("tau must differ from 0 and 1")
    pm = build_pairmap(n, r)
    if pm.m * math.log2(r) > MAX_LOG2_ELL:
        raise OverflowError(f"ell = {r}^{pm.m} exceeds the 2^{MAX_LOG2_ELL} guard")
    space = IndexSpace(r=r, m=pm.m, g=pm.g)
    pts = lambdas + gammas
    powers = np.array([[pow(x, t, p) for x in pts] for t in range(r)], dtype=np.int64)
    powers.setflags(write=False)
    return CodeParams(
        n=n, k=k, field=F, lambdas=lambdas, gammas=gammas, tau=tau,
        pairmap=pm, space=space, powers=powers,
    )
