"""The two (n, k, l = r) building-block MDS array codes.

Type-I repairs the node pair {1, 2}; Type-II repairs any pair inside the
first r nodes. Both are small enough to keep H dense: rows ``(t-1)*r + a``,
columns ``(j-1)*r + b``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

import numpy as np

from .gf import DEFAULT_PRIME, Field, left_inverse, solve_dense
from .msrcode.params import repair_bounds
from .repair import RepairTranscript

MAX_SUBSETS = 10**5


class UnsupportedPattern(ValueError):
    pass


@dataclass(frozen=True)
class BlockCodeSpec:
    kind: str  # "I" or "II"
    n: int
    k: int
    field: Field
    lambdas: tuple[int, ...]
    gammas: tuple[int, ...] = ()
    tau: int | None = None

    @property
    def r(self) -> int:
        return self.n - self.k

    @property
    def ell(self) -> int:
        return self.r


def make_block_spec(kind: str, n: int, k: int, p: int = DEFAULT_PRIME,
                    lambdas=None, gammas=None, tau=None) -> BlockCodeSpec:
    kind = {"I": "I", "1": "I", "TypeI": "I", "II": "II", "2": "II", "TypeII": "II"}.get(str(kind))
    if kind is None:
        raise ValueError("kind must be 'I' or 'II'")
    if not n > k >= 1 or n - k < 2:
        raise ValueError(f"need n > k >= 1 and r >= 2, got n={n}, k={k}")
    F = Field(p)
    r = n - k
    lambdas = tuple(range(1, n + 1)) if lambdas is None else tuple(int(x) % p for x in lambdas)
    if len(lambdas) != n or len(set(lambdas)) != n:
        raise ValueError(f"need {n} distinct lambdas")
    if kind == "I":
        gammas = tuple(n + w for w in range(1, r - 1)) if gammas is None else tuple(int(x) % p for x in gammas)
        if len(gammas) != r - 2:
            raise ValueError(f"Type-I needs {r - 2} gammas, got {len(gammas)}")
        if p <= n + r - 2 or len(set(lambdas + gammas)) != n + r - 2:
            raise ValueError("Type-I needs n + r - 2 distinct evaluation points")
        return BlockCodeSpec("I", n, k, F, lambdas, gammas, None)
    tau = p - 1 if tau is None else int(tau) % p
    if tau in (0, 1):
        raise ValueError("Type-II needs tau not in {0, 1}")
    if p <= n:
        raise ValueError("Type-II needs a field with more than n elements")
    return BlockCodeSpec("II", n, k, F, lambdas, (), tau)


def parity_matrix(spec: BlockCodeSpec) -> np.ndarray:
    F, r, n, ell = spec.field, spec.r, spec.n, spec.ell
    p = F.p
    H = np.zeros((r * ell, n * ell), dtype=np.int64)
    for t in range(1, r + 1):
        lam = [F.pow_int(x, t - 1) for x in spec.lambdas]
        for j in range(1, n + 1):
            for a in range(ell):
                H[(t - 1) * ell + a, (j - 1) * ell + a] = lam[j - 1]
        if spec.kind == "I":
            gam = [F.pow_int(x, t - 1) for x in spec.gammas]
            # node 1 row 0 and node 2 row 1 pick up the gamma columns 2..r-1
            for j, a in ((1, 0), (2, 1)):
                for w, g in enumerate(gam, start=1):
                    H[(t - 1) * ell + a, (j - 1) * ell + w + 1] = g
        else:
            for j in range(1, r + 1):
                a = j - 1
                for b in range(ell):
                    if b != a:
                        mult = spec.tau if b < a else 1
                        H[(t - 1) * ell + a, (j - 1) * ell + b] = mult * lam[b] % p
    return H


def _cols(spec: BlockCodeSpec, nodes) -> list[int]:
    return [(j - 1) * spec.ell + b for j in nodes for b in range(spec.ell)]


@dataclass
class BlockMDSVerdict:
    ok: bool
    subsets_checked: int
    failing_subset: tuple[int, ...] | None = None


def check_mds(spec: BlockCodeSpec) -> BlockMDSVerdict:
    total = comb(spec.n, spec.r)
    if total > MAX_SUBSETS:
        raise ValueError(f"{total} subsets exceeds the enumeration guard {MAX_SUBSETS}")
    H = parity_matrix(spec)
    for count, subset in enumerate(combinations(range(1, spec.n + 1), spec.r), 1):
        sub = H[:, _cols(spec, subset)]
        if spec.field.rank(sub) < sub.shape[1]:
            return BlockMDSVerdict(False, count, subset)
    return BlockMDSVerdict(True, total)


def erasure_decode(spec: BlockCodeSpec, codeword: np.ndarray, erased) -> np.ndarray:
    """Dense oracle: fill ``erased`` nodes of an (n, r) codeword from the rest."""
    erased = sorted(set(erased))
    if len(erased) > spec.r:
        raise ValueError("more erasures than the code can correct")
    p = spec.field.p
    H = parity_matrix(spec)
    c = np.array(codeword, dtype=np.int64) % p
    if not erased:
        return c
    known = [j for j in range(1, spec.n + 1) if j not in erased]
    rhs = -(H[:, _cols(spec, known)] @ c[[j - 1 for j in known]].reshape(-1)) % p
    x = left_inverse(H[:, _cols(spec, erased)], spec.field) @ rhs % p
    c[[j - 1 for j in erased]] = x.reshape(len(erased), spec.ell)
    if np.any(H @ c.reshape(-1) % p):
        raise AssertionError("decoded word fails the parity check")
    return c


def encode(spec: BlockCodeSpec, data: np.ndarray) -> np.ndarray:
    data = np.asarray(data, dtype=np.int64)
    if data.shape != (spec.k, spec.ell):
        raise ValueError(f"expected data of shape ({spec.k}, {spec.ell})")
    c = np.zeros((spec.n, spec.ell), dtype=np.int64)
    c[: spec.k] = data % spec.field.p
    return erasure_decode(spec, c, range(spec.k + 1, spec.n + 1))


def random_codeword(spec: BlockCodeSpec, rng: np.random.Generator) -> np.ndarray:
    return encode(spec, spec.field.random((spec.k, spec.ell), rng))


def _newcomer_solve(spec, H, c, row, unknown_cols, helpers):
    """Solve the r equations of row ``row`` for the given unknown column groups.

    ``unknown_cols`` lists, per unknown, the columns whose coefficient vector it
    carries (a bundle lists several columns with proportional coefficients).
    """
    p, r, ell = spec.field.p, spec.r, spec.ell
    eq = [(t - 1) * ell + row for t in range(1, r + 1)]
    helper_cols = [(j - 1) * ell + row for j in helpers]
    rhs = -(H[np.ix_(eq, helper_cols)] @ c[[j - 1 for j in helpers], row]) % p
    A = H[np.ix_(eq, [grp[0] for grp in unknown_cols])]
    return solve_dense(A, rhs, spec.field)


def _transcript(spec: BlockCodeSpec, pair, helpers, rows) -> RepairTranscript:
    tr = RepairTranscript(tuple(pair), {"case": f"type-{spec.kind}"}, spec.ell)
    b = repair_bounds(spec.n, spec.k, spec.ell)
    tr.bound_gamma, tr.bound_gamma_a = b["gamma"], b["gamma_a"]
    for h in helpers:
        tr.record_access(h, np.array(sorted(rows)))
        for newcomer, row in zip(pair, rows):
            tr.send(0, h, newcomer, "download", 1)
    return tr


def repair_type1(spec: BlockCodeSpec, codeword: np.ndarray):
    """Cooperative repair of nodes 1 and 2 of a Type-I codeword."""
    if spec.kind != "I":
        raise ValueError("spec is not a Type-I code")
    c = np.asarray(codeword, dtype=np.int64)
    H = parity_matrix(spec)
    r, ell = spec.r, spec.ell
    helpers = list(range(3, spec.n + 1))
    col = lambda j, b: (j - 1) * ell + b  # noqa: E731

    # node 1, row 0: c_{1,0}, c_{1,2..r-1}, c_{2,0}
    unk1 = [[col(1, 0)]] + [[col(1, b)] for b in range(2, r)] + [[col(2, 0)]]
    x1 = _newcomer_solve(spec, H, c, 0, unk1, helpers)
    # node 2, row 1: c_{1,1}, c_{2,1..r-1}
    unk2 = [[col(1, 1)]] + [[col(2, b)] for b in range(1, r)]
    x2 = _newcomer_solve(spec, H, c, 1, unk2, helpers)

    node1 = np.zeros(ell, dtype=np.int64)
    node2 = np.zeros(ell, dtype=np.int64)
    node1[0] = x1[0]
    node1[2:] = x1[1:r - 1]
    node2[1:] = x2[1:]
    tr = _transcript(spec, (1, 2), helpers, (0, 1))
    tr.rounds = 1
    node2[0] = x1[-1]
    tr.send(1, 1, 2, "collab", 1)
    node1[1] = x2[0]
    tr.send(1, 2, 1, "collab", 1)
    return node1, node2, tr


def repair_type2(spec: BlockCodeSpec, codeword: np.ndarray, j1: int, j2: int):
    """Cooperative repair of nodes ``j1 < j2 <= r`` of a Type-II codeword."""
    if spec.kind != "II":
        raise ValueError("spec is not a Type-II code")
    j1, j2 = min(j1, j2), max(j1, j2)
    if not (1 <= j1 < j2 <= spec.r):
        raise UnsupportedPattern(
            f"Type-II repairs pairs inside [1, {spec.r}] only, got ({j1}, {j2})"
        )
    c = np.asarray(codeword, dtype=np.int64)
    H = parity_matrix(spec)
    F, ell = spec.field, spec.ell
    p, tau = F.p, spec.tau
    a1, a2 = j1 - 1, j2 - 1
    helpers = [j for j in range(1, spec.n + 1) if j not in (j1, j2)]
    col = lambda j, b: (j - 1) * ell + b  # noqa: E731

    # row a1: c_{j1,b} for b != a2, and the bundle c_{j1,a2} + c_{j2,a1}
    others1 = [b for b in range(ell) if b != a2]
    unk1 = [[col(j1, b)] for b in others1] + [[col(j2, a1), col(j1, a2)]]
    x1 = _newcomer_solve(spec, H, c, a1, unk1, helpers)
    # row a2: c_{j2,b} for b != a1, and the bundle c_{j1,a2} + tau c_{j2,a1}
    others2 = [b for b in range(ell) if b != a1]
    unk2 = [[col(j2, b)] for b in others2] + [[col(j1, a2), col(j2, a1)]]
    x2 = _newcomer_solve(spec, H, c, a2, unk2, helpers)

    node1 = np.zeros(ell, dtype=np.int64)
    node2 = np.zeros(ell, dtype=np.int64)
    node1[others1] = x1[:-1]
    node2[others2] = x2[:-1]
    tr = _transcript(spec, (j1, j2), helpers, (a1, a2))
    tr.rounds = 1
    tr.send(1, j1, j2, "collab", 1)
    tr.send(1, j2, j1, "collab", 1)
    pair = solve_dense([[1, 1], [1, tau]], [x1[-1], x2[-1]], F)
    node1[a2], node2[a1] = int(pair[0]) % p, int(pair[1]) % p
    return node1, node2, tr
