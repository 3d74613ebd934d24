"""Partition of node pairs into intra-group classes and the cross-group class.

Nodes are 1-based. Group ``u`` (``1 <= u <= g``) holds nodes
``(u-1)r+1 .. ur``; every pair inside group ``u`` maps to digit ``u``. The
remaining pairs are enumerated ascending by ``(j', j)`` and mapped one-to-one
onto digits ``g+1 .. m``, which reproduces the published 7-node table.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import NamedTuple


class PairClass(NamedTuple):
    kind: str  # "intra" or "cross"
    digit: int  # u for intra-group pairs, rho for cross-group pairs

    @property
    def intra(self) -> bool:
        return self.kind == "intra"


def sub_packetization_exponent(n: int, r: int) -> int:
    return comb(n, 2) - (n // r) * (comb(r, 2) - 1)


@dataclass(frozen=True)
class PairMap:
    n: int
    r: int
    g: int
    m: int
    pi: dict  # (j, j') -> digit
    classes: tuple  # classes[i] = frozenset of pairs in P_i, i = 0..g
    omega0: tuple  # omega0[j-1] = frozenset of digits
    omega1: tuple

    def group_of(self, j: int) -> tuple[int, int] | None:
        """``(u, v)`` with ``j = (u-1)r + v + 1``, or None for tail nodes."""
        if not 1 <= j <= self.n:
            raise ValueError(f"node {j} outside [1, {self.n}]")
        if j > self.r * self.g:
            return None
        return (j - 1) // self.r + 1, (j - 1) % self.r

    def node(self, u: int, v: int) -> int:
        return (u - 1) * self.r + v + 1

    def classify(self, i1: int, i2: int) -> PairClass:
        if not (1 <= i1 < i2 <= self.n):
            raise ValueError(f"expected 1 <= i1 < i2 <= {self.n}, got ({i1}, {i2})")
        d = self.pi[(i1, i2)]
        return PairClass("intra" if d <= self.g else "cross", d)

    def omega(self, j: int) -> tuple[frozenset, frozenset]:
        if not 1 <= j <= self.n:
            raise ValueError(f"node {j} outside [1, {self.n}]")
        return self.omega0[j - 1], self.omega1[j - 1]

    def pair_of_digit(self, rho: int) -> tuple[int, int]:
        if not self.g < rho <= self.m:
            raise ValueError(f"digit {rho} is not a cross-group digit")
        for pair, d in self.pi.items():
            if d == rho:
                return pair
        raise AssertionError("pi is not onto the cross-group digits")

    def table(self) -> dict:
        """JSON-friendly view: one list of ``[j, j', pi]`` per pair class."""
        return {
            f"P{i}": sorted([j, jp, self.pi[(j, jp)]] for j, jp in self.classes[i])
            for i in range(self.g + 1)
        }


def build(n: int, r: int) -> PairMap:
    if r < 2:
        raise ValueError(f"r must be >= 2, got {r}")
    if n <= r:
        raise ValueError(f"need n > r, got n={n}, r={r}")
    g = n // r
    m = sub_packetization_exponent(n, r)
    pi = {}
    classes = [set() for _ in range(g + 1)]
    for u in range(1, g + 1):
        lo, hi = (u - 1) * r + 1, u * r
        for j in range(lo, hi + 1):
            for jp in range(j + 1, hi + 1):
                pi[(j, jp)] = u
                classes[u].add((j, jp))
    cross = sorted(
        ((j, jp) for jp in range(1, n + 1) for j in range(1, jp) if (j, jp) not in pi),
        key=lambda pair: (pair[1], pair[0]),
    )
    assert len(cross) == m - g
    for offset, pair in enumerate(cross):
        pi[pair] = g + 1 + offset
        classes[0].add(pair)
    omega0 = [set() for _ in range(n)]
    omega1 = [set() for _ in range(n)]
    for (j, jp) in classes[0]:
        omega0[j - 1].add(pi[(j, jp)])
        omega1[jp - 1].add(pi[(j, jp)])
    return PairMap(
        n=n,
        r=r,
        g=g,
        m=m,
        pi=pi,
        classes=tuple(frozenset(c) for c in classes),
        omega0=tuple(frozenset(s) for s in omega0),
        omega1=tuple(frozenset(s) for s in omega1),
    )
