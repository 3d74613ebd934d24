"""r-ary digit arithmetic on coordinate indices ``a`` in ``[0, ell)``.

Digits are 1-based and little-endian: ``a = sum(a_i * r**(i-1))``. Positions
``1..g`` are the group digits, ``g+1..m`` the pair digits whose count of 0/1
values is the suffix weight.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

MAX_LOG2_ELL = 40


@dataclass(frozen=True)
class IndexSpace:
    r: int
    m: int
    g: int
    ell: int = field(init=False)

    def __post_init__(self):
        if self.r < 2:
            raise ValueError(f"radix must be >= 2, got {self.r}")
        if self.m < 1:
            raise ValueError(f"digit count must be >= 1, got {self.m}")
        if not 1 <= self.g <= self.m:
            raise ValueError(f"group boundary g={self.g} outside [1, {self.m}]")
        ell = 1
        for _ in range(self.m):
            ell *= self.r
            if ell > 2**MAX_LOG2_ELL:
                raise OverflowError(
                    f"ell = {self.r}^{self.m} exceeds 2^{MAX_LOG2_ELL}"
                )
        object.__setattr__(self, "ell", ell)

    def weight(self, i: int) -> int:
        """Place value ``r**(i-1)`` of digit ``i``."""
        self._check_pos(i)
        return self.r ** (i - 1)

    def _check_pos(self, i: int):
        if not 1 <= i <= self.m:
            raise ValueError(f"digit position {i} outside [1, {self.m}]")

    def _check_index(self, a: int):
        if not 0 <= a < self.ell:
            raise ValueError(f"index {a} outside [0, {self.ell})")

    def _check_digit(self, v: int):
        if not 0 <= v < self.r:
            raise ValueError(f"digit {v} outside [0, {self.r})")

    def expand(self, a: int) -> tuple[int, ...]:
        self._check_index(a)
        digits = []
        for _ in range(self.m):
            a, d = divmod(a, self.r)
            digits.append(d)
        return tuple(digits)

    def compress(self, digits: Iterable[int]) -> int:
        digits = list(digits)
        if len(digits) != self.m:
            raise ValueError(f"expected {self.m} digits, got {len(digits)}")
        a = 0
        for d in reversed(digits):
            self._check_digit(d)
            a = a * self.r + d
        return a

    def digit(self, a: int, i: int) -> int:
        self._check_index(a)
        return (a // self.weight(i)) % self.r

    def substitute(self, a: int, i: int, v: int) -> int:
        """``a(i, v)``: replace digit ``i`` of ``a`` by ``v``."""
        self._check_index(a)
        self._check_digit(v)
        w = self.weight(i)
        return a + (v - (a // w) % self.r) * w

    def axis_set(self, u: int, v: int) -> Iterator[int]:
        """Ascending indices whose digit ``u`` equals ``v``."""
        self._check_digit(v)
        w = self.weight(u)
        block = w * self.r
        for high in range(0, self.ell, block):
            start = high + v * w
            yield from range(start, start + w)

    def axis_array(self, u: int, v: int) -> np.ndarray:
        self._check_digit(v)
        w = self.weight(u)
        block = w * self.r
        high = np.arange(0, self.ell, block, dtype=np.int64)
        low = np.arange(w, dtype=np.int64)
        return (high[:, None] + v * w + low[None, :]).ravel()

    def suffix_weight(self, a: int) -> int:
        digits = self.expand(a)
        return sum(1 for d in digits[self.g:] if d <= 1)

    def match_count(self, a: int, pins: Iterable[tuple[int, int]]) -> int:
        pins = list(pins)
        positions = [u for u, _ in pins]
        if len(set(positions)) != len(positions):
            raise ValueError("pin positions must be distinct")
        return sum(1 for u, v in pins if self.digit(a, u) == v)

    def shell(self, s: int) -> Iterator[int]:
        """Indices with suffix weight ``s``, ascending."""
        for a in range(self.ell):
            if self.suffix_weight(a) == s:
                yield a

    # vectorised forms, used by the code and repair engines

    def digits_of(self, a: np.ndarray, i: int) -> np.ndarray:
        return (a // self.weight(i)) % self.r

    def substitute_array(self, a: np.ndarray, i: int, v) -> np.ndarray:
        w = self.weight(i)
        return a + (np.asarray(v, dtype=np.int64) - (a // w) % self.r) * w

    def suffix_weights(self, a: np.ndarray) -> np.ndarray:
        out = np.zeros(a.shape, dtype=np.int64)
        for i in range(self.g + 1, self.m + 1):
            out += self.digits_of(a, i) <= 1
        return out
