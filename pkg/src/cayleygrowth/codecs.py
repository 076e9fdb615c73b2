"""Ranking codecs: bijections between a state space and ``[0, capacity)``.

All batch methods take and return numpy arrays; the single-state ``rank`` /
``unrank`` wrappers validate their input.
"""

from __future__ import annotations

from math import comb, factorial, prod
from typing import Sequence

import numba
import numpy as np

MAX_CAPACITY = 2**63 - 1


class CodecError(ValueError):
    pass


@numba.njit(cache=True, nogil=True)
def _lehmer_rank(states, fact, out):
    count, n = states.shape
    for k in range(count):
        r = 0
        for i in range(n - 1):
            v = states[k, i]
            c = 0
            for j in range(i + 1, n):
                if states[k, j] < v:
                    c += 1
            r += c * fact[i]
        out[k] = r


@numba.njit(cache=True, nogil=True)
def _lehmer_unrank(ranks, fact, out):
    count, n = out.shape
    avail = np.empty(n, np.int64)
    for k in range(count):
        r = ranks[k]
        for i in range(n):
            avail[i] = i
        left = n
        for i in range(n):
            d = r // fact[i]
            r -= d * fact[i]
            out[k, i] = avail[d]
            for j in range(d, left - 1):
                avail[j] = avail[j + 1]
            left -= 1


@numba.njit(cache=True, nogil=True)
def _combinadic_rank(states, binom, out):
    # colex rank of the positions holding symbol 0
    count, n = states.shape
    for k in range(count):
        r = 0
        t = 0
        for i in range(n):
            if states[k, i] == 0:
                t += 1
                r += binom[i, t]
        out[k] = r


@numba.njit(cache=True, nogil=True)
def _combinadic_unrank(ranks, binom, zeros, out):
    count, n = out.shape
    for k in range(count):
        r = ranks[k]
        t = zeros
        for i in range(n - 1, -1, -1):
            if t > 0 and binom[i, t] <= r:
                out[k, i] = 0
                r -= binom[i, t]
                t -= 1
            elif t > 0 and i + 1 == t:
                out[k, i] = 0
                t -= 1
            else:
                out[k, i] = 1


def _binom_table(n: int) -> np.ndarray:
    table = np.zeros((n + 1, n + 2), dtype=np.int64)
    for i in range(n + 1):
        for t in range(n + 2):
            table[i, t] = comb(i, t)
    return table


class RankCodec:
    """Base class; subclasses implement the batch kernels."""

    kind: str = ""
    capacity: int = 0
    dim: int = 0
    dtype = np.int8

    def rank_batch(self, states: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def unrank_batch(self, ranks: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def is_valid(self, state: Sequence[int]) -> bool:
        raise NotImplementedError

    def rank(self, state: Sequence[int]) -> int:
        if not self.is_valid(state):
            raise CodecError(f"{self.kind}: invalid state {list(state)}")
        arr = np.asarray([state], dtype=self.dtype)
        return int(self.rank_batch(arr)[0])

    def unrank(self, r: int) -> tuple[int, ...]:
        r = int(r)
        if not 0 <= r < self.capacity:
            raise CodecError(f"{self.kind}: rank {r} outside [0, {self.capacity})")
        return tuple(int(x) for x in self.unrank_batch(np.asarray([r], dtype=np.int64))[0])

    def _check_capacity(self):
        if self.capacity > MAX_CAPACITY:
            raise CodecError(f"{self.kind}: capacity {self.capacity} exceeds 2^63")


class LehmerCodec(RankCodec):
    """Lexicographic rank of a permutation via its factorial-base digits."""

    kind = "lehmer"

    def __init__(self, n: int):
        self.n = self.dim = n
        self.capacity = factorial(n)
        self._check_capacity()
        self.fact = np.array([factorial(n - 1 - i) for i in range(n)], dtype=np.int64)
        self.dtype = np.int8 if n <= 127 else np.int16

    def rank_batch(self, states):
        out = np.empty(len(states), dtype=np.int64)
        _lehmer_rank(np.ascontiguousarray(states), self.fact, out)
        return out

    def unrank_batch(self, ranks):
        out = np.empty((len(ranks), self.n), dtype=self.dtype)
        _lehmer_unrank(np.ascontiguousarray(ranks, dtype=np.int64), self.fact, out)
        return out

    def is_valid(self, state):
        return len(state) == self.n and sorted(int(x) for x in state) == list(range(self.n))

    def __repr__(self):
        return f"LehmerCodec({self.n})"


class CombinadicCodec(RankCodec):
    """Binary vectors of length ``n`` with ``k`` ones; the sorted vector has rank 0."""

    kind = "combinadic"

    def __init__(self, n: int, k: int):
        if not 0 <= k <= n:
            raise CodecError(f"combinadic needs 0 <= k <= n, got n={n}, k={k}")
        self.n = self.dim = n
        self.k = k
        self.zeros = n - k
        self.capacity = comb(n, k)
        self._check_capacity()
        self.binom = _binom_table(n)

    def rank_batch(self, states):
        out = np.empty(len(states), dtype=np.int64)
        _combinadic_rank(np.ascontiguousarray(states), self.binom, out)
        return out

    def unrank_batch(self, ranks):
        out = np.empty((len(ranks), self.n), dtype=np.int8)
        _combinadic_unrank(np.ascontiguousarray(ranks, dtype=np.int64), self.binom, self.zeros, out)
        return out

    def is_valid(self, state):
        return (
            len(state) == self.n
            and all(int(x) in (0, 1) for x in state)
            and sum(int(x) for x in state) == self.k
        )

    def __repr__(self):
        return f"CombinadicCodec({self.n}, {self.k})"


class MixedRadixCodec(RankCodec):
    """Positional code, first coordinate most significant."""

    kind = "mixed_radix"

    def __init__(self, radices: Sequence[int]):
        radices = tuple(int(r) for r in radices)
        if not radices or any(r < 2 for r in radices):
            raise CodecError(f"radices must all be >= 2: {radices}")
        self.radices = radices
        self.dim = len(radices)
        self.capacity = prod(radices)
        self._check_capacity()
        place = [1] * self.dim
        for i in range(self.dim - 2, -1, -1):
            place[i] = place[i + 1] * radices[i + 1]
        self.place = np.array(place, dtype=np.int64)
        self.radix_arr = np.array(radices, dtype=np.int64)
        self.dtype = np.int8 if max(radices) <= 127 else np.int32

    def rank_batch(self, states):
        return np.asarray(states, dtype=np.int64) @ self.place

    def unrank_batch(self, ranks):
        ranks = np.asarray(ranks, dtype=np.int64)
        return ((ranks[:, None] // self.place) % self.radix_arr).astype(self.dtype)

    def is_valid(self, state):
        return len(state) == self.dim and all(0 <= int(x) < r for x, r in zip(state, self.radices))

    def __repr__(self):
        return f"MixedRadixCodec({list(self.radices)})"


class SignedLehmerCodec(RankCodec):
    """Signed permutations in the doubled encoding used by ``signed_reversals``.

    rank = lehmer(values) * 2^n + sign bits (bit ``i`` = sign of entry ``i``).
    """

    kind = "signed_lehmer"

    def __init__(self, n: int):
        self.n = n
        self.dim = 2 * n
        self.lehmer = LehmerCodec(n)
        self.capacity = factorial(n) * 2**n
        self._check_capacity()
        self.weights = (1 << np.arange(n, dtype=np.int64))

    def rank_batch(self, states):
        states = np.asarray(states)
        head = states[:, 0::2].astype(np.int64)
        values = (head >> 1).astype(np.int8)
        signs = head & 1
        return self.lehmer.rank_batch(values) * (1 << self.n) + signs @ self.weights

    def unrank_batch(self, ranks):
        ranks = np.asarray(ranks, dtype=np.int64)
        values = self.lehmer.unrank_batch(ranks >> self.n).astype(np.int16)
        signs = (ranks[:, None] >> np.arange(self.n)) & 1
        out = np.empty((len(ranks), self.dim), dtype=np.int16)
        out[:, 0::2] = 2 * values + signs
        out[:, 1::2] = 2 * values + (1 - signs)
        return out.astype(np.int8) if self.dim <= 127 else out

    def is_valid(self, state):
        if len(state) != self.dim:
            return False
        head = [int(x) for x in state[0::2]]
        tail = [int(x) for x in state[1::2]]
        return sorted(h >> 1 for h in head) == list(range(self.n)) and all(
            t == h ^ 1 for h, t in zip(head, tail)
        )

    def __repr__(self):
        return f"SignedLehmerCodec({self.n})"
