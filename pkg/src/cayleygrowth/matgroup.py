"""Matrix groups over Z/m: unitriangular, Heisenberg and abelian.

A unitriangular matrix is stored as its above-diagonal entries in row-major
order. Generators ``E + c*E[i, j]`` act by right multiplication, which adds
``c`` times column ``i`` to column ``j``; only the entries above row ``i``
and the entry ``(i, j)`` itself change.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .bfs import GrowthResult
from .graph import GraphDef, MixedRadix


@dataclass(frozen=True)
class RootChoice:
    roots: str = "fundamental"
    oriented: bool = False

    def __post_init__(self):
        if self.roots not in ("fundamental", "positive"):
            raise ValueError(f"roots must be 'fundamental' or 'positive', got {self.roots!r}")

    def pairs(self, n: int) -> list[tuple[int, int]]:
        if self.roots == "fundamental":
            return [(i, i + 1) for i in range(n - 1)]
        return list(combinations(range(n), 2))


FUNDAMENTAL = RootChoice("fundamental", False)
POSITIVE = RootChoice("positive", False)
FUNDAMENTAL_ORIENTED = RootChoice("fundamental", True)
POSITIVE_ORIENTED = RootChoice("positive", True)


def _entry_index(n: int) -> dict[tuple[int, int], int]:
    return {pair: k for k, pair in enumerate(combinations(range(n), 2))}


def _signed_inverse_index(moves: list[tuple], m: int) -> list[int | None]:
    """Index of ``(..., -c)`` for each move ``(..., c)``; self-inverse when ``m == 2``."""
    where = {mv: k for k, mv in enumerate(moves)}
    if m == 2:
        return list(range(len(moves)))
    return [where.get((*mv[:-1], -mv[-1])) for mv in moves]


class UnitriangularMoves:
    """Elementary generators of U(n, Z/m) acting on above-diagonal vectors."""

    def __init__(self, n: int, m: int, choice: RootChoice = FUNDAMENTAL):
        if n < 2 or m < 2:
            raise ValueError(f"need n >= 2 and m >= 2, got n={n}, m={m}")
        self.n, self.m, self.choice = n, m, choice
        self.index = _entry_index(n)
        signs = (1,) if choice.oriented or m == 2 else (1, -1)
        self.moves = [(i, j, c) for i, j in choice.pairs(n) for c in signs]
        self.labels = [f"E{'+' if c > 0 else '-'}E{i}{j}" if n <= 10 else
                       f"E{'+' if c > 0 else '-'}E[{i},{j}]" for i, j, c in self.moves]
        self.inverse_closed = not choice.oriented
        # entries (r, i) feeding (r, j) for each move
        self._updates = []
        for i, j, _ in self.moves:
            target = [self.index[(r, j)] for r in range(i)]
            source = [self.index[(r, i)] for r in range(i)]
            self._updates.append((np.array(target, dtype=np.intp), np.array(source, dtype=np.intp),
                                  self.index[(i, j)]))

    def __len__(self):
        return len(self.moves)

    def inverse_index(self) -> list[int | None]:
        return _signed_inverse_index(self.moves, self.m)

    def apply_batch(self, k: int, states: np.ndarray) -> np.ndarray:
        target, source, own = self._updates[k]
        c = self.moves[k][2]
        out = states.astype(np.int64)
        if len(target):
            out[:, target] += c * out[:, source]
        out[:, own] += c
        np.mod(out, self.m, out=out)
        return out.astype(states.dtype)


class HeisenbergMoves:
    """H_{2d+1}(Z/m) as ``(d+2)``-square unitriangular matrices.

    State layout is ``(a_1..a_d, b_1..b_d, c)``: ``a`` is the top row, ``b``
    the last column and ``c`` the corner. ``x_i`` adds 1 to ``a_i``; ``y_i``
    adds ``a_i`` to ``c`` and 1 to ``b_i``.
    """

    def __init__(self, d: int, m: int):
        if d < 1 or m < 2:
            raise ValueError(f"need d >= 1 and m >= 2, got d={d}, m={m}")
        self.d, self.m = d, m
        signs = (1,) if m == 2 else (1, -1)
        self.moves = [(kind, i, c) for kind in "xy" for i in range(d) for c in signs]
        self.labels = [f"{kind}{i + 1}{'' if c > 0 else chr(39)}" for kind, i, c in self.moves]
        self.inverse_closed = True

    def __len__(self):
        return len(self.moves)

    def inverse_index(self) -> list[int | None]:
        return _signed_inverse_index(self.moves, self.m)

    def apply_batch(self, k: int, states: np.ndarray) -> np.ndarray:
        kind, i, c = self.moves[k]
        d = self.d
        out = states.astype(np.int64)
        if kind == "x":
            out[:, i] += c
        else:
            out[:, 2 * d] += c * out[:, i]
            out[:, d + i] += c
        np.mod(out, self.m, out=out)
        return out.astype(states.dtype)


class AbelianMoves:
    """Unit steps ``±e_i`` on (Z/m)^n."""

    def __init__(self, n: int, m: int):
        if n < 1 or m < 2:
            raise ValueError(f"need n >= 1 and m >= 2, got n={n}, m={m}")
        self.n, self.m = n, m
        signs = (1,) if m == 2 else (1, -1)
        self.moves = [(i, c) for i in range(n) for c in signs]
        self.labels = [f"{'+' if c > 0 else '-'}e{i}" for i, c in self.moves]
        self.inverse_closed = True

    def __len__(self):
        return len(self.moves)

    def inverse_index(self) -> list[int | None]:
        return _signed_inverse_index(self.moves, self.m)

    def apply_batch(self, k: int, states: np.ndarray) -> np.ndarray:
        i, c = self.moves[k]
        out = states.astype(np.int64)
        out[:, i] = (out[:, i] + c) % self.m
        return out.astype(states.dtype)


def unitriangular_generators(n: int, m: int, choice: RootChoice = FUNDAMENTAL) -> UnitriangularMoves:
    return UnitriangularMoves(n, m, choice)


def heisenberg_generators(d: int, m: int) -> HeisenbergMoves:
    return HeisenbergMoves(d, m)


def unitriangular_graph(n: int, m: int, choice: RootChoice = FUNDAMENTAL) -> GraphDef:
    moves = UnitriangularMoves(n, m, choice)
    extra = (("n", n), ("m", m), ("roots", choice.roots), ("oriented", choice.oriented))
    space = MixedRadix((m,) * (n * (n - 1) // 2), "unitriangular", extra)
    return GraphDef(moves, space, space.start, choice.oriented, name=f"U({n},Z/{m})")


def heisenberg_graph(d: int, m: int) -> GraphDef:
    moves = HeisenbergMoves(d, m)
    space = MixedRadix((m,) * (2 * d + 1), "heisenberg", (("d", d), ("m", m)))
    return GraphDef(moves, space, space.start, False, name=f"H{2 * d + 1}(Z/{m})")


def abelian_graph(n: int, m: int) -> GraphDef:
    moves = AbelianMoves(n, m)
    space = MixedRadix((m,) * n, "abelian", (("n", n), ("m", m)))
    return GraphDef(moves, space, space.start, False, name=f"(Z/{m})^{n}")


def cyclic_profile(m: int) -> np.ndarray:
    """Number of residues mod ``m`` at each distance from 0."""
    profile = np.zeros(m // 2 + 1, dtype=np.int64)
    for x in range(m):
        profile[min(x, m - x)] += 1
    return profile


def abelian_growth(n: int, m: int) -> GrowthResult:
    """Growth of (Z/m)^n under ``±e_i``, by n-fold convolution."""
    if n < 1 or m < 1:
        raise ValueError(f"need n >= 1 and m >= 1, got n={n}, m={m}")
    base = cyclic_profile(m) if m > 1 else np.ones(1, dtype=np.int64)
    sizes = np.ones(1, dtype=np.int64)
    for _ in range(n):
        sizes = np.convolve(sizes, base)
    return GrowthResult(tuple(int(x) for x in sizes), engine="analytic")


def abelianization_bound(n: int, m: int) -> int:
    """Lower bound ``(n-1) * floor(m/2)`` on the fundamental undirected diameter."""
    return (n - 1) * (m // 2)
