"""Graph definitions: a state space, a set of moves acting on it, a start state.

Permutation generators act on state vectors by position:
``apply(g, s)[i] == s[g[i]]``. On the full permutation space this is
``compose(s, g)``.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from math import factorial, prod
from typing import Sequence

import numpy as np

from .codecs import (
    CombinadicCodec,
    LehmerCodec,
    MixedRadixCodec,
    RankCodec,
    SignedLehmerCodec,
)
from .perm import GeneratorSet, inverse

State = tuple[int, ...]


def apply(g: Sequence[int], s: Sequence[int]) -> State:
    if len(g) != len(s):
        raise ValueError(f"length mismatch: generator {len(g)}, state {len(s)}")
    return tuple(s[i] for i in g)


def _small_dtype(max_value: int):
    if max_value <= 127:
        return np.int8
    if max_value <= 32767:
        return np.int16
    return np.int32


class StateSpace:
    """Base state space. ``key_radix`` bounds every coordinate (exclusive)."""

    kind = ""
    dim = 0
    key_radix = 2

    @property
    def start(self) -> State:
        raise NotImplementedError

    @property
    def dtype(self):
        return _small_dtype(self.key_radix - 1)

    def codec(self) -> RankCodec | None:
        return None

    def size(self) -> int | None:
        """Number of states in the space (an upper bound on any orbit)."""
        return None

    def contains(self, state: Sequence[int]) -> bool:
        return len(state) == self.dim

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class FullPermutation(StateSpace):
    n: int
    kind = "full_permutation"

    @property
    def dim(self):
        return self.n

    @property
    def key_radix(self):
        return self.n

    @property
    def start(self):
        return tuple(range(self.n))

    def codec(self):
        return LehmerCodec(self.n) if self.n <= 20 else None

    def size(self):
        return factorial(self.n)

    def contains(self, state):
        return sorted(state) == list(range(self.n))

    def to_dict(self):
        return {"kind": self.kind, "n": self.n}


@dataclass(frozen=True)
class CosetVector(StateSpace):
    """Rearrangements of a multiset: ``content[a]`` copies of symbol ``a``."""

    content: tuple[int, ...]
    kind = "coset_vector"

    def __post_init__(self):
        if any(c < 0 for c in self.content) or sum(self.content) < 1:
            raise ValueError(f"bad content vector {self.content}")

    @classmethod
    def binary(cls, n: int, zeros: int | None = None) -> "CosetVector":
        zeros = n // 2 if zeros is None else zeros
        return cls((zeros, n - zeros))

    @classmethod
    def from_state(cls, state: Sequence[int]) -> "CosetVector":
        counts = Counter(int(x) for x in state)
        return cls(tuple(counts.get(a, 0) for a in range(max(counts) + 1)))

    @property
    def dim(self):
        return sum(self.content)

    @property
    def key_radix(self):
        return max(len(self.content), 2)

    @property
    def start(self):
        return tuple(a for a, c in enumerate(self.content) for _ in range(c))

    def codec(self):
        if len(self.content) == 2:
            return CombinadicCodec(self.dim, self.content[1])
        if all(c == 1 for c in self.content):
            return LehmerCodec(self.dim) if self.dim <= 20 else None
        return None

    def size(self):
        total = factorial(self.dim)
        for c in self.content:
            total //= factorial(c)
        return total

    def contains(self, state):
        return Counter(int(x) for x in state) == Counter(self.start)

    def to_dict(self):
        return {"kind": self.kind, "content": list(self.content)}


@dataclass(frozen=True)
class SignedPermutation(StateSpace):
    """Signed permutations of ``n`` in the doubled encoding of length ``2n``."""

    n: int
    kind = "signed_permutation"

    @property
    def dim(self):
        return 2 * self.n

    @property
    def key_radix(self):
        return 2 * self.n

    @property
    def start(self):
        return tuple(range(2 * self.n))

    def codec(self):
        return SignedLehmerCodec(self.n)

    def size(self):
        return factorial(self.n) * 2**self.n

    def contains(self, state):
        return SignedLehmerCodec(self.n).is_valid(state)

    def to_dict(self):
        return {"kind": self.kind, "n": self.n}


@dataclass(frozen=True)
class MixedRadix(StateSpace):
    """Product of cyclic coordinates; used by matrix and abelian groups."""

    radices: tuple[int, ...]
    label: str = "mixed_radix"
    extra: tuple = ()
    kind = "mixed_radix"

    def __post_init__(self):
        if not self.radices or any(r < 2 for r in self.radices):
            raise ValueError(f"radices must all be >= 2: {self.radices}")

    @property
    def dim(self):
        return len(self.radices)

    @property
    def key_radix(self):
        return max(self.radices)

    @property
    def start(self):
        return (0,) * len(self.radices)

    def codec(self):
        return MixedRadixCodec(self.radices)

    def size(self):
        return prod(self.radices)

    def contains(self, state):
        return len(state) == self.dim and all(0 <= x < r for x, r in zip(state, self.radices))

    def to_dict(self):
        d = {"kind": self.label, "radices": list(self.radices)}
        d.update(dict(self.extra))
        return d


class PermutationMoves:
    """Adapter exposing a :class:`GeneratorSet` as batch moves on state arrays."""

    def __init__(self, gs: GeneratorSet):
        self.generator_set = gs
        self.labels = gs.labels
        self.perms = gs.perms
        self.index_arrays = [np.asarray(p, dtype=np.intp) for p in self.perms]
        self.inverse_index = gs.inverse_index()
        self.inverse_closed = bool(gs.declared_inverse_closed)
        self.degree = gs.degree

    def __len__(self):
        return len(self.labels)

    def apply_batch(self, k: int, states: np.ndarray) -> np.ndarray:
        return states[:, self.index_arrays[k]]

    def perm_matrix(self) -> np.ndarray:
        return np.asarray(self.perms, dtype=np.int64)


@dataclass(frozen=True)
class GraphDef:
    """A fully determined graph: moves, state space, start and directedness."""

    moves: object
    space: StateSpace
    start: State
    directed: bool
    name: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def labels(self) -> list[str]:
        return list(self.moves.labels)

    @property
    def generator_set(self) -> GeneratorSet | None:
        return getattr(self.moves, "generator_set", None)

    @property
    def is_permutation_graph(self) -> bool:
        return isinstance(self.moves, PermutationMoves)

    def apply_batch(self, k: int, states: np.ndarray) -> np.ndarray:
        return self.moves.apply_batch(k, states)

    def apply_label(self, label: str, state: Sequence[int]) -> State:
        k = self.labels.index(label)
        arr = np.asarray([state], dtype=self.space.dtype)
        return tuple(int(x) for x in self.apply_batch(k, arr)[0])

    def codec(self) -> RankCodec | None:
        return self.space.codec()

    def to_dict(self) -> dict:
        gs = self.generator_set
        d = gs.to_dict() if gs is not None else {"name": self.name, "moves": self.labels}
        d["space"] = self.space.to_dict()
        d["start"] = list(self.start)
        d["directed"] = self.directed
        return d


def inverse_closure(gs: GeneratorSet) -> GeneratorSet:
    """Add every missing inverse, labelled with a trailing apostrophe."""
    gens = list(gs.generators)
    present = {p for _, p in gens}
    labels = {label for label, _ in gens}
    for label, p in gs.generators:
        q = inverse(p)
        if q in present:
            continue
        new_label = label + "'"
        while new_label in labels:
            new_label += "'"
        gens.append((new_label, q))
        present.add(q)
        labels.add(new_label)
    name = gs.name if gs.declared_inverse_closed else gs.name + "+inv"
    return GeneratorSet(name, gs.degree, tuple(gens), True, params=dict(gs.params))


def make_graph(
    gs: GeneratorSet,
    coset: str | Sequence[int] | None = None,
    *,
    start: Sequence[int] | None = None,
    directed: bool | None = None,
) -> GraphDef:
    """Graph of ``gs`` on the full group, a binary coset, or the orbit of a vector.

    ``coset`` is ``None`` (full group), ``"binary"`` (``n//2`` zeros then
    ones) or an explicit central state.
    """
    n = gs.degree
    if coset is None:
        if "signed_degree" in gs.params:
            space: StateSpace = SignedPermutation(gs.params["signed_degree"])
        else:
            space = FullPermutation(n)
    elif isinstance(coset, str):
        if coset != "binary":
            raise ValueError(f"unknown coset kind {coset!r}")
        space = CosetVector.binary(n)
    else:
        space = CosetVector.from_state(coset)
        if start is None:
            start = tuple(int(x) for x in coset)
    start = tuple(space.start if start is None else (int(x) for x in start))
    if space.dim != n:
        raise ValueError(f"generator degree {n} does not match space dimension {space.dim}")
    if not space.contains(start):
        raise ValueError(f"start state {start} is not in the space")
    if directed is None:
        directed = not gs.declared_inverse_closed
    return GraphDef(PermutationMoves(gs), space, start, directed, name=gs.name)


def neighbors(graph: GraphDef, state: Sequence[int]) -> list[tuple[str, State]]:
    arr = np.asarray([state], dtype=graph.space.dtype)
    return [
        (label, tuple(int(x) for x in graph.apply_batch(k, arr)[0]))
        for k, label in enumerate(graph.labels)
    ]


def graph_from_dict(data: dict) -> GraphDef:
    """Inverse of :meth:`GraphDef.to_dict` for permutation-generated graphs."""
    gs = GeneratorSet.from_dict(data)
    space_d = data.get("space", {"kind": "full_permutation"})
    kind = space_d["kind"]
    start = data.get("start")
    if kind == "full_permutation":
        coset = None
    elif kind == "coset_vector":
        content = space_d["content"]
        if start is None:
            start = [a for a, c in enumerate(content) for _ in range(c)]
        coset = start
    elif kind == "signed_permutation":
        gs = GeneratorSet(gs.name, gs.degree, gs.generators, params={"signed_degree": space_d["n"]})
        coset = None
    else:
        raise ValueError(f"space kind {kind!r} is not permutation-generated")
    return make_graph(gs, coset, start=start, directed=data.get("directed"))

