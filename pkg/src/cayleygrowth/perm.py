"""Permutation arithmetic in zero-based one-line notation.

A permutation of degree ``n`` is a tuple ``p`` of the integers ``0..n-1``.
Composition follows ``compose(p, q)[i] == p[q[i]]`` (``q`` is applied first).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

Permutation = tuple[int, ...]

_CYCLE_RE = re.compile(r"\(([^()]*)\)")


def as_permutation(images: Iterable[int]) -> Permutation:
    """Validate ``images`` as a bijection on ``0..n-1`` and return it as a tuple."""
    p = tuple(int(x) for x in images)
    n = len(p)
    if n < 1:
        raise ValueError("permutation degree must be at least 1")
    if sorted(p) != list(range(n)):
        raise ValueError(f"not a permutation of 0..{n - 1}: {list(p)}")
    return p


def identity(n: int) -> Permutation:
    if n < 1:
        raise ValueError("permutation degree must be at least 1")
    return tuple(range(n))


def is_identity(p: Sequence[int]) -> bool:
    return all(i == x for i, x in enumerate(p))


def compose(p: Sequence[int], q: Sequence[int]) -> Permutation:
    """Return ``p∘q``, the map ``i -> p[q[i]]``."""
    if len(p) != len(q):
        raise ValueError(f"degree mismatch: {len(p)} != {len(q)}")
    return tuple(p[j] for j in q)


def inverse(p: Sequence[int]) -> Permutation:
    inv = [0] * len(p)
    for i, x in enumerate(p):
        inv[x] = i
    return tuple(inv)


def power(p: Sequence[int], k: int) -> Permutation:
    result = identity(len(p))
    base = tuple(p) if k >= 0 else inverse(p)
    for _ in range(abs(k)):
        result = compose(base, result)
    return result


def is_involution(p: Sequence[int]) -> bool:
    return all(p[p[i]] == i for i in range(len(p))) and not is_identity(p)


def cycles(p: Sequence[int], *, include_fixed: bool = False) -> list[tuple[int, ...]]:
    """Disjoint cycles of ``p``, each starting at its smallest element."""
    seen = [False] * len(p)
    out = []
    for start in range(len(p)):
        if seen[start]:
            continue
        cyc = []
        i = start
        while not seen[i]:
            seen[i] = True
            cyc.append(i)
            i = p[i]
        if len(cyc) > 1 or include_fixed:
            out.append(tuple(cyc))
    return out


def from_cycles(cycle_list: Iterable[Sequence[int]], n: int) -> Permutation:
    """Build a permutation from cycles applied left to right (first cycle first)."""
    result = identity(n)
    for cyc in cycle_list:
        cyc = [int(x) for x in cyc]
        if len(set(cyc)) != len(cyc):
            raise ValueError(f"repeated entry in cycle {tuple(cyc)}")
        for x in cyc:
            if not 0 <= x < n:
                raise ValueError(f"cycle entry {x} out of range for degree {n}")
        if len(cyc) < 2:
            continue
        step = list(range(n))
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            step[a] = b
        result = compose(tuple(step), result)
    return result


def _parse_cycle_body(body: str) -> list[int]:
    body = body.strip()
    if not body:
        return []
    if "," in body or " " in body:
        return [int(tok) for tok in re.split(r"[,\s]+", body) if tok]
    if not body.isdigit():
        raise ValueError(f"bad cycle entry: {body!r}")
    return [int(ch) for ch in body]


def parse_cycles(text: str, n: int) -> Permutation:
    """Parse cycle notation such as ``"(01)(23)"`` or ``"(0,9,10)"``.

    Compact cycles are read one digit per entry; a comma or space switches a
    cycle to multi-digit entries. Cycles need not be disjoint and are applied
    left to right.
    """
    stripped = _CYCLE_RE.sub("", text)
    if stripped.strip(" ,*·"):
        raise ValueError(f"unparseable cycle text: {text!r}")
    bodies = [_parse_cycle_body(m) for m in _CYCLE_RE.findall(text)]
    return from_cycles(bodies, n)


def format_cycles(p: Sequence[int]) -> str:
    """Canonical disjoint-cycle form, fixed points omitted; identity gives ``""``."""
    parts = []
    for cyc in cycles(p):
        if all(x < 10 for x in cyc):
            parts.append("(" + "".join(str(x) for x in cyc) + ")")
        else:
            parts.append("(" + ",".join(str(x) for x in cyc) + ")")
    return "".join(parts)


def cycle_type(p: Sequence[int]) -> tuple[int, ...]:
    """Cycle lengths (fixed points included) sorted in descending order."""
    return tuple(sorted((len(c) for c in cycles(p, include_fixed=True)), reverse=True))


def partitions(n: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    """Partitions of ``n`` in reverse lexicographic order, parts descending."""
    if largest is None:
        largest = n
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in partitions(n - first, first):
            yield (first,) + rest


def class_representative(parts: Sequence[int]) -> Permutation:
    """Permutation with the given cycle type, cycles laid out on consecutive points."""
    n = sum(parts)
    images = list(range(n))
    pos = 0
    for k in sorted(parts, reverse=True):
        for j in range(k):
            images[pos + j] = pos + (j + 1) % k
        pos += k
    return tuple(images)


def conjugacy_class_reps(n: int) -> list[Permutation]:
    if n > 20:
        raise ValueError("conjugacy class enumeration is limited to n <= 20")
    return [class_representative(parts) for parts in partitions(n)]


def class_size(parts: Sequence[int]) -> int:
    from collections import Counter
    from math import factorial

    n = sum(parts)
    denom = 1
    for k, mult in Counter(parts).items():
        denom *= k**mult * factorial(mult)
    return factorial(n) // denom


def random_permutation(n: int, rng: np.random.Generator) -> Permutation:
    return tuple(int(x) for x in rng.permutation(n))


def random_in_class(parts: Sequence[int], rng: np.random.Generator) -> Permutation:
    """Uniform sample from the conjugacy class with cycle type ``parts``."""
    rep = class_representative(parts)
    h = random_permutation(len(rep), rng)
    return conjugate(rep, h)


def conjugate(g: Sequence[int], h: Sequence[int]) -> Permutation:
    """Return ``h g h^-1``."""
    return compose(h, compose(g, inverse(h)))


@dataclass(frozen=True)
class GeneratorSet:
    """Named, labelled generators sharing one degree.

    ``declared_inverse_closed`` is computed from the generators when left as
    ``None``; an explicit ``True`` is checked.
    """

    name: str
    degree: int
    generators: tuple[tuple[str, Permutation], ...]
    declared_inverse_closed: bool | None = None
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        gens = tuple((str(label), as_permutation(p)) for label, p in self.generators)
        object.__setattr__(self, "generators", gens)
        labels = [label for label, _ in gens]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate generator labels in {self.name}: {labels}")
        for label, p in gens:
            if len(p) != self.degree:
                raise ValueError(f"generator {label} has degree {len(p)}, expected {self.degree}")
            if is_identity(p):
                raise ValueError(f"generator {label} is the identity")
        closed = self._is_closed()
        if self.declared_inverse_closed is None:
            object.__setattr__(self, "declared_inverse_closed", closed)
        elif self.declared_inverse_closed and not closed:
            raise ValueError(f"{self.name} declared inverse-closed but is not")

    def _is_closed(self) -> bool:
        perms = {p for _, p in self.generators}
        return all(inverse(p) in perms for p in perms)

    @property
    def labels(self) -> list[str]:
        return [label for label, _ in self.generators]

    @property
    def perms(self) -> list[Permutation]:
        return [p for _, p in self.generators]

    def __len__(self) -> int:
        return len(self.generators)

    def __getitem__(self, label: str) -> Permutation:
        for lab, p in self.generators:
            if lab == label:
                return p
        raise KeyError(label)

    def inverse_index(self) -> list[int | None]:
        """For each generator, the index of a generator equal to its inverse."""
        index = {}
        for i, p in enumerate(self.perms):
            index.setdefault(p, i)
        return [index.get(inverse(p)) for p in self.perms]

    def conjugated(self, h: Sequence[int]) -> "GeneratorSet":
        gens = tuple((label, conjugate(p, h)) for label, p in self.generators)
        return GeneratorSet(self.name + "^h", self.degree, gens)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "degree": self.degree,
            "generators": [{"label": label, "perm": list(p)} for label, p in self.generators],
            "inverse_closed": bool(self.declared_inverse_closed),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GeneratorSet":
        gens = tuple((g["label"], tuple(g["perm"])) for g in data["generators"])
        gs = cls(data["name"], int(data["degree"]), gens)
        if "inverse_closed" in data and bool(data["inverse_closed"]) != gs.declared_inverse_closed:
            raise ValueError(
                f"inverse_closed={data['inverse_closed']} disagrees with the generators"
            )
        return gs


def generator_set(name: str, perms: Sequence[Sequence[int]], labels: Sequence[str] | None = None,
                  **params) -> GeneratorSet:
    """Convenience constructor; labels default to canonical cycle notation."""
    perms = [as_permutation(p) for p in perms]
    if not perms:
        raise ValueError("a generator set needs at least one generator")
    if labels is None:
        labels = [format_cycles(p) for p in perms]
    return GeneratorSet(name, len(perms[0]), tuple(zip(labels, perms)), params=params)
