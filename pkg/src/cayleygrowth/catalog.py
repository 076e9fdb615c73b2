"""Named generator families of the symmetric group.

Every family is a function ``(n, **params) -> GeneratorSet``. Cycles are
written as in the literature, ``(a, b, c)`` sending ``a -> b -> c -> a``;
one-line images follow from :func:`cayleygrowth.perm.from_cycles`.
"""

from __future__ import annotations

from itertools import combinations
from typing import Callable

from .perm import GeneratorSet, Permutation, from_cycles, inverse


class UnknownFamilyError(KeyError):
    pass


class DefinitionPendingError(NotImplementedError):
    pass


def _cycle(n: int, *points: int) -> Permutation:
    return from_cycles([points], n)


def _need(n: int, minimum: int, family: str) -> None:
    if n < minimum:
        raise ValueError(f"{family} needs n >= {minimum}, got {n}")


def _with_inverses(gens: list[tuple[str, Permutation]]) -> list[tuple[str, Permutation]]:
    out = list(gens)
    present = {p for _, p in gens}
    for label, p in gens:
        q = inverse(p)
        if q not in present:
            out.append((label + "'", q))
            present.add(q)
    return out


def _make(name: str, n: int, gens: list[tuple[str, Permutation]], **params) -> GeneratorSet:
    return GeneratorSet(name, n, tuple(gens), params=params)


def _left_shift(n: int, lo: int = 0) -> Permutation:
    """Left cyclic shift of positions ``lo..n-1`` under the position action."""
    images = list(range(n))
    for i in range(lo, n):
        images[i] = i + 1 if i + 1 < n else lo
    return tuple(images)


def _transposition(n: int, i: int, j: int) -> Permutation:
    return _cycle(n, i, j)


def _reversal(n: int, i: int, j: int) -> Permutation:
    images = list(range(n))
    images[i : j + 1] = reversed(images[i : j + 1])
    return tuple(images)


def coxeter(n: int) -> GeneratorSet:
    _need(n, 2, "coxeter")
    return _make("coxeter", n, [(f"({i},{i + 1})", _transposition(n, i, i + 1)) for i in range(n - 1)])


def cyclic_coxeter(n: int) -> GeneratorSet:
    _need(n, 3, "cyclic_coxeter")
    gens = [(f"({i},{i + 1})", _transposition(n, i, i + 1)) for i in range(n - 1)]
    gens.append((f"(0,{n - 1})", _transposition(n, 0, n - 1)))
    return _make("cyclic_coxeter", n, gens)


def lx(n: int) -> GeneratorSet:
    _need(n, 2, "lx")
    return _make("lx", n, [("L", _left_shift(n)), ("X", _transposition(n, 0, 1))])


def lrx(n: int) -> GeneratorSet:
    _need(n, 2, "lrx")
    left = _left_shift(n)
    gens = [("L", left), ("X", _transposition(n, 0, 1))]
    if n > 2:
        gens.insert(1, ("R", inverse(left)))
    return _make("lrx", n, gens)


def larx(n: int, inverse_closed: bool = False) -> GeneratorSet:
    """Shift of positions ``1..n-1`` plus X; optionally with the shift's inverse."""
    _need(n, 3, "larx")
    gens = [("A", _left_shift(n, 1)), ("X", _transposition(n, 0, 1))]
    if inverse_closed and n > 3:
        gens.insert(1, ("A'", inverse(gens[0][1])))
    return _make("larx", n, gens, inverse_closed=inverse_closed)


def lsl(n: int, inverse_closed: bool = False) -> GeneratorSet:
    """Long shift (positions ``0..n-1``) and sub-long shift (positions ``1..n-1``)."""
    _need(n, 3, "lsl")
    gens = [("L", _left_shift(n)), ("S", _left_shift(n, 1))]
    if inverse_closed:
        gens = _with_inverses(gens)
    return _make("lsl", n, gens, inverse_closed=inverse_closed)


def pancake(n: int) -> GeneratorSet:
    _need(n, 2, "pancake")
    return _make("pancake", n, [(f"P{k}", _reversal(n, 0, k - 1)) for k in range(2, n + 1)])


def full_reversals(n: int) -> GeneratorSet:
    _need(n, 2, "full_reversals")
    gens = [(f"R[{i},{j}]", _reversal(n, i, j)) for i, j in combinations(range(n), 2)]
    return _make("full_reversals", n, gens)


def signed_reversals(n: int) -> GeneratorSet:
    """Signed reversals as position permutations of degree ``2n``.

    A signed sequence ``s`` is stored as ``t[2i] = code(s[i])`` and
    ``t[2i+1] = code(-s[i])`` with ``code(+v) = 2v`` and ``code(-v) = 2v+1``.
    Reversing the segment ``[i, j]`` and flipping its signs then moves entries
    of ``t`` only, so it is a plain position permutation.
    """
    _need(n, 1, "signed_reversals")
    gens = []
    for i in range(n):
        for j in range(i, n):
            images = list(range(2 * n))
            for k in range(i, j + 1):
                src = i + j - k
                images[2 * k] = 2 * src + 1
                images[2 * k + 1] = 2 * src
            gens.append((f"SR[{i},{j}]", tuple(images)))
    return _make("signed_reversals", 2 * n, gens, signed_degree=n)


def transposons(n: int) -> GeneratorSet:
    """Block transpositions: swap adjacent blocks ``[i, j)`` and ``[j, k)``."""
    _need(n, 2, "transposons")
    gens = []
    for i, j, k in combinations(range(n + 1), 3):
        images = list(range(n))
        images[i:k] = list(range(j, k)) + list(range(i, j))
        gens.append((f"T[{i},{j},{k}]", tuple(images)))
    return _make("transposons", n, gens)


def consecutive_k_cycles(n: int, k: int = 3, inverse_closed: bool = False) -> GeneratorSet:
    _need(n, max(k, 2), "consecutive_k_cycles")
    if k < 2:
        raise ValueError("cycle length k must be at least 2")
    gens = [(f"C{i}", _cycle(n, *range(i, i + k))) for i in range(n - k + 1)]
    if inverse_closed:
        gens = _with_inverses(gens)
    return _make("consecutive_k_cycles", n, gens, k=k, inverse_closed=inverse_closed)


def wrapped_k_cycles(n: int, k: int = 3, inverse_closed: bool = False) -> GeneratorSet:
    _need(n, max(k + 1, 3), "wrapped_k_cycles")
    gens = [(f"W{i}", _cycle(n, *((i + t) % n for t in range(k)))) for i in range(n)]
    if inverse_closed:
        gens = _with_inverses(gens)
    return _make("wrapped_k_cycles", n, gens, k=k, inverse_closed=inverse_closed)


def prefix_cycles(n: int) -> GeneratorSet:
    _need(n, 2, "prefix_cycles")
    return _make("prefix_cycles", n, [(f"Pc{i}", _cycle(n, *range(i + 1))) for i in range(1, n)])


def down_cycles(n: int) -> GeneratorSet:
    _need(n, 2, "down_cycles")
    gens = [(f"D[{i},{j}]", _cycle(n, *range(i, j + 1))) for i, j in combinations(range(n), 2)]
    return _make("down_cycles", n, gens)


def increasing_k_cycles(n: int, k: int = 3) -> GeneratorSet:
    _need(n, max(k, 2), "increasing_k_cycles")
    gens = [("I" + ",".join(map(str, c)), _cycle(n, *c)) for c in combinations(range(n), k)]
    return _make("increasing_k_cycles", n, gens, k=k)


def three_cycles(n: int) -> GeneratorSet:
    _need(n, 3, "three_cycles")
    gens = []
    for a, b, c in combinations(range(n), 3):
        gens.append((f"({a},{b},{c})", _cycle(n, a, b, c)))
        gens.append((f"({a},{c},{b})", _cycle(n, a, c, b)))
    return _make("three_cycles", n, gens)


def three_cycles_0ij(n: int) -> GeneratorSet:
    _need(n, 3, "three_cycles_0ij")
    gens = [
        (f"(0,{i},{j})", _cycle(n, 0, i, j))
        for i in range(1, n)
        for j in range(1, n)
        if i != j
    ]
    return _make("three_cycles_0ij", n, gens)


def star(n: int) -> GeneratorSet:
    _need(n, 2, "star")
    return _make("star", n, [(f"(0,{i})", _transposition(n, 0, i)) for i in range(1, n)])


def all_transpositions(n: int) -> GeneratorSet:
    _need(n, 2, "all_transpositions")
    gens = [(f"({i},{j})", _transposition(n, i, j)) for i, j in combinations(range(n), 2)]
    return _make("all_transpositions", n, gens)


def _pending(name: str) -> Callable[..., GeneratorSet]:
    def build(n: int, **params) -> GeneratorSet:
        raise DefinitionPendingError(f"{name}: definition pending")

    build.__name__ = name
    return build


FAMILIES: dict[str, Callable[..., GeneratorSet]] = {
    "coxeter": coxeter,
    "cyclic_coxeter": cyclic_coxeter,
    "lx": lx,
    "lrx": lrx,
    "larx": larx,
    "lsl": lsl,
    "pancake": pancake,
    "full_reversals": full_reversals,
    "signed_reversals": signed_reversals,
    "transposons": transposons,
    "consecutive_k_cycles": consecutive_k_cycles,
    "wrapped_k_cycles": wrapped_k_cycles,
    "prefix_cycles": prefix_cycles,
    "down_cycles": down_cycles,
    "increasing_k_cycles": increasing_k_cycles,
    "three_cycles": three_cycles,
    "three_cycles_0ij": three_cycles_0ij,
    "star": star,
    "all_transpositions": all_transpositions,
    "rapaport_m1": _pending("rapaport_m1"),
    "rapaport_m2": _pending("rapaport_m2"),
}
for _i in range(1, 8):
    FAMILIES[f"cubic_pancake_s{_i}"] = _pending(f"cubic_pancake_s{_i}")

PENDING = {name for name in FAMILIES if name.startswith(("rapaport", "cubic_pancake"))}


def catalog(name: str, n: int, **params) -> GeneratorSet:
    try:
        family = FAMILIES[name]
    except KeyError:
        raise UnknownFamilyError(f"unknown generator family: {name}") from None
    return family(n, **params)
