"""Max-diameter generator search, named two- and three-generator constructions,
and the support-graph pattern classifier."""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import combinations
from math import factorial
from typing import Sequence

import networkx as nx
import numba
import numpy as np

from .codecs import LehmerCodec
from .perm import (
    GeneratorSet,
    Permutation,
    class_size,
    conjugacy_class_reps,
    cycle_type,
    from_cycles,
    generator_set,
    inverse,
    is_identity,
    is_involution,
    partitions,
    random_in_class,
)

# ------------------------------------------------------------- constructions


def koltsov3(n: int, type: int = 2, k: int = 0, d: int = 1) -> GeneratorSet:
    """Three involutions: ``I`` on even pairs, ``K`` on odd pairs, and a short swap ``S``.

    Type 1 uses ``S = (k, k+d)``; type 2 uses ``S = (k, k+3)(k+1, k+2)``.
    """
    if type == 1:
        if d < 1 or not 0 <= k or k + d >= n:
            raise ValueError(f"koltsov3 type 1 needs 0 <= k and k+d < n, got k={k}, d={d}, n={n}")
        swap = [(k, k + d)]
    elif type == 2:
        if not 0 <= k or k + 3 >= n:
            raise ValueError(f"koltsov3 type 2 needs 0 <= k and k+3 < n, got k={k}, n={n}")
        swap = [(k, k + 3), (k + 1, k + 2)]
    else:
        raise ValueError(f"koltsov3 type must be 1 or 2, got {type}")
    if n < 3:
        raise ValueError("koltsov3 needs n >= 3")
    i_gen = from_cycles([(i, i + 1) for i in range(0, n - 1, 2)], n)
    k_gen = from_cycles([(i, i + 1) for i in range(1, n - 1, 2)], n)
    gens = (("I", i_gen), ("K", k_gen), ("S", from_cycles(swap, n)))
    return GeneratorSet(f"koltsov3_t{type}", n, gens, True,
                        params={"type": type, "k": k, **({"d": d} if type == 1 else {})})


def sheveleva2(n: int, k: int) -> GeneratorSet:
    """Two generators: an involution ``A`` and ``S``, which carries one 4-cycle.

    Transpositions ``(i, i+1)`` go alternately to the two generators, starting
    with ``(0, 1)``. When ``i`` reaches ``k-1`` the points ``k-1..k+2`` instead
    form the 4-cycle ``(k-1, k, k+2, k+1)``, which goes to the generator whose
    turn it is; alternation then resumes at ``i = k+2`` with the other one.
    The cycle order puts the two whiskers on opposite corners of the square.
    """
    if not 1 <= k <= n - 3:
        raise ValueError(f"sheveleva2 needs 1 <= k <= n-3, got k={k}, n={n}")
    parts: list[list[tuple[int, ...]]] = [[], []]
    turn, i = 0, 0
    while i < n - 1:
        if i == k - 1:
            parts[turn].append((k - 1, k, k + 2, k + 1))
            i = k + 2
        else:
            parts[turn].append((i, i + 1))
            i += 1
        turn ^= 1
    square = 0 if any(len(c) == 4 for c in parts[0]) else 1
    a_gen = from_cycles(parts[1 - square], n)
    s_gen = from_cycles(parts[square], n)
    return GeneratorSet("sheveleva2", n, (("A", a_gen), ("S", s_gen)), params={"k": k})


# ------------------------------------------------------------- support graph


@dataclass(frozen=True)
class SupportGraph:
    """Coloured support of a generator set: one edge per moved point pair."""

    n: int
    edges: tuple[tuple[int, int, str, bool], ...]  # (u, v, label, directed)
    labels: tuple[str, ...]

    def simple_graph(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from((u, v) for u, v, _, _ in self.edges)
        return g


def support_graph(gs: GeneratorSet) -> SupportGraph:
    edges = []
    for label, p in gs.generators:
        involution = is_involution(p)
        for i, j in enumerate(p):
            if i == j or (involution and j < i):
                continue
            edges.append((i, j, label, not involution))
    return SupportGraph(gs.degree, tuple(edges), tuple(gs.labels))


@dataclass(frozen=True)
class WhiskersReport:
    connected: bool
    unicyclic: bool
    cycle_length: int | None
    whisker_count: int
    is_square_with_whiskers: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def whiskers_classify(gs: GeneratorSet | SupportGraph) -> WhiskersReport:
    sg = gs if isinstance(gs, SupportGraph) else support_graph(gs)
    g = sg.simple_graph()
    g.remove_nodes_from([v for v in list(g) if g.degree(v) == 0])
    if g.number_of_nodes() == 0:
        return WhiskersReport(False, False, None, 0, False)
    connected = nx.is_connected(g)
    unicyclic = connected and g.number_of_edges() == g.number_of_nodes()
    cycle_length = None
    whiskers = 0
    if unicyclic:
        cycle = nx.cycle_basis(g)[0]
        cycle_length = len(cycle)
        on_cycle = set(cycle)
        whiskers = sum(1 for v in cycle for w in g[v] if w not in on_cycle)
    return WhiskersReport(connected, unicyclic, cycle_length, whiskers,
                          bool(unicyclic and cycle_length == 4))


def pattern_tag(gs: GeneratorSet) -> str:
    report = whiskers_classify(gs)
    if report.is_square_with_whiskers:
        return "square_with_whiskers"
    if report.unicyclic:
        return f"unicyclic_{report.cycle_length}"
    if report.connected:
        g = support_graph(gs).simple_graph()
        return "tree" if g.number_of_edges() < g.number_of_nodes() - nx.number_of_isolates(g) else "multicyclic"
    return "disconnected"


_PALETTE = ("red", "blue", "darkgreen", "orange", "purple", "brown", "magenta", "cyan", "gray", "black")


def dot_export(sg: SupportGraph | GeneratorSet, name: str = "support") -> str:
    """DOT text with one colour per generator; involution edges carry no arrowhead."""
    if isinstance(sg, GeneratorSet):
        sg = support_graph(sg)
    directed = any(d for *_, d in sg.edges)
    kind, arrow = ("digraph", "->") if directed else ("graph", "--")
    colour = {label: _PALETTE[i % len(_PALETTE)] for i, label in enumerate(sg.labels)}
    lines = [f'{kind} "{name}" {{']
    lines += [f"  {v};" for v in range(sg.n)]
    for u, v, label, d in sg.edges:
        attrs = f'color="{colour[label]}", label="{label}"'
        if directed and not d:
            attrs += ", dir=none"
        lines.append(f"  {u} {arrow} {v} [{attrs}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


# ------------------------------------------------------------- table BFS


@numba.njit(cache=True, nogil=True)
def _table_bfs(tables, start):
    """Layer sizes of BFS over precomputed successor tables ``tables[g, r]``."""
    count = tables.shape[1]
    dist = np.full(count, -1, np.int32)
    queue = np.empty(count, np.int64)
    dist[start] = 0
    queue[0] = start
    head, tail = 0, 1
    sizes = np.zeros(count + 1, np.int64)
    sizes[0] = 1
    depth = 0
    while head < tail:
        r = queue[head]
        head += 1
        dr = dist[r]
        for g in range(tables.shape[0]):
            nr = tables[g, r]
            if dist[nr] < 0:
                dist[nr] = dr + 1
                sizes[dr + 1] += 1
                depth = max(depth, dr + 1)
                queue[tail] = nr
                tail += 1
    return sizes[: depth + 1], dist


class PermTable:
    """All permutations of degree ``n`` in Lehmer order, for fast small-n BFS."""

    def __init__(self, n: int):
        if n > 9:
            raise ValueError("rank tables are limited to n <= 9")
        self.n = n
        self.codec = LehmerCodec(n)
        self.states = self.codec.unrank_batch(np.arange(factorial(n), dtype=np.int64))

    def successor(self, g: Sequence[int]) -> np.ndarray:
        return self.codec.rank_batch(self.states[:, np.asarray(g, dtype=np.intp)])

    def growth(self, perms: Sequence[Sequence[int]]) -> tuple[int, ...]:
        tables = np.stack([self.successor(p) for p in perms])
        sizes, _ = _table_bfs(tables, 0)
        return tuple(int(x) for x in sizes)

    def distances(self, perms: Sequence[Sequence[int]]) -> np.ndarray:
        tables = np.stack([self.successor(p) for p in perms])
        return _table_bfs(tables, 0)[1]


# ------------------------------------------------------------- search


@dataclass(frozen=True)
class SearchRecord:
    generators: GeneratorSet
    group_order: int
    diameter: int
    directed: bool
    pattern: str = ""
    seed_info: dict = field(default_factory=dict, compare=False)

    @property
    def key(self) -> tuple:
        return (-self.diameter, tuple(self.generators.perms))

    def has_involution(self) -> bool:
        return any(is_involution(p) for p in self.generators.perms)

    def to_dict(self) -> dict:
        return {
            "generators": self.generators.to_dict(),
            "group_order": self.group_order,
            "diameter": self.diameter,
            "directed": self.directed,
            "pattern": self.pattern,
            "seed_info": self.seed_info,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass
class SearchOutcome:
    records: list[SearchRecord]
    complete: bool
    evaluated: int

    @property
    def max_diameter(self) -> int | None:
        return self.records[0].diameter if self.records else None

    def maxima(self) -> list[SearchRecord]:
        top = self.max_diameter
        return [r for r in self.records if r.diameter == top]


def _evaluate(table: PermTable, perms: Sequence[Permutation], directed: bool, info: dict):
    n = table.n
    gs = generator_set("search", perms)
    sizes = table.growth(gs.perms)
    order = sum(sizes)
    if order not in (factorial(n), factorial(n) // 2):
        return None
    return SearchRecord(gs, order, len(sizes) - 1, directed, "", info)


def _canonical(perms) -> tuple:
    return tuple(sorted(set(perms)))


def _cubic_sets(first: Permutation, involutions: list, others: list) -> list[tuple]:
    """Inverse-closed three-element sets containing ``first``."""
    if is_involution(first):
        rest = [t for t in involutions if t != first]
        sets = [(first, g, inverse(g)) for g in others if g < inverse(g)]
        sets += [(first, s, t) for s, t in combinations(rest, 2)]
        return sets
    return [(first, inverse(first), t) for t in involutions]


def _candidates(n: int, directed: bool, mode: str, rng: np.random.Generator,
                per_class_cap: int, budget: int) -> list[tuple[tuple, dict]]:
    reps = [p for p in conjugacy_class_reps(n) if not is_identity(p)]
    out = []
    seen = set()

    def add(perms, info):
        key = _canonical(perms)
        if key not in seen:
            seen.add(key)
            out.append((key, info))

    if mode == "exhaustive":
        table = PermTable(n)
        everything = [tuple(int(x) for x in row) for row in table.states if not is_identity(row)]
        involutions = [p for p in everything if is_involution(p)]
        others = [p for p in everything if not is_involution(p)]
        for first in reps:
            info = {"class": list(cycle_type(first))}
            if directed:
                for second in everything:
                    if second != first:
                        add((first, second), info)
            else:
                for perms in _cubic_sets(first, involutions, others):
                    add(perms, info)
        return out
    total = factorial(n)
    classes = [parts for parts in partitions(n) if parts != (1,) * n]
    involution_classes = [parts for parts in classes if max(parts) == 2]
    per_first = max(1, budget // max(len(reps), 1))
    for first in reps:
        info = {"class": list(cycle_type(first))}
        pool = classes if directed or is_involution(first) else involution_classes
        for parts in pool:
            share = class_size(parts) * per_first / total
            for _ in range(min(per_class_cap, max(1, round(share)))):
                second = random_in_class(parts, rng)
                if second == first:
                    continue
                tagged = {**info, "second_class": list(parts)}
                if directed:
                    add((first, second), tagged)
                elif not is_involution(first):
                    add((first, inverse(first), second), tagged)
                elif not is_involution(second):
                    add((first, second, inverse(second)), tagged)
                else:
                    third = random_in_class(parts, rng)
                    if third not in (first, second):
                        add((first, second, third), tagged)
    return out


def max_diameter_search(n: int, directed: bool = False, mode: str = "exhaustive",
                        budget: int | None = None, pair_count: int = 2, seed: int = 0,
                        n_jobs: int = 1, keep: int = 50, per_class_cap: int = 64) -> SearchOutcome:
    """Search generator pairs for large Cayley-graph diameter.

    Directed runs search generator pairs. Undirected runs search
    inverse-closed sets of three elements (cubic Cayley graphs): an
    involution with ``g`` and ``g^-1``, or three involutions. The first
    generator runs over conjugacy-class representatives (conjugating every
    generator gives an isomorphic graph); the rest over every permutation
    (``exhaustive``) or seeded samples from each class (``random``).
    Non-generating sets are dropped by closure size. Records
    come back sorted by diameter, then generators; every record attaining the
    maximum is kept, plus the ``keep`` best overall.
    """
    if pair_count != 2:
        raise ValueError("only generator pairs are searched")
    if mode not in ("exhaustive", "random"):
        raise ValueError(f"mode must be 'exhaustive' or 'random', got {mode!r}")
    if mode == "exhaustive" and n > 7:
        raise ValueError("exhaustive search is limited to n <= 7")
    if n < 3 or n > 9:
        raise ValueError("search supports 3 <= n <= 9")
    rng = np.random.default_rng(seed)
    candidates = _candidates(n, directed, mode, rng, per_class_cap, budget or 10_000)
    complete = budget is None or len(candidates) <= budget
    if budget is not None:
        candidates = candidates[:budget]
    table = PermTable(n)

    def run(chunk):
        found = []
        for perms, info in chunk:
            if mode == "random":
                info = {**info, "seed": seed}
            rec = _evaluate(table, perms, directed, info)
            if rec is not None:
                found.append(rec)
        return found

    if n_jobs > 1:
        chunks = [candidates[i::n_jobs] for i in range(n_jobs)]
        with ThreadPoolExecutor(n_jobs) as pool:
            results = [r for part in pool.map(run, chunks) for r in part]
    else:
        results = run(candidates)
    ordered = sorted(results, key=lambda r: r.key)
    top = ordered[0].diameter if ordered else None
    kept = [r for i, r in enumerate(ordered) if i < keep or r.diameter == top]
    tagged = [SearchRecord(r.generators, r.group_order, r.diameter, r.directed,
                           pattern_tag(r.generators), r.seed_info) for r in kept]
    return SearchOutcome(tagged, complete, len(candidates))
