"""Growth engines.

``growth_hash`` works on any state space: layers are numpy arrays of states,
deduplicated by exact integer (or byte) keys. ``growth_bitmask`` needs a rank
codec and keeps one bit per state per bitset: undirected runs rotate three
bitsets (previous, current, next layer), directed runs keep visited, current
and next.
"""

from __future__ import annotations

import os
from math import factorial
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numba
import numpy as np

from .codecs import CombinadicCodec, LehmerCodec, RankCodec
from .graph import FullPermutation, GraphDef, State

DEFAULT_MEMORY_BUDGET = 8 * 2**30
DEFAULT_ANTIPODES = 16


class MemoryBudgetExceeded(MemoryError):
    def __init__(self, message: str, depth: int):
        super().__init__(message)
        self.depth = depth


class EngineError(ValueError):
    pass


@dataclass(frozen=True)
class GrowthResult:
    layer_sizes: tuple[int, ...]
    antipodes: tuple[State, ...] = ()
    truncated: bool = False
    engine: str = ""
    target_depth: int | None = field(default=None, compare=False)

    @property
    def diameter(self) -> int:
        return len(self.layer_sizes) - 1

    @property
    def reachable(self) -> int:
        return int(sum(self.layer_sizes))

    @property
    def antipode_count(self) -> int:
        return self.layer_sizes[-1]

    def to_dict(self) -> dict:
        return {
            "layer_sizes": list(self.layer_sizes),
            "diameter": self.diameter,
            "reachable": self.reachable,
            "antipode_count": self.antipode_count,
            "antipodes": [list(s) for s in self.antipodes],
            "truncated": self.truncated,
            "engine": self.engine,
        }


class Antipodes(NamedTuple):
    states: list[State]
    count: int


class BitsetAllocator:
    """Hands out zeroed byte-backed bitsets and records the peak footprint."""

    def __init__(self):
        self.current = 0
        self.peak = 0

    def alloc(self, nbits: int) -> np.ndarray:
        arr = np.zeros((nbits + 7) // 8, dtype=np.uint8)
        self.current += arr.nbytes
        self.peak = max(self.peak, self.current)
        return arr

    def free(self, arr: np.ndarray) -> None:
        self.current -= arr.nbytes


# ---------------------------------------------------------------- hash engine


def _key_function(space, dim: int):
    radix = max(int(space.key_radix), 2)
    if radix**dim < 2**63:
        place = np.array([radix ** (dim - 1 - i) for i in range(dim)], dtype=np.int64)

        def keys(states):
            return states.astype(np.int64) @ place

        return keys

    def void_keys(states):
        arr = np.ascontiguousarray(states)
        return arr.view(np.dtype((np.void, arr.dtype.itemsize * dim))).ravel()

    return void_keys


def _member(sorted_keys: np.ndarray, query: np.ndarray) -> np.ndarray:
    if len(sorted_keys) == 0:
        return np.zeros(len(query), dtype=bool)
    pos = np.searchsorted(sorted_keys, query)
    pos[pos == len(sorted_keys)] = 0
    return sorted_keys[pos] == query


def _lex_order(states: np.ndarray) -> np.ndarray:
    return np.lexsort(states.T[::-1])


def _as_states(graph: GraphDef, states) -> np.ndarray:
    return np.asarray(states, dtype=graph.space.dtype).reshape(-1, graph.space.dim)


def _expand(graph: GraphDef, states: np.ndarray) -> np.ndarray:
    return np.concatenate([graph.apply_batch(k, states) for k in range(len(graph.labels))])


def iterate_layers(graph: GraphDef, max_depth: int | None = None,
                   memory_budget: int | None = None):
    """Yield each BFS layer as an array of states sorted lexicographically."""
    keys_of = _key_function(graph.space, graph.space.dim)
    budget = DEFAULT_MEMORY_BUDGET if memory_budget is None else memory_budget
    row_bytes = graph.space.dim * np.dtype(graph.space.dtype).itemsize + 16
    cur = _as_states(graph, [graph.start])
    cur_keys = keys_of(cur)
    prev_keys = cur_keys[:0]
    visited = cur_keys.copy()
    depth = 0
    yield cur
    while max_depth is None or depth < max_depth:
        held = len(visited) if graph.directed else len(prev_keys) + len(cur_keys)
        if (held + len(cur) * max(len(graph.labels), 1)) * row_bytes > budget:
            raise MemoryBudgetExceeded(f"hash engine exceeded {budget} bytes", depth)
        cand = _expand(graph, cur)
        ck = keys_of(cand)
        uniq, first = np.unique(ck, return_index=True)
        if graph.directed:
            fresh = ~_member(visited, uniq)
        else:
            fresh = ~(_member(prev_keys, uniq) | _member(cur_keys, uniq))
        if not fresh.any():
            return
        nxt = cand[first[fresh]]
        nxt = nxt[_lex_order(nxt)]
        nxt_keys = np.sort(uniq[fresh])
        if graph.directed:
            visited = np.union1d(visited, nxt_keys)
        prev_keys, cur_keys, cur = cur_keys, nxt_keys, nxt
        depth += 1
        yield cur


def growth_hash(graph: GraphDef, max_depth: int | None = None, memory_budget: int | None = None,
                n_antipodes: int = DEFAULT_ANTIPODES, target: Sequence[int] | None = None) -> GrowthResult:
    """Exact growth by layered BFS with explicit state keys."""
    if max_depth is not None and max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    sizes = []
    last = None
    target_arr = None if target is None else _as_states(graph, [target])[0]
    target_depth = None
    gen = iterate_layers(graph, max_depth, memory_budget)
    for depth, layer in enumerate(gen):
        sizes.append(len(layer))
        last = layer
        if target_arr is not None and (layer == target_arr).all(axis=1).any():
            target_depth = depth
            break
    truncated = _was_truncated(graph, max_depth, sizes, last, target_depth)
    antipodes = tuple(tuple(int(x) for x in row) for row in last[:n_antipodes])
    return GrowthResult(tuple(sizes), antipodes, truncated, "hash", target_depth)


def _was_truncated(graph, max_depth, sizes, last, target_depth) -> bool:
    if target_depth is not None:
        return False
    if max_depth is None or len(sizes) - 1 < max_depth:
        return False
    # the cut happened exactly at max_depth: probe whether anything lies beyond
    probe = iterate_layers(graph)
    for depth, _ in enumerate(probe):
        if depth > max_depth:
            return True
    return False


def enumerate_states(graph: GraphDef, node_cap: int = 20_000) -> tuple[np.ndarray, np.ndarray]:
    """All reachable states in BFS order with their distances."""
    layers = []
    total = 0
    for layer in iterate_layers(graph):
        total += len(layer)
        if total > node_cap:
            raise EngineError(f"reachable set exceeds node cap {node_cap}")
        layers.append(layer)
    states = np.concatenate(layers)
    dist = np.concatenate([np.full(len(layer), d, dtype=np.int64) for d, layer in enumerate(layers)])
    return states, dist


# ------------------------------------------------------------- bitmask engine


@numba.njit(cache=True, nogil=True)
def _mark(ranks, seen_a, seen_b, nxt):
    for r in ranks:
        byte = r >> 3
        m = 1 << (r & 7)
        if (seen_a[byte] | seen_b[byte]) & m:
            continue
        nxt[byte] |= m


@numba.njit(cache=True, nogil=True)
def _set_ranks(bits, b0, b1, limit):
    """Ranks of the set bits in bytes ``[b0, b1)``, at most ``limit`` of them."""
    count = 0
    for byte in range(b0, b1):
        w = bits[byte]
        while w:
            count += 1
            w &= w - 1
    count = min(count, limit)
    out = np.empty(count, np.int64)
    k = 0
    for byte in range(b0, b1):
        w = bits[byte]
        if w == 0:
            continue
        for bit in range(8):
            if k < count and (w >> bit) & 1:
                out[k] = byte * 8 + bit
                k += 1
        if k >= count:
            break
    return out


@numba.njit(cache=True, nogil=True)
def _advance(r_prev, r, d, s, fact, pool):
    """Move digits ``d`` and permutation ``s`` from rank ``r_prev`` to ``r > r_prev``.

    Small gaps are added as repeated increments of the factorial-base counter,
    large ones recomputed by division. Only the suffix of ``s`` whose digits
    changed is rebuilt; that suffix keeps the same set of values.
    """
    n = d.shape[0]
    diff = r - r_prev
    low = n
    if diff <= 32:
        for _ in range(diff):
            i = n - 2
            while True:
                low = min(low, i)
                v = d[i] + 1
                if v < n - i:
                    d[i] = v
                    break
                d[i] = 0
                i -= 1
    else:
        rr = r
        for i in range(n):
            q = rr // fact[i]
            rr -= q * fact[i]
            if q != d[i]:
                d[i] = q
                low = min(low, i)
    if low >= n:
        return
    m = n - low
    for j in range(m):
        pool[j] = s[low + j]
    for a in range(1, m):
        v = pool[a]
        b = a - 1
        while b >= 0 and pool[b] > v:
            pool[b + 1] = pool[b]
            b -= 1
        pool[b + 1] = v
    left = m
    for j in range(low, n):
        q = d[j]
        s[j] = pool[q]
        for t in range(q, left - 1):
            pool[t] = pool[t + 1]
        left -= 1


_POP16 = np.array([bin(i).count("1") for i in range(1 << 16)], dtype=np.int64)


@numba.njit(cache=True, nogil=True, inline="always")
def _neighbour_rank(r, s, d, prefix, perm, a, b, fact, pop):
    """Lehmer rank of ``s o perm`` when ``perm`` moves only positions ``a..b``.

    Digit ``j`` of the image is its value minus the number of smaller values
    placed to its left; ``prefix[a]`` holds the values left of the window.
    """
    used = prefix[a]
    delta = 0
    for j in range(a, b + 1):
        v = s[perm[j]]
        low = used & ((1 << v) - 1)
        smaller = pop[low & 0xFFFF] + pop[low >> 16]
        delta += (v - smaller - d[j]) * fact[j]
        used |= 1 << v
    return r + delta


@numba.njit(cache=True, nogil=True, inline="always")
def _fill_prefix(s, prefix):
    acc = 0
    for j in range(s.shape[0]):
        prefix[j] = acc
        acc |= 1 << s[j]


@numba.njit(cache=True, nogil=True)
def _perm_layer(cur, seen_a, seen_b, nxt, b0, b1, gens, lo, hi, fact, pop):
    """Expand every permutation whose Lehmer rank is set in ``cur[b0:b1]``."""
    n = gens.shape[1]
    ngen = gens.shape[0]
    s = np.arange(n)
    d = np.zeros(n, np.int64)
    pool = np.empty(n, np.int64)
    prefix = np.zeros(n, np.int64)
    r_prev = 0
    for byte in range(b0, b1):
        w = cur[byte]
        if w == 0:
            continue
        for bit in range(8):
            if not (w >> bit) & 1:
                continue
            r = byte * 8 + bit
            _advance(r_prev, r, d, s, fact, pool)
            r_prev = r
            _fill_prefix(s, prefix)
            for g in range(ngen):
                nr = _neighbour_rank(r, s, d, prefix, gens[g], lo[g], hi[g], fact, pop)
                nb = nr >> 3
                m = 1 << (nr & 7)
                if (seen_a[nb] | seen_b[nb]) & m:
                    continue
                nxt[nb] |= m


@numba.njit(cache=True, nogil=True)
def _perm_pull(visited, cur, nxt, b0, b1, gens, lo, hi, fact, pop, capacity):
    """Bottom-up step: mark each unvisited rank in bytes ``[b0, b1)`` with a neighbour in ``cur``.

    Valid for inverse-closed generators only, where ``u`` is a neighbour of
    ``v`` exactly when ``v`` is a neighbour of ``u``.
    """
    n = gens.shape[1]
    ngen = gens.shape[0]
    s = np.arange(n)
    d = np.zeros(n, np.int64)
    pool = np.empty(n, np.int64)
    prefix = np.zeros(n, np.int64)
    r_prev = 0
    for byte in range(b0, b1):
        w = ~visited[byte] & 0xFF
        if w == 0:
            continue
        for bit in range(8):
            if not (w >> bit) & 1:
                continue
            r = byte * 8 + bit
            if r >= capacity:
                break
            _advance(r_prev, r, d, s, fact, pool)
            r_prev = r
            _fill_prefix(s, prefix)
            for g in range(ngen):
                nr = _neighbour_rank(r, s, d, prefix, gens[g], lo[g], hi[g], fact, pop)
                if (cur[nr >> 3] >> (nr & 7)) & 1:
                    nxt[byte] |= 1 << bit
                    break


@numba.njit(cache=True, nogil=True, inline="always")
def _zero_mask(r, n, zeros, binom):
    """Bitmask of zero positions of the binary vector with combinadic rank ``r``."""
    mask = 0
    t = zeros
    for i in range(n - 1, -1, -1):
        if t == 0:
            break
        if binom[i, t] <= r:
            mask |= 1 << i
            r -= binom[i, t]
            t -= 1
        elif i + 1 == t:
            mask |= 1 << i
            t -= 1
    return mask


@numba.njit(cache=True, nogil=True, inline="always")
def _mask_rank(mask, rank_table, pop):
    """Combinadic rank of a zero mask, one table lookup per byte."""
    r = 0
    c = 0
    for k in range(rank_table.shape[0]):
        v = (mask >> (8 * k)) & 0xFF
        r += rank_table[k, c, v]
        c += pop[v]
    return r


@numba.njit(cache=True, nogil=True, inline="always")
def _move_mask(mask, table, g):
    out = 0
    for k in range(table.shape[1]):
        out |= table[g, k, (mask >> (8 * k)) & 0xFF]
    return out


_COSET_BLOCK = 512


@numba.njit(cache=True, nogil=True)
def _coset_layer(cur, seen_a, seen_b, nxt, b0, b1, table, n, zeros, binom, rank_table, pop):
    """Push step on binary vectors held as zero-position masks.

    Frontier masks are gathered in blocks and expanded generator by generator,
    so one generator's byte tables stay in cache across the block.
    """
    masks = np.empty(_COSET_BLOCK, dtype=np.int64)
    byte = b0
    while byte < b1:
        fill = 0
        while byte < b1 and fill <= _COSET_BLOCK - 8:
            w = cur[byte]
            if w:
                for bit in range(8):
                    if (w >> bit) & 1:
                        masks[fill] = _zero_mask(byte * 8 + bit, n, zeros, binom)
                        fill += 1
            byte += 1
        for g in range(table.shape[0]):
            for i in range(fill):
                nr = _mask_rank(_move_mask(masks[i], table, g), rank_table, pop)
                nb = nr >> 3
                m = 1 << (nr & 7)
                if not ((seen_a[nb] | seen_b[nb]) & m):
                    nxt[nb] |= m


@numba.njit(cache=True, nogil=True)
def _coset_pull(visited, cur, nxt, b0, b1, table, n, zeros, binom, rank_table, pop, capacity):
    masks = np.empty(_COSET_BLOCK, dtype=np.int64)
    ranks = np.empty(_COSET_BLOCK, dtype=np.int64)
    byte = b0
    while byte < b1:
        fill = 0
        while byte < b1 and fill <= _COSET_BLOCK - 8:
            w = ~visited[byte] & 0xFF
            if w:
                for bit in range(8):
                    r = byte * 8 + bit
                    if (w >> bit) & 1 and r < capacity:
                        masks[fill] = _zero_mask(r, n, zeros, binom)
                        ranks[fill] = r
                        fill += 1
            byte += 1
        # states found in the frontier are swapped out of the live prefix
        live = fill
        for g in range(table.shape[0]):
            if live == 0:
                break
            i = 0
            while i < live:
                nr = _mask_rank(_move_mask(masks[i], table, g), rank_table, pop)
                if (cur[nr >> 3] >> (nr & 7)) & 1:
                    r = ranks[i]
                    nxt[r >> 3] |= 1 << (r & 7)
                    live -= 1
                    masks[i] = masks[live]
                    ranks[i] = ranks[live]
                else:
                    i += 1


def _rank_tables(n: int, zeros: int, binom: np.ndarray) -> np.ndarray:
    """``table[k, c, v]``: rank contribution of mask byte ``k`` holding ``v`` after ``c`` earlier zeros."""
    nbytes = (n + 7) // 8
    table = np.zeros((nbytes, zeros + 1, 256), dtype=np.int64)
    for k in range(nbytes):
        for c in range(zeros + 1):
            for v in range(256):
                r, t = 0, c
                for b in range(8):
                    pos = 8 * k + b
                    if pos < n and (v >> b) & 1:
                        t += 1
                        if t <= zeros:
                            r += int(binom[pos, t])
                table[k, c, v] = r
    return table


_POP8 = np.array([bin(v).count("1") for v in range(256)], dtype=np.int64)


def _mask_tables(perms: np.ndarray) -> np.ndarray:
    """``table[g, k, v]``: image under ``g`` of the zero positions ``v`` in mask byte ``k``.

    A vector ``s`` moves to ``s[g]``, so its zero at position ``p`` lands on
    ``g^-1(p)``.
    """
    count, n = perms.shape
    nbytes = (n + 7) // 8
    inv = np.argsort(perms, axis=1)
    # image bit of each source position, zero past n
    images = np.zeros((count, 8 * nbytes), dtype=np.int64)
    images[:, :n] = np.left_shift(1, inv)
    bits = (np.arange(256)[:, None] >> np.arange(8)) & 1
    table = np.zeros((count, nbytes, 256), dtype=np.int64)
    for b in range(8):
        table |= bits[None, None, :, b] * images[:, b::8][:, :, None]
    return table


def _support_windows(perms: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    lo = np.zeros(len(perms), dtype=np.int64)
    hi = np.zeros(len(perms), dtype=np.int64)
    ident = np.arange(perms.shape[1])
    for g, p in enumerate(perms):
        moved = np.flatnonzero(p != ident)
        lo[g], hi[g] = (moved[0], moved[-1]) if len(moved) else (0, -1)
    return lo, hi


_UNROLL_LIMIT = 4000
_UNROLL_MIN_CAPACITY = 1 << 20
_UNROLL_PULL_MIN_CAPACITY = 1 << 24
_unrolled_cache: dict = {}


def _unrolled_kernel(perms: np.ndarray, pull: bool = False):
    """Compile a layer kernel specialised to ``perms``, or ``None`` if too large.

    Each generator's rank update is written out over the moved window with
    constant factorial weights, so the inner loop runs on registers. The
    ``pull`` variant is the bottom-up counterpart of :func:`_perm_pull`.
    """
    key = perms.tobytes() + bytes([perms.shape[1], pull])
    if key in _unrolled_cache:
        return _unrolled_cache[key]
    n = perms.shape[1]
    lo, hi = _support_windows(perms)
    if int(((hi - lo + 1) ** 2).sum()) > _UNROLL_LIMIT:
        _unrolled_cache[key] = None
        return None
    weight = [factorial(n - 1 - j) for j in range(n)]
    used = sorted({j for a, b in zip(lo, hi) for j in range(a, b + 1)})
    body = []
    for g, p in enumerate(perms):
        a, b = int(lo[g]), int(hi[g])
        terms = []
        for j in range(a, b + 1):
            src = int(p[j])
            within_t = " + ".join(f"(s{int(p[l])} < s{src})" for l in range(j + 1, b + 1)) or "0"
            within_s = " + ".join(f"(s{l} < s{src})" for l in range(src + 1, b + 1)) or "0"
            terms.append(f"(d{src} - d{j} + ({within_t}) - ({within_s})) * {weight[j]}")
        body.append(f"            nr = r + {' + '.join(terms)}")
        if pull:
            body.append("            if (cur[nr >> 3] >> (nr & 7)) & 1:")
            body.append("                nxt[byte] |= 1 << bit")
            body.append("                continue")
        else:
            body.append("            nb = nr >> 3")
            body.append("            m = 1 << (nr & 7)")
            body.append("            if not ((seen_a[nb] | seen_b[nb]) & m):")
            body.append("                nxt[nb] |= m")
    loads = [f"            s{j} = s[{j}]\n            d{j} = d[{j}]" for j in used]
    if pull:
        head = ["def kernel(visited, cur, nxt, b0, b1, fact, capacity):",
                "        w = ~visited[byte] & 0xFF"]
        skip = ["            if r >= capacity:", "                break"]
    else:
        head = ["def kernel(cur, seen_a, seen_b, nxt, b0, b1, fact):", "        w = cur[byte]"]
        skip = []
    source = "\n".join([
        head[0],
        f"    s = np.arange({n})",
        f"    d = np.zeros({n}, np.int64)",
        f"    pool = np.empty({n}, np.int64)",
        "    r_prev = 0",
        "    for byte in range(b0, b1):",
        head[1],
        "        if w == 0:",
        "            continue",
        "        for bit in range(8):",
        "            if not (w >> bit) & 1:",
        "                continue",
        "            r = byte * 8 + bit",
        *skip,
        "            _advance(r_prev, r, d, s, fact, pool)",
        "            r_prev = r",
        *loads,
        *body,
    ])
    namespace = {"np": np, "_advance": _advance}
    exec(compile(source, "<unrolled-kernel>", "exec"), namespace)
    kernel = numba.njit(nogil=True)(namespace["kernel"])
    _unrolled_cache[key] = kernel
    return kernel



def _popcount(bits: np.ndarray) -> int:
    return int(np.bitwise_count(bits).sum(dtype=np.int64))


def _byte_ranges(nbytes: int, parts: int) -> list[tuple[int, int]]:
    step = -(-nbytes // parts)
    return [(i, min(i + step, nbytes)) for i in range(0, nbytes, step)] or [(0, 0)]


class _LayerExpander:
    """Expands one layer of the bitmask BFS into ``nxt``."""

    chunk_bytes = 1 << 15

    def __init__(self, graph: GraphDef, codec: RankCodec, n_jobs: int):
        self.graph = graph
        self.codec = codec
        self.n_jobs = max(1, n_jobs)
        self.fused = (
            graph.is_permutation_graph
            and isinstance(graph.space, FullPermutation)
            and isinstance(codec, LehmerCodec)
        )
        if self.fused:
            self.gens = graph.moves.perm_matrix()
            self.lo, self.hi = _support_windows(self.gens)
            # compiling a specialised kernel only pays off on large spaces
            big = codec.capacity >= _UNROLL_MIN_CAPACITY
            self.kernel = _unrolled_kernel(self.gens) if big else None
            self._pull_kernel = False  # compiled on first bottom-up layer
        self.coset = (
            not self.fused
            and graph.is_permutation_graph
            and isinstance(codec, CombinadicCodec)
            and codec.n <= 62
        )
        if self.coset:
            self.table = _mask_tables(graph.moves.perm_matrix())
            self.rank_table = _rank_tables(codec.n, codec.zeros, codec.binom)
        self.can_pull = (self.fused or self.coset) and not graph.directed

    def pull(self, visited, cur, nxt):
        """Bottom-up layer: threads own disjoint byte ranges of ``nxt``, so no merge is needed."""
        cap = self.codec.capacity
        if self.coset:
            c = self.codec
            run = lambda br: _coset_pull(visited, cur, nxt, br[0], br[1], self.table, c.n, c.zeros, c.binom,
                                         self.rank_table, _POP8, cap)
            self._threaded(run, _byte_ranges(len(cur), self.n_jobs))
            return
        if self._pull_kernel is False:
            huge = cap >= _UNROLL_PULL_MIN_CAPACITY
            self._pull_kernel = _unrolled_kernel(self.gens, pull=True) if huge else None
        kernel = self._pull_kernel

        def work(br):
            b0, b1 = br
            if kernel is not None:
                kernel(visited, cur, nxt, b0, b1, self.codec.fact, cap)
            else:
                _perm_pull(visited, cur, nxt, b0, b1, self.gens, self.lo, self.hi, self.codec.fact, _POP16, cap)

        self._threaded(work, _byte_ranges(len(cur), self.n_jobs))

    def _threaded(self, work, ranges):
        if self.n_jobs == 1:
            work(ranges[0])
            return
        with ThreadPoolExecutor(self.n_jobs) as pool:
            list(pool.map(work, ranges))

    def _run(self, cur, seen_a, seen_b, nxt, b0, b1):
        if self.coset:
            c = self.codec
            _coset_layer(cur, seen_a, seen_b, nxt, b0, b1, self.table, c.n, c.zeros, c.binom,
                         self.rank_table, _POP8)
        elif self.kernel is not None:
            self.kernel(cur, seen_a, seen_b, nxt, b0, b1, self.codec.fact)
        else:
            _perm_layer(cur, seen_a, seen_b, nxt, b0, b1, self.gens, self.lo, self.hi, self.codec.fact, _POP16)

    def __call__(self, cur, seen_a, seen_b, nxt, allocator):
        if self.fused or self.coset:
            self._fused(cur, seen_a, seen_b, nxt, allocator)
        else:
            self._generic(cur, seen_a, seen_b, nxt)

    def _fused(self, cur, seen_a, seen_b, nxt, allocator):
        if self.n_jobs == 1:
            self._run(cur, seen_a, seen_b, nxt, 0, len(cur))
            return
        ranges = _byte_ranges(len(cur), self.n_jobs)
        private = [nxt] + [allocator.alloc(len(cur) * 8) for _ in ranges[1:]]

        def work(i):
            b0, b1 = ranges[i]
            self._run(cur, seen_a, seen_b, private[i], b0, b1)

        with ThreadPoolExecutor(self.n_jobs) as pool:
            list(pool.map(work, range(len(ranges))))
        for extra in private[1:]:
            np.bitwise_or(nxt, extra, out=nxt)
            allocator.free(extra)

    def _neighbour_ranks(self, cur, b0, b1):
        ranks = _set_ranks(cur, b0, b1, 1 << 62)
        if len(ranks) == 0:
            return []
        states = self.codec.unrank_batch(ranks)
        return [self.codec.rank_batch(self.graph.apply_batch(k, states))
                for k in range(len(self.graph.labels))]

    def _generic(self, cur, seen_a, seen_b, nxt):
        ranges = [(b, min(b + self.chunk_bytes, len(cur))) for b in range(0, len(cur), self.chunk_bytes)]
        if self.n_jobs == 1:
            results = (self._neighbour_ranks(cur, b0, b1) for b0, b1 in ranges)
            for rank_lists in results:
                for r in rank_lists:
                    _mark(r, seen_a, seen_b, nxt)
            return
        with ThreadPoolExecutor(self.n_jobs) as pool:
            for rank_lists in pool.map(lambda br: self._neighbour_ranks(cur, *br), ranges):
                for r in rank_lists:
                    _mark(r, seen_a, seen_b, nxt)


def growth_bitmask(graph: GraphDef, codec: RankCodec | None = None, *, max_depth: int | None = None,
                   memory_budget: int | None = None, n_antipodes: int = DEFAULT_ANTIPODES,
                   n_jobs: int = 1, allocator: BitsetAllocator | None = None,
                   target: Sequence[int] | None = None, direction: str = "auto") -> GrowthResult:
    """Exact growth using rank-indexed bitsets (three bits per state).

    ``direction="push"`` expands every frontier state; undirected graphs then
    rotate previous, current and next layer bitsets. ``"auto"`` keeps a
    visited bitset instead (same footprint) so that, on undirected
    permutation graphs, layers where the frontier dwarfs the unvisited set are
    computed bottom-up: each unvisited state stops at its first neighbour in
    the frontier.
    """
    if direction not in ("auto", "push"):
        raise ValueError(f"direction must be 'auto' or 'push', got {direction!r}")
    codec = codec or graph.codec()
    if codec is None:
        raise EngineError(f"no rank codec for space {graph.space.kind}")
    if codec.dim != graph.space.dim:
        raise EngineError(f"codec dimension {codec.dim} does not match space {graph.space.dim}")
    if max_depth is not None and max_depth < 0:
        raise ValueError("max_depth must be >= 0")
    budget = DEFAULT_MEMORY_BUDGET if memory_budget is None else memory_budget
    nbytes = (codec.capacity + 7) // 8
    if 3 * nbytes > budget:
        raise MemoryBudgetExceeded(
            f"bitmask engine needs {3 * nbytes} bytes, budget is {budget}", 0)
    n_jobs = (os.cpu_count() or 1) if n_jobs in (-1, None) else n_jobs
    allocator = allocator or BitsetAllocator()
    expand = _LayerExpander(graph, codec, n_jobs)

    start_rank = codec.rank(graph.start)
    target_rank = None if target is None else codec.rank(target)
    a = allocator.alloc(codec.capacity)
    cur = allocator.alloc(codec.capacity)
    nxt = allocator.alloc(codec.capacity)
    cur[start_rank >> 3] |= 1 << (start_rank & 7)
    # with a visited set both seen arrays are the same bitset
    use_visited = graph.directed or direction == "auto"
    pull_ok = direction == "auto" and expand.can_pull
    if use_visited:
        visited = a
        visited[:] = cur
    else:
        prev = a
    sizes = [1]
    seen_total = 1
    target_depth = 0 if target_rank == start_rank else None
    truncated = False

    # bottom-up once frontier * ratio exceeds the unvisited count; a state
    # stops at its first frontier neighbour, so wide generator sets gain most
    pull_ratio = 1.0 if expand.coset else max(1.0, len(graph.labels) ** 0.5 / 3)

    def step(out):
        frontier = sizes[-1]
        if pull_ok and frontier * pull_ratio > codec.capacity - seen_total:
            expand.pull(visited, cur, out)
        elif use_visited:
            expand(cur, visited, visited, out, allocator)
        else:
            expand(cur, prev, cur, out, allocator)

    while target_depth is None:
        if max_depth is not None and len(sizes) - 1 >= max_depth:
            # nxt is still zero here, so it doubles as the probe
            step(nxt)
            truncated = bool(nxt.any())
            break
        step(nxt)
        count = _popcount(nxt)
        if count == 0:
            break
        sizes.append(count)
        seen_total += count
        if use_visited:
            np.bitwise_or(visited, nxt, out=visited)
            cur, nxt = nxt, cur
        else:
            prev, cur, nxt = cur, nxt, prev
        nxt.fill(0)
        if target_rank is not None and (cur[target_rank >> 3] >> (target_rank & 7)) & 1:
            target_depth = len(sizes) - 1
    ranks = _set_ranks(cur, 0, len(cur), n_antipodes)
    antipodes = tuple(tuple(int(x) for x in row) for row in codec.unrank_batch(ranks))
    for arr in (a, cur, nxt):
        allocator.free(arr)
    return GrowthResult(tuple(sizes), antipodes, truncated, "bitmask", target_depth)


# ------------------------------------------------------------------ front door


def choose_engine(graph: GraphDef, memory_budget: int | None = None) -> str:
    codec = graph.codec()
    budget = DEFAULT_MEMORY_BUDGET if memory_budget is None else memory_budget
    if codec is not None and 3 * ((codec.capacity + 7) // 8) <= budget:
        return "bitmask"
    return "hash"


def growth(graph: GraphDef, engine: str = "auto", **kwargs) -> GrowthResult:
    if engine == "auto":
        engine = choose_engine(graph, kwargs.get("memory_budget"))
    if engine == "hash":
        kwargs.pop("n_jobs", None)
        kwargs.pop("allocator", None)
        return growth_hash(graph, **kwargs)
    if engine == "bitmask":
        return growth_bitmask(graph, **kwargs)
    raise EngineError(f"unknown engine {engine!r}")


def antipodes(graph: GraphDef, cap: int = DEFAULT_ANTIPODES, engine: str = "auto", **kwargs) -> Antipodes:
    """Up to ``cap`` states of the final layer plus the exact final-layer size."""
    result = growth(graph, engine, n_antipodes=cap, **kwargs)
    return Antipodes(list(result.antipodes), result.antipode_count)


def distance(graph: GraphDef, target: Sequence[int], engine: str = "auto", **kwargs) -> int:
    """BFS distance from ``graph.start`` to ``target``."""
    if not graph.space.contains(target):
        raise ValueError(f"target {list(target)} is not in the state space")
    result = growth(graph, engine, target=tuple(target), n_antipodes=0, **kwargs)
    if result.target_depth is None:
        raise EngineError(f"target {list(target)} unreachable from start")
    return result.target_depth


def adjacency_matrix(graph: GraphDef, node_cap: int = 20_000) -> tuple[np.ndarray, list[State]]:
    """Dense 0/1 adjacency of the reachable graph; nodes in BFS order."""
    states, _ = enumerate_states(graph, node_cap)
    keys_of = _key_function(graph.space, graph.space.dim)
    keys = keys_of(states)
    order = np.argsort(keys, kind="stable")
    sorted_keys = keys[order]
    mat = np.zeros((len(states), len(states)), dtype=np.uint8)
    rows = np.arange(len(states))
    for k in range(len(graph.labels)):
        nk = keys_of(graph.apply_batch(k, states))
        cols = order[np.searchsorted(sorted_keys, nk)]
        mat[rows, cols] = 1
    return mat, [tuple(int(x) for x in s) for s in states]
