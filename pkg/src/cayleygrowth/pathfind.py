"""Random walks, beam search with pluggable scorers, and path verification."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .bfs import _key_function, enumerate_states
from .graph import GraphDef, PermutationMoves
from .perm import GeneratorSet, inverse

State = tuple[int, ...]
Scorer = Callable[[np.ndarray], np.ndarray]


class UnknownLabelError(KeyError):
    """A path mentions a move label the graph does not have."""


@dataclass(frozen=True)
class Path:
    start: State
    moves: tuple[str, ...]
    end: State

    @property
    def length(self) -> int:
        return len(self.moves)

    def to_dict(self, graph: GraphDef | None = None) -> dict:
        return {
            "start": list(self.start),
            "moves": list(self.moves),
            "length": self.length,
            "verified": None if graph is None else verify_path(graph, self),
        }

    def to_json(self, graph: GraphDef | None = None) -> str:
        return json.dumps(self.to_dict(graph))

    @classmethod
    def from_dict(cls, graph: GraphDef, data: dict) -> "Path":
        start = tuple(int(x) for x in data["start"])
        moves = tuple(data["moves"])
        return cls(start, moves, fold(graph, start, moves))


def fold(graph: GraphDef, start: Sequence[int], moves: Sequence[str]) -> State:
    index = {label: k for k, label in enumerate(graph.labels)}
    arr = np.asarray([start], dtype=graph.space.dtype)
    for label in moves:
        if label not in index:
            raise UnknownLabelError(label)
        arr = graph.apply_batch(index[label], arr)
    return tuple(int(x) for x in arr[0])


def verify_path(graph: GraphDef, path: Path) -> bool:
    """True iff the moves carry ``path.start`` to ``path.end``.

    Raises :class:`UnknownLabelError` rather than returning False when a label
    is not a move of ``graph``.
    """
    return fold(graph, path.start, path.moves) == tuple(path.end)


def _inverse_moves(graph: GraphDef) -> list[int | None]:
    inv = getattr(graph.moves, "inverse_index", None)
    if inv is None:
        return [None] * len(graph.labels)
    return list(inv() if callable(inv) else inv)


# ------------------------------------------------------------- random walks


class WalkSample(NamedTuple):
    """Walk states stacked walk by walk; ``steps[i]`` bounds the distance of ``states[i]``."""

    states: np.ndarray
    steps: np.ndarray
    walk: np.ndarray

    def __iter__(self):
        return iter(zip(map(tuple, self.states.tolist()), self.steps.tolist()))

    def __len__(self):
        return len(self.steps)


def random_walks(graph: GraphDef, n_walks: int, length: int, seed: int | None = 0,
                 non_backtracking: bool = False) -> WalkSample:
    if length < 0 or n_walks < 0:
        raise ValueError("n_walks and length must be non-negative")
    rng = np.random.default_rng(seed)
    n_moves = len(graph.labels)
    inv = np.array([-1 if j is None else j for j in _inverse_moves(graph)], dtype=np.int64)
    cur = np.tile(np.asarray(graph.start, dtype=graph.space.dtype), (n_walks, 1))
    out = np.empty((length + 1, n_walks, graph.space.dim), dtype=graph.space.dtype)
    out[0] = cur
    last = np.full(n_walks, -1, dtype=np.int64)
    for step in range(1, length + 1):
        if non_backtracking and n_moves > 1:
            # draw from the moves other than the inverse of the previous one
            banned = np.where(last >= 0, inv[np.maximum(last, 0)], -1)
            has_ban = banned >= 0
            choice = rng.integers(0, n_moves - has_ban.astype(np.int64))
            choice += has_ban & (choice >= banned)
        else:
            choice = rng.integers(0, n_moves, size=n_walks)
        nxt = np.empty_like(cur)
        for k in range(n_moves):
            rows = np.flatnonzero(choice == k)
            if len(rows):
                nxt[rows] = graph.apply_batch(k, cur[rows])
        cur, last = nxt, choice
        out[step] = cur
    states = out.transpose(1, 0, 2).reshape(-1, graph.space.dim)
    steps = np.tile(np.arange(length + 1), n_walks)
    walk = np.repeat(np.arange(n_walks), length + 1)
    return WalkSample(states, steps, walk)


# ------------------------------------------------------------- scorers


def hamming_scorer(target: Sequence[int]) -> Scorer:
    goal = np.asarray(target)

    def score(states: np.ndarray) -> np.ndarray:
        return (states != goal).sum(axis=1).astype(np.float64)

    return score


def _reverse_graph(graph: GraphDef, target: Sequence[int]) -> GraphDef:
    """Graph whose BFS from ``target`` gives distances *to* ``target`` in ``graph``."""
    start = tuple(int(x) for x in target)
    if not graph.directed:
        return GraphDef(graph.moves, graph.space, start, False, graph.name)
    if not isinstance(graph.moves, PermutationMoves):
        raise ValueError("exact scorer on directed graphs needs permutation moves")
    gs = graph.generator_set
    back = GeneratorSet(gs.name + "^-1", gs.degree,
                        tuple((label, inverse(p)) for label, p in gs.generators))
    return GraphDef(PermutationMoves(back), graph.space, start, True, graph.name)


def exact_scorer(graph: GraphDef, target: Sequence[int], node_cap: int = 5_000_000) -> Scorer:
    """True distance to ``target`` from a full BFS table; unreachable states score ``inf``."""
    states, dist = enumerate_states(_reverse_graph(graph, target), node_cap)
    keys_of = _key_function(graph.space, graph.space.dim)
    keys = keys_of(states)
    order = np.argsort(keys, kind="stable")
    sorted_keys, sorted_dist = keys[order], dist[order].astype(np.float64)

    def score(batch: np.ndarray) -> np.ndarray:
        q = keys_of(batch)
        pos = np.minimum(np.searchsorted(sorted_keys, q), len(sorted_keys) - 1)
        hit = sorted_keys[pos] == q
        return np.where(hit, sorted_dist[pos], np.inf)

    return score


# ------------------------------------------------------------- beam search


def _dedupe_key(graph: GraphDef):
    """Integer-orderable key: codec rank when available, else positional key."""
    codec = graph.codec()
    if codec is not None:
        return codec.rank_batch
    return _key_function(graph.space, graph.space.dim)


def beam_search(graph: GraphDef, start: Sequence[int], target: Sequence[int], beam_width: int = 1024,
                max_steps: int = 1000, scorer: Scorer | str | None = None) -> Path | None:
    """Best-first layered search keeping ``beam_width`` states per depth.

    Candidates are ranked by ``(score, rank)`` after removing duplicates and
    states already kept at an earlier depth. Returns ``None`` when
    ``max_steps`` pass without reaching ``target``; that is not a proof the
    target is unreachable.
    """
    if beam_width < 1:
        raise ValueError("beam_width must be >= 1")
    start = tuple(int(x) for x in start)
    target = tuple(int(x) for x in target)
    for name, s in (("start", start), ("target", target)):
        if not graph.space.contains(s):
            raise ValueError(f"{name} state {list(s)} is not in the state space")
    if scorer is None or scorer == "hamming":
        scorer = hamming_scorer(target)
    elif scorer == "exact":
        scorer = exact_scorer(graph, target)
    elif isinstance(scorer, str):
        raise ValueError(f"unknown scorer {scorer!r}")
    if start == target:
        return Path(start, (), target)

    key_of = _dedupe_key(graph)
    goal = np.asarray(target, dtype=graph.space.dtype)
    beam = np.asarray([start], dtype=graph.space.dtype)
    seen = key_of(beam)
    # per depth: (parent index into previous beam, move index) for each kept state
    history: list[tuple[np.ndarray, np.ndarray]] = []
    n_moves = len(graph.labels)
    for _ in range(max_steps):
        children = np.concatenate([graph.apply_batch(k, beam) for k in range(n_moves)])
        parent = np.tile(np.arange(len(beam)), n_moves)
        move = np.repeat(np.arange(n_moves), len(beam))
        keys = key_of(children)
        hit = np.flatnonzero((children == goal).all(axis=1))
        if len(hit):
            # lowest move index, then lowest parent, for determinism
            i = hit[np.lexsort((parent[hit], move[hit]))[0]]
            history.append((parent[i:i + 1], move[i:i + 1]))
            return _reconstruct(graph, start, target, history)
        _, first = np.unique(keys, return_index=True)
        fresh = first[~np.isin(keys[first], seen)]
        if len(fresh) == 0:
            return None
        scores = scorer(children[fresh])
        order = np.lexsort((keys[fresh], scores))[:beam_width]
        keep = fresh[order]
        keep = keep[np.isfinite(scores[order])]
        if len(keep) == 0:
            return None
        beam = children[keep]
        history.append((parent[keep], move[keep]))
        seen = np.union1d(seen, keys[keep])
    return None


def _reconstruct(graph: GraphDef, start: State, target: State, history) -> Path:
    moves = []
    idx = 0
    for parent, move in reversed(history):
        moves.append(graph.labels[int(move[idx])])
        idx = int(parent[idx])
    return Path(start, tuple(reversed(moves)), target)
