"""Interaction schedules and round accounting.

All randomness comes from numpy's PCG64 bit generator seeded with
``SeedSequence([seed, stream])``; ``stream`` is the trial index. Arc indices
are drawn in fixed-size blocks, so the emitted sequence does not depend on
how a consumer reads it (one arc at a time or in chunks).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graph import Arc, Digraph

SCHEDULE_KINDS = ("uniform_random", "round_robin", "shuffled_rounds")
PRNG_NAME = "numpy PCG64 / SeedSequence([seed, stream])"
_BLOCK = 1 << 16


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, stream])))


class Schedule:
    """An infinite sequence of arcs of ``graph`` with a fairness contract.

    * ``uniform_random``: each arc independently with probability 1/|E|.
    * ``round_robin``: one fixed permutation of the arcs, repeated forever.
      The permutation is lexicographic unless ``permute`` is set, in which
      case it is drawn from the seed once.
    * ``shuffled_rounds``: a fresh seeded permutation for every block of |E|.
    """

    def __init__(self, graph: Digraph, kind: str = "uniform_random", seed: int = 0,
                 stream: int = 0, permute: bool = False):
        if kind not in SCHEDULE_KINDS:
            raise ValueError(f"unknown schedule kind {kind!r}")
        if graph.m == 0:
            raise ValueError("graph has no arcs")
        self.graph = graph
        self.kind = kind
        self.seed = seed
        self.stream = stream
        self.permute = permute
        self._rng = make_rng(seed, stream)
        self._m = graph.m
        if kind == "round_robin":
            order = (self._rng.permutation(self._m) if permute
                     else np.arange(self._m))
            reps = max(1, _BLOCK // self._m)
            self._cycle = np.tile(order, reps).astype(np.int64)
        self._buf = np.empty(0, dtype=np.int64)
        self._pos = 0
        self.position = 0  # number of arcs emitted so far

    def _refill(self) -> None:
        if self.kind == "uniform_random":
            fresh = self._rng.integers(0, self._m, size=_BLOCK, dtype=np.int64)
        elif self.kind == "round_robin":
            fresh = self._cycle
        else:
            reps = max(1, _BLOCK // self._m)
            fresh = np.concatenate([self._rng.permutation(self._m)
                                    for _ in range(reps)]).astype(np.int64)
        rest = self._buf[self._pos:]
        self._buf = np.concatenate([rest, fresh]) if rest.size else fresh
        self._pos = 0

    def next_index(self) -> int:
        if self._pos >= self._buf.size:
            self._refill()
        i = int(self._buf[self._pos])
        self._pos += 1
        self.position += 1
        return i

    def next_arc(self) -> Arc:
        return self.graph.arcs[self.next_index()]

    def next_indices(self, count: int) -> np.ndarray:
        """The next ``count`` arc indices as one array."""
        while self._buf.size - self._pos < count:
            self._refill()
        out = self._buf[self._pos:self._pos + count]
        self._pos += count
        self.position += count
        return out

    def unread(self, count: int) -> None:
        """Push back the last ``count`` indices returned by :meth:`next_indices`."""
        if count > self._pos:
            raise ValueError("cannot unread past the current buffer")
        self._pos -= count
        self.position -= count

    def take(self, count: int) -> list[Arc]:
        return [self.graph.arcs[i] for i in self.next_indices(count)]

    def __iter__(self):
        while True:
            yield self.next_arc()


@dataclass
class RoundCounter:
    """Greedy parse of an interaction sequence into rounds.

    A round ends at the first interaction after which every arc of the
    graph has appeared since the previous round ended.
    """

    arcs: frozenset
    arcs_seen_this_round: set = field(default_factory=set)
    completed_rounds: int = 0
    lengths: list = field(default_factory=list)
    _current: int = 0

    @classmethod
    def for_graph(cls, g: Digraph) -> "RoundCounter":
        return cls(frozenset(g.arcs))

    @property
    def current_round(self) -> int:
        """1-based index of the round the next interaction belongs to."""
        return self.completed_rounds + 1

    def advance(self, arc: Arc) -> bool:
        """Record one interaction; returns True if it completed a round."""
        self._current += 1
        self.arcs_seen_this_round.add(arc)
        if len(self.arcs_seen_this_round) == len(self.arcs):
            self.completed_rounds += 1
            self.lengths.append(self._current)
            self._current = 0
            self.arcs_seen_this_round = set()
            return True
        return False


def advance_round(rc: RoundCounter, arc: Arc) -> RoundCounter:
    rc.advance(arc)
    return rc


def round_lengths(indices, m: int) -> list[int]:
    """Offline greedy parse of a finite sequence of arc indices.

    Only completed rounds are returned; a trailing partial round is dropped.
    """
    seen = np.full(m, -1, dtype=np.int64)
    lengths = []
    rid = count = cur = 0
    for i in indices:
        cur += 1
        if seen[i] != rid:
            seen[i] = rid
            count += 1
            if count == m:
                lengths.append(cur)
                rid += 1
                count = cur = 0
    return lengths


def expected_round_length_check(g: Digraph, trials: int, seed: int = 0,
                                kind: str = "uniform_random") -> float:
    """Mean length of the first ``trials`` rounds of one seeded schedule.

    Rounds of the uniform scheduler are independent and identically
    distributed, so one long stream gives ``trials`` independent samples.
    """
    from .fast import parse_rounds

    sched = Schedule(g, kind, seed)
    seen = np.full(g.m, -1, dtype=np.int64)
    state = np.zeros(3, dtype=np.int64)  # round id, arcs seen, current length
    lengths: list = []
    while len(lengths) < trials:
        lengths.extend(parse_rounds(sched.next_indices(_BLOCK), g.m, seen, state))
    return float(np.mean(lengths[:trials]))
