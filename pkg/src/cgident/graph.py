"""Directed communication graphs: construction, validation, generators, file I/O."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

Arc = tuple[int, int]

GENERATOR_KINDS = (
    "complete",
    "directed_ring",
    "directed_line",
    "star_bidir",
    "near_complete_minus_one_arc",
    "random_weakly_connected",
)


class GraphParseError(ValueError):
    """Raised for malformed graph files; message carries the line number."""


@dataclass(frozen=True)
class Digraph:
    """A directed graph over agents ``0..n-1``.

    Construction does not validate; call :func:`validate` for that. Arcs are
    kept in canonical (lexicographic) order, duplicates included so that
    validation can report them.
    """

    n: int
    arcs: tuple[Arc, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        arcs = tuple(sorted((int(u), int(v)) for u, v in self.arcs))
        object.__setattr__(self, "arcs", arcs)
        object.__setattr__(self, "_index", {a: i for i, a in enumerate(arcs)})

    @property
    def m(self) -> int:
        return len(self.arcs)

    def has_arc(self, u: int, v: int) -> bool:
        return (u, v) in self._index

    def arc_index(self, arc: Arc) -> int:
        return self._index[arc]

    def out_degree(self, u: int) -> int:
        return sum(1 for a, _ in self.arcs if a == u)

    def in_degree(self, v: int) -> int:
        return sum(1 for _, b in self.arcs if b == v)

    def arc_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Initiator and responder columns as int64 arrays, in arc-index order."""
        src = np.fromiter((a for a, _ in self.arcs), dtype=np.int64, count=self.m)
        dst = np.fromiter((b for _, b in self.arcs), dtype=np.int64, count=self.m)
        return src, dst

    def describe(self) -> str:
        return f"digraph(n={self.n}, m={self.m})"


@dataclass(frozen=True)
class UndirectedMultigraph:
    n: int
    edges: tuple[tuple[int, int], ...]

    def multiplicity(self, u: int, v: int) -> int:
        key = (min(u, v), max(u, v))
        return sum(1 for e in self.edges if e == key)

    def weight_matrix(self) -> np.ndarray:
        w = np.zeros((self.n, self.n))
        for u, v in self.edges:
            w[u, v] += 1
            w[v, u] += 1
        return w


def _weakly_connected(n: int, arcs) -> bool:
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in arcs:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    return len({find(x) for x in range(n)}) == 1


def validate(g: Digraph) -> tuple[bool, str]:
    """Check that ``g`` is a simple, weakly connected digraph with n >= 2.

    Returns ``(ok, diagnostic)``; the diagnostic names the first violated
    property, or is ``"ok"``.
    """
    if g.n < 2:
        return False, "n < 2"
    for u, v in g.arcs:
        if not (0 <= u < g.n and 0 <= v < g.n):
            return False, f"node out of range in arc ({u},{v})"
    for u, v in g.arcs:
        if u == v:
            return False, f"self-loop at node {u}"
    dup = [a for a, c in Counter(g.arcs).items() if c > 1]
    if dup:
        return False, f"duplicate arc {dup[0]}"
    if not _weakly_connected(g.n, g.arcs):
        return False, "not weakly connected"
    return True, "ok"


def is_complete(g: Digraph) -> bool:
    return len(set(g.arcs)) == g.n * (g.n - 1)


def complete(n: int) -> Digraph:
    return Digraph(n, tuple((u, v) for u in range(n) for v in range(n) if u != v))


def generate(kind: str, n: int, seed: int = 0) -> Digraph:
    """Build a fixture graph of the named class.

    ``random_weakly_connected`` draws a random spanning tree (each tree edge in
    both directions) and then adds every other ordered pair independently
    with probability 1/2; ``seed`` fixes the outcome. The result is never
    complete: if every pair was drawn, one non-tree arc is dropped.
    """
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    if kind == "complete":
        return complete(n)
    if kind == "directed_ring":
        if n == 2:
            # a 2-ring would repeat the arc pair of K_2; keep it a one-way line
            return Digraph(2, ((0, 1),))
        return Digraph(n, tuple((i, (i + 1) % n) for i in range(n)))
    if kind == "directed_line":
        return Digraph(n, tuple((i, i + 1) for i in range(n - 1)))
    if kind == "star_bidir":
        arcs = [(0, i) for i in range(1, n)] + [(i, 0) for i in range(1, n)]
        if n == 2:
            arcs = [(0, 1)]
        return Digraph(n, tuple(arcs))
    if kind == "near_complete_minus_one_arc":
        rng = np.random.default_rng(seed)
        arcs = list(complete(n).arcs)
        arcs.pop(int(rng.integers(len(arcs))))
        return Digraph(n, tuple(arcs))
    if kind == "random_weakly_connected":
        rng = np.random.default_rng(seed)
        order = rng.permutation(n)
        arcs = set()
        for i in range(1, n):
            u = int(order[i])
            v = int(order[rng.integers(i)])
            arcs.add((u, v))
            arcs.add((v, u))
        extra = [(u, v) for u in range(n) for v in range(n)
                 if u != v and (u, v) not in arcs]
        for a in extra:
            if rng.random() < 0.5:
                arcs.add(a)
        if len(arcs) == n * (n - 1):
            if extra:
                arcs.discard(extra[int(rng.integers(len(extra)))])
            else:
                # n == 2: the spanning tree already uses both arcs
                arcs.discard((1, 0))
        return Digraph(n, tuple(arcs))
    raise ValueError(f"unknown graph kind {kind!r}")


def to_undirected_multigraph(g: Digraph) -> UndirectedMultigraph:
    return UndirectedMultigraph(g.n, tuple((min(u, v), max(u, v)) for u, v in g.arcs))


def format_graph(g: Digraph) -> str:
    lines = [str(g.n)] + [f"{u} {v}" for u, v in g.arcs]
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Digraph:
    n = None
    arcs: list[Arc] = []
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        try:
            nums = [int(p) for p in parts]
        except ValueError:
            raise GraphParseError(f"malformed line {lineno}: {raw!r}") from None
        if n is None:
            if len(nums) != 1:
                raise GraphParseError(f"expected node count at line {lineno}")
            n = nums[0]
            if n < 2:
                raise GraphParseError(f"node count must be >= 2 at line {lineno}")
            continue
        if len(nums) != 2:
            raise GraphParseError(f"malformed line {lineno}: {raw!r}")
        u, v = nums
        if not (0 <= u < n and 0 <= v < n):
            raise GraphParseError(f"node out of range at line {lineno}")
        if u == v:
            raise GraphParseError(f"self-loop at line {lineno}")
        if (u, v) in seen:
            raise GraphParseError(f"duplicate arc at line {lineno}")
        seen.add((u, v))
        arcs.append((u, v))
    if n is None:
        raise GraphParseError("empty graph file")
    return Digraph(n, tuple(arcs))


def read_graph(path) -> Digraph:
    return parse_graph(Path(path).read_text())


def write_graph(g: Digraph, path) -> None:
    Path(path).write_text(format_graph(g))
