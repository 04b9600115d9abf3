"""Exhaustive reachability checking of tiny instances.

Explores every configuration reachable from the all-initial configuration,
condenses the transition graph into strongly connected components, and
decides the global-fairness correctness criterion exactly: every reachable
configuration can reach an output-stable configuration with the expected
outputs, and no reachable output-stable configuration has any other output.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .core import ContractViolation, Output, Phase, ProtocolSpec, initial_configuration
from .graph import Digraph, is_complete
from .protocols import check_state_bounds

DEFAULT_CAP = 500_000


class InstanceTooLarge(RuntimeError):
    pass


@dataclass
class ConfigGraph:
    protocol: ProtocolSpec
    graph: Digraph
    states: list  # interned agent states
    configs: list  # tuples of state ids
    succ: list  # per config: list of (arc index, target config index)

    @property
    def size(self) -> int:
        return len(self.configs)

    def configuration(self, i: int) -> tuple:
        return tuple(self.states[s] for s in self.configs[i])

    def outputs(self, i: int) -> tuple:
        return tuple(self.protocol.output(self.states[s]) for s in self.configs[i])

    def n_edges(self) -> int:
        return sum(len(s) for s in self.succ)


@dataclass
class Verdict:
    solves: bool
    expected: Output
    reachable_count: int
    stable_count: int
    reason: str = ""
    witness: tuple | None = None
    witness_path: list = field(default_factory=list)

    def to_json(self, protocol: ProtocolSpec, graph: Digraph) -> dict:
        out = {
            "protocol": protocol.name,
            "graph": [list(a) for a in graph.arcs],
            "n": graph.n,
            "k": protocol.params.get("k"),
            "solves": self.solves,
            "reachable_count": self.reachable_count,
            "stable_count": self.stable_count,
        }
        if not self.solves:
            out["reason"] = self.reason
            out["witness_path"] = [list(a) for a in self.witness_path]
        return out


def explore(p: ProtocolSpec, g: Digraph, cap: int = DEFAULT_CAP) -> ConfigGraph:
    """Breadth-first closure of the configurations reachable on ``g``.

    Raises :class:`InstanceTooLarge` once more than ``cap`` configurations
    are found, and :class:`ContractViolation` if a counter leaves its range.
    """
    state_ids: dict = {}
    states: list = []

    def intern(s):
        i = state_ids.get(s)
        if i is None:
            i = state_ids[s] = len(states)
            states.append(s)
        return i

    start = tuple(intern(s) for s in initial_configuration(p, g.n))
    index = {start: 0}
    configs = [start]
    succ: list = []
    queue = deque([0])
    memo: dict = {}
    while queue:
        ci = queue.popleft()
        cfg = configs[ci]
        edges = []
        for ai, (u, v) in enumerate(g.arcs):
            key = (cfg[u], cfg[v])
            res = memo.get(key)
            if res is None:
                a, b = p.transition(states[cfg[u]], states[cfg[v]])
                res = memo[key] = (intern(a), intern(b))
            if res == key:
                edges.append((ai, ci))
                continue
            nxt = list(cfg)
            nxt[u], nxt[v] = res
            nxt = tuple(nxt)
            j = index.get(nxt)
            if j is None:
                if len(configs) >= cap:
                    raise InstanceTooLarge(
                        f"more than {cap} reachable configurations")
                check_state_bounds(p, [states[s] for s in nxt])
                j = index[nxt] = len(configs)
                configs.append(nxt)
                queue.append(j)
            edges.append((ai, j))
        succ.append(edges)
    return ConfigGraph(p, g, states, configs, succ)


def _csr(cg: ConfigGraph) -> csr_matrix:
    rows = [i for i, es in enumerate(cg.succ) for _ in es]
    cols = [j for es in cg.succ for _, j in es]
    data = np.ones(len(rows), dtype=np.int8)
    return csr_matrix((data, (rows, cols)), shape=(cg.size, cg.size))


def output_stable(cg: ConfigGraph) -> list[bool]:
    """Per configuration: does every configuration reachable from it agree
    with it on all outputs?"""
    ncomp, label = connected_components(_csr(cg), directed=True, connection="strong")
    vec: list = [None] * ncomp
    homogeneous = [True] * ncomp
    for i in range(cg.size):
        c = label[i]
        o = cg.outputs(i)
        if vec[c] is None:
            vec[c] = o
        elif vec[c] != o:
            homogeneous[c] = False
    comp_succ: list = [set() for _ in range(ncomp)]
    for i, es in enumerate(cg.succ):
        for _, j in es:
            if label[i] != label[j]:
                comp_succ[label[i]].add(label[j])
    # iterative post-order over the condensation DAG
    stable: list = [None] * ncomp
    for root in range(ncomp):
        if stable[root] is not None:
            continue
        stack = [(root, iter(comp_succ[root]))]
        while stack:
            c, it = stack[-1]
            child = next(it, None)
            if child is not None:
                if stable[child] is None:
                    stack.append((child, iter(comp_succ[child])))
                continue
            stack.pop()
            stable[c] = homogeneous[c] and all(
                stable[d] and vec[d] == vec[c] for d in comp_succ[c])
    return [stable[label[i]] for i in range(cg.size)]


def _path_to(cg: ConfigGraph, target: int) -> list:
    parent = {0: None}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        if i == target:
            break
        for ai, j in cg.succ[i]:
            if j not in parent:
                parent[j] = (i, ai)
                queue.append(j)
    path = []
    node = target
    while parent[node] is not None:
        i, ai = parent[node]
        path.append(cg.graph.arcs[ai])
        node = i
    return path[::-1]


def check_global_fairness(cg: ConfigGraph, expected: Output) -> Verdict:
    stable = output_stable(cg)
    want = tuple([expected] * cg.graph.n)
    good = [stable[i] and cg.outputs(i) == want for i in range(cg.size)]
    stable_count = sum(stable)
    for i in range(cg.size):
        if stable[i] and not good[i]:
            return Verdict(False, expected, cg.size, stable_count,
                           reason="output-stable configuration with wrong outputs",
                           witness=cg.configuration(i), witness_path=_path_to(cg, i))
    # backward reachability from the good configurations
    pred: list = [[] for _ in range(cg.size)]
    for i, es in enumerate(cg.succ):
        for _, j in es:
            pred[j].append(i)
    reach = list(good)
    queue = deque(i for i in range(cg.size) if good[i])
    while queue:
        j = queue.popleft()
        for i in pred[j]:
            if not reach[i]:
                reach[i] = True
                queue.append(i)
    for i in range(cg.size):
        if not reach[i]:
            return Verdict(False, expected, cg.size, stable_count,
                           reason="correct stable configuration unreachable",
                           witness=cg.configuration(i), witness_path=_path_to(cg, i))
    return Verdict(True, expected, cg.size, stable_count)


def verify(p: ProtocolSpec, g: Digraph, expected: Output | None = None,
           cap: int = DEFAULT_CAP) -> Verdict:
    """Explore and check; the expected output defaults to the graph's class.

    A counter leaving its proven range is reported as a failing verdict.
    """
    if expected is None:
        expected = Output.YES if is_complete(g) else Output.NO
    try:
        cg = explore(p, g, cap)
    except ContractViolation as exc:
        return Verdict(False, expected, 0, 0, reason=f"state bound violated: {exc}")
    return check_global_fairness(cg, expected)


def check_weak_fairness_negative(p: ProtocolSpec, g: Digraph,
                                 cap: int = DEFAULT_CAP) -> bool:
    """True iff no reachable configuration contains a phase-4 agent.

    Quantifies over every interleaving, so it covers every schedule,
    weakly fair or not.
    """
    cg = explore(p, g, cap)
    # every interned state occurs in some reachable configuration
    return not any(s.phase == Phase.FOUR for s in cg.states)
