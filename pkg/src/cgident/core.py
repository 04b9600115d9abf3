"""Protocol abstraction shared by the simulator and the model checker."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

from .graph import Arc, Digraph


class Output(str, enum.Enum):
    YES = "yes"
    NO = "no"


class Phase(float, enum.Enum):
    ONE = 1.0
    ONE_HALF = 1.5
    TWO = 2.0
    THREE = 3.0
    FOUR = 4.0

    def __repr__(self):
        return f"{self.value:g}"

    __str__ = __repr__


class ContractViolation(RuntimeError):
    pass


State = Any
Configuration = tuple  # one state per agent, indexed by node id


@dataclass(frozen=True)
class ProtocolSpec:
    """A population protocol: initial state, pairwise transition, output map.

    ``transition`` takes ``(initiator, responder)`` and returns the updated
    pair. ``invariants`` inspects one step ``(before, after, arc, complete)``
    and returns a list of human-readable violations. ``absorbing_scope`` says
    for which agents (given population size ``n``) phase 4 must be absorbing.
    """

    name: str
    params: dict
    initial_state: State
    transition: Callable[[State, State], tuple[State, State]]
    output: Callable[[State], Output]
    invariants: Callable[[Configuration, Configuration, Arc, bool], list[str]] = field(
        default=lambda before, after, arc, complete: []
    )
    absorbing_scope: Callable[[State, int], bool] = field(default=lambda s, n: True)
    state_bound: int | None = None

    def describe(self) -> str:
        ps = ",".join(f"{k}={v}" for k, v in self.params.items())
        return f"{self.name}({ps})" if ps else self.name


def initial_configuration(p: ProtocolSpec, n: int) -> Configuration:
    return (p.initial_state,) * n


def apply_interaction(p: ProtocolSpec, c: Configuration, arc: Arc,
                      graph: Digraph | None = None) -> Configuration:
    """Apply one interaction; only the two endpoints can change."""
    u, v = arc
    if graph is not None and not graph.has_arc(u, v):
        raise ContractViolation(f"arc {arc} is not in the communication graph")
    a, b = p.transition(c[u], c[v])
    if a is c[u] and b is c[v]:
        return c
    out = list(c)
    out[u] = a
    out[v] = b
    return tuple(out)


def all_outputs(p: ProtocolSpec, c: Sequence[State]) -> list[Output]:
    return [p.output(s) for s in c]


def is_phase4(s: State) -> bool:
    return s.phase == Phase.FOUR


def yes_is_absorbing_check(p: ProtocolSpec, c: Configuration, arc: Arc) -> bool:
    """True iff no in-scope phase-4 agent leaves phase 4 in this interaction."""
    n = len(c)
    after = apply_interaction(p, c, arc)
    for s0, s1 in zip(c, after):
        if (is_phase4(s0) and p.absorbing_scope(s0, n) and p.absorbing_scope(s1, n)
                and not is_phase4(s1)):
            return False
    return True


@dataclass
class StateCensus:
    distinct: set = field(default_factory=set)
    per_variable_max: dict = field(default_factory=dict)

    @property
    def distinct_states_seen(self) -> int:
        return len(self.distinct)

    def observe(self, states) -> None:
        for s in states:
            if s in self.distinct:
                continue
            self.distinct.add(s)
            for name, value in s._asdict().items():
                if isinstance(value, tuple):
                    continue
                value = value.value if isinstance(value, enum.Enum) else value
                if isinstance(value, bool):
                    value = int(value)
                old = self.per_variable_max.get(name)
                if old is None or value > old:
                    self.per_variable_max[name] = value

    def to_dict(self) -> dict:
        return {"distinct_states_seen": self.distinct_states_seen,
                "per_variable_max": dict(self.per_variable_max)}
