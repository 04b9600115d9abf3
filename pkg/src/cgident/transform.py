"""The two-copy graph f(G) and a mirrored-execution demonstrator.

f(G) has agents ``0..2n-1``; agent ``x`` and ``x+n`` are the two copies of
agent ``x`` of G. Every arc of G is copied into both halves, and the arcs
touching agent 0 are additionally cross-wired between the halves. f(K_n) is
never complete, yet a schedule on f(G) can keep both copies of every agent
in the same state as the corresponding agent of G, so no protocol can tell
the two graphs apart under weak fairness.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import ContractViolation, ProtocolSpec, all_outputs, apply_interaction, \
    initial_configuration
from .graph import Arc, Digraph


def f_transform(g: Digraph) -> Digraph:
    n = g.n
    arcs = set()
    for x, y in g.arcs:
        arcs.add((x, y))
        arcs.add((x + n, y + n))
        if x == 0:
            arcs.add((0, y + n))
            arcs.add((n, y))
        if y == 0:
            arcs.add((x + n, 0))
            arcs.add((x, n))
    return Digraph(2 * n, tuple(arcs))


def expected_arc_count(g: Digraph) -> int:
    return 2 * g.m + 2 * g.out_degree(0) + 2 * g.in_degree(0)


def expand(g: Digraph, arc: Arc) -> list[list[Arc]]:
    """Arc pairs on f(G) that mirror one interaction of G.

    The copy pair always comes first; an interaction involving agent 0 is
    followed by its cross pair. Each pair touches every copy at most once,
    so applying it to a mirrored configuration is the same as applying
    ``arc`` once on G.
    """
    x, y = arc
    if not g.has_arc(x, y):
        raise ContractViolation(f"arc {arc} is not in the base graph")
    n = g.n
    pairs = [[(x, y), (x + n, y + n)]]
    if x == 0:
        pairs.append([(0, y + n), (n, y)])
    elif y == 0:
        pairs.append([(x + n, 0), (x, n)])
    return pairs


def mirror_schedule(g: Digraph, interactions) -> list[Arc]:
    return [a for arc in interactions for pair in expand(g, arc) for a in pair]


@dataclass
class MirrorResult:
    held: bool
    base_steps: int
    image_steps: int = 0
    first_divergence: int | None = None
    base_outputs: list = field(default_factory=list)
    image_outputs: list = field(default_factory=list)

    def __bool__(self):
        return self.held

    def to_json(self) -> dict:
        return {
            "mirror_invariant_held": self.held,
            "base_steps": self.base_steps,
            "image_steps": self.image_steps,
            "first_divergence": self.first_divergence,
            "base_outputs": self.base_outputs,
            "image_outputs": self.image_outputs,
            "image_all_yes": all(o == "yes" for o in self.image_outputs),
        }


def _mirrored(base, image, n) -> bool:
    return all(image[x] == base[x] and image[x + n] == base[x] for x in range(n))


def mirrored_run(p: ProtocolSpec, g: Digraph, base_schedule, steps: int) -> MirrorResult:
    """Drive ``p`` on G and on f(G) in lockstep.

    For each base interaction the f(G) side applies the expansion pair by
    pair and the G side applies the base interaction once per pair (twice
    when agent 0 is involved; repeating an interaction keeps a weakly fair
    schedule weakly fair). The mirror invariant is checked after every pair.
    ``p`` keeps its own parameters: running CIW_n with parameter n on the
    2n agents of f(G) is exactly the wrong-knowledge situation.
    """
    n = g.n
    fg = f_transform(g)
    base = initial_configuration(p, n)
    image = initial_configuration(p, 2 * n)
    image_steps = 0
    it = iter(base_schedule)
    for step in range(1, steps + 1):
        arc = next(it)
        for pair in expand(g, arc):
            base = apply_interaction(p, base, arc, g)
            for a in pair:
                image = apply_interaction(p, image, a, fg)
                image_steps += 1
            if not _mirrored(base, image, n):
                return MirrorResult(False, step, image_steps, step,
                                    [o.value for o in all_outputs(p, base)],
                                    [o.value for o in all_outputs(p, image)])
    return MirrorResult(True, steps, image_steps, None,
                        [o.value for o in all_outputs(p, base)],
                        [o.value for o in all_outputs(p, image)])
