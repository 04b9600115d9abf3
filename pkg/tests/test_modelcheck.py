import dataclasses

import pytest

from cgident.core import Output, Phase, apply_interaction, initial_configuration
from cgident.graph import complete, generate
from cgident.modelcheck import (InstanceTooLarge, check_global_fairness,
                                check_weak_fairness_negative, explore, output_stable, verify)
from cgident.protocols import P3, cig, ciw_n, ciw_nk

from .conftest import fixture_graphs


def _no_phase4(p):
    def t(a, b):
        a2, b2 = p.transition(a, b)
        if a2.phase == Phase.FOUR and a.phase != Phase.FOUR:
            a2 = a2._replace(phase=P3)
        return a2, b2
    return dataclasses.replace(p, name="ciw_n_mutant", transition=t)


def test_ciw2_k2_small_space():
    cg = explore(ciw_n(2), complete(2))
    assert 1 < cg.size < 48 ** 2


def test_ciw2_solves():
    v = verify(ciw_n(2), complete(2))
    assert v.solves and v.expected == Output.YES


def test_ring_initial_is_stable():
    g = generate("directed_ring", 3)
    cg = explore(ciw_n(3), g)
    assert output_stable(cg)[0]
    assert check_global_fairness(cg, Output.NO).solves


def test_cig_k2_closes():
    cg = explore(cig(2), complete(2))
    assert all(s.size <= 2 and s.cnt <= 2 for s in cg.states)


def test_mutant_fails_with_replayable_witness():
    p = _no_phase4(ciw_n(2))
    g = complete(2)
    v = verify(p, g, Output.YES)
    assert not v.solves and v.witness is not None
    c = initial_configuration(p, 2)
    for arc in v.witness_path:
        c = apply_interaction(p, c, arc, g)
    assert c == v.witness
    assert "unreachable" in v.reason or "wrong" in v.reason


def _forward_closure_stable(cg):
    out = []
    for i in range(cg.size):
        seen, stack = {i}, [i]
        while stack:
            for _, j in cg.succ[stack.pop()]:
                if j not in seen:
                    seen.add(j)
                    stack.append(j)
        out.append(all(cg.outputs(j) == cg.outputs(i) for j in seen))
    return out


@pytest.mark.parametrize("proto", [ciw_n(2), ciw_nk(2, 1), ciw_nk(2, 2), cig(2),
                                   _no_phase4(ciw_n(2))])
def test_condensation_matches_forward_closure(proto):
    for g in fixture_graphs(2):
        cg = explore(proto, g)
        assert output_stable(cg) == _forward_closure_stable(cg)


def test_weak_fairness_negative_examples():
    assert check_weak_fairness_negative(ciw_n(3), generate("directed_line", 3))
    assert check_weak_fairness_negative(ciw_n(3), generate("near_complete_minus_one_arc", 3, 0))
    assert not check_weak_fairness_negative(ciw_n(2), complete(2))


def test_cap():
    with pytest.raises(InstanceTooLarge):
        explore(cig(3), complete(3), cap=50)


def test_literal_nk_election_counterexamples():
    v = verify(ciw_nk(2, 2, literal_election=True), complete(2))
    assert not v.solves and v.witness is not None
    assert v.stable_count == v.reachable_count  # nothing ever reaches phase 4
    v = verify(ciw_nk(3, 3, literal_election=True), complete(3))
    assert not v.solves


def test_cig_strict_reading_fails_on_k3():
    """The token swap between equal-size agents moves the token without a
    reset; combined with propagation it can leave an agent whose size drops
    while its counter stays, so cnt <= size and per-agent size monotonicity
    are not invariants of the rule set (correctness is unaffected)."""
    p = cig(3, strict_invariants=True)
    g = complete(3)
    cg = explore(p, g)
    bad = 0
    for i, es in enumerate(cg.succ):
        before = cg.configuration(i)
        for ai, j in es:
            bad += bool(p.invariants(before, cg.configuration(j), g.arcs[ai], True))
    assert bad > 0
    assert verify(cig(3), g).solves
