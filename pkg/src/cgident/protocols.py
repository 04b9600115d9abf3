"""The three complete-graph identification protocols.

Each transition is an if/else-if chain evaluated top to bottom; a pair that
matches no guard is returned unchanged.

* CIW_n: exact knowledge of n, correct under weak fairness.
* CIW_{n,k}: as CIW_n, but the elected leader splits the population into k
  groups that count out-degrees in parallel.
* CIG: no knowledge of n, correct under global fairness. Tokens merge to
  count n; agents with equal size estimates run CIW_size.
"""

from __future__ import annotations

from typing import NamedTuple

from .core import ContractViolation, Output, Phase, ProtocolSpec

P1, P15, P2, P3, P4 = Phase.ONE, Phase.ONE_HALF, Phase.TWO, Phase.THREE, Phase.FOUR


class CiwState(NamedTuple):
    leader: bool  # True for L, False for F
    phase: Phase
    mode: int
    cnt: int

    def __repr__(self):
        return f"({'L' if self.leader else 'F'},{self.phase},{self.mode},{self.cnt})"


class CiwkState(NamedTuple):
    leader: bool
    phase: Phase
    mode: tuple  # k bits
    group: int  # k means unassigned
    cnt: int

    def __repr__(self):
        bits = "".join(map(str, self.mode))
        return (f"({'L' if self.leader else 'F'},{self.phase},{bits},"
                f"{self.group},{self.cnt})")


class CigState(NamedTuple):
    leader: bool
    phase: Phase
    mode: int
    cnt: int
    token: bool
    size: int

    def __repr__(self):
        return (f"({'L' if self.leader else 'F'},{self.phase},{self.mode},{self.cnt},"
                f"{'T' if self.token else '_'},{self.size})")

    @property
    def ciw(self) -> CiwState:
        return CiwState(self.leader, self.phase, self.mode, self.cnt)


def ciw_state(leader: str, phase: float, mode: int, cnt: int) -> CiwState:
    """Build a state from the usual tuple notation, e.g. ``ciw_state("L", 1, 0, 1)``."""
    return CiwState(leader == "L", Phase(phase), mode, cnt)


def ciwk_state(leader: str, phase: float, mode, group: int, cnt: int) -> CiwkState:
    return CiwkState(leader == "L", Phase(phase), tuple(mode), group, cnt)


def cig_state(leader: str, phase: float, mode: int, cnt: int, token: bool,
              size: int) -> CigState:
    return CigState(leader == "L", Phase(phase), mode, cnt, bool(token), size)


CIW_INITIAL = CiwState(True, P1, 0, 1)


def output_of(s) -> Output:
    return Output.YES if s.phase == P4 else Output.NO


# --------------------------------------------------------------------------
# CIW_n
# --------------------------------------------------------------------------

def ciw_n_transition(a: CiwState, b: CiwState, n: int) -> tuple[CiwState, CiwState]:
    if a.leader and b.leader:
        cnt = a.cnt + b.cnt
        b = b._replace(leader=False, cnt=0)
        if cnt == n:
            return a._replace(phase=P2, cnt=0), b
        return a._replace(cnt=cnt), b
    if a.leader and a.phase == P2 and a.mode == b.mode:
        cnt = a.cnt + 1
        b = b._replace(mode=1 - b.mode)
        if cnt == n - 1:
            return a._replace(phase=P3, cnt=1, mode=1 - a.mode), b
        return a._replace(cnt=cnt), b
    if a.leader and a.phase == P3 and b.phase == P1:
        return a._replace(leader=False), b._replace(leader=True, phase=P2)
    if a.phase == P3 and b.phase == P3 and a.cnt > 0 and b.cnt > 0:
        cnt = a.cnt + b.cnt
        b = b._replace(cnt=0)
        if cnt == n:
            return a._replace(cnt=cnt, phase=P4), b
        return a._replace(cnt=cnt), b
    if a.phase == P4:
        if b.phase != P4:
            b = b._replace(phase=P4)
        return a, b
    return a, b


def _phase_sums(config, n) -> list[str]:
    errs = []
    if all(s.phase == P1 for s in config):
        total = sum(s.cnt for s in config)
        if total != n:
            errs.append(f"phase-1 cnt sum {total} != n={n}")
    late = [s for s in config if s.phase in (P3, P4)]
    total = sum(s.cnt for s in late)
    if total != len(late):
        errs.append(f"sum of cnt over V3uV4 is {total}, |V3uV4|={len(late)}")
    return errs


def _absorption(before, after) -> list[str]:
    return [f"agent {i} left phase 4" for i, (s0, s1) in enumerate(zip(before, after))
            if s0.phase == P4 and s1.phase != P4]


def _cnt_range(config, n) -> list[str]:
    return [f"agent {i} cnt={s.cnt} outside [0,{n}]"
            for i, s in enumerate(config) if not 0 <= s.cnt <= n]


def _ciw_n_invariants(n):
    def check(before, after, arc, complete):
        errs = _phase_sums(after, n) + _cnt_range(after, n) + _absorption(before, after)
        if any(s.phase != P1 for s in after):
            leaders = sum(s.leader for s in after)
            if leaders != 1:
                errs.append(f"{leaders} leaders once some agent left phase 1")
        if not complete and any(s.phase == P4 for s in after):
            errs.append("phase-4 agent on a non-complete graph")
        return errs
    return check


def ciw_n(n: int) -> ProtocolSpec:
    if n < 2:
        raise ValueError(f"CIW_n needs n >= 2, got {n}")
    return ProtocolSpec(
        name="ciw_n",
        params={"n": n},
        initial_state=CIW_INITIAL,
        transition=lambda a, b: ciw_n_transition(a, b, n),
        output=output_of,
        invariants=_ciw_n_invariants(n),
        state_bound=16 * (n + 1),
    )


# --------------------------------------------------------------------------
# CIW_{n,k}
# --------------------------------------------------------------------------

def _flip(mode: tuple, g: int) -> tuple:
    return mode[:g] + (1 - mode[g],) + mode[g + 1:]


def ciw_nk_transition(a: CiwkState, b: CiwkState, n: int, k: int
                      ) -> tuple[CiwkState, CiwkState]:
    # leader election is restricted to phase-1 leaders; see README, "CIW_{n,k}
    # leader election guard"
    if a.leader and b.leader and a.phase == P1 and b.phase == P1:
        cnt = a.cnt + b.cnt
        b = b._replace(leader=False, cnt=0)
        if cnt == n:
            return a._replace(phase=P15, cnt=cnt), b
        return a._replace(cnt=cnt), b
    if a.leader and a.phase == P15 and b.group == k:
        cnt = a.cnt - 1
        b = b._replace(group=cnt % k)
        if cnt < k:
            b = b._replace(leader=True, phase=P2)
        if cnt == 1:
            return a._replace(leader=True, phase=P2, cnt=0, group=0), b
        return a._replace(cnt=cnt), b
    if a.leader and a.phase == P2:
        g = a.group
        if a.mode[g] == b.mode[g]:
            cnt = a.cnt + 1
            b = b._replace(mode=_flip(b.mode, g))
            if cnt == n - 1:
                return a._replace(phase=P3, cnt=1, mode=_flip(a.mode, g)), b
            return a._replace(cnt=cnt), b
    if a.leader and a.phase == P3 and b.phase == P1 and a.group == b.group:
        return a._replace(leader=False), b._replace(leader=True, phase=P2)
    if a.phase == P3 and b.phase == P3 and a.cnt > 0 and b.cnt > 0:
        cnt = a.cnt + b.cnt
        b = b._replace(cnt=0)
        if cnt == n:
            return a._replace(cnt=cnt, phase=P4), b
        return a._replace(cnt=cnt), b
    if a.phase == P4:
        if b.phase != P4:
            b = b._replace(phase=P4)
        return a, b
    return a, b


def ciw_nk_transition_literal(a: CiwkState, b: CiwkState, n: int, k: int):
    """Variant whose election rule matches any two leaders, in any phase.

    Kept only so the model checker can show why the phase-1 restriction in
    :func:`ciw_nk_transition` is needed.
    """
    if a.leader and b.leader and not (a.phase == P1 and b.phase == P1):
        cnt = a.cnt + b.cnt
        b = b._replace(leader=False, cnt=0)
        if cnt == n:
            return a._replace(phase=P15, cnt=cnt), b
        return a._replace(cnt=cnt), b
    return ciw_nk_transition(a, b, n, k)


def _ciw_nk_invariants(n, k):
    small, large = n // k, -(-n // k)

    def check(before, after, arc, complete):
        errs = _phase_sums(after, n) + _cnt_range(after, n) + _absorption(before, after)
        if any(s.phase >= P2 for s in after):
            per_group = [0] * k
            for s in after:
                if s.leader and s.group < k:
                    per_group[s.group] += 1
            bad = [g for g, c in enumerate(per_group) if c > 1]
            if bad:
                errs.append(f"groups {bad} have more than one leader")
        if all(s.group < k for s in after):
            sizes = [0] * k
            for s in after:
                sizes[s.group] += 1
            if any(z not in (small, large) for z in sizes):
                errs.append(f"group sizes {sizes} not in {{{small},{large}}}")
        if not complete and any(s.phase == P4 for s in after):
            errs.append("phase-4 agent on a non-complete graph")
        return errs
    return check


def ciw_nk(n: int, k: int, literal_election: bool = False) -> ProtocolSpec:
    if n < 2:
        raise ValueError(f"CIW_(n,k) needs n >= 2, got {n}")
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, n={n}], got {k}")
    step = ciw_nk_transition_literal if literal_election else ciw_nk_transition
    return ProtocolSpec(
        name="ciw_nk",
        params={"n": n, "k": k},
        initial_state=CiwkState(True, P1, (0,) * k, k, 1),
        transition=lambda a, b: step(a, b, n, k),
        output=output_of,
        invariants=_ciw_nk_invariants(n, k),
        state_bound=10 * (n + 1) * (k + 1) * 2 ** k,
    )


# --------------------------------------------------------------------------
# CIG
# --------------------------------------------------------------------------

def _reset(s: CigState) -> CigState:
    return s._replace(leader=True, phase=P1, mode=0, cnt=1)


def cig_transition(a: CigState, b: CigState) -> tuple[CigState, CigState]:
    if a.token and b.token:
        total = a.size + b.size
        a = _reset(a._replace(size=total))
        b = _reset(b._replace(size=total, token=False))
    elif (a.token and a.size <= b.size) or (b.token and b.size <= a.size):
        # token hand-off: token and size values trade places, no reset
        a, b = (a._replace(token=b.token, size=b.size),
                b._replace(token=a.token, size=a.size))
    elif a.size != b.size:
        if a.size > b.size:
            b = _reset(b._replace(token=a.token, size=a.size))
            a = a._replace(token=False)
        else:
            a = _reset(a._replace(token=b.token, size=b.size))
            b = b._replace(token=False)
    if a.size == b.size:
        size = a.size
        ca, cb = ciw_n_transition(a.ciw, b.ciw, size)
        a = a._replace(leader=ca.leader, phase=ca.phase, mode=ca.mode,
                       cnt=min(ca.cnt, size))
        b = b._replace(leader=cb.leader, phase=cb.phase, mode=cb.mode,
                       cnt=min(cb.cnt, size))
    return a, b


def _cig_invariants(n, strict=False):
    def check(before, after, arc, complete):
        errs = []
        total = sum(s.size for s in after if s.token)
        if total != n:
            errs.append(f"token-size sum {total} != n={n}")
        for i, s in enumerate(after):
            if not 1 <= s.size <= n:
                errs.append(f"agent {i} size={s.size} outside [1,{n}]")
            if not 0 <= s.cnt <= n:
                errs.append(f"agent {i} cnt={s.cnt} outside [0,{n}]")
            if strict and s.cnt > s.size:
                errs.append(f"agent {i} cnt={s.cnt} > size={s.size}")
        u, v = arc
        old = sorted((before[u].size, before[v].size))
        new = sorted((after[u].size, after[v].size))
        if new[0] < old[0] or new[1] < old[1]:
            errs.append(f"sizes of interacting pair shrank {old} -> {new}")
        if strict:
            for i in (u, v):
                if after[i].size < before[i].size:
                    errs.append(f"agent {i} size decreased "
                                f"{before[i].size} -> {after[i].size}")
        for i, (s0, s1) in enumerate(zip(before, after)):
            if s0.size == n and s1.size == n and s0.phase == P4 and s1.phase != P4:
                errs.append(f"size-n agent {i} left phase 4")
        if not complete and any(s.phase == P4 and s.size == n for s in after):
            errs.append("phase-4 agent with size n on a non-complete graph")
        return errs
    return check


def cig(n: int | None = None, strict_invariants: bool = False) -> ProtocolSpec:
    """CIG is uniform; ``n`` only configures the invariant checks."""
    check = _cig_invariants(n, strict_invariants) if n is not None else (
        lambda before, after, arc, complete:
        _cig_invariants(len(after), strict_invariants)(before, after, arc, complete))
    return ProtocolSpec(
        name="cig",
        params={},
        initial_state=CigState(True, P1, 0, 1, True, 1),
        transition=cig_transition,
        output=output_of,
        invariants=check,
        absorbing_scope=lambda s, n: s.size == n,
        state_bound=None if n is None else 32 * n * (n + 1),
    )


def make_protocol(name: str, n: int, k: int | None = None, **kw) -> ProtocolSpec:
    if name == "ciw_n":
        return ciw_n(n)
    if name == "ciw_nk":
        if k is None:
            raise ValueError("ciw_nk needs k")
        return ciw_nk(n, k, **kw)
    if name == "cig":
        return cig(n, **kw)
    raise ValueError(f"unknown protocol {name!r}")


def check_state_bounds(p: ProtocolSpec, config) -> None:
    """Raise if any counter left its proven range (never wrap silently)."""
    n = len(config)
    for i, s in enumerate(config):
        if not 0 <= s.cnt <= n:
            raise ContractViolation(f"agent {i}: cnt={s.cnt} outside [0,{n}]")
        if p.name == "cig" and not 1 <= s.size <= n:
            raise ContractViolation(f"agent {i}: size={s.size} outside [1,{n}]")
