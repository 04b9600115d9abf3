"""Execution driver: runs a protocol under a schedule and measures stabilization.

Stabilization is detected by protocol-specific certificates:

* CIW_n / CIW_{n,k} on a complete graph: every agent is in phase 4 (phase 4
  is absorbing, so outputs are ``yes`` forever after).
* CIG on a complete graph: every agent is in phase 4 with size n and exactly
  one token remains.
* Negative mode (the graph is claimed non-complete): the CIW protocols are
  stable at time 0; CIG is counted as stable from the first step where all
  sizes equal n and one token remains. The run still executes the whole
  horizon and counts "sightings": steps at which some agent outputs ``yes``
  (for CIG, some agent with size n).

Two execution paths share one schedule stream: a reference path over the
protocol objects (invariant checks and state census available) and a
compiled path (:mod:`cgident.fast`) for long runs.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import fast
from .core import (ContractViolation, Phase, ProtocolSpec, StateCensus,
                   all_outputs, apply_interaction, initial_configuration)
from .graph import Digraph, is_complete
from .protocols import CigState, CiwkState, CiwState
from .scheduler import RoundCounter, Schedule

CHUNK = 1 << 15


class InvariantViolation(RuntimeError):
    """Raised by :func:`run`; ``trace`` holds a minimal reproduction."""

    def __init__(self, trace: dict):
        self.trace = trace
        super().__init__(
            f"invariant violated at step {trace['step']} on arc {trace['arc']}: "
            + "; ".join(trace["messages"]))


def default_max_steps(n: int) -> int:
    return 100 * n ** 3 * math.ceil(math.log(n))


def default_horizon(n: int) -> int:
    return 50 * n ** 3 * math.ceil(math.log(n))


@dataclass
class RunRecord:
    graph: dict
    protocol: str
    params: dict
    schedule: str
    seed: int
    stream: int
    mode: str
    steps_run: int
    interactions_to_stabilize: int | None
    rounds_to_stabilize: int | None
    phase4_sightings: int
    invariant_violations: list = field(default_factory=list)
    state_census: dict | None = None
    final_outputs: list = field(default_factory=list)
    max_cnt: int = 0
    max_size: int = 0

    @property
    def stabilized(self) -> bool:
        return self.interactions_to_stabilize is not None

    @property
    def ok(self) -> bool:
        if self.invariant_violations:
            return False
        if self.mode == "negative":
            return self.phase4_sightings == 0
        return self.stabilized

    def to_json(self) -> dict:
        d = asdict(self)
        d["interactions_to_stabilize"] = (self.interactions_to_stabilize
                                          if self.stabilized else "not observed")
        return d


def _certified(p: ProtocolSpec, c, n: int) -> bool:
    if p.name == "cig":
        return (all(s.phase == Phase.FOUR and s.size == n for s in c)
                and sum(s.token for s in c) == 1)
    return all(s.phase == Phase.FOUR for s in c)


def _sighting(p: ProtocolSpec, c, n: int) -> bool:
    if p.name == "cig":
        return any(s.phase == Phase.FOUR and s.size == n for s in c)
    return any(s.phase == Phase.FOUR for s in c)


def _size_settled(c, n: int) -> bool:
    return all(s.size == n for s in c) and sum(s.token for s in c) == 1


def _graph_desc(g: Digraph) -> dict:
    return {"n": g.n, "m": g.m, "complete": is_complete(g)}


def run(p: ProtocolSpec, g: Digraph, schedule: Schedule, *, mode: str = "positive",
        max_steps: int | None = None, invariant_checks: bool = True,
        census: bool = False, fast_path: bool = False,
        abort_on_violation: bool = True) -> RunRecord:
    """Run one execution from the all-initial configuration.

    In positive mode the run stops at the first certifying step or after
    ``max_steps``; in negative mode it always runs ``max_steps`` steps
    (default: the negative horizon).
    """
    if mode not in ("positive", "negative"):
        raise ValueError(f"mode must be positive or negative, got {mode!r}")
    if "n" in p.params and p.params["n"] != g.n:
        raise ValueError(f"protocol parameter n={p.params['n']} but graph has {g.n} agents")
    if max_steps is None:
        max_steps = default_horizon(g.n) if mode == "negative" else default_max_steps(g.n)
    if fast_path:
        if invariant_checks or census:
            raise ValueError("the compiled path has no invariant checks or census")
        return _run_fast(p, g, schedule, mode, max_steps)
    return _run_reference(p, g, schedule, mode, max_steps, invariant_checks,
                          census, abort_on_violation)


def _finish_negative(p, n, size_stable_step):
    if p.name == "cig":
        return size_stable_step, None
    return 0, 0


def _run_reference(p, g, schedule, mode, max_steps, invariant_checks, census,
                   abort_on_violation) -> RunRecord:
    n = g.n
    complete = is_complete(g)
    config = initial_configuration(p, n)
    rc = RoundCounter.for_graph(g)
    cen = StateCensus() if census else None
    if cen is not None:
        cen.observe(config)
    violations: list = []
    cert_step = cert_round = None
    size_stable_step = None
    sightings = 0
    max_cnt = max(s.cnt for s in config)
    max_size = max(getattr(s, "size", 0) for s in config)
    steps = 0
    while steps < max_steps:
        arc = schedule.next_arc()
        this_round = rc.current_round
        rc.advance(arc)
        before = config
        config = apply_interaction(p, config, arc)
        steps += 1
        u, v = arc
        for s in (config[u], config[v]):
            max_cnt = max(max_cnt, s.cnt)
            max_size = max(max_size, getattr(s, "size", 0))
        if cen is not None and config is not before:
            cen.observe((config[u], config[v]))
        if invariant_checks:
            msgs = p.invariants(before, config, arc, complete)
            if msgs:
                entry = {"step": steps, "arc": list(arc), "messages": msgs}
                violations.append(entry)
                if abort_on_violation:
                    raise InvariantViolation({
                        **entry, "protocol": p.describe(), "graph": [list(a) for a in g.arcs],
                        "n": n, "schedule": schedule.kind, "seed": schedule.seed,
                        "stream": schedule.stream})
        if _sighting(p, config, n):
            sightings += 1
        if p.name == "cig" and size_stable_step is None and _size_settled(config, n):
            size_stable_step = steps
        if cert_step is None and _certified(p, config, n):
            cert_step, cert_round = steps, this_round
            if mode == "positive":
                break
    if mode == "negative":
        cert_step, cert_round = _finish_negative(p, n, size_stable_step)
    return RunRecord(
        graph=_graph_desc(g), protocol=p.name, params=dict(p.params),
        schedule=schedule.kind, seed=schedule.seed, stream=schedule.stream, mode=mode,
        steps_run=steps, interactions_to_stabilize=cert_step,
        rounds_to_stabilize=cert_round, phase4_sightings=sightings,
        invariant_violations=violations,
        state_census=cen.to_dict() if cen is not None else None,
        final_outputs=[o.value for o in all_outputs(p, config)],
        max_cnt=max_cnt, max_size=max_size)


# --------------------------------------------------------------------------
# compiled path
# --------------------------------------------------------------------------

def to_arrays(p: ProtocolSpec, config) -> dict:
    n = len(config)
    arr = {name: np.zeros(n, dtype=np.int64) for name in "L PH MO G C T S".split()}
    for x, s in enumerate(config):
        arr["L"][x] = int(s.leader)
        arr["PH"][x] = int(round(float(s.phase) * 2))
        arr["C"][x] = s.cnt
        if isinstance(s, CiwkState):
            arr["MO"][x] = sum(bit << g for g, bit in enumerate(s.mode))
            arr["G"][x] = s.group
        else:
            arr["MO"][x] = s.mode
        if isinstance(s, CigState):
            arr["T"][x] = int(s.token)
            arr["S"][x] = s.size
    return arr


def from_arrays(p: ProtocolSpec, arr: dict) -> tuple:
    n = len(arr["L"])
    out = []
    for x in range(n):
        leader = bool(arr["L"][x])
        phase = Phase(arr["PH"][x] / 2)
        cnt = int(arr["C"][x])
        if p.name == "ciw_nk":
            k = p.params["k"]
            mode = tuple((int(arr["MO"][x]) >> g) & 1 for g in range(k))
            out.append(CiwkState(leader, phase, mode, int(arr["G"][x]), cnt))
        elif p.name == "cig":
            out.append(CigState(leader, phase, int(arr["MO"][x]), cnt,
                                bool(arr["T"][x]), int(arr["S"][x])))
        else:
            out.append(CiwState(leader, phase, int(arr["MO"][x]), cnt))
    return tuple(out)


def _run_fast(p, g, schedule, mode, max_steps) -> RunRecord:
    n = g.n
    proto = fast.PROTOCOL_IDS[p.name]
    k = p.params.get("k", 0)
    if proto == fast.CIW_NK and k > 62:
        raise ValueError("compiled path supports k <= 62")
    arr = to_arrays(p, initial_configuration(p, n))
    src, dst = g.arc_arrays()
    seen = np.full(g.m, -1, dtype=np.int64)
    st = np.zeros(fast.N_STATS, dtype=np.int64)
    fast.init_stats(proto, n, arr["PH"], arr["T"], arr["S"], st)
    stop = mode == "positive"
    done = 0
    while done < max_steps:
        count = min(CHUNK, max_steps - done)
        idx = schedule.next_indices(count)
        used = fast.run_block(proto, n, k, arr["L"], arr["PH"], arr["MO"], arr["G"],
                              arr["C"], arr["T"], arr["S"], src, dst, idx, seen, st, stop)
        done += used
        if used < count:
            # hand the unused tail back so the stream position stays exact
            schedule.unread(count - used)
            break
    config = from_arrays(p, arr)
    cert_step = int(st[fast.S_CERT_STEP]) if st[fast.S_CERT_STEP] >= 0 else None
    cert_round = int(st[fast.S_CERT_ROUND]) if cert_step is not None else None
    if mode == "negative":
        sss = int(st[fast.S_SIZE_STABLE_STEP])
        cert_step, cert_round = _finish_negative(p, n, sss if sss >= 0 else None)
    return RunRecord(
        graph=_graph_desc(g), protocol=p.name, params=dict(p.params),
        schedule=schedule.kind, seed=schedule.seed, stream=schedule.stream, mode=mode,
        steps_run=int(st[fast.S_STEPS]), interactions_to_stabilize=cert_step,
        rounds_to_stabilize=cert_round, phase4_sightings=int(st[fast.S_SIGHTINGS]),
        final_outputs=[o.value for o in all_outputs(p, config)],
        max_cnt=int(max(st[fast.S_MAX_CNT], arr["C"].max())),
        max_size=int(max(st[fast.S_MAX_SIZE], arr["S"].max())))


def final_configuration_fast(p: ProtocolSpec, g: Digraph, schedule: Schedule,
                             steps: int) -> tuple:
    """Configuration after exactly ``steps`` interactions on the compiled path."""
    n = g.n
    proto = fast.PROTOCOL_IDS[p.name]
    arr = to_arrays(p, initial_configuration(p, n))
    src, dst = g.arc_arrays()
    seen = np.full(g.m, -1, dtype=np.int64)
    st = np.zeros(fast.N_STATS, dtype=np.int64)
    fast.init_stats(proto, n, arr["PH"], arr["T"], arr["S"], st)
    fast.run_block(proto, n, p.params.get("k", 0), arr["L"], arr["PH"], arr["MO"],
                   arr["G"], arr["C"], arr["T"], arr["S"], src, dst,
                   np.ascontiguousarray(schedule.next_indices(steps)), seen, st, False)
    return from_arrays(p, arr)


def final_configuration_reference(p: ProtocolSpec, g: Digraph, schedule: Schedule,
                                  steps: int) -> tuple:
    config = initial_configuration(p, g.n)
    for _ in range(steps):
        config = apply_interaction(p, config, schedule.next_arc())
    return config


# --------------------------------------------------------------------------
# scaling measurements
# --------------------------------------------------------------------------

CSV_HEADER = "protocol,n,k,graph,schedule,seed,trials,mean_steps,std_steps,mean_rounds"


@dataclass
class ScalingRow:
    protocol: str
    n: int
    k: int | None
    graph: str
    schedule: str
    seed: int
    trials: int
    mean_steps: float
    std_steps: float
    mean_rounds: float
    flagged: int = 0  # trials that hit max_steps without a certificate
    steps: list = field(default_factory=list)

    def csv(self) -> str:
        k = "" if self.k is None else str(self.k)
        return (f"{self.protocol},{self.n},{k},{self.graph},{self.schedule},{self.seed},"
                f"{self.trials},{self.mean_steps:.6g},{self.std_steps:.6g},"
                f"{self.mean_rounds:.6g}")


def _trial(args):
    from .graph import generate
    from .protocols import make_protocol

    name, n, k, graph_kind, sched_kind, seed, trial, max_steps = args
    g = generate(graph_kind, n, seed)
    p = make_protocol(name, n, k)
    s = Schedule(g, sched_kind, seed, stream=trial)
    rec = run(p, g, s, max_steps=max_steps, invariant_checks=False, fast_path=True)
    return rec.interactions_to_stabilize, rec.rounds_to_stabilize


def measure_scaling(protocol: str, sizes, trials: int, seed: int = 0, *,
                    k: int | None = None, ks=None, graph: str = "complete",
                    schedule: str = "uniform_random", max_steps: int | None = None,
                    jobs: int = 1) -> list[ScalingRow]:
    """Per-(n, k) statistics over independent seeded trials.

    Trial ``i`` uses stream ``(seed, i)`` for every (n, k), so rows that
    differ only in k are paired trial by trial.
    """
    sizes = list(sizes)
    if not sizes:
        raise ValueError("empty size list")
    ks = list(ks) if ks is not None else [k]
    tasks = []
    for n in sizes:
        for kk in ks:
            cap = max_steps if max_steps is not None else default_max_steps(n)
            tasks.append([(protocol, n, kk, graph, schedule, seed, t, cap)
                          for t in range(trials)])
    flat = [a for group in tasks for a in group]
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(jobs) as ex:
            results = list(ex.map(_trial, flat, chunksize=1))
    else:
        results = [_trial(a) for a in flat]
    rows = []
    pos = 0
    for group in tasks:
        res = results[pos:pos + len(group)]
        pos += len(group)
        _, n, kk, *_ = group[0]
        ok = [r for r in res if r[0] is not None]
        steps = np.array([r[0] for r in ok], dtype=float)
        rounds = np.array([r[1] for r in ok], dtype=float)
        rows.append(ScalingRow(
            protocol, n, kk, graph, schedule, seed, trials,
            float(steps.mean()) if ok else float("nan"),
            float(steps.std(ddof=1)) if len(ok) > 1 else 0.0,
            float(rounds.mean()) if ok else float("nan"),
            flagged=len(res) - len(ok), steps=[r[0] for r in res]))
    return rows


def scaling_csv(rows) -> str:
    return "\n".join([CSV_HEADER] + [r.csv() for r in rows]) + "\n"
