"""Numerical helpers: random-walk hitting times, coupon collector, log-log fits."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .graph import UndirectedMultigraph


@dataclass
class HittingTimeTable:
    H: np.ndarray  # H[s, t]: expected steps for a walk from s to first reach t
    max_hitting: float


def _connected(w: np.ndarray) -> bool:
    n = w.shape[0]
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for v in np.nonzero(w[u])[0]:
            if v not in seen:
                seen.add(int(v))
                stack.append(int(v))
    return len(seen) == n


def hitting_times(m: UndirectedMultigraph) -> HittingTimeTable:
    """Exact hitting times of the simple random walk on a multigraph.

    A walk at s moves along one of its incident edges chosen uniformly, so a
    doubled edge is twice as likely. For each target t the system
    h(t) = 0, h(s) = 1 + sum_u P[s,u] h(u) is solved directly.
    """
    w = m.weight_matrix()
    n = m.n
    if n < 1 or not _connected(w):
        raise ValueError("hitting times need a connected multigraph")
    P = w / w.sum(axis=1, keepdims=True)
    H = np.zeros((n, n))
    for t in range(n):
        rest = [s for s in range(n) if s != t]
        if not rest:
            continue
        A = np.eye(n - 1) - P[np.ix_(rest, rest)]
        H[rest, t] = np.linalg.solve(A, np.ones(n - 1))
    return HittingTimeTable(H, float(H.max()))


def harmonic(t: int) -> Fraction:
    return sum((Fraction(1, i) for i in range(1, t + 1)), Fraction(0))


def coupon_collector_expect(types: int) -> float:
    """Expected draws to see all ``types`` equally likely coupons: t * H_t."""
    if types < 1:
        raise ValueError("types must be >= 1")
    return float(types * harmonic(types))


def loglog_slope(points) -> float:
    """Least-squares slope of ln(mean) against ln(n)."""
    pts = list(points)
    if len(pts) < 3:
        raise ValueError("need at least 3 points")
    xs = np.array([p[0] for p in pts], dtype=float)
    ys = np.array([p[1] for p in pts], dtype=float)
    if (xs <= 0).any() or (ys <= 0).any():
        raise ValueError("points must be positive")
    slope, _ = np.polyfit(np.log(xs), np.log(ys), 1)
    return float(slope)
