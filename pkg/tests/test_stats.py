import numpy as np
import pytest

from cgident.graph import UndirectedMultigraph, complete, generate, to_undirected_multigraph
from cgident.scheduler import expected_round_length_check
from cgident.stats import coupon_collector_expect, harmonic, hitting_times, loglog_slope


def _walk_oracle(m: UndirectedMultigraph, s: int, t: int, walks: int, seed: int):
    """Monte Carlo mean and standard error of the hitting time s -> t."""
    w = m.weight_matrix()
    P = w / w.sum(axis=1, keepdims=True)
    cum = np.cumsum(P, axis=1)
    rng = np.random.default_rng(seed)
    pos = np.full(walks, s)
    steps = np.zeros(walks, dtype=np.int64)
    active = pos != t
    while active.any():
        u = rng.random(active.sum())
        cur = pos[active]
        nxt = (u[:, None] > cum[cur]).sum(axis=1)
        pos[active] = nxt
        steps[active] += 1
        active = pos != t
    return steps.mean(), steps.std(ddof=1) / np.sqrt(walks)


def test_k2_hitting():
    table = hitting_times(to_undirected_multigraph(complete(2)))
    assert table.H[0, 1] == pytest.approx(1.0)
    assert table.max_hitting == pytest.approx(1.0)


def test_k3_hitting():
    table = hitting_times(to_undirected_multigraph(complete(3)))
    off = table.H[~np.eye(3, dtype=bool)]
    assert np.allclose(off, 2.0)
    assert np.allclose(np.diag(table.H), 0.0)


def test_four_cycle():
    m = UndirectedMultigraph(4, ((0, 1), (1, 2), (2, 3), (3, 0)))
    assert hitting_times(m).max_hitting == pytest.approx(4.0)


def test_disconnected_raises():
    with pytest.raises(ValueError):
        hitting_times(UndirectedMultigraph(4, ((0, 1), (2, 3))))


FIXTURES = {
    "k3": to_undirected_multigraph(complete(3)),
    "c4": UndirectedMultigraph(4, ((0, 1), (1, 2), (2, 3), (3, 0))),
    "ring5": to_undirected_multigraph(generate("directed_ring", 5)),
    "star5": to_undirected_multigraph(generate("star_bidir", 5)),
    "line4": to_undirected_multigraph(generate("directed_line", 4)),
}


@pytest.mark.parametrize("name", sorted(FIXTURES))
def test_hitting_times_match_monte_carlo(name):
    m = FIXTURES[name]
    H = hitting_times(m).H
    s, t = np.unravel_index(np.argmax(H), H.shape)
    mean, se = _walk_oracle(m, int(s), int(t), 100_000, seed=len(name))
    assert abs(mean - H[s, t]) <= max(3 * se, 0.0)
    assert abs(mean - H[s, t]) <= 0.02 * H[s, t]


def test_coupon_values():
    assert coupon_collector_expect(1) == 1
    assert coupon_collector_expect(2) == 3
    assert coupon_collector_expect(6) == pytest.approx(14.7)
    assert harmonic(3) * 6 == 11
    with pytest.raises(ValueError):
        coupon_collector_expect(0)


@pytest.mark.parametrize("n", [2, 3, 4])  # |E| = 2, 6, 12
def test_coupon_matches_empirical_round_length(n):
    g = complete(n)
    mean = expected_round_length_check(g, 50_000, seed=100 + n)
    assert mean == pytest.approx(coupon_collector_expect(g.m), rel=0.05)


def test_slope_exact_power():
    assert loglog_slope([(n, n ** 3) for n in (8, 16, 32, 64)]) == pytest.approx(3.0, abs=1e-9)


def test_slope_with_log_factor():
    s = loglog_slope([(n, n ** 3 * np.log(n)) for n in (8, 16, 32, 64)])
    assert s == pytest.approx(3.3, abs=0.05)


def test_slope_preconditions():
    with pytest.raises(ValueError):
        loglog_slope([(8, 1.0), (16, 2.0)])
    with pytest.raises(ValueError):
        loglog_slope([(8, 1.0), (16, 0.0), (32, 3.0)])
