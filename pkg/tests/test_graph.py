import pytest
from hypothesis import given, strategies as st

from cgident.graph import (GENERATOR_KINDS, Digraph, GraphParseError, complete,
                           format_graph, generate, is_complete, parse_graph, read_graph,
                           to_undirected_multigraph, validate, write_graph)

DATA = __import__("pathlib").Path(__file__).parent / "data"


def test_validate_complete():
    assert validate(complete(3)) == (True, "ok")


def test_validate_two_components():
    g = Digraph(4, ((0, 1), (1, 0), (2, 3), (3, 2)))
    assert validate(g) == (False, "not weakly connected")


def test_validate_self_loop():
    ok, msg = validate(Digraph(2, ((0, 1), (1, 1))))
    assert not ok and "self-loop" in msg


def test_validate_duplicate_and_small():
    assert not validate(Digraph(2, ((0, 1), (0, 1))))[0]
    assert validate(Digraph(1, ()))[1] == "n < 2"


def test_is_complete_examples():
    k4 = complete(4)
    assert is_complete(k4)
    assert not is_complete(Digraph(4, tuple(a for a in k4.arcs if a != (2, 3))))
    assert not is_complete(generate("directed_ring", 3))


def test_generate_examples():
    assert set(generate("complete", 3).arcs) == {(u, v) for u in range(3) for v in range(3) if u != v}
    g = generate("near_complete_minus_one_arc", 3, seed=5)
    assert g.m == 5 and not is_complete(g) and validate(g)[0]
    assert generate("directed_ring", 4).arcs == ((0, 1), (1, 2), (2, 3), (3, 0))


def test_generate_rejects_small_n():
    with pytest.raises(ValueError):
        generate("complete", 1)


def test_random_generator_is_seeded():
    assert generate("random_weakly_connected", 12, 3) == generate("random_weakly_connected", 12, 3)


@pytest.mark.parametrize("kind", GENERATOR_KINDS)
@pytest.mark.parametrize("n", list(range(2, 65)))
def test_generators_valid_and_classified(kind, n):
    g = generate(kind, n, seed=n)
    assert validate(g) == (True, "ok")
    assert is_complete(g) == (kind == "complete")
    assert len(to_undirected_multigraph(g).edges) == g.m


def test_multigraph_examples():
    assert to_undirected_multigraph(complete(2)).edges == ((0, 1), (0, 1))
    ring = to_undirected_multigraph(generate("directed_ring", 3))
    assert sorted(ring.edges) == [(0, 1), (0, 2), (1, 2)]
    k3 = to_undirected_multigraph(complete(3))
    assert len(k3.edges) == 6
    assert all(k3.multiplicity(u, v) == 2 for u, v in [(0, 1), (0, 2), (1, 2)])


def test_round_trip_fixture(tmp_path):
    g = read_graph(DATA / "k3.graph")
    assert g == complete(3)
    out = tmp_path / "k3.graph"
    write_graph(g, out)
    assert read_graph(out) == g
    assert format_graph(read_graph(out)) == format_graph(g)


@pytest.mark.parametrize("text, fragment", [
    ("3\n0 1\n2 2\n", "self-loop at line 3"),
    ("3\n0 3\n", "out of range at line 2"),
    ("3\n0 1\n0 1\n", "duplicate arc at line 3"),
    ("3\n0 x\n", "malformed line 2"),
    ("# only a comment\n", "empty"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(GraphParseError, match=fragment):
        parse_graph(text)


@given(st.integers(2, 10), st.integers(0, 2**32))
def test_random_graph_round_trips(n, seed):
    g = generate("random_weakly_connected", n, seed)
    assert parse_graph(format_graph(g)) == g
