import pytest

from enc_lab.graphs import (
    ChordalDecomposition,
    GraphError,
    chordal_edge_decompositions,
    cycle_graph,
    edge,
    is_chordal,
    is_valid_decomposition,
    make_graph,
    perfect_elimination_ordering,
    triangles,
)
from enc_lab.monogamy import chsh_joint_graph, chsh_targets, chord_graph

from oracles import brute_decompositions, brute_triangles, has_chordless_cycle, random_graph

SQUARE = ["X0", "X1", "X2", "X3"]


def test_make_graph_square():
    g = make_graph(SQUARE, [("X0", "X1"), ("X1", "X2"), ("X2", "X3"), ("X3", "X0")])
    assert len(g.edges) == 4
    assert g == cycle_graph(SQUARE)


def test_single_vertex_graph():
    g = make_graph(["A"], [])
    assert g.vertices == ("A",) and not g.edges


def test_duplicate_edge_stored_once():
    g = make_graph(["u", "v"], [("u", "v"), ("v", "u")])
    assert g.edges == {("u", "v")}


@pytest.mark.parametrize(
    "vertices, edges",
    [
        (["a", "a"], []),
        (["a", "b"], [("a", "c")]),
        (["a", "b"], [("a", "a")]),
    ],
)
def test_make_graph_rejects_bad_input(vertices, edges):
    with pytest.raises(GraphError):
        make_graph(vertices, edges)


@pytest.mark.parametrize("n", [3, 4, 5, 7])
def test_cycle_graph_is_two_regular(n):
    g = cycle_graph([f"X{i}" for i in range(n)])
    assert len(g.edges) == n
    assert all(len(g.neighbors(v)) == 2 for v in g.vertices)


def test_cycle_graph_too_short():
    with pytest.raises(GraphError):
        cycle_graph(["X", "Y"])


def test_chordality_examples():
    assert not is_chordal(cycle_graph(SQUARE))
    assert is_chordal(chord_graph())
    lower_left = make_graph(
        ["A0", "B1", "E0", "A1"],
        [("A0", "B1"), ("A0", "E0"), ("B1", "E0"), ("A1", "B1"), ("A1", "E0")],
    )
    assert is_chordal(lower_left)
    assert perfect_elimination_ordering(cycle_graph(SQUARE)) is None


def _check_peo(g, order):
    pos = {v: i for i, v in enumerate(order)}
    for v in order:
        later = [w for w in g.neighbors(v) if pos[w] > pos[v]]
        for a in later:
            for b in later:
                if a < b:
                    assert g.has_edge(a, b)


def test_chordality_matches_brute_force(rng):
    # 240 random graphs on up to 10 vertices, spread over densities
    agree = 0
    for trial in range(240):
        n = int(rng.integers(1, 11))
        vertices, edges = random_graph(rng, n, float(rng.uniform(0.15, 0.85)))
        g = make_graph(vertices, edges)
        expected = not has_chordless_cycle(vertices, edges)
        assert is_chordal(g) == expected, (vertices, edges)
        order = perfect_elimination_ordering(g)
        assert (order is not None) == expected
        if order is not None:
            assert sorted(order) == sorted(vertices)
            _check_peo(g, order)
        agree += 1
    assert agree == 240


def test_triangles_examples():
    assert triangles(chord_graph()) == {("X1", "X2", "X4"), ("X2", "X3", "X4")}
    assert triangles(cycle_graph(SQUARE)) == set()
    k4 = make_graph(SQUARE, [(a, b) for i, a in enumerate(SQUARE) for b in SQUARE[i + 1:]])
    assert len(triangles(k4)) == 4


def test_triangles_match_brute_force(rng):
    for _ in range(100):
        vertices, edges = random_graph(rng, int(rng.integers(3, 9)), 0.5)
        assert triangles(make_graph(vertices, edges)) == brute_triangles(vertices, edges)


def _as_sets(decomps):
    return {frozenset(sg.edges for sg in d.subgraphs) for d in decomps}


def test_two_triangle_pair_decomposition_appears():
    joint = chsh_joint_graph()
    required = {e for t in chsh_targets() for e in (edge(*p) for p in t.pairs())}
    assert len(required) == 8
    upper = frozenset(
        [edge("A0", "B1"), edge("A0", "E0"), edge("A1", "B1"), edge("A1", "E0"), edge("B1", "E0")]
    )
    lower = frozenset(
        [edge("A0", "B0"), edge("A0", "E1"), edge("A1", "B0"), edge("A1", "E1"), edge("B0", "E1")]
    )
    decomps = list(chordal_edge_decompositions(joint, required, 2))
    assert frozenset([upper, lower]) in _as_sets(decomps)
    for d in decomps:
        assert is_valid_decomposition(d, joint, required)


def test_triangle_is_its_own_decomposition():
    g = cycle_graph(["X", "Y", "Z"])
    out = list(chordal_edge_decompositions(g, g.edges, 1))
    assert len(out) == 1
    assert out[0].subgraphs[0].edges == g.edges


def test_bare_square_single_slot_is_empty():
    g = cycle_graph(SQUARE)
    assert list(chordal_edge_decompositions(g, g.edges, 1)) == []


def test_bare_square_two_slots_match_exhaustive_oracle():
    # Splitting a chordless square gives paths, which are chordal; none
    # of them contains a triangle.
    g = cycle_graph(SQUARE)
    got = list(chordal_edge_decompositions(g, g.edges, 2))
    assert _as_sets(got) == brute_decompositions(g.edges, g.edges, 2)
    assert all(not triangles(sg) for d in got for sg in d.subgraphs)


def test_decompositions_match_exhaustive_oracle(rng):
    for _ in range(25):
        vertices, edges = random_graph(rng, int(rng.integers(4, 7)), 0.6)
        if not edges:
            continue
        joint = make_graph(vertices, edges)
        k = int(rng.integers(1, min(5, len(edges)) + 1))
        idx = rng.choice(len(edges), size=k, replace=False)
        required = {edge(*edges[i]) for i in idx}
        m = int(rng.integers(1, 3))
        got = list(chordal_edge_decompositions(joint, required, m))
        for d in got:
            assert is_valid_decomposition(d, joint, required)
        assert len(_as_sets(got)) == len(got)
        assert _as_sets(got) == brute_decompositions(edges, required, m)


def test_required_edge_missing_from_joint():
    with pytest.raises(GraphError):
        list(chordal_edge_decompositions(cycle_graph(SQUARE), {edge("X0", "X2")}, 1))


def test_decomposition_round_trip():
    joint = chsh_joint_graph()
    required = {edge(*p) for t in chsh_targets() for p in t.pairs()}
    d = next(chordal_edge_decompositions(joint, required, 2))
    assert ChordalDecomposition.from_dict(d.to_dict()) == d
