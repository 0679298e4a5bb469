"""Commutation graphs, chordality and chordal edge decompositions.

Vertices are observable labels; an edge joins two observables that commute.
Edges are stored as sorted label pairs so membership is order-insensitive.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

Edge = tuple[str, str]


class GraphError(ValueError):
    """Raised for malformed graphs or invalid decomposition requests."""


def edge(u: str, v: str) -> Edge:
    """Canonical (sorted) form of an undirected edge."""
    if u == v:
        raise GraphError(f"self-loop on {u!r}")
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class CommutationGraph:
    vertices: tuple[str, ...]
    edges: frozenset[Edge]

    def __post_init__(self):
        if len(set(self.vertices)) != len(self.vertices):
            raise GraphError("duplicate vertex label")
        known = set(self.vertices)
        for u, v in self.edges:
            if u == v:
                raise GraphError(f"self-loop on {u!r}")
            if u not in known or v not in known:
                raise GraphError(f"edge ({u}, {v}) has an undeclared endpoint")
            if u > v:
                raise GraphError("edges must be canonical; use make_graph")

    def has_edge(self, u: str, v: str) -> bool:
        return u != v and edge(u, v) in self.edges

    def neighbors(self, v: str) -> set[str]:
        out = set()
        for a, b in self.edges:
            if a == v:
                out.add(b)
            elif b == v:
                out.add(a)
        return out

    def adjacency(self) -> dict[str, set[str]]:
        adj: dict[str, set[str]] = {v: set() for v in self.vertices}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        return adj

    def sorted_edges(self) -> list[Edge]:
        return sorted(self.edges)

    def is_subgraph_of(self, other: "CommutationGraph") -> bool:
        return set(self.vertices) <= set(other.vertices) and self.edges <= other.edges

    def to_dict(self) -> dict:
        return {"vertices": list(self.vertices), "edges": [list(e) for e in self.sorted_edges()]}

    @classmethod
    def from_dict(cls, data: dict) -> "CommutationGraph":
        try:
            vertices = data["vertices"]
            edges = data["edges"]
        except (KeyError, TypeError) as exc:
            raise GraphError("graph JSON needs 'vertices' and 'edges'") from exc
        pairs = []
        for item in edges:
            if not isinstance(item, (list, tuple)) or len(item) != 2:
                raise GraphError(f"bad edge entry {item!r}")
            pairs.append((str(item[0]), str(item[1])))
        return make_graph([str(v) for v in vertices], pairs)


def make_graph(vertices: Sequence[str], edges: Iterable[tuple[str, str]] = ()) -> CommutationGraph:
    """Build a normalized graph; duplicate or reversed edges collapse to one."""
    vertices = tuple(vertices)
    if len(set(vertices)) != len(vertices):
        dupes = sorted({v for v in vertices if vertices.count(v) > 1})
        raise GraphError(f"duplicate vertex labels: {dupes}")
    known = set(vertices)
    canon = set()
    for u, v in edges:
        if u not in known or v not in known:
            raise GraphError(f"edge ({u}, {v}) has an undeclared endpoint")
        canon.add(edge(u, v))
    return CommutationGraph(vertices, frozenset(canon))


def cycle_graph(vertices: Sequence[str]) -> CommutationGraph:
    """The n-cycle X0 - X1 - ... - X(n-1) - X0."""
    n = len(vertices)
    if n < 3:
        raise GraphError(f"a cycle needs at least 3 vertices, got {n}")
    return make_graph(vertices, [(vertices[i], vertices[(i + 1) % n]) for i in range(n)])


def subgraph_from_edges(edges: Iterable[Edge]) -> CommutationGraph:
    """Graph spanned by an edge set; vertices are the endpoints, sorted."""
    edges = {edge(u, v) for u, v in edges}
    verts = sorted({x for e in edges for x in e})
    return CommutationGraph(tuple(verts), frozenset(edges))


def _mcs_order(adj: dict[str, set[str]]) -> list[str]:
    # Maximum cardinality search; ties broken by smallest label.
    weight = {v: 0 for v in adj}
    order: list[str] = []
    remaining = set(adj)
    while remaining:
        v = min(remaining, key=lambda x: (-weight[x], x))
        remaining.remove(v)
        order.append(v)
        for w in adj[v]:
            if w in remaining:
                weight[w] += 1
    return order


def _is_chordal_adj(adj: dict[str, set[str]]) -> bool:
    order = _mcs_order(adj)
    pos = {v: i for i, v in enumerate(order)}
    for v in order:
        earlier = [w for w in adj[v] if pos[w] < pos[v]]
        if len(earlier) < 2:
            continue
        parent = max(earlier, key=pos.__getitem__)
        for w in earlier:
            if w != parent and w not in adj[parent]:
                return False
    return True


def is_chordal(g: CommutationGraph) -> bool:
    """True iff every cycle of length >= 4 in ``g`` has a chord.

    Runs maximum cardinality search and checks that the reverse visit
    order is a perfect elimination ordering.
    """
    return _is_chordal_adj(g.adjacency())


def perfect_elimination_ordering(g: CommutationGraph) -> list[str] | None:
    """A perfect elimination ordering of ``g``, or None if ``g`` is not chordal."""
    adj = g.adjacency()
    if not _is_chordal_adj(adj):
        return None
    return list(reversed(_mcs_order(adj)))


def triangles(g: CommutationGraph) -> set[tuple[str, str, str]]:
    """All 3-cliques of ``g`` as sorted label triples."""
    adj = g.adjacency()
    out = set()
    for u, v in g.edges:
        for w in adj[u] & adj[v]:
            out.add(tuple(sorted((u, v, w))))
    return out


@dataclass(frozen=True)
class ChordalDecomposition:
    subgraphs: tuple[CommutationGraph, ...]
    covered_edges: frozenset[Edge]

    def chords(self) -> list[frozenset[Edge]]:
        """Per subgraph, the edges that are not covered (required) edges."""
        return [sg.edges - self.covered_edges for sg in self.subgraphs]

    def to_dict(self) -> dict:
        return {
            "subgraphs": [sg.to_dict() for sg in self.subgraphs],
            "coveredEdges": [list(e) for e in sorted(self.covered_edges)],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ChordalDecomposition":
        subs = tuple(CommutationGraph.from_dict(d) for d in data["subgraphs"])
        covered = frozenset(edge(str(u), str(v)) for u, v in data["coveredEdges"])
        return cls(subs, covered)


def _chordal_completions(
    base: frozenset[Edge], candidates: Sequence[Edge]
) -> list[frozenset[Edge]]:
    """Inclusion-maximal chord sets S from ``candidates`` with base | S chordal.

    Subsets are scanned from largest to smallest; within one size the
    order follows the (sorted) candidate order.
    """
    found: list[frozenset[Edge]] = []
    for size in range(len(candidates), -1, -1):
        for combo in itertools.combinations(candidates, size):
            s = frozenset(combo)
            if any(s < f for f in found):
                continue
            if is_chordal(subgraph_from_edges(base | s)):
                found.append(s)
    return found


def _completable(base: frozenset[Edge], candidates: Sequence[Edge]) -> bool:
    for size in range(len(candidates) + 1):
        for combo in itertools.combinations(candidates, size):
            if is_chordal(subgraph_from_edges(base | frozenset(combo))):
                return True
    return False


def chordal_edge_decompositions(
    joint: CommutationGraph, required: Iterable[Edge], m: int
) -> Iterator[ChordalDecomposition]:
    """Enumerate covers of ``required`` by at most ``m`` chordal subgraphs.

    Each required edge is assigned to exactly one subgraph (slot). A slot
    may then be closed with extra joint-graph edges (chords) between its
    vertices, provided those edges are not required; for every slot the
    inclusion-maximal chordal closures are branched over. Slots are
    unlabelled, so assignments are generated as restricted-growth strings
    over the lexicographically sorted required edges.

    Parameters
    ----------
    joint : CommutationGraph
        The scenario's joint commutation graph.
    required : iterable of edges
        Edges that must appear in exactly one subgraph.
    m : int
        Maximum number of subgraphs.

    Yields
    ------
    ChordalDecomposition
    """
    if m < 1:
        raise GraphError("m must be at least 1")
    req = sorted({edge(u, v) for u, v in required})
    for e in req:
        if e not in joint.edges:
            raise GraphError(f"required edge {e} is not an edge of the joint graph")
    if not req:
        return
    req_set = frozenset(req)
    free_edges = sorted(joint.edges - req_set)
    completable_cache: dict[frozenset[Edge], bool] = {}

    def candidates_for(slot_edges: frozenset[Edge]) -> list[Edge]:
        verts = {x for e in slot_edges for x in e}
        return [e for e in free_edges if e[0] in verts and e[1] in verts]

    def ok(slot_edges: frozenset[Edge]) -> bool:
        # Induced subgraphs of chordal graphs are chordal, so a partial slot
        # must admit some chordal closure already.
        if slot_edges not in completable_cache:
            completable_cache[slot_edges] = _completable(slot_edges, candidates_for(slot_edges))
        return completable_cache[slot_edges]

    slots: list[set[Edge]] = []

    def assign(i: int) -> Iterator[list[frozenset[Edge]]]:
        if i == len(req):
            yield [frozenset(s) for s in slots]
            return
        e = req[i]
        for k in range(min(len(slots) + 1, m)):
            if k == len(slots):
                slots.append(set())
            slots[k].add(e)
            if ok(frozenset(slots[k])):
                yield from assign(i + 1)
            slots[k].discard(e)
            if not slots[k]:
                slots.pop()

    for assignment in assign(0):
        closures = [_chordal_completions(s, candidates_for(s)) for s in assignment]
        for choice in itertools.product(*closures):
            subs = tuple(subgraph_from_edges(s | c) for s, c in zip(assignment, choice))
            yield ChordalDecomposition(subs, req_set)


def is_valid_decomposition(
    decomp: ChordalDecomposition, joint: CommutationGraph, required: Iterable[Edge]
) -> bool:
    """Check chordality, containment in ``joint`` and exactly-once coverage."""
    req = {edge(u, v) for u, v in required}
    for sg in decomp.subgraphs:
        if not is_chordal(sg) or not sg.is_subgraph_of(joint):
            return False
    for e in req:
        if sum(e in sg.edges for sg in decomp.subgraphs) != 1:
            return False
    return True
