"""Marked graphs (simplicial charts) and closing path systems.

A marked graph is a finite connected graph of first Betti number N with a
chosen spanning tree and an ordering of the N non-tree edge pairs identified
with the generators a_1..a_N; reading the non-tree letters around a closed
path realizes the marking isomorphism on conjugacy classes.  Degree >= 3 is
the chart convention but is reported as a warning, not an error: the rose is
the standard chart and user graphs may be mid-construction.

A closing path system is a table of connector paths beta[e,e'] such that
e . beta . e' is reduced; appending the connector for (last edge, first edge)
turns any reduced path into a reduced, cyclically reduced closed path (the
hat closing).  The breve closing instead cyclically reduces paths that are
already closed.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field

from .words import CyclicWord, cyclic_reduce, free_reduce


class NoClosingPath(ValueError):
    pass


class DegenerateClass(ValueError):
    """A closed path whose letter readout is the trivial element."""


@dataclass(frozen=True)
class GraphEdge:
    id: str
    inv: str
    origin: str
    terminus: str


class MarkedGraph:
    """Oriented graph with involutive edge inversion plus a marking.

    `tree_edges` lists one orientation per spanning-tree edge; `letter_edges`
    lists, for each generator a_i in order, the id of the non-tree edge read
    as a_i in the positive direction.
    """

    def __init__(self, vertices, edges, base, tree_edges, letter_edges):
        self.vertices = tuple(vertices)
        self.edges = {}
        for e in edges:
            if isinstance(e, dict):
                e = GraphEdge(e["id"], e["inv"], e["from"], e["to"])
            self.edges[e.id] = e
        self.base = base
        self._tree_input = tuple(tree_edges)
        self.tree_edges = frozenset(tree_edges) | frozenset(
            self.edges[t].inv for t in tree_edges)
        self.letter_edges = tuple(letter_edges)
        self._letter_of = {}
        for i, eid in enumerate(self.letter_edges, start=1):
            self._letter_of[eid] = i
            self._letter_of[self.edges[eid].inv] = -i
        self._out = {v: [] for v in self.vertices}
        for e in self.edges.values():
            self._out[e.origin].append(e.id)
        self.warnings = self._validate()

    # -- structure --------------------------------------------------------

    def inv(self, eid: str) -> str:
        return self.edges[eid].inv

    def origin(self, eid: str) -> str:
        return self.edges[eid].origin

    def terminus(self, eid: str) -> str:
        return self.edges[eid].terminus

    def edges_from(self, v):
        return self._out[v]

    @property
    def rank(self) -> int:
        return len(self.letter_edges)

    def letter_of(self, eid: str) -> int:
        """Marking letter of an edge: +-i for the i-th letter pair, 0 for tree edges."""
        return self._letter_of.get(eid, 0)

    def degree(self, v) -> int:
        return len(self._out[v])

    def _validate(self):
        for e in self.edges.values():
            other = self.edges.get(e.inv)
            if other is None or other.inv != e.id or e.inv == e.id:
                raise ValueError(f"edge inversion is not a fixed-point-free involution at {e.id}")
            if other.origin != e.terminus or other.terminus != e.origin:
                raise ValueError(f"endpoints of {e.id} and {e.inv} disagree")
        if self.base not in self._out:
            raise ValueError("base vertex missing")
        # connectivity
        seen = {self.base}
        stack = [self.base]
        while stack:
            v = stack.pop()
            for eid in self._out[v]:
                w = self.edges[eid].terminus
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        if len(seen) != len(self.vertices):
            raise ValueError("graph is not connected")
        betti = len(self.edges) // 2 - len(self.vertices) + 1
        if betti != self.rank:
            raise ValueError(f"first Betti number {betti} != {self.rank} letter pairs")
        # spanning tree check: V-1 pairs reaching every vertex without reuse
        if len(self.tree_edges) != 2 * (len(self.vertices) - 1):
            raise ValueError("tree_edges do not form a spanning tree (wrong count)")
        reached = {self.base}
        stack = [self.base]
        while stack:
            v = stack.pop()
            for eid in self._out[v]:
                if eid in self.tree_edges:
                    w = self.edges[eid].terminus
                    if w not in reached:
                        reached.add(w)
                        stack.append(w)
        if len(reached) != len(self.vertices):
            raise ValueError("tree_edges do not span the graph")
        for eid in self.letter_edges:
            if eid in self.tree_edges:
                raise ValueError(f"letter edge {eid} lies in the spanning tree")
        warnings = []
        for v in self.vertices:
            if self.degree(v) < 3:
                warnings.append(f"vertex {v} has degree {self.degree(v)} < 3")
        if len(self.edges) > 6 * self.rank:
            warnings.append(f"{len(self.edges)} oriented edges exceed 6N = {6 * self.rank}")
        return warnings

    # -- paths --------------------------------------------------------------

    def is_reduced_path(self, path) -> bool:
        for a, b in zip(path, path[1:]):
            if self.terminus(a) != self.origin(b) or b == self.inv(a):
                return False
        return bool(path)

    def is_closed(self, path) -> bool:
        return bool(path) and self.terminus(path[-1]) == self.origin(path[0])

    def is_cyclically_reduced(self, path) -> bool:
        return (self.is_reduced_path(path) and self.is_closed(path)
                and path[0] != self.inv(path[-1]))

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [{"id": e.id, "inv": e.inv, "from": e.origin, "to": e.terminus}
                      for e in self.edges.values()],
            "base": self.base,
            "tree_edges": list(self._tree_input),
            "letter_edges": list(self.letter_edges),
        }

    @classmethod
    def from_json(cls, data) -> "MarkedGraph":
        return cls(data["vertices"], data["edges"], data["base"],
                   data["tree_edges"], data["letter_edges"])

    @classmethod
    def load(cls, path) -> "MarkedGraph":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


# -- standard charts --------------------------------------------------------


def rose(rank: int) -> MarkedGraph:
    """The N-rose: one vertex, one loop pair per generator, empty tree."""
    from .words import format_word
    edges = []
    letter = []
    for i in range(1, rank + 1):
        pos = format_word((i,))
        neg = format_word((-i,))
        edges.append(GraphEdge(pos, neg, "v", "v"))
        edges.append(GraphEdge(neg, pos, "v", "v"))
        letter.append(pos)
    return MarkedGraph(["v"], edges, "v", [], letter)


def fan_of_lollipops(rank: int) -> MarkedGraph:
    """Central vertex with a stem to each lollipop loop; loops read the letters."""
    vertices = ["x0"] + [f"y{i}" for i in range(1, rank + 1)]
    edges = []
    tree = []
    letter = []
    for i in range(1, rank + 1):
        edges.append(GraphEdge(f"e{i}", f"E{i}", "x0", f"y{i}"))
        edges.append(GraphEdge(f"E{i}", f"e{i}", f"y{i}", "x0"))
        edges.append(GraphEdge(f"f{i}", f"F{i}", f"y{i}", f"y{i}"))
        edges.append(GraphEdge(f"F{i}", f"f{i}", f"y{i}", f"y{i}"))
        tree.append(f"e{i}")
        letter.append(f"f{i}")
    return MarkedGraph(vertices, edges, "x0", tree, letter)


def theta_chart() -> MarkedGraph:
    """The theta graph: two vertices, three parallel edges; a rank-2 chart
    with every vertex of degree 3."""
    edges = [
        GraphEdge("p", "P", "u", "v"), GraphEdge("P", "p", "v", "u"),
        GraphEdge("q", "Q", "u", "v"), GraphEdge("Q", "q", "v", "u"),
        GraphEdge("t", "T", "u", "v"), GraphEdge("T", "t", "v", "u"),
    ]
    return MarkedGraph(["u", "v"], edges, "u", ["t"], ["p", "q"])


# -- gamma-based chain validation -------------------------------------------


def validate_gamma_based(chain, g: MarkedGraph):
    """Check a chain is Gamma-based: states are edges, transitions follow
    endpoints without backtracking.  Returns (ok, violations)."""
    violations = []
    states = set(chain.states)
    if len(states) < 2:
        violations.append("state set must have at least 2 edges")
    unknown = [s for s in chain.states if s not in g.edges]
    if unknown:
        violations.append(f"states outside the edge set: {unknown}")
        return False, violations
    for e in chain.states:
        for e2 in chain.states:
            if chain.prob(e, e2) > 0:
                if g.terminus(e) != g.origin(e2):
                    violations.append(f"transition {e}->{e2} breaks endpoint matching")
                elif e2 == g.inv(e):
                    violations.append(f"transition {e}->{e2} backtracks")
    return not violations, violations


# -- closing path systems ----------------------------------------------------


@dataclass
class ClosingSystem:
    graph: MarkedGraph
    table: dict = field(default_factory=dict)   # (e, e') -> tuple of edge ids

    @property
    def max_len(self) -> int:
        return max((len(p) for p in self.table.values()), default=0)

    def connector(self, e, e2):
        return self.table[(e, e2)]


def build_closing_system(g: MarkedGraph) -> ClosingSystem:
    """Shortest connector beta for every ordered edge pair (e, e').

    BFS over (vertex, previous edge) states from the virtual previous edge e,
    accepting a state at o(e') whose previous edge is not e'^-1.  First
    arrival in id-ordered expansion fixes ties.  |beta| <= #edges is checked;
    a graph that defeats it (degree < 3 somewhere) raises NoClosingPath.
    """
    sys = ClosingSystem(g)
    edge_ids = sorted(g.edges)
    bound = len(g.edges)
    for e in edge_ids:
        # one BFS per source edge serves every target
        start = (g.terminus(e), e)
        parents = {start: None}
        order = [start]
        qi = 0
        while qi < len(order):
            v, prev = order[qi]
            qi += 1
            for nxt in sorted(g.edges_from(v)):
                if nxt == g.inv(prev):
                    continue
                state = (g.terminus(nxt), nxt)
                if state not in parents:
                    parents[state] = (v, prev, nxt)
                    order.append(state)
        for e2 in edge_ids:
            goal_v = g.origin(e2)
            forbidden = g.inv(e2)
            best = None
            for (v, prev) in order:  # BFS order = increasing length, id-tied
                if v == goal_v and prev != forbidden:
                    best = (v, prev)
                    break
            if best is None:
                raise NoClosingPath(f"no connector for ({e}, {e2})")
            path = []
            state = best
            while parents[state] is not None:
                v, prev, took = parents[state]
                path.append(took)
                state = (v, prev)
            path.reverse()
            if len(path) > bound:
                raise NoClosingPath(
                    f"connector for ({e}, {e2}) has length {len(path)} > #edges {bound}")
            sys.table[(e, e2)] = tuple(path)
    return sys


def hat_closing(path, closing: ClosingSystem) -> tuple:
    """path . beta[last, first]: a reduced, cyclically reduced closed path."""
    path = tuple(path)
    g = closing.graph
    if not path or not g.is_reduced_path(path):
        raise ValueError("hat closing needs a nonempty reduced path")
    closed = path + closing.connector(path[-1], path[0])
    assert g.is_cyclically_reduced(closed)
    return closed


def cyc_closed_path(path, g: MarkedGraph) -> tuple:
    """Maximal cyclic reduction of a closed reduced path."""
    path = list(path)
    while len(path) >= 2 and path[0] == g.inv(path[-1]):
        path = path[1:-1]
    if not path:
        raise DegenerateClass("closed path cyclically reduces to a point")
    return tuple(path)


def breve_closing(path, closing: ClosingSystem) -> tuple:
    """cyc(path) when the path is closed, hat closing otherwise."""
    path = tuple(path)
    g = closing.graph
    if not path or not g.is_reduced_path(path):
        raise ValueError("breve closing needs a nonempty reduced path")
    if g.is_closed(path):
        return cyc_closed_path(path, g)
    return hat_closing(path, closing)


def path_to_class(path, g: MarkedGraph) -> CyclicWord:
    """Conjugacy class read from a closed path.

    Tree edges contribute nothing; non-tree edges read their letters.  The
    result is independent of the rotation of the path (basepoint transport is
    unnecessary for classes).  Unreduced closed paths are tolerated and
    reduced first; a path that collapses entirely (e.g. tree edges only)
    raises DegenerateClass.
    """
    path = tuple(path)
    for a, b in zip(path, path[1:]):
        if g.terminus(a) != g.origin(b):
            raise ValueError("not an edge path (endpoints mismatch)")
    if not g.is_closed(path):
        raise ValueError("path must be closed")
    reduced = []
    for e in path:
        if reduced and reduced[-1] == g.inv(e):
            reduced.pop()
        else:
            reduced.append(e)
    while len(reduced) >= 2 and reduced[0] == g.inv(reduced[-1]):
        reduced = reduced[1:-1]
    if not reduced:
        raise DegenerateClass("path reads the trivial element")
    letters = [g.letter_of(e) for e in reduced]
    letters = [x for x in letters if x]
    core, _ = cyclic_reduce(free_reduce(letters))
    if not core:
        raise DegenerateClass("path reads the trivial element")
    return CyclicWord(core)
