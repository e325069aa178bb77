"""The three Whitehead procedures: minimization, stabilization, equivalence.

Minimization repeatedly applies a length-decreasing move until none exists;
by peak reduction the result is shortest in its whole outer-automorphism
orbit.  Stabilization computes the connected component of the length-level
graph (classes of equal cyclic length, edges labelled by moves) by
breadth-first closure under length-preserving moves; two minimal classes are
equivalent iff they share a component.  Every positive answer carries a
Witness: a move-index chain that is replayed and machine-checked before being
returned.

Inner moves act trivially on classes and are skipped when recording level
edges (they are trivial in the outer group); non-inner moves fixing a class
are kept as genuine self-loops, so class-fixing relabelings show up among the
stabilizer generators.
"""

from __future__ import annotations

import hashlib
from collections import deque
from dataclasses import dataclass, field

from .moves import MoveSet, get_move_set
from .words import CyclicWord, format_word


class CapExceeded(RuntimeError):
    """A breadth-first closure grew past its vertex cap (worst-case regime)."""

    def __init__(self, cap, size):
        super().__init__(f"level component exceeded vertex cap {cap} (reached {size})")
        self.cap = cap
        self.size = size


def class_hash(c) -> str:
    return hashlib.sha256(format_word(c).encode()).hexdigest()[:16]


@dataclass(frozen=True)
class WitnessStep:
    move_index: int
    pre_hash: str


@dataclass(frozen=True)
class Witness:
    """A replayable move chain mapping `source` to `target`.

    Each step records the hash of the class it was applied to, so a failed
    replay pinpoints the first divergent step.
    """

    source: CyclicWord
    target: CyclicWord
    steps: tuple = ()

    def replay(self, moves: MoveSet) -> CyclicWord:
        cur = self.source
        for step in self.steps:
            if class_hash(cur) != step.pre_hash:
                raise ValueError(f"witness diverged before move {step.move_index} at {cur}")
            cur = moves[step.move_index].apply_to_class(cur)
        return cur

    def verify(self, moves: MoveSet) -> bool:
        try:
            return self.replay(moves) == self.target
        except ValueError:
            return False

    def move_indices(self) -> tuple:
        return tuple(s.move_index for s in self.steps)

    def to_json(self, moves: MoveSet) -> dict:
        return {
            "source": format_word(self.source),
            "target": format_word(self.target),
            "steps": [
                {"move": moves[s.move_index].to_record(), "move_index": s.move_index,
                 "pre_hash": s.pre_hash}
                for s in self.steps
            ],
        }


def _chain_witness(source, move_indices, moves) -> Witness:
    cur = source
    steps = []
    for idx in move_indices:
        steps.append(WitnessStep(idx, class_hash(cur)))
        cur = moves[idx].apply_to_class(cur)
    return Witness(source, cur, tuple(steps))


def concat_witnesses(a: Witness, b: Witness, moves: MoveSet) -> Witness:
    if a.target != b.source:
        raise ValueError("witnesses do not compose")
    return _chain_witness(a.source, a.move_indices() + b.move_indices(), moves)


def invert_witness(w: Witness, moves: MoveSet) -> Witness:
    rev = tuple(moves.inverse[i] for i in reversed(w.move_indices()))
    out = _chain_witness(w.target, rev, moves)
    if out.target != w.source:
        raise ValueError("witness inversion failed to return to source")
    return out


@dataclass
class MinimizeResult:
    minimal: CyclicWord
    witness: Witness
    steps: int


def minimize(c: CyclicWord, moves: MoveSet | None = None) -> MinimizeResult:
    """Whitehead minimization by steepest descent.

    Picks the move with the maximal length drop (ties by enumeration order)
    until no move decreases the cyclic length; the result is then minimal in
    the whole orbit by peak reduction.  Step count is at most ||c||.
    """
    moves = moves or get_move_set(_rank_of(c))
    cur = c
    chain = []
    while True:
        n = len(cur)
        lengths = moves.image_lengths(cur)
        best_len = n
        best_idx = -1
        for idx, ln in enumerate(lengths):
            if ln < best_len:
                best_len = ln
                best_idx = idx
        if best_idx < 0:
            break
        chain.append(best_idx)
        nxt = moves[best_idx].apply_to_class(cur)
        assert len(nxt) == best_len < n
        cur = nxt
    witness = _chain_witness(c, chain, moves)
    assert witness.target == cur
    return MinimizeResult(cur, witness, len(chain))


def speedup_minimize(c: CyclicWord, aux: list, moves: MoveSet | None = None) -> MinimizeResult:
    """Minimize over {c} and every aux-translated copy, keeping the best.

    `aux` is a list of move-index sequences (the finite speed-up family);
    witnesses of aux branches are prefixed by the applied sequence.  The best
    branch minimizes (result length, descent steps), ties going to the plain
    branch and then aux order.
    """
    moves = moves or get_move_set(_rank_of(c))
    best = minimize(c, moves)
    for seq in aux:
        prefix = _chain_witness(c, tuple(seq), moves)
        branch = minimize(prefix.target, moves)
        if (len(branch.minimal), branch.steps) < (len(best.minimal), best.steps):
            witness = concat_witnesses(prefix, branch.witness, moves)
            best = MinimizeResult(branch.minimal, witness, branch.steps)
    return best


@dataclass
class LevelComponent:
    """The component of the level-n graph containing `root`.

    Vertices are canonical classes of cyclic length n; `edges` maps a
    canonical undirected key (u, v, move_index) to itself, with parallel
    edges from distinct moves kept.  `parents` stores the BFS discovery tree
    as child -> (parent, move_index).
    """

    level: int
    root: CyclicWord
    vertices: set
    edges: dict
    parents: dict
    tree_edges: set = field(default_factory=set)

    @property
    def vertex_count(self):
        return len(self.vertices)

    @property
    def edge_count(self):
        return len(self.edges)

    def path_from_root(self, v) -> tuple:
        """Move-index chain root -> v along the BFS tree."""
        out = []
        while v != self.root:
            parent, idx = self.parents[v]
            out.append(idx)
            v = parent
        return tuple(reversed(out))


def _edge_key(u, idx, v, moves):
    inv = moves.inverse[idx]
    if u == v:
        return (u, v, min(idx, inv))
    if u <= v:
        return (u, v, idx)
    return (v, u, inv)


def level_component(c: CyclicWord, moves: MoveSet | None = None,
                    vertex_cap: int = 10 ** 6, require_minimal: bool = True,
                    target: CyclicWord | None = None) -> LevelComponent:
    """Breadth-first closure of `c` under length-preserving moves.

    Requires a Whitehead-minimal root (the closure then computes the whole
    set of minimal classes of the orbit).  Raises CapExceeded past
    `vertex_cap`.  If `target` is given, stops early once it is discovered.
    """
    moves = moves or get_move_set(_rank_of(c))
    n = len(c)
    lengths = moves.image_lengths(c)
    if require_minimal and any(ln < n for ln in lengths):
        raise ValueError("level_component requires a Whitehead-minimal root")
    comp = LevelComponent(n, c, {c}, {}, {c: None})
    queue = deque([(c, lengths)])
    while queue:
        v, lens = queue.popleft()
        for idx, ln in enumerate(lens):
            if ln != n or moves[idx].is_inner:
                continue
            w = moves[idx].apply_to_class(v)
            key = _edge_key(v, idx, w, moves)
            new_vertex = w not in comp.vertices
            if new_vertex:
                comp.vertices.add(w)
                comp.parents[w] = (v, idx)
                comp.tree_edges.add(key)
                if len(comp.vertices) > vertex_cap:
                    raise CapExceeded(vertex_cap, len(comp.vertices))
            comp.edges.setdefault(key, key)
            if new_vertex:
                if target is not None and w == target:
                    return comp
                queue.append((w, moves.image_lengths(w)))
    return comp


def equivalent(c1: CyclicWord, c2: CyclicWord, moves: MoveSet | None = None,
               vertex_cap: int = 10 ** 6):
    """Decide Out(F_N)[c1] == Out(F_N)[c2]; on success return a verified witness.

    Minimizes both classes, compares minimal lengths, then searches the level
    component of the first minimal class for the second.  The returned
    witness maps c1 to c2 and is replayed before being handed back, so a
    positive answer cannot be wrong.
    """
    moves = moves or get_move_set(_rank_of(c1))
    r1 = minimize(c1, moves)
    r2 = minimize(c2, moves)
    if len(r1.minimal) != len(r2.minimal):
        return False, None
    if r1.minimal == r2.minimal:
        witness = concat_witnesses(r1.witness, invert_witness(r2.witness, moves), moves)
        assert witness.verify(moves)
        return True, witness
    comp = level_component(r1.minimal, moves, vertex_cap, target=r2.minimal)
    if r2.minimal not in comp.vertices:
        return False, None
    path = _chain_witness(r1.minimal, comp.path_from_root(r2.minimal), moves)
    witness = concat_witnesses(concat_witnesses(r1.witness, path, moves),
                               invert_witness(r2.witness, moves), moves)
    assert witness.verify(moves)
    return True, witness


def stabilizer_generators(c: CyclicWord, moves: MoveSet | None = None,
                          vertex_cap: int = 10 ** 6) -> list:
    """Loop witnesses generating the outer stabilizer of a minimal class.

    One loop per non-tree edge of the level component (count = #edges -
    #vertices + 1, an upper bound for the stabilizer rank).  Every witness is
    verified to fix the class.
    """
    moves = moves or get_move_set(_rank_of(c))
    comp = level_component(c, moves, vertex_cap)
    out = []
    for (u, v, idx) in comp.edges:
        if (u, v, idx) in comp.tree_edges:
            continue
        # tree path root->u, the edge move u->u', tree path back from u'.
        to_u = comp.path_from_root(u)
        u_img = moves[idx].apply_to_class(u)
        back = tuple(moves.inverse[i] for i in reversed(comp.path_from_root(u_img)))
        loop = _chain_witness(c, to_u + (idx,) + back, moves)
        assert loop.target == c, "stabilizer loop failed to fix the class"
        out.append(loop)
    return out


def _rank_of(c) -> int:
    return max(2, max(abs(x) for x in c))
