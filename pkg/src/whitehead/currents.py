"""Finite-depth weight tables standing in for geodesic currents.

A current is computationally a flip-symmetric assignment of nonnegative
weights to reduced words (rose chart) or reduced edge-paths (graph chart)
satisfying the switch conditions: the weight of v equals the sum of weights
of its one-step reduced extensions, on either side.  Tables here are truncated
at a finite depth; every claim they support is scoped to that depth.  Chain
and counting tables are exact (fractions / integers); floats appear only in
empirically sampled tables.

Filling certificates package structural positivity conditions.  The chain
conditions (cases 1-4) are conclusive: they imply the characteristic current
is filling.  Depth-bounded positivity of a table is evidence to its depth
only and says so.  There is no finite refutation procedure, so the third
verdict is Inconclusive, never "not filling".
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .fsmc import Fsmc, is_irreducible, mu0_k, stationary
from .graphs import MarkedGraph, validate_gamma_based
from .words import (
    Alphabet,
    CyclicWord,
    occurrences_symmetrized,
    format_word,
)


# -- charts -------------------------------------------------------------------


class RoseChart:
    """Chart over the rank-N rose: symbols are the 2N signed letters."""

    def __init__(self, rank: int):
        self.rank = rank
        self.symbols = Alphabet(rank).letters()

    def inv(self, s):
        return -s

    def follows(self, s, t) -> bool:
        return t != -s

    def label(self, path) -> str:
        return format_word(path)

    def sort_key(self, path):
        return (len(path), [2 * x if x > 0 else 1 - 2 * x for x in path])

    def __eq__(self, other):
        return isinstance(other, RoseChart) and other.rank == self.rank

    def __repr__(self):
        return f"RoseChart({self.rank})"


class GraphChart:
    """Chart over a marked graph: symbols are oriented edge ids."""

    def __init__(self, graph: MarkedGraph):
        self.graph = graph
        self.symbols = tuple(sorted(graph.edges))

    def inv(self, s):
        return self.graph.inv(s)

    def follows(self, s, t) -> bool:
        return self.graph.terminus(s) == self.graph.origin(t) and t != self.graph.inv(s)

    def label(self, path) -> str:
        return " ".join(path)

    def sort_key(self, path):
        return (len(path), list(path))

    def __repr__(self):
        return f"GraphChart({len(self.symbols)} edges)"


def chart_of(obj):
    if isinstance(obj, (RoseChart, GraphChart)):
        return obj
    if isinstance(obj, MarkedGraph):
        return GraphChart(obj)
    if isinstance(obj, int):
        return RoseChart(obj)
    raise TypeError(f"cannot build a chart from {obj!r}")


def reduced_paths(chart, length: int) -> list:
    """All reduced paths of exactly `length` symbols, in symbol order."""
    if length == 0:
        return [()]
    out = [(s,) for s in chart.symbols]
    for _ in range(length - 1):
        out = [p + (t,) for p in out for t in chart.symbols if chart.follows(p[-1], t)]
    return out


def invert_path(chart, path):
    return tuple(chart.inv(s) for s in reversed(path))


# -- tables -------------------------------------------------------------------


@dataclass
class WeightTable:
    """Weights on reduced words/paths of length 1..depth over a chart."""

    chart: object
    depth: int
    weights: dict
    kind: str = "generic"

    def weight(self, v):
        return self.weights.get(tuple(v), 0)

    def flip_violations(self) -> list:
        out = []
        for v, w in self.weights.items():
            if self.weight(invert_path(self.chart, v)) != w:
                out.append(v)
        return out

    def switch_violations(self, atol=0) -> list:
        """Switch-condition failures for every table path of length < depth."""
        out = []
        for v, w in self.weights.items():
            if len(v) >= self.depth:
                continue
            right = sum(self.weight(v + (s,)) for s in self.chart.symbols
                        if self.chart.follows(v[-1], s))
            left = sum(self.weight((s,) + v) for s in self.chart.symbols
                       if self.chart.follows(s, v[0]))
            if (abs(right - w) > atol) or (abs(left - w) > atol):
                out.append((v, w, right, left))
        return out

    def dump_jsonl(self, fh):
        for v in sorted(self.weights, key=self.chart.sort_key):
            w = self.weights[v]
            fh.write('{"word": "%s", "weight": "%s"}\n' % (self.chart.label(v), w))


def length_norm(table: WeightTable):
    """Half the sum of depth-1 weights over all oriented symbols.

    Equals ||w|| for a counting table and 1 for chain characteristic tables.
    """
    if table.depth < 1:
        raise ValueError("table must have depth >= 1")
    total = sum(table.weight((s,)) for s in table.chart.symbols)
    if isinstance(total, float):
        return total / 2
    return Fraction(total) / 2


def counting_current(cycle, chart=None, depth: int = 3) -> WeightTable:
    """Symmetrized cyclic subword counts of a class (or closed path).

    One sliding pass tallies all windows of length 1..depth, then weights are
    symmetrized; switch conditions hold exactly and the length norm equals
    the cyclic length.
    """
    cycle = tuple(cycle)
    if not cycle:
        raise ValueError("empty cycle")
    if chart is None:
        chart = RoseChart(max(2, max(abs(x) for x in cycle)))
    chart = chart_of(chart)
    n = len(cycle)
    counts = {}
    for start in range(n):
        window = []
        for off in range(depth):
            window.append(cycle[(start + off) % n])
            key = tuple(window)
            counts[key] = counts.get(key, 0) + 1
    weights = {}
    for length in range(1, depth + 1):
        for v in reduced_paths(chart, length):
            weights[v] = counts.get(v, 0) + counts.get(invert_path(chart, v), 0)
    return WeightTable(chart, depth, weights, kind="counting")


def uniform_current(rank: int, depth: int) -> WeightTable:
    """Weight 1/(N (2N-1)^(k-1)) on every reduced word of length k; norm 1."""
    chart = RoseChart(rank)
    weights = {}
    for k in range(1, depth + 1):
        w = Fraction(1, rank * (2 * rank - 1) ** (k - 1))
        for v in reduced_paths(chart, k):
            weights[v] = w
    return WeightTable(chart, depth, weights, kind="uniform")


def characteristic_current(chain: Fsmc, g: MarkedGraph, depth: int) -> WeightTable:
    """Chain characteristic current: weight mu0[k](v) + mu0[k](v^-1).

    Exact rationals off the stationary cylinder weights; zero off feasible
    paths; switch conditions hold exactly and the length norm is exactly 1.
    """
    ok, violations = validate_gamma_based(chain, g)
    if not ok:
        raise ValueError(f"chain is not Gamma-based: {violations}")
    if not is_irreducible(chain):
        raise ValueError("chain must be irreducible")
    chart = GraphChart(g)
    states = set(chain.states)

    def weight_one_way(v):
        if any(s not in states for s in v):
            return Fraction(0)
        return mu0_k(chain, v)

    weights = {}
    for k in range(1, depth + 1):
        for v in reduced_paths(chart, k):
            weights[v] = weight_one_way(v) + weight_one_way(invert_path(chart, v))
    return WeightTable(chart, depth, weights, kind="characteristic")


def default_probes(chart, depth: int = 3) -> list:
    """All reduced paths of length <= depth (the basic-neighborhood probe set)."""
    chart = chart_of(chart)
    out = []
    for k in range(1, depth + 1):
        out.extend(reduced_paths(chart, k))
    return out


def projective_distance(t1: WeightTable, t2: WeightTable, probes=None) -> float:
    """max over probes of |<v,t1>/norm(t1) - <v,t2>/norm(t2)|.

    Scale-invariant in each argument; a pseudometric on tables restricted to
    the probe set.
    """
    if probes is None:
        depth = min(t1.depth, t2.depth)
        probes = default_probes(t1.chart, depth)
    n1 = length_norm(t1)
    n2 = length_norm(t2)
    if n1 == 0 or n2 == 0:
        raise ValueError("tables must have positive length norm")
    best = 0.0
    for v in probes:
        d = abs(t1.weight(v) / n1 - t2.weight(v) / n2)
        if d > best:
            best = float(d)
    return best


# -- filling certificates ------------------------------------------------------


@dataclass
class FillingCertificate:
    kind: str
    conclusive: bool
    evidence: dict = field(default_factory=dict)


@dataclass
class Inconclusive:
    reason: str


def _three_subword_evidence(c: CyclicWord, rank: int):
    missing = []
    for v in reduced_paths(RoseChart(rank), 3):
        if occurrences_symmetrized(v, c) == 0:
            missing.append(format_word(v))
    return missing


def certify_filling(obj, method: str, rank: int | None = None, depth: int | None = None,
                    power_bound: int = 3, word=None, graph=None, basis_paths=None):
    """Produce a machine-checkable filling certificate, or Inconclusive.

    Methods:
      three-subword   obj: CyclicWord. Every reduced length-3 word occurs in
                      the class or its inverse; conclusive (the element and
                      its counting current are filling).
      full-support-depth  obj: WeightTable. All weights positive up to the
                      table depth; evidence to that depth only.
      basis-pairs     obj: rose WeightTable. Positivity of a_i^n and
                      (a_i a_j)^n up to the power bound; evidence-to-depth.
      word-power      obj: WeightTable, word=z. z must itself certify filling
                      (three-subword); positivity of z^n to the power bound;
                      evidence-to-depth.
      fsmc-xf         obj: Fsmc, graph=MarkedGraph. Structural chain
                      conditions, cases 1-4; CONCLUSIVE when matched.
    """
    if method == "three-subword":
        c = obj
        rank = rank or max(2, max(abs(x) for x in c))
        missing = _three_subword_evidence(c, rank)
        if missing:
            return Inconclusive(f"{len(missing)} length-3 words missing, e.g. {missing[0]}")
        return FillingCertificate("three-subword", True,
                                  {"rank": rank, "word": format_word(c)})

    if method == "full-support-depth":
        table = obj
        zero = [v for v, w in table.weights.items() if w <= 0]
        if zero:
            return Inconclusive(f"weight zero at {table.chart.label(zero[0])}")
        return FillingCertificate("full-support-depth", False,
                                  {"depth": table.depth,
                                   "note": "positivity verified to depth only"})

    if method == "basis-pairs":
        table = obj
        chart = table.chart
        if not isinstance(chart, RoseChart):
            return Inconclusive("basis-pairs needs a rose-chart table")
        checked = {}
        for i in range(1, chart.rank + 1):
            for n in range(1, power_bound + 1):
                v = (i,) * n
                if len(v) > table.depth:
                    break
                if table.weight(v) <= 0:
                    return Inconclusive(f"weight of {format_word(v)} vanishes")
                checked[format_word(v)] = str(table.weight(v))
        for i in range(1, chart.rank + 1):
            for j in range(i + 1, chart.rank + 1):
                for n in range(1, power_bound + 1):
                    v = (i, j) * n
                    if len(v) > table.depth:
                        break
                    if table.weight(v) <= 0:
                        return Inconclusive(f"weight of {format_word(v)} vanishes")
                    checked[format_word(v)] = str(table.weight(v))
        return FillingCertificate("basis-pairs", False,
                                  {"power_bound": power_bound, "checked": checked,
                                   "note": "premises verified to the stated bound only"})

    if method == "word-power":
        table = obj
        if word is None:
            raise ValueError("word-power needs word=z")
        z = word
        zcert = certify_filling(z, "three-subword",
                                rank=getattr(table.chart, "rank", None))
        if isinstance(zcert, Inconclusive):
            return Inconclusive(f"base word not certified filling: {zcert.reason}")
        checked = {}
        for n in range(1, power_bound + 1):
            v = tuple(z) * n
            if len(v) > table.depth:
                break
            if table.weight(v) <= 0:
                return Inconclusive(f"weight of power {n} vanishes")
            checked[str(n)] = str(table.weight(v))
        return FillingCertificate("word-power", False,
                                  {"word": format_word(z), "power_bound": power_bound,
                                   "base_certificate": zcert.evidence, "checked": checked})

    if method == "fsmc-xf":
        chain = obj
        g = graph
        if g is None:
            raise ValueError("fsmc-xf needs graph=")
        ok, violations = validate_gamma_based(chain, g)
        if not ok:
            return Inconclusive(f"chain not Gamma-based: {violations[0]}")
        if not is_irreducible(chain):
            return Inconclusive("chain not irreducible")
        return _fsmc_xf(chain, g, word=word, basis_paths=basis_paths)

    raise ValueError(f"unknown certification method {method!r}")


def _fsmc_xf(chain: Fsmc, g: MarkedGraph, word=None, basis_paths=None):
    states = set(chain.states)
    # case 1: full edge set with every reduced transition positive
    if states == set(g.edges):
        ok = all(chain.prob(e, e2) > 0
                 for e in states for e2 in states
                 if g.terminus(e) == g.origin(e2) and e2 != g.inv(e))
        if ok:
            return FillingCertificate("fsmc-xf", True, {"case": 1})
    # case 2: rose chart, positive transitions among all positive letters
    if len(g.vertices) == 1 and set(g.letter_edges) <= states:
        pos = list(g.letter_edges)
        if all(chain.prob(e, e2) > 0 for e in pos for e2 in pos):
            return FillingCertificate("fsmc-xf", True, {"case": 2})
    # case 3: a supplied filling closed path with all powers feasible
    if word is not None:
        path = tuple(word)
        if g.is_cyclically_reduced(path):
            from .graphs import path_to_class
            cls = path_to_class(path, g)
            base = certify_filling(cls, "three-subword", rank=g.rank)
            if not isinstance(base, Inconclusive):
                trans = list(zip(path, path[1:])) + [(path[-1], path[0])]
                if all(e in states and e2 in states and chain.prob(e, e2) > 0
                       for e, e2 in trans):
                    return FillingCertificate(
                        "fsmc-xf", True,
                        {"case": 3, "path": list(path), "class": format_word(cls)})
    # case 4: closed paths reading a_i and a_i a_j with squares feasible
    paths = basis_paths or _default_basis_paths(g)
    if paths is not None:
        if _case4_holds(chain, g, paths):
            return FillingCertificate(
                "fsmc-xf", True,
                {"case": 4, "paths": {k: list(v) for k, v in paths.items()}})
    return Inconclusive("no structural filling condition matched")


def _case4_holds(chain, g, paths):
    states = set(chain.states)
    for path in paths.values():
        path = tuple(path)
        if not g.is_cyclically_reduced(path):
            return False
        trans = list(zip(path, path[1:])) + [(path[-1], path[0])]
        if not all(e in states and e2 in states and chain.prob(e, e2) > 0
                   for e, e2 in trans):
            return False
    return True


def _default_basis_paths(g: MarkedGraph):
    """Closed cyclically reduced paths reading a_i and a_i a_j, when the
    letter loops sit at tree distance <= 1 from each other (rose, lollipops)."""
    tree_path = _tree_paths(g)
    paths = {}
    for i, ei in enumerate(g.letter_edges, start=1):
        paths[f"a{i}"] = (ei,)
    for i, ei in enumerate(g.letter_edges, start=1):
        for j, ej in enumerate(g.letter_edges, start=1):
            if j <= i:
                continue
            vi = g.origin(ei)
            vj = g.origin(ej)
            connect = tree_path.get((vi, vj))
            back = tree_path.get((vj, vi))
            if connect is None or back is None:
                return None
            path = (ei,) + connect + (ej,) + back
            if not g.is_cyclically_reduced(path):
                return None
            paths[f"a{i}a{j}"] = path
    return paths


def _tree_paths(g: MarkedGraph):
    """Reduced tree paths between all vertex pairs (BFS in the spanning tree)."""
    out = {}
    for start in g.vertices:
        seen = {start: ()}
        queue = [start]
        qi = 0
        while qi < len(queue):
            v = queue[qi]
            qi += 1
            for eid in g.edges_from(v):
                if eid not in g.tree_edges:
                    continue
                w = g.terminus(eid)
                if w not in seen:
                    seen[w] = seen[v] + (eid,)
                    queue.append(w)
        for w, p in seen.items():
            out[(start, w)] = p
    return out
