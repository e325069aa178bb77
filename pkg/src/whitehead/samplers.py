"""Word samplers: uniform non-backtracking, biased letters, group walks,
and chain-directed walks on marked graphs with hat/breve closings.

Every sampler is deterministic under a fixed seed.  Chain trajectories draw
through the counter-based generator (one counter per step); i.i.d. letter
samplers use a per-call stdlib generator seeded from the same key space.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from . import fsmc
from .fsmc import Fsmc
from .graphs import (
    ClosingSystem,
    MarkedGraph,
    breve_closing,
    build_closing_system,
    fan_of_lollipops,
    hat_closing,
    path_to_class,
    rose,
    theta_chart,
    validate_gamma_based,
)
from .rng import CounterRng, spawn_seed
from .words import CyclicWord, cyclic_reduce, free_reduce, parse_word


def sampler_uniform_nb(rank: int, n: int, seed) -> tuple:
    """Uniform freely reduced word of length n (the n-sphere distribution)."""
    if n == 0:
        return ()
    rng = CounterRng(seed, "uniform-nb")
    first = rng.randrange(0, 2 * rank)
    letters = [first // 2 + 1 if first % 2 == 0 else -(first // 2 + 1)]
    alphabet = []
    for i in range(1, rank + 1):
        alphabet.append(i)
        alphabet.append(-i)
    for step in range(1, n):
        prev = letters[-1]
        pick = rng.randrange(step, 2 * rank - 1)
        for x in alphabet:
            if x == -prev:
                continue
            if pick == 0:
                letters.append(x)
                break
            pick -= 1
    return tuple(letters)


def sampler_uniform_cyclic(rank: int, n: int, seed) -> CyclicWord:
    """Uniform cyclically reduced word of length n, by rejection."""
    if n < 1:
        raise ValueError("n must be >= 1")
    for attempt in range(1000):
        w = sampler_uniform_nb(rank, n, spawn_seed(seed, "cyc-attempt", attempt))
        if n == 1 or w[0] != -w[-1]:
            return CyclicWord(w)
    raise RuntimeError("rejection sampling failed (astronomically unlikely)")


def sampler_biased_letters(dist, n: int, seed) -> tuple:
    """n i.i.d. letters from `dist` (letter -> probability), freely reduced.

    When the support is positive the word is positive, hence already
    cyclically reduced of length exactly n.
    """
    letters, weights = _letter_dist(dist)
    rng = random.Random(spawn_seed(seed, "biased-letters"))
    raw = rng.choices(letters, weights=weights, k=n)
    return free_reduce(raw)


def _letter_dist(dist):
    letters = []
    weights = []
    for k, p in dist.items():
        if isinstance(k, str):
            (k,) = parse_word(k)
        letters.append(k)
        weights.append(float(Fraction(p) if isinstance(p, str) else p))
    if abs(sum(weights) - 1.0) > 1e-9:
        raise ValueError("letter distribution must sum to 1")
    return letters, weights


def sampler_group_walk(mu, n: int, seed) -> tuple:
    """Product of n i.i.d. mu-increments, freely reduced.

    mu maps words (text or letter tuples) to probabilities.  The output
    length is at most C*n where C is the longest support word.
    """
    supp = []
    weights = []
    for k, p in mu.items():
        w = parse_word(k) if isinstance(k, str) else tuple(k)
        supp.append(w)
        weights.append(float(Fraction(p) if isinstance(p, str) else p))
    if abs(sum(weights) - 1.0) > 1e-9:
        raise ValueError("step distribution must sum to 1")
    rng = random.Random(spawn_seed(seed, "group-walk"))
    picks = rng.choices(range(len(supp)), weights=weights, k=n)
    out = []
    push = out.append
    pop = out.pop
    for i in picks:
        for y in supp[i]:
            if out and out[-1] == -y:
                pop()
            else:
                push(y)
    return tuple(out)


def sample_edge_path(chain: Fsmc, n: int, seed, init=None) -> list:
    """A feasible n-edge trajectory of a Gamma-based chain (stationary start
    by default)."""
    return fsmc.sample(chain, init, n, seed)


def sampler_fsmc_directed(chain: Fsmc, g: MarkedGraph, closing: ClosingSystem,
                          mode: str, n: int, seed, init=None):
    """Chain-directed non-backtracking walk, closed and read as a class.

    Returns (CyclicWord, closed_path).  mode is "hat" (append a connector)
    or "breve" (cyclically reduce when already closed).
    """
    path = sample_edge_path(chain, n, seed, init)
    if mode == "hat":
        closed = hat_closing(path, closing)
    elif mode == "breve":
        closed = breve_closing(path, closing)
    else:
        raise ValueError(f"unknown closing mode {mode!r}")
    return path_to_class(closed, g), closed


# -- chain presets ------------------------------------------------------------


@dataclass
class Preset:
    """A marked graph with a Gamma-based chain and its closing system."""

    name: str
    graph: MarkedGraph
    chain: Fsmc
    closing: ClosingSystem

    def sample(self, mode: str, n: int, seed):
        return sampler_fsmc_directed(self.chain, self.graph, self.closing, mode, n, seed)


def _uniform_nb_chain(g: MarkedGraph, states) -> Fsmc:
    """Uniform transitions over the reduced continuations inside `states`."""
    states = list(states)
    rows = []
    for e in states:
        allowed = [e2 for e2 in states
                   if g.terminus(e) == g.origin(e2) and e2 != g.inv(e)]
        if not allowed:
            raise ValueError(f"state {e} has no continuation")
        p = Fraction(1, len(allowed))
        rows.append([p if e2 in allowed else Fraction(0) for e2 in states])
    return Fsmc(states, rows)


def make_preset(name: str) -> Preset:
    """rose2 | rose-positive | lollipop | chart-example2 (paper worked examples)."""
    if name == "rose2":
        g = rose(2)
        chain = _uniform_nb_chain(g, sorted(g.edges))
    elif name == "rose-positive":
        g = rose(2)
        chain = _uniform_nb_chain(g, ["a", "b"])
    elif name == "lollipop":
        g = fan_of_lollipops(2)
        states = [e for e in sorted(g.edges) if not e.startswith("F")]
        chain = _uniform_nb_chain(g, states)
    elif name == "chart-example2":
        g = theta_chart()
        chain = _uniform_nb_chain(g, sorted(g.edges))
    else:
        raise KeyError(f"unknown preset {name!r}")
    ok, violations = validate_gamma_based(chain, g)
    assert ok, violations
    return Preset(name, g, chain, build_closing_system(g))


EX1_DIST = {"a": Fraction(1, 10), "b": Fraction(9, 10)}


def make_sampler(spec: dict):
    """Build a class sampler from a config dict; returns fn(n, seed) -> CyclicWord."""
    kind = spec["kind"]
    if kind == "uniform-cyclic":
        rank = spec.get("rank", 2)
        return lambda n, seed: sampler_uniform_cyclic(rank, n, seed)
    if kind == "uniform":
        rank = spec.get("rank", 2)

        def sample(n, seed):
            w = sampler_uniform_nb(rank, n, seed)
            core, _ = cyclic_reduce(w)
            return CyclicWord(core)

        return sample
    if kind == "biased":
        dist = spec.get("letters", EX1_DIST)

        def sample(n, seed):
            w = sampler_biased_letters(dist, n, seed)
            core, _ = cyclic_reduce(w)
            if not core:
                raise ValueError("biased sample reduced to the trivial word")
            return CyclicWord(core)

        return sample
    if kind == "preset-chain":
        preset = make_preset(spec["name"])
        mode = spec.get("mode", "hat")
        return lambda n, seed: preset.sample(mode, n, seed)[0]
    if kind == "group-walk":

        def sample(n, seed):
            w = sampler_group_walk(spec["mu"], n, seed)
            core, _ = cyclic_reduce(w)
            if not core:
                raise ValueError("group walk returned the trivial element")
            return CyclicWord(core)

        return sample
    raise KeyError(f"unknown sampler kind {kind!r}")
