"""The desk-scale genericity experiments behind the bench CLI.

Each experiment contributes a trial function (pure given its per-trial seed),
a summarizer over completed trial records, and a figure renderer.  Measured
quantities in trial values are exact (integers, booleans) wherever possible
so that records reproduce bit-for-bit under a fixed seed; wall-clock runtime
fields are exempt.

The headline limit theorems are not finite statements; the experiments here
are their designated finite surrogates (fractions at fixed n, decreasing
distances, bounded set sizes), with thresholds that are engineering choices
recorded in the configs.
"""

from __future__ import annotations

import math
import statistics
import time
from fractions import Fraction
from functools import lru_cache

from . import fsmc as fsmc_mod
from .algorithm import CapExceeded, equivalent, level_component, minimize
from .currents import (
    GraphChart,
    characteristic_current,
    counting_current,
    default_probes,
    projective_distance,
)
from .minimality import is_strictly_minimal
from .moves import get_move_set
from .rng import CounterRng, spawn_seed
from .samplers import (
    EX1_DIST,
    make_preset,
    sampler_biased_letters,
    sampler_group_walk,
    sampler_uniform_cyclic,
    sampler_uniform_nb,
)
from .words import CyclicWord, cyclic_reduce


@lru_cache(maxsize=None)
def _preset(name):
    return make_preset(name)


@lru_cache(maxsize=None)
def _char_table(name, depth):
    p = _preset(name)
    return characteristic_current(p.chain, p.graph, depth)


def _rank(cfg) -> int:
    return int(cfg.sampler.get("rank", cfg.params.get("rank", 2)))


def _sample_class(cfg, n, seed) -> CyclicWord:
    kind = cfg.sampler.get("kind", "uniform-cyclic")
    if kind == "uniform-cyclic":
        return sampler_uniform_cyclic(_rank(cfg), n, seed)
    if kind == "uniform":
        w = sampler_uniform_nb(_rank(cfg), n, seed)
        core, _ = cyclic_reduce(w)
        return CyclicWord(core)
    if kind == "biased":
        dist = cfg.sampler.get("letters", EX1_DIST)
        core, _ = cyclic_reduce(sampler_biased_letters(dist, n, seed))
        return CyclicWord(core)
    if kind == "preset-chain":
        p = _preset(cfg.sampler["name"])
        return p.sample(cfg.sampler.get("mode", "hat"), n, seed)[0]
    if kind == "group-walk":
        core, _ = cyclic_reduce(sampler_group_walk(cfg.sampler["mu"], n, seed))
        return CyclicWord(core)
    raise KeyError(f"unknown sampler kind {kind!r}")


def _fraction_row(records, key):
    hits = sum(1 for r in records if r.values[key])
    total = len(records)
    frac = hits / total
    stderr = math.sqrt(max(frac * (1 - frac), 1e-12) / total)
    return hits, total, frac, stderr


# -- strict minimality ---------------------------------------------------------


def strict_minimality_trial(cfg, n, trial, seed):
    c = _sample_class(cfg, n, seed)
    ms = get_move_set(_rank(cfg))
    return {"strictly_minimal": is_strictly_minimal(c, ms), "length": len(c)}


def strict_minimality_summary(cfg, records):
    rows = []
    for n in cfg.lengths:
        recs = [r for r in records if r.n == n and r.status == "ok"]
        hits, total, frac, stderr = _fraction_row(recs, "strictly_minimal")
        rows.append({"n": n, "trials": total, "strictly_minimal": hits,
                     "fraction": frac, "stderr": stderr,
                     "record_ids": [r.record_id for r in recs]})
    return rows


def strict_minimality_plot(rows, ax):
    ns = [r["n"] for r in rows]
    fr = [r["fraction"] for r in rows]
    err = [3 * r["stderr"] for r in rows]
    ax.errorbar(ns, fr, yerr=err, marker="o")
    ax.set_xscale("log")
    ax.set_xlabel("word length n")
    ax.set_ylabel("strictly minimal fraction")
    ax.set_ylim(-0.02, 1.02)
    ax.grid(True, alpha=0.3)


# -- Example-1 quantitative ratio ---------------------------------------------


def _ex1_move(rank=2):
    ms = get_move_set(rank)
    return ms, ms.find({1: (1, -2)})  # a -> a b^-1, b -> b


def ex1_ratio_trial(cfg, n, trial, seed):
    dist = cfg.sampler.get("letters", EX1_DIST)
    w = sampler_biased_letters(dist, n, seed)
    core, _ = cyclic_reduce(w)
    c = CyclicWord(core)
    ms, mv = _ex1_move()
    image_len = ms.image_lengths(c)[mv.index]
    return {"length": len(c), "image_length": image_len,
            "drop": len(c) - image_len}


def ex1_ratio_summary(cfg, records):
    rows = []
    for n in cfg.lengths:
        recs = [r for r in records if r.n == n and r.status == "ok"]
        ratios = [r.values["image_length"] / r.values["length"] for r in recs]
        drops = [r.values["drop"] / n for r in recs]
        rows.append({
            "n": n, "trials": len(recs),
            "mean_ratio": statistics.fmean(ratios),
            "ratio_sd": statistics.pstdev(ratios) if len(ratios) > 1 else 0.0,
            "mean_drop_per_n": statistics.fmean(drops),
            "record_ids": [r.record_id for r in recs]})
    return rows


def ex1_ratio_plot(rows, ax):
    ns = [r["n"] for r in rows]
    ax.errorbar(ns, [r["mean_ratio"] for r in rows],
                yerr=[3 * r["ratio_sd"] / math.sqrt(r["trials"]) for r in rows],
                marker="o", label="mean ||tau(w)||/||w||")
    ax.axhline(0.922, ls="--", c="gray", label="asymptotic bound 0.922")
    ax.set_xscale("log")
    ax.set_xlabel("word length n")
    ax.set_ylabel("length ratio under a -> ab^-1")
    ax.legend()
    ax.grid(True, alpha=0.3)


# -- single-move distortion floor ----------------------------------------------


def lambda0_trial(cfg, n, trial, seed):
    c = sampler_uniform_cyclic(_rank(cfg), n, seed)
    ms = get_move_set(_rank(cfg))
    return {"length": len(c), "image_lengths": ms.image_lengths(c)}


def lambda0_summary(cfg, records):
    ms = get_move_set(_rank(cfg))
    rows = []
    for n in cfg.lengths:
        recs = [r for r in records if r.n == n and r.status == "ok"]
        per_move = []
        for mv in ms:
            ratios = [r.values["image_lengths"][mv.index] / r.values["length"] for r in recs]
            per_move.append({
                "move": mv.index, "kind": mv.kind, "inner": mv.is_inner,
                "mean_ratio": statistics.fmean(ratios),
                "min_ratio": min(ratios), "max_ratio": max(ratios)})
        candidates = [m for m in per_move if m["kind"] == 2 and not m["inner"]]
        rank = _rank(cfg)
        rows.append({
            "n": n, "trials": len(recs),
            "lambda0_theory": 1 + Fraction(2 * rank - 3, 2 * rank * rank - rank),
            "min_non_first_kind_mean": min(m["mean_ratio"] for m in candidates),
            "first_kind_exact": all(m["mean_ratio"] == 1.0 and m["min_ratio"] == 1.0
                                    and m["max_ratio"] == 1.0
                                    for m in per_move if m["kind"] == 1),
            "per_move": per_move,
            "record_ids": [r.record_id for r in recs]})
    return rows


def lambda0_plot(rows, ax):
    row = rows[-1]
    moves = row["per_move"]
    xs = [m["move"] for m in moves]
    ys = [m["mean_ratio"] for m in moves]
    colors = ["tab:blue" if m["kind"] == 1 else ("tab:gray" if m["inner"] else "tab:red")
              for m in moves]
    ax.bar(xs, ys, color=colors)
    ax.axhline(float(row["lambda0_theory"]), ls="--", c="k",
               label=f"lambda_0 = {row['lambda0_theory']}")
    ax.set_xlabel("move index (blue: first kind, red: second kind, gray: inner)")
    ax.set_ylabel(f"mean length ratio at n={row['n']}")
    ax.legend()
    ax.grid(True, alpha=0.3, axis="y")


# -- adaptedness ----------------------------------------------------------------


def adaptedness_trial(cfg, n, trial, seed):
    depth = int(cfg.params.get("depth", 3))
    kind = cfg.sampler.get("kind", "preset-chain")
    if kind == "group-walk":
        w1 = sampler_group_walk(cfg.sampler["mu"], n, seed)
        w2 = sampler_group_walk(cfg.sampler["mu"], 2 * n, seed)
        c1 = CyclicWord(cyclic_reduce(w1)[0])
        c2 = CyclicWord(cyclic_reduce(w2)[0])
        t1 = counting_current(c1, None, depth)
        t2 = counting_current(c2, None, depth)
        d = projective_distance(t1, t2, default_probes(t1.chart, depth))
        return {"cauchy_distance": d, "len_n": len(c1), "len_2n": len(c2)}
    name = cfg.sampler["name"]
    mode = cfg.sampler.get("mode", "hat")
    p = _preset(name)
    _, closed = p.sample(mode, n, seed)
    table = counting_current(closed, GraphChart(p.graph), depth)
    char = _char_table(name, depth)
    d = projective_distance(table, char, default_probes(GraphChart(p.graph), depth))
    return {"distance": d, "closed_length": len(closed)}


def adaptedness_summary(cfg, records):
    key = "cauchy_distance" if cfg.sampler.get("kind") == "group-walk" else "distance"
    rows = []
    for n in cfg.lengths:
        recs = [r for r in records if r.n == n and r.status == "ok"]
        ds = [r.values[key] for r in recs]
        rows.append({"n": n, "trials": len(recs),
                     "mean_distance": statistics.fmean(ds), "max_distance": max(ds),
                     "record_ids": [r.record_id for r in recs]})
    return rows


def adaptedness_plot(rows, ax):
    ns = [r["n"] for r in rows]
    ax.plot(ns, [r["mean_distance"] for r in rows], marker="o", label="mean")
    ax.plot(ns, [r["max_distance"] for r in rows], marker="x", ls=":", label="max")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("walk length n")
    ax.set_ylabel("depth-3 projective distance")
    ax.legend()
    ax.grid(True, alpha=0.3)


# -- minimizing set stability ----------------------------------------------------


def minset_stability_trial(cfg, n, trial, seed):
    c = _sample_class(cfg, n, seed)
    ms = get_move_set(_rank(cfg))
    cap = int(cfg.params.get("vertex_cap", 10 ** 6))
    res = minimize(c, ms)
    try:
        comp = level_component(res.minimal, ms, cap)
    except CapExceeded:
        return {"min_steps": res.steps, "cap_exceeded": True,
                "m_size": None, "stab_loops": None, "min_length": len(res.minimal)}
    loops = comp.edge_count - comp.vertex_count + 1
    return {"min_steps": res.steps, "cap_exceeded": False,
            "m_size": comp.vertex_count, "stab_loops": loops,
            "min_length": len(res.minimal)}


def minset_stability_summary(cfg, records):
    bound = int(cfg.params.get("m_bound", 8))
    step_bound = int(cfg.params.get("step_bound", 3))
    rows = []
    for n in cfg.lengths:
        recs = [r for r in records if r.n == n and r.status == "ok"]
        sizes = [r.values["m_size"] for r in recs if not r.values["cap_exceeded"]]
        steps = [r.values["min_steps"] for r in recs]
        row = {
            "n": n, "trials": len(recs),
            "capped": sum(1 for r in recs if r.values["cap_exceeded"]),
            "frac_steps_small": sum(1 for s in steps if s <= step_bound) / len(steps),
            "steps_max": max(steps),
            "record_ids": [r.record_id for r in recs]}
        if sizes:
            row.update({
                "m_size_max": max(sizes),
                "m_size_median": statistics.median(sizes),
                "frac_m_bounded": sum(1 for s in sizes if s <= bound) / len(sizes),
                "stab_loops_median": statistics.median(
                    r.values["stab_loops"] for r in recs
                    if not r.values["cap_exceeded"])})
        else:
            row.update({"m_size_max": None, "m_size_median": None,
                        "frac_m_bounded": 0.0, "stab_loops_median": None})
        rows.append(row)
    return rows


def minset_stability_plot(rows, ax):
    rows = [r for r in rows if r.get("m_size_max") is not None]
    if not rows:
        return
    ns = [r["n"] for r in rows]
    ax.plot(ns, [r["m_size_max"] for r in rows], marker="o", label="max #M")
    ax.plot(ns, [r["m_size_median"] for r in rows], marker="s", label="median #M")
    ax.plot(ns, [r["steps_max"] for r in rows], marker="^", ls=":", label="max min-steps")
    ax.set_xscale("log")
    ax.set_xlabel("word length n")
    ax.set_ylabel("count")
    ax.legend()
    ax.grid(True, alpha=0.3)


# -- equivalence fuzzing -----------------------------------------------------------


def equiv_fuzz_trial(cfg, n, trial, seed):
    ms = get_move_set(_rank(cfg))
    cap = int(cfg.params.get("vertex_cap", 10 ** 6))
    c = sampler_uniform_cyclic(_rank(cfg), n, spawn_seed(seed, "base"))
    rng = CounterRng(seed, "fuzz-moves")
    k = 1 + rng.randrange(0, 3)
    twisted = c
    for i in range(k):
        twisted = ms[rng.randrange(i + 1, len(ms))].apply_to_class(twisted)
    t0 = time.perf_counter()
    same, witness = equivalent(c, twisted, ms, cap)
    dt = time.perf_counter() - t0
    manufactured_ok = bool(same and witness is not None and witness.verify(ms))
    other = sampler_uniform_cyclic(_rank(cfg), n, spawn_seed(seed, "indep"))
    same2, witness2 = equivalent(c, other, ms, cap)
    independent_ok = (not same2) or (witness2 is not None and witness2.verify(ms))
    return {"manufactured_detected": manufactured_ok,
            "independent_equivalent": bool(same2),
            "independent_ok": independent_ok,
            "runtime_equiv": dt}


def equiv_fuzz_summary(cfg, records):
    rows = []
    for n in cfg.lengths:
        recs = [r for r in records if r.n == n and r.status == "ok"]
        hits, total, frac, _ = _fraction_row(recs, "manufactured_detected")
        rows.append({
            "n": n, "trials": total,
            "manufactured_detected": hits,
            "manufactured_fraction": frac,
            "independent_equivalent": sum(1 for r in recs if r.values["independent_equivalent"]),
            "all_witnesses_verified": all(r.values["independent_ok"] for r in recs),
            "median_runtime": statistics.median(r.values["runtime_equiv"] for r in recs),
            "record_ids": [r.record_id for r in recs]})
    if len(rows) >= 2:
        n0, n1 = rows[0]["n"], rows[-1]["n"]
        t0, t1 = rows[0]["median_runtime"], rows[-1]["median_runtime"]
        slope = math.log(t1 / t0) / math.log(n1 / n0)
        for r in rows:
            r["runtime_loglog_slope"] = slope
    return rows


def equiv_fuzz_plot(rows, ax):
    ns = [r["n"] for r in rows]
    ax.plot(ns, [r["median_runtime"] for r in rows], marker="o")
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_xlabel("word length n")
    ax.set_ylabel("median equivalence runtime (s)")
    if "runtime_loglog_slope" in rows[-1]:
        ax.set_title(f"log-log slope {rows[-1]['runtime_loglog_slope']:.2f}")
    ax.grid(True, alpha=0.3)


# -- quasi-inversion bound -----------------------------------------------------------


def _quasi_inversion_setup(cfg):
    p = _preset(cfg.sampler.get("name", "rose2"))
    if not fsmc_mod.is_tight(p.chain):
        raise ValueError(f"preset {p.name} chain is not tight; experiment refuses to run")
    iota = {}
    states = set(p.chain.states)
    for e in p.chain.states:
        if p.graph.inv(e) in states:
            iota[e] = p.graph.inv(e)
    sigma = max(float(x) for row in p.chain.rows for x in row)
    return p, iota, sigma


def quasi_inversion_trial(cfg, n, trial, seed):
    p, iota, _ = _quasi_inversion_setup(cfg)
    traj = fsmc_mod.sample(p.chain, None, n, seed)
    k = int(math.isqrt(n))
    head = traj[:k]
    tail = traj[n - k:]
    mapped = [iota.get(s) for s in reversed(tail)]
    return {"coincidence": head == mapped}


def quasi_inversion_summary(cfg, records):
    try:
        _, _, sigma = _quasi_inversion_setup(cfg)
    except ValueError as err:
        return [{"n": n, "trials": 0, "refused": str(err),
                 "record_ids": [r.record_id for r in records if r.n == n]}
                for n in cfg.lengths]
    rows = []
    for n in cfg.lengths:
        recs = [r for r in records if r.n == n and r.status == "ok"]
        hits, total, frac, stderr = _fraction_row(recs, "coincidence")
        k = int(math.isqrt(n))
        bound = sigma ** k
        rows.append({"n": n, "trials": total, "coincidences": hits,
                     "frequency": frac, "bound_sigma_pow_k": bound,
                     "threshold": bound + 3 * stderr,
                     "within_bound": frac <= bound + 3 * stderr,
                     "record_ids": [r.record_id for r in recs]})
    return rows


def quasi_inversion_plot(rows, ax):
    rows = [r for r in rows if "frequency" in r]
    if not rows:
        return
    ns = [str(r["n"]) for r in rows]
    x = range(len(rows))
    ax.bar([i - 0.2 for i in x], [r["frequency"] for r in rows], width=0.4,
           label="empirical frequency")
    ax.bar([i + 0.2 for i in x], [r["bound_sigma_pow_k"] for r in rows], width=0.4,
           label="sigma^floor(sqrt(n))")
    ax.set_xticks(list(x), ns)
    ax.set_yscale("log")
    ax.set_xlabel("n")
    ax.set_ylabel("probability")
    ax.legend()
    ax.grid(True, alpha=0.3, axis="y")


# -- registry -------------------------------------------------------------------


class Experiment:
    def __init__(self, name, trial, summarize, plot):
        self.name = name
        self.trial = trial
        self.summarize = summarize
        self.plot = plot


EXPERIMENTS = {
    "strict-minimality": Experiment("strict-minimality", strict_minimality_trial,
                                    strict_minimality_summary, strict_minimality_plot),
    "ex1-ratio": Experiment("ex1-ratio", ex1_ratio_trial,
                            ex1_ratio_summary, ex1_ratio_plot),
    "lambda0": Experiment("lambda0", lambda0_trial, lambda0_summary, lambda0_plot),
    "adaptedness": Experiment("adaptedness", adaptedness_trial,
                              adaptedness_summary, adaptedness_plot),
    "minset-stability": Experiment("minset-stability", minset_stability_trial,
                                   minset_stability_summary, minset_stability_plot),
    "equiv-fuzz": Experiment("equiv-fuzz", equiv_fuzz_trial,
                             equiv_fuzz_summary, equiv_fuzz_plot),
    "quasi-inversion": Experiment("quasi-inversion", quasi_inversion_trial,
                                  quasi_inversion_summary, quasi_inversion_plot),
}
