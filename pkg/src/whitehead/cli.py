"""wh: command-line front end.

Word arguments use the text form "abAB" (capitals are inverses).  Most
commands print a JSON report to stdout; `current` prints the table as JSON
lines {word, weight}; `bench` writes JSONL/CSV/PNG files under the config's
output directory.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .algorithm import equivalent, level_component, minimize, stabilizer_generators
from .bench import ExperimentConfig, run_experiment
from .currents import (
    GraphChart,
    characteristic_current,
    counting_current,
    uniform_current,
)
from .fsmc import Fsmc
from .graphs import MarkedGraph
from .minimality import MleParams, MinimizingSet, detect_mlew, estimate_distortion
from .moves import get_move_set
from .samplers import make_preset, make_sampler
from .words import conjugacy_class, format_word


def _class_arg(text, rank):
    c = conjugacy_class(text)
    needed = max(abs(x) for x in c)
    if rank is not None and needed > rank:
        raise SystemExit(f"word needs rank >= {needed}, got --rank {rank}")
    return c, (rank or max(2, needed))


def _emit(data):
    json.dump(data, sys.stdout, indent=2, default=str)
    sys.stdout.write("\n")


def cmd_min(args):
    c, rank = _class_arg(args.word, args.rank)
    ms = get_move_set(rank)
    res = minimize(c, ms)
    _emit({"input": args.word, "class": str(c), "minimal": str(res.minimal),
           "minimal_length": len(res.minimal), "steps": res.steps,
           "witness": res.witness.to_json(ms)})


def cmd_equiv(args):
    c1, rank1 = _class_arg(args.word1, args.rank)
    c2, rank2 = _class_arg(args.word2, args.rank)
    ms = get_move_set(max(rank1, rank2))
    same, witness = equivalent(c1, c2, ms, args.cap)
    out = {"word1": args.word1, "word2": args.word2, "equivalent": same}
    if witness is not None:
        out["witness"] = witness.to_json(ms)
    _emit(out)


def cmd_orbit(args):
    c, rank = _class_arg(args.word, args.rank)
    ms = get_move_set(rank)
    res = minimize(c, ms)
    comp = level_component(res.minimal, ms, args.cap)
    _emit({"input": args.word, "minimal": str(res.minimal), "level": comp.level,
           "vertices": sorted(format_word(v) for v in comp.vertices),
           "vertex_count": comp.vertex_count, "edge_count": comp.edge_count})


def cmd_stab(args):
    c, rank = _class_arg(args.word, args.rank)
    ms = get_move_set(rank)
    res = minimize(c, ms)
    gens = stabilizer_generators(res.minimal, ms, args.cap)
    _emit({"input": args.word, "minimal": str(res.minimal),
           "generator_count": len(gens),
           "generators": [g.to_json(ms) for g in gens]})


def cmd_mle_detect(args):
    c, rank = _class_arg(args.word, args.rank)
    ms = get_move_set(rank)
    params = MleParams(args.m, Fraction(args.lam), Fraction(args.eps))
    result = detect_mlew(c, params, ms)
    if isinstance(result, MinimizingSet):
        _emit({"word": args.word, "mlew_minimal": True,
               "set": sorted(format_word(v) for v in result.classes),
               "params": {"m": args.m, "lambda": str(params.lam), "eps": str(params.eps)}})
    else:
        _emit({"word": args.word, "mlew_minimal": False,
               "violated_condition": result.condition, "detail": result.detail})


def cmd_spectrum(args):
    sampler = make_sampler(json.loads(args.preset) if args.preset.startswith("{")
                           else {"kind": args.preset, "rank": args.rank or 2})
    stream = (sampler(args.n, (args.seed, i)) for i in range(args.samples))
    ms = get_move_set(args.rank or 2)
    est = estimate_distortion(stream, args.radius, args.samples, ms, seed=args.seed)
    _emit({
        "j_hat": est.j_hat, "lambda_hat": est.lambda_hat, "m_hat": est.m_hat,
        "delta_hat": [[format_word(img) or "1" for img in images] for images in est.delta_hat],
        "collisions": est.collisions,
        "warnings": est.warnings,
        "entries": [
            {"images": [format_word(img) or "1" for img in e.images],
             "mean_ratio": e.mean, "stderr": e.stderr,
             "first_kind_product": e.is_first_kind_product}
            for e in est.entries],
    })


def cmd_current(args):
    if args.kind == "uniform":
        table = uniform_current(args.rank or 2, args.depth)
    elif args.kind == "counting":
        if not args.word:
            raise SystemExit("counting current needs --word")
        c, rank = _class_arg(args.word, args.rank)
        table = counting_current(c, rank, args.depth)
    elif args.kind == "characteristic":
        if args.preset:
            p = make_preset(args.preset)
            chain, graph = p.chain, p.graph
        elif args.chain and args.graph:
            with open(args.chain) as fh:
                chain = Fsmc.from_json(json.load(fh))
            graph = MarkedGraph.load(args.graph)
        else:
            raise SystemExit("characteristic current needs --preset or --chain with --graph")
        table = characteristic_current(chain, graph, args.depth)
    else:
        raise SystemExit(f"unknown current kind {args.kind}")
    table.dump_jsonl(sys.stdout)


def cmd_bench(args):
    cfg = ExperimentConfig.load(args.config)
    if args.experiment != cfg.experiment:
        raise SystemExit(f"config is for {cfg.experiment!r}, not {args.experiment!r}")
    if args.out:
        cfg.out = args.out
    result = run_experiment(cfg, resume=args.resume, plots=not args.no_plots,
                            threads=args.threads)
    _emit({"experiment": cfg.experiment,
           "records": len(result.records),
           "summary": [{k: v for k, v in row.items() if k != "record_ids"}
                       for row in result.summary],
           "paths": result.paths})


def build_parser():
    ap = argparse.ArgumentParser(prog="wh", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(fn=fn)
        p.add_argument("--rank", type=int, default=None,
                       help="free group rank (default: inferred from the words)")
        return p

    p = add("min", cmd_min, "Whitehead-minimize a conjugacy class")
    p.add_argument("word")

    p = add("equiv", cmd_equiv, "decide automorphic equivalence of two classes")
    p.add_argument("word1")
    p.add_argument("word2")
    p.add_argument("--cap", type=int, default=10 ** 6)

    p = add("orbit", cmd_orbit, "minimal level-graph component of a class")
    p.add_argument("word")
    p.add_argument("--cap", type=int, default=10 ** 6)

    p = add("stab", cmd_stab, "stabilizer generators of a class")
    p.add_argument("word")
    p.add_argument("--cap", type=int, default=10 ** 6)

    p = add("mle-detect", cmd_mle_detect, "linear-time (M,lambda,eps,W)-minimality test")
    p.add_argument("word")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--lambda", dest="lam", required=True,
                   help="rational threshold, e.g. 3/2")
    p.add_argument("--eps", required=True, help="rational slack, e.g. 1/10")

    p = add("spectrum", cmd_spectrum, "Monte-Carlo distortion spectrum estimate")
    p.add_argument("--preset", default="uniform-cyclic",
                   help='sampler kind or JSON spec (default "uniform-cyclic")')
    p.add_argument("--radius", type=int, default=1)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--n", type=int, default=1000, help="sampled word length")
    p.add_argument("--seed", type=int, default=0)

    p = add("current", cmd_current, "dump a finite-depth current table as JSON lines")
    p.add_argument("kind", choices=["counting", "uniform", "characteristic"])
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--word", default=None)
    p.add_argument("--preset", default=None)
    p.add_argument("--chain", default=None, help="chain JSON file")
    p.add_argument("--graph", default=None, help="marked graph JSON file")

    p = sub.add_parser("bench", help="run a benchmark experiment from a config file")
    p.set_defaults(fn=cmd_bench)
    p.add_argument("experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--resume", action="store_true")
    p.add_argument("--no-plots", action="store_true")
    p.add_argument("--out", default=None, help="override the config output directory")
    p.add_argument("--threads", type=int, default=None,
                   help="trial parallelism (default: WH_THREADS or 1)")

    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    args.fn(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
