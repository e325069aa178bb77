"""Experiment runner: seeded, persisted, resumable trials with CSV + figures.

Per-trial seeds are hash(master seed, experiment id, n, trial index), so the
execution order (or a parallel pool) cannot change any result.  Records are
appended to a JSON-lines file by a single writer; resuming skips every
(n, trial) pair already on disk after checking the stored config matches.
Each run writes, alongside the JSONL trial log: a CSV summary per length, a
summary JSON embedding the aggregated record ids, and a rendered PNG figure
(disable with plots=False / --no-plots).
"""

from __future__ import annotations

import csv
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .experiments import EXPERIMENTS
from .rng import spawn_seed

SCHEMA_VERSION = 1


@dataclass
class ExperimentConfig:
    experiment: str
    lengths: list
    trials: int
    seed: int
    sampler: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    out: str | None = None
    schema: int = SCHEMA_VERSION

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}; "
                             f"known: {sorted(EXPERIMENTS)}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if any(b <= a for a, b in zip(self.lengths, self.lengths[1:])):
            raise ValueError("lengths must be strictly increasing")
        if self.schema != SCHEMA_VERSION:
            raise ValueError(f"config schema {self.schema} != supported {SCHEMA_VERSION}")

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, data) -> "ExperimentConfig":
        return cls(**data)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass
class TrialRecord:
    experiment: str
    n: int
    trial: int
    seed: int
    values: dict
    status: str = "ok"
    runtime: float = 0.0

    @property
    def record_id(self) -> str:
        return f"{self.experiment}:{self.n}:{self.trial}"

    def to_json(self) -> dict:
        d = asdict(self)
        d["record_id"] = self.record_id
        return d

    @classmethod
    def from_json(cls, data) -> "TrialRecord":
        data = dict(data)
        data.pop("record_id", None)
        return cls(**data)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list
    summary: list
    paths: dict = field(default_factory=dict)


def trial_seed(cfg: ExperimentConfig, n: int, trial: int) -> int:
    return spawn_seed(cfg.seed, cfg.experiment, n, trial)


def run_trial(cfg: ExperimentConfig, n: int, trial: int) -> TrialRecord:
    seed = trial_seed(cfg, n, trial)
    exp = EXPERIMENTS[cfg.experiment]
    t0 = time.perf_counter()
    try:
        values = exp.trial(cfg, n, trial, seed)
        status = "ok"
    except Exception as err:  # cap overruns and refusals become records
        values = {"error": f"{type(err).__name__}: {err}"}
        status = "error"
        if "CapExceeded" in values["error"]:
            status = "cap-exceeded"
    return TrialRecord(cfg.experiment, n, trial, seed, values, status,
                       time.perf_counter() - t0)


def _pool_job(args):
    cfg_json, n, trial = args
    cfg = ExperimentConfig.from_json(cfg_json)
    return run_trial(cfg, n, trial)


def _load_existing(jsonl_path: Path):
    existing = {}
    if jsonl_path.exists():
        with open(jsonl_path) as fh:
            for line in fh:
                line = line.strip()
                if line:
                    rec = TrialRecord.from_json(json.loads(line))
                    existing[(rec.n, rec.trial)] = rec
    return existing


def run_experiment(cfg: ExperimentConfig, resume: bool = False, plots: bool = True,
                   threads: int | None = None) -> ExperimentResult:
    """Run all trials, persist records/summary/figure when cfg.out is set.

    With resume=True, records already on disk are kept (the stored config
    must match).  Records are computed with order-independent seeds, so a
    thread count > 1 (WH_THREADS or `threads`) cannot change any value.
    """
    exp = EXPERIMENTS[cfg.experiment]
    out_dir = Path(cfg.out) if cfg.out else None
    jsonl_path = cfg_path = None
    existing = {}
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        jsonl_path = out_dir / f"{cfg.experiment}_trials.jsonl"
        cfg_path = out_dir / f"{cfg.experiment}_config.json"
        if resume:
            if cfg_path.exists():
                with open(cfg_path) as fh:
                    stored = json.load(fh)
                if stored != cfg.to_json():
                    raise ValueError("stored config differs; refusing to resume")
            existing = _load_existing(jsonl_path)
        else:
            for p in (jsonl_path, cfg_path):
                if p.exists():
                    p.unlink()
        with open(cfg_path, "w") as fh:
            json.dump(cfg.to_json(), fh, indent=2)

    jobs = [(n, t) for n in cfg.lengths for t in range(cfg.trials)
            if (n, t) not in existing]
    threads = threads or int(os.environ.get("WH_THREADS", "1"))

    fresh = []
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            for rec in pool.map(_pool_job, [(cfg.to_json(), n, t) for n, t in jobs],
                                chunksize=max(1, len(jobs) // (threads * 8) or 1)):
                fresh.append(rec)
    else:
        for n, t in jobs:
            fresh.append(run_trial(cfg, n, t))

    if jsonl_path is not None and fresh:
        with open(jsonl_path, "a") as fh:  # append-only, single writer
            for rec in fresh:
                fh.write(json.dumps(rec.to_json()) + "\n")

    records = list(existing.values()) + fresh
    records.sort(key=lambda r: (r.n, r.trial))
    summary = exp.summarize(cfg, records)

    paths = {}
    if out_dir is not None:
        paths["trials"] = str(jsonl_path)
        paths["config"] = str(cfg_path)
        csv_path = out_dir / f"{cfg.experiment}_summary.csv"
        _write_summary_csv(csv_path, summary)
        paths["summary_csv"] = str(csv_path)
        summary_json = out_dir / f"{cfg.experiment}_summary.json"
        with open(summary_json, "w") as fh:
            json.dump({"config": cfg.to_json(), "summary": _jsonable(summary)}, fh,
                      indent=2, default=str)
        paths["summary_json"] = str(summary_json)
        if plots:
            fig_path = out_dir / f"{cfg.experiment}.png"
            _render_figure(fig_path, exp, summary)
            paths["figure"] = str(fig_path)
    return ExperimentResult(cfg, records, summary, paths)


def _jsonable(rows):
    out = []
    for row in rows:
        out.append({k: (str(v) if not isinstance(v, (int, float, str, bool, list, dict, type(None)))
                        else v) for k, v in row.items()})
    return out


def _write_summary_csv(path, rows):
    """CSV summary: one row per length; record id lists stay in the JSON."""
    if not rows:
        Path(path).write_text("")
        return
    fields = [k for k in rows[0] if k not in ("record_ids", "per_move")]
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row.get(k) for k in fields})


def _render_figure(path, exp, summary):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    exp.plot(summary, ax)
    ax.set_title(exp.name)
    fig.tight_layout()
    fig.savefig(path, dpi=130)
    plt.close(fig)
