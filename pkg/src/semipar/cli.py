"""Benchmark harness CLI: seeded trials, work statistics, bound evaluation.

Subcommands: semisort, intsort, placement, partition, mis, color, bounds.
Each experiment runs ``--trials`` seeded trials, verifies every
correctness-bearing output, and emits one row per trial as CSV or JSON.
Output rows embed no wall-clock data, so identical configs produce
byte-identical files; wall time is reported on the summary line only.

Exit codes: 0 success, 1 verifier/assertion failure, 2 config error,
3 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bounds as bounds_mod
from .graph import cull_partition, generate, piece_edge_counts
from .graph_algos import boosted_coloring, boosted_mis, verify_coloring, verify_mis
from .meter import WorkMeter
from .placement import PlacementInstance, PlacementTimeout, default_round_cap, place
from .prng import derive, generator
from .records import Records, group_counts, is_semisorted, same_multiset
from .semisort import SemisortParams, integer_sort, semisort

EXIT_OK = 0
EXIT_VERIFY = 1
EXIT_CONFIG = 2
EXIT_IO = 3

CSV_COLUMNS = [
    "trial",
    "seed",
    "n",
    "m",
    "k",
    "dist",
    "charged_work",
    "rounds",
    "restarts",
    "max_bucket_size",
    "max_attempts",
    "verified",
]

DISTRIBUTIONS = ("uniform", "zipf", "all_equal", "all_distinct")


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    algorithm: str
    n: int = 1 << 14
    m: int = 1 << 16
    k: int = 0              # 0 means ceil(log2 n)
    dist: str = "uniform"
    theta: float = 1.0
    trials: int = 1
    seed: int = 1
    out: str | None = None
    fmt: str = "csv"
    graph_kind: str = "gnm"
    params: dict[str, float] = field(default_factory=dict)

    def resolved_k(self) -> int:
        return self.k if self.k > 0 else max(1, math.ceil(math.log2(max(self.n, 2))))

    def validate(self) -> None:
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if self.dist not in DISTRIBUTIONS:
            raise ConfigError(f"dist must be one of {DISTRIBUTIONS}")
        if self.fmt not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        if self.n < 1:
            raise ConfigError("n must be positive")


@dataclass
class TrialRecord:
    trial: int
    seed: int
    n: int
    m: int = 0
    k: int = 0
    dist: str = ""
    charged_work: int = 0
    rounds: int = 0
    restarts: int = 0
    max_bucket_size: int = 0
    max_attempts: int = 0
    verified: bool = True
    wall_time: float = 0.0

    def row(self) -> dict:
        d = dataclasses.asdict(self)
        d.pop("wall_time")
        d["verified"] = int(self.verified)
        return d


def gen_keys(dist: str, n: int, seed: int, theta: float = 1.0) -> Records:
    """Seeded key generator for the benchmark distributions."""
    rng = generator(seed, 0xD15)
    if dist == "uniform":
        keys = rng.integers(0, max(n, 1), size=n, dtype=np.uint64)
    elif dist == "all_equal":
        keys = np.full(n, int(rng.integers(0, 1 << 32)), dtype=np.uint64)
    elif dist == "all_distinct":
        keys = rng.permutation(n).astype(np.uint64)
    elif dist == "zipf":
        ranks = np.arange(1, n + 1, dtype=np.float64)
        w = ranks**-theta
        p = w / w.sum()
        keys = rng.choice(n, size=n, p=p).astype(np.uint64)
    else:
        raise ConfigError(f"unknown distribution {dist!r}")
    payloads = np.arange(n, dtype=np.uint64)
    return Records(keys, payloads)


def tail_report(records: list[TrialRecord]) -> dict:
    """Per-metric max/mean/quantiles plus the work-per-element slope."""
    if not records:
        raise ValueError("need at least one trial record")
    out: dict = {"trials": len(records)}
    for metric in ("charged_work", "rounds", "restarts", "max_bucket_size", "max_attempts"):
        vals = np.array([getattr(r, metric) for r in records], dtype=np.float64)
        out[metric] = {
            "max": float(vals.max()),
            "mean": float(vals.mean()),
            "p50": float(np.quantile(vals, 0.5)),
            "p90": float(np.quantile(vals, 0.9)),
            "p99": float(np.quantile(vals, 0.99)),
        }
    sizes = sorted({r.n for r in records})
    if len(sizes) >= 2:
        per_n = {
            s: max(r.charged_work / max(r.n, 1) for r in records if r.n == s)
            for s in sizes
        }
        lo, hi = sizes[0], sizes[-1]
        out["work_per_element_slope"] = per_n[hi] / per_n[lo] if per_n[lo] else math.inf
    return out


# ---------------------------------------------------------------------------
# Per-algorithm trial runners


def _semisort_params(cfg: ExperimentConfig, n: int) -> SemisortParams:
    overrides = {
        k: (int(v) if k not in ("p_s", "alpha", "c_alloc") else v)
        for k, v in cfg.params.items()
        if k in {f.name for f in dataclasses.fields(SemisortParams)}
    }
    return SemisortParams.for_n(n, **overrides)


def _run_semisort(cfg: ExperimentConfig, trial: int) -> TrialRecord:
    seed = derive(cfg.seed, trial)
    data = gen_keys(cfg.dist, cfg.n, seed, cfg.theta)
    meter = WorkMeter()
    out, trace = semisort(data, _semisort_params(cfg, cfg.n), seed, meter)
    ok = (
        is_semisorted(out)
        and same_multiset(data, out)
        and group_counts(out) == group_counts(data)
    )
    return TrialRecord(
        trial=trial, seed=seed, n=cfg.n, dist=cfg.dist,
        charged_work=meter.total_ops, rounds=meter.rounds,
        restarts=trace.restarts, max_bucket_size=trace.max_bucket_size,
        max_attempts=int(trace.bucket_attempts.max(initial=1)), verified=ok,
    )


def _run_intsort(cfg: ExperimentConfig, trial: int) -> TrialRecord:
    seed = derive(cfg.seed, trial)
    data = gen_keys(cfg.dist if cfg.dist != "all_equal" else "uniform", cfg.n, seed, cfg.theta)
    data = Records(data.keys % np.uint64(max(cfg.n, 1)), data.payloads)
    meter = WorkMeter()
    out = integer_sort(data, _semisort_params(cfg, cfg.n), seed, meter)
    ok = bool(
        np.array_equal(np.sort(data.keys), out.keys) and same_multiset(data, out)
    )
    return TrialRecord(
        trial=trial, seed=seed, n=cfg.n, dist=cfg.dist,
        charged_work=meter.total_ops, rounds=meter.rounds, verified=ok,
    )


def _run_placement(cfg: ExperimentConfig, trial: int) -> TrialRecord:
    seed = derive(cfg.seed, trial)
    n = cfg.n
    d = max(1, math.ceil(math.log2(max(n, 2))))
    n_targets = max(1, n // 64)
    rng = generator(seed, 0x11)
    targets = rng.integers(0, n_targets, size=n, dtype=np.int64)
    counts = np.bincount(targets, minlength=n_targets)
    caps = np.ceil(2.0 * counts).astype(np.int64)
    caps[caps == 0] = 1
    inst = PlacementInstance(targets=targets, capacities=caps, alpha=2.0, d=d)
    meter = WorkMeter()
    ok = True
    rounds = 0
    try:
        res = place(inst, default_round_cap(n), seed, meter)
        rounds = res.rounds_used
        placed = res.slot_of
        ok = len(np.unique(placed)) == n and bool(
            (placed >= inst.offsets[targets]).all()
            and (placed < inst.offsets[targets + 1]).all()
        )
    except PlacementTimeout:
        ok = False
    return TrialRecord(
        trial=trial, seed=seed, n=n, dist=cfg.dist,
        charged_work=meter.total_ops, rounds=rounds, verified=ok,
    )


def _run_partition(cfg: ExperimentConfig, trial: int) -> TrialRecord:
    seed = derive(cfg.seed, trial)
    g = generate(cfg.graph_kind, cfg.n, cfg.m, seed)
    k = cfg.resolved_k()
    meter = WorkMeter()
    part = cull_partition(g, k, seed, meter)
    counts = piece_edge_counts(g, part)
    max_piece = int(counts.max(initial=0))
    lg = max(1, math.ceil(math.log2(max(cfg.n, 2))))
    ok = len(part.culled) <= part.phases * 4 * k**4 * lg if part.phases else True
    return TrialRecord(
        trial=trial, seed=seed, n=cfg.n, m=g.m, k=k, dist=cfg.graph_kind,
        charged_work=meter.total_ops, rounds=meter.rounds,
        max_bucket_size=max_piece, verified=ok,
    )


def _run_mis(cfg: ExperimentConfig, trial: int) -> TrialRecord:
    seed = derive(cfg.seed, trial)
    g = generate(cfg.graph_kind, cfg.n, cfg.m, seed)
    k = cfg.resolved_k()
    meter = WorkMeter()
    in_set = boosted_mis(g, k, seed, meter)
    ok = verify_mis(g, in_set)
    return TrialRecord(
        trial=trial, seed=seed, n=cfg.n, m=g.m, k=k, dist=cfg.graph_kind,
        charged_work=meter.total_ops, rounds=meter.rounds, verified=ok,
    )


def _run_color(cfg: ExperimentConfig, trial: int) -> TrialRecord:
    seed = derive(cfg.seed, trial)
    g = generate(cfg.graph_kind, cfg.n, cfg.m, seed)
    k = cfg.resolved_k()
    meter = WorkMeter()
    colors = boosted_coloring(g, k, seed, meter)
    ok = verify_coloring(g, colors, g.max_degree())
    return TrialRecord(
        trial=trial, seed=seed, n=cfg.n, m=g.m, k=k, dist=cfg.graph_kind,
        charged_work=meter.total_ops, rounds=meter.rounds, verified=ok,
    )


_RUNNERS = {
    "semisort": _run_semisort,
    "intsort": _run_intsort,
    "placement": _run_placement,
    "partition": _run_partition,
    "mis": _run_mis,
    "color": _run_color,
}


# ---------------------------------------------------------------------------
# Output


def _config_header(cfg: ExperimentConfig) -> dict:
    d = dataclasses.asdict(cfg)
    # Output destination is not part of the experiment: identical configs
    # must produce byte-identical files regardless of where they land.
    d.pop("out")
    d["resolved_k"] = cfg.resolved_k()
    if cfg.algorithm in ("semisort", "intsort"):
        d["semisort_params"] = dataclasses.asdict(_semisort_params(cfg, cfg.n))
    return d


def emit_csv(cfg: ExperimentConfig, records: list[TrialRecord]) -> str:
    lines = [f"# {json.dumps(_config_header(cfg), sort_keys=True)}"]
    lines.append(",".join(CSV_COLUMNS))
    for r in records:
        row = r.row()
        lines.append(",".join(str(row[c]) for c in CSV_COLUMNS))
    return "\n".join(lines) + "\n"


def emit_json(cfg: ExperimentConfig, records: list[TrialRecord]) -> str:
    return json.dumps(
        {"config": _config_header(cfg), "trials": [r.row() for r in records]},
        sort_keys=True,
        indent=2,
    ) + "\n"


# ---------------------------------------------------------------------------
# Argument handling


def _parse_param(text: str) -> tuple[str, float]:
    if "=" not in text:
        raise ConfigError(f"--param expects KEY=VALUE, got {text!r}")
    key, value = text.split("=", 1)
    try:
        return key.strip(), float(value)
    except ValueError:
        raise ConfigError(f"--param value must be numeric: {text!r}")


def _load_config_file(path: str) -> dict[str, str]:
    out = {}
    try:
        for line in Path(path).read_text().splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"bad config line: {line!r}")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}")
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="semipar-bench", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in (*_RUNNERS, "bounds"):
        p = sub.add_parser(name)
        p.add_argument("--n", type=int, default=1 << 14)
        p.add_argument("--m", type=int, default=1 << 16)
        p.add_argument("--k", type=int, default=0)
        p.add_argument("--dist", default="uniform")
        p.add_argument("--graph", default="gnm", choices=["gnm", "star", "path", "power_law"])
        p.add_argument("--theta", type=float, default=1.0)
        p.add_argument("--trials", type=int, default=1)
        p.add_argument("--seed", type=int, default=1)
        p.add_argument("--out", default=None)
        p.add_argument("--format", dest="fmt", default="csv", choices=["csv", "json"])
        p.add_argument("--param", action="append", default=[])
        p.add_argument("--config", default=None)
        if name == "bounds":
            p.add_argument("--bound", required=True, choices=sorted(bounds_mod._EVALUATORS))
            p.add_argument("--weights", default=None, help="comma-separated list")
    return parser


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    overrides = dict(_parse_param(p) for p in args.param)
    file_vals = _load_config_file(args.config) if args.config else {}
    def pick(name, cast, current, default):
        if current != default:
            return current
        if name in file_vals:
            return cast(file_vals[name])
        return current
    cfg = ExperimentConfig(
        algorithm=args.command,
        n=pick("n", int, args.n, 1 << 14),
        m=pick("m", int, args.m, 1 << 16),
        k=pick("k", int, args.k, 0),
        dist=pick("dist", str, args.dist, "uniform"),
        theta=pick("theta", float, args.theta, 1.0),
        trials=pick("trials", int, args.trials, 1),
        seed=pick("seed", int, args.seed, 1),
        out=args.out or file_vals.get("out"),
        fmt=pick("format", str, args.fmt, "csv"),
        graph_kind=pick("graph", str, args.graph, "gnm"),
        params=overrides,
    )
    cfg.validate()
    return cfg


def _run_bounds(args: argparse.Namespace) -> int:
    params = dict(_parse_param(p) for p in args.param)
    if args.weights is not None:
        wl = [float(x) for x in args.weights.split(",") if x.strip()]
        key = "weights" if args.bound == "weighted_geom" else "lipschitz"
        params[key] = wl
    if args.bound == "geom_sum" and "r" in params:
        params["r"] = int(params["r"])
    try:
        value = bounds_mod.bound_eval(args.bound, **params)
    except (bounds_mod.HypothesisViolated, TypeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(f"{value:.12g}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "bounds":
        return _run_bounds(args)
    try:
        cfg = _config_from_args(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    runner = _RUNNERS[cfg.algorithm]
    records: list[TrialRecord] = []
    t0 = time.perf_counter()
    try:
        for trial in range(cfg.trials):
            start = time.perf_counter()
            rec = runner(cfg, trial)
            rec.wall_time = time.perf_counter() - start
            records.append(rec)
    except (AssertionError, RuntimeError) as exc:
        print(f"hard failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    elapsed = time.perf_counter() - t0

    text = emit_csv(cfg, records) if cfg.fmt == "csv" else emit_json(cfg, records)
    if cfg.out:
        try:
            Path(cfg.out).write_text(text)
        except OSError as exc:
            print(f"i/o error: {exc}", file=sys.stderr)
            return EXIT_IO
    else:
        sys.stdout.write(text)

    failed = sum(not r.verified for r in records)
    summary = tail_report(records)
    print(
        f"# {cfg.algorithm}: {len(records)} trials, {failed} failed, "
        f"{elapsed:.2f}s wall", file=sys.stderr,
    )
    print(f"# summary: {json.dumps(summary, sort_keys=True)}", file=sys.stderr)
    return EXIT_OK if failed == 0 else EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
