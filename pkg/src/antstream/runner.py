"""Experiment orchestration: full runs, checkpoint logging, output files,
and the batch-vs-streaming comparison.

A run executes release -> step -> measure over the configured horizon and
writes everything under a per-run directory named `<name>-s<seed>-<hash>`:

    manifest.txt            loadable config echo + provenance comments
    reports.csv             step,mean_rate,rate_1..rate_N
    entropy.csv             step,entropy
    skipped.csv             step,reason (only if any checkpoint was skipped)
    snapshot_<t>.csv        x,y,item_id,label
    pheromone_<t>.pgm       P2 heatmap of the pheromone field

CSV-sourced items are reindexed to dense ids 0..N-1 (in ascending original
id order); snapshots refer to the dense ids.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from pathlib import Path

from .behavior import ThresholdParams
from .colony import MovementParams
from .config import ConfigError, RunConfig
from .datastream import (
    Item,
    StreamSchedule,
    batch_schedule,
    build_schedule,
    generate_synthetic,
    ingest_csv,
    load_schedule_file,
    SyntheticSpec,
)
from .engine import World
from .evaluation import (
    ClassificationReport,
    EntropyTrace,
    Snapshot,
    default_checkpoints,
    knn_rate,
    spatial_entropy,
)
from .rng import Rng, splitmix64

# Tags mixed into the run seed to derive independent sub-streams.
_DATA_SEED_TAG = 0xDA7A5EED
_SHUFFLE_SEED_TAG = 0x5C4EDF1E


@dataclass
class RunResult:
    config: RunConfig
    out_dir: Path | None
    snapshots: list[Snapshot] = field(default_factory=list)
    reports: list[ClassificationReport] = field(default_factory=list)
    entropy: EntropyTrace = field(default_factory=EntropyTrace)
    skips: list[tuple[int, str]] = field(default_factory=list)
    wall_time: float = 0.0

    def final_rate(self) -> float:
        if not self.reports:
            raise RuntimeError("run produced no classification reports")
        return self.reports[-1].mean_rate


def load_items(cfg: RunConfig) -> list[Item]:
    """Materialize the run's items with dense ids 0..N-1."""
    if cfg.data == "synthetic":
        spec = SyntheticSpec(
            n_classes=cfg.classes,
            items_per_class=cfg.per_class,
            dim=cfg.dim,
            spread=cfg.spread,
            seed=splitmix64(cfg.seed ^ _DATA_SEED_TAG)[1],
        )
        return generate_synthetic(spec)
    items, _space = ingest_csv(cfg.csv_path, cfg.csv_dim)
    items.sort(key=lambda it: it.id)
    return [Item(i, it.features, it.label) for i, it in enumerate(items)]


def make_schedule(cfg: RunConfig, items: list[Item]) -> StreamSchedule:
    if cfg.schedule == "batch":
        return batch_schedule(items)
    entries = load_schedule_file(cfg.schedule)
    steps = [s for s, _ in entries]
    sizes = [c for _, c in entries]
    if sum(sizes) != len(items):
        raise ConfigError(
            [f"schedule: group sizes sum to {sum(sizes)} but there are {len(items)} items"]
        )
    if steps and max(steps) > cfg.horizon:
        raise ConfigError(
            [f"schedule: release step {max(steps)} exceeds horizon {cfg.horizon}"]
        )
    return build_schedule(items, sizes, steps, splitmix64(cfg.seed ^ _SHUFFLE_SEED_TAG)[1])


def run_experiment(cfg: RunConfig, write_outputs: bool = True) -> RunResult:
    """Execute one full run; see the module docstring for outputs."""
    start = time.perf_counter()
    items = load_items(cfg)
    schedule = make_schedule(cfg, items)
    params = MovementParams(cfg.beta, cfg.delta, cfg.eta, cfg.kappa, cfg.w_table)
    tparams = ThresholdParams(cfg.theta_count, cfg.steepness, cfg.k1, cfg.k2)
    checkpoints = (
        default_checkpoints(cfg.horizon)
        if cfg.checkpoints is None
        else sorted({c for c in cfg.checkpoints if c <= cfg.horizon})
    )
    world = World.create(cfg.width, cfg.height, items, cfg.ants, cfg.seed)
    eval_rng = Rng.eval_stream(cfg.seed)

    out_dir: Path | None = None
    if write_outputs:
        out_dir = Path(cfg.out) / f"{cfg.name}-s{cfg.seed}-{cfg.hash()}"
        out_dir.mkdir(parents=True, exist_ok=True)
    result = RunResult(cfg, out_dir)

    cp_set = set(checkpoints)
    events = sorted({0, cfg.horizon} | cp_set | set(schedule.release_steps()))
    prev = 0
    for boundary in events:
        if boundary > prev:
            world.advance(boundary - prev, params, tparams, cfg.aggregation)
            prev = boundary
        world.release(schedule)
        if boundary in cp_set:
            _checkpoint(world, cfg, eval_rng, result, out_dir)
    result.wall_time = time.perf_counter() - start

    if out_dir is not None:
        _write_outputs(result)
    return result


def _checkpoint(
    world: World,
    cfg: RunConfig,
    eval_rng: Rng,
    result: RunResult,
    out_dir: Path | None,
) -> None:
    snap = world.snapshot()
    on_grid = snap.item_count()
    carried = len(snap.carried)
    if on_grid + carried != snap.released:
        raise RuntimeError(
            f"item conservation violated at step {snap.step}: "
            f"{on_grid} on grid + {carried} carried != {snap.released} released"
        )
    result.snapshots.append(snap)
    result.entropy.add(snap.step, spatial_entropy(snap, cfg.patch_size))
    try:
        report = knn_rate(
            snap, eval_rng, cfg.knn_k, cfg.test_fraction, cfg.n_subsets
        )
        result.reports.append(report)
    except ValueError as exc:
        result.skips.append((snap.step, str(exc)))
    if out_dir is not None:
        # the pheromone field is live state, so its heatmap is emitted here
        with open(out_dir / f"pheromone_{snap.step:07d}.pgm", "w") as fh:
            world.field.write_pgm(fh)


def _write_outputs(result: RunResult) -> None:
    from . import __version__

    cfg = result.config
    out = result.out_dir
    assert out is not None

    with open(out / "manifest.txt", "w") as fh:
        fh.write("# antstream manifest\n")
        fh.write(f"# version={__version__}\n")
        fh.write(f"# wall_time_s={result.wall_time:.3f}\n")
        for key, value in cfg.raw().items():
            fh.write(f"{key}={value}\n")

    with open(out / "reports.csv", "w") as fh:
        header = ",".join(f"rate_{i + 1}" for i in range(cfg.n_subsets))
        fh.write(f"step,mean_rate,{header}\n")
        for rep in result.reports:
            rates = ",".join(repr(r) for r in rep.rates)
            fh.write(f"{rep.step},{repr(rep.mean_rate)},{rates}\n")

    with open(out / "entropy.csv", "w") as fh:
        fh.write("step,entropy\n")
        for step, value in result.entropy.entries:
            fh.write(f"{step},{repr(value)}\n")

    if result.skips:
        with open(out / "skipped.csv", "w") as fh:
            fh.write("step,reason\n")
            for step, reason in result.skips:
                fh.write(f"{step},{reason}\n")

    for snap in result.snapshots:
        with open(out / f"snapshot_{snap.step:07d}.csv", "w") as fh:
            fh.write("x,y,item_id,label\n")
            for item_id, pos, label in snap.entries:
                fh.write(f"{pos.x},{pos.y},{item_id},{label or ''}\n")


@dataclass
class CompareResult:
    """Per-seed batch and streaming runs of the same data, plus the
    streaming-minus-batch deltas of the final classification rates."""

    runs: list[tuple[int, RunResult, RunResult]]  # (seed, batch, stream)
    mean_delta: float
    std_delta: float

    def rows(self) -> list[tuple[int, float, float]]:
        return [(seed, b.final_rate(), s.final_rate()) for seed, b, s in self.runs]


def compare_runs(
    cfg: RunConfig, seeds: list[int], write_outputs: bool = True
) -> CompareResult:
    """Run batch and streaming variants of the same data for each seed.

    Writes `compare-<name>-<hash>.csv` (final rates, per-seed delta, and
    aggregate mean/stddev rows) under the output root when requested.
    """
    if len(seeds) < 2:
        raise ConfigError(["compare needs at least 2 seeds"])
    if cfg.schedule == "batch":
        raise ConfigError(["compare needs a streaming schedule in the config"])
    runs = []
    for seed in seeds:
        stream_cfg = cfg.replace(seed=str(seed), name=f"{cfg.name}-stream")
        batch_cfg = cfg.replace(
            seed=str(seed), schedule="batch", name=f"{cfg.name}-batch"
        )
        stream = run_experiment(stream_cfg, write_outputs=write_outputs)
        batch = run_experiment(batch_cfg, write_outputs=write_outputs)
        runs.append((seed, batch, stream))
    deltas = [s.final_rate() - b.final_rate() for _, b, s in runs]
    mean_delta = sum(deltas) / len(deltas)
    std_delta = math.sqrt(sum((d - mean_delta) ** 2 for d in deltas) / len(deltas))
    result = CompareResult(runs, mean_delta, std_delta)
    if write_outputs:
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / f"compare-{cfg.name}-{cfg.hash()}.csv", "w") as fh:
            fh.write("seed,batch_rate,stream_rate,delta\n")
            for seed, b, s in result.rows():
                fh.write(f"{seed},{repr(b)},{repr(s)},{repr(s - b)}\n")
            fh.write(f"mean,,,{repr(mean_delta)}\n")
            fh.write(f"stddev,,,{repr(std_delta)}\n")
    return result
