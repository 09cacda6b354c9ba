"""Item model, normalized feature distance, CSV ingestion, streaming
schedules and the synthetic cluster generator.

Features are min-max normalized to [0,1] per dimension over the full
ingested set, so the normalized Euclidean distance

    d(a, b) = sqrt( (1/F) * sum_i (f_a(i) - f_b(i))^2 )

has range exactly [0, 1]. Streaming groups are withheld portions of a
dataset that is known in full at load time, so normalization bounds come
from the whole set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .habitat import Grid
from .rng import Rng


@dataclass
class Item:
    id: int
    features: np.ndarray  # normalized to [0,1]^F
    label: str | None = None


@dataclass
class FeatureSpace:
    """Normalization metadata for a dataset's feature dimensions."""

    dim: int
    mins: np.ndarray
    maxs: np.ndarray

    @classmethod
    def unit(cls, dim: int) -> "FeatureSpace":
        return cls(dim, np.zeros(dim), np.ones(dim))

    def normalize(self, raw: np.ndarray) -> np.ndarray:
        span = self.maxs - self.mins
        out = np.empty(self.dim)
        for i in range(self.dim):
            # constant dimensions carry no information; park them mid-range
            out[i] = 0.5 if span[i] == 0 else (raw[i] - self.mins[i]) / span[i]
        return out

    def denormalize(self, norm: np.ndarray) -> np.ndarray:
        return self.mins + norm * (self.maxs - self.mins)


def feature_distance(fa, fb) -> float:
    """Normalized Euclidean distance between two [0,1]^F feature vectors.

    Sequential accumulation, so the jit kernel reproduces it bit-exactly.
    """
    if len(fa) != len(fb):
        raise ValueError(f"feature length mismatch: {len(fa)} vs {len(fb)}")
    s = 0.0
    for i in range(len(fa)):
        diff = float(fa[i]) - float(fb[i])
        s += diff * diff
    return math.sqrt(s / len(fa))


def normalized_distance(a: Item, b: Item) -> float:
    return feature_distance(a.features, b.features)


class MalformedRow(ValueError):
    """CSV row that cannot be parsed; carries the 1-based row number."""

    def __init__(self, row: int, message: str):
        super().__init__(f"row {row}: {message}")
        self.row = row


def ingest_csv(path, dim: int) -> tuple[list[Item], FeatureSpace]:
    """Load rows `id,label,f1,...,fF` and min-max normalize per dimension.

    The header row is optional; an empty label field means unlabeled.
    """
    raw_rows: list[tuple[int, str | None, np.ndarray]] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if lineno == 1 and _looks_like_header(parts):
                continue
            if len(parts) != dim + 2:
                raise MalformedRow(
                    lineno, f"expected {dim + 2} fields (id,label,{dim} features), got {len(parts)}"
                )
            try:
                item_id = int(parts[0])
            except ValueError:
                raise MalformedRow(lineno, f"non-integer id {parts[0]!r}") from None
            label = parts[1].strip() or None
            try:
                feats = np.array([float(v) for v in parts[2:]], dtype=np.float64)
            except ValueError:
                raise MalformedRow(lineno, "non-numeric feature value") from None
            raw_rows.append((item_id, label, feats))
    if not raw_rows:
        raise ValueError(f"no data rows in {path}")
    ids = [r[0] for r in raw_rows]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate item ids in input")
    raw = np.stack([r[2] for r in raw_rows])
    space = FeatureSpace(dim, raw.min(axis=0), raw.max(axis=0))
    items = [
        Item(item_id, space.normalize(feats), label)
        for (item_id, label, feats) in raw_rows
    ]
    return items, space


def _looks_like_header(parts: list[str]) -> bool:
    try:
        int(parts[0])
        return False
    except ValueError:
        return True


def write_items_csv(items: list[Item], space: FeatureSpace, fh) -> None:
    """Export items as raw (denormalized) `id,label,f1,...` rows."""
    for it in items:
        raw = space.denormalize(it.features)
        feats = ",".join(repr(float(v)) for v in raw)
        fh.write(f"{it.id},{it.label or ''},{feats}\n")


@dataclass
class StreamSchedule:
    """Ordered item groups bound to strictly increasing release steps."""

    groups: list[tuple[int, list[Item]]]
    total_steps: int | None = None

    def __post_init__(self):
        steps = [s for s, _ in self.groups]
        if any(b <= a for a, b in zip(steps, steps[1:])):
            raise ValueError("release steps must be strictly increasing")
        if steps and steps[0] < 0:
            raise ValueError("release steps must be nonnegative")
        if self.total_steps is not None and steps and steps[-1] >= self.total_steps:
            raise ValueError("all release steps must precede total_steps")
        ids = [it.id for _, group in self.groups for it in group]
        if len(set(ids)) != len(ids):
            raise ValueError("an item id appears in more than one group")

    def total_items(self) -> int:
        return sum(len(g) for _, g in self.groups)

    def release_steps(self) -> list[int]:
        return [s for s, _ in self.groups]


def build_schedule(
    items: list[Item],
    group_sizes: list[int],
    release_steps: list[int],
    seed: int,
    total_steps: int | None = None,
) -> StreamSchedule:
    """Seeded shuffle of the items, partitioned in order into groups."""
    if len(group_sizes) != len(release_steps):
        raise ValueError("group_sizes and release_steps must have equal length")
    if sum(group_sizes) != len(items):
        raise ValueError(
            f"group sizes sum to {sum(group_sizes)} but there are {len(items)} items"
        )
    shuffled = list(items)
    Rng(seed).shuffle(shuffled)
    groups = []
    start = 0
    for size, step in zip(group_sizes, release_steps):
        groups.append((step, shuffled[start : start + size]))
        start += size
    return StreamSchedule(groups, total_steps)


def batch_schedule(items: list[Item], total_steps: int | None = None) -> StreamSchedule:
    """Everything at t=0: the batch-feed regime."""
    return StreamSchedule([(0, list(items))], total_steps)


def release_due(schedule: StreamSchedule, t: int, grid: Grid, rng: Rng) -> list[Item]:
    """Place every group due at step t on uniformly random empty cells.

    One rng draw per item placed. Raises if the grid cannot hold a group.
    """
    placed = []
    for step, group in schedule.groups:
        if step != t:
            continue
        for item in group:
            empties = grid.empty_cells()
            if not empties:
                raise RuntimeError(
                    f"grid is full: cannot release item {item.id} at step {t}"
                )
            pos = empties[rng.next_below(len(empties))]
            grid.place(item.id, pos)
            placed.append(item)
    return placed


@dataclass
class SyntheticSpec:
    """Gaussian class blobs in [0,1]^F, the artificial-data analog."""

    n_classes: int = 4
    items_per_class: int = 200
    dim: int = 2
    spread: float = 0.1
    means: list[list[float]] | None = None
    seed: int = 0


def default_class_means(n_classes: int, dim: int) -> np.ndarray:
    """Class centers on the {0.2, 0.8}^dim corner lattice, cycling if needed."""
    means = np.empty((n_classes, dim))
    for c in range(n_classes):
        for d in range(dim):
            means[c, d] = 0.8 if (c >> d) & 1 else 0.2
        if c >= 2**dim:  # more classes than corners: offset toward the middle
            means[c] = 0.5 + (means[c] - 0.5) * (0.5 ** (c // 2**dim))
    return means


def generate_synthetic(spec: SyntheticSpec) -> list[Item]:
    """Labeled Gaussian blobs, clamped to [0,1]; two rng draws per feature."""
    means = (
        np.asarray(spec.means, dtype=np.float64)
        if spec.means is not None
        else default_class_means(spec.n_classes, spec.dim)
    )
    if means.shape != (spec.n_classes, spec.dim):
        raise ValueError(f"means must have shape ({spec.n_classes}, {spec.dim})")
    rng = Rng(spec.seed)
    items = []
    next_id = 0
    for c in range(spec.n_classes):
        for _ in range(spec.items_per_class):
            feats = np.empty(spec.dim)
            for d in range(spec.dim):
                v = rng.next_gaussian(means[c, d], spec.spread)
                feats[d] = min(1.0, max(0.0, v))
            items.append(Item(next_id, feats, label=f"c{c}"))
            next_id += 1
    return items


def load_schedule_file(path) -> list[tuple[int, int]]:
    """Rows `release_step,count`, applied to the seeded shuffle order."""
    entries = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if lineno == 1 and _looks_like_header(parts):
                continue
            if len(parts) != 2:
                raise MalformedRow(lineno, "expected `release_step,count`")
            try:
                entries.append((int(parts[0]), int(parts[1])))
            except ValueError:
                raise MalformedRow(lineno, "non-integer value") from None
    if not entries:
        raise ValueError(f"no schedule rows in {path}")
    return entries
