"""Measurement harness: grid-space k-NN classification rate, spatial
entropy, and checkpoint snapshots.

All measurements operate on immutable snapshot copies and draw from an
evaluation rng stream separate from the simulation's, so observing a run
never perturbs it. k-NN works on grid coordinates with the toroidal
metric: it scores how well the spatial arrangement itself encodes the
labels, which is exactly what the clustering is supposed to produce.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .habitat import Position
from .rng import Rng


@dataclass(frozen=True)
class Snapshot:
    """Read-only copy of the item arrangement at one time step."""

    step: int
    width: int
    height: int
    entries: tuple[tuple[int, Position, str | None], ...]  # (item id, pos, label)
    carried: tuple[int, ...]  # item ids in ant mandibles
    sigma_summary: tuple[float, float, float]  # min, mean, max
    released: int  # items released up to and including this step

    def item_count(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class ClassificationReport:
    step: int
    rates: tuple[float, ...]
    k: int
    test_fraction: float

    @property
    def mean_rate(self) -> float:
        return sum(self.rates) / len(self.rates)


@dataclass
class EntropyTrace:
    entries: list[tuple[int, float]] = field(default_factory=list)

    def add(self, step: int, value: float) -> None:
        if self.entries and step < self.entries[-1][0]:
            raise ValueError("entropy entries must be appended in step order")
        self.entries.append((step, value))


def toroidal_grid_distance(a: Position, b: Position, width: int, height: int) -> float:
    """Euclidean distance with per-axis wrap-around deltas."""
    dx = abs(a.x - b.x)
    dy = abs(a.y - b.y)
    dx = min(dx, width - dx)
    dy = min(dy, height - dy)
    return math.sqrt(dx * dx + dy * dy)


def knn_predict(
    test_pos: Position,
    train: list[tuple[int, Position, str]],
    k: int,
    width: int,
    height: int,
) -> str:
    """Majority label of the k nearest training items.

    Equal distances order by lower item id; a vote tie goes to the label of
    the nearest neighbor among the tied labels. Both rules exist purely for
    reproducibility.
    """
    ranked = sorted(
        train,
        key=lambda e: (toroidal_grid_distance(test_pos, e[1], width, height), e[0]),
    )[:k]
    counts: dict[str, int] = {}
    for _, _, label in ranked:
        counts[label] = counts.get(label, 0) + 1
    best = max(counts.values())
    tied = {label for label, c in counts.items() if c == best}
    for _, _, label in ranked:  # nearest-first among tied labels
        if label in tied:
            return label
    raise AssertionError("unreachable: ranked neighbors cannot be empty")


def knn_rate(
    snapshot: Snapshot,
    rng: Rng,
    k: int = 3,
    test_fraction: float = 0.2,
    n_subsets: int = 10,
) -> ClassificationReport:
    """Mean k-NN rate over random test sub-sets of the labeled grid items.

    Each subset holds out ceil(test_fraction * N) items; the rest train.
    Carried items have no grid position and are excluded up front.
    """
    labeled = [(i, p, lab) for (i, p, lab) in snapshot.entries if lab is not None]
    labeled.sort(key=lambda e: e[0])
    n = len(labeled)
    if n < k + 1:
        raise ValueError(f"need at least {k + 1} labeled grid items, have {n}")
    n_test = math.ceil(test_fraction * n)
    if n - n_test < k:
        raise ValueError(
            f"test fraction {test_fraction} leaves {n - n_test} training items, need {k}"
        )
    rates = []
    for _ in range(n_subsets):
        order = list(range(n))
        rng.shuffle(order)
        test_idx = set(order[:n_test])
        test = [labeled[i] for i in sorted(test_idx)]
        train = [labeled[i] for i in range(n) if i not in test_idx]
        correct = 0
        for item_id, pos, label in test:
            pred = knn_predict(pos, train, k, snapshot.width, snapshot.height)
            if pred == label:
                correct += 1
        rates.append(correct / n_test)
    return ClassificationReport(snapshot.step, tuple(rates), k, test_fraction)


def spatial_entropy(snapshot: Snapshot, patch_size: int = 8) -> float:
    """Shannon entropy (bits) of the item distribution over square patches.

    Ragged edge patches are permitted when patch_size does not divide the
    grid. Zero for an empty snapshot or a single occupied patch; maximal
    when items spread uniformly over patches.
    """
    if patch_size < 1:
        raise ValueError("patch_size must be >= 1")
    if not snapshot.entries:
        return 0.0
    counts: dict[tuple[int, int], int] = {}
    for _, pos, _ in snapshot.entries:
        key = (pos.x // patch_size, pos.y // patch_size)
        counts[key] = counts.get(key, 0) + 1
    total = len(snapshot.entries)
    h = 0.0
    for c in counts.values():
        p = c / total
        h -= p * math.log2(p)
    return h


def default_checkpoints(horizon: int) -> list[int]:
    """Log-spaced checkpoints (4 per decade from 10^3), plus 0 and horizon."""
    steps = {0, horizon}
    e = 3.0
    while True:
        t = round(10.0**e)
        if t > horizon:
            break
        steps.add(t)
        e += 0.25
    return sorted(steps)
