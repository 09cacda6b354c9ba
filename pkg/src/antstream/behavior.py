"""Response-threshold decision functions for picking and dropping items.

Two independent stimuli drive every decision: how crowded the 3x3 region
around the ant is, and how similar the focal item is to the items already
there. Each stimulus passes through its own threshold function and the two
are composed multiplicatively:

    P_pick = (1 - chi) * epsilon        P_drop = chi * delta

where chi rises with the local item count (half response at 5 items),
epsilon rises with dissimilarity, and delta falls with it.
"""

from __future__ import annotations

from dataclasses import dataclass

from .datastream import feature_distance
from .habitat import Grid, Position


@dataclass(frozen=True)
class ThresholdParams:
    theta_count: float = 5.0  # item count giving half response
    steepness: float = 2.0  # exponent for response_threshold
    k1: float = 0.1  # dropping similarity scale
    k2: float = 0.15  # picking similarity scale

    def __post_init__(self):
        if self.theta_count <= 0:
            raise ValueError("theta_count must be > 0")
        if self.steepness <= 1:
            raise ValueError("steepness must be > 1")
        if self.k1 <= 0 or self.k2 <= 0:
            raise ValueError("k1 and k2 must be > 0")


@dataclass(frozen=True)
class NeighborhoodAssessment:
    """What an ant perceives in the 3x3 region around a site.

    object_count excludes the focal item itself; pair_distance is the
    aggregate normalized distance between the focal item and the region's
    items (1.0 by convention when the region holds nothing else).
    """

    object_count: int
    pair_distance: float


def response_threshold(s: float, theta: float, n: float) -> float:
    """Sigmoid response s**n / (s**n + theta**n); exactly 1/2 at s = theta."""
    if s < 0:
        raise ValueError("stimulus must be nonnegative")
    if s == 0.0:
        return 0.0
    return s**n / (s**n + theta**n)


def count_factor(object_count: int, params: ThresholdParams) -> float:
    """Crowding stimulus chi = c^2 / (c^2 + theta_count^2)."""
    c2 = float(object_count * object_count)
    return c2 / (c2 + params.theta_count * params.theta_count)


def drop_factor(d: float, k1: float) -> float:
    """Similarity response for dropping: (k1 / (k1 + d))^2, decreasing in d."""
    return (k1 / (k1 + d)) ** 2


def pick_factor(d: float, k2: float) -> float:
    """Dissimilarity response for picking: (d / (k2 + d))^2, increasing in d."""
    return (d / (k2 + d)) ** 2


def pick_probability(assessment: NeighborhoodAssessment, params: ThresholdParams) -> float:
    """P_pick = (1 - chi) * epsilon; misfit items in sparse spots get lifted."""
    chi = count_factor(assessment.object_count, params)
    return (1.0 - chi) * pick_factor(assessment.pair_distance, params.k2)


def drop_probability(assessment: NeighborhoodAssessment, params: ThresholdParams) -> float:
    """P_drop = chi * delta; items land in crowds of similar items."""
    chi = count_factor(assessment.object_count, params)
    return chi * drop_factor(assessment.pair_distance, params.k1)


AGGREGATIONS = ("max", "min", "mean")


def assess_neighborhood(
    r: Position,
    focal_item: int,
    grid: Grid,
    features,
    aggregation: str = "max",
) -> NeighborhoodAssessment:
    """Count and aggregate focal-relative distances over the 3x3 region.

    The focal item (the one on the cell for a pick, or the carried one for
    a drop) never counts toward the crowd. The default aggregation is the
    maximum focal-relative distance: average-free, and conservative in that
    a single dissimilar neighbor suppresses dropping. An empty region maps
    to pair_distance 1.0 so isolated items stay liftable.
    """
    if aggregation not in AGGREGATIONS:
        raise ValueError(f"unknown aggregation rule {aggregation!r}")
    count = 0
    distances = []
    for _, item in grid.neighborhood3x3(r):
        if item is None or item == focal_item:
            continue
        count += 1
        distances.append(feature_distance(features[focal_item], features[item]))
    if count == 0:
        return NeighborhoodAssessment(0, 1.0)
    if aggregation == "max":
        d = max(distances)
    elif aggregation == "min":
        d = min(distances)
    else:
        d = sum(distances) / count
    return NeighborhoodAssessment(count, d)
