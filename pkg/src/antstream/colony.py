"""Ant agents and their stigmergic movement kinetics.

Movement follows the lattice cognitive-map model: a pheromone weighing
function W(sigma) = (1 + sigma / (1 + delta * sigma))**beta combined with a
turn-persistence weight w(|dtheta|) yields normalized transition
probabilities over the 8 Moore neighbors. Ants carry no memory beyond
their position, orientation and (optionally) one carried item.

`colony_step` here is the pure-Python reference for one global time step;
the production loop in `engine` implements the identical update and draw
order and is tested for bit-exact agreement against this one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .behavior import (
    ThresholdParams,
    assess_neighborhood,
    drop_probability,
    pick_probability,
)
from .habitat import Grid, PheromoneField, Position
from .rng import Rng

# Compass directions, clockwise from north. Index is the canonical encoding.
DIRECTIONS = ("N", "NE", "E", "SE", "S", "SW", "W", "NW")
DIR_DX = (0, 1, 1, 1, 0, -1, -1, -1)
DIR_DY = (-1, -1, 0, 1, 1, 1, 0, -1)

# |dtheta| in multiples of 45 degrees -> weight; forward-persistent defaults
# from the lattice swarm model lineage. Symmetric in turn sign by construction.
DEFAULT_W_TABLE = (1.0, 0.5, 0.25, 1.0 / 12.0, 1.0 / 20.0)


def turn_steps(current: int, candidate: int) -> int:
    """Smallest |dtheta| between two of the 8 directions, in 45-degree steps."""
    d = abs(candidate - current) % 8
    return min(d, 8 - d)


@dataclass
class Ant:
    x: int
    y: int
    direction: int  # index into DIRECTIONS
    carrying: int | None = None


@dataclass(frozen=True)
class MovementParams:
    beta: float = 3.5  # osmotropotaxic sensitivity
    delta: float = 0.2  # inverse sensory capacity
    eta: float = 0.07  # pheromone deposited per ant per step
    kappa: float = 0.015  # pheromone decay rate per step
    w_table: tuple[float, float, float, float, float] = DEFAULT_W_TABLE

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must be > 0")
        if self.delta < 0:
            raise ValueError("delta must be >= 0")
        if self.eta <= 0:
            raise ValueError("eta must be > 0")
        if not 0.0 <= self.kappa <= 1.0:
            raise ValueError("kappa must lie in [0, 1]")
        if len(self.w_table) != 5 or any(w <= 0 for w in self.w_table):
            raise ValueError("w_table needs 5 strictly positive weights")


def pheromone_weight(sigma: float, beta: float, delta: float) -> float:
    """W(sigma) = (1 + sigma / (1 + delta * sigma))**beta."""
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    return (1.0 + sigma / (1.0 + delta * sigma)) ** beta


def turn_weight(current: int, candidate: int, w_table=DEFAULT_W_TABLE) -> float:
    """Weight for turning from one compass direction to another."""
    return w_table[turn_steps(current, candidate)]


def transition_distribution(
    ant: Ant, field: PheromoneField, grid: Grid, params: MovementParams
) -> np.ndarray:
    """Normalized move probabilities over the 8 Moore neighbors.

    Index i corresponds to DIRECTIONS[i]; staying in place is not an option.
    """
    weights = _candidate_weights(ant, field, grid, params)
    return np.asarray(weights) / math.fsum(weights)


def _candidate_weights(ant, field, grid, params) -> list[float]:
    w = []
    for j in range(8):
        p = grid.wrap(ant.x + DIR_DX[j], ant.y + DIR_DY[j])
        sigma = field.sigma[p.y, p.x]
        w.append(
            pheromone_weight(sigma, params.beta, params.delta)
            * params.w_table[turn_steps(ant.direction, j)]
        )
    return w


def move_ant(
    ant: Ant, field: PheromoneField, grid: Grid, params: MovementParams, rng: Rng
) -> None:
    """One movement: sample a neighbor (one rng draw), step, deposit pheromone."""
    w = _candidate_weights(ant, field, grid, params)
    total = 0.0
    for v in w:
        total += v
    u = rng.next_double() * total
    acc = 0.0
    chosen = 7
    for j in range(8):
        acc += w[j]
        if u < acc:
            chosen = j
            break
    p = grid.wrap(ant.x + DIR_DX[chosen], ant.y + DIR_DY[chosen])
    ant.x, ant.y = p.x, p.y
    ant.direction = chosen
    field.sigma[p.y, p.x] += params.eta


@dataclass
class Colony:
    """Ordered ant population plus the simulation rng.

    Ant count is fixed for the lifetime of a run; identical seed and inputs
    give identical trajectories.
    """

    ants: list[Ant]
    rng: Rng

    @classmethod
    def spawn(cls, n_ants: int, grid: Grid, rng: Rng) -> "Colony":
        """Uniform random positions and orientations (3 draws per ant)."""
        if n_ants < 0:
            raise ValueError("ant count must be nonnegative")
        ants = []
        for _ in range(n_ants):
            x = rng.next_below(grid.width)
            y = rng.next_below(grid.height)
            d = rng.next_below(8)
            ants.append(Ant(x, y, d))
        return cls(ants, rng)

    def carried_items(self) -> list[int]:
        return [a.carrying for a in self.ants if a.carrying is not None]


def default_colony_size(total_items: int) -> int:
    """Workload-scaled default: one ant per 10 items, at least 10."""
    return max(10, -(-total_items // 10))


def colony_step(
    colony: Colony,
    field: PheromoneField,
    grid: Grid,
    params: MovementParams,
    tparams: ThresholdParams,
    features: np.ndarray,
    aggregation: str = "max",
) -> None:
    """One global time step, reference implementation.

    For each ant in index order: move (1 draw), then evaluate a pick or a
    drop decision if its situation allows one (1 draw when evaluated).
    Evaporation is applied once at the end of the step.
    """
    for ant in colony.ants:
        move_ant(ant, field, grid, params, colony.rng)
        here = Position(ant.x, ant.y)
        cell_item = grid.item_at(here)
        if ant.carrying is None and cell_item is not None:
            a = assess_neighborhood(here, cell_item, grid, features, aggregation)
            p = pick_probability(a, tparams)
            if colony.rng.next_double() < p:
                grid.remove(here)
                ant.carrying = cell_item
        elif ant.carrying is not None and cell_item is None:
            a = assess_neighborhood(here, ant.carrying, grid, features, aggregation)
            p = drop_probability(a, tparams)
            if colony.rng.next_double() < p:
                grid.place(ant.carrying, here)
                ant.carrying = None
    field.evaporate(params.kappa)
