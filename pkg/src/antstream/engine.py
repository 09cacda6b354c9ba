"""Production simulation loop: a numba-compiled stepper over flat arrays.

The reference semantics live in `colony.colony_step`; this module exists
because the experiments run 10^6 steps with ~10^2 ants, far beyond what
the object-level loop can do in the runtime targets. The kernel performs
the identical update in the identical order, consuming the identical rng
stream (xorshift128+, shared state array), and the test suite pins the
two paths to bit-exact agreement.

Per global step, in order:
  1. every ant, in index order: move (1 draw) + deposit, then one pick or
     drop decision if applicable (1 draw when evaluated);
  2. one multiplicative evaporation of the whole field.
Item releases and checkpoints happen between steps, in Python.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .behavior import AGGREGATIONS, ThresholdParams
from .colony import Ant, Colony, MovementParams, default_colony_size
from .datastream import Item, StreamSchedule, release_due
from .habitat import EMPTY, Grid, PheromoneField, Position
from .evaluation import Snapshot
from .rng import Rng

_AGG_CODE = {name: i for i, name in enumerate(AGGREGATIONS)}


@njit(cache=True)
def _next_double(state):
    s1 = state[0]
    s0 = state[1]
    result = s0 + s1
    state[0] = s0
    s1 = s1 ^ (s1 << np.uint64(23))
    state[1] = s1 ^ s0 ^ (s1 >> np.uint64(18)) ^ (s0 >> np.uint64(5))
    return (result >> np.uint64(11)) * (1.0 / 9007199254740992.0)


@njit(cache=True)
def _feature_distance(features, a, b):
    f = features.shape[1]
    s = 0.0
    for i in range(f):
        diff = features[a, i] - features[b, i]
        s += diff * diff
    return np.sqrt(s / f)


@njit(cache=True)
def _assess(cells, features, cx, cy, focal, width, height, agg):
    """Count and aggregate focal distance over the 3x3 region, row-major
    NW first, excluding the focal item. Empty region maps to d = 1."""
    count = 0
    dmax = -1.0
    dmin = 2.0
    dsum = 0.0
    for dy in range(-1, 2):
        for dx in range(-1, 2):
            x = (cx + dx) % width
            y = (cy + dy) % height
            item = cells[y, x]
            if item == EMPTY or item == focal:
                continue
            count += 1
            d = _feature_distance(features, focal, item)
            dsum += d
            if d > dmax:
                dmax = d
            if d < dmin:
                dmin = d
    if count == 0:
        return 0, 1.0
    if agg == 0:
        return count, dmax
    if agg == 1:
        return count, dmin
    return count, dsum / count


@njit(cache=True)
def _advance(
    n_steps,
    cells,
    sigma,
    features,
    ant_x,
    ant_y,
    ant_dir,
    ant_carry,
    rng_state,
    beta,
    delta,
    eta,
    kappa,
    w_table,
    theta2,
    k1,
    k2,
    agg,
):
    height, width = cells.shape
    n_ants = ant_x.shape[0]
    dxs = np.array([0, 1, 1, 1, 0, -1, -1, -1], dtype=np.int64)
    dys = np.array([-1, -1, 0, 1, 1, 1, 0, -1], dtype=np.int64)
    w = np.empty(8, dtype=np.float64)
    for _ in range(n_steps):
        for a in range(n_ants):
            # movement: weight the 8 Moore neighbors, sample one
            cur = ant_dir[a]
            total = 0.0
            for j in range(8):
                x = (ant_x[a] + dxs[j]) % width
                y = (ant_y[a] + dys[j]) % height
                s = sigma[y, x]
                dd = j - cur
                if dd < 0:
                    dd = -dd
                if dd > 4:
                    dd = 8 - dd
                wv = (1.0 + s / (1.0 + delta * s)) ** beta * w_table[dd]
                w[j] = wv
                total += wv
            u = _next_double(rng_state) * total
            acc = 0.0
            chosen = 7
            for j in range(8):
                acc += w[j]
                if u < acc:
                    chosen = j
                    break
            ant_x[a] = (ant_x[a] + dxs[chosen]) % width
            ant_y[a] = (ant_y[a] + dys[chosen]) % height
            ant_dir[a] = chosen
            sigma[ant_y[a], ant_x[a]] += eta

            # pick or drop decision
            cell = cells[ant_y[a], ant_x[a]]
            if ant_carry[a] == EMPTY and cell != EMPTY:
                count, d = _assess(
                    cells, features, ant_x[a], ant_y[a], cell, width, height, agg
                )
                c2 = float(count * count)
                chi = c2 / (c2 + theta2)
                p = (1.0 - chi) * (d / (k2 + d)) ** 2
                if _next_double(rng_state) < p:
                    ant_carry[a] = cell
                    cells[ant_y[a], ant_x[a]] = EMPTY
            elif ant_carry[a] != EMPTY and cell == EMPTY:
                count, d = _assess(
                    cells, features, ant_x[a], ant_y[a], ant_carry[a], width, height, agg
                )
                c2 = float(count * count)
                chi = c2 / (c2 + theta2)
                p = chi * (k1 / (k1 + d)) ** 2
                if _next_double(rng_state) < p:
                    cells[ant_y[a], ant_x[a]] = ant_carry[a]
                    ant_carry[a] = EMPTY
        # one evaporation per global step
        decay = 1.0 - kappa
        for y in range(height):
            for x in range(width):
                sigma[y, x] *= decay


@dataclass
class World:
    """Complete mutable simulation state for one run."""

    grid: Grid
    field: PheromoneField
    features: np.ndarray  # (n_items, F) normalized, indexed by item id
    labels: list[str | None]  # per item id
    ant_x: np.ndarray
    ant_y: np.ndarray
    ant_dir: np.ndarray
    ant_carry: np.ndarray
    rng: Rng
    released: int = 0
    step: int = 0

    @classmethod
    def create(
        cls,
        width: int,
        height: int,
        items: list[Item],
        n_ants: int | None,
        seed: int,
    ) -> "World":
        """Build a world; items are indexed by id, which must be 0..N-1."""
        n = len(items)
        by_id = sorted(items, key=lambda it: it.id)
        if [it.id for it in by_id] != list(range(n)):
            raise ValueError("item ids must be contiguous 0..N-1")
        dim = len(by_id[0].features) if n else 0
        features = np.zeros((n, dim), dtype=np.float64)
        labels: list[str | None] = []
        for it in by_id:
            features[it.id] = it.features
            labels.append(it.label)
        if n_ants is None:
            n_ants = default_colony_size(n)
        rng = Rng(seed)
        grid = Grid(width, height)
        ax = np.empty(n_ants, dtype=np.int64)
        ay = np.empty(n_ants, dtype=np.int64)
        ad = np.empty(n_ants, dtype=np.int64)
        ac = np.full(n_ants, EMPTY, dtype=np.int64)
        for a in range(n_ants):
            ax[a] = rng.next_below(width)
            ay[a] = rng.next_below(height)
            ad[a] = rng.next_below(8)
        return cls(grid, PheromoneField(width, height), features, labels, ax, ay, ad, ac, rng)

    @property
    def n_ants(self) -> int:
        return len(self.ant_x)

    def carried_ids(self) -> list[int]:
        return [int(c) for c in self.ant_carry if c != EMPTY]

    def release(self, schedule: StreamSchedule) -> int:
        """Place all groups due at the current step; returns items placed."""
        placed = release_due(schedule, self.step, self.grid, self.rng)
        self.released += len(placed)
        return len(placed)

    def advance(
        self,
        n_steps: int,
        params: MovementParams,
        tparams: ThresholdParams,
        aggregation: str = "max",
    ) -> None:
        """Run n_steps global steps through the compiled kernel."""
        if n_steps < 0:
            raise ValueError("n_steps must be nonnegative")
        if n_steps == 0:
            return
        _advance(
            n_steps,
            self.grid.cells,
            self.field.sigma,
            self.features,
            self.ant_x,
            self.ant_y,
            self.ant_dir,
            self.ant_carry,
            self.rng.state,
            params.beta,
            params.delta,
            params.eta,
            params.kappa,
            np.asarray(params.w_table, dtype=np.float64),
            float(tparams.theta_count) ** 2,
            tparams.k1,
            tparams.k2,
            _AGG_CODE[aggregation],
        )
        self.step += n_steps

    def reference_advance(
        self,
        n_steps: int,
        params: MovementParams,
        tparams: ThresholdParams,
        aggregation: str = "max",
    ) -> None:
        """Same update via the pure-Python reference path (for tests)."""
        from .colony import colony_step

        ants = [
            Ant(
                int(self.ant_x[a]),
                int(self.ant_y[a]),
                int(self.ant_dir[a]),
                None if self.ant_carry[a] == EMPTY else int(self.ant_carry[a]),
            )
            for a in range(self.n_ants)
        ]
        col = Colony(ants, self.rng)
        for _ in range(n_steps):
            colony_step(col, self.field, self.grid, params, tparams, self.features, aggregation)
        for a, ant in enumerate(ants):
            self.ant_x[a] = ant.x
            self.ant_y[a] = ant.y
            self.ant_dir[a] = ant.direction
            self.ant_carry[a] = EMPTY if ant.carrying is None else ant.carrying
        self.step += n_steps

    def snapshot(self) -> Snapshot:
        entries = tuple(
            (item_id, pos, self.labels[item_id]) for pos, item_id in self.grid.occupied()
        )
        return Snapshot(
            step=self.step,
            width=self.grid.width,
            height=self.grid.height,
            entries=entries,
            carried=tuple(self.carried_ids()),
            sigma_summary=self.field.summary(),
            released=self.released,
        )
