"""Toroidal habitat: the item-holding grid and the pheromone field.

Both live on the same W x H lattice with wrap-around in both axes. A cell
holds at most one item; the pheromone field stores one nonnegative scalar
concentration per cell. Neighborhood queries return cells in row-major
order starting at the north-west corner, so snapshots replay bit-exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import IO, Iterator

import numpy as np

EMPTY = -1


@dataclass(frozen=True)
class Position:
    x: int
    y: int


class CellOccupied(Exception):
    """Raised when placing an item onto a cell that already holds one."""


def wrap(x: int, y: int, grid: "Grid") -> Position:
    """Fold any signed coordinates back onto the torus."""
    return Position(x % grid.width, y % grid.height)


class Grid:
    """Toroidal lattice holding at most one item id per cell."""

    def __init__(self, width: int, height: int):
        if width < 3 or height < 3:
            raise ValueError(f"grid must be at least 3x3, got {width}x{height}")
        self.width = width
        self.height = height
        # int32, EMPTY (-1) marks an unoccupied cell
        self.cells = np.full((height, width), EMPTY, dtype=np.int32)

    def wrap(self, x: int, y: int) -> Position:
        return wrap(x, y, self)

    def item_at(self, pos: Position) -> int | None:
        v = int(self.cells[pos.y, pos.x])
        return None if v == EMPTY else v

    def place(self, item_id: int, pos: Position) -> None:
        if self.cells[pos.y, pos.x] != EMPTY:
            raise CellOccupied(f"cell ({pos.x},{pos.y}) already holds an item")
        self.cells[pos.y, pos.x] = item_id

    def remove(self, pos: Position) -> int:
        v = int(self.cells[pos.y, pos.x])
        if v == EMPTY:
            raise ValueError(f"cell ({pos.x},{pos.y}) is empty")
        self.cells[pos.y, pos.x] = EMPTY
        return v

    def neighborhood3x3(self, r: Position) -> list[tuple[Position, int | None]]:
        """The 9 cells centered at r, row-major, NW first."""
        out = []
        for dy in (-1, 0, 1):
            for dx in (-1, 0, 1):
                p = self.wrap(r.x + dx, r.y + dy)
                out.append((p, self.item_at(p)))
        return out

    def occupied(self) -> Iterator[tuple[Position, int]]:
        """All (position, item id) pairs, row-major."""
        ys, xs = np.nonzero(self.cells != EMPTY)
        for y, x in zip(ys.tolist(), xs.tolist()):
            yield Position(x, y), int(self.cells[y, x])

    def empty_cells(self) -> list[Position]:
        """All unoccupied positions, row-major."""
        ys, xs = np.nonzero(self.cells == EMPTY)
        return [Position(x, y) for y, x in zip(ys.tolist(), xs.tolist())]

    def item_count(self) -> int:
        return int(np.count_nonzero(self.cells != EMPTY))

    def write_occupancy_csv(self, fh: IO[str]) -> None:
        """Rows `x,y,item_id` for every occupied cell, row-major."""
        fh.write("x,y,item_id\n")
        for pos, item_id in self.occupied():
            fh.write(f"{pos.x},{pos.y},{item_id}\n")


class PheromoneField:
    """Per-cell nonnegative pheromone concentration over a grid."""

    def __init__(self, width: int, height: int):
        self.width = width
        self.height = height
        self.sigma = np.zeros((height, width), dtype=np.float64)

    def value(self, pos: Position) -> float:
        return float(self.sigma[pos.y, pos.x])

    def deposit(self, pos: Position, eta: float) -> None:
        if eta <= 0:
            raise ValueError("deposit amount must be positive")
        self.sigma[pos.y, pos.x] += eta

    def evaporate(self, kappa: float) -> None:
        """Multiplicative decay sigma <- (1 - kappa) * sigma, applied once."""
        if not 0.0 <= kappa <= 1.0:
            raise ValueError("kappa must lie in [0, 1]")
        self.sigma *= 1.0 - kappa

    def summary(self) -> tuple[float, float, float]:
        return float(self.sigma.min()), float(self.sigma.mean()), float(self.sigma.max())

    def write_pgm(self, fh: IO[str]) -> None:
        """Plain PGM (P2) heatmap, [0, max sigma] scaled linearly to 0..255."""
        peak = float(self.sigma.max())
        if peak > 0.0:
            levels = np.floor(self.sigma / peak * 255.0).astype(np.int64)
            levels = np.minimum(levels, 255)
        else:
            levels = np.zeros_like(self.sigma, dtype=np.int64)
        fh.write(f"P2\n{self.width} {self.height}\n255\n")
        for row in levels:
            fh.write(" ".join(str(int(v)) for v in row) + "\n")
