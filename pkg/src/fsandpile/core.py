"""Freezing sandpile dynamics on the von Neumann grid.

A configuration is a rectangle of ``width x height`` cells with the origin at
the bottom-left corner. ``cells[y, x]`` holds the grain count of cell
``(x, y)``, or :data:`FROZEN` once the cell has fired. Everything outside the
rectangle behaves as frozen and is never stored.

A cell holding four or more grains fires: it freezes and sends one grain to
each non-frozen in-rectangle neighbor. The parallel map :func:`step` fires
every such cell at once; :func:`stabilize` iterates it to the fixpoint.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .errors import InternalBoundViolation, InvalidSchedule, OutOfBounds

FROZEN = -1
THRESHOLD = 4
FULL_ALPHABET = frozenset(range(5))

Cell = tuple[int, int]

# north, east, south, west
DIRECTIONS = ((0, 1), (1, 0), (0, -1), (-1, 0))


@dataclass(frozen=True, eq=False)
class Configuration:
    """Immutable rectangular grid of grain counts (or :data:`FROZEN`)."""

    cells: np.ndarray

    def __post_init__(self):
        arr = np.array(self.cells, dtype=np.int16, copy=True)
        if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"configuration must be a non-empty 2D grid, got shape {arr.shape}")
        if (arr < FROZEN).any():
            raise ValueError("grain counts must be non-negative (or FROZEN)")
        arr.setflags(write=False)
        object.__setattr__(self, "cells", arr)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]]) -> Configuration:
        """Build from a list of rows, bottom row (y = 0) first."""
        return cls(np.asarray(rows))

    @classmethod
    def full(cls, width: int, height: int, value: int = 0) -> Configuration:
        return cls(np.full((height, width), value))

    @property
    def width(self) -> int:
        return self.cells.shape[1]

    @property
    def height(self) -> int:
        return self.cells.shape[0]

    @property
    def size(self) -> int:
        return self.cells.size

    def __getitem__(self, cell: Cell) -> int:
        x, y = cell
        return int(self.cells[y, x])

    def contains(self, cell: Cell) -> bool:
        x, y = cell
        return 0 <= x < self.width and 0 <= y < self.height

    def with_cell(self, cell: Cell, value: int) -> Configuration:
        arr = self.cells.copy()
        x, y = cell
        arr[y, x] = value
        return Configuration(arr)

    def frozen_mask(self) -> np.ndarray:
        return self.cells == FROZEN

    def values(self) -> frozenset:
        return frozenset(int(v) for v in np.unique(self.cells))

    def __eq__(self, other):
        if not isinstance(other, Configuration):
            return NotImplemented
        return self.cells.shape == other.cells.shape and bool((self.cells == other.cells).all())

    def __hash__(self):
        return hash((self.cells.shape, self.cells.tobytes()))

    def __repr__(self):
        rows = ["".join("F" if v == FROZEN else str(v) for v in row) for row in self.cells[::-1]]
        return f"Configuration({self.width}x{self.height}: {'/'.join(rows)})"


@dataclass(frozen=True)
class Query:
    """An FSPP instance: a configuration and a questioned cell."""

    config: Configuration
    cell: Cell

    def __post_init__(self):
        cell = (int(self.cell[0]), int(self.cell[1]))
        if not self.config.contains(cell):
            raise OutOfBounds(
                f"cell {cell} outside {self.config.width}x{self.config.height} rectangle"
            )
        object.__setattr__(self, "cell", cell)

    @property
    def value(self) -> int:
        return self.config[self.cell]


@dataclass(frozen=True, eq=False)
class Trace:
    """Firing times of one stabilization run.

    ``firing_time[y, x]`` is the parallel step at which ``(x, y)`` fired, or -1.
    """

    firing_time: np.ndarray
    steps: int

    def time(self, cell: Cell) -> Optional[int]:
        t = int(self.firing_time[cell[1], cell[0]])
        return None if t < 0 else t

    def fired_mask(self) -> np.ndarray:
        return self.firing_time >= 0

    def frozen_at(self, t: int) -> np.ndarray:
        """Frozen cells of ``F^t(c)``: those which fired strictly before ``t``."""
        ft = self.firing_time
        return (ft >= 0) & (ft < t)


def allowed_set(spec) -> frozenset:
    """Normalize an allowed-value set.

    Accepts an iterable of ints, a digit string such as ``"0134"``, or a
    5-bit mask (bit ``a`` set iff ``a`` is allowed).
    """
    if isinstance(spec, str):
        values = {int(ch) for ch in spec if ch.isdigit()}
    elif isinstance(spec, (int, np.integer)):
        values = {a for a in range(5) if int(spec) >> a & 1}
    else:
        values = {int(v) for v in spec}
    if not values:
        raise ValueError("allowed set must be nonempty")
    if not values <= FULL_ALPHABET:
        raise ValueError(f"allowed values must lie in 0..4, got {sorted(values)}")
    return frozenset(values)


def alphabet_mask(values: Iterable[int]) -> int:
    return sum(1 << int(a) for a in set(values))


def neighbors(cell: Cell, config: Configuration) -> list[Cell]:
    """In-rectangle von Neumann neighbors of ``cell``, ordered N, E, S, W."""
    x, y = cell
    out = []
    for dx, dy in DIRECTIONS:
        nx, ny = x + dx, y + dy
        if 0 <= nx < config.width and 0 <= ny < config.height:
            out.append((nx, ny))
    return out


def neighbor_count(mask: np.ndarray) -> np.ndarray:
    """For each cell, the number of in-rectangle neighbors set in ``mask``."""
    m = mask.astype(np.int16)
    out = np.zeros_like(m)
    out[:-1, :] += m[1:, :]
    out[1:, :] += m[:-1, :]
    out[:, :-1] += m[:, 1:]
    out[:, 1:] += m[:, :-1]
    return out


def step(config: Configuration) -> Configuration:
    """One synchronous application of the freezing sandpile map."""
    cells = config.cells
    firing = cells >= THRESHOLD
    if not firing.any():
        return config
    dead = firing | (cells == FROZEN)
    new = np.where(dead, FROZEN, cells + neighbor_count(firing))
    return Configuration(new)


def iterate(config: Configuration) -> Iterator[Configuration]:
    """Yield ``c, F(c), F^2(c), ...`` up to and including the fixpoint."""
    yield config
    while True:
        nxt = step(config)
        if nxt is config:
            return
        config = nxt
        yield config


def stabilize(config: Configuration) -> tuple[Configuration, Trace]:
    """Run the parallel dynamics to its fixpoint, recording firing times.

    Only cells that received a grain in the previous step are re-examined,
    so the cost is linear in the number of firings. The result is identical
    to iterating :func:`step`.
    """
    n, m = config.width, config.height
    total = n * m
    vals = config.cells.ravel().tolist()
    fire_time = [-1] * total
    current = [i for i, v in enumerate(vals) if v >= THRESHOLD]
    t = 0
    while current:
        if t >= total:
            raise InternalBoundViolation(f"no fixpoint after {t} steps on {n}x{m} grid")
        for i in current:
            vals[i] = FROZEN
            fire_time[i] = t
        nxt = []
        for i in current:
            y, x = divmod(i, n)
            if y + 1 < m:
                j = i + n
                v = vals[j]
                if v >= 0:
                    vals[j] = v + 1
                    if v + 1 == THRESHOLD:
                        nxt.append(j)
            if x + 1 < n:
                j = i + 1
                v = vals[j]
                if v >= 0:
                    vals[j] = v + 1
                    if v + 1 == THRESHOLD:
                        nxt.append(j)
            if y > 0:
                j = i - n
                v = vals[j]
                if v >= 0:
                    vals[j] = v + 1
                    if v + 1 == THRESHOLD:
                        nxt.append(j)
            if x > 0:
                j = i - 1
                v = vals[j]
                if v >= 0:
                    vals[j] = v + 1
                    if v + 1 == THRESHOLD:
                        nxt.append(j)
        current = nxt
        t += 1
    final = Configuration(np.array(vals, dtype=np.int16).reshape(m, n))
    times = np.array(fire_time, dtype=np.int32).reshape(m, n)
    return final, Trace(times, t)


def decide_fspp(query: Query) -> tuple[bool, Optional[int]]:
    """Decide by simulation whether the questioned cell ever holds 4 grains.

    Returns ``(answer, first_time)``; ``first_time`` is None when the answer
    is negative.
    """
    if not query.config.contains(query.cell):
        raise OutOfBounds(f"cell {query.cell} outside rectangle")
    _, trace = stabilize(query.config)
    t = trace.time(query.cell)
    return t is not None, t


def fire_sequential(config: Configuration, schedule: Iterable[Cell]) -> Configuration:
    """Fire the scheduled cells one at a time, in order."""
    arr = config.cells.copy()
    n, m = config.width, config.height
    for k, (x, y) in enumerate(schedule):
        if not (0 <= x < n and 0 <= y < m):
            raise InvalidSchedule(f"schedule entry {k}: cell {(x, y)} outside rectangle")
        v = arr[y, x]
        if v == FROZEN:
            raise InvalidSchedule(f"schedule entry {k}: cell {(x, y)} already frozen")
        if v < THRESHOLD:
            raise InvalidSchedule(f"schedule entry {k}: cell {(x, y)} holds only {v} grains")
        arr[y, x] = FROZEN
        for dx, dy in DIRECTIONS:
            nx, ny = x + dx, y + dy
            if 0 <= nx < n and 0 <= ny < m and arr[ny, nx] != FROZEN:
                arr[ny, nx] += 1
    return Configuration(arr)


def random_maximal_schedule(config: Configuration, rng: np.random.Generator) -> list[Cell]:
    """A maximal sequential schedule picking a uniformly random eligible cell each turn."""
    arr = config.cells.astype(np.int32)
    n, m = config.width, config.height
    ready = [(int(x), int(y)) for y, x in zip(*np.nonzero(arr >= THRESHOLD))]
    schedule = []
    while ready:
        k = int(rng.integers(len(ready)))
        ready[k], ready[-1] = ready[-1], ready[k]
        x, y = ready.pop()
        schedule.append((x, y))
        arr[y, x] = FROZEN
        for dx, dy in DIRECTIONS:
            nx, ny = x + dx, y + dy
            if 0 <= nx < n and 0 <= ny < m and arr[ny, nx] != FROZEN:
                arr[ny, nx] += 1
                if arr[ny, nx] == THRESHOLD:
                    ready.append((nx, ny))
    return schedule


def clamp(config: Configuration) -> Configuration:
    """Cap every grain count at 4. Frozen cells are left alone."""
    return Configuration(np.minimum(config.cells, THRESHOLD))


def is_a_simple(config: Configuration, allowed) -> bool:
    """True iff every cell holds a grain count drawn from ``allowed``."""
    allowed = allowed_set(allowed)
    return config.values() <= allowed
