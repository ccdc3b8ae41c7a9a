"""Freezing threshold Boolean networks on the grid.

A simple configuration ``c`` defines a network ``B_c`` on the induced grid
graph: each cell gets a freezing threshold function chosen from its grain
count, and a Boolean state that is 1 exactly when the sandpile cell is
frozen. Running ``B_c`` from the all-zero state tracks the sandpile step for
step.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import FROZEN, Configuration, neighbor_count, step
from .errors import NotSimple, ParseError


class LocalFunction(enum.Enum):
    """Threshold on the number of state-1 neighbors needed to switch on."""

    AND = (4, "&")
    SMAJ = (3, "M")
    NSMAJ = (2, "m")
    OR = (1, "|")
    ONE = (0, "1")

    def __init__(self, threshold, symbol):
        self.threshold = threshold
        self.symbol = symbol

    def fires(self, ones: int) -> bool:
        return ones >= self.threshold


# indexed by grain count
FUNCTION_OF_VALUE = (
    LocalFunction.AND,
    LocalFunction.SMAJ,
    LocalFunction.NSMAJ,
    LocalFunction.OR,
    LocalFunction.ONE,
)

_BY_SYMBOL = {f.symbol: f for f in LocalFunction}


@dataclass(frozen=True, eq=False)
class BooleanNetwork:
    """Per-cell local functions over the ``width x height`` grid graph."""

    functions: tuple  # rows of LocalFunction, bottom row first

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.functions)
        if not rows or not rows[0] or len({len(r) for r in rows}) != 1:
            raise ValueError("network must be a non-empty rectangle")
        object.__setattr__(self, "functions", rows)
        thr = np.array([[f.threshold for f in r] for r in rows], dtype=np.int16)
        thr.setflags(write=False)
        object.__setattr__(self, "thresholds", thr)

    @property
    def width(self) -> int:
        return len(self.functions[0])

    @property
    def height(self) -> int:
        return len(self.functions)

    def __getitem__(self, cell) -> LocalFunction:
        x, y = cell
        return self.functions[y][x]

    def __eq__(self, other):
        if not isinstance(other, BooleanNetwork):
            return NotImplemented
        return self.functions == other.functions

    def __hash__(self):
        return hash(self.functions)

    def zeros(self) -> np.ndarray:
        return np.zeros((self.height, self.width), dtype=bool)


def phi(config: Configuration) -> np.ndarray:
    """Boolean image of a configuration: 1 exactly at frozen cells."""
    return config.cells == FROZEN


def build_network(config: Configuration) -> BooleanNetwork:
    cells = config.cells
    if (cells < 0).any() or (cells > 4).any():
        raise NotSimple("network is defined for simple configurations only (values 0..4)")
    return BooleanNetwork(tuple(tuple(FUNCTION_OF_VALUE[v] for v in row) for row in cells.tolist()))


def bn_step(net: BooleanNetwork, state: np.ndarray) -> np.ndarray:
    """One synchronous update; state-1 cells stay at 1."""
    state = np.asarray(state, dtype=bool)
    if state.shape != (net.height, net.width):
        raise ValueError(f"state shape {state.shape} does not match network {net.height}x{net.width}")
    return state | (neighbor_count(state) >= net.thresholds)


def bn_run(net: BooleanNetwork, state: Optional[np.ndarray] = None) -> tuple[np.ndarray, int]:
    """Iterate to the fixpoint. Returns the final state and the number of changing steps."""
    state = net.zeros() if state is None else np.asarray(state, dtype=bool)
    steps = 0
    while True:
        nxt = bn_step(net, state)
        if (nxt == state).all():
            return state, steps
        state = nxt
        steps += 1


def commutation_mismatch(config: Configuration, horizon: Optional[int] = None) -> Optional[int]:
    """First ``t <= horizon`` with ``B_c^t(phi(c)) != phi(F^t(c))``, or None."""
    net = build_network(config)
    if horizon is None:
        horizon = config.size
    sand = config
    state = phi(config)
    for t in range(horizon + 1):
        if not (state == phi(sand)).all():
            return t
        nxt_sand = step(sand)
        nxt_state = bn_step(net, state)
        if nxt_sand is sand and (nxt_state == state).all():
            # both at their fixpoints: equality persists for every later t
            return None
        sand, state = nxt_sand, nxt_state
    return None


def check_commutation(config: Configuration, horizon: Optional[int] = None) -> bool:
    return commutation_mismatch(config, horizon) is None


def serialize_network(net: BooleanNetwork) -> str:
    rows = [" ".join(f.symbol for f in row) for row in net.functions[::-1]]
    return "\n".join(["FSPP 1", f"{net.width} {net.height}", *rows]) + "\n"


def parse_network(text: str) -> BooleanNetwork:
    lines = [(i, l) for i, l in enumerate(text.splitlines(), 1) if l.strip() and not l.startswith("#")]
    if not lines or lines[0][1].strip() != "FSPP 1":
        raise ParseError("missing 'FSPP 1' header", 1)
    try:
        w, h = map(int, lines[1][1].split())
    except (IndexError, ValueError):
        raise ParseError("bad dimensions line", lines[0][0] + 1) from None
    body = lines[2:]
    if len(body) != h:
        raise ParseError(f"expected {h} rows, found {len(body)}", lines[1][0])
    rows = []
    for lineno, raw in body:
        toks = raw.split()
        if len(toks) != w:
            raise ParseError(f"expected {w} tokens", lineno)
        try:
            rows.append(tuple(_BY_SYMBOL[t] for t in toks))
        except KeyError as exc:
            raise ParseError(f"invalid function symbol {exc.args[0]!r}", lineno) from None
    return BooleanNetwork(tuple(rows[::-1]))
