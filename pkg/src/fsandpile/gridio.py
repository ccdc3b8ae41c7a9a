"""Grid text format, macrocell data files and ASCII rendering.

Configuration files::

    FSPP 1
    <width> <height>
    <height rows, top row first, tokens 0-4 or F>

Macrocell files add a ``MACRO <reduction-id> <case>`` line after the header,
an optional ``QUESTION <x> <y>`` line giving the questioned-cell offset, and
allow the placeholder token ``a``. Lines starting with ``#`` are comments.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .core import FROZEN, Configuration, Trace
from .errors import ParseError

MAGIC = "FSPP 1"
PLACEHOLDER = -2

_TOKENS = {"0": 0, "1": 1, "2": 2, "3": 3, "4": 4, "F": FROZEN}


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield lineno, raw


def _parse_dims(lineno, raw):
    parts = raw.split()
    if len(parts) != 2:
        raise ParseError("expected '<width> <height>'", lineno)
    try:
        w, h = int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError("dimensions must be integers", lineno) from None
    if w < 1 or h < 1:
        raise ParseError("dimensions must be positive", lineno)
    return w, h


def _parse_rows(lines, w, h, tokens, start_lineno):
    if len(lines) != h:
        raise ParseError(f"expected {h} rows, found {len(lines)}", start_lineno)
    rows = []
    for lineno, raw in lines:
        vals = []
        col = 0
        for tok in raw.split():
            col = raw.index(tok, col) + 1
            if tok not in tokens:
                raise ParseError(f"invalid token {tok!r}", lineno, col)
            vals.append(tokens[tok])
            col += len(tok) - 1
        if len(vals) != w:
            raise ParseError(f"expected {w} tokens, found {len(vals)}", lineno)
        rows.append(vals)
    # file rows are top-first; arrays are indexed [y, x] from the bottom
    return np.array(rows[::-1], dtype=np.int16)


def parse_config(text: str) -> Configuration:
    lines = list(_content_lines(text))
    if not lines or lines[0][1].strip() != MAGIC:
        raise ParseError(f"missing '{MAGIC}' header", lines[0][0] if lines else 1)
    if len(lines) < 2:
        raise ParseError("missing dimensions line", lines[0][0])
    w, h = _parse_dims(*lines[1])
    arr = _parse_rows(lines[2:], w, h, _TOKENS, lines[1][0])
    return Configuration(arr)


def _token(v: int) -> str:
    if v == FROZEN:
        return "F"
    if v == PLACEHOLDER:
        return "a"
    if not 0 <= v <= 4:
        raise ValueError(f"value {v} has no grid-format token")
    return str(v)


def _rows_text(arr: np.ndarray) -> list[str]:
    return [" ".join(_token(int(v)) for v in row) for row in arr[::-1]]


def serialize_config(config: Configuration) -> str:
    lines = [MAGIC, f"{config.width} {config.height}", *_rows_text(config.cells)]
    return "\n".join(lines) + "\n"


@dataclass(frozen=True, eq=False)
class Macrocell:
    """A reviewed macrocell pattern, possibly holding the placeholder ``a``."""

    reduction: str
    case: str
    pattern: np.ndarray
    question: Optional[tuple[int, int]] = None

    @property
    def width(self) -> int:
        return self.pattern.shape[1]

    @property
    def height(self) -> int:
        return self.pattern.shape[0]

    def substitute(self, a: Optional[int] = None) -> np.ndarray:
        has_slot = (self.pattern == PLACEHOLDER).any()
        if has_slot and a is None:
            raise ValueError(f"macrocell {self.reduction}/{self.case} needs a value for 'a'")
        if not has_slot:
            return self.pattern
        return np.where(self.pattern == PLACEHOLDER, a, self.pattern).astype(np.int16)

    def with_pattern(self, pattern: np.ndarray) -> Macrocell:
        return Macrocell(self.reduction, self.case, np.asarray(pattern, dtype=np.int16), self.question)


def parse_macrocell(text: str) -> Macrocell:
    lines = list(_content_lines(text))
    if not lines or lines[0][1].strip() != MAGIC:
        raise ParseError(f"missing '{MAGIC}' header", lines[0][0] if lines else 1)
    idx = 1
    if len(lines) <= idx or not lines[idx][1].split()[0] == "MACRO":
        raise ParseError("missing 'MACRO <reduction-id> <case>' line", lines[0][0])
    parts = lines[idx][1].split()
    if len(parts) != 3:
        raise ParseError("expected 'MACRO <reduction-id> <case>'", lines[idx][0])
    reduction, case = parts[1], parts[2]
    idx += 1
    question = None
    if len(lines) > idx and lines[idx][1].split()[0] == "QUESTION":
        q = lines[idx][1].split()
        try:
            question = (int(q[1]), int(q[2]))
        except (IndexError, ValueError):
            raise ParseError("expected 'QUESTION <x> <y>'", lines[idx][0]) from None
        idx += 1
    if len(lines) <= idx:
        raise ParseError("missing dimensions line", lines[-1][0])
    w, h = _parse_dims(*lines[idx])
    tokens = dict(_TOKENS)
    del tokens["F"]
    tokens["a"] = PLACEHOLDER
    arr = _parse_rows(lines[idx + 1 :], w, h, tokens, lines[idx][0])
    if question is not None and not (0 <= question[0] < w and 0 <= question[1] < h):
        raise ParseError(f"question offset {question} outside {w}x{h} pattern")
    return Macrocell(reduction, case, arr, question)


def serialize_macrocell(macro: Macrocell) -> str:
    lines = [MAGIC, f"MACRO {macro.reduction} {macro.case}"]
    if macro.question is not None:
        lines.append(f"QUESTION {macro.question[0]} {macro.question[1]}")
    lines.append(f"{macro.width} {macro.height}")
    lines.extend(_rows_text(macro.pattern))
    return "\n".join(lines) + "\n"


def render(obj: Union[Configuration, Trace, np.ndarray]) -> str:
    """ASCII grid, top row first.

    Configurations and arrays render as value tokens; traces render the
    firing step of each cell, with ``.`` for cells that never fired.
    """
    if isinstance(obj, Trace):
        ft = obj.firing_time
        toks = [["." if t < 0 else str(int(t)) for t in row] for row in ft[::-1]]
    else:
        arr = obj.cells if isinstance(obj, Configuration) else np.asarray(obj)
        toks = [[_token(int(v)) if v <= 4 else str(int(v)) for v in row] for row in arr[::-1]]
    width = max(len(t) for row in toks for t in row)
    return "\n".join(" ".join(t.rjust(width) for t in row) for row in toks)
