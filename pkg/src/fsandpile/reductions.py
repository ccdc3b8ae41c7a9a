"""Cell-to-macrocell reductions between restricted prediction problems.

Every reduction replaces each source cell by a fixed-size block of cells
(a macrocell) read from a data file under ``fsandpile/data/<reduction>/``.
The block for the questioned cell may differ from the ordinary one and
carries the offset of the new questioned cell.

Each :class:`ReducedInstance` keeps a provenance map from target cells back
to the source cell and the role (center, wire, background) they play, which
:func:`localize` uses to point at the macrocell whose behavior diverges from
its source cell.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .core import FULL_ALPHABET, Cell, Configuration, Query, is_a_simple, stabilize
from .errors import ChainMismatch, UnknownSubject, WrongAlphabet
from .gridio import Macrocell, parse_macrocell

BACKGROUND, WIRE, CENTER = 0, 1, 2
ROLE_NAMES = ("background", "wire", "center")


@dataclass(frozen=True)
class CaseTable:
    """Which macrocell file stands for which source value."""

    directory: str
    cases: dict  # source value -> case name, ordinary cells
    questioned: dict  # source value -> case name, questioned cell
    background: int
    center: Optional[Cell]  # None: the whole block acts as one unit

    def case_for(self, value: int, questioned: bool) -> str:
        return (self.questioned if questioned else self.cases)[value]


@dataclass(frozen=True)
class ReductionSpec:
    id: str
    source: frozenset
    target: frozenset
    table: CaseTable
    # used instead of ``table`` when the questioned cell holds 0
    zero_table: Optional[CaseTable] = None

    def table_for(self, query: Query) -> CaseTable:
        if self.zero_table is not None and query.value == 0:
            return self.zero_table
        return self.table


def _all(case, values):
    return {v: case for v in values}


REGISTRY: dict[str, ReductionSpec] = {
    spec.id: spec
    for spec in (
        ReductionSpec(
            "R234_24",
            frozenset({2, 3, 4}),
            frozenset({2, 4}),
            CaseTable("R234_24", {2: "2", 3: "3", 4: "4"}, {2: "2", 3: "3", 4: "4"}, 2, None),
        ),
        ReductionSpec(
            "R_1234",
            FULL_ALPHABET,
            frozenset({1, 2, 3, 4}),
            CaseTable(
                "R_1234",
                {0: "0", **_all("a", (1, 2, 3, 4))},
                {0: "0q", **_all("a", (1, 2, 3, 4))},
                1,
                (2, 2),
            ),
        ),
        ReductionSpec(
            "R_0234",
            FULL_ALPHABET,
            frozenset({0, 2, 3, 4}),
            CaseTable(
                "R_0234",
                {1: "1", **_all("a", (0, 2, 3, 4))},
                {1: "1q", **_all("a", (0, 2, 3, 4))},
                0,
                (2, 2),
            ),
        ),
        ReductionSpec(
            "R_0124",
            FULL_ALPHABET,
            frozenset({0, 1, 2, 4}),
            CaseTable(
                "R_0124",
                {3: "3", **_all("a", (0, 1, 2, 4))},
                {3: "3", **_all("a", (0, 1, 2, 4))},
                0,
                (3, 3),
            ),
        ),
        ReductionSpec(
            "R0124_124",
            frozenset({0, 1, 2, 4}),
            frozenset({1, 2, 4}),
            CaseTable(
                "R0124_124",
                {0: "0", **_all("a", (1, 2, 4))},
                {0: "0q", **_all("a", (1, 2, 4))},
                1,
                (2, 3),
            ),
        ),
        ReductionSpec(
            "R0234_024",
            frozenset({0, 2, 3, 4}),
            frozenset({0, 2, 4}),
            CaseTable(
                "R_0124",
                {3: "3", **_all("a", (0, 2, 4))},
                {3: "3", **_all("a", (0, 2, 4))},
                0,
                (3, 3),
            ),
        ),
        ReductionSpec(
            "R0134_134",
            frozenset({0, 1, 3, 4}),
            frozenset({1, 3, 4}),
            CaseTable(
                "R0134_134",
                {0: "0", 1: "1", 3: "3", 4: "4"},
                {1: "1", 3: "3", 4: "4"},
                1,
                (1, 1),
            ),
            zero_table=CaseTable(
                "R0134_134",
                {0: "0-7", **_all("a-7", (1, 3, 4))},
                {0: "0q-7"},
                1,
                (3, 3),
            ),
        ),
    )
}

CHAINS = {
    "R_0124+R0124_124": ("R_0124", "R0124_124"),
    "R_0234+R0234_024": ("R_0234", "R0234_024"),
}


def resolve_chain(rid: Union[str, Sequence[str]]) -> tuple[str, ...]:
    if isinstance(rid, str):
        if rid in CHAINS:
            return CHAINS[rid]
        parts = tuple(p for p in rid.split("+") if p)
    else:
        parts = tuple(rid)
    for p in parts:
        if p not in REGISTRY:
            raise UnknownSubject(f"unknown reduction {p!r}")
    return parts


def default_data_dir() -> Path:
    return Path(str(resources.files("fsandpile") / "data"))


@functools.lru_cache(maxsize=None)
def _load_dir(path: str) -> dict:
    out = {}
    for f in sorted(Path(path).glob("*.grid")):
        macro = parse_macrocell(f.read_text())
        out[macro.case] = macro
    return out


def load_macrocells(table: CaseTable, data_dir=None) -> dict[str, Macrocell]:
    base = Path(data_dir) if data_dir is not None else default_data_dir()
    return _load_dir(str(base / table.directory))


def clear_cache():
    _load_dir.cache_clear()


@dataclass(frozen=True, eq=False)
class Provenance:
    """Back-map from target cells to the source cells they emulate.

    ``source[y, x]`` is the ``(sx, sy)`` source cell of target ``(x, y)``;
    ``role[y, x]`` one of BACKGROUND, WIRE, CENTER. ``labels[sy][sx]`` names
    the macrocell file used for each source cell. Chained reductions keep
    their per-stage provenance in ``stages`` and map ``source`` all the way
    back to the original instance.
    """

    source: np.ndarray
    role: np.ndarray
    labels: tuple
    stride: tuple[int, int]
    stages: tuple = ()

    def origin(self, cell: Cell) -> tuple[Cell, str]:
        x, y = cell
        sx, sy = self.source[y, x]
        return (int(sx), int(sy)), ROLE_NAMES[int(self.role[y, x])]

    def label(self, source_cell: Cell) -> str:
        x, y = source_cell
        return self.labels[y][x]


@dataclass(frozen=True, eq=False)
class ReducedInstance:
    config: Configuration
    cell: Cell
    provenance: Provenance
    reduction: str
    source: Query
    data_dir: Optional[str] = None

    @property
    def query(self) -> Query:
        return Query(self.config, self.cell)


def _apply(spec: ReductionSpec, query: Query, data_dir=None) -> ReducedInstance:
    config = query.config
    if not is_a_simple(config, spec.source):
        raise WrongAlphabet(
            f"{spec.id} expects a {''.join(map(str, sorted(spec.source)))}-simple configuration, "
            f"got values {sorted(config.values())}"
        )
    table = spec.table_for(query)
    macros = load_macrocells(table, data_dir)
    needed = {table.case_for(int(v), False) for v in config.values()}
    needed.add(table.case_for(query.value, True))
    dims = {(macros[c].width, macros[c].height) for c in needed}
    dims |= {(m.width, m.height) for c, m in macros.items() if c in set(table.cases.values())}
    if len(dims) != 1:
        raise ValueError(f"{spec.id}: macrocells of unequal size {sorted(dims)}")
    sx, sy = dims.pop()
    n, m = config.width, config.height
    out = np.empty((m * sy, n * sx), dtype=np.int16)
    role = np.empty_like(out, dtype=np.int8)
    src = np.empty((m * sy, n * sx, 2), dtype=np.int32)
    labels = []
    new_cell = None
    for y in range(m):
        row_labels = []
        for x in range(n):
            v = config[x, y]
            is_q = (x, y) == query.cell
            macro = macros[table.case_for(v, is_q)]
            block = macro.substitute(v)
            if not set(np.unique(block).tolist()) <= spec.target:
                raise ValueError(f"{spec.id}/{macro.case}: block for value {v} leaves the target alphabet")
            window = (slice(y * sy, (y + 1) * sy), slice(x * sx, (x + 1) * sx))
            out[window] = block
            r = np.where(block == table.background, BACKGROUND, WIRE).astype(np.int8)
            probe = macro.question if is_q else table.center
            if probe is not None:
                r[probe[1], probe[0]] = CENTER
            role[window] = r
            src[window] = (x, y)
            row_labels.append(f"{table.directory}/{macro.case}")  # names the data file
            if is_q:
                if macro.question is None:
                    raise ValueError(f"{spec.id}/{macro.case} has no questioned-cell offset")
                new_cell = (x * sx + macro.question[0], y * sy + macro.question[1])
        labels.append(tuple(row_labels))
    prov = Provenance(src, role, tuple(labels), (sx, sy))
    return ReducedInstance(
        Configuration(out), new_cell, prov, spec.id, query, None if data_dir is None else str(data_dir)
    )


def apply_reduction(rid: str, query: Query, data_dir=None) -> ReducedInstance:
    try:
        spec = REGISTRY[rid]
    except KeyError:
        raise UnknownSubject(f"unknown reduction {rid!r}") from None
    return _apply(spec, query, data_dir)


def reduce_234_to_24(query: Query, data_dir=None) -> ReducedInstance:
    return apply_reduction("R234_24", query, data_dir)


def reduce_to_1234(query: Query, data_dir=None) -> ReducedInstance:
    return apply_reduction("R_1234", query, data_dir)


def reduce_to_0234(query: Query, data_dir=None) -> ReducedInstance:
    return apply_reduction("R_0234", query, data_dir)


def reduce_to_0124(query: Query, data_dir=None) -> ReducedInstance:
    return apply_reduction("R_0124", query, data_dir)


def reduce_0124_to_124(query: Query, data_dir=None) -> ReducedInstance:
    return apply_reduction("R0124_124", query, data_dir)


def reduce_0234_to_024(query: Query, data_dir=None) -> ReducedInstance:
    return apply_reduction("R0234_024", query, data_dir)


def reduce_0134_to_134(query: Query, data_dir=None) -> ReducedInstance:
    return apply_reduction("R0134_134", query, data_dir)


def _identity(query: Query) -> ReducedInstance:
    c = query.config
    ys, xs = np.mgrid[0 : c.height, 0 : c.width]
    src = np.stack([xs, ys], axis=-1).astype(np.int32)
    role = np.full(c.cells.shape, CENTER, dtype=np.int8)
    labels = tuple(tuple("identity" for _ in range(c.width)) for _ in range(c.height))
    return ReducedInstance(c, query.cell, Provenance(src, role, labels, (1, 1)), "", query)


def compose(chain: Union[str, Sequence[str]], query: Query, data_dir=None) -> ReducedInstance:
    """Apply reductions left to right, composing their provenance maps."""
    ids = resolve_chain(chain) if chain else ()
    for a, b in zip(ids, ids[1:]):
        if not REGISTRY[a].target <= REGISTRY[b].source:
            raise ChainMismatch(f"{a} emits {sorted(REGISTRY[a].target)}, {b} accepts {sorted(REGISTRY[b].source)}")
    if not ids:
        return _identity(query)
    current = apply_reduction(ids[0], query, data_dir)
    stages = [current]
    for rid in ids[1:]:
        nxt = apply_reduction(rid, current.query, data_dir)
        stages.append(nxt)
        prev_src = current.provenance.source
        hop = nxt.provenance.source
        composed = prev_src[hop[..., 1], hop[..., 0]]
        prov = Provenance(
            composed,
            nxt.provenance.role,
            nxt.provenance.labels,
            nxt.provenance.stride,
            tuple(s.provenance for s in stages),
        )
        current = ReducedInstance(nxt.config, nxt.cell, prov, "+".join(ids[: len(stages)]), query, nxt.data_dir)
    return current


@dataclass(frozen=True)
class Divergence:
    """A source cell whose macrocell does not mirror its firing behavior."""

    stage: str
    source_cell: Cell
    macrocell: str
    source_fired: bool
    target_fired: bool


def _probe_cells(table: CaseTable, macro: Macrocell, is_q: bool, stride):
    sx, sy = stride
    if is_q:
        return [macro.question]
    if table.center is None:
        return [(i, j) for j in range(sy) for i in range(sx)]
    cx, cy = table.center
    return [(cx, cy), (0, cy), (sx - 1, cy), (cx, 0), (cx, sy - 1)]


def _localize_stage(reduced: ReducedInstance) -> list[Divergence]:
    spec = REGISTRY[reduced.reduction]
    query = reduced.source
    table = spec.table_for(query)
    macros = load_macrocells(table, reduced.data_dir)
    _, src_trace = stabilize(query.config)
    _, tgt_trace = stabilize(reduced.config)
    tgt_fired = tgt_trace.fired_mask()
    sx, sy = reduced.provenance.stride
    found = []
    config = query.config
    for y in range(config.height):
        for x in range(config.width):
            v = config[x, y]
            is_q = (x, y) == query.cell
            if v == 0 and not is_q:
                # zero cells only fire after all their neighbors: passive
                continue
            macro = macros[table.case_for(v, is_q)]
            probes = _probe_cells(table, macro, is_q, (sx, sy))
            t_fired = all(tgt_fired[y * sy + j, x * sx + i] for i, j in probes)
            s_fired = src_trace.time((x, y)) is not None
            if t_fired != s_fired:
                found.append(Divergence(spec.id, (x, y), reduced.provenance.label((x, y)), s_fired, t_fired))
    def first_seen(d):
        t = src_trace.time(d.source_cell)
        return (t is None, t or 0, d.source_cell)

    found.sort(key=first_seen)
    return found


def localize(reduced: ReducedInstance) -> list[Divergence]:
    """Macrocells whose firing disagrees with their source cell.

    Chained reductions are checked stage by stage and the first stage with
    a divergence is reported.
    """
    if "+" not in reduced.reduction:
        return _localize_stage(reduced)
    stages = resolve_chain(reduced.reduction)
    query = reduced.source
    for rid in stages:
        step_result = apply_reduction(rid, query, reduced.data_dir)
        found = _localize_stage(step_result)
        if found:
            return found
        query = step_result.query
    return []


@dataclass(frozen=True)
class TimingReport:
    mismatches: list
    background_firings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches and not self.background_firings


def check_1234_timing(reduced: ReducedInstance, factor: int = 5) -> TimingReport:
    """Center of each nonzero source cell fires at ``factor`` times its source time,
    and no background cell of an ordinary macrocell ever fires."""
    if reduced.reduction != "R_1234":
        raise ValueError("timing correspondence is only asserted for R_1234")
    query = reduced.source
    _, src = stabilize(query.config)
    _, tgt = stabilize(reduced.config)
    sx, sy = reduced.provenance.stride
    cx, cy = REGISTRY["R_1234"].table.center
    mismatches = []
    config = query.config
    for y in range(config.height):
        for x in range(config.width):
            if config[x, y] == 0:
                continue
            ts = src.time((x, y))
            tt = tgt.time((x * sx + cx, y * sy + cy))
            expected = None if ts is None else factor * ts
            if tt != expected:
                mismatches.append(((x, y), ts, tt))
    prov = reduced.provenance
    bg = (prov.role == BACKGROUND) & tgt.fired_mask()
    qx, qy = query.cell
    own = (prov.source[..., 0] == qx) & (prov.source[..., 1] == qy)
    firings = [(int(x), int(y)) for y, x in zip(*np.nonzero(bg & ~own))]
    return TimingReport(mismatches, firings)


def macrocell_cases(rid: str) -> Iterable[tuple[CaseTable, str]]:
    spec = REGISTRY[rid]
    for table in filter(None, (spec.table, spec.zero_table)):
        for case in sorted(set(table.cases.values()) | set(table.questioned.values())):
            yield table, case
