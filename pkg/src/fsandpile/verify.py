"""Randomized and exhaustive oracle checks for reductions and deciders.

Every trial derives its own 64-bit seed from the run seed, so a failure can
be replayed on its own with :func:`replay`.
"""

from __future__ import annotations

import itertools
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import Configuration, Query, allowed_set, decide_fspp
from .deciders import DECIDERS
from .errors import UnknownSubject
from .generate import GenSpec, generate
from .gadgets import truth_table_decide_0134
from .gridio import serialize_config
from .reductions import CHAINS, REGISTRY, compose, localize, resolve_chain

TRUTH_TABLE = "truth_table_0134"
MAX_TWOS = 3


@dataclass(frozen=True)
class Subject:
    name: str
    kind: str  # "reduction" or "decider"
    alphabet: frozenset


def subjects() -> dict[str, Subject]:
    out = {}
    for rid, spec in REGISTRY.items():
        out[rid] = Subject(rid, "reduction", spec.source)
    for chain in CHAINS:
        out[chain] = Subject(chain, "reduction", REGISTRY[resolve_chain(chain)[0]].source)
    for name, (alpha, _) in DECIDERS.items():
        out[name] = Subject(name, "decider", alpha)
    out[TRUTH_TABLE] = Subject(TRUTH_TABLE, "decider", frozenset(range(5)))
    return out


def get_subject(name: str) -> Subject:
    table = subjects()
    if name not in table:
        raise UnknownSubject(f"unknown subject {name!r}; known: {', '.join(sorted(table))}")
    return table[name]


@dataclass
class Failure:
    seed: Optional[int]
    instance: str  # grid text
    cell: tuple
    expected: bool
    got: bool
    divergences: list = field(default_factory=list)


@dataclass
class VerifyReport:
    subject: str
    trials: int
    failures: list
    wall_time: float
    seed: Optional[int] = None
    max_size: tuple = (0, 0)
    exhaustive: bool = False

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self, timing: bool = True) -> dict:
        d = asdict(self)
        d["max_size"] = list(self.max_size)
        for f in d["failures"]:
            f["cell"] = list(f["cell"])
        if not timing:
            del d["wall_time"]
        return d

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True)


def _random_instance(subject: Subject, seed: int, max_size) -> Query:
    rng = np.random.default_rng(seed)
    w = int(rng.integers(1, max_size[0] + 1))
    h = int(rng.integers(1, max_size[1] + 1))
    if subject.name == TRUTH_TABLE:
        base = GenSpec(w, h, {0, 1, 3, 4}, {a: int(rng.integers(1, 5)) for a in (0, 1, 3, 4)}, int(rng.integers(2**63)))
        cells = generate(base).cells.copy()
        k = int(rng.integers(0, min(MAX_TWOS, w * h) + 1))
        cells.flat[rng.permutation(w * h)[:k]] = 2
        config = Configuration(cells)
    else:
        alpha = sorted(subject.alphabet)
        weights = {a: int(rng.integers(1, 5)) for a in alpha}
        config = generate(GenSpec(w, h, subject.alphabet, weights, int(rng.integers(2**63))))
    cell = (int(rng.integers(w)), int(rng.integers(h)))
    return Query(config, cell)


def _decider(subject: Subject) -> Callable[[Query], bool]:
    if subject.name == TRUTH_TABLE:
        return truth_table_decide_0134
    return DECIDERS[subject.name][1]


def _check(subject: Subject, query: Query, seed, data_dir) -> Optional[Failure]:
    expected = decide_fspp(query)[0]
    divergences = []
    if subject.kind == "reduction":
        reduced = compose(subject.name, query, data_dir)
        got = decide_fspp(reduced.query)[0]
        if got != expected:
            divergences = [
                f"{d.stage} source {d.source_cell} macrocell {d.macrocell}: "
                f"source fired {d.source_fired}, target fired {d.target_fired}"
                for d in localize(reduced)
            ]
    else:
        got = bool(_decider(subject)(query))
    if got == expected:
        return None
    return Failure(seed, serialize_config(query.config), query.cell, expected, got, divergences)


def _run_seeds(args):
    name, seeds, max_size, data_dir = args
    subject = get_subject(name)
    out = []
    for s in seeds:
        f = _check(subject, _random_instance(subject, s, max_size), s, data_dir)
        if f is not None:
            out.append(f)
    return out


def trial_seeds(seed: int, trials: int) -> list[int]:
    state = np.random.SeedSequence(seed).generate_state(trials, dtype=np.uint64)
    return [int(s) for s in state]


def _exhaustive_queries(subject: Subject, size):
    w, h = size
    alpha = sorted(subject.alphabet)
    for flat in itertools.product(alpha, repeat=w * h):
        config = Configuration(np.array(flat).reshape(h, w))
        for y in range(h):
            for x in range(w):
                yield Query(config, (x, y))


def verify(
    subject: str,
    trials: int = 200,
    max_size=(6, 6),
    seed: int = 0,
    exhaustive: bool = False,
    workers: int = 1,
    data_dir=None,
) -> VerifyReport:
    """Compare ``subject`` against the simulation oracle.

    Random mode draws ``trials`` instances with sides up to ``max_size``.
    Exhaustive mode enumerates every configuration of exactly ``max_size``
    over the subject's alphabet with every questioned cell; ``trials`` is
    then the number of queries checked.
    """
    sub = get_subject(subject)
    if isinstance(max_size, int):
        max_size = (max_size, max_size)
    max_size = (int(max_size[0]), int(max_size[1]))
    data_dir = None if data_dir is None else str(data_dir)
    start = time.perf_counter()
    failures = []
    if exhaustive:
        count = 0
        for q in _exhaustive_queries(sub, max_size):
            count += 1
            f = _check(sub, q, None, data_dir)
            if f is not None:
                failures.append(f)
        trials = count
    else:
        seeds = trial_seeds(seed, trials)
        if workers > 1:
            chunks = [seeds[i::workers] for i in range(workers)]
            with ProcessPoolExecutor(max_workers=workers) as pool:
                parts = pool.map(_run_seeds, [(subject, c, max_size, data_dir) for c in chunks])
                failures = [f for part in parts for f in part]
            order = {s: i for i, s in enumerate(seeds)}
            failures.sort(key=lambda f: order[f.seed])
        else:
            failures = _run_seeds((subject, seeds, max_size, data_dir))
    return VerifyReport(
        subject, trials, failures, time.perf_counter() - start, None if exhaustive else seed, max_size, exhaustive
    )


def replay(subject: str, seed: int, max_size=(6, 6), data_dir=None) -> Optional[Failure]:
    """Re-run the single trial drawn from ``seed``; None if it passes."""
    sub = get_subject(subject)
    if isinstance(max_size, int):
        max_size = (max_size, max_size)
    return _check(sub, _random_instance(sub, seed, max_size), seed, data_dir)


def random_query(alphabet, max_size, seed) -> Query:
    """A random instance on ``alphabet`` drawn the way :func:`verify` draws them."""
    sub = Subject("custom", "decider", allowed_set(alphabet))
    if isinstance(max_size, int):
        max_size = (max_size, max_size)
    return _random_instance(sub, seed, max_size)
