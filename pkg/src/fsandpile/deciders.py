"""Decision procedures for the restrictions that are efficiently predictable.

Each decider answers the same question as :func:`fsandpile.core.decide_fspp`
but exploits the structure of its alphabet. ``{0,1,4}`` goes through freezing
strict majority on a derived graph; ``{0,3,4}`` is reachability from the
4-cells. The others are a local check or the threshold network.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .boolean_net import bn_run, build_network
from .core import Cell, Configuration, Query, is_a_simple, neighbors
from .errors import WrongAlphabet
from .reductions import reduce_234_to_24

SIDES = ("n", "e", "s", "w")
_SIDE_DELTA = {"n": (0, 1), "e": (1, 0), "s": (0, -1), "w": (-1, 0)}
_OPPOSITE = {"n": "s", "e": "w", "s": "n", "w": "e"}


def _require(config: Configuration, alphabet, who: str):
    if not is_a_simple(config, alphabet):
        raise WrongAlphabet(
            f"{who} expects a {''.join(map(str, sorted(alphabet)))}-simple configuration, "
            f"got values {sorted(config.values())}"
        )


class MajorityGraph:
    """Undirected graph with freezing Boolean states.

    Vertices are addressed by integer id; ``tags[i]`` says what vertex ``i``
    stands for, e.g. ``("cell", x, y)``, ``("border", x, y)`` or
    ``("gadget", x, y, "n")``. ``pos`` optionally holds planar drawing
    coordinates.
    """

    def __init__(self):
        self.tags: list[tuple] = []
        self.adj: list[list[int]] = []
        self.state: list[bool] = []
        self.pos: list[tuple[float, float]] = []
        self.index: dict[tuple, int] = {}

    def add_vertex(self, tag, state=False, pos=(0.0, 0.0)) -> int:
        if tag in self.index:
            raise ValueError(f"duplicate vertex {tag}")
        i = len(self.tags)
        self.tags.append(tag)
        self.adj.append([])
        self.state.append(bool(state))
        self.pos.append(pos)
        self.index[tag] = i
        return i

    def add_edge(self, a, b):
        i = self.index[a] if isinstance(a, tuple) else a
        j = self.index[b] if isinstance(b, tuple) else b
        if i == j or j in self.adj[i]:
            raise ValueError(f"bad edge {self.tags[i]} -- {self.tags[j]}")
        self.adj[i].append(j)
        self.adj[j].append(i)

    def __len__(self):
        return len(self.tags)

    def copy(self) -> MajorityGraph:
        g = MajorityGraph()
        g.tags = list(self.tags)
        g.adj = [list(a) for a in self.adj]
        g.state = list(self.state)
        g.pos = list(self.pos)
        g.index = dict(self.index)
        return g

    def with_states(self, state) -> MajorityGraph:
        g = self.copy()
        g.state = [bool(s) for s in state]
        return g

    def degree(self, v) -> int:
        return len(self.adj[v])

    def max_degree(self) -> int:
        return max((len(a) for a in self.adj), default=0)

    def edges(self) -> set:
        return {frozenset((self.tags[i], self.tags[j])) for i, a in enumerate(self.adj) for j in a}

    def is_on(self, tag) -> bool:
        return self.state[self.index[tag]]

    def dump(self) -> str:
        """One line per vertex: ``id tag state: neighbor-ids``."""
        lines = []
        for i, tag in enumerate(self.tags):
            t = ":".join(str(p) for p in tag)
            nb = " ".join(str(j) for j in sorted(self.adj[i]))
            lines.append(f"{i} {t} {int(self.state[i])}: {nb}")
        return "\n".join(lines) + "\n"


def smaj_step(graph: MajorityGraph) -> MajorityGraph:
    """Freezing strict majority: a vertex switches on when more than half of
    its neighbors are on, and never switches off."""
    st = graph.state
    new = [
        s or (sum(st[j] for j in nb) > len(nb) // 2 if nb else False)
        for s, nb in zip(st, graph.adj)
    ]
    return graph.with_states(new)


def smaj_run(graph: MajorityGraph) -> tuple[MajorityGraph, int]:
    """Iterate :func:`smaj_step` to the fixpoint (at most ``len(graph)`` steps)."""
    steps = 0
    while True:
        nxt = smaj_step(graph)
        if nxt.state == graph.state:
            return graph, steps
        graph = nxt
        steps += 1
        if steps > len(graph):
            raise AssertionError("freezing dynamics failed to settle within |V| steps")


def _grid_with_border(config: Configuration, skip=lambda v: False) -> MajorityGraph:
    """Grid graph of the configuration plus a ring of state-0 border vertices.

    Cells for which ``skip(value)`` holds get no vertex; the caller wires
    them. Border vertex ``(x, y)`` uses the bordered coordinates, so source
    cell ``(x, y)`` sits at ``(x + 1, y + 1)`` of the ring's frame.
    """
    n, m = config.width, config.height
    g = MajorityGraph()
    for y in range(m + 2):
        for x in range(n + 2):
            inside = 1 <= x <= n and 1 <= y <= m
            if not inside:
                g.add_vertex(("border", x, y), False, (float(x), float(y)))
            elif not skip(config[x - 1, y - 1]):
                g.add_vertex(("cell", x - 1, y - 1), config[x - 1, y - 1] == 4, (float(x), float(y)))
    return g


def _vertex_at(g: MajorityGraph, config: Configuration, x: int, y: int):
    """Tag of the vertex standing at source coordinates (x, y), border included."""
    if config.contains((x, y)):
        return ("cell", x, y)
    return ("border", x + 1, y + 1)


def _link_grid(g: MajorityGraph, config: Configuration, skip=lambda v: False):
    n, m = config.width, config.height
    for y in range(-1, m + 1):
        for x in range(-1, n + 1):
            for dx, dy in ((1, 0), (0, 1)):
                x2, y2 = x + dx, y + dy
                if not (-1 <= x2 <= n and -1 <= y2 <= m):
                    continue
                a, b = _vertex_at(g, config, x, y), _vertex_at(g, config, x2, y2)
                if a in g.index and b in g.index:
                    g.add_edge(a, b)


def reduce_14_to_smaj(config: Configuration) -> MajorityGraph:
    """Grid graph with a state-0 border; state 1 exactly at the 4-cells."""
    _require(config, {1, 4}, "reduce_14_to_smaj")
    g = _grid_with_border(config)
    _link_grid(g, config)
    return g


def state_grid(g: MajorityGraph, config: Configuration) -> np.ndarray:
    """States of a bordered grid graph as a ``(m + 2, n + 2)`` array."""
    out = np.zeros((config.height + 2, config.width + 2), dtype=np.int8)
    for tag, s in zip(g.tags, g.state):
        if tag[0] == "border":
            out[tag[2], tag[1]] = s
        elif tag[0] == "cell":
            out[tag[2] + 1, tag[1] + 1] = s
    return out


def build_014_graph(config: Configuration) -> MajorityGraph:
    """Strict-majority graph for a ``{0,1,4}`` configuration.

    Each 0-cell becomes a 4-cycle of gadget vertices ``u_n, u_e, u_s, u_w``,
    each wired to the neighbor on its side.
    """
    _require(config, {0, 1, 4}, "build_014_graph")
    is_zero = lambda v: v == 0  # noqa: E731
    g = _grid_with_border(config, skip=is_zero)
    n, m = config.width, config.height
    zeros = [(x, y) for y in range(m) for x in range(n) if config[x, y] == 0]
    for x, y in zeros:
        for side in SIDES:
            dx, dy = _SIDE_DELTA[side]
            g.add_vertex(("gadget", x, y, side), False, (x + 1 + 0.3 * dx, y + 1 + 0.3 * dy))
    _link_grid(g, config, skip=is_zero)
    for x, y in zeros:
        for a, b in zip(SIDES, SIDES[1:] + SIDES[:1]):
            g.add_edge(("gadget", x, y, a), ("gadget", x, y, b))
        for side in SIDES:
            dx, dy = _SIDE_DELTA[side]
            x2, y2 = x + dx, y + dy
            if config.contains((x2, y2)) and config[x2, y2] == 0:
                # gadget-to-gadget links are added once, from the lower/left end
                if side in ("e", "n"):
                    g.add_edge(("gadget", x, y, side), ("gadget", x2, y2, _OPPOSITE[side]))
            else:
                g.add_edge(("gadget", x, y, side), _vertex_at(g, config, x2, y2))
    return g


@dataclass
class Run014:
    """Everything a ``{0,1,4}`` decision looked at."""

    answer: bool
    graphs: list = field(default_factory=list)  # final graphs of every simulation

    @property
    def max_degree(self) -> int:
        return max((g.max_degree() for g in self.graphs), default=0)

    @property
    def gadget_fired(self) -> bool:
        return any(s and t[0] == "gadget" for g in self.graphs for t, s in zip(g.tags, g.state))


def decide_014_detailed(query: Query) -> Run014:
    config = query.config
    _require(config, {0, 1, 4}, "decide_014")
    x, y = query.cell
    if config[x, y] == 4:
        return Run014(True)
    nbrs = neighbors((x, y), config)
    if config[x, y] == 0 and (len(nbrs) < 4 or any(config[u] == 0 for u in nbrs)):
        return Run014(False)
    final, _ = smaj_run(build_014_graph(config))
    run = Run014(False, [final])
    if config[x, y] != 0:
        run.answer = final.is_on(("cell", x, y))
    else:
        run.answer = all(final.is_on(("cell",) + u) for u in nbrs)
    return run


def decide_014(query: Query) -> bool:
    return decide_014_detailed(query).answer


def decide_04(query: Query) -> bool:
    """A 4 fires; a 0 fires iff it has four in-rectangle neighbors, all 4."""
    config = query.config
    _require(config, {0, 4}, "decide_04")
    v = query.value
    if v == 4:
        return True
    nbrs = neighbors(query.cell, config)
    return len(nbrs) == 4 and all(config[u] == 4 for u in nbrs)


def _reaches_from_four(config: Configuration, target: Cell) -> bool:
    """BFS over nonzero cells from any 4-cell to ``target``."""
    seen = set()
    queue = deque()
    for y in range(config.height):
        for x in range(config.width):
            if config[x, y] == 4:
                seen.add((x, y))
                queue.append((x, y))
    while queue:
        u = queue.popleft()
        if u == target:
            return True
        for w in neighbors(u, config):
            if w not in seen and config[w] != 0:
                seen.add(w)
                queue.append(w)
    return False


def decide_034(query: Query) -> bool:
    config = query.config
    _require(config, {0, 3, 4}, "decide_034")
    if query.value != 0:
        return _reaches_from_four(config, query.cell)
    nbrs = neighbors(query.cell, config)
    if len(nbrs) < 4 or any(config[u] == 0 for u in nbrs):
        return False
    return all(_reaches_from_four(config, u) for u in nbrs)


def decide_24(query: Query) -> bool:
    """Run the non-strict-majority network of a ``{2,4}`` configuration."""
    config = query.config
    _require(config, {2, 4}, "decide_24")
    final, _ = bn_run(build_network(config))
    x, y = query.cell
    return bool(final[y, x])


def decide_234(query: Query) -> bool:
    _require(query.config, {2, 3, 4}, "decide_234")
    reduced = reduce_234_to_24(query)
    return decide_24(reduced.query)


def planar_positions_ok(g: MajorityGraph) -> bool:
    return len(set(g.pos)) == len(g.pos)


DECIDERS = {
    "decide_04": (frozenset({0, 4}), decide_04),
    "decide_014": (frozenset({0, 1, 4}), decide_014),
    "decide_24": (frozenset({2, 4}), decide_24),
    "decide_034": (frozenset({0, 3, 4}), decide_034),
    "decide_234": (frozenset({2, 3, 4}), decide_234),
}


def special_decider(alphabet) -> Optional[str]:
    """Name of the narrowest registered decider covering ``alphabet``, if any."""
    alphabet = frozenset(alphabet)
    best = None
    for name, (alpha, _) in DECIDERS.items():
        if alphabet <= alpha and (best is None or len(alpha) < len(DECIDERS[best][0])):
            best = name
    return best
