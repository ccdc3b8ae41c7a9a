"""
Deciders for restricted alphabets
=================================

Some alphabets need no full simulation. A {0,1,4} configuration becomes a
strict-majority graph on which zero cells are inert. Each decider below is
compared with the simulation on random instances.
"""

import numpy as np

from fsandpile.core import Configuration, Query, decide_fspp
from fsandpile.deciders import DECIDERS, build_014_graph, decide_014_detailed
from fsandpile.gridio import render

c = Configuration.from_rows([[0, 4, 4, 1, 1], [4, 1, 0, 4, 4], [4, 4, 4, 0, 0]])
print(render(c))

# zero cells turn into 4-cycles that never switch on
g = build_014_graph(c)
print(f"\n{len(g)} vertices, max degree {g.max_degree()}")
print(g.dump()[:400], "...")

run = decide_014_detailed(Query(c, (3, 0)))
print("cell (3, 0) fires:", run.answer, "| any gadget vertex on:", run.gadget_fired)

rng = np.random.default_rng(5)
for name, (alphabet, decide) in DECIDERS.items():
    bad = 0
    for _ in range(200):
        w, h = rng.integers(1, 8, 2)
        cfg = Configuration(rng.choice(sorted(alphabet), size=(h, w)))
        q = Query(cfg, (int(rng.integers(w)), int(rng.integers(h))))
        bad += decide(q) != decide_fspp(q)[0]
    print(f"{name:11s} alphabet {sorted(alphabet)}: {bad}/200 disagreements")
