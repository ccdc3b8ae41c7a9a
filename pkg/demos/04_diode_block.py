"""
The value-2 diode block
=======================

Values 0, 1, 3 and 4 have easy blocks. A cell holding two grains does not:
the 21x21 diode block fires its free sides once two inputs arrive, though
some pairs of inputs fail. Trying both orientations for each 2 and taking
the OR gives a decision procedure for instances with few 2s.
"""

import itertools

import numpy as np

from fsandpile.core import Configuration, Query, decide_fspp
from fsandpile.gadgets import (
    ORIENTATIONS,
    SIDE_NAMES,
    diode_pattern,
    test_diode_macrocell,
    truth_table_decide_0134,
)
from fsandpile.gridio import render

print(render(diode_pattern()))

for orient in ORIENTATIONS:
    print(f"\n{orient}")
    for r in (1, 2, 3, 4):
        for combo in itertools.combinations(SIDE_NAMES, r):
            out = sorted(test_diode_macrocell(orient, combo), key=SIDE_NAMES.index)
            print(f"  in {''.join(combo):4s} -> out {''.join(out) or '-'}")

# failing pairs: each orientation loses two adjacent-side pairs, and
# the two orientations lose different ones
for orient in ORIENTATIONS:
    dead = [a + b for a, b in itertools.combinations(SIDE_NAMES, 2) if not test_diode_macrocell(orient, a + b)]
    print(orient, "misses", dead)

rng = np.random.default_rng(0)
agree = 0
for _ in range(50):
    w, h = rng.integers(1, 5, 2)
    cells = rng.choice([0, 1, 3, 4], size=(h, w))
    cells.flat[rng.permutation(w * h)[: rng.integers(0, 3)]] = 2
    q = Query(Configuration(cells), (int(rng.integers(w)), int(rng.integers(h))))
    agree += truth_table_decide_0134(q) == decide_fspp(q)[0]
print(f"\ntruth-table decider agrees with simulation on {agree}/50 instances")
