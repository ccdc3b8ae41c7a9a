"""
Macrocell reductions and provenance
===================================

A reduction swaps every cell for a fixed block over a smaller alphabet.
The reduced instance answers the same question, and its provenance maps
each cell back to the source cell it stands for.
"""

import numpy as np

from fsandpile.core import Configuration, Query, decide_fspp, stabilize
from fsandpile.gridio import render
from fsandpile.reductions import check_1234_timing, compose, localize, reduce_to_1234

query = Query(Configuration.from_rows([[4, 3, 0], [2, 1, 3]]), (2, 1))
print(render(query.config))
print("source answer:", decide_fspp(query))

# every value becomes a 5x5 block over {1,2,3,4}
r = reduce_to_1234(query)
print(f"\n{r.config.width}x{r.config.height} target, questioned cell {r.cell}")
print(render(r.config))
print("target answer:", decide_fspp(r.query))

# block centers fire at five times the source firing time
print("timing check:", check_1234_timing(r))

# chains compose; the back-map still lands on the original grid
chain = compose("R_0124+R0124_124", query)
print(f"\nchain output {chain.config.width}x{chain.config.height}, values {sorted(chain.config.values())}")
sx, sy = chain.provenance.source[chain.cell[1], chain.cell[0]]
print("questioned cell maps back to", (int(sx), int(sy)))

# firing maps of source and target side by side
_, src = stabilize(query.config)
_, tgt = stabilize(r.config)
centers = tgt.firing_time[2::5, 2::5]
print("\nsource times:\n", src.firing_time[::-1])
print("target block-center times / 5:\n", np.where(centers >= 0, centers // 5, -1)[::-1])
print("divergences:", localize(r))
