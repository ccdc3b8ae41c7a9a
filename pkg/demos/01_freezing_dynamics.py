"""
Freezing sandpile dynamics, step by step
========================================

Every cell topples at most once. We stabilize a small configuration, look at
the firing times, and check that the threshold Boolean network built from
the grain counts tracks the frozen set exactly.
"""

import numpy as np

from fsandpile.boolean_net import bn_step, build_network, phi, serialize_network
from fsandpile.core import Configuration, iterate, stabilize
from fsandpile.gridio import render

# rows are given bottom row first
c = Configuration.from_rows([[1, 4, 4, 4, 1], [4, 1, 1, 1, 1], [4, 4, 4, 4, 4]])
print(render(c))

# each application of the parallel map
for t, ct in enumerate(iterate(c)):
    print(f"\nt = {t}")
    print(render(ct))

final, trace = stabilize(c)
print("\nfiring times ('.' never fired):")
print(render(trace))
print(f"fixpoint after {trace.steps} steps; bound is {c.size}")

# the network: one local threshold function per cell
net = build_network(c)
print()
print(serialize_network(net))

state = phi(c)
for ct in iterate(c):
    assert np.array_equal(state, phi(ct))
    state = bn_step(net, state)
print("network state equals the frozen set at every step")
