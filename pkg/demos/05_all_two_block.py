"""
When an all-2 block stays silent
================================

The {2,3,4} to {2,4} reduction sends a 2 to a block of 2s. A lone 2 fires
after two neighbors fire, whichever sides they are on. A block of 2s fed
along two opposite sides gets one grain per cell on those rows and nothing
in between, so it never fires. The verifier finds such instances and
localizes them to the all-2 block.
"""

from fsandpile.core import Configuration, Query, decide_fspp
from fsandpile.gridio import render
from fsandpile.reductions import localize, reduce_234_to_24
from fsandpile.verify import verify

q = Query(Configuration.from_rows([[4], [2], [4]]), (0, 1))
print(render(q.config))
print("source:", decide_fspp(q))

r = reduce_234_to_24(q)
print(render(r.config))
print("target:", decide_fspp(r.query))
for d in localize(r):
    print(d)

report = verify("R234_24", trials=1000, max_size=(6, 6), seed=1)
print(f"\n{len(report.failures)}/{report.trials} random instances disagree")
print("all source-yes, target-no:", all(f.expected and not f.got for f in report.failures))
print(report.failures[0].instance)
