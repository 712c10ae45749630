"""Perfect renaming for two wait-free processes never terminates.

Each speedup step keeps a copy of the original task inside it, so a
t-round algorithm would give a zero-round one, which does not exist.

    python3 walkthroughs/renaming_chain.py
"""

from topospeed.models import wait_free
from topospeed.solver import solve
from topospeed.speedup import (build_speedup_task, check_includes_original, designated_pair,
                               format_family)
from topospeed.tasks import perfect_renaming

task = perfect_renaming(2)
model = wait_free(2)

for t in range(3):
    print(f"{t} rounds:", solve(task, model, t).status)

speedup = build_speedup_task(task, model)
print("speedup facets:", len(speedup.O.facets))
pairs = {tuple(format_family(f) for f in designated_pair(F)) for F in speedup.O.facets}
print("solo-pattern entries on facets:", sorted(pairs))

ext = check_includes_original(task, speedup, model)
print("renaming recovered from the speedup task in 0 rounds:", ext.found)
