"""Three processes on a directed triangle: one round suffices, zero do not.

Builds the speedup task, prints the tables of one of its facets and runs
the completion round from a zero-round speedup solution.

    python3 walkthroughs/triangle_speedup.py
"""

from topospeed.checkers import check_t_independence
from topospeed.demos import BUILTIN_MODELS, BUILTIN_TASKS, example_facet
from topospeed.protocol import NAME_AWARE
from topospeed.solver import solve
from topospeed.speedup import beta_one_round, build_speedup_task, render_table

task = BUILTIN_TASKS["fig2"]()
model = BUILTIN_MODELS["c3"]()

for t in (0, 1):
    print(f"solvable in {t} rounds:", solve(task, model, t, NAME_AWARE).status)
print("independence after 0 rounds:", check_t_independence(task.I, model, 0).verdict)

speedup = build_speedup_task(task, model)
b = speedup.builder
print("vertex values per process:", b.stats["vertex_values"])
print("output facets of the speedup task:", len(speedup.O.facets))
print("speedup task in 0 rounds:", solve(speedup, model, 0, NAME_AWARE).status)

facet = example_facet(b, "R", "G")
for i in sorted(facet):
    print(f"process {i}")
    print(render_table(facet[i]))

# one round of exchanging tables turns them into colours
sigma = frozenset({(1, "B"), (2, "R"), (3, "G")})
out = beta_one_round(task, model, facet, sigma, builder=b)
print("completion round:", out.outputs, "valid" if out.valid else "INVALID")
