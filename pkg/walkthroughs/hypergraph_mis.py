"""MIS on a path of hyperedges: locally but not edge checkable.

Relabelling outputs with the neighbourhood they were checked against makes
the task checkable one hyperedge at a time.

    python3 walkthroughs/hypergraph_mis.py
"""

from topospeed.checkers import (check_edge_checkability, check_local_checkability,
                                ld_to_edge_transform)
from topospeed.demos import BUILTIN_MODELS, BUILTIN_TASKS, ld_roundtrip

task = BUILTIN_TASKS["mis_path5"]()
model = BUILTIN_MODELS["path5"]()

print(check_local_checkability(task, model).render())
print(check_edge_checkability(task, model).render())

tr = ld_to_edge_transform(task, model)
print("transformed output facets:", len(tr.task.O.facets))
print(check_edge_checkability(tr.task, model).render())

ok, lines = ld_roundtrip(tr)
print("\n".join(lines))
print("round trip", "valid" if ok else "INVALID")
