"""Solvability, speedup tasks and checkability for round-based distributed models.

Complexes are chromatic: vertices are ``(name, value)`` pairs, simplices are
frozensets of vertices.  Modules follow the data flow: complexes and models,
the protocol complex, tasks, the solver, property checkers and the speedup
construction; ``cli`` ties them together.
"""

__version__ = "0.1.0"
