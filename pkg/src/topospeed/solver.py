"""Round-t solvability as a search for a simplicial decision map.

A t-round algorithm is a map delta from the vertices of P^(t) to O that is
chromatic, simplicial and agrees with Delta on closed input simplices.  In
anonymous mode equal views at different names form one variable, so
name-independence is built into the search space.

The search itself is a small table-constraint solver (:class:`TableCSP`)
with generalised arc consistency and a most-constrained-first variable
order; ties and values are always taken in canonical order.
"""

import time

from .complexes import format_simplex, names, ordered, simplex_key, vertex_key
from .errors import BudgetExceeded, PartialMap
from .protocol import ANONYMOUS, protocol_complex
from .terms import format_term, term_key

SOLVABLE = "SOLVABLE"
UNSOLVABLE = "UNSOLVABLE"
BUDGET_EXCEEDED = "BUDGET_EXCEEDED"

DEFAULT_NODE_BUDGET = 200_000


class TableCSP:
    """Finite CSP whose constraints are explicit tables of allowed tuples.

    ``domains`` is a list of value lists (already in canonical order);
    each constraint is ``(scope, tuples)`` with ``scope`` a tuple of distinct
    variable indexes and ``tuples`` an iterable of value tuples.
    """

    def __init__(self, domains, constraints, labels=None):
        self.domains = [list(d) for d in domains]
        self.labels = labels or list(range(len(domains)))
        merged = {}
        for scope, tuples in constraints:
            scope, tuples = _normalise(scope, tuples)
            if scope in merged:
                merged[scope] &= tuples
            else:
                merged[scope] = set(tuples)
        self.constraints = [(s, merged[s]) for s in sorted(merged)]
        self.watch = [[] for _ in domains]
        for ci, (scope, _) in enumerate(self.constraints):
            for v in scope:
                self.watch[v].append(ci)
        self.stats = {"variables": len(domains), "constraints": len(self.constraints),
                      "nodes": 0, "backtracks": 0, "revisions": 0}

    def _revise(self, doms, tables, queue):
        queued = set(queue)
        while queue:
            ci = queue.pop(0)
            queued.discard(ci)
            scope, _ = self.constraints[ci]
            self.stats["revisions"] += 1
            live = [tup for tup in tables[ci]
                    if all(tup[k] in doms[v] for k, v in enumerate(scope))]
            tables[ci] = live
            if not live:
                return False
            for k, v in enumerate(scope):
                support = {tup[k] for tup in live}
                if len(support) < len(doms[v]):
                    doms[v] = doms[v] & support
                    for cj in self.watch[v]:
                        if cj != ci and cj not in queued:
                            queue.append(cj)
                            queued.add(cj)
        return True

    def solve(self, node_budget=DEFAULT_NODE_BUDGET, time_limit=None):
        """Canonically first solution (list of values) or None."""
        start = time.monotonic()
        doms = [set(d) for d in self.domains]
        if any(not d for d in doms):
            return None
        tables = [list(sorted(t, key=term_key)) for _, t in self.constraints]
        if not self._revise(doms, tables, list(range(len(self.constraints)))):
            return None
        order = {v: [x for x in self.domains[v]] for v in range(len(doms))}
        degree = [len(w) for w in self.watch]

        def pick(doms):
            best = None
            for v, d in enumerate(doms):
                if len(d) <= 1:
                    continue
                key = (len(d), -degree[v], v)
                if best is None or key < best[0]:
                    best = (key, v)
            return None if best is None else best[1]

        def search(doms, tables):
            self.stats["nodes"] += 1
            if self.stats["nodes"] > node_budget:
                raise BudgetExceeded("search node budget exhausted", dict(self.stats))
            if time_limit is not None and time.monotonic() - start > time_limit:
                raise BudgetExceeded("search time limit reached", dict(self.stats))
            v = pick(doms)
            if v is None:
                return [next(iter(d)) for d in doms]
            for x in order[v]:
                if x not in doms[v]:
                    continue
                nd = list(doms)
                nd[v] = {x}
                nt = list(tables)
                if self._revise(nd, nt, list(self.watch[v])):
                    found = search(nd, nt)
                    if found is not None:
                        return found
                self.stats["backtracks"] += 1
            return None

        return search(doms, tables)


def _normalise(scope, tuples):
    """Merge repeated variables of a scope (their values must coincide)."""
    scope = tuple(scope)
    if len(set(scope)) == len(scope):
        order = sorted(range(len(scope)), key=lambda k: scope[k])
        return (tuple(scope[k] for k in order),
                {tuple(t[k] for k in order) for t in tuples})
    first = {}
    for k, v in enumerate(scope):
        first.setdefault(v, k)
    keep = sorted(first, key=lambda v: v)
    out = set()
    for t in tuples:
        if all(t[k] == t[first[v]] for k, v in enumerate(scope)):
            out.add(tuple(t[first[v]] for v in keep))
    return tuple(keep), out


# -- decision maps ---------------------------------------------------------------

class SimplicialMapDelta:
    """A decision map: (name, view) -> output value."""

    def __init__(self, assignment, mode=ANONYMOUS):
        self.assignment = dict(assignment)
        self.mode = mode

    def __call__(self, i, view):
        return self.assignment[(i, view)]

    def image(self, simplex):
        return frozenset((i, self.assignment[(i, v)]) for i, v in simplex)

    def __eq__(self, other):
        return (isinstance(other, SimplicialMapDelta) and self.mode == other.mode and
                self.assignment == other.assignment)

    def __hash__(self):
        return hash(frozenset(self.assignment.items()))

    def __len__(self):
        return len(self.assignment)

    def items(self):
        return sorted(self.assignment.items(), key=lambda kv: vertex_key(kv[0]))

    def serialize(self):
        return "".join(f"{i} {format_term(v)} -> {format_term(y)}\n"
                       for (i, v), y in self.items())


class SolveResult:
    def __init__(self, status, delta=None, stats=None, protocol=None, t=0, mode=ANONYMOUS):
        self.status = status
        self.delta = delta
        self.stats = stats or {}
        self.protocol = protocol
        self.t = t
        self.mode = mode

    @property
    def solvable(self):
        return self.status == SOLVABLE

    def __repr__(self):
        return f"SolveResult({self.status}, t={self.t}, mode={self.mode})"


def vertex_classes(vertices, mode):
    """Group protocol vertices into search variables."""
    key = (lambda v: v[1]) if mode == ANONYMOUS else (lambda v: v)
    classes = {}
    for v in vertices:
        classes.setdefault(key(v), []).append(v)
    keys = sorted(classes, key=term_key)
    return keys, classes


def _output_values(O, name):
    return O.values(name)


def build_csp(task, P, mode):
    """CSP whose solutions are exactly the valid decision maps on P."""
    verts = P.complex.vertices()
    keys, classes = vertex_classes(verts, mode)
    index = {}
    domains = []
    for k, key in enumerate(keys):
        dom = None
        for v in classes[key]:
            vals = set(_output_values(task.O, v[0]))
            dom = vals if dom is None else dom & vals
            index[v] = k
        domains.append(sorted(dom, key=term_key))
    by_names = {}
    for tau in task.O.simplices:
        by_names.setdefault(names(tau), []).append(tau)
    constraints = []
    table_cache = {}

    def table(simplex, allowed):
        ns = tuple(v[0] for v in ordered(simplex))
        return [tuple(dict(a)[i] for i in ns) for a in allowed]

    for f in P.complex.facets:
        key = names(f)
        if key not in table_cache:
            table_cache[key] = table(f, by_names.get(key, []))
        scope = tuple(index[v] for v in ordered(f))
        constraints.append((scope, table_cache[key]))
    for tau in sorted(P.provenance, key=simplex_key):
        allowed = None
        for sigma0 in P.provenance[tau]:
            imgs = task.delta_of(sigma0)
            allowed = set(imgs) if allowed is None else allowed & imgs
        scope = tuple(index[v] for v in ordered(tau))
        constraints.append((scope, table(tau, allowed or [])))
    return TableCSP(domains, constraints, keys), keys, classes


def solve(task, model, t, mode=ANONYMOUS, node_budget=DEFAULT_NODE_BUDGET,
          time_limit=None, protocol=None):
    """Decide whether ``task`` is solvable in ``t`` rounds of ``model``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    P = protocol if protocol is not None else protocol_complex(task.I, model, t, mode)
    csp, keys, classes = build_csp(task, P, mode)
    try:
        sol = csp.solve(node_budget, time_limit)
    except BudgetExceeded as exc:
        return SolveResult(BUDGET_EXCEEDED, None, exc.stats, P, t, mode)
    stats = dict(csp.stats)
    stats["protocol_facets"] = len(P.complex.facets)
    stats["protocol_vertices"] = len(P.complex.vertices())
    if sol is None:
        return SolveResult(UNSOLVABLE, None, stats, P, t, mode)
    assignment = {}
    for k, key in enumerate(keys):
        for v in classes[key]:
            assignment[v] = sol[k]
    return SolveResult(SOLVABLE, SimplicialMapDelta(assignment, mode), stats, P, t, mode)


# -- verification ----------------------------------------------------------------

class MapReport:
    CATEGORIES = ("name-preservation", "name-independence", "simpliciality", "agreement")

    def __init__(self):
        self.failures = {}

    def fail(self, category, detail):
        self.failures.setdefault(category, detail)

    @property
    def valid(self):
        return not self.failures

    def render(self):
        if self.valid:
            return "valid\n"
        return "".join(f"{c}: {self.failures[c]}\n" for c in self.CATEGORIES
                       if c in self.failures)

    def __repr__(self):
        return f"MapReport(valid={self.valid})"


def verify_map(delta, task, model, t, protocol=None):
    """Check a decision map category by category; first witness per category."""
    P = protocol if protocol is not None else protocol_complex(task.I, model, t, delta.mode)
    rep = MapReport()
    verts = P.complex.vertices()
    missing = [v for v in verts if v not in delta.assignment]
    if missing:
        i, view = missing[0]
        raise PartialMap(f"no output for vertex {i}:{format_term(view)}")
    for (i, view), y in delta.items():
        if y not in set(task.O.values(i)):
            rep.fail("name-preservation", f"({i}, {format_term(y)}) is not a vertex of O")
            break
    if delta.mode == ANONYMOUS:
        seen = {}
        for (i, view), y in delta.items():
            if view in seen and seen[view][1] != y:
                j, y0 = seen[view]
                rep.fail("name-independence",
                         f"view {format_term(view)} gets {format_term(y0)} at {j} "
                         f"but {format_term(y)} at {i}")
                break
            seen.setdefault(view, (i, y))
    for f in P.complex.facets:
        img = delta.image(f)
        if img not in task.O:
            rep.fail("simpliciality", f"{format_simplex(f)} maps to {format_simplex(img)}")
            break
    for tau in sorted(P.provenance, key=lambda s: (len(s), simplex_key(s))):
        img = delta.image(tau)
        bad = [s for s in sorted(P.provenance[tau], key=simplex_key)
               if not task.allows(s, img)]
        if bad:
            rep.fail("agreement", f"{format_simplex(tau)} maps to {format_simplex(img)} "
                                  f"outside Delta({format_simplex(bad[0])})")
            break
    return rep


def extract_algorithm(delta):
    """Output function (name, view) -> value; ignores names when anonymous."""
    if delta.mode == ANONYMOUS:
        by_view = {view: y for (i, view), y in delta.items()}

        def run(i, view):
            return by_view[view]
    else:
        table = dict(delta.assignment)

        def run(i, view):
            return table[(i, view)]
    return run
