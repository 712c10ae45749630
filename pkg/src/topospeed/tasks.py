"""Tasks (I, O, Delta), built-in task families and the task file format.

Delta is stored extensionally: a dict from every simplex of I to the
frozenset of allowed output simplices.  Built-ins whose description only
concerns facets derive the face images by restriction (see
:func:`restrict_delta`); the derivation is kept in ``task.notes``.
"""

from itertools import permutations, product

from .complexes import (Complex, format_simplex, make_simplex, maximal, names, pi_restrict,
                        pseudosphere, simplex_key)
from .errors import BadParams, IdSpaceTooSmall, ParseError, SemanticError
from .models import build_model, cycle, two_stars
from .terms import TermReader, format_term, sorted_terms


class TaskSpec:
    """A task: input complex, output complex and the input/output relation."""

    def __init__(self, I, O, delta, name="task", params=None, notes=()):
        self.I = I
        self.O = O
        self.delta = {s: frozenset(v) for s, v in delta.items()}
        self.name = name
        self.params = params or {}
        self.notes = tuple(notes)

    @property
    def n(self):
        return max(self.I.n, self.O.n)

    def delta_of(self, sigma):
        return self.delta.get(sigma, frozenset())

    def allows(self, sigma, tau):
        return tau in self.delta_of(sigma)

    def __eq__(self, other):
        return (isinstance(other, TaskSpec) and self.I == other.I and
                self.O == other.O and self.delta == other.delta)

    def __hash__(self):
        return hash((self.I, self.O))

    def __repr__(self):
        return (f"TaskSpec({self.name}, n={self.n}, input facets={len(self.I.facets)}, "
                f"output facets={len(self.O.facets)})")

    def serialize(self):
        return serialize_task(self)


def restrict_delta(I, facet_delta):
    """Extend a facet-level Delta to every simplex of I by restriction.

    Delta(rho) is the union, over facets sigma containing rho, of the
    projections of Delta(sigma) onto the names of rho.
    """
    delta = {}
    for rho in I.sorted_simplices():
        keep = names(rho)
        out = set()
        for sigma in I.facets:
            if rho <= sigma:
                out.update(pi_restrict(tau, keep) for tau in facet_delta.get(sigma, ()))
        delta[rho] = frozenset(out)
    return delta


def same_names_delta(I, O, accept=None):
    """Delta(sigma) = simplices of O on name(sigma), optionally filtered."""
    by_names = {}
    for tau in O.simplices:
        by_names.setdefault(names(tau), []).append(tau)
    delta = {}
    for sigma in I.sorted_simplices():
        cands = by_names.get(names(sigma), [])
        delta[sigma] = frozenset(t for t in cands if accept is None or accept(sigma, t))
    return delta


# -- validation ---------------------------------------------------------------

class ValidationReport:
    def __init__(self):
        self.violations = []
        self.notes = []

    @property
    def ok(self):
        return not self.violations

    def add(self, kind, detail):
        self.violations.append((kind, detail))

    def __repr__(self):
        return f"ValidationReport(ok={self.ok}, violations={len(self.violations)})"

    def render(self):
        lines = ["VALID" if self.ok else "INVALID"]
        lines += [f"violation {k}: {d}" for k, d in self.violations]
        lines += [f"note: {d}" for d in self.notes]
        return "\n".join(lines) + "\n"


def validate_task(task, model=None):
    """Report every violated task invariant (never raises)."""
    rep = ValidationReport()
    n = task.n
    for label, cx in (("input", task.I), ("output", task.O)):
        if cx.is_empty():
            rep.add("purity", f"{label} complex is empty")
        elif not cx.is_pure() or cx.dim != n - 1:
            rep.add("purity", f"{label} complex is not pure of dimension {n - 1}")
    try:
        in_simplices = task.I.simplices
    except Exception as exc:  # too large to enumerate
        rep.add("size", str(exc))
        return rep
    for sigma in sorted(task.delta, key=simplex_key):
        if sigma not in in_simplices:
            rep.add("dangling", f"Delta given on {format_simplex(sigma)} which is not in I")
    for sigma in sorted(in_simplices, key=lambda s: (len(s), simplex_key(s))):
        if sigma not in task.delta:
            rep.add("missing-delta", f"no Delta image for {format_simplex(sigma)}")
            continue
        for tau in sorted(task.delta[sigma], key=simplex_key):
            if names(tau) != names(sigma):
                rep.add("name-preservation",
                        f"{format_simplex(tau)} in Delta({format_simplex(sigma)})")
            elif tau not in task.O:
                rep.add("output-membership",
                        f"{format_simplex(tau)} in Delta({format_simplex(sigma)}) is not in O")
    if model is not None:
        closed = set(model.closed_simplices())
        for sigma in sorted(in_simplices, key=lambda s: (len(s), simplex_key(s))):
            if task.delta_of(sigma):
                continue
            if names(sigma) in closed:
                rep.add("empty-closed", f"Delta({format_simplex(sigma)}) is empty")
            else:
                rep.notes.append(f"open face {format_simplex(sigma)} has an empty image")
    rep.notes.extend(task.notes)
    return rep


# -- built-in tasks -----------------------------------------------------------

def _check_n(n, low=1):
    if not isinstance(n, int) or n < low:
        raise BadParams(f"n must be an integer >= {low}, got {n!r}")


def consensus(n=2, values=(0, 1)):
    """Every participant decides one common value proposed by a participant."""
    _check_n(n)
    values = sorted_terms(set(values))
    if not values:
        raise BadParams("consensus needs at least one value")
    I = pseudosphere(n, values)
    O = Complex([frozenset((i, x) for i in range(1, n + 1)) for x in values], n=n)
    delta = {}
    for sigma in I.sorted_simplices():
        proposed = {x for _, x in sigma}
        delta[sigma] = frozenset(frozenset((i, x) for i in names(sigma)) for x in proposed)
    return TaskSpec(I, O, delta, "consensus", {"n": n, "values": values})


def m_k_renaming(n, m, k):
    """Distinct ids in [0, m) must be renamed to distinct values in [0, k)."""
    _check_n(n)
    if not (isinstance(m, int) and isinstance(k, int) and m >= k >= n):
        raise BadParams(f"renaming needs m >= k >= n, got m={m}, k={k}, n={n}")
    everyone = range(1, n + 1)
    I = Complex([frozenset(zip(everyone, ids)) for ids in permutations(range(m), n)], n=n)
    O = Complex([frozenset(zip(everyone, ys)) for ys in permutations(range(k), n)], n=n)
    delta = same_names_delta(I, O)
    return TaskSpec(I, O, delta, "renaming", {"n": n, "m": m, "k": k})


def perfect_renaming(n=2):
    """Ids in [0, n] renamed to distinct values in [0, n)."""
    task = m_k_renaming(n, n + 1, n)
    task.name = "perfect_renaming"
    task.params = {"n": n}
    return task


def _proper(assign, edges):
    return all(assign[u] != assign[v] for u, v in edges if u in assign and v in assign)


def _colorings(n, edges, colors):
    everyone = range(1, n + 1)
    out = []
    for combo in product(colors, repeat=n):
        a = dict(zip(everyone, combo))
        if _proper(a, edges):
            out.append(frozenset(a.items()))
    return out


def k_coloring(n, edges, k, inputs=None):
    """Proper k-coloring of graph G; outputs are colours 1..k.

    ``inputs`` is an optional input complex; by default there are no inputs
    (every process holds 0).  Delta(sigma) is every output simplex on the
    names of sigma.
    """
    _check_n(n)
    if k < 1:
        raise BadParams("k must be positive")
    edges = [tuple(e) for e in edges]
    I = inputs if inputs is not None else pseudosphere(n, [0])
    facets = _colorings(n, edges, range(1, k + 1))
    if not facets:
        raise BadParams(f"the graph has no proper {k}-coloring")
    O = Complex(maximal(facets), n=n)
    delta = same_names_delta(I, O)
    return TaskSpec(I, O, delta, "coloring", {"n": n, "edges": sorted(edges), "k": k})


def fig2():
    """Three processes on the directed triangle 1 -> 2 -> 3 -> 1.

    p1 holds B, p2 and p3 hold R or G; outputs form a proper 3-coloring with
    p1 blue, and p2 must output its own input colour.
    """
    I = Complex([frozenset({(1, "B"), (2, a), (3, b)})
                 for a in ("G", "R") for b in ("G", "R")], n=3)
    O = Complex([frozenset({(1, "B"), (2, a), (3, b)})
                 for a in ("G", "R") for b in ("G", "R") if a != b], n=3)
    facet_delta = {}
    for sigma in I.facets:
        x2 = dict(sigma)[2]
        facet_delta[sigma] = [tau for tau in O.facets if dict(tau)[2] == x2]
    delta = restrict_delta(I, facet_delta)
    return TaskSpec(I, O, delta, "fig2", {},
                    notes=["face images derived by restriction of facet images"])


def two_star_coloring(k=3):
    """3-coloring on two stars sharing the edge {1, 2}, with 3-colored inputs."""
    if k < 1:
        raise BadParams("k must be positive")
    n = 2 * k
    edges = two_stars(k)
    I = Complex(_colorings(n, edges, (1, 2, 3)), n=n)
    task = k_coloring(n, edges, 3, inputs=I)
    task.name = "two_star_coloring"
    task.params = {"k": k}
    return task


def _gmis_ok(U, labels, hyperedges, caps, n):
    """Independence (within capacity) and maximality seen from inside U."""
    chosen = {i for i in U if labels[i] == 1}
    for h, cap in zip(hyperedges, caps):
        if h <= U and len(h & chosen) > cap:
            return False
    for v in U:
        if labels[v] == 1:
            continue
        mine = [(h, cap) for h, cap in zip(hyperedges, caps) if v in h]
        if not all(h <= U for h, _ in mine):
            continue
        if not any(len(h & chosen) == cap for h, cap in mine):
            return False
    return True


def gmis(n, hyperedges, thresholds=None):
    """Generalised maximal independent set on a hypergraph.

    A node set S is valid when |h & S| <= t_h for every hyperedge and no
    node outside S can be added.  Outputs are 0/1 membership bits.  On a
    name set U, a labelling is allowed when it violates no capacity of a
    hyperedge inside U and every node of U whose hyperedges all lie inside
    U is either chosen or blocked.
    """
    _check_n(n)
    hs = [frozenset(h) for h in hyperedges]
    if not hs or any(len(h) < 1 or not h <= frozenset(range(1, n + 1)) for h in hs):
        raise BadParams("hyperedges must be non-empty subsets of 1..n")
    caps = list(thresholds) if thresholds is not None else [1] * len(hs)
    if len(caps) != len(hs) or any(c < 0 for c in caps):
        raise BadParams("one non-negative threshold per hyperedge")
    I = pseudosphere(n, [0])
    O = pseudosphere(n, [0, 1])
    delta = {}
    for sigma in I.sorted_simplices():
        U = names(sigma)
        allowed = []
        for bits in product((0, 1), repeat=len(U)):
            labels = dict(zip(sorted(U), bits))
            if _gmis_ok(U, labels, hs, caps, n):
                allowed.append(frozenset(labels.items()))
        delta[sigma] = frozenset(allowed)
    params = {"n": n, "hyperedges": sorted(sorted(h) for h in hs), "thresholds": caps}
    return TaskSpec(I, O, delta, "gmis", params)


def mis(n, edges):
    """Standard MIS (1 = in the set) on a graph."""
    task = gmis(n, [frozenset(e) for e in edges], [1] * len(edges))
    task.name = "mis"
    task.params = {"n": n, "edges": sorted(tuple(sorted(e)) for e in edges)}
    return task


def trivial(n=2, values=(0,)):
    """Any output on the right names is allowed."""
    _check_n(n)
    I = pseudosphere(n, [0])
    O = pseudosphere(n, values)
    return TaskSpec(I, O, same_names_delta(I, O), "trivial", {"n": n})


def builtin_task(name, **params):
    """Construct a built-in task by name."""
    try:
        if name == "consensus":
            return consensus(params.get("n", 2), params.get("values", (0, 1)))
        if name == "perfect_renaming":
            return perfect_renaming(params.get("n", 2))
        if name == "m_k_renaming":
            return m_k_renaming(params["n"], params["m"], params["k"])
        if name == "k_coloring":
            return k_coloring(params["n"], params["edges"], params["k"])
        if name == "fig2":
            return fig2()
        if name == "two_star_coloring":
            return two_star_coloring(params.get("k", 3))
        if name == "gmis":
            return gmis(params["n"], params["hyperedges"], params.get("thresholds"))
        if name == "mis":
            return mis(params["n"], params["edges"])
        if name == "mis_c4":
            return mis(4, cycle(4))
        if name == "trivial":
            return trivial(params.get("n", 2), params.get("values", (0,)))
    except KeyError as exc:
        raise BadParams(f"missing parameter {exc}") from None
    raise BadParams(f"unknown task {name!r}")


# -- identifiers --------------------------------------------------------------

def augment_with_ids(task, N):
    """Give every process a distinct id in [1, N] as part of its input.

    Inputs become pairs ``(id, x)``; Delta' forwards to the base Delta on the
    second components.
    """
    n = task.n
    if N < n:
        raise IdSpaceTooSmall(f"need N >= n = {n}, got {N}")
    facets = []
    for sigma in task.I.facets:
        ns = sorted(names(sigma))
        base = dict(sigma)
        for ids in permutations(range(1, N + 1), len(ns)):
            facets.append(frozenset((i, (ident, base[i])) for i, ident in zip(ns, ids)))
    I2 = Complex(maximal(facets), n=task.I.n)
    delta = {}
    for sigma in I2.sorted_simplices():
        base = frozenset((i, v[1]) for i, v in sigma)
        delta[sigma] = task.delta_of(base)
    params = dict(task.params)
    params["ids"] = N
    return TaskSpec(I2, task.O, delta, task.name + "+ids", params, task.notes)


# -- file format ----------------------------------------------------------------

SECTIONS = ("VALUES", "INPUT_FACETS", "OUTPUT_FACETS", "DELTA")


def _format_values(vals):
    return " ".join(format_term(v) for v in sorted_terms(vals))


def serialize_task(task):
    """Canonical text form; :func:`parse_task_file` is its inverse."""
    in_vals = {x for v in task.I.vertices() for x in [v[1]]}
    out_vals = {y for v in task.O.vertices() for y in [v[1]]}
    lines = [f"TASK {task.name}", f"N {task.n}", "VALUES",
             f"inputs: {_format_values(in_vals)}", f"outputs: {_format_values(out_vals)}",
             "INPUT_FACETS"]
    lines += [format_simplex(f) for f in task.I.facets]
    lines.append("OUTPUT_FACETS")
    lines += [format_simplex(f) for f in task.O.facets]
    lines.append("DELTA")
    for sigma in task.I.sorted_simplices():
        imgs = sorted(task.delta_of(sigma), key=simplex_key)
        lines.append(format_simplex(sigma) + " -> " + " ; ".join(format_simplex(t) for t in imgs))
    return "\n".join(lines) + "\n"


def _read_simplex(reader):
    """Read ``[i:x, j:y, ...]``; names must be strictly increasing."""
    reader.expect("[")
    verts = []
    if reader.peek() == "]":
        reader.error("empty simplex")
    while True:
        reader.skip()
        start = reader.pos
        name = reader.read_term()
        if not isinstance(name, int):
            reader.pos = start
            reader.error("process name must be an integer")
        reader.expect(":")
        value = reader.read_term()
        if verts and name <= verts[-1][0]:
            reader.pos = start
            if name == verts[-1][0]:
                raise SemanticError(f"duplicate name {name} in a simplex (line {reader.line})")
            reader.error("vertices must be sorted by name")
        verts.append((name, value))
        ch = reader.peek()
        if ch == ",":
            reader.pos += 1
            continue
        if ch == "]":
            reader.pos += 1
            return verts
        reader.error("expected ',' or ']'")


def _clean(lines):
    for no, raw in enumerate(lines, 1):
        text = raw.split("#", 1)[0].rstrip()
        if text.strip():
            yield no, text


def parse_task_file(text):
    """Parse the task format written by :func:`serialize_task`."""
    name = "task"
    n = None
    ids = None
    section = None
    values = {}
    in_facets, out_facets, delta_lines = [], [], []
    for no, line in _clean(text.splitlines()):
        head = line.strip()
        word = head.split()[0]
        if word == "TASK":
            name = head[4:].strip() or "task"
            continue
        if word == "N" and section is None:
            n = _int_arg(head, no)
            continue
        if word == "IDS":
            ids = _int_arg(head, no)
            continue
        if head in SECTIONS:
            section = head
            continue
        if section == "VALUES":
            key, _, rest = head.partition(":")
            if key not in ("inputs", "outputs"):
                raise ParseError("expected 'inputs:' or 'outputs:'", no, 1)
            offset = line.index(":") + 1
            reader = TermReader(line[offset:], no, offset)
            vals = []
            while not reader.at_end():
                vals.append(reader.read_term())
            values[key] = set(vals)
        elif section == "INPUT_FACETS":
            in_facets.append((no, _simplex_line(line, no)))
        elif section == "OUTPUT_FACETS":
            out_facets.append((no, _simplex_line(line, no)))
        elif section == "DELTA":
            delta_lines.append((no, line))
        else:
            raise ParseError(f"unexpected line outside a section: {head!r}", no, 1)
    if n is None:
        raise ParseError("missing 'N' line", 1, 1)
    I = _build_complex(in_facets, n, values.get("inputs"), "input")
    O = _build_complex(out_facets, n, values.get("outputs"), "output")
    in_simplices = I.simplices
    delta = {}
    for no, line in delta_lines:
        reader = TermReader(line, no)
        sigma = frozenset(_read_simplex(reader))
        if sigma not in in_simplices:
            raise SemanticError(f"line {no}: {format_simplex(sigma)} is not a simplex of I")
        if sigma in delta:
            raise SemanticError(f"line {no}: Delta given twice for {format_simplex(sigma)}")
        reader.expect("-")
        reader.expect(">")
        imgs = []
        while not reader.at_end():
            tau = frozenset(_read_simplex(reader))
            if names(tau) != names(sigma):
                raise SemanticError(f"line {no}: {format_simplex(tau)} changes the names")
            if tau not in O:
                raise SemanticError(f"line {no}: {format_simplex(tau)} is not in O")
            imgs.append(tau)
            if reader.peek() == ";":
                reader.pos += 1
            elif not reader.at_end():
                reader.error("expected ';' between output simplices")
        delta[sigma] = frozenset(imgs)
    missing = [s for s in I.sorted_simplices() if s not in delta]
    if missing:
        raise SemanticError(f"no Delta image for {format_simplex(missing[0])}")
    task = TaskSpec(I, O, delta, name, {"n": n})
    if ids is not None:
        task = augment_with_ids(task, ids)
    return task


def _int_arg(head, no):
    parts = head.split()
    if len(parts) != 2 or not parts[1].lstrip("-").isdigit():
        raise ParseError(f"expected '{parts[0]} <integer>'", no, len(parts[0]) + 2)
    return int(parts[1])


def _simplex_line(line, no):
    reader = TermReader(line, no)
    verts = _read_simplex(reader)
    if not reader.at_end():
        reader.error("trailing characters after simplex")
    return verts


def _build_complex(rows, n, declared, label):
    facets = []
    for no, verts in rows:
        for i, x in verts:
            if not 1 <= i <= n:
                raise SemanticError(f"line {no}: name {i} outside 1..{n}")
            if declared is not None and x not in declared:
                raise SemanticError(f"line {no}: {label} value {format_term(x)} not declared")
        facets.append(make_simplex(verts))
    return Complex(maximal(facets), n=n)


def parse_model_file(text):
    """Parse the model format written by :func:`models.serialize_model`."""
    kind = None
    n = None
    f = None
    directed = False
    edges, graphs, hyperedges, facets = [], [], [], []
    block = None
    for no, line in _clean(text.splitlines()):
        head = line.strip()
        parts = head.split()
        word = parts[0]
        if word == "MODEL":
            if len(parts) != 2:
                raise ParseError("expected 'MODEL <kind>'", no, 1)
            kind = parts[1]
        elif word == "N":
            n = _int_arg(head, no)
        elif word == "F":
            f = _int_arg(head, no)
        elif word == "DIRECTED":
            directed = True
        elif word in ("EDGES", "HYPEREDGES"):
            block = word
        elif word == "GRAPH":
            block = "GRAPH"
            graphs.append([])
        elif word == "FACET":
            block = "FACET"
            facets.append({})
        elif block in ("EDGES", "GRAPH"):
            pair = _ints(parts, no)
            if len(pair) != 2:
                raise ParseError("an edge is two integers", no, 1)
            (edges if block == "EDGES" else graphs[-1]).append(tuple(pair))
        elif block == "HYPEREDGES":
            hyperedges.append(_ints(parts, no))
        elif block == "FACET":
            key, _, rest = head.partition(":")
            if not key.strip().isdigit():
                raise ParseError("expected '<name>: {..} {..}'", no, 1)
            i = int(key)
            if i in facets[-1]:
                raise SemanticError(f"line {no}: duplicate name {i} in a facet")
            offset = line.index(":") + 1
            reader = TermReader(line[offset:], no, offset)
            chans = []
            while not reader.at_end():
                e = reader.read_term()
                if not isinstance(e, frozenset) or not all(isinstance(x, int) for x in e):
                    reader.error("a channel is a set of integers")
                chans.append(e)
            facets[-1][i] = chans
        else:
            raise ParseError(f"unexpected line {head!r}", no, 1)
    if kind is None or n is None:
        raise ParseError("a model file needs 'MODEL <kind>' and 'N <n>' lines", 1, 1)
    params = {"n": n}
    if kind == "f_resilient":
        params["f"] = f
    elif kind in ("local", "wf_local"):
        params["edges"] = edges
        params["directed"] = directed
    elif kind == "dyn":
        params["family"] = graphs
        params["directed"] = directed
    elif kind == "h_local":
        params["hyperedges"] = hyperedges
    elif kind == "explicit":
        params["facets"] = facets
    if kind == "wf_local":
        params.pop("directed")
    try:
        return build_model(kind, **params)
    except BadParams as exc:
        raise SemanticError(str(exc)) from None


def _ints(parts, no):
    out = []
    for p in parts:
        if not p.lstrip("-").isdigit():
            raise ParseError(f"expected an integer, got {p!r}", no, 1)
        out.append(int(p))
    return out
