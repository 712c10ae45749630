"""Communication models.

A model on ``n`` processes is a pure ``(n-1)``-dimensional complex whose
vertices are ``(i, E_i)``: ``E_i`` is the frozenset of channels through which
process ``i`` receives during one round.  A channel is a frozenset of process
names containing ``i``; the self-loop ``{i}`` is always present.

All built-in models use the uniform encoding: a pairwise link from ``j`` to
``i`` is the channel ``{i, j}``, hyperedges are channels as they are.
"""

from itertools import chain, combinations, product

from .complexes import Complex, format_simplex, maximal, names
from .errors import BadParams, NotInModel, NotPure
from .terms import format_term, term_key

KINDS = ("wait_free", "f_resilient", "local", "h_local", "dyn", "wf_local", "explicit")


def channel(*members):
    return frozenset(members)


def channel_label(e, owner=None):
    """Stable channel identifier; the owner's self-loop is labelled ``self``."""
    if owner is not None and e == frozenset((owner,)):
        return "self"
    return tuple(sorted(e))


def pattern_label(E, owner):
    return tuple(sorted((channel_label(e, owner) for e in E), key=term_key))


def receives_from(E):
    """J_i: the union of the channels of a pattern."""
    return frozenset().union(*E)


def pattern_from_set(i, J):
    """Uniform encoding of 'i receives from every j in J'."""
    return frozenset([frozenset((i,))] + [frozenset((i, j)) for j in J if j != i])


def _subsets(items):
    items = sorted(items)
    return chain.from_iterable(combinations(items, k) for k in range(len(items) + 1))


class CommModel:
    """A communication model; immutable after construction."""

    def __init__(self, complex_, n, kind="explicit", params=None):
        self.complex = complex_
        self.n = n
        self.kind = kind
        self.params = params or {}
        self._closed_by_names = None
        self._validate()

    def _validate(self):
        if self.complex.is_empty():
            raise NotPure("a model needs at least one facet")
        for f in self.complex.facets:
            if names(f) != frozenset(range(1, self.n + 1)):
                raise NotPure(f"facet {format_simplex(f)} does not cover 1..{self.n}")
            for i, E in f:
                if frozenset((i,)) not in E:
                    raise NotPure(f"process {i} lacks its self-loop")
                for e in E:
                    if i not in e:
                        raise NotPure(f"channel {sorted(e)} of {i} does not contain {i}")
                    if not e <= frozenset(range(1, self.n + 1)):
                        raise NotPure(f"channel {sorted(e)} leaves 1..{self.n}")

    # -- queries ----------------------------------------------------------
    def is_closed(self, simplex):
        if simplex not in self.complex:
            raise NotInModel(f"{format_simplex(simplex)} is not a simplex of the model")
        return _closed(simplex)

    def closed_simplices(self):
        if self._closed_by_names is None:
            table = {}
            for s in self.complex.sorted_simplices():
                if _closed(s):
                    table.setdefault(names(s), []).append(s)
            self._closed_by_names = table
        return self._closed_by_names

    def closed_patterns(self, keep):
        return list(self.closed_simplices().get(frozenset(keep), []))

    def closed_name_sets(self):
        return sorted(self.closed_simplices(), key=lambda s: (len(s), sorted(s)))

    def all_closed(self):
        out = []
        for key in self.closed_name_sets():
            out.extend(self.closed_simplices()[key])
        return out

    def patterns_of(self, i):
        """Every channel set E_i of a model vertex named i, canonical order."""
        pats = {E for v in self.complex.vertices() if v[0] == i for E in [v[1]]}
        return sorted(pats, key=term_key)

    def channels_of(self, i):
        """Channels occurring anywhere in the model that contain i."""
        chans = set()
        for v in self.complex.vertices():
            for e in v[1]:
                if i in e:
                    chans.add(e)
        chans.add(frozenset((i,)))
        return sorted(chans, key=lambda e: (len(e), sorted(e)))

    def is_deterministic(self):
        return all(len(v) == 1 for v in self.closed_simplices().values())

    def __eq__(self, other):
        return isinstance(other, CommModel) and self.n == other.n and \
            self.complex == other.complex

    def __hash__(self):
        return hash((self.n, self.complex))

    def __repr__(self):
        return f"CommModel({self.kind}, n={self.n}, facets={len(self.complex.facets)})"

    def serialize(self):
        return serialize_model(self)


def _closed(simplex):
    union = frozenset()
    for _, E in simplex:
        union |= receives_from(E)
    return union == names(simplex)


def _from_facets(facets, n, kind, params):
    cx = Complex(maximal(facets), n=n)
    return CommModel(cx, n, kind, params)


def _check_n(n):
    if not isinstance(n, int) or n < 1:
        raise BadParams(f"n must be a positive integer, got {n!r}")


def _check_graph(n, edges, directed=False):
    out = []
    for e in edges:
        if len(e) != 2 or any(not (1 <= x <= n) for x in e) or e[0] == e[1]:
            raise BadParams(f"edge {e!r} is not a pair of distinct nodes in 1..{n}")
        out.append(tuple(e))
    return out


def closed_neighbourhood(n, edges, directed=False):
    """N_G[i] for every node; for directed graphs, in-neighbours."""
    nb = {i: {i} for i in range(1, n + 1)}
    for u, v in edges:
        nb[v].add(u)
        if not directed:
            nb[u].add(v)
    return {i: frozenset(s) for i, s in nb.items()}


def _snapshot_ok(J, check_size=None):
    idx = list(J)
    for a in idx:
        for b in idx:
            Ja, Jb = J[a], J[b]
            if not (Ja <= Jb or Jb <= Ja):
                return False
            if b in Ja and not Jb <= Ja:
                return False
    return True


def wait_free(n, f=None):
    """Iterated immediate snapshot on n processes (f-resilient when f given)."""
    _check_n(n)
    if f is not None and not (1 <= f <= n - 1):
        raise BadParams(f"f must lie in [1, n-1], got {f}")
    everyone = range(1, n + 1)
    per = []
    for i in everyone:
        opts = []
        for extra in _subsets([j for j in everyone if j != i]):
            J = frozenset((i,) + extra)
            if f is not None and len(J) < n - f:
                continue
            opts.append(J)
        per.append(opts)
    facets = []
    for combo in product(*per):
        J = dict(zip(everyone, combo))
        if _snapshot_ok(J):
            facets.append(frozenset((i, pattern_from_set(i, J[i])) for i in everyone))
    if not facets:
        raise BadParams("no legal communication pattern")
    kind = "wait_free" if f is None else "f_resilient"
    params = {"n": n} if f is None else {"n": n, "f": f}
    return _from_facets(facets, n, kind, params)


def f_resilient(n, f):
    if f is None:
        raise BadParams("f_resilient needs f")
    return wait_free(n, f)


def local(n, edges, directed=False):
    """Synchronous failure-free network: E_i = N_G[i]."""
    _check_n(n)
    edges = _check_graph(n, edges, directed)
    nb = closed_neighbourhood(n, edges, directed)
    facet = frozenset((i, pattern_from_set(i, nb[i])) for i in range(1, n + 1))
    params = {"n": n, "edges": sorted(edges), "directed": bool(directed)}
    return _from_facets([facet], n, "local", params)


def dyn(n, family, directed=False):
    """Dynamic network: each round follows one graph of the family."""
    _check_n(n)
    if not family:
        raise BadParams("the graph family is empty")
    facets = []
    graphs = []
    for edges in family:
        edges = _check_graph(n, edges, directed)
        graphs.append(sorted(edges))
        nb = closed_neighbourhood(n, edges, directed)
        facets.append(frozenset((i, pattern_from_set(i, nb[i])) for i in range(1, n + 1)))
    params = {"n": n, "family": graphs, "directed": bool(directed)}
    return _from_facets(facets, n, "dyn", params)


def h_local(n, hyperedges):
    """Hypergraph model: E_i = hyperedges containing i, plus the self-loop."""
    _check_n(n)
    hs = []
    for h in hyperedges:
        h = frozenset(h)
        if not h or any(not (1 <= x <= n) for x in h):
            raise BadParams(f"hyperedge {sorted(h)} is not a non-empty subset of 1..{n}")
        hs.append(h)
    facet = frozenset(
        (i, frozenset([frozenset((i,))] + [h for h in hs if i in h]))
        for i in range(1, n + 1))
    params = {"n": n, "hyperedges": sorted((sorted(h) for h in hs))}
    return _from_facets([facet], n, "h_local", params)


def _is_clique(U, adj):
    return all(b in adj[a] for a, b in combinations(U, 2))


def wf_local(n, edges):
    """Asynchronous wait-free variant of LOCAL on graph G."""
    _check_n(n)
    edges = _check_graph(n, edges)
    nb = closed_neighbourhood(n, edges)
    adj = {i: nb[i] - {i} for i in nb}
    everyone = list(range(1, n + 1))
    cliques = [U for k in range(1, n + 1) for U in combinations(everyone, k)
               if _is_clique(U, adj)]
    per = []
    for i in everyone:
        others = sorted(nb[i] - {i})
        per.append([frozenset((i,) + extra) for extra in _subsets(others)])
    facets = []
    for combo in product(*per):
        J = dict(zip(everyone, combo))
        ok = True
        for U in cliques:
            Us = frozenset(U)
            for a in U:
                for b in U:
                    Ja, Jb = J[a] & Us, J[b] & Us
                    if not (Ja <= Jb or Jb <= Ja):
                        ok = False
                    elif b in J[a] and not Jb <= J[a]:
                        ok = False
                    if not ok:
                        break
                if not ok:
                    break
            if not ok:
                break
        if ok:
            facets.append(frozenset((i, pattern_from_set(i, J[i])) for i in everyone))
    params = {"n": n, "edges": sorted(edges)}
    return _from_facets(facets, n, "wf_local", params)


def explicit(n, facet_list):
    """Model given by its facets; each facet maps names to channel sets."""
    _check_n(n)
    facets = []
    for f in facet_list:
        items = f.items() if isinstance(f, dict) else f
        verts = []
        for i, E in items:
            E = frozenset(frozenset(e) for e in E)
            verts.append((int(i), E))
        s = frozenset(verts)
        if len(names(s)) != len(s):
            raise NotPure("repeated process name in an explicit facet")
        facets.append(s)
    if not facets:
        raise NotPure("an explicit model needs at least one facet")
    return _from_facets(facets, n, "explicit", {"n": n})


def build_model(kind, **params):
    """Dispatch on the model kind; see the module docstring for kinds."""
    try:
        if kind == "wait_free":
            return wait_free(params["n"])
        if kind == "f_resilient":
            return f_resilient(params["n"], params.get("f"))
        if kind == "local":
            return local(params["n"], params.get("edges", []), params.get("directed", False))
        if kind == "dyn":
            return dyn(params["n"], params.get("family", []), params.get("directed", False))
        if kind == "h_local":
            return h_local(params["n"], params.get("hyperedges", []))
        if kind == "wf_local":
            return wf_local(params["n"], params.get("edges", []))
        if kind == "explicit":
            return explicit(params["n"], params.get("facets", []))
    except KeyError as exc:
        raise BadParams(f"missing parameter {exc}") from None
    raise BadParams(f"unknown model kind {kind!r}")


# -- named graphs used by demos and tests --------------------------------

def directed_cycle(n):
    """Arcs i -> i+1: process i+1 receives from i (and 1 from n)."""
    return [(i, i % n + 1) for i in range(1, n + 1)]


def cycle(n):
    return [(i, i % n + 1) for i in range(1, n + 1)]


def two_stars(k):
    """Two stars centred at u_1 (process 1) and v_1 (process 2).

    Process 2i-1 sits at u_i and process 2i at v_i; edges {u_1, v_i} and
    {u_i, v_1} for i = 1..k.
    """
    edges = set()
    for i in range(1, k + 1):
        edges.add(tuple(sorted((1, 2 * i))))
        edges.add(tuple(sorted((2 * i - 1, 2))))
    return sorted(edges)


# -- text format -----------------------------------------------------------

def format_channel_set(E):
    return " ".join("{" + ",".join(str(x) for x in sorted(e)) + "}"
                    for e in sorted(E, key=lambda e: (len(e), sorted(e))))


def serialize_model(model):
    p = model.params
    lines = [f"MODEL {model.kind}", f"N {model.n}"]
    if model.kind == "f_resilient":
        lines.append(f"F {p['f']}")
    elif model.kind in ("local", "wf_local"):
        if p.get("directed"):
            lines.append("DIRECTED")
        lines.append("EDGES")
        lines += [f"{u} {v}" for u, v in p["edges"]]
    elif model.kind == "dyn":
        if p.get("directed"):
            lines.append("DIRECTED")
        for g in p["family"]:
            lines.append("GRAPH")
            lines += [f"{u} {v}" for u, v in g]
    elif model.kind == "h_local":
        lines.append("HYPEREDGES")
        lines += [" ".join(str(x) for x in h) for h in p["hyperedges"]]
    elif model.kind == "explicit":
        for f in model.complex.facets:
            lines.append("FACET")
            for i, E in sorted(f, key=lambda v: v[0]):
                lines.append(f"{i}: {format_channel_set(E)}")
    return "\n".join(lines) + "\n"


def describe_pattern(i, E):
    return f"{i}<-" + format_term(frozenset(receives_from(E)))
