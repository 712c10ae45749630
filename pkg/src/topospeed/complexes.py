"""Chromatic simplicial complexes.

A vertex is a pair ``(name, value)`` where ``name`` is a process name in
``1..n`` and ``value`` is a term.  A simplex is a ``frozenset`` of vertices
with pairwise distinct names.  :class:`Complex` stores the maximal simplices
(facets) and, up to a size ceiling, the set of all simplices.
"""

from itertools import combinations, product

from .errors import (BudgetExceeded, DuplicateName, EmptyNameSet, EmptyResult,
                     EmptySimplex, EmptyValueSet, NotInComplex)
from .terms import check_term, format_term, term_key

DEFAULT_SIMPLEX_CEILING = 2_000_000


def vertex_key(v):
    return (v[0], term_key(v[1]))


def simplex_key(s):
    """Canonical sort key of a simplex: its sorted vertex keys, then size."""
    return tuple(sorted(vertex_key(v) for v in s))


def ordered(s):
    """Vertices of ``s`` sorted by name."""
    return tuple(sorted(s, key=lambda v: v[0]))


def names(s):
    return frozenset(v[0] for v in s)


def value_of(s, name):
    for v in s:
        if v[0] == name:
            return v[1]
    raise KeyError(name)


def as_dict(s):
    return {v[0]: v[1] for v in s}


def make_simplex(vertices):
    """Validate and freeze an iterable of ``(name, value)`` pairs."""
    vs = frozenset((int(i), check_term(x)) for i, x in vertices)
    if not vs:
        raise EmptySimplex("a simplex needs at least one vertex")
    if len(names(vs)) != len(vs):
        raise DuplicateName(f"repeated process name in {format_simplex(vs)}")
    return vs


def from_values(mapping):
    """Simplex from a ``{name: value}`` mapping."""
    return make_simplex(mapping.items())


def faces(s):
    """All non-empty faces of ``s`` (including ``s``)."""
    vs = tuple(s)
    for k in range(1, len(vs) + 1):
        for c in combinations(vs, k):
            yield frozenset(c)


def pi_restrict(simplex, keep):
    """Sub-simplex of ``simplex`` on the process names in ``keep``."""
    keep = set(keep)
    out = frozenset(v for v in simplex if v[0] in keep)
    if not out:
        raise EmptyResult("no process of the simplex is kept")
    return out


def format_simplex(s):
    return "[" + ", ".join(f"{i}:{format_term(x)}" for i, x in
                           sorted(s, key=vertex_key)) + "]"


class Complex:
    """Immutable chromatic complex given by its facets.

    ``facets`` must already be pairwise incomparable; use :func:`make_complex`
    or :func:`closure` to build one from arbitrary simplices.
    """

    def __init__(self, facets, n=None, ceiling=DEFAULT_SIMPLEX_CEILING):
        self.facets = tuple(sorted(facets, key=simplex_key))
        self._facet_set = frozenset(self.facets)
        names_seen = set()
        for f in self.facets:
            names_seen.update(names(f))
        self.n = n if n is not None else (max(names_seen) if names_seen else 0)
        self.ceiling = ceiling
        self._simplices = None
        self._by_vertex = None

    # -- membership -------------------------------------------------------
    def _materialize(self):
        if self._simplices is None:
            total = sum(2 ** len(f) - 1 for f in self.facets)
            if total > self.ceiling:
                return None
            out = set()
            for f in self.facets:
                if f in out:
                    continue
                out.update(faces(f))
            self._simplices = frozenset(out)
        return self._simplices

    def _vertex_index(self):
        if self._by_vertex is None:
            idx = {}
            for f in self.facets:
                for v in f:
                    idx.setdefault(v, []).append(f)
            self._by_vertex = idx
        return self._by_vertex

    def __contains__(self, s):
        if not s:
            return False
        sims = self._materialize()
        if sims is not None:
            return s in sims
        v = next(iter(s))
        return any(s <= f for f in self._vertex_index().get(v, ()))

    @property
    def simplices(self):
        sims = self._materialize()
        if sims is None:
            raise BudgetExceeded("complex too large to list all simplices",
                                 {"facets": len(self.facets)})
        return sims

    def sorted_simplices(self):
        return sorted(self.simplices, key=lambda s: (len(s), simplex_key(s)))

    def vertices(self):
        vs = set()
        for f in self.facets:
            vs.update(f)
        return sorted(vs, key=vertex_key)

    def facets_containing(self, v):
        return list(self._vertex_index().get(v, ()))

    def values(self, name=None):
        """Values carried by vertices (optionally only those of ``name``)."""
        vals = {v[1] for v in self.vertices() if name is None or v[0] == name}
        return sorted(vals, key=term_key)

    def names(self):
        return sorted({v[0] for v in self.vertices()})

    # -- shape ------------------------------------------------------------
    @property
    def dim(self):
        return max((len(f) for f in self.facets), default=0) - 1

    def is_empty(self):
        return not self.facets

    def is_pure(self):
        return len({len(f) for f in self.facets}) <= 1

    def is_facet(self, s):
        return s in self._facet_set

    def __len__(self):
        return len(self.simplices)

    def __eq__(self, other):
        return isinstance(other, Complex) and self._facet_set == other._facet_set

    def __hash__(self):
        return hash(self._facet_set)

    def __le__(self, other):
        return all(f in other for f in self.facets)

    def __repr__(self):
        return f"Complex(n={self.n}, facets={len(self.facets)}, dim={self.dim})"

    def serialize(self):
        """Canonical text form: one facet per line."""
        lines = [f"COMPLEX n={self.n} facets={len(self.facets)}"]
        lines += [format_simplex(f) for f in self.facets]
        return "\n".join(lines) + "\n"


def maximal(simplices):
    """The inclusion-maximal members of a collection of simplices."""
    by_size = sorted(set(simplices), key=lambda s: -len(s))
    covered = set()
    keep = []
    for s in by_size:
        if s in covered:
            continue
        keep.append(s)
        covered.update(faces(s))
    return keep


def make_complex(facet_list, n=None, ceiling=DEFAULT_SIMPLEX_CEILING):
    """Complex generated by a list of simplices (validated, absorbed)."""
    sims = [make_simplex(s) if not isinstance(s, frozenset) else _check(s)
            for s in facet_list]
    return Complex(maximal(sims), n=n, ceiling=ceiling)


def _check(s):
    if not s:
        raise EmptySimplex("a simplex needs at least one vertex")
    if len(names(s)) != len(s):
        raise DuplicateName(f"repeated process name in {format_simplex(s)}")
    return s


def closure(simplices, n=None, ceiling=DEFAULT_SIMPLEX_CEILING):
    """Cl(S): the smallest complex containing every simplex of ``S``."""
    return make_complex(list(simplices), n=n, ceiling=ceiling)


def empty_complex(n=None):
    return Complex((), n=n)


def star_closure(K, base):
    """Closure of the star of ``base`` in ``K``."""
    if base not in K:
        raise NotInComplex(f"{format_simplex(base)} is not a simplex of the complex")
    v = next(iter(base))
    return Complex(maximal(f for f in K.facets_containing(v) if base <= f), n=K.n,
                   ceiling=K.ceiling)


def skeleton(K, keep):
    """Sk_keep(K): all simplices whose names lie inside ``keep``."""
    keep = frozenset(keep)
    if not keep:
        raise EmptyNameSet("skeleton needs a non-empty name set")
    parts = []
    for f in K.facets:
        g = frozenset(v for v in f if v[0] in keep)
        if g:
            parts.append(g)
    return Complex(maximal(parts), n=K.n, ceiling=K.ceiling)


def pseudosphere(n, values):
    """S_n(X): every name-distinct assignment of values of X is a simplex."""
    vals = sorted({check_term(x) for x in values}, key=term_key)
    if not vals:
        raise EmptyValueSet("pseudosphere needs at least one value")
    if n < 1:
        raise EmptyNameSet("pseudosphere needs n >= 1")
    facets = [frozenset(zip(range(1, n + 1), combo))
              for combo in product(vals, repeat=n)]
    return Complex(facets, n=n)


def subcomplex(K, predicate):
    """Complex generated by the simplices of ``K`` satisfying ``predicate``."""
    return closure([s for s in K.simplices if predicate(s)], n=K.n)
