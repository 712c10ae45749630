"""The one-round communication map and protocol complexes.

A round-0 view is the process input.  A round-t view (t > 0) is the term

    ("V", ((label, ((ref, subview), ...)), ...))

with one entry per channel of the pattern, channels ordered by label and
members ordered by ``(ref, subview)``.  ``label`` is ``"self"`` for the
self-loop and the sorted member tuple otherwise (labels are shared by all
members of a channel).  ``ref`` identifies the member: its global name in
name-aware mode, or, in anonymous mode, the index of its first occurrence in
the traversal (self-loop first, then channels by label, members by name), so
the owner is always 0 and repeated occurrences of one process share a ref.
"""

from .complexes import Complex, format_simplex, maximal, names, ordered, simplex_key
from .errors import BudgetExceeded, NameMismatch, OpenPattern
from .models import channel_label, receives_from
from .terms import format_term, term_key

ANONYMOUS = "anonymous"
NAME_AWARE = "name-aware"
MODES = (ANONYMOUS, NAME_AWARE)

VIEW_TAG = "V"
DEFAULT_FACET_CEILING = 200_000


def _label_key(label):
    return (0, ()) if label == "self" else (1, label)


def is_view(term):
    return isinstance(term, tuple) and len(term) == 2 and term[0] == VIEW_TAG


def canonicalize_view(owner, raw, mode=ANONYMOUS):
    """Canonical view from ``raw``: list of (channel, {name: subview}).

    Name-aware mode keeps names; anonymous mode renames processes by first
    occurrence (see module docstring).
    """
    entries = sorted(((channel_label(e, owner), members) for e, members in raw),
                     key=lambda p: _label_key(p[0]))
    local = {}
    if mode == ANONYMOUS:
        local[owner] = 0
        for _, members in entries:
            for j in sorted(members):
                if j not in local:
                    local[j] = len(local)
    out = []
    for label, members in entries:
        fam = []
        for j in sorted(members):
            ref = local[j] if mode == ANONYMOUS else j
            fam.append((ref, members[j]))
        fam.sort(key=term_key)
        out.append((label, tuple(fam)))
    return (VIEW_TAG, tuple(out))


def view_of(i, E, values, mode=ANONYMOUS):
    """New view of process ``i`` under channel set ``E``; values: name->view."""
    raw = [(e, {j: values[j] for j in e}) for e in E]
    return canonicalize_view(i, raw, mode)


def input_of(view):
    """Round-0 value embedded in a view (follow the self-loop)."""
    while is_view(view):
        view = view[1][0][1][0][1]
    return view


def view_round(view):
    r = 0
    while is_view(view):
        view = view[1][0][1][0][1]
        r += 1
    return r


def compact_view(view):
    """Short rendering of a round-1 view: own input, then heard inputs.

    Heard inputs follow channel order, skipping the owner; e.g. ``BR`` for a
    process with input B hearing R.  Other views fall back to terms.
    """
    if not is_view(view) or view_round(view) != 1:
        return format_term(view)
    owner_ref, own = view[1][0][1][0]
    heard = []
    for label, fam in view[1][1:]:
        heard.extend(sub for ref, sub in fam if ref != owner_ref)
    return "".join(format_term(x) for x in [own] + heard)


def xi_step(state, pattern, mode=ANONYMOUS):
    """Xi(sigma, phi): next-round views when ``state`` runs under ``pattern``."""
    if names(state) != names(pattern):
        raise NameMismatch("state and pattern must carry the same names")
    values = dict(state)
    for _, E in pattern:
        if not receives_from(E) <= names(state):
            raise OpenPattern("the communication pattern is open")
    return frozenset((i, view_of(i, E, values, mode)) for i, E in pattern)


class ProtocolComplex:
    """P^(t) together with the provenance of its simplices.

    ``provenance`` maps every simplex tau whose name set is that of some
    closed input simplex sigma0 to the set of such sigma0 with tau in
    Cl(Xi^t(sigma0)).  Simplices with no such sigma0 are absent.
    """

    def __init__(self, round_, complex_, provenance, model, mode):
        self.round = round_
        self.complex = complex_
        self.provenance = provenance
        self.model = model
        self.mode = mode

    def __repr__(self):
        return (f"ProtocolComplex(t={self.round}, facets={len(self.complex.facets)}, "
                f"mode={self.mode})")

    def dump(self, compact=False):
        show = compact_view if compact else format_term
        lines = [f"PROTOCOL t={self.round} mode={self.mode} "
                 f"facets={len(self.complex.facets)}"]
        for f in self.complex.facets:
            lines.append("[" + ", ".join(f"{i}:{show(v)}" for i, v in ordered(f)) + "]")
        lines.append("PROVENANCE")
        for tau in sorted(self.provenance, key=lambda s: (len(s), simplex_key(s))):
            srcs = sorted(self.provenance[tau], key=simplex_key)
            lines.append("[" + ", ".join(f"{i}:{show(v)}" for i, v in ordered(tau)) +
                         "] <= " + " ".join(format_simplex(s) for s in srcs))
        return "\n".join(lines) + "\n"


def initial(I, model, mode=ANONYMOUS):
    closed_sets = set(model.closed_simplices())
    prov = {s: frozenset([s]) for s in I.simplices if names(s) in closed_sets}
    return ProtocolComplex(0, I, prov, model, mode)


def xi_complex(K, model=None, mode=None, ceiling=DEFAULT_FACET_CEILING):
    """Xi(K): closure of the images of all closed simplices of ``K``."""
    model = model or K.model
    mode = mode or K.mode
    closed = model.closed_simplices()
    images = {}
    prov = {}
    if K.complex.is_empty():
        return ProtocolComplex(K.round + 1, Complex((), n=K.complex.n), {}, model, mode)
    for rho in K.complex.sorted_simplices():
        pats = closed.get(names(rho))
        if not pats:
            continue
        src = K.provenance.get(rho, frozenset())
        for phi in pats:
            img = xi_step(rho, phi, mode)
            images[img] = True
            if src:
                prov[img] = prov.get(img, frozenset()) | src
            if len(images) > ceiling:
                raise BudgetExceeded("protocol complex exceeds the facet ceiling",
                                     {"round": K.round + 1, "images": len(images)})
    cx = Complex(maximal(images), n=K.complex.n)
    return ProtocolComplex(K.round + 1, cx, prov, model, mode)


def protocol_complex(I, model, t, mode=ANONYMOUS, ceiling=DEFAULT_FACET_CEILING):
    """P^(t) with provenance, starting from P^(0) = I."""
    if t < 0:
        raise ValueError("t must be non-negative")
    K = initial(I, model, mode)
    for _ in range(t):
        K = xi_complex(K, model, mode, ceiling)
    return K


def xi_of_simplex(sigma, model, mode=ANONYMOUS):
    """Xi(sigma): one image per closed pattern on name(sigma)."""
    return [xi_step(sigma, phi, mode) for phi in model.closed_patterns(names(sigma))]


def iterate_from(sigma0, model, t, mode=ANONYMOUS):
    """Cl(Xi^t(sigma0)) computed on its own (reference expansion)."""
    from .complexes import closure
    current = closure([sigma0])
    for _ in range(t):
        imgs = []
        for rho in current.simplices:
            imgs.extend(xi_of_simplex(rho, model, mode))
        current = closure(imgs)
    return current
