"""Exhaustive checkers for t-independence, local and edge checkability,
and the transform of a locally checkable task into an edge-checkable one
for hypergraph models.

The checkability definitions quantify over every name-matching output
assignment tau.  Values outside Sk_i(O) can never satisfy either side
(the self-loop channel is always checked), so tau ranges over products of
output values of the right names.  Rather than listing that product, the
checkers list Delta(sigma) for one direction and the assignments passing
every neighbourhood check (a small constraint search) for the other.
"""

from itertools import product

from .complexes import (Complex, format_simplex, maximal, names, ordered, pi_restrict,
                        simplex_key)
from .errors import BadParams, BudgetExceeded, NotLocallyCheckable
from .models import receives_from
from .protocol import ANONYMOUS, compact_view, protocol_complex
from .tasks import TaskSpec
from .terms import format_term

HOLDS = "HOLDS"
FAILS = "FAILS"

DEFAULT_COMBO_BUDGET = 2_000_000


class CheckResult:
    """Verdict plus the quantifier instance that refutes it, if any."""

    def __init__(self, kind, holds, witness=None, stats=None):
        self.kind = kind
        self.holds = holds
        self.witness = witness
        self.stats = stats or {}

    @property
    def verdict(self):
        return HOLDS if self.holds else FAILS

    def __bool__(self):
        return self.holds

    def __repr__(self):
        return f"CheckResult({self.kind}, {self.verdict})"

    def render(self):
        lines = [f"{self.kind}: {self.verdict}"]
        if self.witness:
            for key in sorted(self.witness):
                lines.append(f"  {key}: {self.witness[key]}")
        return "\n".join(lines) + "\n"


def _fmt_pattern(phi):
    return "{" + ", ".join(
        f"{i}:" + "{" + ",".join("".join(str(x) for x in sorted(e)) for e in
                                 sorted(E, key=lambda e: (len(e), sorted(e)))) + "}"
        for i, E in ordered(phi)) + "}"


# -- t-independence ------------------------------------------------------------------

def _faces_through(K, vertex, keep):
    """Simplices of K on exactly the names ``keep`` that contain ``vertex``."""
    out = set()
    for F in K.facets_containing(vertex):
        if keep <= names(F):
            out.add(frozenset(v for v in F if v[0] in keep))
    return sorted(out, key=simplex_key)


def check_t_independence(I, model, t, mode=ANONYMOUS, budget=DEFAULT_COMBO_BUDGET,
                         protocol=None, collect=False):
    """Decide the t-independence property of I with respect to ``model``.

    For every closed pattern phi, process i, channel e of E_i and simplex
    {(j, v_j) : j in e} of P^(t), every choice of simplices sigma_{f,j} on f
    through (j, v_j), for j in e and f in E_j other than e, must have its
    union in P^(t).  The simplices sigma_{f,j} share the values of the base
    simplex on f & e (the same v_k appear in both).  A union that gives one
    process two values is not a simplex and counts as a failure.
    """
    P = protocol if protocol is not None else protocol_complex(I, model, t, mode)
    K = P.complex
    by_names = {}
    stats = {"patterns": 0, "bases": 0, "collections": 0}
    failures = []
    for phi in model.all_closed():
        stats["patterns"] += 1
        E = dict(phi)
        for i, Ei in ordered(phi):
            for e in sorted(Ei, key=lambda c: (len(c), sorted(c))):
                bases = _simplices_on(K, e, by_names)
                for base in bases:
                    stats["bases"] += 1
                    bval = dict(base)
                    slots = []
                    for j in sorted(e):
                        for f in sorted(E[j], key=lambda c: (len(c), sorted(c))):
                            if f == e:
                                continue
                            opts = [s for s in _faces_through(K, (j, bval[j]), f)
                                    if all(dict(s)[k] == bval[k] for k in f & e)]
                            slots.append(((j, f), opts))
                    size = 1
                    for _, opts in slots:
                        size *= max(1, len(opts))
                    stats["collections"] += size
                    if stats["collections"] > budget:
                        raise BudgetExceeded("too many collections to enumerate", stats)
                    if any(not opts for _, opts in slots):
                        continue
                    for choice in product(*(opts for _, opts in slots)):
                        union = frozenset().union(*choice) if choice else frozenset()
                        ok = len(names(union)) == len(union) and (not union or union in K)
                        if not ok:
                            witness = {
                                "pattern": _fmt_pattern(phi),
                                "process": str(i),
                                "channel": format_term(tuple(sorted(e))),
                                "base": _fmt_simplex_views(base),
                                "collection": " ".join(
                                    f"{j}/{''.join(str(x) for x in sorted(f))}="
                                    f"{_fmt_simplex_views(s)}"
                                    for ((j, f), _), s in zip(slots, choice)),
                                "union": _fmt_simplex_views(union),
                            }
                            if not collect:
                                return CheckResult("t-independence", False, witness, stats)
                            failures.append(witness)
    if failures:
        stats["failures"] = failures
        return CheckResult("t-independence", False, failures[0], stats)
    return CheckResult("t-independence", True, None, stats)


def independence_witness_union(result):
    """The offending union of a failed independence check (as text)."""
    return None if result.holds else result.witness["union"]


def _simplices_on(K, keep, cache):
    keep = frozenset(keep)
    if keep not in cache:
        out = set()
        for F in K.facets:
            if keep <= names(F):
                out.add(frozenset(v for v in F if v[0] in keep))
        cache[keep] = sorted(out, key=simplex_key)
    return cache[keep]


def _fmt_simplex_views(s):
    return "{" + ", ".join(f"({i},{compact_view(v)})" for i, v in ordered(s)) + "}"


# -- checkability ----------------------------------------------------------------------

def _neighbourhoods(phi, per_channel):
    """Name sets checked by one process: J_i, or every channel of E_i."""
    out = []
    for i, Ei in ordered(phi):
        if per_channel:
            out.extend(frozenset(e) for e in Ei)
        else:
            out.append(receives_from(Ei))
    uniq = sorted(set(out), key=lambda s: (len(s), sorted(s)))
    return uniq


def _passing_assignments(task, sigma, checks, budget, stats):
    """Every tau on name(sigma) whose restriction to each check set K is in
    Delta(pi_K(sigma)); a backtracking search over names in order."""
    ns = sorted(names(sigma))
    allowed = {}
    for keep in checks:
        allowed[keep] = task.delta_of(pi_restrict(sigma, keep))
    closing = {}
    for keep in checks:
        closing.setdefault(max(keep), []).append(keep)
    domains = {i: task.O.values(i) for i in ns}
    out = []
    assign = {}

    def rec(pos):
        stats["nodes"] += 1
        if stats["nodes"] > budget:
            raise BudgetExceeded("checkability search budget exhausted", dict(stats))
        if pos == len(ns):
            out.append(frozenset(assign.items()))
            return
        i = ns[pos]
        for y in domains[i]:
            assign[i] = y
            good = True
            for keep in closing.get(i, ()):
                if frozenset((k, assign[k]) for k in keep) not in allowed[keep]:
                    good = False
                    break
            if good:
                rec(pos + 1)
            del assign[i]

    rec(0)
    return out


def _checkability(task, model, per_channel, budget):
    kind = "edge-checkability" if per_channel else "local-checkability"
    closed = model.closed_simplices()
    stats = {"simplices": 0, "patterns": 0, "nodes": 0}
    for sigma in task.I.sorted_simplices():
        pats = closed.get(names(sigma))
        if not pats:
            continue
        stats["simplices"] += 1
        lhs = task.delta_of(sigma)
        for phi in pats:
            stats["patterns"] += 1
            checks = _neighbourhoods(phi, per_channel)

            def rhs(tau):
                return all(pi_restrict(tau, keep) in task.delta_of(pi_restrict(sigma, keep))
                           for keep in checks)

            for tau in sorted(lhs, key=simplex_key):
                if not rhs(tau):
                    failed = next(k for k in checks
                                  if pi_restrict(tau, k) not in
                                  task.delta_of(pi_restrict(sigma, k)))
                    return CheckResult(kind, False, _check_witness(
                        sigma, tau, phi, "valid output rejected by the neighbourhood checks",
                        failed), stats)
            for tau in _passing_assignments(task, sigma, checks, budget, stats):
                if tau not in lhs:
                    return CheckResult(kind, False, _check_witness(
                        sigma, tau, phi, "invalid output accepted by every neighbourhood check",
                        None), stats)
    return CheckResult(kind, True, None, stats)


def _check_witness(sigma, tau, phi, direction, failed):
    w = {"input": format_simplex(sigma), "output": format_simplex(tau),
         "pattern": _fmt_pattern(phi), "direction": direction}
    if failed is not None:
        w["failing-check"] = format_term(tuple(sorted(failed)))
    return w


def check_local_checkability(task, model, budget=DEFAULT_COMBO_BUDGET):
    """tau in Delta(sigma) iff every pi_{J_i}(tau) is in Delta(pi_{J_i}(sigma))."""
    return _checkability(task, model, False, budget)


def check_edge_checkability(task, model, budget=DEFAULT_COMBO_BUDGET):
    """tau in Delta(sigma) iff every channel restriction is allowed."""
    return _checkability(task, model, True, budget)


def recheck_witness(task, result):
    """Re-evaluate a checkability witness; True when it still refutes."""
    if result.holds:
        return False
    sigma = _parse_simplex_text(result.witness["input"])
    tau = _parse_simplex_text(result.witness["output"])
    valid = task.allows(sigma, tau)
    if result.witness["direction"].startswith("valid"):
        return valid
    return not valid


def _parse_simplex_text(text):
    from .terms import TermReader
    reader = TermReader(text)
    reader.expect("[")
    verts = []
    while True:
        i = reader.read_term()
        reader.expect(":")
        verts.append((i, reader.read_term()))
        if reader.peek() == ",":
            reader.pos += 1
            continue
        reader.expect("]")
        return frozenset(verts)


# -- locally checkable -> edge-checkable (hypergraph models) ---------------------------

class LdTransform:
    """Result of :func:`ld_to_edge_transform`."""

    def __init__(self, task, base, model):
        self.task = task
        self.base = base
        self.model = model
        self.reach = {i: receives_from(E) for i, E in model.complex.facets[0]}

    def forward(self, sigma, outputs):
        """One round: every i collects (input, output) of every j in J_i."""
        inputs = dict(sigma)
        return {i: _label(self.reach[i], inputs, outputs) for i in sorted(inputs)}

    def backward(self, outputs2):
        """Zero rounds: i outputs its own label's output component."""
        return {i: dict((j, (x, y)) for j, x, y in K)[i][1]
                for i, K in sorted(outputs2.items())}


def _label(reach, inputs, outputs):
    return tuple((j, inputs[j], outputs[j]) for j in sorted(reach))


def ld_to_edge_transform(task, model, budget=DEFAULT_COMBO_BUDGET):
    """Edge-checkable task whose outputs are labelled neighbourhoods.

    Output vertices are (i, K_i) with K_i a tuple of (j, x_j, y_j) over J_i
    such that the y's are allowed for the x's on J_i.  A set of such vertices
    is allowed for sigma when each K_i carries i's own input and any two
    processes sharing a hyperedge agree on that hyperedge.
    """
    if model.kind != "h_local":
        raise BadParams("the transform applies to hypergraph models")
    lc = check_local_checkability(task, model, budget)
    if not lc.holds:
        raise NotLocallyCheckable("the task is not locally checkable: " +
                                  "; ".join(f"{k}={v}" for k, v in sorted(lc.witness.items())))
    phi = model.complex.facets[0]
    reach = {i: receives_from(E) for i, E in phi}
    hyper = sorted({e for _, E in phi for e in E if len(e) > 1},
                   key=lambda e: (len(e), sorted(e)))
    n = model.n
    facets = []
    image = {}
    stats = {"nodes": 0}
    for sigma in task.I.facets:
        inputs = dict(sigma)
        checks = sorted(set(reach.values()), key=lambda s: (len(s), sorted(s)))
        outs = _passing_assignments(task, sigma, checks, budget, stats)
        imgs = []
        for tau in outs:
            y = dict(tau)
            imgs.append(frozenset((i, _label(reach[i], inputs, y)) for i in range(1, n + 1)))
        image[sigma] = imgs
        facets.extend(imgs)
    O2 = Complex(maximal(facets), n=n)

    def ok(rho, tau):
        x = dict(rho)
        K = {i: {j: (a, b) for j, a, b in lab} for i, lab in tau}
        for i in K:
            if K[i][i][0] != x[i]:
                return False
        for e in hyper:
            inside = sorted(e & set(K))
            for a in inside:
                for b in inside:
                    if any(K[a][k] != K[b][k] for k in e):
                        return False
        return True

    by_names = {}
    for tau in O2.simplices:
        by_names.setdefault(names(tau), []).append(tau)
    delta = {}
    for rho in task.I.sorted_simplices():
        delta[rho] = frozenset(t for t in by_names.get(names(rho), []) if ok(rho, t))
    t2 = TaskSpec(task.I, O2, delta, task.name + "+labelled",
                  dict(task.params, transform="ld-to-edge"), task.notes)
    return LdTransform(t2, task, model)
