"""The speedup operator: build (I, O', Delta') from (I, O, Delta).

A vertex value of O' for process i is a pair ``(x, table)``: ``x`` is an
input value of i and ``table`` maps every key ``(channel, pattern)`` to a
family of non-empty subsets of Sk_i(O) output values.  Keys use the labels of
:mod:`models` (``"self"`` for the owner's own channel), so values held by
different processes are comparable.

Vertex values satisfy the per-vertex conditions (the self entry is a single
set, every selection of one member per channel of a pattern intersects,
entries of channels carrying a process that i does not hear equal the self
entry).  A full tuple of values is a facet when, for every channel e that
some process listens to in some closed pattern, one member set can be picked
per (process, pattern) of e, independently of the other members' patterns,
so that every combination of picked outputs extends to a valid output of
some input simplex containing the members' inputs.  Delta' keeps the inputs.
"""

from itertools import combinations, product

from .complexes import (Complex, format_simplex, maximal, names, ordered, simplex_key,
                        vertex_key)
from .errors import (BadParams, BudgetExceeded, EmptyIntersection, HypothesisLost,
                     IndependenceViolated, NotEdgeCheckable)
from .models import channel_label, pattern_label, receives_from
from .protocol import ANONYMOUS, NAME_AWARE, input_of, protocol_complex, view_of, xi_step
from .solver import SOLVABLE, TableCSP, SimplicialMapDelta, solve
from .tasks import TaskSpec
from .terms import format_term, term_key


class SpeedupConfig:
    def __init__(self, value_cap=3, family_cap=64, vertex_budget=200_000,
                 facet_budget=5_000_000, node_budget=200_000):
        self.value_cap = value_cap
        self.family_cap = family_cap
        self.vertex_budget = vertex_budget
        self.facet_budget = facet_budget
        self.node_budget = node_budget


def _chan_order(e):
    return (len(e), sorted(e))


def _nonempty_subsets(values):
    out = []
    for k in range(1, len(values) + 1):
        out.extend(frozenset(c) for c in combinations(values, k))
    return out


def _families(members):
    out = []
    for k in range(len(members) + 1):
        out.extend(frozenset(c) for c in combinations(members, k))
    return out


def family_key(fam):
    return (len(fam), term_key(fam))


def format_family(fam):
    """``{{R,G}}`` style rendering of a family of output sets."""
    inner = ",".join("{" + ",".join(format_term(y) for y in sorted(s, key=term_key)) + "}"
                     for s in sorted(fam, key=lambda s: (len(s), term_key(s))))
    return "{" + inner + "}"


def table_of(value):
    return dict(value[1])


class SpeedupBuilder:
    """Everything needed to enumerate and test values of O'."""

    def __init__(self, task, model, config=None):
        self.task = task
        self.model = model
        self.config = config or SpeedupConfig()
        self.n = model.n
        self.out_values = {}
        self.channels = {}
        self.patterns = {}
        for i in range(1, self.n + 1):
            vals = task.O.values(i)
            if len(vals) > self.config.value_cap:
                raise BudgetExceeded(
                    f"process {i} has {len(vals)} output values (cap {self.config.value_cap})",
                    {"name": i, "values": len(vals)})
            fams = 2 ** (2 ** len(vals) - 1)
            if fams > self.config.family_cap:
                raise BudgetExceeded(
                    f"process {i}: {fams} families per entry (cap {self.config.family_cap})",
                    {"name": i, "families": fams})
            self.out_values[i] = vals
            self.channels[i] = model.channels_of(i)
            self.patterns[i] = model.patterns_of(i)
        self.forced = self._forced_entries()
        self.contexts = self._channel_contexts()
        self._A = {}
        self._sel_cache = {}
        self.stats = {"vertex_values": {}, "candidates": 0, "facets": 0,
                      "selector_searches": 0}

    # -- model-only structure --------------------------------------------
    def key(self, i, e, E):
        return (channel_label(e, i), pattern_label(E, i))

    def _forced_entries(self):
        """(i, E_i) -> channels whose entry must equal the self entry."""
        forced = {}
        for phi in self.model.all_closed():
            pats = dict(phi)
            for i, Ei in pats.items():
                Ji = receives_from(Ei)
                for j, Ej in pats.items():
                    if j in Ji:
                        continue
                    for e in Ej:
                        if i in e:
                            forced.setdefault((i, Ei), set()).add(e)
        return forced

    def _channel_contexts(self):
        """Channel -> sorted distinct tuples ((k, E_k) for k in e)."""
        ctx = {}
        for phi in self.model.all_closed():
            pats = dict(phi)
            for i, Ei in pats.items():
                for e in Ei:
                    tup = tuple((k, pats[k]) for k in sorted(e))
                    ctx.setdefault(e, set()).add(tup)
        return {e: sorted(v, key=lambda t: tuple((k, term_key(pattern_label(E, k)))
                                                 for k, E in t))
                for e, v in sorted(ctx.items(), key=lambda kv: _chan_order(kv[0]))}

    # -- vertex values ----------------------------------------------------
    def pattern_blocks(self, i, E):
        """Admissible table blocks (entries of pattern E) of process i."""
        vals = self.out_values[i]
        members = sorted(_nonempty_subsets(vals), key=lambda s: (len(s), term_key(s)))
        fams = sorted(_families(members), key=family_key)
        self_e = frozenset((i,))
        forced = self.forced.get((i, E), set())
        inside = [e for e in self.channels[i] if e in E and e != self_e]
        outside = [e for e in self.channels[i]
                   if e not in E and e != self_e and e not in forced]
        blocks = []
        for S in members:
            ok_with_self = [F for F in fams if all(m & S for m in F)]
            for pick in product(ok_with_self, repeat=len(inside)):
                if not _p0(S, pick):
                    continue
                for rest in product(fams, repeat=len(outside)):
                    block = {self.key(i, self_e, E): frozenset([S])}
                    for e in forced:
                        block[self.key(i, e, E)] = frozenset([S])
                    for e, F in zip(inside, pick):
                        block[self.key(i, e, E)] = F
                    for e, F in zip(outside, rest):
                        block[self.key(i, e, E)] = F
                    blocks.append(block)
        return blocks

    def vertex_values(self, i):
        """All values (x, table) of process i satisfying the vertex conditions."""
        per_pattern = [self.pattern_blocks(i, E) for E in self.patterns[i]]
        count = len(self.task.I.values(i))
        for b in per_pattern:
            count *= len(b)
        if count > self.config.vertex_budget:
            raise BudgetExceeded(f"process {i} has {count} candidate values",
                                 {"name": i, "values": count})
        out = []
        for x in self.task.I.values(i):
            for blocks in product(*per_pattern):
                table = {}
                for b in blocks:
                    table.update(b)
                out.append((x, tuple(sorted(table.items(), key=term_key))))
        out.sort(key=term_key)
        self.stats["vertex_values"][i] = len(out)
        return out

    def vertex_failure(self, i, value):
        """Reason the value breaks a vertex condition, or None."""
        x, _ = value
        table = table_of(value)
        if x not in set(self.task.I.values(i)):
            return f"input {format_term(x)} is not an input of process {i}"
        self_e = frozenset((i,))
        for E in self.patterns[i]:
            for e in self.channels[i]:
                if self.key(i, e, E) not in table:
                    return f"missing entry {self.key(i, e, E)}"
            for e in self.channels[i]:
                fam = table[self.key(i, e, E)]
                if any(not m for m in fam):
                    return f"entry {self.key(i, e, E)} has an empty member set"
                if any(not m <= set(self.out_values[i]) for m in fam):
                    return f"entry {self.key(i, e, E)} leaves Sk_{i}(O)"
            own = table[self.key(i, self_e, E)]
            if len(own) != 1:
                return f"self entry of pattern {pattern_label(E, i)} is not a single set"
            S = next(iter(own))
            fams = [table[self.key(i, e, E)] for e in self.channels[i]
                    if e in E and e != self_e]
            if not _p0(S, fams):
                return f"pattern {pattern_label(E, i)}: a selection has empty intersection"
            for e in self.forced.get((i, E), ()):
                if table[self.key(i, e, E)] != own:
                    return f"entry {self.key(i, e, E)} must equal the self entry"
        return None

    # -- facets -----------------------------------------------------------
    def allowed_outputs(self, e, xs):
        """Output tuples on e (sorted names) extending to some allowed output
        of an input simplex containing the inputs ``xs``."""
        key = (e, xs)
        if key not in self._A:
            ns = sorted(e)
            base = frozenset(zip(ns, xs))
            out = set()
            for tau in self.task.I.simplices:
                if base <= tau:
                    for rho in self.task.delta_of(tau):
                        if e <= names(rho):
                            d = dict(rho)
                            out.add(tuple(d[k] for k in ns))
            self._A[key] = frozenset(out)
        return self._A[key]

    def joint_selector(self, e, values):
        """Canonical first choice of one member set per (k, E_k) of channel e.

        ``values`` maps each member of e to its O' value.  Returns a dict
        (k, E_k) -> chosen set, or None when no choice satisfies every
        context of e.
        """
        ns = sorted(e)
        xs = tuple(values[k][0] for k in ns)
        contexts = self.contexts.get(e, [])
        slots = sorted({kE for ctx in contexts for kE in ctx},
                       key=lambda kE: (kE[0], term_key(pattern_label(kE[1], kE[0]))))
        fams = tuple(table_of(values[k])[self.key(k, e, E)] for k, E in slots)
        ckey = (e, xs, fams)
        if ckey in self._sel_cache:
            return self._sel_cache[ckey]
        self.stats["selector_searches"] += 1
        A = self.allowed_outputs(e, xs)
        index = {kE: n for n, kE in enumerate(slots)}
        ctx_idx = [tuple(index[kE] for kE in ctx) for ctx in contexts]
        closing = {}
        for c in ctx_idx:
            closing.setdefault(max(c), []).append(c)
        doms = [sorted(f, key=lambda s: (len(s), term_key(s))) for f in fams]
        chosen = [None] * len(slots)

        def rec(pos):
            if pos == len(slots):
                return True
            for S in doms[pos]:
                chosen[pos] = S
                if all(_all_allowed([chosen[k] for k in c], A) for c in closing.get(pos, ())):
                    if rec(pos + 1):
                        return True
            chosen[pos] = None
            return False

        result = {slots[k]: chosen[k] for k in range(len(slots))} if rec(0) else None
        self._sel_cache[ckey] = result
        return result

    def channel_failure(self, e, values):
        if e not in self.contexts:
            return None
        if self.joint_selector(e, values) is None:
            return f"no witness selection on channel {format_term(tuple(sorted(e)))}"
        return None

    def facet_failure(self, values):
        """Reason a full assignment name -> value is not a facet, or None."""
        for i, v in sorted(values.items()):
            why = self.vertex_failure(i, v)
            if why:
                return f"process {i}: {why}"
        for e in self.contexts:
            why = self.channel_failure(e, values)
            if why:
                return why
        return None

    def enumerate_facets(self, universes=None):
        universes = universes or {i: self.vertex_values(i) for i in range(1, self.n + 1)}
        closing = {}
        for e in self.contexts:
            closing.setdefault(max(e), []).append(e)
        facets = []
        assign = {}
        budget = self.config.facet_budget

        def rec(i):
            if i > self.n:
                facets.append(frozenset(assign.items()))
                return
            for v in universes[i]:
                self.stats["candidates"] += 1
                if self.stats["candidates"] > budget:
                    raise BudgetExceeded("facet enumeration budget exhausted",
                                         dict(self.stats, vertex_values=dict(
                                             self.stats["vertex_values"])))
                assign[i] = v
                if all(self.channel_failure(e, assign) is None for e in closing.get(i, ())):
                    rec(i + 1)
                del assign[i]

        rec(1)
        self.stats["facets"] = len(facets)
        return facets


def _p0(S, fams):
    """Every selection of one member per family meets S (and each other)."""
    for pick in product(*fams):
        inter = set(S)
        for m in pick:
            inter &= m
        if not inter:
            return False
    return True


def _all_allowed(sets, A):
    return all(ys in A for ys in product(*(sorted(s, key=term_key) for s in sets)))


# -- the speedup task -----------------------------------------------------------------

class SpeedupTask(TaskSpec):
    """A speedup task together with the builder that produced it."""

    def __init__(self, I, O, delta, builder, name, notes=()):
        super().__init__(I, O, delta, name, {"base": builder.task.name}, notes)
        self.builder = builder

    @property
    def empty(self):
        return self.O.is_empty()


def build_speedup_task(task, model, config=None):
    """(I, O', Delta') with O' generated by every full tuple passing the tests."""
    builder = SpeedupBuilder(task, model, config)
    facets = builder.enumerate_facets()
    O2 = Complex(maximal(facets), n=builder.n) if facets else Complex((), n=builder.n)
    groups = {}
    if facets:
        for tau in O2.simplices:
            key = frozenset((i, v[0]) for i, v in tau)
            groups.setdefault(key, []).append(tau)
    delta = {}
    for sigma in task.I.sorted_simplices():
        delta[sigma] = frozenset(groups.get(sigma, ()))
    notes = ["table entries cover channels occurring in the model, not every subset of names"]
    if not facets:
        notes.append("the speedup output complex is empty")
    return SpeedupTask(task.I, O2, delta, builder, task.name + "'", notes)


def enumerate_vertex_values(task, model, i, config=None):
    return SpeedupBuilder(task, model, config).vertex_values(i)


def entry_families(values, key=None):
    """Distinct families appearing in the tables of ``values``."""
    out = set()
    for v in values:
        for k, fam in v[1]:
            if key is None or k == key:
                out.add(fam)
    return sorted(out, key=family_key)


def make_value(builder, i, x, default, by_channel=None):
    """Value of process i with every entry ``default`` except channels
    listed in ``by_channel`` (channel label -> family)."""
    by_channel = by_channel or {}
    table = {}
    for E in builder.patterns[i]:
        for e in builder.channels[i]:
            lab = channel_label(e, i)
            table[builder.key(i, e, E)] = frozenset(
                frozenset(s) for s in by_channel.get(lab, default))
    return (x, tuple(sorted(table.items(), key=term_key)))


def render_table(value):
    """One line per table entry: channel / pattern -> family."""
    x, table = value
    lines = [f"input {format_term(x)}"]
    for (ch, pat), fam in table:
        chs = ch if ch == "self" else "".join(str(k) for k in ch)
        pats = ",".join(p if p == "self" else "".join(str(k) for k in p) for p in pat)
        lines.append(f"  [{chs} | {pats}] {format_family(fam)}")
    return "\n".join(lines)


def render_stables(task2):
    """Auxiliary section listing the vertex tables of O'."""
    lines = ["S-TABLES"]
    for i, v in task2.O.vertices():
        lines.append(f"vertex {i}: " + render_table(v).replace("\n", "\n    "))
    return "\n".join(lines) + "\n"


# -- alpha: from a t-round map to a (t-1)-round speedup solution -----------------------

class AlphaResult:
    def __init__(self, mapping, mode, t, independence, failures):
        self.mapping = mapping
        self.mode = mode
        self.t = t
        self.independence = independence
        self.failures = failures

    @property
    def valid(self):
        return not self.failures

    def as_map(self):
        return SimplicialMapDelta(self.mapping, self.mode)

    def render(self):
        lines = [f"alpha on P^({self.t - 1}): {'valid' if self.valid else 'INVALID'}",
                 f"independence at t={self.t - 1}: {self.independence.verdict}"]
        lines += [f"failure: {f}" for f in self.failures]
        return "\n".join(lines) + "\n"


def alpha_from_delta(delta, task, model, t, builder=None, config=None, strict=False):
    """Build alpha on the vertices of P^(t-1) from a valid t-round map.

    Entry (e, E) of process i at view v collects, over every simplex sigma
    on the names of e through (i, v), the outputs delta gives i after one
    more round with pattern E when the processes of e hold sigma.
    """
    from .checkers import check_t_independence
    if t < 1:
        raise BadParams("alpha needs t >= 1")
    mode = delta.mode
    builder = builder or SpeedupBuilder(task, model, config)
    prev = protocol_complex(task.I, model, t - 1, mode)
    cur = protocol_complex(task.I, model, t, mode)
    cur_vertices = set(cur.complex.vertices())
    K = prev.complex
    indep = check_t_independence(task.I, model, t - 1, mode, protocol=prev)
    mapping = {}
    for (i, v) in K.vertices():
        table = {}
        stars = [F for F in K.facets_containing((i, v))]
        for E in builder.patterns[i]:
            J = receives_from(E)
            for e in builder.channels[i]:
                fam = set()
                sigmas = {frozenset(w for w in F if w[0] in e) for F in stars if e <= names(F)}
                for sigma in sorted(sigmas, key=simplex_key):
                    outs = set()
                    for F in stars:
                        if sigma <= F and J <= names(F):
                            w = view_of(i, E, dict(F), mode)
                            if (i, w) in cur_vertices:
                                outs.add(delta(i, w))
                    fam.add(frozenset(outs))
                table[builder.key(i, e, E)] = frozenset(fam)
        mapping[(i, v)] = (input_of(v), tuple(sorted(table.items(), key=term_key)))
    failures = []
    for (i, v), val in sorted(mapping.items(), key=lambda kv: vertex_key(kv[0])):
        why = builder.vertex_failure(i, val)
        if why:
            failures.append(f"vertex ({i}, {format_term(v)}): {why}")
            break
    if failures and not indep.holds and strict:
        raise IndependenceViolated(failures[0])
    for F in K.facets:
        vals = {i: mapping[(i, v)] for i, v in F}
        if len(vals) == builder.n:
            why = builder.facet_failure(vals)
            if why:
                failures.append(f"facet {format_simplex(F)}: {why}")
                break
    if mode == ANONYMOUS:
        seen = {}
        for (i, v), val in sorted(mapping.items(), key=lambda kv: vertex_key(kv[0])):
            if v in seen and seen[v] != val:
                failures.append(f"view {format_term(v)} gets different values at different names")
                break
            seen[v] = val
    return AlphaResult(mapping, mode, t, indep, failures)


# -- beta: one extra round turns a speedup solution into a solution ------------------

class BetaResult:
    def __init__(self, outputs, valid, detail=""):
        self.outputs = outputs
        self.valid = valid
        self.detail = detail

    def simplex(self):
        return frozenset(self.outputs.items())


def beta_outputs(builder, prior, phi):
    """Outputs after one exchange round under ``phi`` (dict name -> value)."""
    pats = dict(phi)
    outputs = {}
    for i in sorted(pats):
        Ei = pats[i]
        inter = None
        for e in sorted(Ei, key=_chan_order):
            heard = {k: prior[k] for k in e}
            sel = builder.joint_selector(e, heard)
            if sel is None or (i, Ei) not in sel:
                raise EmptyIntersection(
                    f"process {i}: no witness selection on channel "
                    f"{format_term(tuple(sorted(e)))}")
            S = set(sel[(i, Ei)])
            inter = S if inter is None else inter & S
        if not inter:
            raise EmptyIntersection(f"process {i}: the chosen sets do not intersect")
        outputs[i] = min(inter, key=term_key)
    return outputs


def beta_one_round(task, model, prior, sigma, phi=None, builder=None, config=None,
                   check_edge=True):
    """Run the completion round from a speedup output ``prior`` on input sigma."""
    from .checkers import check_edge_checkability
    if check_edge:
        ec = check_edge_checkability(task, model)
        if not ec.holds:
            raise NotEdgeCheckable("the task is not edge-checkable: " + ec.render().strip())
    builder = builder or SpeedupBuilder(task, model, config)
    if phi is None:
        pats = model.closed_patterns(names(sigma))
        if not pats:
            raise BadParams("no closed pattern on the names of sigma")
        phi = pats[0]
    outputs = beta_outputs(builder, prior, phi)
    tau = frozenset(outputs.items())
    ok = task.allows(sigma, tau)
    detail = "" if ok else f"{format_simplex(tau)} is not in Delta({format_simplex(sigma)})"
    return BetaResult(outputs, ok, detail)


def beta_from_view(builder, i, view):
    """Constructive beta as a map on name-aware round-1 views of O' values."""
    E = []
    prior = {}
    for label, fam in view[1]:
        e = frozenset((i,)) if label == "self" else frozenset(label)
        E.append(e)
        for ref, sub in fam:
            prior[ref] = sub
    return beta_outputs(builder, prior, frozenset([(i, frozenset(E))]))[i]


def check_constructive_beta(task, task2, model, builder):
    """Run beta on every closed sigma, tau' in Delta'(sigma) and closed phi."""
    closed = model.closed_simplices()
    checked = 0
    for sigma in task.I.sorted_simplices():
        pats = closed.get(names(sigma))
        if not pats:
            continue
        for tau2 in sorted(task2.delta_of(sigma), key=simplex_key):
            prior = dict(tau2)
            for phi in pats:
                checked += 1
                try:
                    out = beta_outputs(builder, prior, phi)
                except EmptyIntersection as exc:
                    return False, f"{format_simplex(sigma)}: {exc}", checked
                tau = frozenset(out.items())
                if not task.allows(sigma, tau):
                    return False, (f"beta gives {format_simplex(tau)} outside "
                                   f"Delta({format_simplex(sigma)})"), checked
    return True, "", checked


def search_beta(task, task2, model, node_budget=200_000):
    """Search any simplicial beta on Xi(O') with beta(Xi(Delta'(sigma))) in Delta(sigma)."""
    closed = model.closed_simplices()
    cons = []
    verts = set()
    for sigma in task.I.sorted_simplices():
        pats = closed.get(names(sigma))
        if not pats:
            continue
        allowed = task.delta_of(sigma)
        for tau2 in sorted(task2.delta_of(sigma), key=simplex_key):
            for phi in pats:
                img = xi_step(tau2, phi, NAME_AWARE)
                verts.update(img)
                cons.append((img, allowed))
    keys = sorted(verts, key=vertex_key)
    index = {v: k for k, v in enumerate(keys)}
    domains = [task.O.values(v[0]) for v in keys]
    constraints = []
    for img, allowed in cons:
        ordered_img = ordered(img)
        scope = tuple(index[v] for v in ordered_img)
        tuples = [tuple(dict(a)[v[0]] for v in ordered_img) for a in allowed]
        constraints.append((scope, tuples))
    csp = TableCSP(domains, constraints)
    sol = csp.solve(node_budget)
    if sol is None:
        return None, csp.stats
    return {keys[k]: sol[k] for k in range(len(keys))}, csp.stats


# -- the speedup relation ----------------------------------------------------------------

class PairReport:
    def __init__(self):
        self.rows = []
        self.beta = None
        self.beta_detail = ""

    @property
    def holds(self):
        return all(r["biconditional"] for r in self.rows if r["biconditional"] is not None)

    def render(self):
        lines = []
        for r in self.rows:
            lines.append(
                f"t={r['t']}: task {r['task']} / speedup at t-1 {r['speedup']} -> "
                f"{'ok' if r['biconditional'] else ('n/a' if r['biconditional'] is None else 'MISMATCH')}"
                f" (independence t-1: {r['independence']}, edge-checkable: {r['edge']})")
        lines.append(f"beta: {self.beta}{' ' + self.beta_detail if self.beta_detail else ''}")
        lines.append("biconditional: " + ("HOLDS" if self.holds else "FAILS"))
        return "\n".join(lines) + "\n"


def verify_speedup_pair(task, task2, model, t_max, mode=ANONYMOUS, node_budget=200_000,
                        builder=None):
    """Check solvable(task, t) <=> solvable(task2, t-1) for t = 1..t_max, and
    look for a completion map beta (constructive first, then by search)."""
    from .checkers import check_edge_checkability, check_t_independence
    builder = builder or getattr(task2, "builder", None)
    rep = PairReport()
    edge = check_edge_checkability(task, model).verdict
    for t in range(0, t_max + 1):
        s = solve(task, model, t, mode, node_budget).status
        if t == 0:
            rep.rows.append({"t": 0, "task": s, "speedup": "-", "biconditional": None,
                             "independence": "-", "edge": edge})
            continue
        s2 = solve(task2, model, t - 1, mode, node_budget).status
        known = s != "BUDGET_EXCEEDED" and s2 != "BUDGET_EXCEEDED"
        ind = check_t_independence(task.I, model, t - 1, mode).verdict
        rep.rows.append({"t": t, "task": s, "speedup": s2,
                         "biconditional": ((s == SOLVABLE) == (s2 == SOLVABLE)) if known else None,
                         "independence": ind, "edge": edge})
    if builder is not None:
        ok, detail, checked = check_constructive_beta(task, task2, model, builder)
        if ok:
            rep.beta = "constructive"
            rep.beta_detail = f"({checked} completions checked)"
            return rep
        rep.beta_detail = f"(constructive failed: {detail})"
    try:
        found, stats = search_beta(task, task2, model, node_budget)
    except BudgetExceeded:
        rep.beta = "unknown"
        return rep
    rep.beta = "search" if found is not None else "none"
    return rep


class ExtractionReport:
    def __init__(self, mapping, stats):
        self.mapping = mapping
        self.stats = stats

    @property
    def found(self):
        return self.mapping is not None

    def render(self):
        if not self.found:
            return "extraction: NONE\n"
        lines = [f"extraction: FOUND ({len(self.mapping)} values)"]
        return "\n".join(lines) + "\n"


def _extraction_constraints(task, task2, model, scope):
    closed = model.closed_simplices()
    full = frozenset(range(1, model.n + 1))
    cons = []
    for sigma in task.I.sorted_simplices():
        if names(sigma) not in closed:
            continue
        if scope == "facets" and names(sigma) != full:
            continue
        allowed = task.delta_of(sigma)
        for tau2 in sorted(task2.delta_of(sigma), key=simplex_key):
            cons.append((tau2, allowed))
    return cons


def check_includes_original(task, task2, model, mode=ANONYMOUS, node_budget=200_000,
                            scope="facets"):
    """Zero-round extraction O' value -> output (one output per class).

    With ``scope="facets"`` every Delta'-valid full simplex must map into
    Delta; ``scope="closed"`` also requires it on closed faces (solo runs).
    """
    if scope not in ("facets", "closed"):
        raise BadParams("scope must be 'facets' or 'closed'")
    cons = _extraction_constraints(task, task2, model, scope)
    verts = sorted({v for tau2, _ in cons for v in tau2}, key=vertex_key)
    key = (lambda v: v[1]) if mode == ANONYMOUS else (lambda v: v)
    classes = {}
    for v in verts:
        classes.setdefault(key(v), []).append(v)
    ckeys = sorted(classes, key=term_key)
    index = {}
    domains = []
    for k, ck in enumerate(ckeys):
        dom = None
        for v in classes[ck]:
            vals = set(task.O.values(v[0]))
            dom = vals if dom is None else dom & vals
            index[v] = k
        domains.append(sorted(dom, key=term_key))
    constraints = []
    for tau2, allowed in cons:
        o = ordered(tau2)
        scope = tuple(index[v] for v in o)
        constraints.append((scope, [tuple(dict(a)[v[0]] for v in o) for a in allowed]))
    csp = TableCSP(domains, constraints)
    sol = csp.solve(node_budget)
    if sol is None:
        return ExtractionReport(None, csp.stats)
    mapping = {}
    for k, ck in enumerate(ckeys):
        for v in classes[ck]:
            mapping[v] = sol[k]
    return ExtractionReport(mapping, csp.stats)


def verify_extraction(task, task2, model, extract, scope="facets"):
    """Check a candidate extraction given as a function (name, value) -> output."""
    for tau2, allowed in _extraction_constraints(task, task2, model, scope):
        img = frozenset((i, extract(i, v)) for i, v in tau2)
        if img not in allowed:
            return False
    return True


DESIGNATED = ("self", ("self",))


def designated_pair(facet):
    """Self entries under the solo pattern, in name order."""
    return tuple(table_of(v).get(DESIGNATED) for _, v in ordered(facet))


# -- iteration ---------------------------------------------------------------------------

class IterationStep:
    def __init__(self, index, task, edge, independence, error=None):
        self.index = index
        self.task = task
        self.edge = edge
        self.independence = independence
        self.error = error


def iterate_speedup(task, model, r, t=None, config=None, mode=ANONYMOUS):
    """Apply the construction r times, re-checking the hypotheses each step.

    ``t`` is the round count the chain is meant to eliminate (default r);
    step s needs (t-s-1)-independence of I and edge-checkability of the
    current task.  Failing hypotheses are reported with HypothesisLost
    entries; exceeding a cap stops the chain with the BudgetExceeded error.
    """
    from .checkers import check_edge_checkability, check_t_independence
    t = r if t is None else t
    steps = []
    current = task
    for s in range(r):
        edge = check_edge_checkability(current, model)
        need = t - s - 1
        ind = check_t_independence(task.I, model, need, mode) if need >= 0 else None
        lost = []
        if not edge.holds:
            lost.append(HypothesisLost(f"step {s}: task not edge-checkable"))
        if ind is not None and not ind.holds:
            lost.append(HypothesisLost(f"step {s}: I is not {need}-independent"))
        try:
            nxt = build_speedup_task(current, model, config)
        except BudgetExceeded as exc:
            steps.append(IterationStep(s, current, edge, ind, exc))
            break
        step = IterationStep(s, nxt, edge, ind, lost[0] if lost else None)
        steps.append(step)
        current = nxt
    return current, steps
