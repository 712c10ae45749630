"""Built-in tasks, models and the worked demos behind ``topospeed demo``."""

from itertools import combinations

from .checkers import (check_edge_checkability, check_local_checkability,
                       check_t_independence, ld_to_edge_transform)
from .complexes import format_simplex, names, ordered
from .errors import BadParams, BudgetExceeded
from .models import cycle, directed_cycle, h_local, local, serialize_model, two_stars, wait_free
from .protocol import ANONYMOUS, NAME_AWARE, compact_view
from .reports import Report
from .solver import solve, verify_map
from .speedup import (alpha_from_delta, beta_one_round, build_speedup_task,
                      check_includes_original, designated_pair, entry_families, format_family,
                      iterate_speedup, make_value, verify_speedup_pair)
from .tasks import (consensus, fig2, gmis, k_coloring, mis, perfect_renaming,
                    serialize_task, trivial, two_star_coloring)

HYPERTREE = [(1, 2, 3), (3, 4, 5)]
PATH5 = [(1, 2), (2, 3), (3, 4), (4, 5)]


def clique_edges(hyperedges):
    return sorted({p for h in hyperedges for p in combinations(sorted(h), 2)})


BUILTIN_TASKS = {
    "consensus2": lambda: consensus(2),
    "renaming2": lambda: perfect_renaming(2),
    "fig2": fig2,
    "coloring_c4": lambda: k_coloring(4, cycle(4), 3),
    "mis_c4": lambda: mis(4, cycle(4)),
    "twostar": lambda: two_star_coloring(3),
    "hypertree_coloring": lambda: k_coloring(5, clique_edges(HYPERTREE), 3),
    "gmis_hypertree": lambda: gmis(5, HYPERTREE),
    "mis_path5": lambda: mis(5, PATH5),
    "trivial2": lambda: trivial(2),
}

BUILTIN_MODELS = {
    "waitfree2": lambda: wait_free(2),
    "waitfree3": lambda: wait_free(3),
    "c3": lambda: local(3, directed_cycle(3), directed=True),
    "c4": lambda: local(4, cycle(4)),
    "twostar3": lambda: local(6, two_stars(3)),
    "hypertree": lambda: h_local(5, HYPERTREE),
    "path5": lambda: h_local(5, PATH5),
}


def builtin(table, name, what):
    if name not in table:
        raise BadParams(f"unknown built-in {what} {name!r}; known: {', '.join(sorted(table))}")
    return table[name]()


def _describe(report, task, model, task_label, model_label):
    report.add_input(f"task:{task_label}", serialize_task(task))
    report.add_input(f"model:{model_label}", serialize_model(model))


def _solve_line(report, key, task, model, t, mode, budget):
    res = solve(task, model, t, mode, budget)
    report.set_status(key, res.status)
    return res


# -- demos ------------------------------------------------------------------------

def demo_fig2(budget):
    rep = Report("demo fig2")
    T = fig2()
    M = BUILTIN_MODELS["c3"]()
    _describe(rep, T, M, "fig2", "c3")
    for mode in (ANONYMOUS, NAME_AWARE):
        r0 = _solve_line(rep, f"solve t=0 {mode}", T, M, 0, mode, budget)
        rep.expect(f"solve t=0 {mode}", "UNSOLVABLE", r0.status)
    r1 = _solve_line(rep, "solve t=1 name-aware", T, M, 1, NAME_AWARE, budget)
    rep.expect("solve t=1 name-aware", "SOLVABLE", r1.status)
    if r1.delta is not None:
        vm = verify_map(r1.delta, T, M, 1)
        rep.expect("witness map valid", True, vm.valid)
        rep.section("round-1 decision map", "\n".join(
            f"{i}:{compact_view(v)} -> {y}" for (i, v), y in r1.delta.items()))
    ind0 = check_t_independence(T.I, M, 0)
    ind1 = check_t_independence(T.I, M, 1, collect=True)
    rep.expect("0-independence", "HOLDS", ind0.verdict)
    rep.expect("1-independence", "FAILS", ind1.verdict)
    unions = [f["union"] for f in ind1.stats.get("failures", [])]
    rep.expect("rainbow witness among failures", True, "{(1,BR), (2,RB), (3,RG)}" in unions)
    rep.section("1-independence", ind1.render())
    edge = check_edge_checkability(T, M)
    rep.expect("edge-checkability", "HOLDS", edge.verdict)
    T2 = build_speedup_task(T, M)
    b = T2.builder
    fams = [format_family(f) for f in entry_families(b.vertex_values(1))]
    rep.expect("process 1 entry families", "{},{{B}}", ",".join(fams))
    example = example_facet(b, "R", "G")
    rep.expect("worked example tuple is a facet", True,
               b.facet_failure(example) is None and frozenset(example.items()) in T2.O)
    rep.section("speedup task", f"O' facets: {len(T2.O.facets)}\n"
                f"vertex values per process: {b.stats['vertex_values']}")
    s0 = _solve_line(rep, "speedup solve t=0 name-aware", T2, M, 0, NAME_AWARE, budget)
    rep.expect("speedup solve t=0 name-aware", "SOLVABLE", s0.status)
    pair = verify_speedup_pair(T, T2, M, 1, NAME_AWARE, budget)
    rep.section("speedup pair", pair.render())
    rep.expect("biconditional", True, pair.holds)
    if r1.delta is not None:
        ok, lines = alpha_beta_roundtrip(T, M, r1.delta, b)
        rep.section("alpha then beta", "\n".join(lines))
        rep.expect("alpha/beta round trip on all input facets", True, ok)
    return rep


def example_facet(builder, x2, x3):
    """The tuple with S_1 all {{B}}, S_2 all {{x2}} and S_3 mixing {{R,G}}
    with {{R},{G}} on the channel 3 hears 2 through."""
    return {
        1: make_value(builder, 1, "B", [{"B"}]),
        2: make_value(builder, 2, x2, [{x2}]),
        3: make_value(builder, 3, x3, [{"R", "G"}], {(2, 3): [{"R"}, {"G"}]}),
    }


def alpha_beta_roundtrip(task, model, delta, builder):
    """alpha on P^(0) from delta, then one beta round on every input facet."""
    alpha = alpha_from_delta(delta, task, model, 1, builder=builder)
    ok = alpha.valid
    lines = [alpha.render().rstrip()]
    phi = model.closed_patterns(frozenset(range(1, model.n + 1)))[0]
    for sigma in task.I.facets:
        prior = {i: alpha.mapping[(i, x)] for i, x in sigma}
        res = beta_one_round(task, model, prior, sigma, phi, builder=builder)
        ok = ok and res.valid
        lines.append(f"{format_simplex(sigma)} -> {format_simplex(res.simplex())} "
                     f"{'valid' if res.valid else 'INVALID'}")
    return ok, lines


def demo_renaming2(budget):
    rep = Report("demo renaming2")
    T = perfect_renaming(2)
    M = wait_free(2)
    _describe(rep, T, M, "renaming2", "waitfree2")
    for t in (0, 1, 2):
        r = _solve_line(rep, f"solve t={t}", T, M, t, ANONYMOUS, budget)
        rep.expect(f"solve t={t}", "UNSOLVABLE", r.status)
    for t in (0, 1, 2):
        rep.expect(f"{t}-independence", "HOLDS", check_t_independence(T.I, M, t).verdict)
    rep.expect("edge-checkability", "HOLDS", check_edge_checkability(T, M).verdict)
    T2 = build_speedup_task(T, M)
    pairs = sorted({tuple(format_family(f) for f in designated_pair(F)) for F in T2.O.facets})
    rep.section("designated pairs", "\n".join(" ".join(p) for p in pairs))
    rep.expect("designated pairs", "[('{{0}}', '{{1}}'), ('{{1}}', '{{0}}')]", str(pairs))
    ext = check_includes_original(T, T2, M, node_budget=budget)
    rep.expect("extraction", True, ext.found)
    pair = verify_speedup_pair(T, T2, M, 2, ANONYMOUS, budget)
    rep.section("speedup pair", pair.render())
    rep.expect("biconditional", True, pair.holds)
    rep.section("conclusion", "perfect renaming for 2 processes: solving the speedup task "
                "includes solving renaming one round faster, and 0 rounds is impossible, "
                "so no round count suffices")
    return rep


def demo_consensus2(budget):
    rep = Report("demo consensus2")
    T = consensus(2)
    M = wait_free(2)
    _describe(rep, T, M, "consensus2", "waitfree2")
    for t in (0, 1, 2):
        r = _solve_line(rep, f"solve t={t}", T, M, t, ANONYMOUS, budget)
        rep.expect(f"solve t={t}", "UNSOLVABLE", r.status)
    lc = check_local_checkability(T, M)
    rep.expect("local checkability", "FAILS", lc.verdict)
    rep.section("local checkability", lc.render())
    rep.expect("edge-checkability", "FAILS", check_edge_checkability(T, M).verdict)
    T2 = build_speedup_task(T, M)
    ext = check_includes_original(T, T2, M, node_budget=budget)
    rep.expect("extraction on full simplices", True, ext.found)
    strict = check_includes_original(T, T2, M, node_budget=budget, scope="closed")
    rep.set_status("extraction including solo runs", "FOUND" if strict.found else "NONE")
    rep.section("conclusion", "consensus for 2 processes: the speedup task includes "
                "consensus on full simplices, so a t-round algorithm would give a "
                "(t-1)-round one down to 0 rounds, where consensus is impossible")
    return rep


def demo_twostar(budget):
    rep = Report("demo twostar")
    T = two_star_coloring(3)
    M = BUILTIN_MODELS["twostar3"]()
    _describe(rep, T, M, "twostar", "twostar3")
    rep.expect("input facets", 96, len(T.I.facets))
    rep.expect("0-independence", "HOLDS", check_t_independence(T.I, M, 0).verdict)
    rep.expect("edge-checkability", "HOLDS", check_edge_checkability(T, M).verdict)
    r0 = _solve_line(rep, "solve t=0", T, M, 0, ANONYMOUS, budget)
    rep.expect("solve t=0", "SOLVABLE", r0.status)
    try:
        build_speedup_task(T, M)
        rep.set_status("speedup", "BUILT")
    except BudgetExceeded as exc:
        rep.set_status("speedup", "BUDGET_EXCEEDED")
        rep.section("speedup", str(exc))
    return rep


def demo_hypertree(budget):
    rep = Report("demo hypertree")
    T = BUILTIN_TASKS["hypertree_coloring"]()
    M = BUILTIN_MODELS["hypertree"]()
    _describe(rep, T, M, "hypertree_coloring", "hypertree")
    rep.expect("0-independence", "HOLDS", check_t_independence(T.I, M, 0).verdict)
    rep.expect("1-independence", "HOLDS", check_t_independence(T.I, M, 1).verdict)
    rep.expect("edge-checkability", "HOLDS", check_edge_checkability(T, M).verdict)
    r0 = _solve_line(rep, "solve t=0 anonymous", T, M, 0, ANONYMOUS, budget)
    rep.expect("solve t=0 anonymous", "UNSOLVABLE", r0.status)
    r1 = _solve_line(rep, "solve t=0 name-aware", T, M, 0, NAME_AWARE, budget)
    rep.expect("solve t=0 name-aware", "SOLVABLE", r1.status)
    _, steps = iterate_speedup(T, M, 1)
    for s in steps:
        ind = s.independence.verdict if s.independence is not None else "-"
        rep.section(f"iteration step {s.index}",
                    f"edge-checkable: {s.edge.verdict}\nindependence: {ind}\n"
                    f"stopped: {s.error if s.error else '-'}")
        rep.set_status(f"iteration step {s.index}",
                       "BUDGET_EXCEEDED" if isinstance(s.error, BudgetExceeded) else "BUILT")
    return rep


def demo_ld_transform(budget):
    rep = Report("demo ld-transform")
    T = BUILTIN_TASKS["mis_path5"]()
    M = BUILTIN_MODELS["path5"]()
    _describe(rep, T, M, "mis_path5", "path5")
    rep.expect("local checkability", "HOLDS", check_local_checkability(T, M).verdict)
    edge = check_edge_checkability(T, M)
    rep.expect("edge-checkability before", "FAILS", edge.verdict)
    rep.section("edge-checkability before", edge.render())
    tr = ld_to_edge_transform(T, M)
    rep.expect("edge-checkability after", "HOLDS",
               check_edge_checkability(tr.task, M).verdict)
    ok, lines = ld_roundtrip(tr)
    rep.section("forward then backward", "\n".join(lines))
    rep.expect("round trip", True, ok)
    return rep


def ld_roundtrip(tr):
    """forward on every valid full output, then backward; both must be valid."""
    ok = True
    lines = []
    T = tr.base
    full = frozenset(range(1, T.n + 1))
    for sigma in T.I.facets:
        for tau in sorted(T.delta_of(sigma), key=lambda s: ordered(s)):
            if names(tau) != full:
                continue
            out2 = tr.forward(sigma, dict(tau))
            good2 = tr.task.allows(sigma, frozenset(out2.items()))
            back = frozenset(tr.backward(out2).items())
            good = T.allows(sigma, back)
            ok = ok and good2 and good
            lines.append(f"{format_simplex(tau)}: forward {'valid' if good2 else 'INVALID'}, "
                         f"backward {format_simplex(back)} {'valid' if good else 'INVALID'}")
    return ok, lines


DEMOS = {
    "fig2": demo_fig2,
    "renaming2": demo_renaming2,
    "consensus2": demo_consensus2,
    "twostar": demo_twostar,
    "hypertree": demo_hypertree,
    "ld-transform": demo_ld_transform,
}
