"""One test per acceptance criterion; each prints a single PASS/FAIL line.

Runtime limits are pinned per criterion (seconds, wall clock) and checked
together with the expected values.
"""

import random
import time

import pytest

from oracles import brute_protocol, snapshot_views
from topospeed.checkers import (check_edge_checkability, check_local_checkability,
                                check_t_independence, ld_to_edge_transform)
from topospeed.cli import run
from topospeed.complexes import closure, faces, maximal, pseudosphere, skeleton, star_closure
from topospeed.demos import (BUILTIN_MODELS, BUILTIN_TASKS, DEMOS, alpha_beta_roundtrip,
                             example_facet, ld_roundtrip)
from topospeed.models import wait_free
from topospeed.protocol import ANONYMOUS, MODES, NAME_AWARE, protocol_complex
from topospeed.solver import solve, verify_map
from topospeed.speedup import (build_speedup_task, check_includes_original, designated_pair,
                               entry_families, format_family, verify_speedup_pair)
from topospeed.tasks import consensus, perfect_renaming

LIMITS = {1: 1.0, 2: 10.0, 3: 10.0, 4: 60.0, 5: 60.0, 6: 5.0, 7: 10.0, 8: 5.0, 9: 30.0,
          10: 60.0}


@pytest.fixture
def report(capsys):
    def finish(number, title, checks, start):
        elapsed = time.perf_counter() - start
        failed = [name for name, ok in checks if not ok]
        in_time = elapsed < LIMITS[number]
        ok = not failed and in_time
        with capsys.disabled():
            print(f"\nACCEPTANCE {number:2d} {'PASS' if ok else 'FAIL'} {title} "
                  f"({elapsed:.2f}s, limit {LIMITS[number]:.0f}s)"
                  + (f" failed: {', '.join(failed)}" if failed else "")
                  + ("" if in_time else " over time"))
        assert not failed, failed
        assert in_time, f"{elapsed:.2f}s > {LIMITS[number]}s"
    return finish


def triangle_setup():
    return BUILTIN_TASKS["fig2"](), BUILTIN_MODELS["c3"]()


def test_criterion_01_triangle_round_counts(report):
    start = time.perf_counter()
    T, M = triangle_setup()
    checks = []
    for mode in MODES:
        checks.append((f"t=0 {mode}", solve(T, M, 0, mode).status == "UNSOLVABLE"))
        r1 = solve(T, M, 1, mode)
        checks.append((f"t=1 {mode}", r1.status == "SOLVABLE"))
        checks.append((f"witness {mode}", r1.delta is not None
                       and verify_map(r1.delta, T, M, 1).valid))
    report(1, "triangle unsolvable at 0 rounds, solvable at 1", checks, start)


def test_criterion_02_triangle_speedup_task(report):
    start = time.perf_counter()
    T, M = triangle_setup()
    T2 = build_speedup_task(T, M)
    b = T2.builder
    ex = example_facet(b, "R", "G")
    fams = sorted(format_family(f) for f in entry_families(b.vertex_values(1)))
    pair = verify_speedup_pair(T, T2, M, 1, NAME_AWARE)
    checks = [
        ("example facet", b.facet_failure(ex) is None and frozenset(ex.items()) in T2.O),
        ("process 1 families", fams == ["{{B}}", "{}"]),
        ("speedup solvable at 0", solve(T2, M, 0, NAME_AWARE).status == "SOLVABLE"),
        ("biconditional t=1", pair.holds and pair.rows[1]["biconditional"] is True),
    ]
    report(2, "triangle speedup task", checks, start)


def test_criterion_03_independence(report):
    start = time.perf_counter()
    T, M = triangle_setup()
    r1 = check_t_independence(T.I, M, 1, collect=True)
    unions = [f["union"] for f in r1.stats["failures"]]
    star, star_model = BUILTIN_TASKS["twostar"](), BUILTIN_MODELS["twostar3"]()
    checks = [
        ("fig2 t=0", check_t_independence(T.I, M, 0).holds),
        ("fig2 t=1 fails", not r1.holds),
        ("fig2 witness", "{(1,BR), (2,RB), (3,RG)}" in unions),
        ("two-star t=0", check_t_independence(star.I, star_model, 0).holds),
    ]
    for name in ("consensus2", "renaming2", "trivial2"):
        I = BUILTIN_TASKS[name]().I
        for t in (0, 1, 2):
            checks.append((f"{name} t={t}", check_t_independence(I, wait_free(2), t).holds))
    report(3, "independence suite", checks, start)


def test_criterion_04_renaming_chain(report):
    start = time.perf_counter()
    T, M = perfect_renaming(2), wait_free(2)
    checks = [(f"t={t}", solve(T, M, t, ANONYMOUS).status == "UNSOLVABLE") for t in (0, 1, 2)]
    T2 = build_speedup_task(T, M)
    pairs = {tuple(format_family(f) for f in designated_pair(F)) for F in T2.O.facets}
    checks.append(("designated pairs", pairs == {("{{0}}", "{{1}}"), ("{{1}}", "{{0}}")}))
    checks.append(("extraction", check_includes_original(T, T2, M).found))
    report(4, "perfect renaming chain", checks, start)


def test_criterion_05_consensus(report):
    start = time.perf_counter()
    T, M = consensus(2), wait_free(2)
    checks = [(f"t={t}", solve(T, M, t, ANONYMOUS).status == "UNSOLVABLE") for t in (0, 1, 2)]
    T2 = build_speedup_task(T, M)
    checks.append(("extraction", check_includes_original(T, T2, M).found))
    checks.append(("not locally checkable", not check_local_checkability(T, M).holds))
    report(5, "consensus chain", checks, start)


def test_criterion_06_checkability(report):
    start = time.perf_counter()
    col = BUILTIN_TASKS["coloring_c4"](), BUILTIN_MODELS["c4"]()
    mis = BUILTIN_TASKS["mis_c4"](), BUILTIN_MODELS["c4"]()
    checks = [
        ("3-coloring edge", check_edge_checkability(*col).holds),
        ("MIS local", check_local_checkability(*mis).holds),
        ("MIS not edge", not check_edge_checkability(*mis).holds),
    ]
    pairs = [("consensus2", "waitfree2"), ("renaming2", "waitfree2"), ("fig2", "c3"),
             ("coloring_c4", "c4"), ("mis_c4", "c4"), ("twostar", "twostar3"),
             ("hypertree_coloring", "hypertree"), ("gmis_hypertree", "hypertree"),
             ("mis_path5", "path5"), ("trivial2", "waitfree2")]
    for t, m in pairs:
        task, model = BUILTIN_TASKS[t](), BUILTIN_MODELS[m]()
        edge = check_edge_checkability(task, model).holds
        checks.append((f"edge=>local {t}", not edge or check_local_checkability(task, model).holds))
    report(6, "checkability suite", checks, start)


def test_criterion_07_ld_transform(report):
    start = time.perf_counter()
    T, M = BUILTIN_TASKS["mis_path5"](), BUILTIN_MODELS["path5"]()
    tr = ld_to_edge_transform(T, M)
    ok, _ = ld_roundtrip(tr)
    checks = [("5 nodes", M.n <= 6),
              ("edge-checkable after", check_edge_checkability(tr.task, M).holds),
              ("forward then backward", ok)]
    report(7, "hypergraph transform", checks, start)


def test_criterion_08_alpha_beta(report):
    start = time.perf_counter()
    T, M = triangle_setup()
    T2 = build_speedup_task(T, M)
    delta = solve(T, M, 1, NAME_AWARE).delta
    ok, _ = alpha_beta_roundtrip(T, M, delta, T2.builder)
    checks = [("input facets", len(T.I.facets) == 4), ("round trip", ok)]
    report(8, "alpha then beta on the triangle", checks, start)


def test_criterion_09_structure(report):
    start = time.perf_counter()
    checks = []
    for n in (1, 2, 3):
        for k in (1, 2, 3):
            S = pseudosphere(n, range(k))
            checks.append((f"pseudosphere {n},{k}", len(S.facets) == k ** n
                           and len(S.simplices) == (k + 1) ** n - 1))
    rng = random.Random(7)
    laws = True
    for _ in range(200):
        ss = [frozenset({i: rng.randrange(3) for i in rng.sample([1, 2, 3], rng.randint(1, 3))}
                        .items()) for _ in range(rng.randint(1, 5))]
        K = closure(ss)
        keep = set(rng.sample([1, 2, 3], rng.randint(1, 3)))
        cof = {s for s in K.simplices if ss[0] <= s}
        laws &= closure(K.facets) == K and set(K.facets) == set(maximal(K.simplices))
        laws &= all(f in K for s in ss for f in faces(s))
        laws &= skeleton(K, keep).simplices == {s for s in K.simplices
                                                if {i for i, _ in s} <= keep}
        laws &= star_closure(K, ss[0]) == closure(cof)
    checks.append(("closure/skeleton/star laws", laws))
    checks.append(("wait-free 3 facets", len(wait_free(3).complex.facets) == 13 == len(snapshot_views(3))))
    renaming = perfect_renaming(2)
    checks.append(("18 facets after one round",
                   len(protocol_complex(renaming.I, wait_free(2), 1).complex.facets) == 18))
    for task, model, t in [(consensus(2), wait_free(2), 2), (renaming, wait_free(2), 1),
                           (BUILTIN_TASKS["fig2"](), BUILTIN_MODELS["c3"](), 1)]:
        P = protocol_complex(task.I, model, t, ANONYMOUS)
        ref = brute_protocol(task, model, t, ANONYMOUS)
        union = closure([f for fs in ref.values() for f in fs])
        sound = P.complex == union and all(
            any(tau <= f for f in ref[s0]) for tau, srcs in P.provenance.items() for s0 in srcs)
        checks.append((f"provenance {task.name} t={t}", sound))
    report(9, "structural properties", checks, start)


def test_criterion_10_determinism(report):
    start = time.perf_counter()
    checks = []
    for name in sorted(DEMOS):
        first = run(["demo", name], stdout=_Sink())
        second = run(["demo", name], stdout=_Sink())
        checks.append((name, first == second and first[0] == 0))
    report(10, "byte-identical demo reports", checks, start)


class _Sink:
    def write(self, text):
        pass
