import pytest
from hypothesis import given, settings, strategies as st

from oracles import snapshot_views
from topospeed.complexes import closure, names, pseudosphere
from topospeed.demos import BUILTIN_MODELS
from topospeed.errors import BadParams, NameMismatch, NotPure, OpenPattern
from topospeed.models import (h_local, local, directed_cycle, receives_from, serialize_model,
                              wait_free, cycle)
from topospeed.protocol import (ANONYMOUS, NAME_AWARE, compact_view, input_of, iterate_from,
                                protocol_complex, view_of, view_round, xi_step)
from topospeed.tasks import consensus, fig2, parse_model_file, perfect_renaming


def heard(model):
    return {frozenset((i, receives_from(E)) for i, E in f) for f in model.complex.facets}


@pytest.mark.parametrize("n,count", [(1, 1), (2, 3), (3, 13)])
def test_wait_free_matches_snapshot_schedules(n, count):
    M = wait_free(n)
    assert len(M.complex.facets) == count
    assert heard(M) == snapshot_views(n)


def test_directed_triangle_reach():
    M = BUILTIN_MODELS["c3"]()
    (f,) = M.complex.facets
    assert {i: receives_from(E) for i, E in f} == {1: {1, 3}, 2: {1, 2}, 3: {2, 3}}
    # only the full name set is closed in a ring
    assert M.closed_name_sets() == [frozenset({1, 2, 3})]
    assert M.is_deterministic()


def test_wait_free_closed_sets_include_solo_runs():
    M = wait_free(2)
    assert M.closed_name_sets() == [frozenset({1}), frozenset({2}), frozenset({1, 2})]
    assert len(M.closed_patterns({1, 2})) == 3


def test_hypergraph_model_single_facet():
    M = h_local(5, [(1, 2, 3), (3, 4, 5)])
    (f,) = M.complex.facets
    assert {i: receives_from(E) for i, E in f}[3] == {1, 2, 3, 4, 5}
    assert {i: receives_from(E) for i, E in f}[1] == {1, 2, 3}


@pytest.mark.parametrize("name", sorted(BUILTIN_MODELS))
def test_model_file_roundtrip(name):
    M = BUILTIN_MODELS[name]()
    again = parse_model_file(serialize_model(M))
    assert again == M
    assert serialize_model(again) == serialize_model(M)


def test_bad_graph_rejected():
    with pytest.raises(BadParams):
        local(3, [(1, 4)])


def test_renaming_inputs_subdivide_into_18_facets():
    P = protocol_complex(perfect_renaming(2).I, wait_free(2), 1)
    assert len(perfect_renaming(2).I.facets) == 6
    assert len(P.complex.facets) == 18


@pytest.mark.parametrize("t,count", [(0, 4), (1, 12), (2, 36)])
def test_binary_inputs_subdivide_by_three(t, count):
    P = protocol_complex(consensus(2).I, wait_free(2), t, NAME_AWARE)
    assert len(P.complex.facets) == count


@pytest.mark.parametrize("task,model,t", [
    (consensus(2), wait_free(2), 2),
    (perfect_renaming(2), wait_free(2), 1),
    (fig2(), local(3, directed_cycle(3), directed=True), 1),
])
@pytest.mark.parametrize("mode", [ANONYMOUS, NAME_AWARE])
def test_provenance_matches_recursive_expansion(task, model, t, mode):
    P = protocol_complex(task.I, model, t, mode)
    closed = set(model.closed_simplices())
    expected = {}
    union = []
    for s0 in task.I.simplices:
        if names(s0) not in closed:
            continue
        ref = iterate_from(s0, model, t, mode)
        union.extend(ref.facets)
        for tau in ref.simplices:
            if names(tau) == names(s0):
                expected.setdefault(tau, set()).add(s0)
    assert {k: set(v) for k, v in P.provenance.items()} == expected
    assert P.complex == closure(union)


def test_anonymous_views_forget_names():
    a = view_of(1, [frozenset({1}), frozenset({1, 2})], {1: 0, 2: 1}, ANONYMOUS)
    b = view_of(2, [frozenset({2}), frozenset({1, 2})], {1: 1, 2: 0}, ANONYMOUS)
    assert a == b
    c = view_of(1, [frozenset({1}), frozenset({1, 2})], {1: 0, 2: 1}, NAME_AWARE)
    d = view_of(2, [frozenset({2}), frozenset({1, 2})], {1: 1, 2: 0}, NAME_AWARE)
    assert c != d


def _anonymise(view, owner):
    """Replace names by first-occurrence indexes (owner first)."""
    local = {owner: 0}
    for _, fam in view[1]:
        for ref, _ in sorted(fam):
            local.setdefault(ref, len(local))
    return ("V", tuple((label, tuple(sorted((local[r], x) for r, x in fam)))
                       for label, fam in view[1]))


channels3 = st.sets(st.sampled_from([frozenset({1, 2}), frozenset({1, 3}),
                                     frozenset({1, 2, 3})]))


@settings(max_examples=60)
@given(channels3, st.lists(st.sampled_from("RGB"), min_size=3, max_size=3))
def test_anonymous_view_is_name_aware_view_without_names(extra, colours):
    E = [frozenset({1})] + sorted(extra, key=sorted)
    vals = dict(zip([1, 2, 3], colours))
    named = view_of(1, E, vals, NAME_AWARE)
    anon = view_of(1, E, vals, ANONYMOUS)
    assert _anonymise(named, 1) == anon
    assert input_of(anon) == vals[1]
    assert view_round(anon) == 1


def test_compact_view_own_input_first():
    M = BUILTIN_MODELS["c3"]()
    (phi,) = M.complex.facets
    img = dict(xi_step(frozenset({(1, "B"), (2, "R"), (3, "G")}), phi))
    assert compact_view(img[1]) == "BG"
    assert compact_view(img[2]) == "RB"


def test_xi_step_errors():
    M = wait_free(2)
    phi = M.closed_patterns({1, 2})[0]
    with pytest.raises(NameMismatch):
        xi_step(frozenset({(1, 0)}), phi)
    (full,) = [p for p in M.complex.facets if all(len(receives_from(E)) == 2 for _, E in p)]
    solo = frozenset(v for v in full if v[0] == 1)
    with pytest.raises(OpenPattern):
        xi_step(frozenset({(1, 0)}), solo)


def test_model_rejects_missing_self_loop():
    from topospeed.models import explicit
    with pytest.raises(NotPure):
        explicit(2, [{1: [[1, 2]], 2: [[2]]}])


def test_pseudosphere_input_runs_on_cycle():
    P = protocol_complex(pseudosphere(4, [0]), local(4, cycle(4)), 2)
    assert len(P.complex.facets) == 1
