import pytest

from oracles import naive_checkable
from topospeed.checkers import (check_edge_checkability, check_local_checkability,
                                check_t_independence, ld_to_edge_transform, recheck_witness)
from topospeed.demos import BUILTIN_MODELS, BUILTIN_TASKS, ld_roundtrip
from topospeed.errors import BadParams, NotLocallyCheckable
from topospeed.models import h_local
from topospeed.tasks import consensus, gmis

PAIRS = [("consensus2", "waitfree2"), ("renaming2", "waitfree2"), ("fig2", "c3"),
         ("coloring_c4", "c4"), ("mis_c4", "c4"), ("twostar", "twostar3"),
         ("hypertree_coloring", "hypertree"), ("gmis_hypertree", "hypertree"),
         ("mis_path5", "path5"), ("trivial2", "waitfree2")]


def pair(task, model):
    return BUILTIN_TASKS[task](), BUILTIN_MODELS[model]()


def test_triangle_independence():
    T, M = pair("fig2", "c3")
    assert check_t_independence(T.I, M, 0).holds
    r = check_t_independence(T.I, M, 1, collect=True)
    assert not r.holds
    assert r.witness["union"] == "{(1,BG), (2,GB), (3,GR)}"
    unions = [f["union"] for f in r.stats["failures"]]
    assert "{(1,BR), (2,RB), (3,RG)}" in unions
    assert len(unions) == 8


@pytest.mark.parametrize("task", ["consensus2", "renaming2", "trivial2"])
@pytest.mark.parametrize("t", [0, 1, 2])
def test_two_processes_are_independent(task, t):
    T, M = pair(task, "waitfree2")
    assert check_t_independence(T.I, M, t).holds


def test_two_star_independent_at_zero():
    T, M = pair("twostar", "twostar3")
    assert check_t_independence(T.I, M, 0).holds


@pytest.mark.parametrize("task,model,local,edge", [
    ("coloring_c4", "c4", True, True),
    ("mis_c4", "c4", True, False),
    ("consensus2", "waitfree2", False, False),
    ("renaming2", "waitfree2", True, True),
    ("fig2", "c3", True, True),
    ("mis_path5", "path5", True, False),
])
def test_checkability_verdicts(task, model, local, edge):
    T, M = pair(task, model)
    assert check_local_checkability(T, M).holds == local
    assert check_edge_checkability(T, M).holds == edge


@pytest.mark.parametrize("task,model", PAIRS)
def test_checkers_match_enumeration_and_edge_implies_local(task, model):
    T, M = pair(task, model)
    loc = check_local_checkability(T, M)
    edge = check_edge_checkability(T, M)
    assert loc.holds == naive_checkable(T, M, per_channel=False)
    assert edge.holds == naive_checkable(T, M, per_channel=True)
    if edge.holds:
        assert loc.holds


def test_mis_witness_is_all_zero_and_rechecks():
    T, M = pair("mis_c4", "c4")
    r = check_edge_checkability(T, M)
    assert r.witness["output"] == "[1:0, 2:0, 3:0, 4:0]"
    assert recheck_witness(T, r)


def test_ld_transform_on_path():
    T, M = pair("mis_path5", "path5")
    tr = ld_to_edge_transform(T, M)
    assert check_edge_checkability(tr.task, M).holds
    ok, lines = ld_roundtrip(tr)
    assert ok and lines


def test_ld_transform_on_hypertree_coloring():
    T, M = pair("hypertree_coloring", "hypertree")
    tr = ld_to_edge_transform(T, M)
    assert len(tr.task.O.facets) == 12
    assert check_edge_checkability(tr.task, M).holds
    assert ld_roundtrip(tr)[0]


def test_ld_transform_rejects_consensus():
    # consensus on a path of hyperedges is not locally checkable
    with pytest.raises(NotLocallyCheckable):
        ld_to_edge_transform(consensus(5), BUILTIN_MODELS["path5"]())


def test_single_hyperedge_sees_everything():
    # with one hyperedge every process hears all others: consensus is checkable
    M = h_local(2, [(1, 2)])
    assert check_local_checkability(consensus(2), M).holds


def test_ld_transform_needs_hypergraph_model():
    T, M = pair("coloring_c4", "c4")
    with pytest.raises(BadParams):
        ld_to_edge_transform(T, M)


def test_gmis_single_hyperedge():
    M = h_local(3, [(1, 2, 3)])
    tr = ld_to_edge_transform(gmis(3, [(1, 2, 3)]), M)
    assert len(tr.task.O.facets) == 3
    assert check_edge_checkability(tr.task, M).holds
