import pytest

from topospeed.demos import BUILTIN_MODELS, BUILTIN_TASKS
from topospeed.errors import BadParams, IdSpaceTooSmall, ParseError, SemanticError
from topospeed.tasks import (augment_with_ids, builtin_task, consensus, fig2, gmis, k_coloring,
                             m_k_renaming, parse_task_file, perfect_renaming, serialize_task,
                             two_star_coloring, validate_task)

PAIRS = [("consensus2", "waitfree2"), ("renaming2", "waitfree2"), ("fig2", "c3"),
         ("coloring_c4", "c4"), ("mis_c4", "c4"), ("twostar", "twostar3"),
         ("hypertree_coloring", "hypertree"), ("gmis_hypertree", "hypertree"),
         ("mis_path5", "path5"), ("trivial2", "waitfree2")]


@pytest.mark.parametrize("task,model", PAIRS)
def test_builtins_validate(task, model):
    rep = validate_task(BUILTIN_TASKS[task](), BUILTIN_MODELS[model]())
    assert rep.ok, rep.render()


@pytest.mark.parametrize("name", sorted(BUILTIN_TASKS))
def test_task_file_roundtrip(name):
    T = BUILTIN_TASKS[name]()
    text = serialize_task(T)
    again = parse_task_file(text)
    assert again == T
    assert serialize_task(again) == text


def test_consensus_delta():
    T = consensus(2)
    mixed = frozenset({(1, 0), (2, 1)})
    assert T.delta_of(mixed) == {frozenset({(1, 0), (2, 0)}), frozenset({(1, 1), (2, 1)})}
    assert T.delta_of(frozenset({(1, 1)})) == {frozenset({(1, 1)})}
    assert len(T.I.facets) == 4 and len(T.O.facets) == 2


def test_renaming_shapes():
    T = perfect_renaming(2)
    assert len(T.I.facets) == 6 and len(T.O.facets) == 2
    with pytest.raises(BadParams):
        m_k_renaming(3, 2, 2)


def test_triangle_delta_pins_process_two():
    T = fig2()
    assert len(T.I.facets) == 4 and len(T.O.facets) == 2
    sigma = frozenset({(1, "B"), (2, "R"), (3, "R")})
    assert T.delta_of(sigma) == {frozenset({(1, "B"), (2, "R"), (3, "G")})}


def test_two_star_inputs():
    assert len(two_star_coloring(3).I.facets) == 96


def test_gmis_face_semantics():
    T = gmis(3, [(1, 2, 3)])
    full = frozenset({(1, 0), (2, 0), (3, 0)})
    outs = {tuple(sorted(t)) for t in T.delta_of(full)}
    assert outs == {((1, 1), (2, 0), (3, 0)), ((1, 0), (2, 1), (3, 0)),
                    ((1, 0), (2, 0), (3, 1))}
    # a lone node cannot see its hyperedge, so both bits are allowed
    assert len(T.delta_of(frozenset({(1, 0)}))) == 2


def test_coloring_needs_enough_colours():
    with pytest.raises(BadParams):
        k_coloring(3, [(1, 2), (2, 3), (1, 3)], 2)


def test_augment_with_ids():
    T = augment_with_ids(consensus(2), 2)
    assert len(T.I.facets) == 8
    with pytest.raises(IdSpaceTooSmall):
        augment_with_ids(consensus(2), 1)


def test_builtin_task_errors():
    with pytest.raises(BadParams):
        builtin_task("nope")
    with pytest.raises(BadParams):
        builtin_task("k_coloring", n=3)


def test_parse_rejects_unsorted_simplex():
    text = serialize_task(consensus(1)).replace("[1:0]", "[1:0, 1:1]", 1)
    with pytest.raises(SemanticError):
        parse_task_file(text)
    bad = serialize_task(consensus(2)).replace("[1:0, 2:0]", "[2:0, 1:0]", 1)
    with pytest.raises(ParseError):
        parse_task_file(bad)


def test_parse_requires_delta_everywhere():
    text = serialize_task(consensus(2))
    lines = [l for l in text.splitlines() if not l.startswith("[1:0] ->")]
    with pytest.raises(SemanticError):
        parse_task_file("\n".join(lines) + "\n")


def test_validate_flags_bad_image():
    T = consensus(2)
    sigma = frozenset({(1, 0), (2, 0)})
    T.delta[sigma] = frozenset({frozenset({(1, 0)})})
    rep = validate_task(T)
    assert [k for k, _ in rep.violations] == ["name-preservation"]
