import pytest
from hypothesis import given, settings, strategies as st

from topospeed.complexes import (Complex, closure, faces, make_simplex, maximal,
                                 pseudosphere, skeleton, star_closure)
from topospeed.errors import DuplicateName, EmptySimplex, NotInComplex, ParseError
from topospeed.terms import format_term, parse_term, sorted_terms, term_key

atoms = st.one_of(st.integers(-50, 50), st.text("abcXYZ_ -", min_size=1, max_size=4))
terms = st.recursive(atoms, lambda inner: st.one_of(
    st.tuples(inner, inner), st.frozensets(inner, max_size=3)), max_leaves=8)


def test_order_ints_before_strings_before_composites():
    assert sorted_terms(["a", (1,), 3, frozenset([1])]) == [3, "a", (1,), frozenset([1])]


def test_booleans_rejected():
    with pytest.raises(TypeError):
        term_key(True)


@given(terms)
def test_format_parse_roundtrip(t):
    assert parse_term(format_term(t)) == t


@given(terms, terms)
def test_key_is_injective(a, b):
    assert (term_key(a) == term_key(b)) == (a == b)


@given(st.lists(terms, max_size=6))
def test_sorting_ignores_input_order(ts):
    assert sorted(ts, key=term_key) == sorted(reversed(ts), key=term_key)


def test_parse_error_position():
    with pytest.raises(ParseError):
        parse_term("(1, ")


def test_simplex_rejects_repeated_names():
    with pytest.raises(DuplicateName):
        make_simplex([(1, 0), (1, 1)])
    with pytest.raises(EmptySimplex):
        make_simplex([])


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_pseudosphere_counts(n, k):
    S = pseudosphere(n, range(k))
    assert len(S.facets) == k ** n
    assert len(S.vertices()) == n * k
    # every name-distinct assignment on any name subset is a simplex
    assert len(S.simplices) == (k + 1) ** n - 1


simplex_lists = st.lists(
    st.dictionaries(st.integers(1, 3), st.integers(0, 2), min_size=1).map(
        lambda d: frozenset(d.items())), min_size=1, max_size=5)


@settings(max_examples=60)
@given(simplex_lists)
def test_closure_laws(ss):
    K = closure(ss)
    assert closure(K.facets) == K
    for s in ss:
        assert s in K
        for f in faces(s):
            assert f in K
    assert set(K.facets) == set(maximal(K.simplices))


@settings(max_examples=60)
@given(simplex_lists, st.sets(st.integers(1, 3), min_size=1))
def test_skeleton_laws(ss, keep):
    K = closure(ss)
    S = skeleton(K, keep)
    assert all({i for i, _ in s} <= keep for s in S.simplices)
    assert S.simplices == {s for s in K.simplices if {i for i, _ in s} <= keep}
    assert skeleton(S, keep) == S


@settings(max_examples=60)
@given(simplex_lists)
def test_star_contains_exactly_cofaces(ss):
    K = closure(ss)
    base = ss[0]
    St = star_closure(K, base)
    cofaces = {s for s in K.simplices if base <= s}
    assert cofaces <= St.simplices
    assert St == closure(cofaces)


def test_star_of_missing_simplex():
    K = closure([frozenset({(1, 0)})])
    with pytest.raises(NotInComplex):
        star_closure(K, frozenset({(2, 0)}))


def test_complex_equality_ignores_facet_order():
    a = frozenset({(1, 0), (2, 1)})
    b = frozenset({(1, 1), (2, 0)})
    assert Complex([a, b]) == Complex([b, a])
