import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import generators as gen
import oracles
from infgraph import automata as fa
from infgraph import library
from infgraph import rational as rg
from infgraph import transducer as td
from infgraph.errors import ValidationError
from infgraph.rational import RationalGraph, TraceQuery

BOT = library.BOTTOM
ANBNCN = library.anbncn_graph()
EPS = fa.compile("()", ANBNCN.alphabet)
BOTTOM = fa.compile(BOT, ANBNCN.alphabet)


def w(text):
    return tuple(text)


def test_arc_queries():
    assert rg.arc_exists(ANBNCN, "001", "b", "011")
    assert rg.successors(ANBNCN, "", "a", 3) == [w("0")]
    assert rg.predecessors(ANBNCN, BOT, "c", 3) == [w("1")]
    with pytest.raises(ValidationError):
        rg.arc_exists(ANBNCN, "2", "a", "0")


@pytest.mark.parametrize("n,arcs", [
    (0, set()),
    (1, {("", "a", "0"), ("0", "b", "1"), ("1", "c", BOT)}),
    (2, {("", "a", "0"), ("0", "b", "1"), ("1", "c", BOT),
         ("0", "a", "00"), ("00", "b", "01"), ("01", "b", "11"), ("11", "c", "1")}),
])
def test_bounded_views(n, arcs):
    view = rg.bounded_view(ANBNCN, n)
    assert set(view.arcs) == arcs
    if n == 0:
        assert view.vertices == {""}
    if n == 1:
        assert view.vertices == {"", "0", "1", BOT}


def test_views_are_monotone():
    views = [rg.bounded_view(ANBNCN, n) for n in range(5)]
    for small, big in zip(views, views[1:]):
        assert big.induced(small.vertices) == small


def test_listing_reports_truncation():
    ident = RationalGraph(td.labelled_union([("i", td.identity(gen.X2))], gen.X2, ("i",)))
    edges = [(0, (x,), (), 0) for x in gen.X2] + [(0, (), (x,), 0) for x in gen.X2]
    everything = td.RationalRelation(gen.X2, 1, {0}, {0}, edges)
    always = RationalGraph(td.labelled_union([("u", everything)], gen.X2, ("u",)))
    assert not rg.successors(ident, "01", "i", 4).truncated
    listing = rg.successors(always, "", "u", 4, limit=3)
    assert len(listing) == 3 and listing.truncated


@pytest.mark.parametrize("word,expected", [
    ("aabbcc", True), ("abc", True), ("aabbc", False), ("", False), ("acb", False),
])
def test_trace_member(word, expected):
    assert rg.trace_member(ANBNCN, TraceQuery(EPS, BOTTOM, word)) is expected


def test_empty_trace_with_overlapping_ends():
    assert rg.trace_member(ANBNCN, TraceQuery(EPS, EPS, ""))
    with pytest.raises(ValidationError):
        rg.trace_member(ANBNCN, TraceQuery(EPS, BOTTOM, "abd"))


def test_trace_language_sample():
    assert rg.trace_language_sample(ANBNCN, EPS, BOTTOM, 6) == [w("abc"), w("aabbcc")]
    assert rg.trace_language_sample(ANBNCN, EPS, BOTTOM, 3) == [w("abc")]
    assert rg.trace_language_sample(ANBNCN, EPS, BOTTOM, 0) == []


def test_compose_graphs():
    both = rg.compose_graphs(ANBNCN, ANBNCN)
    assert "a.b" in both.sigma and len(both.sigma) == 9
    assert rg.arc_exists(both, "", "a.b", "1")
    # 01 -b-> 11, so 01 reaches ⊥ under b.c only through 0
    assert rg.arc_exists(both, "0", "b.c", BOT)
    assert rg.arc_exists(both, "01", "b.c", "1")
    assert not rg.arc_exists(both, "01", "b.c", BOT)


def test_compose_with_identity_keeps_views():
    ident = RationalGraph(td.labelled_union([("i", td.identity(ANBNCN.alphabet))], ANBNCN.alphabet, ("i",)))
    composed = rg.compose_graphs(ANBNCN, ident)
    view = rg.bounded_view(composed, 3)
    renamed = {(u, a.split(".")[0], v) for u, a, v in view.arcs}
    assert renamed == set(rg.bounded_view(ANBNCN, 3).arcs)


def test_compose_alphabet_mismatch():
    other = RationalGraph(td.labelled_union([("i", td.identity(("x",)))], ("x",), ("i",)))
    with pytest.raises(ValidationError):
        rg.compose_graphs(ANBNCN, other)


def test_inverse_substitution_examples():
    sub = rg.inverse_finite_substitution(ANBNCN, {"d": ["ab"], "e": ["a~"], "f": [""]})
    comp = rg.compose_graphs(ANBNCN, ANBNCN)
    d_arcs = {(u, v) for u, a, v in rg.bounded_view(sub, 3).arcs if a == "d"}
    ab_arcs = {(u, v) for u, a, v in rg.bounded_view(comp, 3).arcs if a == "a.b"}
    assert d_arcs == ab_arcs
    assert rg.arc_exists(sub, "0", "e", "")
    view = rg.bounded_view(sub, 2)
    assert {(u, v) for u, a, v in view.arcs if a == "f"} == {(v, v) for v in view.vertices}
    with pytest.raises(ValidationError):
        rg.inverse_finite_substitution(ANBNCN, {"d": ["z"]})


def test_simple_paths():
    single = td.LabelledTransducer(("0",), ("a",), 2, {0}, {1: {"a"}}, [(0, w("0"), w("0"), 1)])
    assert rg.simple_paths_substitution(single, "a") == {(0,)}
    t = ANBNCN.transducer
    paths = rg.simple_paths_substitution(t, "c")
    assert paths and all(len(set(p)) == len(p) for p in paths)
    for p in paths:
        assert t.edges[p[0]][0] in t.initial and "c" in t.labels.get(t.edges[p[-1]][3], set())
        assert all(t.edges[i][3] == t.edges[j][0] for i, j in zip(p, p[1:]))
    lengths = {len(p) for p in paths}
    assert {1, 2, 3} <= lengths
    unlabelled = td.LabelledTransducer(("0",), ("a", "x"), 2, {0}, {1: {"a"}}, [(0, w("0"), w("0"), 1)])
    assert rg.simple_paths_substitution(unlabelled, "x") == set()


def test_json_round_trip():
    back = RationalGraph.from_json(ANBNCN.to_json())
    assert rg.bounded_view(back, 3) == rg.bounded_view(ANBNCN, 3)


# --- random instances ---------------------------------------------------------

@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_trace_member_matches_bfs(seed):
    rng = random.Random(seed)
    t = gen.random_labelled_transducer(rng)
    # restricting vertices to length <= 4 makes the finite oracle exact
    short = fa.compile("(()+0+1)(()+0+1)(()+0+1)(()+0+1)", gen.X2)
    p = RationalGraph(t, short)
    arcs = oracles.labelled_arcs(t, 4)
    init = fa.compile("()", gen.X2)
    final = fa.compile("0+1+00", gen.X2)
    found = oracles.trace_words(arcs, {()}, {w("0"), w("1"), w("00")}, t.sigma, 3)
    for k in range(4):
        for word in oracles.all_words(t.sigma, k):
            if len(word) != k:
                continue
            assert rg.trace_member(p, TraceQuery(init, final, word)) == (word in found)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_bounded_view_matches_arc_enumeration(seed):
    t = gen.random_labelled_transducer(random.Random(seed))
    view = rg.bounded_view(RationalGraph(t), 3)
    assert set(view.arcs) == {(fa.format_word(u, t.alphabet), a, fa.format_word(v, t.alphabet))
                              for u, a, v in oracles.labelled_arcs(t, 3)}
