import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import generators as gen
import oracles
from infgraph import automata as fa
from infgraph import library
from infgraph import prefixrec as pr
from infgraph.errors import ValidationError
from infgraph.prefixrec import PrefixRecGraph

AB = ("A", "B")
WALK = pr.walk_alphabet(AB)
LADDER = library.ladder()


def w(text):
    return tuple(text)


def single(regex):
    return PrefixRecGraph(AB, ("c",), {"c": fa.compile(regex, WALK)}, fa.universal(AB))


@pytest.mark.parametrize("regex,start,expected", [
    ("A", "", {"A"}),
    ("A~B~A", "BBA", {"BA"}),
    ("A~B~B~*A", "BBBBBA", {"B" * k + "A" for k in range(0, 5)}),
])
def test_reachable_sets(regex, start, expected):
    reached = pr.reachable_vertices(single(regex), "c", start)
    assert {fa.format_word(x, AB) for x in fa.enumerate(reached, 8)} == expected


def test_post_star_is_per_state():
    family = pr.post_star(single("A~B~A"), "c", "BBA")
    assert len(family) == single("A~B~A").phi["c"].n_states
    assert any(fa.accepts(a, w("BB")) for a in family.values())


@pytest.mark.parametrize("u,a,v,expected", [
    ("BB", "b", "BBB", True),
    ("BBA", "c", "BA", True),
    ("A", "b", "AB", False),
    ("BA", "c", "A", True),
    ("A", "c", "", False),
])
def test_ladder_arcs(u, a, v, expected):
    assert pr.arc_exists(LADDER, u, a, v) is expected


def test_barred_vertex_is_rejected():
    with pytest.raises(ValidationError):
        pr.arc_exists(LADDER, "A~", "a", "A")


def test_ladder_view():
    view = pr.bounded_view(LADDER, 3)
    drawn = {("", "b", "B"), ("B", "b", "BB"), ("", "a", "A"), ("B", "a", "BA"), ("BB", "a", "BBA"),
            ("BBA", "c", "BA"), ("BA", "c", "A")}
    assert drawn <= set(view.arcs)
    short = view.induced({"", "A", "B", "BA", "BB", "BBA"})
    assert set(short.arcs) == drawn
    assert pr.successors(LADDER, "", "c", 4) == []
    assert pr.bounded_view(LADDER, 0).vertices == {""}


def test_closure_reaches_every_lower_rung():
    closure = library.ladder_closure()
    got = pr.successors(closure, "BBBBA", "c", 6)
    assert [fa.format_word(x, AB) for x in got] == ["A", "BA", "BBA", "BBBA"]


def test_views_are_monotone():
    views = [pr.bounded_view(LADDER, n) for n in range(6)]
    for small, big in zip(views, views[1:]):
        assert big.induced(small.vertices) == small


def test_json_round_trip():
    back = PrefixRecGraph.from_json(LADDER.to_json())
    assert pr.bounded_view(back, 4) == pr.bounded_view(LADDER, 4)


def test_missing_phi_is_rejected():
    with pytest.raises(ValidationError):
        PrefixRecGraph(AB, ("a", "b"), {"a": fa.compile("A", WALK)}, fa.universal(AB))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_saturation_matches_walk_search(seed):
    p = gen.random_prefrec(random.Random(seed))
    for u in oracles.all_words(AB, 2):
        expected = oracles.walk_targets(p.phi["a"], u, AB, max_depth=8)
        got = {x for x in fa.enumerate(pr.reachable_vertices(p, "a", u), 4)}
        assert got == {x for x in expected if len(x) <= 4}


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_descending_walks_only_extend(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    trans = {(rng.randrange(n), rng.choice(AB + ("",)), rng.randrange(n)) for _ in range(2 * n + 1)}
    aut = fa.FiniteAutomaton(WALK, n, {0}, {rng.randrange(n)}, frozenset(trans))
    p = PrefixRecGraph(AB, ("a",), {"a": aut}, fa.universal(AB))
    for u in oracles.all_words(AB, 2):
        for v in fa.enumerate(pr.reachable_vertices(p, "a", u), 5):
            assert v[:len(u)] == u
