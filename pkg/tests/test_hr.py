import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import generators as gen
import oracles
from infgraph import hr, library
from infgraph.errors import ValidationError
from infgraph.graph import Hypergraph, isomorphic
from infgraph.hr import HRGrammar, Rule

TRIANGLE = library.triangle_grammar()


def triangle_with(extra_terminals, axiom_extra=(), rhs_extra=()):
    spec = library.triangle_grammar_spec()
    spec["terminals"].update(extra_terminals)
    spec["axiom"]["hyperarcs"] += [list(e) for e in axiom_extra]
    spec["rules"][0]["rhs"]["hyperarcs"] += [list(e) for e in rhs_extra]
    return HRGrammar.from_json(spec)


def kinds(g):
    return {d.kind for d in hr.validate(g)}


def test_triangle_is_valid():
    assert hr.validate(TRIANGLE) == []


def test_second_rule_breaks_determinism():
    extra = Rule("A", ("x1", "x2"), Hypergraph((("a", ("x1", "x2")),)))
    g = HRGrammar(TRIANGLE.nonterminals, TRIANGLE.terminals, TRIANGLE.rules + (extra,), TRIANGLE.axiom)
    assert "determinism" in kinds(g)
    with pytest.raises(ValidationError):
        hr.require_valid(g)


def test_missing_rule_and_bad_arity():
    rhs = Hypergraph((("B", ("x1",)), ("a", ("x1",))))
    g = HRGrammar({"A": 1, "B": 1}, {"a": 2}, (Rule("A", ("x1",), rhs),), Hypergraph((("A", ("v",)),)))
    assert {"coverage", "arity"} <= kinds(g)
    assert len(hr.validate(g)) >= 2


def test_repeated_formal_vertex():
    g = HRGrammar({"A": 2}, {"a": 2}, (Rule("A", ("x", "x"), Hypergraph(())),), Hypergraph((("A", ("v", "w")),)))
    assert "formal" in kinds(g)


def test_rewrite_step_on_the_triangle_rule():
    s = hr.rewrite_step(TRIANGLE, hr.start(TRIANGLE), ("A", ("v1", "v2")))
    arcs = set(s.terminals.edges)
    assert ("a", ("v1", "v2")) in arcs
    (b,) = [v for lab, v in arcs if lab == "b"]
    (c,) = [v for lab, v in arcs if lab == "c"]
    assert b[0] == "v1" and c[1] == "v2"
    n1, n3 = b[1], c[0]
    assert n1 == "0/n1#0"
    pending = [o.vertices for o in s.pending]
    assert len(pending) == 2 and pending[0][0] == n1 and pending[1][1] == n3 and pending[0][1] == pending[1][0]


def test_rewrite_step_requires_a_pending_hyperarc():
    with pytest.raises(ValidationError):
        hr.rewrite_step(TRIANGLE, hr.start(TRIANGLE), ("A", ("v2", "v1")))


def test_disjoint_rewrites_commute():
    s = hr.parallel_step(TRIANGLE, hr.start(TRIANGLE))
    first, second = s.pending
    one = hr.rewrite_step(TRIANGLE, hr.rewrite_step(TRIANGLE, s, first), second)
    two = hr.rewrite_step(TRIANGLE, hr.rewrite_step(TRIANGLE, s, second), first)
    g1 = hr.terminal_graph(one.current, TRIANGLE.terminals)
    g2 = hr.terminal_graph(two.current, TRIANGLE.terminals)
    assert isomorphic(g1, g2)


@pytest.mark.parametrize("n,arcs,pending", [(0, 0, 1), (1, 3, 2), (2, 9, 4), (4, 45, 16)])
def test_level_counts(n, arcs, pending):
    s = hr.generate_state(TRIANGLE, n)
    assert len(s.terminals.edges) == arcs and len(s.pending) == pending
    assert len(hr.generate(TRIANGLE, n).arcs) == arcs


def test_terminal_axiom_is_fixed():
    g = HRGrammar({}, {"a": 2}, (), Hypergraph((("a", ("x", "y")),)))
    s0 = hr.start(g)
    s1 = hr.parallel_step(g, s0)
    assert s1.terminals == s0.terminals and s1.level == 1
    assert hr.generate(g, 3) == hr.generate(g, 0)


def test_levels_grow_literally_and_runs_agree():
    graphs = [hr.generate(TRIANGLE, n) for n in range(6)]
    for small, big in zip(graphs, graphs[1:]):
        assert small.arcs <= big.arcs and small.vertices <= big.vertices
    assert hr.generate(TRIANGLE, 5) == graphs[5]


def test_json_with_rules_as_mapping():
    spec = library.triangle_grammar_spec()
    spec["rules"] = {"A": {"formal": ["x1", "x2"], "rhs": spec["rules"][0]["rhs"]}}
    g = HRGrammar.from_json(spec)
    assert hr.generate(g, 3) == hr.generate(TRIANGLE, 3)
    assert hr.generate(HRGrammar.from_json(g.to_json()), 3) == hr.generate(g, 3)


# --- colours ------------------------------------------------------------------

def coloured(g, colour, n):
    return {v for c, v in hr.generate(g, n).colours if c == colour}


def level_vertices(g, n):
    # includes vertices so far attached only to non-terminals
    return hr.generate_state(g, n).current.vertices


def test_triangle_colours_everything_from_v1():
    g = triangle_with({"s": 1, "r": 1}, axiom_extra=[("s", "v1")])
    marked = hr.accessible_colouring(g, "s", "r")
    for n in range(5):
        assert coloured(marked, "r", n) == level_vertices(g, n)
        assert isomorphic(hr.generate(hr.colour_restriction(marked, "r"), n),
                          hr.generate(marked, n))


def test_absent_source_colours_nothing():
    g = triangle_with({"s": 1, "r": 1})
    marked = hr.accessible_colouring(g, "s", "r")
    assert all(not coloured(marked, "r", n) for n in range(4))


def test_arcless_rule_stops_propagation():
    g = HRGrammar({"A": 1}, {"s": 1, "r": 1}, (Rule("A", ("x",), Hypergraph((("A", ("n",)),))),),
                  Hypergraph((("A", ("v",)), ("s", ("v",)))))
    marked = hr.accessible_colouring(g, "s", "r")
    for n in range(4):
        assert coloured(marked, "r", n) == {"v"}


def test_symmetric_colouring_walks_backwards():
    g = triangle_with({"s": 1, "r": 1}, axiom_extra=[("s", "v2")])
    forward = hr.accessible_colouring(g, "s", "r")
    both = hr.accessible_colouring(g, "s", "r", symmetric=True)
    assert coloured(forward, "r", 3) == {"v2"}
    assert coloured(both, "r", 3) == level_vertices(g, 3)


def test_colouring_rejects_unknown_or_used_colours():
    g = triangle_with({"s": 1, "r": 1}, axiom_extra=[("s", "v1"), ("r", "v2")])
    with pytest.raises(ValidationError):
        hr.accessible_colouring(TRIANGLE, "s", "r")
    with pytest.raises(ValidationError):
        hr.accessible_colouring(g, "s", "r")
    with pytest.raises(ValidationError):
        hr.colour_restriction(TRIANGLE, "zz")


def test_restriction_to_universal_colour_is_identity():
    g = triangle_with({"k": 1}, axiom_extra=[("k", "v1"), ("k", "v2")],
                      rhs_extra=[("k", "n1"), ("k", "n2"), ("k", "n3")])
    kept = hr.colour_restriction(g, "k")
    for n in range(5):
        assert isomorphic(hr.generate(kept, n), hr.generate(g, n))


def test_restriction_to_absent_colour_is_empty():
    g = triangle_with({"k": 1})
    kept = hr.colour_restriction(g, "k")
    for n in range(4):
        got = hr.generate(kept, n)
        assert not got.arcs and not got.vertices


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_colouring_matches_bfs_on_decided_vertices(seed):
    g = gen.random_hr_grammar(random.Random(seed))
    marked = hr.accessible_colouring(g, "s", "r")
    deep = hr.generate(g, 3 + sum(k * k + k for k in g.nonterminals.values()) + 1)
    reached = oracles.reachable(deep.arcs, {v for c, v in deep.colours if c == "s"})
    for n in range(4):
        assert coloured(marked, "r", n) == reached & level_vertices(g, n)
