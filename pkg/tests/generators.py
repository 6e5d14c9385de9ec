"""Seeded random instances for the property and acceptance suites."""
from __future__ import annotations

import random

from infgraph import automata as fa
from infgraph.graph import Hypergraph
from infgraph.hr import HRGrammar, Rule
from infgraph.prefixrec import PrefixRecGraph, walk_alphabet
from infgraph.transducer import LabelledTransducer, RationalRelation

X2 = ("0", "1")


def random_walk_automaton(rng: random.Random, directions=("A", "B"), max_states=3) -> fa.FiniteAutomaton:
    letters = walk_alphabet(directions)
    n = rng.randint(1, max_states)
    trans = {(rng.randrange(n), rng.choice(letters + ("",)), rng.randrange(n))
             for _ in range(rng.randint(1, 2 * n + 2))}
    final = {q for q in range(n) if rng.random() < 0.5} or {rng.randrange(n)}
    return fa.FiniteAutomaton(letters, n, {0}, final, frozenset(trans))


def random_prefrec(rng: random.Random, directions=("A", "B")) -> PrefixRecGraph:
    phi = {"a": random_walk_automaton(rng, directions)}
    return PrefixRecGraph(directions, ("a",), phi, fa.universal(directions))


def _letter(rng, alphabet, allow_empty):
    return () if allow_empty and rng.random() < 0.25 else (rng.choice(alphabet),)


def random_labelled_transducer(rng: random.Random, alphabet=X2, max_states=3, max_labels=2) -> LabelledTransducer:
    """One-letter edges, never empty on both tapes."""
    n = rng.randint(1, max_states)
    sigma = ("a", "b")[:rng.randint(1, max_labels)]
    edges = set()
    for _ in range(rng.randint(1, 2 * n + 1)):
        u = _letter(rng, alphabet, True)
        v = _letter(rng, alphabet, bool(u))
        edges.add((rng.randrange(n), u, v, rng.randrange(n)))
    labels = {}
    for q in range(n):
        if rng.random() < 0.6:
            labels[q] = {a for a in sigma if rng.random() < 0.7} or {sigma[0]}
    initial = {0} if rng.random() < 0.8 or n == 1 else {0, n - 1}
    return LabelledTransducer(alphabet, sigma, n, initial, labels, sorted(edges))


def random_relation(rng: random.Random, alphabet=X2, max_states=3) -> RationalRelation:
    """Edges read one or two letters on each tape, so |v| <= 2|u| and |u| <= 2|v|."""
    n = rng.randint(1, max_states)
    word = lambda: tuple(rng.choice(alphabet) for _ in range(rng.randint(1, 2)))  # noqa: E731
    edges = {(rng.randrange(n), word(), word(), rng.randrange(n)) for _ in range(rng.randint(1, 2 * n + 1))}
    final = {q for q in range(n) if rng.random() < 0.5} or {n - 1}
    return RationalRelation(alphabet, n, {0}, final, sorted(edges))


def relation_as_labelled(r: RationalRelation, label: str, sigma) -> LabelledTransducer:
    return LabelledTransducer(r.alphabet, tuple(sigma), r.n_states, r.initial,
                              {q: {label} for q in r.final}, r.edges)


def random_hr_grammar(rng: random.Random, source="s", new="r") -> HRGrammar:
    """Small deterministic grammar with at most one non-terminal per right-hand side."""
    names = ["A", "B"][:rng.randint(1, 2)]
    arity = {A: rng.randint(1, 3) for A in names}
    rules = []
    for A in names:
        formal = tuple(f"x{i}" for i in range(arity[A]))
        local = list(formal) + [f"n{i}" for i in range(rng.randint(0, 2))]
        edges = []
        for _ in range(rng.randint(0, 4)):
            edges.append((rng.choice("ab"), (rng.choice(local), rng.choice(local))))
        for v in local:
            if rng.random() < 0.15:
                edges.append((source, (v,)))
        if rng.random() < 0.8:
            B = rng.choice(names)
            edges.append((B, tuple(rng.sample(local, arity[B])) if len(local) >= arity[B]
                          else tuple(rng.choice(local) for _ in range(arity[B]))))
        rules.append(Rule(A, formal, Hypergraph(tuple(edges), frozenset(formal))))
    start = names[0]
    axiom_verts = tuple(f"v{i}" for i in range(arity[start]))
    axiom = [(start, axiom_verts)]
    if rng.random() < 0.7:
        axiom.append((source, (rng.choice(axiom_verts),)))
    if rng.random() < 0.5:
        axiom.append(("a", (axiom_verts[0], axiom_verts[-1])))
    terminals = {"a": 2, "b": 2, source: 1, new: 1}
    return HRGrammar(arity, terminals, tuple(rules), Hypergraph(tuple(axiom)))
