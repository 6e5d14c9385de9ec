"""Ready-made presentations of the classic worked examples."""
from __future__ import annotations

from . import automata as fa
from .rational import RationalGraph
from .transducer import LabelledTransducer

BOTTOM = "⊥"


def anbncn_transducer(bottom: str = BOTTOM) -> LabelledTransducer:
    """Transducer whose graph has a^n b^n c^n as traces from the empty word to ⊥.

    States: p=0, q1=1, q2=2, r1=3 (label a), r2=4 (label b), r3=5 (label c).
    """
    p, q1, q2, r1, r2, r3 = range(6)
    edges = [
        (p, ("0",), ("0",), q1),
        (p, ("0",), ("1",), r2),
        (p, ("1",), (bottom,), r3),
        (p, (), ("0",), r1),
        (p, ("1",), (), q2),
        (q1, ("0",), ("1",), r2),
        (q2, ("1",), ("1",), r3),
        (q1, ("0",), ("0",), q1),
        (r2, ("1",), ("1",), r2),
        (q2, ("1",), ("1",), q2),
        (r1, ("0",), ("0",), r1),
    ]
    labels = {r1: {"a"}, r2: {"b"}, r3: {"c"}}
    return LabelledTransducer(("0", "1", bottom), ("a", "b", "c"), 6, {p}, labels, edges)


def anbncn_graph(bottom: str = BOTTOM) -> RationalGraph:
    return RationalGraph(anbncn_transducer(bottom))


def ladder_spec(closure: bool = False) -> dict:
    """Prefix-recognizable ladder: JSON-style presentation over directions A, B."""
    return {
        "type": "prefrec",
        "directions": ["A", "B"],
        "phi": {"a": "A", "b": "B", "c": "A~B~B~*A" if closure else "A~B~A"},
        "restriction": "A+B*+B*A",
    }


def triangle_grammar_spec() -> dict:
    """One-rule HR grammar: A(1,2) -> a(1,2) b(1,n1) c(n3,2) A(n1,n2) A(n2,n3)."""
    return {
        "type": "hr",
        "nonterminals": {"A": 2},
        "terminals": {"a": 2, "b": 2, "c": 2},
        "axiom": {"hyperarcs": [["A", "v1", "v2"]]},
        "rules": [
            {
                "lhs": "A",
                "formal": ["x1", "x2"],
                "rhs": {"hyperarcs": [
                    ["a", "x1", "x2"],
                    ["b", "x1", "n1"],
                    ["c", "n3", "x2"],
                    ["A", "n1", "n2"],
                    ["A", "n2", "n3"],
                ]},
            }
        ],
    }


def ladder():
    from .prefixrec import PrefixRecGraph
    return PrefixRecGraph.from_json(ladder_spec())


def ladder_closure():
    from .prefixrec import PrefixRecGraph
    return PrefixRecGraph.from_json(ladder_spec(closure=True))


def triangle_grammar():
    from .hr import HRGrammar
    return HRGrammar.from_json(triangle_grammar_spec())


def trace_query_sets(p: RationalGraph, initial: str, final: str):
    return fa.compile(initial, p.alphabet), fa.compile(final, p.alphabet)
