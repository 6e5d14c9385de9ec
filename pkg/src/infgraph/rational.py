"""Rational graphs: arcs between words given by a labelled rational transducer.

Queries answer exactly on the infinite graph (arc tests, trace-language
membership); enumerations are bounded by explicit length and count caps.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

from . import automata as fa
from . import transducer as td
from .automata import FiniteAutomaton, Word, format_word, tokenize_word
from .errors import ValidationError
from .graph import BAR, Graph
from .transducer import LabelledTransducer, RationalRelation

DEFAULT_LIMIT = 10_000


class Listing(list):
    """A word list that remembers whether an enumeration cap cut it short."""

    def __init__(self, items=(), truncated: bool = False):
        super().__init__(items)
        self.truncated = truncated


@dataclass(frozen=True)
class RationalGraph:
    transducer: LabelledTransducer
    restriction: FiniteAutomaton | None = None

    def __post_init__(self):
        if self.restriction is not None and set(self.restriction.alphabet) != set(self.alphabet):
            raise ValidationError("restriction must be over the vertex alphabet")

    @property
    def alphabet(self) -> tuple[str, ...]:
        return self.transducer.alphabet

    @property
    def sigma(self) -> tuple[str, ...]:
        return self.transducer.sigma

    def word(self, text: str | Sequence[str]) -> Word:
        if isinstance(text, str):
            return tokenize_word(text, self.alphabet)
        return tuple(text)

    def name(self, word: Sequence[str]) -> str:
        return format_word(word, self.alphabet)

    def vertex_ok(self, word: Sequence[str]) -> bool:
        return self.restriction is None or fa.accepts(self.restriction, word)

    def vertices(self) -> FiniteAutomaton:
        return fa.universal(self.alphabet) if self.restriction is None else self.restriction

    def relation(self, a: str) -> RationalRelation:
        """The a-arcs as a relation, with the vertex restriction folded in on both sides."""
        r = td.relation_of(self.transducer, a)
        if self.restriction is not None:
            r = td.restrict(r, self.restriction, self.restriction)
        return r

    def to_json(self) -> dict:
        return {
            "type": "rational",
            "transducer": self.transducer.to_json(),
            "restriction": None if self.restriction is None else self.restriction.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> RationalGraph:
        t = LabelledTransducer.from_json(data["transducer"])
        r = data.get("restriction")
        if isinstance(r, str):
            r = fa.compile(r, t.alphabet)
        elif r is not None:
            r = fa.FiniteAutomaton.from_json(r)
        return cls(t, r)


def arc_exists(p: RationalGraph, u, a: str, v) -> bool:
    u, v = p.word(u), p.word(v)
    if not td.accepts_arc(p.transducer, u, a, v):
        return False
    return p.vertex_ok(u) and p.vertex_ok(v)


def _neighbours(p: RationalGraph, r: RationalRelation, word: Word, max_len: int, limit: int) -> Listing:
    if not p.vertex_ok(word):
        return Listing()
    image = td.image_of(r, fa.singleton(word, p.alphabet))
    if p.restriction is not None:
        image = fa.intersect(image, p.restriction)
    words, truncated = fa.enumerate_capped(image, max_len, limit)
    return Listing(words, truncated)


def successors(p: RationalGraph, u, a: str, max_len: int, limit: int = DEFAULT_LIMIT) -> Listing:
    """Words v with u -a-> v and |v| <= max_len, in length-lexicographic order."""
    u = td._check_word(p.word(u), p.alphabet)
    return _neighbours(p, td.relation_of(p.transducer, a), u, max_len, limit)


def predecessors(p: RationalGraph, v, a: str, max_len: int, limit: int = DEFAULT_LIMIT) -> Listing:
    v = td._check_word(p.word(v), p.alphabet)
    return _neighbours(p, td.converse(td.relation_of(p.transducer, a)), v, max_len, limit)


def bounded_view(p: RationalGraph, max_vertex_len: int, limit: int = DEFAULT_LIMIT) -> Graph:
    if max_vertex_len < 0:
        raise ValidationError("max_vertex_len must be >= 0")
    words = fa.enumerate(p.vertices(), max_vertex_len)
    arcs = set()
    relations = {a: td.relation_of(p.transducer, a) for a in p.sigma}
    for u in words:
        for a, r in relations.items():
            for v in _neighbours(p, r, u, max_vertex_len, limit):
                arcs.add((p.name(u), a, p.name(v)))
    return Graph(frozenset(p.name(w) for w in words), frozenset(arcs))


@dataclass(frozen=True)
class TraceQuery:
    initial: FiniteAutomaton
    final: FiniteAutomaton
    word: Word


def _front_start(p: RationalGraph, initial: FiniteAutomaton) -> FiniteAutomaton:
    s = initial if p.restriction is None else fa.intersect(initial, p.restriction)
    return fa.trim(fa.determinize(s))


def _front_step(p: RationalGraph, front: FiniteAutomaton, a: str) -> FiniteAutomaton:
    s = td.image_of(td.relation_of(p.transducer, a), front)
    if p.restriction is not None:
        s = fa.intersect(s, p.restriction)
    return fa.trim(fa.determinize(s))


def _check_trace_word(p: RationalGraph, w) -> Word:
    if isinstance(w, str):
        w = tokenize_word(w, p.sigma)
    w = tuple(w)
    for a in w:
        p.transducer.check_label(a)
    return w


def trace_member(p: RationalGraph, q: TraceQuery) -> bool:
    """Is there a path labelled ``q.word`` from a vertex of L(initial) to one of L(final)?"""
    w = _check_trace_word(p, q.word)
    front = _front_start(p, q.initial)
    for a in w:
        if fa.is_empty(front):
            return False
        front = _front_step(p, front, a)
    return not fa.is_empty(fa.intersect(front, q.final))


def trace_language_sample(p: RationalGraph, initial: FiniteAutomaton, final: FiniteAutomaton,
                          max_len: int) -> list[Word]:
    """All trace words of length <= max_len, in length-lexicographic order."""
    found: list[Word] = []
    layer = [((), _front_start(p, initial))]
    for length in range(max_len + 1):
        for w, front in layer:
            if not fa.is_empty(fa.intersect(front, final)):
                found.append(w)
        if length == max_len:
            break
        nxt = []
        for w, front in layer:
            for a in p.sigma:
                f2 = _front_step(p, front, a)
                if not fa.is_empty(f2):
                    nxt.append((w + (a,), f2))
        layer = nxt
    return found


def pair_label(a: str, b: str) -> str:
    return f"{a}.{b}"


def compose_graphs(p1: RationalGraph, p2: RationalGraph) -> RationalGraph:
    """Arcs ``r -a.b-> t`` for every ``r -a-> s`` in p1 and ``s -b-> t`` in p2."""
    if set(p1.alphabet) != set(p2.alphabet):
        raise ValidationError("composed graphs must share the vertex alphabet")
    parts = []
    for a, b in itertools.product(p1.sigma, p2.sigma):
        parts.append((pair_label(a, b), td.compose(p1.relation(a), p2.relation(b))))
    sigma = [lab for lab, _ in parts]
    t = td.labelled_union(parts, p1.alphabet, sigma)
    if p1.restriction is None:
        restriction = p2.restriction
    elif p2.restriction is None:
        restriction = p1.restriction
    else:
        restriction = fa.trim(fa.intersect(p1.restriction, p2.restriction))
    return RationalGraph(t, restriction)


def parse_substitution_word(text: str | Sequence[str], sigma: Sequence[str]) -> Word:
    """Read a word over sigma and barred sigma (bar written as a trailing ``~``)."""
    if not isinstance(text, str):
        return tuple(text)
    letters = list(sigma) + [a + BAR for a in sigma]
    return tokenize_word(text, letters)


def inverse_finite_substitution(p: RationalGraph, phi: Mapping[str, Sequence]) -> RationalGraph:
    """New label d relates u to v when some word of ``phi[d]`` labels a walk from u to v.

    A barred letter ``c~`` walks a c-arc backwards; the empty word gives
    the identity on (restricted) vertices.
    """
    parts = []
    identity = td.identity(p.alphabet) if p.restriction is None else td.identity_on(p.restriction)
    for d in phi:
        rels = []
        for w in phi[d]:
            w = parse_substitution_word(w, p.sigma)
            r = identity
            for letter in w:
                base, barred = (letter[:-len(BAR)], True) if letter.endswith(BAR) else (letter, False)
                p.transducer.check_label(base)
                step = p.relation(base)
                r = td.compose(r, td.converse(step) if barred else step)
            rels.append(r)
        parts.append((d, td.union(*rels) if rels else td.empty_relation(p.alphabet)))
    t = td.labelled_union(parts, p.alphabet, list(phi))
    return RationalGraph(t, p.restriction)


def simple_paths_substitution(t: LabelledTransducer, a: str) -> set[tuple[int, ...]]:
    """Edge-index words of the simple paths (no edge repeated) from I to a final state labelled a."""
    t.check_label(a)
    targets = {q for q, ls in t.labels.items() if a in ls}
    out: dict[int, list[int]] = {}
    for i, (p, _, _, _) in enumerate(t.edges):
        out.setdefault(p, []).append(i)
    found: set[tuple[int, ...]] = set()
    if not targets:
        return found

    def walk(q: int, path: list[int], used: set[int]):
        if q in targets:
            found.add(tuple(path))
        for i in out.get(q, ()):
            if i not in used:
                used.add(i)
                path.append(i)
                walk(t.edges[i][3], path, used)
                path.pop()
                used.discard(i)

    for q in sorted(t.initial):
        walk(q, [], set())
    return found


def edge_word_labels(t: LabelledTransducer, path: Sequence[int]) -> str:
    """Human-readable ``p -u/v-> q`` rendering of an edge-index word."""
    parts = []
    for i in path:
        p, u, v, q = t.edges[i]
        parts.append(f"{p}-{format_word(u, t.alphabet) or 'ε'}/{format_word(v, t.alphabet) or 'ε'}->{q}")
    return " ".join(parts) if parts else "ε"
