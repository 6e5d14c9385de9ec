"""Labelled rational transducers and rational relations over a vertex alphabet.

A :class:`LabelledTransducer` reads pairs of words ``(u, v)`` and carries a
label set on each final state; a :class:`RationalRelation` is the unlabelled
variant obtained by projecting onto one label.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from . import automata as fa
from .automata import EPS, FiniteAutomaton, Word, check_alphabet, format_word, tokenize_word
from .errors import ResourceLimitError, ValidationError

Edge = tuple  # (p, input word, output word, q)


def _check_edges(n_states: int, alphabet: Sequence[str], edges: Iterable[Edge]) -> tuple[Edge, ...]:
    alpha = set(alphabet)
    out = []
    for p, u, v, q in edges:
        u, v = tuple(u), tuple(v)
        if not (0 <= p < n_states and 0 <= q < n_states):
            raise ValidationError(f"edge ({p}, {u}, {v}, {q}) uses undeclared state")
        bad = [x for x in u + v if x not in alpha]
        if bad:
            raise ValidationError(f"edge letters {bad} not in vertex alphabet")
        out.append((p, u, v, q))
    return tuple(sorted(set(out)))


@dataclass(frozen=True)
class RationalRelation:
    alphabet: tuple[str, ...]
    n_states: int
    initial: frozenset[int]
    final: frozenset[int]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "initial", frozenset(self.initial))
        object.__setattr__(self, "final", frozenset(self.final))
        object.__setattr__(self, "edges", _check_edges(self.n_states, self.alphabet, self.edges))
        if self.n_states > fa.max_states():
            raise ResourceLimitError("relation exceeds INFGRAPH_MAX_STATES")
        if not (self.initial | self.final) <= set(range(self.n_states)):
            raise ValidationError("initial/final states must be declared states")

    def accepts(self, u: Sequence[str], v: Sequence[str]) -> bool:
        return bool(_reachable_finals(self.n_states, self.initial, self.edges, tuple(u), tuple(v)) & self.final)


@dataclass(frozen=True)
class LabelledTransducer:
    """States ``0..n_states-1``; ``labels`` maps final states to non-empty label sets."""

    alphabet: tuple[str, ...]
    sigma: tuple[str, ...]
    n_states: int
    initial: frozenset[int]
    labels: Mapping[int, frozenset[str]]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "alphabet", check_alphabet(self.alphabet))
        object.__setattr__(self, "sigma", check_alphabet(self.sigma))
        object.__setattr__(self, "initial", frozenset(self.initial))
        labels = {}
        for q, ls in dict(self.labels).items():
            ls = frozenset(ls)
            if not 0 <= q < self.n_states:
                raise ValidationError(f"label map uses undeclared state {q}")
            bad = ls - set(self.sigma)
            if bad:
                raise ValidationError(f"labels {sorted(bad)} not in arc alphabet")
            if ls:  # unlabelled final states are demoted
                labels[q] = ls
        object.__setattr__(self, "labels", dict(sorted(labels.items())))
        object.__setattr__(self, "edges", _check_edges(self.n_states, self.alphabet, self.edges))
        if not self.initial <= set(range(self.n_states)):
            raise ValidationError("initial states must be declared states")

    def __hash__(self):
        return hash((self.alphabet, self.sigma, self.n_states, self.initial,
                     tuple(self.labels.items()), self.edges))

    @property
    def final(self) -> frozenset[int]:
        return frozenset(self.labels)

    def check_label(self, a: str) -> None:
        if a not in self.sigma:
            raise ValidationError(f"label {a!r} not in arc alphabet {list(self.sigma)}")

    def to_json(self) -> dict:
        fmt = lambda w: format_word(w, self.alphabet)  # noqa: E731
        return {
            "X": list(self.alphabet),
            "Sigma": list(self.sigma),
            "states": self.n_states,
            "initial": sorted(self.initial),
            "final": {str(q): sorted(ls) for q, ls in self.labels.items()},
            "edges": [[p, fmt(u), fmt(v), q] for p, u, v, q in self.edges],
        }

    @classmethod
    def from_json(cls, data: dict) -> LabelledTransducer:
        X = check_alphabet(data["X"])
        edges = [(int(p), tokenize_word(u, X), tokenize_word(v, X), int(q)) for p, u, v, q in data["edges"]]
        return cls(X, data["Sigma"], int(data["states"]), frozenset(int(q) for q in data["initial"]),
                   {int(q): frozenset(ls) for q, ls in data["final"].items()}, edges)


def _reachable_finals(n_states, initial, edges, u: Word, v: Word) -> set[int]:
    """States reachable after reading exactly (u, v); product search over (state, i, j)."""
    out: dict[int, list[Edge]] = {}
    for e in edges:
        out.setdefault(e[0], []).append(e)
    start = [(q, 0, 0) for q in initial]
    seen = set(start)
    queue = deque(start)
    ends = set()
    while queue:
        q, i, j = queue.popleft()
        if i == len(u) and j == len(v):
            ends.add(q)
        for _, a, b, r in out.get(q, ()):
            if u[i:i + len(a)] == a and v[j:j + len(b)] == b:
                nxt = (r, i + len(a), j + len(b))
                if nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
    return ends


def _check_word(word, alphabet) -> Word:
    word = tuple(word)
    bad = [x for x in word if x not in alphabet]
    if bad:
        raise ValidationError(f"letters {bad} not in vertex alphabet {list(alphabet)}")
    return word


def accepts_arc(t: LabelledTransducer, u: Sequence[str], a: str, v: Sequence[str]) -> bool:
    t.check_label(a)
    u, v = _check_word(u, t.alphabet), _check_word(v, t.alphabet)
    ends = _reachable_finals(t.n_states, t.initial, t.edges, u, v)
    return any(a in t.labels.get(q, ()) for q in ends)


def relation_of(t: LabelledTransducer, a: str) -> RationalRelation:
    t.check_label(a)
    final = frozenset(q for q, ls in t.labels.items() if a in ls)
    return RationalRelation(t.alphabet, t.n_states, t.initial, final, t.edges)


def _split(n_states: int, edges: Iterable[Edge]) -> tuple[int, list[Edge]]:
    out = []
    n = n_states
    for p, u, v, q in edges:
        k = max(len(u), len(v))
        if k <= 1:
            out.append((p, u, v, q))
            continue
        prev = p
        for i in range(k):
            nxt = q if i == k - 1 else n
            if nxt == n:
                n += 1
            out.append((prev, u[i:i + 1], v[i:i + 1], nxt))
            prev = nxt
    return n, out


def normalize_edges(t):
    """Split long edge words through fresh states so every edge reads at most one letter per tape."""
    n, edges = _split(t.n_states, t.edges)
    if isinstance(t, LabelledTransducer):
        return LabelledTransducer(t.alphabet, t.sigma, n, t.initial, t.labels, edges)
    return RationalRelation(t.alphabet, n, t.initial, t.final, edges)


def is_normalized(t) -> bool:
    return all(len(u) <= 1 and len(v) <= 1 for _, u, v, _ in t.edges)


def _same_alphabet(x, y) -> None:
    if set(x.alphabet) != set(y.alphabet):
        raise ValidationError(f"vertex alphabet mismatch: {list(x.alphabet)} vs {list(y.alphabet)}")


def image_of(r: RationalRelation, s: FiniteAutomaton) -> FiniteAutomaton:
    """Automaton for ``{v | exists u in L(s) with (u, v) in r}``."""
    _same_alphabet(r, s)
    r = normalize_edges(r)
    by_state: dict[int, list[Edge]] = {}
    for e in r.edges:
        by_state.setdefault(e[0], []).append(e)
    index: dict[tuple[int, int], int] = {}
    queue = deque()

    def state(pair):
        if pair not in index:
            if len(index) >= fa.max_states():
                raise ResourceLimitError("image construction exceeds INFGRAPH_MAX_STATES")
            index[pair] = len(index)
            queue.append(pair)
        return index[pair]

    initial = {state((p, q)) for p in sorted(r.initial) for q in sorted(s.initial)}
    trans = set()
    while queue:
        p, q = queue.popleft()
        i = index[(p, q)]
        for x, q2 in s.successors(q):
            if x == EPS:
                trans.add((i, EPS, state((p, q2))))
        for _, u, v, p2 in by_state.get(p, ()):
            out = v[0] if v else EPS
            if not u:
                trans.add((i, out, state((p2, q))))
            else:
                for x, q2 in s.successors(q):
                    if x == u[0]:
                        trans.add((i, out, state((p2, q2))))
    final = {i for (p, q), i in index.items() if p in r.final and q in s.final}
    result = FiniteAutomaton(r.alphabet, max(len(index), 1), initial, final, frozenset(trans))
    return fa.remove_epsilon(result)


def identity(alphabet: Sequence[str]) -> RationalRelation:
    return RationalRelation(tuple(alphabet), 1, {0}, {0}, [(0, (x,), (x,), 0) for x in alphabet])


def identity_on(s: FiniteAutomaton) -> RationalRelation:
    """The identity relation restricted to ``L(s)``."""
    edges = [(p, (x,) if x else (), (x,) if x else (), q) for p, x, q in s.transitions]
    return RationalRelation(s.alphabet, s.n_states, s.initial, s.final, edges)


def empty_relation(alphabet: Sequence[str]) -> RationalRelation:
    return RationalRelation(tuple(alphabet), 1, {0}, frozenset(), ())


def compose(r1: RationalRelation, r2: RationalRelation) -> RationalRelation:
    """Pairs (u, w) such that (u, v) in r1 and (v, w) in r2 for some v."""
    _same_alphabet(r1, r2)
    r1, r2 = normalize_edges(r1), normalize_edges(r2)
    out1: dict[int, list[Edge]] = {}
    out2: dict[int, list[Edge]] = {}
    for e in r1.edges:
        out1.setdefault(e[0], []).append(e)
    for e in r2.edges:
        out2.setdefault(e[0], []).append(e)
    index: dict[tuple[int, int], int] = {}
    queue = deque()

    def state(pair):
        if pair not in index:
            if len(index) >= fa.max_states():
                raise ResourceLimitError("composition exceeds INFGRAPH_MAX_STATES")
            index[pair] = len(index)
            queue.append(pair)
        return index[pair]

    initial = {state((p, q)) for p in sorted(r1.initial) for q in sorted(r2.initial)}
    edges = set()
    while queue:
        p, q = queue.popleft()
        i = index[(p, q)]
        for _, u, v, p2 in out1.get(p, ()):
            if not v:
                edges.add((i, u, (), state((p2, q))))
            else:
                for _, v2, w, q2 in out2.get(q, ()):
                    if v2 == v:
                        edges.add((i, u, w, state((p2, q2))))
        for _, v2, w, q2 in out2.get(q, ()):
            if not v2:
                edges.add((i, (), w, state((p, q2))))
    final = {i for (p, q), i in index.items() if p in r1.final and q in r2.final}
    return RationalRelation(r1.alphabet, max(len(index), 1), initial, final, edges)


def converse(r: RationalRelation) -> RationalRelation:
    return RationalRelation(r.alphabet, r.n_states, r.initial, r.final,
                            [(p, v, u, q) for p, u, v, q in r.edges])


def union(*rs: RationalRelation) -> RationalRelation:
    if not rs:
        raise ValidationError("union of no relations")
    for r in rs[1:]:
        _same_alphabet(rs[0], r)
    offset = 0
    initial, final, edges = [], [], []
    for r in rs:
        initial += [q + offset for q in r.initial]
        final += [q + offset for q in r.final]
        edges += [(p + offset, u, v, q + offset) for p, u, v, q in r.edges]
        offset += r.n_states
    return RationalRelation(rs[0].alphabet, max(offset, 1), initial, final, edges)


def restrict(r: RationalRelation, domain: FiniteAutomaton | None, codomain: FiniteAutomaton | None) -> RationalRelation:
    """Keep only the pairs whose input lies in ``domain`` and output in ``codomain``."""
    if domain is not None:
        r = compose(identity_on(domain), r)
    if codomain is not None:
        r = compose(r, identity_on(codomain))
    return r


def labelled_union(parts: Sequence[tuple[str, RationalRelation]], alphabet: Sequence[str],
                   sigma: Sequence[str]) -> LabelledTransducer:
    """Glue one relation per label into a single labelled transducer."""
    offset = 0
    initial, labels, edges = [], {}, []
    for label, r in parts:
        initial += [q + offset for q in r.initial]
        for q in r.final:
            labels.setdefault(q + offset, set()).add(label)
        edges += [(p + offset, u, v, q + offset) for p, u, v, q in r.edges]
        offset += r.n_states
    return LabelledTransducer(tuple(alphabet), tuple(sigma), max(offset, 1), initial, labels, edges)


def to_pairs(r: RationalRelation, max_len: int) -> set[tuple[Word, Word]]:
    """All accepted pairs with both components of length <= max_len (bounded search)."""
    r = normalize_edges(r)
    out_edges: dict[int, list[Edge]] = {}
    for e in r.edges:
        out_edges.setdefault(e[0], []).append(e)
    start = {(q, (), ()) for q in r.initial}
    seen = set(start)
    queue = deque(start)
    pairs = set()
    while queue:
        q, u, v = queue.popleft()
        if q in r.final:
            pairs.add((u, v))
        for _, a, b, q2 in out_edges.get(q, ()):
            nu, nv = u + a, v + b
            if len(nu) <= max_len and len(nv) <= max_len and (q2, nu, nv) not in seen:
                seen.add((q2, nu, nv))
                queue.append((q2, nu, nv))
    return pairs
