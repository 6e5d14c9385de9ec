"""Prefix-recognizable graphs over the complete k-ary tree.

Vertices are words over the direction alphabet D (a tree vertex is named by
its path from the root).  The arcs labelled ``a`` join u to v when some word
of ``phi[a]`` walks from u to v in the tree, a letter ``d`` descending along
d and a barred letter ``d~`` ascending along d.  Walks are pushdown runs
(control = automaton state, stack = tree vertex), so the reachable vertex
sets are regular and computed by saturation.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from . import automata as fa
from .automata import EPS, FiniteAutomaton, Word, check_alphabet, format_word, tokenize_word
from .errors import ValidationError
from .graph import BAR, Graph
from .rational import DEFAULT_LIMIT, Listing


def walk_alphabet(directions: Sequence[str]) -> tuple[str, ...]:
    return tuple(directions) + tuple(d + BAR for d in directions)


@dataclass(frozen=True)
class PrefixRecGraph:
    directions: tuple[str, ...]
    sigma: tuple[str, ...]
    phi: Mapping[str, FiniteAutomaton]
    restriction: FiniteAutomaton

    def __post_init__(self):
        object.__setattr__(self, "directions", check_alphabet(self.directions))
        object.__setattr__(self, "sigma", check_alphabet(self.sigma))
        walk = set(walk_alphabet(self.directions))
        if set(self.phi) != set(self.sigma):
            raise ValidationError("phi must be defined on every arc label")
        for a, aut in self.phi.items():
            if not set(aut.alphabet) <= walk:
                raise ValidationError(f"phi({a}) uses letters outside D and its barred copy")
        if set(self.restriction.alphabet) != set(self.directions):
            raise ValidationError("restriction must be over the direction alphabet (no barred letters)")
        object.__setattr__(self, "phi", dict(self.phi))

    def __hash__(self):
        return hash((self.directions, self.sigma, tuple(sorted(self.phi.items(), key=lambda kv: kv[0])),
                     self.restriction))

    def word(self, text) -> Word:
        if isinstance(text, str):
            w = tokenize_word(text, walk_alphabet(self.directions))
        else:
            w = tuple(text)
        bad = [x for x in w if x not in self.directions]
        if bad:
            raise ValidationError(f"tree vertex {w} uses letters {bad} outside the directions")
        return w

    def name(self, word: Sequence[str]) -> str:
        return format_word(word, self.directions)

    def check_label(self, a: str) -> None:
        if a not in self.sigma:
            raise ValidationError(f"label {a!r} not in arc alphabet {list(self.sigma)}")

    def to_json(self) -> dict:
        return {
            "type": "prefrec",
            "directions": list(self.directions),
            "phi": {a: aut.to_json() for a, aut in self.phi.items()},
            "restriction": self.restriction.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> PrefixRecGraph:
        directions = check_alphabet(data["directions"])
        walk = walk_alphabet(directions)

        def load(x, alphabet):
            if isinstance(x, str):
                return fa.compile(x, alphabet)
            return fa.with_alphabet(FiniteAutomaton.from_json(x), alphabet)

        phi = {a: load(x, walk) for a, x in data["phi"].items()}
        restriction = data.get("restriction")
        restriction = fa.universal(directions) if restriction is None else load(restriction, directions)
        sigma = data.get("Sigma", list(data["phi"]))
        return cls(directions, tuple(sigma), phi, restriction)


def _summaries(aut: FiniteAutomaton) -> tuple[set, set]:
    """Saturate the pop summaries of a walk automaton.

    ``level[(q, q2)]``: a walk from q to q2 with zero net effect that never
    goes above its start (every ascent inside it undoes an earlier descent).
    ``pop[(q, q2, d)]``: a walk from q, standing on a vertex ending in d, to
    q2 one level higher, first reaching that height at its last step.
    """
    pushes, pops, eps = [], [], []
    for p, x, q in aut.transitions:
        if x == EPS:
            eps.append((p, q))
        elif x.endswith(BAR):
            pops.append((p, x[:-len(BAR)], q))
        else:
            pushes.append((p, x, q))
    level = {(q, q) for q in aut.states} | set(eps)
    pop = set()
    changed = True
    while changed:
        changed = False
        new_pop = {(q, q3, d) for (q, q2) in level for (p, d, q3) in pops if p == q2}
        if not new_pop <= pop:
            pop |= new_pop
            changed = True
        new_level = set(level)
        for p, d, q in pushes:
            for (q1, q2, d2) in pop:
                if q1 == q and d2 == d:
                    new_level.add((p, q2))
        # transitive closure
        succ: dict[int, set[int]] = {}
        for a, b in new_level:
            succ.setdefault(a, set()).add(b)
        closed = set()
        for a in succ:
            seen = set(succ[a])
            stack = list(seen)
            while stack:
                b = stack.pop()
                for c in succ.get(b, ()):
                    if c not in seen:
                        seen.add(c)
                        stack.append(c)
            closed |= {(a, b) for b in seen}
        if closed != level:
            level = closed
            changed = True
    return level, pop


def post_star(p: PrefixRecGraph, a: str, start) -> dict[int, FiniteAutomaton]:
    """For each state q of phi(a), the tree vertices z with (q, z) reachable from (initial, start)."""
    p.check_label(a)
    start = p.word(start)
    aut = p.phi[a]
    level, pop = _summaries(aut)
    # descend the start word: states reachable on each prefix length, walking only down
    down: list[set[int]] = [set() for _ in range(len(start) + 1)]
    down[len(start)] = {q2 for (q, q2) in level if q in aut.initial}
    for k in range(len(start), 0, -1):
        d = start[k - 1]
        down[k - 1] = {q3 for (q, q3, d2) in pop if d2 == d and q in down[k]}
        down[k - 1] = {q2 for (q, q2) in level if q in down[k - 1]}
    # assemble: chain states 0..|start| spell prefixes, then unmatched descents
    n = len(start) + 1
    trans = [(k, start[k], k + 1) for k in range(len(start))]
    offset = n
    trans += [(k, EPS, offset + q) for k in range(n) for q in down[k]]
    trans += [(offset + q, EPS, offset + q2) for (q, q2) in level if q != q2]
    trans += [(offset + q, x, offset + q2) for q, x, q2 in aut.transitions if x != EPS and not x.endswith(BAR)]
    total = offset + aut.n_states
    return {q: fa.FiniteAutomaton(p.directions, total, {0}, {offset + q}, frozenset(trans))
            for q in aut.states}


def reachable_vertices(p: PrefixRecGraph, a: str, start) -> FiniteAutomaton:
    """All v with a walk in phi(a) from start to v (restriction not applied)."""
    family = post_star(p, a, start)
    aut = p.phi[a]
    any_q = next(iter(family.values()))
    offset = any_q.n_states - aut.n_states
    return fa.FiniteAutomaton(p.directions, any_q.n_states, any_q.initial,
                              {offset + q for q in aut.final}, any_q.transitions)


def arc_exists(p: PrefixRecGraph, u, a: str, v) -> bool:
    u, v = p.word(u), p.word(v)
    p.check_label(a)
    if not (fa.accepts(p.restriction, u) and fa.accepts(p.restriction, v)):
        return False
    return fa.accepts(reachable_vertices(p, a, u), v)


def successors(p: PrefixRecGraph, u, a: str, max_len: int, limit: int = DEFAULT_LIMIT) -> Listing:
    u = p.word(u)
    p.check_label(a)
    if not fa.accepts(p.restriction, u):
        return Listing()
    targets = fa.intersect(reachable_vertices(p, a, u), p.restriction)
    words, truncated = fa.enumerate_capped(targets, max_len, limit)
    return Listing(words, truncated)


def bounded_view(p: PrefixRecGraph, max_vertex_len: int, limit: int = DEFAULT_LIMIT) -> Graph:
    if max_vertex_len < 0:
        raise ValidationError("max_vertex_len must be >= 0")
    words = fa.enumerate(p.restriction, max_vertex_len)
    arcs = set()
    for u in words:
        for a in p.sigma:
            for v in successors(p, u, a, max_vertex_len, limit):
                arcs.add((p.name(u), a, p.name(v)))
    return Graph(frozenset(p.name(w) for w in words), frozenset(arcs))

