"""Contextual hyperedge rewriting and CHR-grammars.

A contextual rule rewrites a non-terminal occurrence only where its context
graph embeds around it.  Generation is bounded by a step count and, when the
axiom is itself HR-generated, by how deep that axiom is materialized.
Non-terminals use set semantics: an occurrence that was already rewritten is
not rewritten again.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from . import hr
from . import transducer as td
from .automata import format_word
from .errors import ValidationError
from .graph import Graph, Hypergraph
from .hr import Diagnostic, HRGrammar, Rule
from .rational import RationalGraph
from .transducer import LabelledTransducer

Hyperarc = tuple  # (label, (v1, ..., vn))


@dataclass(frozen=True)
class ContextualRule:
    context: Hypergraph
    lhs: str
    formal: tuple[str, ...]
    rhs: Hypergraph
    name: str = ""

    def to_json(self) -> dict:
        return {"name": self.name, "context": self.context.to_json(),
                "formal": [self.lhs, *self.formal], "rhs": self.rhs.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> ContextualRule:
        formal = data["formal"]
        if isinstance(formal, dict):
            lhs, verts = formal["label"], formal["vertices"]
        else:
            lhs, verts = formal[0], formal[1:]
        return cls(Hypergraph.from_json(data.get("context", {})), lhs, tuple(verts),
                   Hypergraph.from_json(data["rhs"]), data.get("name", ""))


@dataclass(frozen=True)
class TreeAxiom:
    """An HR-generated axiom plus the non-terminal hyperarc placed on it."""

    grammar: HRGrammar
    start: Hyperarc


@dataclass(frozen=True, eq=False)
class ContextualSystem:
    """``kind`` is ``"chr"`` (one rule per non-terminal, context over C) or ``"contextual"``."""

    contextual: Mapping[str, int]
    nonterminals: Mapping[str, int]
    terminals: Mapping[str, int]
    rules: tuple[ContextualRule, ...]
    axiom: Hypergraph | TreeAxiom
    kind: str = "chr"
    _by_lhs: dict = field(default=None, init=False, repr=False)

    def __post_init__(self):
        for name in ("contextual", "nonterminals", "terminals"):
            object.__setattr__(self, name, dict(getattr(self, name)))
        object.__setattr__(self, "rules", tuple(self.rules))
        by_lhs: dict[str, list[ContextualRule]] = {}
        for r in self.rules:
            by_lhs.setdefault(r.lhs, []).append(r)
        object.__setattr__(self, "_by_lhs", by_lhs)

    def rules_for(self, label: str) -> list[ContextualRule]:
        return self._by_lhs.get(label, [])

    def is_nonterminal(self, label: str) -> bool:
        return label in self.nonterminals

    def to_json(self) -> dict:
        if isinstance(self.axiom, TreeAxiom):
            label, verts = self.axiom.start
            axiom = {"hr": self.axiom.grammar.to_json(), "nonterminal": [label, *verts]}
        else:
            axiom = self.axiom.to_json()
        return {"type": self.kind, "contextual": dict(self.contextual),
                "nonterminals": dict(self.nonterminals), "terminals": dict(self.terminals),
                "axiom": axiom, "rules": [r.to_json() for r in self.rules]}

    @classmethod
    def from_json(cls, data: dict) -> ContextualSystem:
        ax = data["axiom"]
        if "hr" in ax:
            nt = ax["nonterminal"]
            axiom = TreeAxiom(HRGrammar.from_json(ax["hr"]), (nt[0], tuple(nt[1:])))
        else:
            axiom = Hypergraph.from_json(ax)
        rules = tuple(ContextualRule.from_json(r) for r in data["rules"])
        return cls(data.get("contextual", {}), data.get("nonterminals", {}), data.get("terminals", {}),
                   rules, axiom, data.get("type", "chr"))


def validate(g: ContextualSystem) -> list[Diagnostic]:
    out: list[Diagnostic] = []
    alph = [g.contextual, g.nonterminals, g.terminals]
    for x, y in itertools.combinations(range(3), 2):
        for label in sorted(set(alph[x]) & set(alph[y])):
            out.append(Diagnostic("alphabet", label, "declared in two of C, N, T"))
    arity = {**g.contextual, **g.terminals, **g.nonterminals}

    def check(h: Hypergraph, allowed: set[str], where: str):
        for label, verts in h.edges:
            if label not in arity:
                out.append(Diagnostic("alphabet", where, f"undeclared label {label!r}"))
            elif label not in allowed:
                out.append(Diagnostic("alphabet", where, f"label {label!r} not allowed here"))
            elif arity[label] != len(verts):
                out.append(Diagnostic("arity", where, f"{label}{verts} has arity {arity[label]}"))

    context_ok = set(g.contextual) if g.kind == "chr" else set(g.contextual) | set(g.terminals)
    seen: dict[str, int] = {}
    for i, r in enumerate(g.rules):
        loc = f"rule {r.name or i} ({r.lhs})"
        if g.kind == "chr" and r.lhs in seen:
            out.append(Diagnostic("determinism", loc, f"second rule for {r.lhs}"))
        seen.setdefault(r.lhs, i)
        if r.lhs not in g.nonterminals:
            out.append(Diagnostic("alphabet", loc, f"{r.lhs!r} is not a non-terminal"))
        elif g.nonterminals[r.lhs] != len(r.formal):
            out.append(Diagnostic("arity", loc, "formal hyperarc arity mismatch"))
        if len(set(r.formal)) != len(r.formal):
            out.append(Diagnostic("formal", loc, "formal vertices must be pairwise distinct"))
        check(r.context, context_ok, loc + " context")
        check(r.rhs, set(g.terminals) | set(g.nonterminals), loc + " rhs")
        if not _connected(r.context, r.formal):
            out.append(Diagnostic("context", loc, "context and formal hyperarc are not connected"))
    if isinstance(g.axiom, TreeAxiom):
        out += [Diagnostic(d.kind, "axiom grammar: " + d.location, d.message) for d in hr.validate(g.axiom.grammar)]
        label, verts = g.axiom.start
        if label not in g.nonterminals:
            out.append(Diagnostic("axiom", "axiom", f"start hyperarc {label!r} is not a non-terminal"))
        if not set(g.axiom.grammar.terminals) <= set(g.contextual) | set(g.terminals):
            out.append(Diagnostic("axiom", "axiom", "axiom grammar terminals must be declared labels"))
    else:
        check(g.axiom, set(arity), "axiom")
        if g.kind == "chr" and sum(1 for lab, _ in g.axiom.edges if g.is_nonterminal(lab)) != 1:
            out.append(Diagnostic("axiom", "axiom", "a CHR axiom carries exactly one non-terminal hyperarc"))
    return out


def _connected(context: Hypergraph, formal: Sequence[str]) -> bool:
    parent = {}

    def find(v):
        while parent.setdefault(v, v) != v:
            v = parent[v]
        return v

    for _, verts in list(context.edges) + [("", tuple(formal))]:
        for v in verts[1:]:
            parent[find(v)] = find(verts[0])
    for v in context.vertices | set(formal):
        find(v)
    return len({find(v) for v in parent}) <= 1


# --- matching ---------------------------------------------------------------

class _Index:
    """Non-terminal-free hyperarcs indexed by (label, position, vertex)."""

    def __init__(self, arcs: Iterable[Hyperarc] = ()):
        self.arcs: set[Hyperarc] = set()
        self.by_pos: dict[tuple[str, int, str], list[tuple[str, ...]]] = {}
        self.by_label: dict[str, list[tuple[str, ...]]] = {}
        self.adjacent: dict[str, set[str]] = {}
        self.add(arcs)

    def add(self, arcs: Iterable[Hyperarc]) -> None:
        for label, verts in arcs:
            if (label, verts) in self.arcs:
                continue
            self.arcs.add((label, verts))
            self.by_label.setdefault(label, []).append(verts)
            for i, v in enumerate(verts):
                self.by_pos.setdefault((label, i, v), []).append(verts)
                self.adjacent.setdefault(v, set()).update(verts)


@dataclass(frozen=True)
class Match:
    occurrence: Hyperarc
    rule: ContextualRule
    mapping: Mapping[str, str]


def _embed(rule: ContextualRule, occurrence: Hyperarc, index: _Index, cap: int = 2) -> list[dict[str, str]]:
    label, verts = occurrence
    start: dict[str, str] = {}
    for x, v in zip(rule.formal, verts):
        if start.setdefault(x, v) != v:
            return []
    todo = list(rule.context.edges)
    found: list[dict[str, str]] = []

    def search(binding: dict[str, str], rest: list):
        if len(found) >= cap:
            return
        if not rest:
            found.append(dict(binding))
            return
        # most constrained arc first
        k = max(range(len(rest)), key=lambda i: sum(v in binding for v in rest[i][1]))
        lab, pattern = rest[k]
        remaining = rest[:k] + rest[k + 1:]
        bound = [(i, binding[x]) for i, x in enumerate(pattern) if x in binding]
        if bound:
            i, v = bound[0]
            candidates = index.by_pos.get((lab, i, v), [])
        else:
            candidates = index.by_label.get(lab, [])
        for image in candidates:
            new = dict(binding)
            ok = True
            for x, w in zip(pattern, image):
                if new.setdefault(x, w) != w:
                    ok = False
                    break
            if ok:
                search(new, remaining)

    search(start, todo)
    return found


def find_matches(h: Hypergraph | Iterable[Hyperarc], rule: ContextualRule, nonterminals: Iterable[str] = ()
                 ) -> tuple[list[Match], list[Hyperarc]]:
    """Matches of ``rule`` on every occurrence of its non-terminal, and the blocked occurrences.

    Context arcs are matched against every hyperarc whose label is not in
    ``nonterminals``.  An occurrence with two different context morphisms
    yields two matches.
    """
    nonterminals = set(nonterminals) | {rule.lhs}
    edges = list(h.edges if isinstance(h, Hypergraph) else h)
    index = _Index(e for e in edges if e[0] not in nonterminals)
    matches, blocked = [], []
    for occ in edges:
        if occ[0] != rule.lhs:
            continue
        maps = _embed(rule, occ, index)
        if maps:
            matches += [Match(occ, rule, m) for m in maps]
        else:
            blocked.append(occ)
    return matches, blocked


# --- generation -------------------------------------------------------------

@dataclass
class Event:
    step: int
    rule: str
    occurrence: Hyperarc


@dataclass
class ContextualState:
    """Mutable generation state; use :func:`start` and :func:`parallel_step`."""

    system: ContextualSystem
    index: _Index
    pending: list[Hyperarc]
    done: set[Hyperarc]
    axiom_state: hr.GenerationState | None = None
    step: int = 0
    counter: int = 0
    diagnostics: list[str] = field(default_factory=list)
    log: list[Event] = field(default_factory=list)
    ambiguous: int = 0

    @property
    def arcs(self) -> set[Hyperarc]:
        return self.index.arcs

    def hypergraph(self) -> Hypergraph:
        return Hypergraph(tuple(sorted(self.index.arcs)) + tuple(self.pending))

    def frontier(self) -> set[str]:
        if self.axiom_state is None:
            return set()
        return {v for o in self.axiom_state.pending for v in o.vertices}


def start(g: ContextualSystem) -> ContextualState:
    if isinstance(g.axiom, TreeAxiom):
        axiom_state = hr.start(g.axiom.grammar)
        label, verts = g.axiom.start
        return ContextualState(g, _Index(axiom_state.terminals.edges), [(label, tuple(verts))], set(), axiom_state)
    edges = g.axiom.edges
    return ContextualState(g, _Index(e for e in edges if not g.is_nonterminal(e[0])),
                           [e for e in edges if g.is_nonterminal(e[0])], set())


def _probe_radius(g: ContextualSystem, label: str) -> int:
    return max((len(r.context.edges) for r in g.rules_for(label)), default=0)


def _near_frontier(s: ContextualState, occ: Hyperarc, frontier: set[str]) -> bool:
    radius = _probe_radius(s.system, occ[0])
    if radius == 0:
        return False
    seen = set(occ[1])
    layer = set(occ[1])
    for _ in range(radius + 1):
        if layer & frontier:
            return True
        nxt = set()
        for v in layer:
            nxt |= s.index.adjacent.get(v, set())
        layer = nxt - seen
        seen |= nxt
    return False


def _extend_axiom(s: ContextualState) -> None:
    g = s.system.axiom.grammar
    before = set(s.axiom_state.terminals.edges)
    s.axiom_state = hr.parallel_step(g, s.axiom_state)
    s.index.add(e for e in s.axiom_state.terminals.edges if e not in before)


def _try(s: ContextualState, occ: Hyperarc) -> Match | None:
    for rule in s.system.rules_for(occ[0]):
        maps = _embed(rule, occ, s.index)
        if len(maps) > 1:
            s.ambiguous += 1
        if maps:
            return Match(occ, rule, maps[0])
    return None


def parallel_step(s: ContextualState, axiom_depth: int = 0) -> ContextualState:
    """Rewrite every matchable pending occurrence once (in place; returns ``s``).

    Matching is done against the graph as it stood when the step began; the
    HR axiom is grown on demand, at most to level ``axiom_depth``.
    """
    g = s.system
    matches: list[Match] = []
    blocked: list[Hyperarc] = []
    for occ in s.pending:
        m = _try(s, occ)
        if m is None:
            blocked.append(occ)
        else:
            matches.append(m)
    while s.axiom_state is not None and s.axiom_state.pending:
        frontier = s.frontier()
        waiting = [o for o in blocked if _near_frontier(s, o, frontier)]
        if not waiting:
            break
        if s.axiom_state.level >= axiom_depth:
            labels = sorted({o[0] for o in waiting})
            s.diagnostics.append(f"frontier-truncated: step {s.step + 1}, {len(waiting)} occurrence(s) of "
                                 f"{', '.join(labels)} need the axiom beyond depth {axiom_depth}")
            break
        _extend_axiom(s)
        still = []
        for occ in blocked:
            m = _try(s, occ)
            if m is None:
                still.append(occ)
            else:
                matches.append(m)
        blocked = still
    s.step += 1
    new_pending = list(blocked)
    queued = set(blocked)
    added = []
    for m in matches:
        s.done.add(m.occurrence)
        names = dict(m.mapping)
        anchor = m.occurrence[1][0]
        for v in m.rule.rhs.vertex_list():
            if v not in names:
                names[v] = f"{anchor}/{v}#{s.counter}"
        s.counter += 1
        s.log.append(Event(s.step, m.rule.name or m.rule.lhs, m.occurrence))
        for label, verts in m.rule.rhs.edges:
            arc = (label, tuple(names[v] for v in verts))
            if g.is_nonterminal(label):
                if arc not in s.done and arc not in queued:
                    queued.add(arc)
                    new_pending.append(arc)
            else:
                added.append(arc)
    s.index.add(added)
    s.pending = new_pending
    return s


def run(g: ContextualSystem, n: int, axiom_depth: int = 0) -> ContextualState:
    if n < 0 or axiom_depth < 0:
        raise ValidationError("step count and axiom depth must be >= 0")
    s = start(g)
    for _ in range(n):
        parallel_step(s, axiom_depth)
    return s


def terminal_view(s: ContextualState) -> Graph:
    return Graph.from_hypergraph(Hypergraph(tuple(sorted(s.arcs))), labels=s.system.terminals)


def generate(g: ContextualSystem, n: int, axiom_depth: int = 0) -> Graph:
    """Terminal arcs and colours after n steps (see :func:`run` for diagnostics)."""
    return terminal_view(run(g, n, axiom_depth))


# --- tree axioms and the rational correspondence ----------------------------

TREE = "T"
START = "S"


def complete_tree_axiom(directions: Sequence[str], root: str = "r") -> HRGrammar:
    """HR grammar of the complete tree: T(x) -> d(x, y_d), T(y_d) for each direction d."""
    rhs = []
    for d in directions:
        rhs += [(d, ("x", f"y_{d}")), (TREE, (f"y_{d}",))]
    return HRGrammar({TREE: 1}, {d: 2 for d in directions},
                     (Rule(TREE, ("x",), Hypergraph(tuple(rhs))),), Hypergraph(((TREE, (root,)),)))


def tree_directions(g: ContextualSystem) -> tuple[str, ...] | None:
    """The directions if the axiom is a complete tree built by :func:`complete_tree_axiom`."""
    if not isinstance(g.axiom, TreeAxiom):
        return None
    a = g.axiom.grammar
    if len(a.rules) != 1 or len(a.axiom.edges) != 1:
        return None
    rule = a.rules[0]
    label, verts = a.axiom.edges[0]
    if len(verts) != 1 or label != rule.lhs or a.nonterminals.get(label) != 1:
        return None
    root = verts[0]
    x, = rule.formal
    dirs, children = [], set()
    for lab, verts in rule.rhs.edges:
        if lab == label:
            children.add(verts[0])
        elif len(verts) == 2 and verts[0] == x:
            dirs.append((lab, verts[1]))
        else:
            return None
    if len(dirs) != len(children) or {c for _, c in dirs} != children or x in children:
        return None
    if len({d for d, _ in dirs}) != len(dirs):
        return None
    if any(v != root for v in g.axiom.start[1]):
        return None
    return tuple(d for d, _ in dirs)


def tree_root(g: ContextualSystem) -> str:
    return g.axiom.grammar.axiom.edges[0][1][0]


def decode_tree(s: ContextualState, directions: Sequence[str], root: str) -> dict[str, tuple[str, ...]]:
    """Map materialized tree vertices to their root paths."""
    words = {root: ()}
    stack = [root]
    dirs = set(directions)
    while stack:
        v = stack.pop()
        for d in dirs:
            for verts in s.index.by_pos.get((d, 0, v), []):
                w = verts[1]
                if w not in words:
                    words[w] = words[v] + (d,)
                    stack.append(w)
    return words


def tree_view(s: ContextualState, max_len: int) -> Graph:
    """Tree vertices of depth <= max_len, named by their root paths, with the terminal arcs among them."""
    directions = tree_directions(s.system)
    if directions is None:
        raise ValidationError("tree_view needs a complete-tree axiom")
    words = decode_tree(s, directions, tree_root(s.system))
    name = {v: format_word(w, directions) for v, w in words.items() if len(w) <= max_len}
    arcs, colours = set(), set()
    for label, verts in s.arcs:
        if label not in s.system.terminals or not all(v in name for v in verts):
            continue
        if len(verts) == 2:
            arcs.add((name[verts[0]], label, name[verts[1]]))
        else:
            colours.add((label, name[verts[0]]))
    # the axiom is the complete tree, so every short path is a vertex even if not yet materialized
    everything = {format_word(w, directions) for n in range(max_len + 1)
                  for w in itertools.product(directions, repeat=n)}
    return Graph(frozenset(everything), frozenset(arcs), frozenset(colours))


def _state_name(q: int) -> str:
    return f"q{q}"


def from_rational(p: RationalGraph | LabelledTransducer) -> ContextualSystem:
    """CHR-grammar over the complete |X|-ary tree generating the rational graph.

    A non-terminal ``q(x1, x2)`` says the transducer can be in state q after
    reading the root paths of x1 and x2.  Its rule looks one letter down both
    trees and plants the successor states there.
    """
    if isinstance(p, RationalGraph):
        t = p.transducer
        if p.restriction is not None:
            parts = [(a, p.relation(a)) for a in p.sigma]
            t = td.normalize_edges(td.labelled_union(parts, p.alphabet, p.sigma))
    else:
        t = p
    if not td.is_normalized(t):
        raise ValidationError("transducer edges must read at most one letter per tape (normalize_edges first)")
    X, sigma = t.alphabet, t.sigma
    names = {_state_name(q) for q in range(t.n_states)} | {START}
    clash = (set(X) & (set(sigma) | names)) | (set(sigma) & names) | ({TREE} & (set(X) | set(sigma)))
    if clash:
        raise ValidationError(f"labels {sorted(clash)} would be ambiguous in the grammar")
    rules = []
    for q in range(t.n_states):
        context, rhs = [], []
        for (src, u, v, dst) in t.edges:
            if src != q:
                continue
            y = "x1"
            if u:
                y = f"y_{u[0]}"
                context.append((u[0], ("x1", y)))
            z = "x2"
            if v:
                z = f"z_{v[0]}"
                context.append((v[0], ("x2", z)))
            rhs.append((_state_name(dst), (y, z)))
        for a in sorted(t.labels.get(q, ())):
            rhs.append((a, ("x1", "x2")))
        rules.append(ContextualRule(Hypergraph(tuple(context)), _state_name(q), ("x1", "x2"),
                                    Hypergraph(tuple(rhs)), f"R_{q}"))
    nonterminals = {_state_name(q): 2 for q in range(t.n_states)}
    initial = sorted(t.initial)
    if len(initial) == 1:
        start_label = _state_name(initial[0])
    else:
        start_label = START
        nonterminals[START] = 2
        rhs = tuple((_state_name(q), ("x1", "x2")) for q in initial)
        rules.append(ContextualRule(Hypergraph(), START, ("x1", "x2"), Hypergraph(rhs, frozenset({"x1", "x2"})),
                                    "R_start"))
    axiom = TreeAxiom(complete_tree_axiom(X), (start_label, ("r", "r")))
    return ContextualSystem({d: 2 for d in X}, nonterminals, {a: 2 for a in sigma}, tuple(rules), axiom, "chr")


def round_trip_budget(max_len: int, system: ContextualSystem | None = None) -> tuple[int, int]:
    """Steps and axiom depth after which every arc among vertices of length <= max_len is present.

    Every rule of :func:`from_rational` consumes at least one letter per
    planted successor unless the edge reads nothing, so 2*max_len transitions
    plus the start rule suffice when no edge reads ε on both tapes.
    """
    extra = 1 if system is not None and START in system.nonterminals else 0
    return 2 * max_len + 1 + extra, max_len + 1


def is_tree_separated(g: ContextualSystem) -> bool:
    if isinstance(g.axiom, TreeAxiom):
        if tree_directions(g) is None:
            return False
    elif not _is_forest(g.axiom.edges, roots=None):
        return False
    for r in g.rules:
        if not _is_forest(r.context.edges, roots=r.formal):
            return False
    return True


def _is_forest(edges: Iterable[Hyperarc], roots: Sequence[str] | None) -> bool:
    """Out-trees; with ``roots`` given, each component holds exactly one root, at its top."""
    parent: dict[str, str] = {}
    vertices = set()
    for label, verts in edges:
        vertices.update(verts)
        if len(verts) == 1:
            continue
        if len(verts) != 2:
            return False
        s, t = verts
        if t in parent or s == t:
            return False
        parent[t] = s
    # acyclic and collect the top of each vertex
    tops = {}
    for v in vertices:
        seen = {v}
        w = v
        while w in parent:
            w = parent[w]
            if w in seen:
                return False
            seen.add(w)
        tops[v] = w
    if roots is None:
        return len(set(tops.values())) <= 1
    roots = set(roots)
    for v, top in tops.items():
        if top not in roots:
            return False
        if v in roots and v != top:
            return False
    return True


def to_rational(g: ContextualSystem) -> RationalGraph:
    """Rational presentation of a tree-separated CHR-grammar over a complete tree.

    A transducer state ``(A, i, j)`` means: the input read so far is the path
    of A's i-th attachment and the output read so far is that of its j-th.
    """
    if g.kind != "chr" or not is_tree_separated(g):
        raise ValidationError("to_rational needs a tree-separated CHR-grammar")
    directions = tree_directions(g)
    problems = [d for d in validate(g) if d.kind in ("determinism", "arity", "formal")]
    if problems:
        raise ValidationError("; ".join(map(str, problems)))
    label0, verts0 = g.axiom.start
    root = tree_root(g)
    index: dict[tuple[str, int, int], int] = {}
    edges: list = []
    labels: dict[int, set[str]] = {}

    def state(key) -> int:
        if key not in index:
            index[key] = len(index) + 1
            todo.append(key)
        return index[key]

    todo: list = []
    initial = 0
    for i, j in itertools.product(range(len(verts0)), repeat=2):
        edges.append((initial, (), (), state((label0, i, j))))
    finals: dict[str, int] = {}
    while todo:
        A, i, j = todo.pop(0)
        src = index[(A, i, j)]
        for rule in g.rules_for(A):
            where = _context_paths(rule, set(directions))
            for label, verts in rule.rhs.edges:
                if any(v not in where for v in verts):
                    raise ValidationError(f"rule {rule.name or rule.lhs}: right-hand side vertex outside the "
                                          "context trees is not supported")
                if g.is_nonterminal(label):
                    for i2, j2 in itertools.product(range(len(verts)), repeat=2):
                        (ai, wi), (aj, wj) = where[verts[i2]], where[verts[j2]]
                        if ai == i and aj == j:
                            edges.append((src, wi, wj, state((label, i2, j2))))
                elif len(verts) == 2:
                    (ai, wi), (aj, wj) = where[verts[0]], where[verts[1]]
                    if ai == i and aj == j:
                        if label not in finals:
                            finals[label] = -1 - len(finals)
                        edges.append((src, wi, wj, finals[label]))
    n_states = len(index) + 1 + len(finals)
    remap = {f: n_states - 1 - k for k, f in enumerate(finals.values())}
    edges = [(p, u, v, remap.get(q, q)) for p, u, v, q in edges]
    for label, f in finals.items():
        labels[remap[f]] = {label}
    sigma = sorted(lab for lab, n in g.terminals.items() if n == 2)
    t = LabelledTransducer(directions, tuple(sigma), n_states, {initial}, labels, edges)
    return RationalGraph(t)


def _context_paths(rule: ContextualRule, directions: set[str]) -> dict[str, tuple[int, tuple[str, ...]]]:
    """Each context or formal vertex as (formal index, path below it)."""
    where = {x: (i, ()) for i, x in enumerate(rule.formal)}
    pending = [e for e in rule.context.edges if len(e[1]) == 2]
    while pending:
        rest = []
        for label, (s, t) in pending:
            if s in where:
                if label not in directions:
                    raise ValidationError(f"context label {label!r} is not a tree direction")
                i, w = where[s]
                where[t] = (i, w + (label,))
            else:
                rest.append((label, (s, t)))
        if len(rest) == len(pending):
            break
        pending = rest
    return where


# --- PCP --------------------------------------------------------------------

PCP_LETTERS = ("a", "b")


@dataclass(frozen=True)
class PCPInstance:
    pairs: tuple[tuple[str, str], ...]

    def __post_init__(self):
        pairs = tuple((str(u), str(v)) for u, v in self.pairs)
        if not pairs:
            raise ValidationError("a PCP instance needs at least one pair")
        for u, v in pairs:
            if not u or not v or set(u + v) - set(PCP_LETTERS):
                raise ValidationError(f"pair ({u!r}, {v!r}) must be non-empty words over a, b")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def parse(cls, text: str) -> PCPInstance:
        """``ab:a,b:bb`` -> ((ab, a), (b, bb))."""
        pairs = []
        for part in text.split(","):
            u, sep, v = part.strip().partition(":")
            if not sep:
                raise ValidationError(f"pair {part!r} is not of the form U:V")
            pairs.append((u, v))
        return cls(tuple(pairs))

    def solves(self, indices: Sequence[int]) -> bool:
        return bool(indices) and ("".join(self.pairs[i][0] for i in indices)
                                  == "".join(self.pairs[i][1] for i in indices))

    def hash_step_bound(self, solution_length: int) -> int:
        """Steps after which a solution of that many indices has produced the # arc."""
        longest = max(max(len(u), len(v)) for u, v in self.pairs)
        return solution_length + 2 + solution_length * longest


def pcp_encode(inst: PCPInstance) -> ContextualSystem:
    """Contextual system that draws a # arc from 0 to 1 iff the instance has a solution.

    ``fwd`` grows, from each pair of branch ends, one U-chain and one V-chain
    per index; ``nxt`` marks the new ends and becomes a ``chk`` walker that
    climbs both branches one equal letter at a time.  ``chk`` carries the two
    ends it started from so every # arc can be traced back to its sequence.
    """
    rhs = []
    for i, (u, v) in enumerate(inst.pairs, start=1):
        for side, word, top in (("u", u, "x1"), ("v", v, "x2")):
            prev = top
            for k, letter in enumerate(word):
                cur = f"{side}{i}" if k == len(word) - 1 else f"{side}{i}_{k}"
                rhs.append((letter, (prev, cur)))
                prev = cur
        rhs += [("fwd", (f"u{i}", f"v{i}")), ("nxt", (f"u{i}", f"v{i}"))]
    rules = [
        ContextualRule(Hypergraph(), "fwd", ("x1", "x2"), Hypergraph(tuple(rhs)), "R1"),
        ContextualRule(Hypergraph(), "nxt", ("x1", "x2"),
                       Hypergraph((("chk", ("x1", "x2", "x1", "x2")),)), "R2"),
    ]
    for letter in PCP_LETTERS:
        rules.append(ContextualRule(
            Hypergraph(((letter, ("p1", "x1")), (letter, ("p2", "x2")))), "chk", ("x1", "x2", "o1", "o2"),
            Hypergraph((("chk", ("p1", "p2", "o1", "o2")),)), f"R3{letter.upper()}"))
    rules.append(ContextualRule(Hypergraph((("root", ("x1", "x2")),)), "chk", ("x1", "x2", "o1", "o2"),
                                Hypergraph((("#", ("x1", "x2")),), frozenset({"o1", "o2"})), "R4"))
    axiom = Hypergraph((("root", ("0", "1")), ("fwd", ("0", "1"))))
    terminals = {letter: 2 for letter in PCP_LETTERS} | {"root": 2, "#": 2}
    return ContextualSystem({}, {"fwd": 2, "nxt": 2, "chk": 4}, terminals, tuple(rules), axiom, "contextual")


_U_END = re.compile(r"/u(\d+)#")
_V_END = re.compile(r"/v(\d+)#")


def pcp_sequence(vertex: str, side: str = "u") -> tuple[int, ...]:
    """Index sequence (0-based) spelled by a branch end created by the encoder."""
    pattern = _U_END if side == "u" else _V_END
    return tuple(int(m) - 1 for m in pattern.findall(vertex))


def pcp_witnesses(s: ContextualState) -> list[tuple[int, ...]]:
    """Index sequences of the walkers that produced a # arc."""
    out = []
    for e in s.log:
        if e.rule == "R4":
            out.append(pcp_sequence(e.occurrence[1][2], "u"))
    return out


def has_hash(s: ContextualState, source: str = "0", target: str = "1") -> bool:
    return ("#", (source, target)) in s.arcs


def pcp_brute_force(inst: PCPInstance, max_indices: int) -> tuple[int, ...] | None:
    """Shortest solution of at most ``max_indices`` indices, shortest first."""
    n = len(inst.pairs)
    for m in range(1, max_indices + 1):
        for seq in itertools.product(range(n), repeat=m):
            if inst.solves(seq):
                return seq
    return None
