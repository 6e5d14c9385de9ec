"""Deterministic hyperedge-replacement grammars.

Generation is complete parallel rewriting.  Every non-terminal occurrence
carries a hierarchical address (``0``, ``0.1``, ...) and fresh vertices are
named ``<address>/<local name>#<counter>``, so level n is a literal
sub-hypergraph of level n+1 and two runs produce identical graphs.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

from .errors import ValidationError
from .graph import Graph, Hypergraph

MAX_INTERFACE_ARITY = 12


@dataclass(frozen=True)
class Rule:
    lhs: str
    formal: tuple[str, ...]
    rhs: Hypergraph


@dataclass(frozen=True)
class Diagnostic:
    kind: str
    location: str
    message: str

    def __str__(self):
        return f"{self.kind} at {self.location}: {self.message}"


@dataclass(frozen=True, eq=False)
class HRGrammar:
    nonterminals: Mapping[str, int]
    terminals: Mapping[str, int]
    rules: tuple[Rule, ...]
    axiom: Hypergraph
    _by_lhs: dict = field(default=None, init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "nonterminals", dict(self.nonterminals))
        object.__setattr__(self, "terminals", dict(self.terminals))
        object.__setattr__(self, "rules", tuple(self.rules))
        by_lhs = {}
        for r in self.rules:
            by_lhs.setdefault(r.lhs, r)
        object.__setattr__(self, "_by_lhs", by_lhs)

    def rule(self, label: str) -> Rule | None:
        return self._by_lhs.get(label)

    def is_nonterminal(self, label: str) -> bool:
        return label in self.nonterminals

    def colours(self) -> set[str]:
        return {t for t, n in self.terminals.items() if n == 1}

    def to_json(self) -> dict:
        return {
            "type": "hr",
            "nonterminals": dict(self.nonterminals),
            "terminals": dict(self.terminals),
            "axiom": self.axiom.to_json(),
            "rules": [{"lhs": r.lhs, "formal": list(r.formal), "rhs": r.rhs.to_json()} for r in self.rules],
        }

    @classmethod
    def from_json(cls, data: dict) -> HRGrammar:
        raw = data["rules"]
        if isinstance(raw, dict):
            raw = [dict(body, lhs=lhs) for lhs, body in raw.items()]
        rules = [Rule(r["lhs"], tuple(r["formal"]), Hypergraph.from_json(r["rhs"])) for r in raw]
        return cls(data.get("nonterminals", {}), data.get("terminals", {}), tuple(rules),
                   Hypergraph.from_json(data["axiom"]))


def validate(g: HRGrammar) -> list[Diagnostic]:
    """All structural violations; never raises."""
    out: list[Diagnostic] = []
    both = set(g.nonterminals) & set(g.terminals)
    for label in sorted(both):
        out.append(Diagnostic("alphabet", label, "declared both terminal and non-terminal"))
    for label, n in g.terminals.items():
        if n not in (1, 2):
            out.append(Diagnostic("arity", label, f"terminal arity {n} is not 1 or 2"))
    for label, n in g.nonterminals.items():
        if n < 1:
            out.append(Diagnostic("arity", label, f"non-terminal arity {n} must be positive"))
    seen: dict[str, int] = {}
    for i, r in enumerate(g.rules):
        loc = f"rule {i} ({r.lhs})"
        if r.lhs in seen:
            out.append(Diagnostic("determinism", loc, f"second rule for {r.lhs} (first is rule {seen[r.lhs]})"))
        seen.setdefault(r.lhs, i)
        if r.lhs not in g.nonterminals:
            out.append(Diagnostic("alphabet", loc, f"left-hand side {r.lhs!r} is not a declared non-terminal"))
        elif len(r.formal) != g.nonterminals[r.lhs]:
            out.append(Diagnostic("arity", loc, f"{len(r.formal)} formal vertices for arity {g.nonterminals[r.lhs]}"))
        if len(set(r.formal)) != len(r.formal):
            out.append(Diagnostic("formal", loc, "formal vertices must be pairwise distinct"))
        out += _check_hyperarcs(g, r.rhs, loc + " rhs")
    out += _check_hyperarcs(g, g.axiom, "axiom")
    used = {lab for lab, _ in g.axiom.edges if lab in g.nonterminals}
    for r in g.rules:
        used |= {lab for lab, _ in r.rhs.edges if lab in g.nonterminals}
    for label in sorted(used - set(seen)):
        out.append(Diagnostic("coverage", label, "non-terminal occurs but has no rule"))
    return out


def _check_hyperarcs(g: HRGrammar, h: Hypergraph, where: str) -> list[Diagnostic]:
    out = []
    for label, verts in h.edges:
        arity = g.nonterminals.get(label, g.terminals.get(label))
        if arity is None:
            out.append(Diagnostic("alphabet", where, f"undeclared label {label!r}"))
        elif arity != len(verts):
            out.append(Diagnostic("arity", where, f"{label}{verts} has {len(verts)} vertices, arity is {arity}"))
    return out


def require_valid(g: HRGrammar) -> None:
    problems = validate(g)
    if problems:
        raise ValidationError("; ".join(str(d) for d in problems))


# --- generation -------------------------------------------------------------

@dataclass(frozen=True)
class Occurrence:
    address: str
    label: str
    vertices: tuple[str, ...]

    @property
    def hyperarc(self) -> tuple[str, tuple[str, ...]]:
        return self.label, self.vertices


@dataclass(frozen=True)
class GenerationState:
    terminals: Hypergraph
    pending: tuple[Occurrence, ...]
    level: int = 0
    counter: int = 0

    @property
    def current(self) -> Hypergraph:
        return Hypergraph(self.terminals.edges + tuple(o.hyperarc for o in self.pending),
                          self.terminals.extra_vertices)


def start(g: HRGrammar) -> GenerationState:
    terminals, pending = [], []
    for label, verts in g.axiom.edges:
        if g.is_nonterminal(label):
            pending.append(Occurrence(str(len(pending)), label, verts))
        else:
            terminals.append((label, verts))
    return GenerationState(Hypergraph(tuple(terminals), g.axiom.vertices), tuple(pending))


def _expand(g: HRGrammar, occ: Occurrence, counter: int) -> tuple[list, list[Occurrence]]:
    rule = g.rule(occ.label)
    if rule is None:
        raise ValidationError(f"no rule for non-terminal {occ.label!r}")
    if len(rule.formal) != len(occ.vertices):
        raise ValidationError(f"{occ.label}{occ.vertices} does not match the arity of its rule")
    names = dict(zip(rule.formal, occ.vertices))
    for v in rule.rhs.vertex_list():
        names.setdefault(v, f"{occ.address}/{v}#{counter}")
    terminals, children = [], []
    for label, verts in rule.rhs.edges:
        image = tuple(names[v] for v in verts)
        if g.is_nonterminal(label):
            children.append(Occurrence(f"{occ.address}.{len(children)}", label, image))
        else:
            terminals.append((label, image))
    return terminals, children


def rewrite_step(g: HRGrammar, s: GenerationState, which) -> GenerationState:
    """Replace one non-terminal occurrence (an Occurrence or a ``(label, vertices)`` pair)."""
    if not isinstance(which, Occurrence):
        label, verts = which
        which = next((o for o in s.pending if o.label == label and o.vertices == tuple(verts)), None)
    if which is None or which not in s.pending:
        raise ValidationError("hyperarc to rewrite is not a pending non-terminal")
    terminals, children = _expand(g, which, s.counter)
    pending = tuple(o for o in s.pending if o != which) + tuple(children)
    return replace(s, terminals=s.terminals.with_edges(terminals), pending=pending, counter=s.counter + 1)


def parallel_step(g: HRGrammar, s: GenerationState) -> GenerationState:
    terminals, pending = [], []
    counter = s.counter
    for occ in s.pending:
        if g.rule(occ.label) is None:
            pending.append(occ)
            continue
        t, children = _expand(g, occ, counter)
        counter += 1
        terminals += t
        pending += children
    return GenerationState(s.terminals.with_edges(terminals), tuple(pending), s.level + 1, counter)


def generate_state(g: HRGrammar, n: int) -> GenerationState:
    if n < 0:
        raise ValidationError("level must be >= 0")
    s = start(g)
    for _ in range(n):
        s = parallel_step(g, s)
    return s


def terminal_graph(h: Hypergraph, terminals: Iterable[str]) -> Graph:
    return Graph.from_hypergraph(h, labels=terminals)


def generate(g: HRGrammar, n: int) -> Graph:
    """Terminal arcs and colours after n complete parallel steps."""
    return terminal_graph(generate_state(g, n).terminals, g.terminals)


# --- interface summaries ----------------------------------------------------

def _closure(edges: Mapping[str, set[str]], sources: Iterable[str]) -> set[str]:
    seen = set(sources)
    stack = list(seen)
    while stack:
        v = stack.pop()
        for w in edges.get(v, ()):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def _check_arity_cap(g: HRGrammar) -> None:
    for label, n in g.nonterminals.items():
        if n > MAX_INTERFACE_ARITY:
            raise ValidationError(f"non-terminal {label} has arity {n} > {MAX_INTERFACE_ARITY}; "
                                  "interface abstraction would be too large")


def _rhs_adjacency(g: HRGrammar, h: Hypergraph, through: Mapping[str, set], symmetric: bool) -> dict[str, set[str]]:
    adj: dict[str, set[str]] = {}
    for label, verts in h.edges:
        if g.is_nonterminal(label):
            for i, j in through.get(label, ()):
                adj.setdefault(verts[i], set()).add(verts[j])
        elif len(verts) == 2 and label in g.terminals:
            adj.setdefault(verts[0], set()).add(verts[1])
            if symmetric:
                adj.setdefault(verts[1], set()).add(verts[0])
    return adj


def _reach_summaries(g: HRGrammar, source: str, symmetric: bool):
    """Least fixpoint of, per non-terminal: attachment-to-attachment reachability
    through its whole expansion, and attachments reached from a source inside it."""
    through: dict[str, set[tuple[int, int]]] = {A: set() for A in g.nonterminals}
    sourced: dict[str, set[int]] = {A: set() for A in g.nonterminals}
    changed = True
    while changed:
        changed = False
        for r in g.rules:
            adj = _rhs_adjacency(g, r.rhs, through, symmetric)
            pairs = set()
            for i, x in enumerate(r.formal):
                reached = _closure(adj, [x])
                pairs |= {(i, j) for j, y in enumerate(r.formal) if y in reached and i != j}
            seeds = _sources(g, r.rhs, source, sourced)
            reached = _closure(adj, seeds)
            hit = {i for i, x in enumerate(r.formal) if x in reached}
            if not pairs <= through[r.lhs] or not hit <= sourced[r.lhs]:
                through[r.lhs] |= pairs
                sourced[r.lhs] |= hit
                changed = True
    return through, sourced


def _sources(g: HRGrammar, h: Hypergraph, colour: str, sourced: Mapping[str, set[int]]) -> set[str]:
    seeds = set()
    for label, verts in h.edges:
        if label == colour and len(verts) == 1:
            seeds.add(verts[0])
        elif g.is_nonterminal(label):
            seeds |= {verts[i] for i in sourced.get(label, ())}
    return seeds


def _annotated(label: str, positions: Iterable[int]) -> str:
    return f"{label}[{','.join(str(i + 1) for i in sorted(positions))}]"


def _transform(g: HRGrammar, decide, keep_terminal, extra=None) -> HRGrammar:
    """Specialise non-terminals by the set of attachment positions holding a property.

    ``decide(h, known)`` gives the vertices of an RHS (or the axiom) holding
    it when the formal vertices ``known`` do; ``keep_terminal`` filters
    terminal hyperarcs and ``extra`` adds hyperarcs on created vertices.
    """
    nonterminals: dict[str, int] = {}
    rules: list[Rule] = []
    done: set[tuple[str, frozenset[int]]] = set()
    work: list[tuple[str, frozenset[int]]] = []

    def body(h: Hypergraph, formal: tuple[str, ...], known: set[str]) -> Hypergraph:
        marked = decide(h, known)
        edges = []
        for label, verts in h.edges:
            if not g.is_nonterminal(label):
                if keep_terminal(verts, marked):
                    edges.append((label, verts))
            elif g.rule(label) is None:
                nonterminals[label] = g.nonterminals[label]
                edges.append((label, verts))
            else:
                positions = frozenset(i for i, v in enumerate(verts) if v in marked)
                new = _annotated(label, positions)
                nonterminals[new] = len(verts)
                edges.append((new, verts))
                if (label, positions) not in done:
                    done.add((label, positions))
                    work.append((label, positions))
        if extra is not None:
            created = [v for v in h.vertex_list() if v not in formal]
            edges += extra(created, marked)
        return Hypergraph(tuple(edges), h.extra_vertices)

    axiom = body(g.axiom, (), set())
    while work:
        label, positions = work.pop(0)
        r = g.rule(label)
        rhs = body(r.rhs, r.formal, {r.formal[i] for i in positions})
        rules.append(Rule(_annotated(label, positions), r.formal, rhs))
    return HRGrammar(nonterminals, g.terminals, tuple(rules), axiom)


def _check_colour(g: HRGrammar, colour: str) -> None:
    if g.terminals.get(colour) != 1:
        raise ValidationError(f"{colour!r} is not a declared colour (terminal of arity 1)")


def accessible_colouring(g: HRGrammar, source: str, new: str, symmetric: bool = False) -> HRGrammar:
    """Grammar for the same graph with ``new`` on every vertex reachable from a ``source`` vertex.

    Reachability follows terminal arcs forward (both ways when ``symmetric``)
    and includes the source vertices themselves.
    """
    _check_colour(g, source)
    _check_colour(g, new)
    _check_arity_cap(g)
    if any(label == new for h in [g.axiom] + [r.rhs for r in g.rules] for label, _ in h.edges):
        raise ValidationError(f"colour {new!r} is already used by the grammar")
    through, sourced = _reach_summaries(g, source, symmetric)

    def decide(h: Hypergraph, known: set[str]) -> set[str]:
        adj = _rhs_adjacency(g, h, through, symmetric)
        return _closure(adj, known | _sources(g, h, source, sourced))

    def extra(created, marked):
        return [(new, (v,)) for v in created if v in marked]

    return _transform(g, decide, lambda verts, marked: True, extra)


def colour_restriction(g: HRGrammar, colour: str) -> HRGrammar:
    """Grammar for the subgraph induced by the vertices carrying ``colour``."""
    _check_colour(g, colour)
    _check_arity_cap(g)
    gets: dict[str, set[int]] = {A: set() for A in g.nonterminals}
    changed = True
    while changed:
        changed = False
        for r in g.rules:
            coloured = _coloured(g, r.rhs, colour, gets)
            hit = {i for i, x in enumerate(r.formal) if x in coloured}
            if not hit <= gets[r.lhs]:
                gets[r.lhs] |= hit
                changed = True

    def decide(h: Hypergraph, known: set[str]) -> set[str]:
        return known | _coloured(g, h, colour, gets)

    return _transform(g, decide, lambda verts, marked: all(v in marked for v in verts))


def _coloured(g: HRGrammar, h: Hypergraph, colour: str, gets: Mapping[str, set[int]]) -> set[str]:
    out = set()
    for label, verts in h.edges:
        if label == colour and len(verts) == 1:
            out.add(verts[0])
        elif g.is_nonterminal(label):
            out |= {verts[i] for i in gets.get(label, ())}
    return out
