"""Explicit finite hypergraphs and graphs.

A :class:`Hypergraph` is a set of hyperarcs ``(label, (v1, ..., vn))``.  A
:class:`Graph` only holds arcs (arity 2) and colours (arity 1) and is what
every bounded view of an infinite graph is materialized as.
"""
from __future__ import annotations

import json
from collections import Counter, deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from . import automata as fa
from .automata import EPS, FiniteAutomaton
from .errors import ValidationError

BAR = "~"


@dataclass(frozen=True)
class Hypergraph:
    """Ordered, duplicate-free hyperarc list; equality ignores order."""

    edges: tuple[tuple[str, tuple[str, ...]], ...] = ()
    extra_vertices: frozenset[str] = frozenset()

    def __post_init__(self):
        seen = {}
        for label, verts in self.edges:
            verts = tuple(verts)
            if not verts:
                raise ValidationError(f"hyperarc {label!r} has no vertices")
            seen.setdefault((label, verts), None)
        object.__setattr__(self, "edges", tuple(seen))
        object.__setattr__(self, "extra_vertices", frozenset(self.extra_vertices))

    def __eq__(self, other):
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return set(self.edges) == set(other.edges) and self.vertices == other.vertices

    def __hash__(self):
        return hash(frozenset(self.edges))

    def __len__(self):
        return len(self.edges)

    def __iter__(self):
        return iter(self.edges)

    def __contains__(self, edge):
        return edge in set(self.edges)

    @property
    def vertices(self) -> frozenset[str]:
        vs = set(self.extra_vertices)
        for _, verts in self.edges:
            vs.update(verts)
        return frozenset(vs)

    def vertex_list(self) -> list[str]:
        """Vertices in order of first appearance."""
        seen = {}
        for _, verts in self.edges:
            for v in verts:
                seen.setdefault(v, None)
        for v in sorted(self.extra_vertices):
            seen.setdefault(v, None)
        return list(seen)

    def labels(self) -> set[str]:
        return {label for label, _ in self.edges}

    def with_edges(self, add: Iterable = (), remove: Iterable = ()) -> Hypergraph:
        remove = set(remove)
        return Hypergraph(tuple(e for e in self.edges if e not in remove) + tuple(add), self.extra_vertices)

    def to_json(self) -> dict:
        return {"vertices": self.vertex_list(), "hyperarcs": [[lab, *vs] for lab, vs in self.edges]}

    @classmethod
    def from_json(cls, data: dict) -> Hypergraph:
        edges = [(h[0], tuple(h[1:])) for h in data.get("hyperarcs", [])]
        edges += [(a, (s, t)) for s, a, t in data.get("arcs", [])]
        edges += [(c, (v,)) for c, v in data.get("colours", [])]
        declared = set(data.get("vertices", []))
        return cls(tuple(edges), frozenset(declared))


@dataclass(frozen=True)
class Graph:
    vertices: frozenset[str]
    arcs: frozenset[tuple[str, str, str]]  # (source, label, target)
    colours: frozenset[tuple[str, str]] = frozenset()  # (colour, vertex)

    def __post_init__(self):
        object.__setattr__(self, "vertices", frozenset(self.vertices))
        object.__setattr__(self, "arcs", frozenset(self.arcs))
        object.__setattr__(self, "colours", frozenset(self.colours))
        for s, _, t in self.arcs:
            if s not in self.vertices or t not in self.vertices:
                raise ValidationError(f"arc endpoint of {(s, t)} is not a declared vertex")
        for _, v in self.colours:
            if v not in self.vertices:
                raise ValidationError(f"coloured vertex {v!r} is not declared")

    @classmethod
    def from_arcs(cls, arcs: Iterable, colours: Iterable = (), vertices: Iterable = ()) -> Graph:
        arcs, colours = frozenset(arcs), frozenset(colours)
        vs = set(vertices)
        for s, _, t in arcs:
            vs.update((s, t))
        vs.update(v for _, v in colours)
        return cls(frozenset(vs), arcs, colours)

    @classmethod
    def from_hypergraph(cls, h: Hypergraph, labels: Iterable[str] | None = None,
                        keep_vertices: bool = False) -> Graph:
        """Project arity-1 and arity-2 hyperarcs (optionally only those with the given labels)."""
        wanted = None if labels is None else set(labels)
        arcs, colours = set(), set()
        for label, verts in h.edges:
            if wanted is not None and label not in wanted:
                continue
            if len(verts) == 2:
                arcs.add((verts[0], label, verts[1]))
            elif len(verts) == 1:
                colours.add((label, verts[0]))
        return cls.from_arcs(arcs, colours, h.vertices if keep_vertices else ())

    def to_hypergraph(self) -> Hypergraph:
        edges = [(a, (s, t)) for s, a, t in sorted(self.arcs)] + [(c, (v,)) for c, v in sorted(self.colours)]
        return Hypergraph(tuple(edges), self.vertices)

    def labels(self) -> set[str]:
        return {a for _, a, _ in self.arcs}

    def out_arcs(self) -> dict[str, list[tuple[str, str]]]:
        out: dict[str, list[tuple[str, str]]] = {v: [] for v in self.vertices}
        for s, a, t in self.arcs:
            out[s].append((a, t))
        for v in out:
            out[v].sort()
        return out

    def in_arcs(self) -> dict[str, list[tuple[str, str]]]:
        inc: dict[str, list[tuple[str, str]]] = {v: [] for v in self.vertices}
        for s, a, t in self.arcs:
            inc[t].append((a, s))
        return inc

    def induced(self, keep: Iterable[str]) -> Graph:
        keep = frozenset(keep) & self.vertices
        return Graph(keep,
                     frozenset(e for e in self.arcs if e[0] in keep and e[2] in keep),
                     frozenset(c for c in self.colours if c[1] in keep))

    def relabel(self, mapping: Mapping[str, str]) -> Graph:
        """Rename vertices; vertices missing from ``mapping`` keep their name."""
        m = lambda v: mapping.get(v, v)  # noqa: E731
        return Graph(frozenset(m(v) for v in self.vertices),
                     frozenset((m(s), a, m(t)) for s, a, t in self.arcs),
                     frozenset((c, m(v)) for c, v in self.colours))

    def reachable(self, sources: Iterable[str], symmetric: bool = False) -> set[str]:
        """Vertices reachable from ``sources`` (including the sources themselves)."""
        adj: dict[str, list[str]] = {v: [] for v in self.vertices}
        for s, _, t in self.arcs:
            adj[s].append(t)
            if symmetric:
                adj[t].append(s)
        seen = set(sources) & self.vertices
        stack = list(seen)
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    def to_json(self) -> dict:
        return {
            "vertices": sorted(self.vertices),
            "arcs": [list(a) for a in sorted(self.arcs)],
            "colours": [list(c) for c in sorted(self.colours)],
        }

    @classmethod
    def from_json(cls, data: dict) -> Graph:
        return cls(frozenset(data.get("vertices", [])),
                   frozenset(tuple(a) for a in data.get("arcs", [])),
                   frozenset(tuple(c) for c in data.get("colours", [])))


def is_deterministic(g: Graph) -> bool:
    seen: dict[tuple[str, str], str] = {}
    for s, a, t in g.arcs:
        if seen.setdefault((s, a), t) != t:
            return False
    return True


def unfold(g: Graph, root: str, depth: int) -> Graph:
    """Tree of the paths of length <= depth from ``root``; vertices are ``root.a1.v1...``."""
    if root not in g.vertices:
        raise ValidationError(f"unknown root {root!r}")
    out = g.out_arcs()
    colours_of: dict[str, list[str]] = {}
    for c, v in g.colours:
        colours_of.setdefault(v, []).append(c)
    vertices, arcs, colours = {root}, set(), set()
    layer = [(root, root)]
    for c in colours_of.get(root, ()):
        colours.add((c, root))
    for _ in range(depth):
        nxt = []
        for name, v in layer:
            for a, w in out[v]:
                child = f"{name}.{a}.{w}"
                vertices.add(child)
                arcs.add((name, a, child))
                colours.update((c, child) for c in colours_of.get(w, ()))
                nxt.append((child, w))
        layer = nxt
    return Graph(frozenset(vertices), frozenset(arcs), frozenset(colours))


# --- isomorphism -----------------------------------------------------------

def _refine(g1: Graph, g2: Graph, rounds: int = 50) -> tuple[dict, dict]:
    """Joint colour refinement; returns comparable vertex classes for both graphs."""
    def initial(g):
        cols: dict[str, list[str]] = {v: [] for v in g.vertices}
        for c, v in g.colours:
            cols[v].append(c)
        loops = Counter((s, a) for s, a, t in g.arcs if s == t)
        return {v: (tuple(sorted(cols[v])), tuple(sorted(a for (s, a) in loops if s == v))) for v in g.vertices}

    c1, c2 = initial(g1), initial(g2)
    out1, in1, out2, in2 = g1.out_arcs(), g1.in_arcs(), g2.out_arcs(), g2.in_arcs()
    n_classes = -1
    for _ in range(rounds):
        sig1 = {v: (c1[v], tuple(sorted((a, c1[t]) for a, t in out1[v])),
                    tuple(sorted((a, c1[s]) for a, s in in1[v]))) for v in g1.vertices}
        sig2 = {v: (c2[v], tuple(sorted((a, c2[t]) for a, t in out2[v])),
                    tuple(sorted((a, c2[s]) for a, s in in2[v]))) for v in g2.vertices}
        palette = {s: i for i, s in enumerate(sorted(set(sig1.values()) | set(sig2.values()), key=repr))}
        c1 = {v: palette[s] for v, s in sig1.items()}
        c2 = {v: palette[s] for v, s in sig2.items()}
        if len(palette) == n_classes:
            break
        n_classes = len(palette)
    return c1, c2


def find_isomorphism(g1: Graph, g2: Graph) -> dict[str, str] | None:
    """A label- and colour-preserving vertex bijection mapping arcs onto arcs, or None."""
    if (len(g1.vertices), len(g1.arcs), len(g1.colours)) != (len(g2.vertices), len(g2.arcs), len(g2.colours)):
        return None
    if Counter(a for _, a, _ in g1.arcs) != Counter(a for _, a, _ in g2.arcs):
        return None
    c1, c2 = _refine(g1, g2)
    if Counter(c1.values()) != Counter(c2.values()):
        return None
    classes2: dict[int, list[str]] = {}
    for v, c in c2.items():
        classes2.setdefault(c, []).append(v)
    for vs in classes2.values():
        vs.sort()
    arcs1 = {(s, t): set() for s, _, t in g1.arcs}
    for s, a, t in g1.arcs:
        arcs1[(s, t)].add(a)
    arcs2 = {(s, t): set() for s, _, t in g2.arcs}
    for s, a, t in g2.arcs:
        arcs2[(s, t)].add(a)
    nbrs1: dict[str, set[str]] = {v: set() for v in g1.vertices}
    for s, _, t in g1.arcs:
        nbrs1[s].add(t)
        nbrs1[t].add(s)
    nbrs2: dict[str, set[str]] = {v: set() for v in g2.vertices}
    for s, _, t in g2.arcs:
        nbrs2[s].add(t)
        nbrs2[t].add(s)

    # order: connected sweeps, most constrained class first
    class_size = Counter(c1.values())
    order: list[str] = []
    placed = set()
    for start in sorted(g1.vertices, key=lambda v: (class_size[c1[v]], v)):
        if start in placed:
            continue
        queue = deque([start])
        placed.add(start)
        while queue:
            v = queue.popleft()
            order.append(v)
            for w in sorted(nbrs1[v], key=lambda w: (class_size[c1[w]], w)):
                if w not in placed:
                    placed.add(w)
                    queue.append(w)

    mapping: dict[str, str] = {}
    inverse: dict[str, str] = {}

    def consistent(v, w) -> bool:
        pairs = [(x, mapping[x]) for x in nbrs1[v] if x in mapping]
        pairs += [(inverse[y], y) for y in nbrs2[w] if y in inverse]
        pairs.append((v, w))
        for x, y in pairs:
            if arcs1.get((v, x), set()) != arcs2.get((w, y), set()):
                return False
            if arcs1.get((x, v), set()) != arcs2.get((y, w), set()):
                return False
        return True

    def search(i: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        for w in classes2[c1[v]]:
            if w in inverse or not consistent(v, w):
                continue
            mapping[v] = w
            inverse[w] = v
            if search(i + 1):
                return True
            del mapping[v]
            del inverse[w]
        return False

    import sys
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, len(order) + 1000))
    try:
        found = search(0)
    finally:
        sys.setrecursionlimit(limit)
    if not found:
        return None
    # non-neighbour pairs carry no arcs in g1; check the image has none either
    mapped_arcs = {(mapping[s], a, mapping[t]) for s, a, t in g1.arcs}
    if mapped_arcs != set(g2.arcs):
        return None
    return mapping


def isomorphic(g1: Graph, g2: Graph) -> bool:
    return find_isomorphism(g1, g2) is not None


# --- DOT -------------------------------------------------------------------

def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(g: Graph, name: str = "G", empty_label: str = "ε") -> str:
    cols: dict[str, list[str]] = {}
    for c, v in g.colours:
        cols.setdefault(v, []).append(c)
    lines = [f"digraph {_q(name)} {{"]
    for v in sorted(g.vertices):
        label = v if v else empty_label
        if v in cols:
            label += " [" + ",".join(sorted(cols[v])) + "]"
        lines.append(f"  {_q(v)} [label={_q(label)}];")
    for s, a, t in sorted(g.arcs, key=lambda e: (e[0], e[2], e[1])):
        lines.append(f"  {_q(s)} -> {_q(t)} [label={_q(a)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def dumps(g: Graph) -> str:
    return json.dumps(g.to_json(), ensure_ascii=False, indent=1)


# --- inverse substitution on explicit graphs -------------------------------

def split_bar(letter: str) -> tuple[str, bool]:
    return (letter[:-len(BAR)], True) if letter.endswith(BAR) else (letter, False)


def inverse_substitution_explicit(g: Graph, phi: Mapping[str, FiniteAutomaton],
                                  restriction: FiniteAutomaton | None = None,
                                  root: str | None = None) -> Graph:
    """Arc ``x -d-> y`` whenever a word of ``phi[d]`` labels a walk from x to y in ``g``.

    Barred letters (``A~``) walk an ``A``-arc backwards.  With a restriction,
    only vertices reached from ``root`` by a word of the restriction language
    are kept.
    """
    labels = g.labels()
    for d, aut in phi.items():
        for letter in aut.alphabet:
            base, _ = split_bar(letter)
            if base not in labels:
                raise ValidationError(f"letter {letter!r} of phi({d}) has no interpretation in the graph")
    fwd = g.out_arcs()
    bwd = g.in_arcs()
    arcs = set()
    for d, aut in sorted(phi.items()):
        for x in sorted(g.vertices):
            start = {(x, q) for q in aut.closure(aut.initial)}
            seen = set(start)
            stack = list(start)
            while stack:
                v, q = stack.pop()
                if q in aut.final:
                    arcs.add((x, d, v))
                for letter, q2 in aut.successors(q):
                    if letter == EPS:
                        moves = [v]
                    else:
                        base, barred = split_bar(letter)
                        moves = [w for b, w in (bwd if barred else fwd)[v] if b == base]
                    for w in moves:
                        if (w, q2) not in seen:
                            seen.add((w, q2))
                            stack.append((w, q2))
    result = Graph(g.vertices, frozenset(arcs))
    if restriction is None:
        return result
    if root is None or root not in g.vertices:
        raise ValidationError("a restriction needs a root vertex of the graph")
    keep = set()
    start = {(root, q) for q in restriction.closure(restriction.initial)}
    seen = set(start)
    stack = list(start)
    while stack:
        v, q = stack.pop()
        if q in restriction.final:
            keep.add(v)
        for letter, q2 in restriction.successors(q):
            moves = [v] if letter == EPS else [w for b, w in fwd[v] if b == letter]
            for w in moves:
                if (w, q2) not in seen:
                    seen.add((w, q2))
                    stack.append((w, q2))
    return result.induced(keep)


def complete_tree(directions: Sequence[str], depth: int, glue: bool | None = None) -> Graph:
    """Complete |directions|-ary tree of the given depth; vertices are root paths."""
    if glue is None:
        glue = all(len(d) == 1 for d in directions)
    words = [()]
    layer = [()]
    for _ in range(depth):
        layer = [w + (d,) for w in layer for d in directions]
        words += layer
    name = (lambda w: "".join(w)) if glue else (lambda w: ".".join(w))
    arcs = {(name(w[:-1]), w[-1], name(w)) for w in words if w}
    return Graph(frozenset(name(w) for w in words), frozenset(arcs))
