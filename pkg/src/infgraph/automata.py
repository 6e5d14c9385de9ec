"""Finite automata over token alphabets and a small regular-expression algebra.

Words are tuples of tokens; the empty tuple is the empty word.  Automata are
immutable: every operation returns a new value.  The empty string ``""`` is
reserved as the epsilon label on transitions.
"""
from __future__ import annotations

import builtins
import os
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ResourceLimitError, ValidationError

EPS = ""
OPERATORS = set("()+*{}")

Word = tuple


def max_states() -> int:
    return int(float(os.environ.get("INFGRAPH_MAX_STATES", "1e6")))


def check_alphabet(symbols: Iterable[str]) -> tuple[str, ...]:
    symbols = tuple(symbols)
    if not symbols:
        raise ValidationError("alphabet must be non-empty")
    if len(set(symbols)) != len(symbols):
        raise ValidationError(f"duplicate symbols in alphabet {symbols!r}")
    for s in symbols:
        if not isinstance(s, str) or not s or any(c.isspace() for c in s):
            raise ValidationError(f"bad alphabet token {s!r}")
        if OPERATORS & set(s):
            raise ValidationError(f"alphabet token {s!r} contains an operator character")
    return symbols


def tokenize_word(text: str, alphabet: Sequence[str]) -> Word:
    """Split ``text`` into alphabet tokens (longest match, ``.`` and blanks separate)."""
    by_length = sorted(alphabet, key=len, reverse=True)
    out = []
    i = 0
    while i < len(text):
        c = text[i]
        if c.isspace():
            i += 1
            continue
        for sym in by_length:
            if text.startswith(sym, i):
                out.append(sym)
                i += len(sym)
                break
        else:
            if c == ".":
                i += 1
                continue
            raise ValidationError(f"cannot read a symbol of {list(alphabet)} at {text[i:]!r}")
    return tuple(out)


def format_word(word: Sequence[str], alphabet: Sequence[str] | None = None) -> str:
    """Inverse of :func:`tokenize_word`; single-character alphabets are glued."""
    if alphabet is None:
        alphabet = word
    if all(len(s) == 1 for s in alphabet):
        return "".join(word)
    return ".".join(word)


# --- regular expressions --------------------------------------------------

@dataclass(frozen=True)
class Regex:
    op: str  # "empty", "eps", "sym", "union", "concat", "star"
    args: tuple = ()
    symbol: str = ""

    def size(self) -> int:
        return 1 + sum(a.size() for a in self.args)

    def symbols(self) -> set[str]:
        if self.op == "sym":
            return {self.symbol}
        return set().union(*(a.symbols() for a in self.args)) if self.args else set()

    def __str__(self) -> str:
        if self.op == "empty":
            return "{}"
        if self.op == "eps":
            return "()"
        if self.op == "sym":
            return self.symbol
        if self.op == "star":
            inner = str(self.args[0])
            if self.args[0].op in ("union", "concat"):
                inner = f"({inner})"
            return inner + "*"
        if self.op == "union":
            return "+".join(str(a) for a in self.args)
        parts = []
        for a in self.args:
            s = str(a)
            parts.append(f"({s})" if a.op == "union" else s)
        return ".".join(parts)


EMPTY = Regex("empty")
EPSILON = Regex("eps")


def sym(s: str) -> Regex:
    return Regex("sym", symbol=s)


def union_re(*rs: Regex) -> Regex:
    return rs[0] if len(rs) == 1 else Regex("union", tuple(rs))


def concat_re(*rs: Regex) -> Regex:
    if not rs:
        return EPSILON
    return rs[0] if len(rs) == 1 else Regex("concat", tuple(rs))


def star_re(r: Regex) -> Regex:
    return Regex("star", (r,))


class _Parser:
    def __init__(self, text: str, alphabet: Sequence[str]):
        self.text = text
        self.by_length = sorted(alphabet, key=len, reverse=True)
        self.pos = 0

    def peek(self) -> str | None:
        while self.pos < len(self.text) and (self.text[self.pos].isspace() or self.text[self.pos] == "."):
            if self.text[self.pos] == "." and self._symbol_at() is not None:
                break
            self.pos += 1
        return self.text[self.pos] if self.pos < len(self.text) else None

    def _symbol_at(self) -> str | None:
        for s in self.by_length:
            if self.text.startswith(s, self.pos):
                return s
        return None

    def error(self, msg: str) -> ValidationError:
        return ValidationError(f"{msg} at position {self.pos} in {self.text!r}")

    def parse(self) -> Regex:
        r = self.expr()
        if self.peek() is not None:
            raise self.error("unexpected input")
        return r

    def expr(self) -> Regex:
        terms = [self.term()]
        while self.peek() == "+":
            self.pos += 1
            terms.append(self.term())
        return union_re(*terms)

    def term(self) -> Regex:
        factors = []
        while True:
            c = self.peek()
            if c is None or c in "+)":
                break
            factors.append(self.factor())
        if not factors:
            raise self.error("empty operand")
        return concat_re(*factors)

    def factor(self) -> Regex:
        r = self.atom()
        while self.peek() == "*":
            self.pos += 1
            r = star_re(r)
        return r

    def atom(self) -> Regex:
        c = self.peek()
        if c == "(":
            self.pos += 1
            if self.peek() == ")":
                self.pos += 1
                return EPSILON
            r = self.expr()
            if self.peek() != ")":
                raise self.error("missing ')'")
            self.pos += 1
            return r
        if c == "{":
            self.pos += 1
            if self.peek() != "}":
                raise self.error("missing '}'")
            self.pos += 1
            return EMPTY
        s = self._symbol_at()
        if s is None:
            raise self.error("symbol outside alphabet")
        self.pos += len(s)
        return sym(s)


def parse_regex(text: str, alphabet: Sequence[str]) -> Regex:
    return _Parser(text, alphabet).parse()


# --- automata ---------------------------------------------------------------

@dataclass(frozen=True)
class FiniteAutomaton:
    alphabet: tuple[str, ...]
    n_states: int
    initial: frozenset[int]
    final: frozenset[int]
    transitions: frozenset[tuple[int, str, int]]
    _succ: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "alphabet", tuple(self.alphabet))
        object.__setattr__(self, "initial", frozenset(self.initial))
        object.__setattr__(self, "final", frozenset(self.final))
        object.__setattr__(self, "transitions", frozenset(self.transitions))
        if self.n_states > max_states():
            raise ResourceLimitError(f"automaton with {self.n_states} states exceeds INFGRAPH_MAX_STATES")
        states = range(self.n_states)
        alpha = set(self.alphabet)
        if not (self.initial <= set(states) and self.final <= set(states)):
            raise ValidationError("initial/final states must be declared states")
        succ: dict[int, list[tuple[str, int]]] = {q: [] for q in states}
        for p, a, q in self.transitions:
            if p not in succ or q not in succ:
                raise ValidationError(f"transition ({p}, {a!r}, {q}) uses undeclared state")
            if a != EPS and a not in alpha:
                raise ValidationError(f"transition symbol {a!r} not in alphabet")
            succ[p].append((a, q))
        for q in succ:
            succ[q].sort()
        object.__setattr__(self, "_succ", succ)

    @property
    def states(self) -> range:
        return range(self.n_states)

    def successors(self, q: int) -> list[tuple[str, int]]:
        return self._succ[q]

    def closure(self, qs: Iterable[int]) -> frozenset[int]:
        seen = set(qs)
        stack = list(seen)
        while stack:
            p = stack.pop()
            for a, q in self._succ[p]:
                if a == EPS and q not in seen:
                    seen.add(q)
                    stack.append(q)
        return frozenset(seen)

    def step(self, qs: Iterable[int], a: str) -> frozenset[int]:
        return self.closure(q for p in qs for b, q in self._succ[p] if b == a)

    def is_deterministic(self) -> bool:
        if len(self.initial) > 1:
            return False
        seen = set()
        for p, a, _ in self.transitions:
            if a == EPS or (p, a) in seen:
                return False
            seen.add((p, a))
        return True

    def to_json(self) -> dict:
        return {
            "alphabet": list(self.alphabet),
            "states": self.n_states,
            "initial": sorted(self.initial),
            "final": sorted(self.final),
            "transitions": [list(t) for t in sorted(self.transitions)],
        }

    @classmethod
    def from_json(cls, data: dict) -> FiniteAutomaton:
        return cls(
            check_alphabet(data["alphabet"]),
            int(data["states"]),
            frozenset(data["initial"]),
            frozenset(data["final"]),
            frozenset((int(p), a, int(q)) for p, a, q in data["transitions"]),
        )


def _check_word(word: Sequence[str], alphabet: Sequence[str]) -> Word:
    word = tuple(word)
    bad = [s for s in word if s not in alphabet]
    if bad:
        raise ValidationError(f"letters {bad} not in alphabet {list(alphabet)}")
    return word


def compile(r: Regex | str, alphabet: Sequence[str]) -> FiniteAutomaton:
    """Thompson construction; at most two states per expression node."""
    alphabet = check_alphabet(alphabet)
    if isinstance(r, str):
        r = parse_regex(r, alphabet)
    extra = r.symbols() - set(alphabet)
    if extra:
        raise ValidationError(f"symbols {sorted(extra)} not in alphabet")
    trans: list[tuple[int, str, int]] = []
    counter = [0]

    def new() -> int:
        counter[0] += 1
        return counter[0] - 1

    def build(node: Regex) -> tuple[int, int]:
        s, f = new(), new()
        if node.op == "eps":
            trans.append((s, EPS, f))
        elif node.op == "sym":
            trans.append((s, node.symbol, f))
        elif node.op == "union":
            for a in node.args:
                i, o = build(a)
                trans.extend([(s, EPS, i), (o, EPS, f)])
        elif node.op == "concat":
            prev = s
            for a in node.args:
                i, o = build(a)
                trans.append((prev, EPS, i))
                prev = o
            trans.append((prev, EPS, f))
        elif node.op == "star":
            i, o = build(node.args[0])
            trans.extend([(s, EPS, i), (o, EPS, f), (s, EPS, f), (o, EPS, i)])
        return s, f

    s, f = build(r)
    final = frozenset() if r.op == "empty" else frozenset({f})
    return FiniteAutomaton(alphabet, counter[0], frozenset({s}), final, frozenset(trans))


def empty_language(alphabet: Sequence[str]) -> FiniteAutomaton:
    return FiniteAutomaton(tuple(alphabet), 1, {0}, frozenset(), frozenset())


def universal(alphabet: Sequence[str]) -> FiniteAutomaton:
    return FiniteAutomaton(tuple(alphabet), 1, {0}, {0}, frozenset((0, a, 0) for a in alphabet))


def from_words(words: Iterable[Sequence[str]], alphabet: Sequence[str]) -> FiniteAutomaton:
    """Trie automaton accepting exactly the given finite set of words."""
    alphabet = tuple(alphabet)
    trie: dict[tuple[int, str], int] = {}
    final = set()
    n = 1
    for w in words:
        w = _check_word(w, alphabet)
        q = 0
        for a in w:
            if (q, a) not in trie:
                trie[(q, a)] = n
                n += 1
            q = trie[(q, a)]
        final.add(q)
    return FiniteAutomaton(alphabet, n, {0}, final, frozenset((p, a, q) for (p, a), q in trie.items()))


def singleton(word: Sequence[str], alphabet: Sequence[str]) -> FiniteAutomaton:
    return from_words([word], alphabet)


def _same_alphabet(a: FiniteAutomaton, b: FiniteAutomaton) -> None:
    if set(a.alphabet) != set(b.alphabet):
        raise ValidationError(f"alphabet mismatch: {list(a.alphabet)} vs {list(b.alphabet)}")


def accepts(a: FiniteAutomaton, word: Sequence[str]) -> bool:
    word = _check_word(word, a.alphabet)
    current = a.closure(a.initial)
    for letter in word:
        current = a.step(current, letter)
        if not current:
            return False
    return bool(current & a.final)


def determinize(a: FiniteAutomaton) -> FiniteAutomaton:
    """Subset construction restricted to reachable subsets; the result may be partial."""
    start = a.closure(a.initial)
    index = {start: 0}
    queue = deque([start])
    trans = []
    final = set()
    limit = max_states()
    while queue:
        subset = queue.popleft()
        i = index[subset]
        if subset & a.final:
            final.add(i)
        for letter in a.alphabet:
            nxt = a.step(subset, letter)
            if not nxt:
                continue
            if nxt not in index:
                if len(index) >= limit:
                    raise ResourceLimitError("determinization exceeds INFGRAPH_MAX_STATES")
                index[nxt] = len(index)
                queue.append(nxt)
            trans.append((i, letter, index[nxt]))
    return FiniteAutomaton(a.alphabet, len(index), {0}, final, frozenset(trans))


def complete(a: FiniteAutomaton) -> FiniteAutomaton:
    """Deterministic and total version of ``a`` (adds a sink if needed)."""
    d = a if a.is_deterministic() and a.initial else determinize(a)
    defined = {(p, x) for p, x, _ in d.transitions}
    sink = d.n_states
    extra = [(p, x, sink) for p in d.states for x in d.alphabet if (p, x) not in defined]
    if not extra:
        return d
    extra += [(sink, x, sink) for x in d.alphabet]
    return FiniteAutomaton(d.alphabet, d.n_states + 1, d.initial, d.final, d.transitions | set(extra))


def complement(a: FiniteAutomaton) -> FiniteAutomaton:
    c = complete(a)
    return FiniteAutomaton(c.alphabet, c.n_states, c.initial, frozenset(c.states) - c.final, c.transitions)


def remove_epsilon(a: FiniteAutomaton) -> FiniteAutomaton:
    closures = {q: a.closure([q]) for q in a.states}
    trans = set()
    final = set()
    for p in a.states:
        for r in closures[p]:
            if r in a.final:
                final.add(p)
            for x, q in a.successors(r):
                if x != EPS:
                    trans.add((p, x, q))
    return trim(FiniteAutomaton(a.alphabet, a.n_states, a.initial, final, frozenset(trans)))


def intersect(a: FiniteAutomaton, b: FiniteAutomaton) -> FiniteAutomaton:
    _same_alphabet(a, b)
    a, b = remove_epsilon(a), remove_epsilon(b)
    index: dict[tuple[int, int], int] = {}
    queue = deque()
    for pair in sorted((p, q) for p in a.initial for q in b.initial):
        index[pair] = len(index)
        queue.append(pair)
    trans = []
    limit = max_states()
    while queue:
        p, q = queue.popleft()
        i = index[(p, q)]
        b_succ: dict[str, list[int]] = {}
        for x, q2 in b.successors(q):
            b_succ.setdefault(x, []).append(q2)
        for x, p2 in a.successors(p):
            for q2 in b_succ.get(x, ()):
                if (p2, q2) not in index:
                    if len(index) >= limit:
                        raise ResourceLimitError("product exceeds INFGRAPH_MAX_STATES")
                    index[(p2, q2)] = len(index)
                    queue.append((p2, q2))
                trans.append((i, x, index[(p2, q2)]))
    final = {i for (p, q), i in index.items() if p in a.final and q in b.final}
    initial = {index[(p, q)] for p in a.initial for q in b.initial}
    return FiniteAutomaton(a.alphabet, max(len(index), 1), initial, final, frozenset(trans))


def _disjoint(*parts: FiniteAutomaton) -> tuple[int, list, list, list]:
    offset = 0
    initial, final, trans = [], [], []
    for a in parts:
        initial += [q + offset for q in a.initial]
        final += [q + offset for q in a.final]
        trans += [(p + offset, x, q + offset) for p, x, q in a.transitions]
        offset += a.n_states
    return offset, initial, final, trans


def union(a: FiniteAutomaton, b: FiniteAutomaton) -> FiniteAutomaton:
    _same_alphabet(a, b)
    n, initial, final, trans = _disjoint(a, b)
    return FiniteAutomaton(a.alphabet, n, initial, final, frozenset(trans))


def concatenate(a: FiniteAutomaton, b: FiniteAutomaton) -> FiniteAutomaton:
    _same_alphabet(a, b)
    n, _, _, trans = _disjoint(a, b)
    off = a.n_states
    trans += [(f, EPS, i + off) for f in a.final for i in b.initial]
    return FiniteAutomaton(a.alphabet, n, a.initial, {q + off for q in b.final}, frozenset(trans))


def reverse(a: FiniteAutomaton) -> FiniteAutomaton:
    return FiniteAutomaton(a.alphabet, a.n_states, a.final, a.initial,
                           frozenset((q, x, p) for p, x, q in a.transitions))


def with_alphabet(a: FiniteAutomaton, alphabet: Sequence[str]) -> FiniteAutomaton:
    """Same language, declared over a larger alphabet."""
    missing = set(a.alphabet) - set(alphabet)
    if missing:
        raise ValidationError(f"alphabet lacks {sorted(missing)}")
    return FiniteAutomaton(tuple(alphabet), a.n_states, a.initial, a.final, a.transitions)


def _reach(a: FiniteAutomaton, start: Iterable[int], backwards: bool = False) -> set[int]:
    adj: dict[int, list[int]] = {q: [] for q in a.states}
    for p, _, q in a.transitions:
        if backwards:
            adj[q].append(p)
        else:
            adj[p].append(q)
    seen = set(start)
    stack = list(seen)
    while stack:
        p = stack.pop()
        for q in adj[p]:
            if q not in seen:
                seen.add(q)
                stack.append(q)
    return seen


def trim(a: FiniteAutomaton) -> FiniteAutomaton:
    """Drop states that are unreachable or cannot reach a final state; renumber densely."""
    useful = _reach(a, a.initial) & _reach(a, a.final, backwards=True)
    if not useful:
        return empty_language(a.alphabet)
    order = sorted(useful)
    ren = {q: i for i, q in builtins.enumerate(order)}
    return FiniteAutomaton(
        a.alphabet, len(order),
        {ren[q] for q in a.initial if q in ren},
        {ren[q] for q in a.final if q in ren},
        frozenset((ren[p], x, ren[q]) for p, x, q in a.transitions if p in ren and q in ren),
    )


def is_empty(a: FiniteAutomaton) -> bool:
    return not (_reach(a, a.initial) & a.final)


def is_finite(a: FiniteAutomaton) -> bool:
    t = trim(remove_epsilon(a))
    if is_empty(t):
        return True
    # a cycle among useful states means infinitely many words
    colour = {}

    def visit(p):
        colour[p] = 1
        for _, q in t.successors(p):
            c = colour.get(q, 0)
            if c == 1 or (c == 0 and not visit(q)):
                return False
        colour[p] = 2
        return True

    return all(visit(q) for q in t.states if q not in colour)


def enumerate(a: FiniteAutomaton, max_len: int, limit: int | None = None) -> list[Word]:
    """Accepted words of length <= max_len, shortest first then by alphabet order."""
    words, _ = enumerate_capped(a, max_len, limit)
    return words


def enumerate_capped(a: FiniteAutomaton, max_len: int, limit: int | None = None) -> tuple[list[Word], bool]:
    d = trim(determinize(a))
    order = {x: i for i, x in builtins.enumerate(a.alphabet)}
    out: list[Word] = []
    if is_empty(d):
        return out, False
    delta = {(p, x): q for p, x, q in d.transitions}
    layer = [((), next(iter(d.initial)))]
    for length in range(max_len + 1):
        for w, q in layer:
            if q in d.final:
                if limit is not None and len(out) >= limit:
                    return out, True
                out.append(w)
        if length == max_len:
            break
        nxt = []
        for w, q in layer:
            for x in sorted(a.alphabet, key=order.__getitem__):
                if (q, x) in delta:
                    nxt.append((w + (x,), delta[(q, x)]))
        layer = nxt
    return out, False

