"""Command-line entry point: ``infgraph <verb> ...``.

Exit codes: 0 answered, 1 negative verdict of a test verb (arc, trace, iso),
2 validation, usage or resource-limit error.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from . import automata as fa
from . import chr as chrg
from . import graph as gr
from . import hr
from . import io
from . import prefixrec as pr
from . import rational as rg
from .errors import ResourceLimitError, ValidationError
from .graph import Graph
from .rational import DEFAULT_LIMIT

EXIT_OK, EXIT_NEGATIVE, EXIT_ERROR = 0, 1, 2


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(f"{self.format_usage()}{self.prog}: error: {message}")


def _out(args, text: str = "", data=None) -> None:
    if args.json:
        print(json.dumps(data, ensure_ascii=False, sort_keys=True))
    elif text:
        print(text)


def _warn(msg: str) -> None:
    print(msg, file=sys.stderr)


def _emit_presentation(args, obj) -> None:
    if args.output:
        io.save(obj, args.output)
        _warn(f"wrote {args.output}")
    else:
        sys.stdout.write(io.dumps(obj))


def _emit_graph(args, g: Graph, extra: dict | None = None) -> None:
    if args.json:
        _out(args, data={**g.to_json(), **(extra or {})})
    elif getattr(args, "dot", False):
        sys.stdout.write(gr.to_dot(g))
    else:
        lines = [f"{s or 'ε'} -{a}-> {t or 'ε'}" for s, a, t in sorted(g.arcs)]
        lines += [f"{c}({v or 'ε'})" for c, v in sorted(g.colours)]
        print(f"{len(g.vertices)} vertices, {len(g.arcs)} arcs")
        if lines:
            print("\n".join(lines))


def _word_graph(obj, args):
    if isinstance(obj, (rg.RationalGraph, pr.PrefixRecGraph)):
        return obj
    raise ValidationError(f"this verb needs a rational or prefrec presentation, not {type(obj).__name__}")


def _listing(args, obj, words: rg.Listing) -> None:
    names = [obj.name(w) for w in words]
    if words.truncated:
        _warn(f"truncated: output capped at --limit {args.limit}")
    _out(args, "\n".join(n or "ε" for n in names), {"words": names, "truncated": words.truncated})


def _any_view(obj, args) -> Graph:
    """Explicit finite graph for any presentation, using the bounding flags."""
    if isinstance(obj, Graph):
        return obj
    if isinstance(obj, rg.RationalGraph):
        return rg.bounded_view(obj, args.max_len, args.limit)
    if isinstance(obj, pr.PrefixRecGraph):
        return pr.bounded_view(obj, args.max_len, args.limit)
    if isinstance(obj, hr.HRGrammar):
        return hr.generate(obj, args.level)
    state = chrg.run(obj, args.steps, args.axiom_depth)
    for d in state.diagnostics:
        _warn(d)
    return chrg.terminal_view(state)


# --- verbs ------------------------------------------------------------------

def cmd_validate(args) -> int:
    obj = io.load(args.file)
    problems = []
    if isinstance(obj, hr.HRGrammar):
        problems = hr.validate(obj)
    elif isinstance(obj, chrg.ContextualSystem):
        problems = chrg.validate(obj)
    for d in problems:
        _warn(str(d))
    _out(args, "valid" if not problems else f"{len(problems)} problem(s)",
         {"valid": not problems, "diagnostics": [str(d) for d in problems]})
    return EXIT_OK if not problems else EXIT_ERROR


def cmd_arc(args) -> int:
    obj = _word_graph(io.load(args.file), args)
    mod = rg if isinstance(obj, rg.RationalGraph) else pr
    ok = mod.arc_exists(obj, args.u, args.label, args.v)
    _out(args, "true" if ok else "false", {"arc": ok})
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_successors(args) -> int:
    obj = _word_graph(io.load(args.file), args)
    mod = rg if isinstance(obj, rg.RationalGraph) else pr
    _listing(args, obj, mod.successors(obj, args.u, args.label, args.max_len, args.limit))
    return EXIT_OK


def cmd_predecessors(args) -> int:
    obj = io.load(args.file)
    if not isinstance(obj, rg.RationalGraph):
        raise ValidationError("predecessors needs a rational presentation")
    _listing(args, obj, rg.predecessors(obj, args.v, args.label, args.max_len, args.limit))
    return EXIT_OK


def cmd_view(args) -> int:
    _emit_graph(args, _any_view(io.load(args.file), args))
    return EXIT_OK


def _rational(path: str) -> rg.RationalGraph:
    obj = io.load(path)
    if not isinstance(obj, rg.RationalGraph):
        raise ValidationError(f"{path}: expected a rational presentation")
    return obj


def cmd_trace(args) -> int:
    p = _rational(args.file)
    q = rg.TraceQuery(fa.compile(args.initial, p.alphabet), fa.compile(args.final, p.alphabet), args.word)
    ok = rg.trace_member(p, q)
    _out(args, "accepted" if ok else "rejected", {"accepted": ok})
    return EXIT_OK if ok else EXIT_NEGATIVE


def cmd_sample(args) -> int:
    p = _rational(args.file)
    words = rg.trace_language_sample(p, fa.compile(args.initial, p.alphabet),
                                     fa.compile(args.final, p.alphabet), args.max_len)
    names = [fa.format_word(w, p.sigma) for w in words]
    _out(args, "\n".join(n or "ε" for n in names), {"words": names})
    return EXIT_OK


def cmd_compose(args) -> int:
    _emit_presentation(args, rg.compose_graphs(_rational(args.first), _rational(args.second)))
    return EXIT_OK


def cmd_invsub(args) -> int:
    p = _rational(args.file)
    try:
        mapping = json.loads(args.map)
    except json.JSONDecodeError:
        mapping = json.loads(open(args.map, encoding="utf-8").read())
    if not isinstance(mapping, dict) or not all(isinstance(v, list) for v in mapping.values()):
        raise ValidationError("--map must be a JSON object from new labels to word lists")
    _emit_presentation(args, rg.inverse_finite_substitution(p, mapping))
    return EXIT_OK


def cmd_simple_paths(args) -> int:
    p = _rational(args.file)
    paths = sorted(rg.simple_paths_substitution(p.transducer, args.label), key=lambda w: (len(w), w))
    rows = [{"edges": list(w), "labels": rg.edge_word_labels(p.transducer, w)} for w in paths]
    _out(args, "\n".join(f"{' '.join(map(str, r['edges'])) or 'ε'}\t{r['labels']}" for r in rows), {"paths": rows})
    return EXIT_OK


def _hr(path: str) -> hr.HRGrammar:
    obj = io.load(path)
    if not isinstance(obj, hr.HRGrammar):
        raise ValidationError(f"{path}: expected an hr grammar")
    hr.require_valid(obj)
    return obj


def cmd_generate(args) -> int:
    g = _hr(args.file)
    state = hr.generate_state(g, args.level)
    view = hr.terminal_graph(state.terminals, g.terminals)
    _emit_graph(args, view, {"level": state.level, "pending": len(state.pending)})
    return EXIT_OK


def cmd_colour_access(args) -> int:
    _emit_presentation(args, hr.accessible_colouring(_hr(args.file), args.source, args.new, args.symmetric))
    return EXIT_OK


def cmd_colour_restrict(args) -> int:
    _emit_presentation(args, hr.colour_restriction(_hr(args.file), args.colour))
    return EXIT_OK


def _chr(path: str) -> chrg.ContextualSystem:
    obj = io.load(path)
    if not isinstance(obj, chrg.ContextualSystem):
        raise ValidationError(f"{path}: expected a chr or contextual grammar")
    problems = chrg.validate(obj)
    if problems:
        raise ValidationError("; ".join(map(str, problems)))
    return obj


def cmd_chr_generate(args) -> int:
    g = _chr(args.file)
    state = chrg.run(g, args.steps, args.axiom_depth)
    for d in state.diagnostics:
        _warn(d)
    if args.tree_len is not None:
        view = chrg.tree_view(state, args.tree_len)
    else:
        view = chrg.terminal_view(state)
    _emit_graph(args, view, {"diagnostics": state.diagnostics, "pending": len(state.pending)})
    return EXIT_OK


def cmd_from_rational(args) -> int:
    _emit_presentation(args, chrg.from_rational(_rational(args.file)))
    return EXIT_OK


def cmd_to_rational(args) -> int:
    _emit_presentation(args, chrg.to_rational(_chr(args.file)))
    return EXIT_OK


def cmd_pcp(args) -> int:
    inst = chrg.PCPInstance.parse(args.pairs)
    state = chrg.start(chrg.pcp_encode(inst))
    found = None
    for _ in range(args.steps):
        chrg.parallel_step(state)
        if chrg.has_hash(state):
            found = state.step
            break
    witness = chrg.pcp_witnesses(state)
    if found is None:
        text = f"no # arc within {args.steps} steps"
    else:
        seq = " ".join(str(i + 1) for i in witness[0])
        text = f"# arc 0 -> 1 at step {found}; index sequence {seq}"
    _out(args, text, {"hash_step": found, "witnesses": [[i + 1 for i in w] for w in witness]})
    return EXIT_OK


def cmd_unfold(args) -> int:
    g = _any_view(io.load(args.file), args)
    _emit_graph(args, gr.unfold(g, args.root, args.depth))
    return EXIT_OK


def cmd_iso(args) -> int:
    g1 = _any_view(io.load(args.first), args)
    g2 = _any_view(io.load(args.second), args)
    witness = gr.find_isomorphism(g1, g2)
    ok = witness is not None
    _out(args, "isomorphic" if ok else "not isomorphic", {"isomorphic": ok, "witness": witness})
    return EXIT_OK if ok else EXIT_NEGATIVE


# --- parser -----------------------------------------------------------------

def _bounds(p, level=True):
    p.add_argument("--max-len", type=int, default=3, help="vertex word length bound for views (default 3)")
    p.add_argument("--limit", type=int, default=DEFAULT_LIMIT, help=f"enumeration cap (default {DEFAULT_LIMIT})")
    if level:
        p.add_argument("--level", type=int, default=3, help="HR generation level (default 3)")
        p.add_argument("--steps", type=int, default=6, help="contextual rewriting steps (default 6)")
        p.add_argument("--axiom-depth", type=int, default=4, help="tree axiom materialization depth (default 4)")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help="machine-readable output")
    ap = _Parser(prog="infgraph", description="Queries on finite presentations of infinite graphs.")
    ap.add_argument("--json", action="store_true", help="machine-readable output")
    sub = ap.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    def verb(name, fn, help_text):
        p = sub.add_parser(name, help=help_text, parents=[common])
        p.set_defaults(fn=fn)
        return p

    p = verb("validate", cmd_validate, "check a presentation file")
    p.add_argument("file")

    p = verb("arc", cmd_arc, "test one arc u -a-> v")
    p.add_argument("file")
    p.add_argument("u")
    p.add_argument("label")
    p.add_argument("v")

    p = verb("successors", cmd_successors, "list v with u -a-> v")
    p.add_argument("file")
    p.add_argument("u")
    p.add_argument("label")
    _bounds(p, level=False)

    p = verb("predecessors", cmd_predecessors, "list u with u -a-> v")
    p.add_argument("file")
    p.add_argument("v")
    p.add_argument("label")
    _bounds(p, level=False)

    p = verb("view", cmd_view, "bounded explicit view")
    p.add_argument("file")
    p.add_argument("--dot", action="store_true")
    _bounds(p)

    p = verb("trace", cmd_trace, "is w the label of a path from I to F?")
    p.add_argument("file")
    p.add_argument("--initial", required=True, help="regex for the initial vertex set")
    p.add_argument("--final", required=True, help="regex for the final vertex set")
    p.add_argument("--word", required=True)

    p = verb("sample", cmd_sample, "all trace words up to a length")
    p.add_argument("file")
    p.add_argument("--initial", default="()")
    p.add_argument("--final", required=True)
    p.add_argument("--max-len", type=int, default=6)

    p = verb("compose", cmd_compose, "compose two rational graphs")
    p.add_argument("first")
    p.add_argument("second")
    p.add_argument("-o", "--output")

    p = verb("invsub", cmd_invsub, "inverse finite substitution")
    p.add_argument("file")
    p.add_argument("--map", required=True, help='JSON object or file, e.g. {"d": ["ab", "a~"]}')
    p.add_argument("-o", "--output")

    p = verb("simple-paths", cmd_simple_paths, "simple transducer paths to a label")
    p.add_argument("file")
    p.add_argument("label")

    p = verb("generate", cmd_generate, "HR grammar level-n graph")
    p.add_argument("file")
    p.add_argument("--level", type=int, default=3)
    p.add_argument("--dot", action="store_true")

    p = verb("colour-access", cmd_colour_access, "accessible colouring of an HR grammar")
    p.add_argument("file")
    p.add_argument("--source", required=True)
    p.add_argument("--new", required=True)
    p.add_argument("--symmetric", action="store_true", help="follow arcs in both directions")
    p.add_argument("-o", "--output")

    p = verb("colour-restrict", cmd_colour_restrict, "restrict an HR grammar to a colour")
    p.add_argument("file")
    p.add_argument("--colour", required=True)
    p.add_argument("-o", "--output")

    p = verb("chr-generate", cmd_chr_generate, "bounded contextual rewriting")
    p.add_argument("file")
    p.add_argument("--steps", type=int, default=6)
    p.add_argument("--axiom-depth", type=int, default=4)
    p.add_argument("--tree-len", type=int, help="name vertices by tree paths, keeping depth <= N")
    p.add_argument("--dot", action="store_true")

    p = verb("from-rational", cmd_from_rational, "rational graph to CHR-grammar")
    p.add_argument("file")
    p.add_argument("-o", "--output")

    p = verb("to-rational", cmd_to_rational, "tree-separated CHR-grammar to rational graph")
    p.add_argument("file")
    p.add_argument("-o", "--output")

    p = verb("pcp", cmd_pcp, "run the PCP encoding")
    p.add_argument("--pairs", required=True, help="e.g. ab:a,b:bb")
    p.add_argument("--steps", type=int, default=12)

    p = verb("unfold", cmd_unfold, "unfold a (bounded view of a) graph from a root")
    p.add_argument("file")
    p.add_argument("root")
    p.add_argument("--depth", type=int, default=2)
    p.add_argument("--dot", action="store_true")
    _bounds(p)

    p = verb("iso", cmd_iso, "isomorphism of two (bounded views of) graphs")
    p.add_argument("first")
    p.add_argument("second")
    _bounds(p)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
        return args.fn(args)
    except _Usage as e:
        _warn(str(e))
        return EXIT_ERROR
    except (ValidationError, ResourceLimitError) as e:
        _warn(f"error: {e}")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
