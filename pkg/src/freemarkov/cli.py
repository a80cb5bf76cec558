"""Command line front end.

Exit codes: 0 success (or "equivalent" for ``eq``), 1 for a false property,
2 for unreadable or ill-typed input.  Diagnostics go to standard error.
"""
from __future__ import annotations

import argparse
import os
import random
import sys
from dataclasses import dataclass
from typing import List, Optional, Sequence

from .causal import Refinement, causal_effect, cau, intervene, mechanism_name
from .diagram import Diagram, DiagramError, well_formed
from .dot import to_dot
from .effects import EffectError
from .markov import explain_inequivalence, normalize
from .signature import OrderedDag, Signature, SignatureError, word
from .syntax import (ParseError, elaborate, named_dag, parse_dag, parse_hom,
                     parse_signature, parse_term, print_term, term_letters)


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    seed: Optional[int] = None
    max_nodes: int = 10_000
    dot: bool = False


def _read(arg: str) -> str:
    """``@path`` reads a file; anything else is taken literally."""
    if arg.startswith("@"):
        with open(arg[1:], encoding="utf-8") as fh:
            return fh.read()
    return arg


def _text(arg: str) -> str:
    """Like :func:`_read`, but an existing file name is also read."""
    if not arg.startswith("@") and os.path.isfile(arg):
        arg = "@" + arg
    return _read(arg)


def _signature(spec: Optional[str], terms: Sequence[str]) -> Signature:
    if spec is not None:
        return parse_signature(_text(spec))
    letters: List[str] = []
    for t in terms:
        for a in term_letters(parse_term(t)):
            if a not in letters:
                letters.append(a)
    return Signature(tuple(letters), ())


def _dag(spec: str) -> OrderedDag:
    dag = None if os.path.isfile(spec) else named_dag(spec)
    return dag if dag is not None else parse_dag(_text(spec))


def _diagram(src: str, sig: Signature, cfg: RunConfig) -> Diagram:
    d = elaborate(parse_term(src), sig)
    if len(d.nodes) > cfg.max_nodes:
        raise InputError(f"diagram has {len(d.nodes)} nodes, more than --max-nodes {cfg.max_nodes}")
    return d


def _emit(d: Diagram, cfg: RunConfig, out):
    out.write(to_dot(d) if cfg.dot else print_term(d) + "\n")


def _cmd_check(args, cfg, out, err):
    sig = _signature(args.sig, [args.term])
    d = _diagram(_read(args.term), sig, cfg)
    problems = well_formed(d)
    if problems:
        for p in problems:
            err.write(p + "\n")
        return 1
    out.write(f"ok: {' '.join(d.dom) or '()'} -> {' '.join(d.cod) or '()'}, "
              f"{len(d.nodes)} nodes\n")
    return 0


def _cmd_normalize(args, cfg, out, err):
    sig = _signature(args.sig, [args.term])
    d = _diagram(_read(args.term), sig, cfg)
    rng = random.Random(cfg.seed) if cfg.seed is not None else None
    _emit(normalize(d, rng), cfg, out)
    return 0


def _cmd_eq(args, cfg, out, err):
    t1, t2 = _read(args.left), _read(args.right)
    sig = _signature(args.sig, [t1, t2])
    d1, d2 = _diagram(t1, sig, cfg), _diagram(t2, sig, cfg)
    reason = explain_inequivalence(d1, d2)
    if reason is None:
        out.write("equivalent\n")
        return 0
    err.write(reason + "\n")
    return 1


def _cmd_dot(args, cfg, out, err):
    sig = _signature(args.sig, [args.term])
    out.write(to_dot(_diagram(_read(args.term), sig, cfg)))
    return 0


def _cmd_effect(args, cfg, out, err):
    model = cau(_dag(args.dag))
    _emit(causal_effect(model, word(args.given or ""), word(args.on)), cfg, out)
    return 0


def _cmd_intervene(args, cfg, out, err):
    model = cau(_dag(args.dag))
    target, r = intervene(model, word(args.at))
    out.write(str(target.dag) + "\n")
    for v in model.dag.vertices:
        image = r(model.mechanism(v))
        out.write(f"{mechanism_name(v)} = {print_term(image)}\n")
    return 0


def _cmd_refine(args, cfg, out, err):
    H, G = _dag(args.dag_src), _dag(args.dag_dst)
    hom = parse_hom(_text(args.hom), H, G)
    r = Refinement.of(hom)
    d = _diagram(_read(args.term), r.source_model.sig, cfg)
    _emit(r(d), cfg, out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="freemarkov",
                                description="Diagrams in free Markov categories.")
    p.add_argument("--seed", type=int, default=None,
                   help="randomize the reduction order of normalize")
    p.add_argument("--max-nodes", type=int, default=10_000,
                   help="reject input diagrams with more nodes")
    p.add_argument("--dot", action="store_true", help="emit DOT instead of a term")
    sub = p.add_subparsers(dest="command", required=True)

    def with_sig(q):
        q.add_argument("--sig", help="signature file, or inline text with ';' between lines")
        return q

    q = with_sig(sub.add_parser("check", help="check that a term is a well-formed diagram"))
    q.add_argument("term")
    q.set_defaults(run=_cmd_check)
    q = with_sig(sub.add_parser("normalize", help="print a Markov minimal form"))
    q.add_argument("term")
    q.set_defaults(run=_cmd_normalize)
    q = with_sig(sub.add_parser("eq", help="exit 0 iff the two terms are equal"))
    q.add_argument("left")
    q.add_argument("right")
    q.set_defaults(run=_cmd_eq)
    q = with_sig(sub.add_parser("dot", help="print a term as a DOT graph"))
    q.add_argument("term")
    q.set_defaults(run=_cmd_dot)
    q = sub.add_parser("effect", help="causal effect [on || given] over a DAG")
    q.add_argument("--dag", required=True)
    q.add_argument("--on", required=True)
    q.add_argument("--given", default="")
    q.set_defaults(run=_cmd_effect)
    q = sub.add_parser("intervene", help="cut the arrows into a variable")
    q.add_argument("--dag", required=True)
    q.add_argument("--at", required=True)
    q.set_defaults(run=_cmd_intervene)
    q = sub.add_parser("refine", help="apply the refinement along a DAG hom")
    q.add_argument("--dag-src", required=True)
    q.add_argument("--dag-dst", required=True)
    q.add_argument("--hom", required=True)
    q.add_argument("--term", required=True)
    q.set_defaults(run=_cmd_refine)
    return p


def run(argv: Optional[Sequence[str]] = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    cfg = RunConfig(args.seed, args.max_nodes, args.dot)
    try:
        return args.run(args, cfg, out, err)
    except (ParseError, SignatureError, DiagramError, EffectError, InputError, OSError) as e:
        err.write(f"error: {e}\n")
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
