"""Concrete syntax for diagrams: a small term language and its printer.

Grammar (whitespace-insensitive, ``;`` binds loosest)::

    term   := tensor (";" tensor)*        composition, left then right
    tensor := factor ("*" factor)*
    factor := "id" "(" word ")" | "sym" "(" word "," word ")"
            | "gen" NAME | "dup" NAME | "disc" NAME | "(" term ")"
    word   := NAME*

Text formats for signatures, ordered DAGs and homomorphisms live here too;
they are line oriented and accept ``#`` comments.
"""
from __future__ import annotations

import bisect
import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

from . import diagram as dg
from .diagram import BOUNDARY, Diagram, DiagramError
from .signature import (DagHom, OrderedDag, Signature, SignatureError, Word,
                        validate_dag, validate_hom, validate_signature)


class ParseError(ValueError):
    """A syntax or typing error, located at ``line``:``col`` (1-based)."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.message, self.line, self.col = message, line, col
        where = f"{line}:{col}: " if line else ""
        super().__init__(where + message)


Pos = Tuple[int, int]


@dataclass(slots=True)
class Id:
    word: Word
    pos: Pos = (0, 0)


@dataclass(slots=True)
class Gen:
    name: str
    pos: Pos = (0, 0)


@dataclass(slots=True)
class Dup:
    letter: str
    pos: Pos = (0, 0)


@dataclass(slots=True)
class Disc:
    letter: str
    pos: Pos = (0, 0)


@dataclass(slots=True)
class Sym:
    left: Word
    right: Word
    pos: Pos = (0, 0)


@dataclass(slots=True)
class Comp:
    first: "TermExpr"
    then: "TermExpr"
    pos: Pos = (0, 0)


@dataclass(slots=True)
class Tensor:
    left: "TermExpr"
    right: "TermExpr"
    pos: Pos = (0, 0)


TermExpr = Union[Id, Gen, Dup, Disc, Sym, Comp, Tensor]

KEYWORDS = ("id", "sym", "gen", "dup", "disc")
_TOKEN = re.compile(r"[A-Za-z_][A-Za-z0-9_']*|[();,*]|(\S)")


def _line_starts(src: str) -> List[int]:
    return [0] + [m.end() for m in re.finditer("\n", src)]


def _locate(line_starts: Sequence[int], offset: int) -> Pos:
    line = bisect.bisect_right(line_starts, offset) - 1
    return line + 1, offset - line_starts[line] + 1


def _is_name(text: str) -> bool:
    c = text[0]
    return c.isalpha() or c == "_"


def _tokens(src: str):
    """Token texts and their offsets, ending with an empty ``end`` token."""
    texts: List[str] = []
    offsets: List[int] = []
    for m in _TOKEN.finditer(src):
        text = m.group()
        if m.lastindex and not _is_name(text):
            raise ParseError(f"unexpected character {text!r}",
                             *_locate(_line_starts(src), m.start()))
        texts.append(text)
        offsets.append(m.start())
    texts.append("")
    offsets.append(len(src))
    return texts, offsets


class _Parser:
    def __init__(self, src: str):
        self.texts, self.offsets = _tokens(src)
        self.i = 0
        self.src = src
        self.one_line = "\n" not in src
        self._starts: Optional[List[int]] = None

    def loc(self, offset: int) -> Pos:
        if self.one_line:
            return 1, offset + 1
        if self._starts is None:
            self._starts = _line_starts(self.src)
        return _locate(self._starts, offset)

    def fail(self, want: str):
        text = self.texts[self.i]
        got = repr(text) if text else "end of input"
        raise ParseError(f"expected {want}, found {got}", *self.loc(self.offsets[self.i]))

    def take(self, text: str):
        if self.texts[self.i] != text:
            self.fail(repr(text))
        self.i += 1

    def name(self) -> str:
        text = self.texts[self.i]
        if not text or not _is_name(text):
            self.fail("name")
        self.i += 1
        return text

    def term(self) -> TermExpr:
        left = self.tensor()
        while self.texts[self.i] == ";":
            pos = self.loc(self.offsets[self.i])
            self.i += 1
            left = Comp(left, self.tensor(), pos)
        return left

    def tensor(self) -> TermExpr:
        left = self.factor()
        while self.texts[self.i] == "*":
            pos = self.loc(self.offsets[self.i])
            self.i += 1
            left = Tensor(left, self.factor(), pos)
        return left

    def word(self, stop: str = ")") -> Word:
        texts = self.texts
        i = j = self.i
        while texts[j] and _is_name(texts[j]):
            j += 1
        self.i = j
        if texts[j] != stop:
            self.fail(repr(stop))
        return tuple(texts[i:j])

    def factor(self) -> TermExpr:
        text = self.texts[self.i]
        if text == "(":
            self.i += 1
            inner = self.term()
            self.take(")")
            return inner
        if text not in KEYWORDS:
            self.fail("a term")
        pos = self.loc(self.offsets[self.i])
        self.i += 1
        if text == "id":
            self.take("(")
            w = self.word()
            self.i += 1
            return Id(w, pos)
        if text == "sym":
            self.take("(")
            u = self.word(",")
            self.i += 1
            v = self.word()
            self.i += 1
            return Sym(u, v, pos)
        name = self.name()
        return {"gen": Gen, "dup": Dup, "disc": Disc}[text](name, pos)


def parse_term(src: str) -> TermExpr:
    """Parse a term; errors carry 1-based line and column."""
    p = _Parser(src)
    t = p.term()
    if p.texts[p.i]:
        p.fail("end of input")
    return t


def term_letters(t: TermExpr) -> List[str]:
    """Letters mentioned by a term, in order of first appearance."""
    out: Dict[str, None] = {}

    def walk(t):
        if isinstance(t, Id):
            out.update(dict.fromkeys(t.word))
        elif isinstance(t, Sym):
            out.update(dict.fromkeys(t.left + t.right))
        elif isinstance(t, (Dup, Disc)):
            out[t.letter] = None
        elif isinstance(t, (Comp, Tensor)):
            walk(t.first if isinstance(t, Comp) else t.left)
            walk(t.then if isinstance(t, Comp) else t.right)

    walk(t)
    return list(out)


def _word_text(w: Sequence[str]) -> str:
    return " ".join(w) if w else "()"


def _infer(t: TermExpr, sig: Signature, types: Dict[int, Tuple[Word, Word]]):
    """Domain and codomain of every subterm, keyed by ``id``."""
    try:
        if isinstance(t, Id):
            w = sig.check_word(t.word)
            ty = (w, w)
        elif isinstance(t, Sym):
            u, v = sig.check_word(t.left), sig.check_word(t.right)
            ty = (u + v, v + u)
        elif isinstance(t, Gen):
            if t.name not in sig.gen_types:
                raise ParseError(f"unknown generator {t.name}", *t.pos)
            ty = sig.gen_types[t.name]
        elif isinstance(t, Dup):
            a = sig.check_word((t.letter,))
            ty = (a, a + a)
        elif isinstance(t, Disc):
            ty = (sig.check_word((t.letter,)), ())
        elif isinstance(t, Tensor):
            (d1, c1), (d2, c2) = _infer(t.left, sig, types), _infer(t.right, sig, types)
            ty = (d1 + d2, c1 + c2)
        else:
            (d1, c1), (d2, c2) = _infer(t.first, sig, types), _infer(t.then, sig, types)
            if c1 != d2:
                raise ParseError(f"type error: cod {_word_text(c1)} ≠ dom {_word_text(d2)}",
                                 *t.pos)
            ty = (d1, c2)
    except SignatureError as e:
        raise ParseError(str(e), *t.pos) from None
    types[id(t)] = ty
    return ty


class _Mismatch(Exception):
    pass


def elaborate(t: TermExpr, sig: Signature) -> Diagram:
    """Build the diagram denoted by a term, reporting type errors by location.

    One pass wires the nodes: each subterm pulls its inputs, with their
    letters, from the outputs of what precedes it, and the whole term pulls
    fresh domain ports on demand.  Ill-typed terms are re-checked by
    :func:`_infer`, which locates the error.
    """
    b = dg.Builder(sig)
    dom: List[str] = []
    wiring = b.wiring
    letter_set = sig.letter_set
    gen_types = sig.gen_types

    def pull(src, k, want):
        """Take ``k`` ports from ``src``, checking letters against ``want``."""
        if src is None:
            base = len(dom)
            dom.extend(want)
            return [((BOUNDARY, base + i), a) for i, a in enumerate(want)]
        if len(src) < k:
            raise _Mismatch
        got = src[:k]
        del src[:k]
        for (_, a), w in zip(got, want):
            if a != w:
                raise _Mismatch
        return got

    def atom(value, ins_w, outs_w, src):
        x = len(b.nodes)
        b.nodes.append(value)
        for i, (p, _) in enumerate(pull(src, len(ins_w), ins_w)):
            wiring[(x, i)] = p
        return [((x, j), a) for j, a in enumerate(outs_w)]

    def build(t, src):
        if isinstance(t, Comp):
            mid = build(t.first, src)
            out = build(t.then, mid)
            if mid:
                raise _Mismatch
            return out
        if isinstance(t, Tensor):
            return build(t.left, src) + build(t.right, src)
        if isinstance(t, Id):
            if not set(t.word) <= letter_set:
                raise _Mismatch
            return pull(src, len(t.word), t.word)
        if isinstance(t, Sym):
            if not set(t.left + t.right) <= letter_set:
                raise _Mismatch
            k = len(t.left)
            ins = pull(src, k + len(t.right), t.left + t.right)
            return ins[k:] + ins[:k]
        if isinstance(t, Gen):
            if t.name not in gen_types:
                raise _Mismatch
            ins_w, outs_w = gen_types[t.name]
            return atom(dg.Gen(t.name), ins_w, outs_w, src)
        if t.letter not in letter_set:
            raise _Mismatch
        a = t.letter
        if isinstance(t, Dup):
            return atom(dg.Dup(a), (a,), (a, a), src)
        return atom(dg.Disc(a), (a,), (), src)

    try:
        outs = build(t, None)
    except _Mismatch:
        _infer(t, sig, {})
        raise ParseError("ill-typed term") from None
    for j, (p, _) in enumerate(outs):
        wiring[(BOUNDARY, j)] = p
    return b.finish(dom, [a for _, a in outs])


def read_term(src: str, sig: Signature) -> Diagram:
    return elaborate(parse_term(src), sig)


# ----------------------------------------------------------------------
# printing

def _move(word: List[str], p: int, q: int) -> str:
    """Step moving position ``p`` to position ``q < p``."""
    parts = []
    if q:
        parts.append(f"id({' '.join(word[:q])})")
    parts.append(f"sym({' '.join(word[q:p])}, {word[p]})")
    if p + 1 < len(word):
        parts.append(f"id({' '.join(word[p + 1:])})")
    return " * ".join(parts)


def _value_text(v) -> str:
    if isinstance(v, dg.Gen):
        return f"gen {v.name}"
    if isinstance(v, dg.Dup):
        return f"dup {v.letter}"
    return f"disc {v.letter}"


def _step_text(word: Sequence[str], ops) -> str:
    """One tensor layer: ``ops`` are (start, width, text) on ``word``."""
    parts: List[str] = []
    idle: List[str] = []
    pos = 0

    def flush():
        if idle:
            parts.append(f"id({' '.join(idle)})")
            idle.clear()

    for start, width, text in ops:
        idle.extend(word[pos:start])
        flush()
        parts.append(text)
        pos = start + width
    idle.extend(word[pos:])
    flush()
    return " * ".join(parts)


def print_term(d: Diagram) -> str:
    """A term denoting ``d``, built from a sweep of the nodes in topological order.

    Nodes whose inputs already sit side by side, in order, are applied in
    place; consecutive such nodes on disjoint wires share one tensor layer.
    Otherwise crossings first gather the inputs next to the leftmost one.
    A final run of crossings puts the open wires in codomain order.
    """
    steps: List[str] = []
    open_src: List[tuple] = [(BOUNDARY, i) for i in range(len(d.dom))]
    letters: List[str] = list(d.dom)
    ops: List[tuple] = []      # (start, width, node) pending in this layer
    fresh: set = set()         # sources produced by the pending layer

    def flush():
        if not ops:
            return
        ops.sort(key=lambda o: (o[0], o[1] > 0))
        steps.append(_step_text(letters, [(a, w, _value_text(d.nodes[x])) for a, w, x in ops]))
        new_src: List[tuple] = []
        new_letters: List[str] = []
        pos = 0
        for start, width, x in ops:
            new_src += open_src[pos:start]
            new_letters += letters[pos:start]
            outs = d.types[x][1]
            new_src += [(x, j) for j in range(len(outs))]
            new_letters += outs
            pos = start + width
        new_src += open_src[pos:]
        new_letters += letters[pos:]
        open_src[:] = new_src
        letters[:] = new_letters
        ops.clear()
        fresh.clear()

    def gather(srcs):
        if not srcs:
            return
        q0 = min(open_src.index(s) for s in srcs)
        for i, s in enumerate(srcs):
            p, q = open_src.index(s), q0 + i
            if p != q:
                steps.append(_move(letters, p, q))
                open_src.insert(q, open_src.pop(p))
                letters.insert(q, letters.pop(p))

    def place(srcs):
        """Start of the input block of a node, or None if the inputs are scattered."""
        if not srcs:
            return len(letters)
        pos = [open_src.index(s) for s in srcs]
        return pos[0] if pos == list(range(pos[0], pos[0] + len(srcs))) else None

    def clashes(start, width):
        end = start + width
        for a, w, _ in ops:
            if a < end and start < a + w or (a == start and w == width == 0):
                return True
        return False

    wiring, types = d.wiring, d.types
    for x in d.topological_order:
        ins, outs = types[x]
        srcs = [wiring[(x, i)] for i in range(len(ins))]
        if fresh and not fresh.isdisjoint(srcs):
            flush()
        start = place(srcs)
        if start is None or clashes(start, len(srcs)):
            flush()
            if place(srcs) is None:
                gather(srcs)
            start = place(srcs)
        ops.append((start, len(srcs), x))
        fresh.update([(x, j) for j in range(len(outs))])
    flush()
    target = [d.wiring[(BOUNDARY, j)] for j in range(len(d.cod))]
    for q, s in enumerate(target):
        p = open_src.index(s)
        if p != q:
            steps.append(_move(letters, p, q))
            open_src.insert(q, open_src.pop(p))
            letters.insert(q, letters.pop(p))
    if not steps:
        return f"id({' '.join(d.dom)})"
    return " ; ".join(steps)


# ----------------------------------------------------------------------
# line formats

def _lines(src: str):
    for n, raw in enumerate(src.replace(";", "\n").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield n, line


def parse_signature(src: str) -> Signature:
    """``letters: a b c`` and ``gen f : a b -> c c`` lines (``;`` may separate lines)."""
    letters: List[str] = []
    gens: List[Tuple[str, Word, Word]] = []
    for n, line in _lines(src):
        if line.startswith("letters:"):
            letters.extend(line[len("letters:"):].split())
            continue
        m = re.fullmatch(r"gen\s+(\S+)\s*:(.*)->(.*)", line)
        if not m:
            raise ParseError(f"cannot read signature line {line!r}", n, 1)
        gens.append((m.group(1), tuple(m.group(2).split()), tuple(m.group(3).split())))
    sig = Signature(tuple(letters), tuple(gens))
    problems = validate_signature(sig)
    if problems:
        raise ParseError("; ".join(problems))
    return sig


def format_signature(sig: Signature) -> str:
    lines = [f"letters: {' '.join(sig.letters)}"]
    lines += [f"gen {name} : {' '.join(dom)} -> {' '.join(cod)}".replace("  ", " ")
              for name, dom, cod in sig.generators]
    return "\n".join(lines) + "\n"


def parse_dag(src: str) -> OrderedDag:
    """``vertices: v1 v2 v3`` and ``arrow v1 v2`` lines."""
    vertices: List[str] = []
    arrows = set()
    for n, line in _lines(src):
        if line.startswith("vertices:"):
            vertices.extend(line[len("vertices:"):].split())
            continue
        parts = line.split()
        if len(parts) != 3 or parts[0] != "arrow":
            raise ParseError(f"cannot read DAG line {line!r}", n, 1)
        arrows.add((parts[1], parts[2]))
    dag = OrderedDag(tuple(vertices), frozenset(arrows))
    problems = validate_dag(dag)
    if problems:
        raise ParseError("; ".join(problems))
    return dag


def parse_hom(src: str, source: OrderedDag, target: OrderedDag) -> DagHom:
    """``map h g`` lines, one per source vertex."""
    pairs: Dict[str, str] = {}
    for n, line in _lines(src):
        parts = line.split()
        if len(parts) != 3 or parts[0] != "map":
            raise ParseError(f"cannot read hom line {line!r}", n, 1)
        if parts[1] in pairs:
            raise ParseError(f"vertex {parts[1]} mapped twice", n, 1)
        pairs[parts[1]] = parts[2]
    missing = [v for v in source.vertices if v not in pairs]
    if missing:
        raise ParseError(f"unmapped vertices: {' '.join(missing)}")
    h = DagHom(source, target, tuple((v, pairs[v]) for v in source.vertices))
    problems = validate_hom(h)
    if problems:
        raise ParseError("; ".join(problems))
    return h


def named_dag(name: str) -> Optional[OrderedDag]:
    """Built-in DAGs: ``chainN``, ``starN`` (a root with N leaves), ``discreteN``."""
    m = re.fullmatch(r"(chain|star|discrete)(\d+)", name)
    if not m:
        return None
    kind, n = m.group(1), int(m.group(2))
    if kind == "star":
        vs = tuple(f"v{i}" for i in range(1, n + 2))
        return OrderedDag(vs, frozenset(("v1", v) for v in vs[1:]))
    vs = tuple(f"v{i}" for i in range(1, n + 1))
    if kind == "chain":
        return OrderedDag(vs, frozenset(zip(vs, vs[1:])))
    return OrderedDag(vs, frozenset())
