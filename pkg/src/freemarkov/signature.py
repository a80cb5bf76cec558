"""Signatures (free DD-graph monoids), words, and finite ordered DAGs.

Words are plain tuples of letter identifiers.  Duplicates and discards are
implicit for every letter and never stored in a :class:`Signature`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, Sequence, Tuple

Word = Tuple[str, ...]

RESERVED = ("dup", "disc")


class SignatureError(ValueError):
    """Raised for ill-formed signatures, DAGs or homomorphisms."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


def word(letters: Iterable[str] | str) -> Word:
    """Coerce a whitespace separated string or an iterable into a word."""
    if isinstance(letters, str):
        return tuple(letters.split())
    return tuple(letters)


def word_concat(u: Sequence[str], v: Sequence[str]) -> Word:
    return tuple(u) + tuple(v)


def is_singular(w: Sequence[str]) -> bool:
    """True iff no letter occurs twice in ``w``."""
    return len(set(w)) == len(w)


@dataclass(frozen=True)
class Signature:
    """Alphabet plus typed generator arrows ``name : dom -> cod``."""

    letters: Tuple[str, ...]
    generators: Tuple[Tuple[str, Word, Word], ...] = ()

    @classmethod
    def build(cls, letters, generators: Mapping[str, Tuple] | None = None,
              check: bool = True) -> "Signature":
        gens = tuple((name, word(d), word(c))
                     for name, (d, c) in (generators or {}).items())
        sig = cls(word(letters), gens)
        if check:
            problems = validate_signature(sig)
            if problems:
                raise SignatureError(problems)
        return sig

    @cached_property
    def gen_types(self) -> Dict[str, Tuple[Word, Word]]:
        return {name: (d, c) for name, d, c in self.generators}

    @cached_property
    def letter_set(self) -> frozenset:
        return frozenset(self.letters)

    def gen_type(self, name: str) -> Tuple[Word, Word]:
        try:
            return self.gen_types[name]
        except KeyError:
            raise SignatureError(f"unknown generator {name}") from None

    def check_word(self, w: Sequence[str]) -> Word:
        w = word(w)
        bad = [a for a in w if a not in self.letter_set]
        if bad:
            raise SignatureError([f"undeclared letter {a}" for a in bad])
        return w


def validate_signature(sig: Signature) -> List[str]:
    """Return the list of violated signature invariants (empty when ok)."""
    problems = []
    seen = set()
    for a in sig.letters:
        if a in seen:
            problems.append(f"duplicate letter {a}")
        seen.add(a)
    names = set()
    for name, d, c in sig.generators:
        if name in names:
            problems.append(f"duplicate generator {name}")
        if name in RESERVED:
            problems.append(f"generator name {name} is reserved")
        names.add(name)
        for a in (*d, *c):
            if a not in seen:
                problems.append(f"undeclared letter {a} in generator {name}")
    return problems


@dataclass(frozen=True)
class OrderedDag:
    """Finite DAG whose storage order of ``vertices`` is the total order.

    Arrows must point forward in that order, which also makes the arrow
    relation acyclic.  Identity loops are implicit.
    """

    vertices: Tuple[str, ...]
    arrows: frozenset = field(default_factory=frozenset)

    @classmethod
    def build(cls, vertices, arrows=()) -> "OrderedDag":
        dag = cls(word(vertices), frozenset(tuple(a) for a in arrows))
        problems = validate_dag(dag)
        if problems:
            raise SignatureError(problems)
        return dag

    @cached_property
    def position(self) -> Dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @cached_property
    def _parents(self) -> Dict[str, Word]:
        pa = {v: [] for v in self.vertices}
        for s, t in self.arrows:
            pa[t].append(s)
        return {v: tuple(sorted(ps, key=self.position.__getitem__))
                for v, ps in pa.items()}

    @cached_property
    def _children(self) -> Dict[str, Word]:
        ch = {v: [] for v in self.vertices}
        for s, t in self.arrows:
            ch[s].append(t)
        return {v: tuple(sorted(cs, key=self.position.__getitem__))
                for v, cs in ch.items()}

    def parents(self, v: str) -> Word:
        """Parents of ``v`` in vertex order (the word pa(v))."""
        return self._parents[v]

    def children(self, v: str) -> Word:
        return self._children[v]

    def sort(self, vs: Iterable[str]) -> Word:
        return tuple(sorted(set(vs), key=self.position.__getitem__))

    def without_incoming(self, vs: Iterable[str]) -> "OrderedDag":
        cut = set(vs)
        return OrderedDag(self.vertices,
                          frozenset(a for a in self.arrows if a[1] not in cut))

    def __str__(self):
        lines = ["vertices: " + " ".join(self.vertices)]
        for s, t in sorted(self.arrows, key=lambda a: (self.position[a[0]],
                                                       self.position[a[1]])):
            lines.append(f"arrow {s} {t}")
        return "\n".join(lines)


def validate_dag(dag: OrderedDag) -> List[str]:
    problems = []
    if len(set(dag.vertices)) != len(dag.vertices):
        problems.append("duplicate vertex")
    pos = {v: i for i, v in enumerate(dag.vertices)}
    for s, t in sorted(dag.arrows):
        if s not in pos or t not in pos:
            problems.append(f"arrow {s}->{t} uses an unknown vertex")
        elif pos[s] >= pos[t]:
            problems.append(f"arrow {s}->{t} does not respect the vertex order")
    return problems


@dataclass(frozen=True)
class DagHom:
    """Order-preserving homomorphism; arrows may collapse onto identity loops."""

    source: OrderedDag
    target: OrderedDag
    vmap: Tuple[Tuple[str, str], ...]

    @classmethod
    def build(cls, source: OrderedDag, target: OrderedDag,
              vmap: Mapping[str, str], check: bool = True) -> "DagHom":
        h = cls(source, target, tuple((v, vmap[v]) for v in source.vertices
                                      if v in vmap))
        if check:
            problems = validate_hom(h)
            if problems:
                raise SignatureError(problems)
        return h

    @classmethod
    def identity(cls, dag: OrderedDag) -> "DagHom":
        return cls(dag, dag, tuple((v, v) for v in dag.vertices))

    @cached_property
    def mapping(self) -> Dict[str, str]:
        return dict(self.vmap)

    def __call__(self, v: str) -> str:
        return self.mapping[v]

    @cached_property
    def _preimages(self) -> Dict[str, Word]:
        out: Dict[str, List[str]] = {v: [] for v in self.target.vertices}
        for u in self.source.vertices:
            out.setdefault(self.mapping[u], []).append(u)
        return {v: tuple(us) for v, us in out.items()}

    def preimage(self, v: str) -> Word:
        """Vertices of the source sent to ``v``, in source vertex order."""
        return self._preimages.get(v, ())


def validate_hom(h: DagHom) -> List[str]:
    problems = []
    m = h.mapping
    missing = [v for v in h.source.vertices if v not in m]
    if missing:
        return [f"vertex {v} is not mapped" for v in missing]
    tpos = h.target.position
    for v in m.values():
        if v not in tpos:
            problems.append(f"image {v} is not a target vertex")
    if problems:
        return problems
    vs = h.source.vertices
    for i in range(len(vs) - 1):
        if tpos[m[vs[i]]] > tpos[m[vs[i + 1]]]:
            problems.append(f"order violated between {vs[i]} and {vs[i + 1]}")
    for s, t in sorted(h.source.arrows):
        if m[s] != m[t] and (m[s], m[t]) not in h.target.arrows:
            problems.append(f"arrow {s}->{t} maps to the non-arrow "
                            f"{m[s]}->{m[t]}")
    return problems


def compose_homs(g: DagHom, f: DagHom) -> DagHom:
    """The composite ``g after f``."""
    if f.target != g.source:
        raise SignatureError("homomorphisms are not composable")
    return DagHom(f.source, g.target,
                  tuple((v, g(f(v))) for v in f.source.vertices))
