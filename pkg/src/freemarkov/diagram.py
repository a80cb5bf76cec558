"""Anchored, polarized, acyclic string diagrams valued in a free signature.

A diagram is combinatorial data: a tuple of node values, the anchored
boundary words, and a wiring that sends every *target* port to the unique
*source* port feeding it.  Ports are pairs ``(node, index)``; node ``-1``
stands for the boundary (the domain on the source side, the codomain on the
target side).  Symmetries are pure wiring, never nodes.

Equality of morphisms of the free symmetric monoidal category is
:func:`isomorphic`, decided by comparing :func:`certificate` values.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Sequence, Tuple, Union

from .signature import Signature, SignatureError, Word

BOUNDARY = -1

Port = Tuple[int, int]
Wire = Tuple[Port, Port]  # (source port, target port)


class DiagramError(ValueError):
    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


@dataclass(frozen=True)
class Gen:
    name: str

    def __str__(self):
        return f"gen:{self.name}"


@dataclass(frozen=True)
class Dup:
    letter: str

    def __str__(self):
        return f"dup:{self.letter}"


@dataclass(frozen=True)
class Disc:
    letter: str

    def __str__(self):
        return f"disc:{self.letter}"


NodeValue = Union[Gen, Dup, Disc]


def node_type(sig: Signature, value: NodeValue) -> Tuple[Word, Word]:
    """Input and output letters of a node, in port order."""
    if isinstance(value, Gen):
        return sig.gen_type(value.name)
    if value.letter not in sig.letter_set:
        raise SignatureError(f"undeclared letter {value.letter}")
    if isinstance(value, Dup):
        return (value.letter,), (value.letter, value.letter)
    return (value.letter,), ()


@dataclass(frozen=True, eq=False)
class Diagram:
    sig: Signature
    nodes: Tuple[NodeValue, ...]
    dom: Word
    cod: Word
    wiring: Mapping[Port, Port]

    def __repr__(self):
        return (f"Diagram(dom={' '.join(self.dom) or '()'}, "
                f"cod={' '.join(self.cod) or '()'}, "
                f"nodes=[{', '.join(map(str, self.nodes))}])")

    @cached_property
    def types(self) -> Tuple[Tuple[Word, Word], ...]:
        return tuple(node_type(self.sig, v) for v in self.nodes)

    @cached_property
    def targets(self) -> Dict[Port, Port]:
        """Inverse wiring: source port -> target port."""
        return {s: t for t, s in self.wiring.items()}

    def source_letter(self, p: Port) -> str:
        n, i = p
        return self.dom[i] if n == BOUNDARY else self.types[n][1][i]

    def target_letter(self, p: Port) -> str:
        n, i = p
        return self.cod[i] if n == BOUNDARY else self.types[n][0][i]

    @property
    def wires(self) -> List[Wire]:
        return [(s, t) for t, s in self.wiring.items()]

    @cached_property
    def by_value(self) -> Dict[NodeValue, List[int]]:
        out: Dict[NodeValue, List[int]] = {}
        for i, v in enumerate(self.nodes):
            out.setdefault(v, []).append(i)
        return out

    @cached_property
    def successors(self) -> Tuple[FrozenSet[int], ...]:
        succ = [set() for _ in self.nodes]
        for t, s in self.wiring.items():
            if s[0] != BOUNDARY and t[0] != BOUNDARY:
                succ[s[0]].add(t[0])
        return tuple(frozenset(x) for x in succ)

    @cached_property
    def topological_order(self) -> Tuple[int, ...]:
        succ = self.successors
        indeg = [0] * len(self.nodes)
        for ys in succ:
            for y in ys:
                indeg[y] += 1
        # first in, first out: the queue itself is the order
        order = [x for x, k in enumerate(indeg) if k == 0]
        k = 0
        while k < len(order):
            ys = succ[order[k]]
            k += 1
            for y in (sorted(ys) if len(ys) > 1 else ys):
                indeg[y] -= 1
                if indeg[y] == 0:
                    order.append(y)
        if len(order) != len(self.nodes):
            raise DiagramError("cycle among nodes")
        return tuple(order)

    @cached_property
    def descendants(self) -> Tuple[int, ...]:
        """Bitmask of nodes strictly above each node in the node order."""
        down = [0] * len(self.nodes)
        for x in reversed(self.topological_order):
            m = 0
            for y in self.successors[x]:
                m |= (1 << y) | down[y]
            down[x] = m
        return tuple(down)

    @cached_property
    def ancestors(self) -> Tuple[int, ...]:
        up = [0] * len(self.nodes)
        for x, m in enumerate(self.descendants):
            y = 0
            while m:
                if m & 1:
                    up[y] |= 1 << x
                m >>= 1
                y += 1
        return tuple(up)

    def leq(self, x: int, y: int) -> bool:
        return x == y or bool(self.descendants[x] >> y & 1)

    def validate(self) -> "Diagram":
        problems = well_formed(self)
        if problems:
            raise DiagramError(problems)
        return self

    def __rshift__(self, other: "Diagram") -> "Diagram":
        return compose(other, self)

    def __matmul__(self, other: "Diagram") -> "Diagram":
        return tensor(self, other)


class Builder:
    """Mutable scratch space for assembling a diagram."""

    def __init__(self, sig: Signature):
        self.sig = sig
        self.nodes: List[NodeValue] = []
        self.wiring: Dict[Port, Port] = {}

    def add(self, value: NodeValue) -> int:
        self.nodes.append(value)
        return len(self.nodes) - 1

    def connect(self, src: Port, tgt: Port):
        if tgt in self.wiring:
            raise DiagramError(f"target port {tgt} wired twice")
        self.wiring[tgt] = src

    def finish(self, dom: Sequence[str], cod: Sequence[str]) -> Diagram:
        return Diagram(self.sig, tuple(self.nodes), tuple(dom), tuple(cod),
                       dict(self.wiring))


def well_formed(d: Diagram) -> List[str]:
    """Return the violated diagram invariants (empty list when ok)."""
    problems = []
    try:
        types = [node_type(d.sig, v) for v in d.nodes]
    except SignatureError as e:
        return list(e.problems)
    for a in (*d.dom, *d.cod):
        if a not in d.sig.letter_set:
            problems.append(f"undeclared letter {a}")
    sources = {(BOUNDARY, i) for i in range(len(d.dom))}
    targets = {(BOUNDARY, j) for j in range(len(d.cod))}
    for n, (ins, outs) in enumerate(types):
        sources.update((n, i) for i in range(len(outs)))
        targets.update((n, i) for i in range(len(ins)))
    used = {}
    for t, s in d.wiring.items():
        if t not in targets:
            problems.append(f"wire into unknown port {t}")
            continue
        if s not in sources:
            problems.append(f"wire from unknown port {s}")
            continue
        if s in used:
            problems.append(f"source port {s} used twice")
        used[s] = t
    for p in sorted(targets - set(d.wiring)):
        problems.append(f"dangling port: target {p} unwired")
    for p in sorted(sources - set(used)):
        problems.append(f"dangling port: source {p} unwired")
    if problems:
        return problems

    def src_letter(p):
        return d.dom[p[1]] if p[0] == BOUNDARY else types[p[0]][1][p[1]]

    def tgt_letter(p):
        return d.cod[p[1]] if p[0] == BOUNDARY else types[p[0]][0][p[1]]

    for t, s in sorted(d.wiring.items()):
        if src_letter(s) != tgt_letter(t):
            problems.append(f"letter mismatch on wire {s}->{t}: "
                            f"{src_letter(s)} vs {tgt_letter(t)}")
    try:
        d.topological_order
    except DiagramError as e:
        problems.extend(e.problems)
    return problems


# ----------------------------------------------------------------------
# symmetric monoidal structure

def identity(sig: Signature, w: Sequence[str]) -> Diagram:
    w = sig.check_word(w)
    return Diagram(sig, (), w, w, {(BOUNDARY, i): (BOUNDARY, i)
                                   for i in range(len(w))})


def atom(sig: Signature, value: NodeValue) -> Diagram:
    ins, outs = node_type(sig, value)
    wiring = {(0, i): (BOUNDARY, i) for i in range(len(ins))}
    wiring.update({(BOUNDARY, j): (0, j) for j in range(len(outs))})
    return Diagram(sig, (value,), ins, outs, wiring)


def _shift(p: Port, by_node: int, by_boundary: int) -> Port:
    if p[0] == BOUNDARY:
        return (BOUNDARY, p[1] + by_boundary)
    return (p[0] + by_node, p[1])


def compose(g: Diagram, f: Diagram) -> Diagram:
    """``g after f``: the codomain of ``f`` is plugged into the domain of ``g``."""
    if f.sig != g.sig:
        raise DiagramError("signature mismatch")
    if f.cod != g.dom:
        raise DiagramError(f"boundary mismatch: cod {' '.join(f.cod) or '()'}"
                           f" != dom {' '.join(g.dom) or '()'}")
    n = len(f.nodes)
    wiring = {t: s for t, s in f.wiring.items() if t[0] != BOUNDARY}
    for t, s in g.wiring.items():
        t2 = t if t[0] == BOUNDARY else (t[0] + n, t[1])
        if s[0] == BOUNDARY:
            s2 = f.wiring[(BOUNDARY, s[1])]
        else:
            s2 = (s[0] + n, s[1])
        wiring[t2] = s2
    return Diagram(f.sig, f.nodes + g.nodes, f.dom, g.cod, wiring)


def tensor(f: Diagram, g: Diagram) -> Diagram:
    if f.sig != g.sig:
        raise DiagramError("signature mismatch")
    n = len(f.nodes)
    wiring = dict(f.wiring)
    for t, s in g.wiring.items():
        tb = len(f.cod) if t[0] == BOUNDARY else 0
        wiring[_shift(t, n, tb)] = _shift(s, n, len(f.dom))
    return Diagram(f.sig, f.nodes + g.nodes, f.dom + g.dom, f.cod + g.cod,
                   wiring)


def tensor_all(sig: Signature, ds: Iterable[Diagram]) -> Diagram:
    out = identity(sig, ())
    for d in ds:
        out = tensor(out, d)
    return out


def compose_all(ds: Sequence[Diagram]) -> Diagram:
    """Compose in diagrammatic order: ``ds[0]`` first."""
    out = ds[0]
    for d in ds[1:]:
        out = compose(d, out)
    return out


def symmetry(sig: Signature, u: Sequence[str], v: Sequence[str]) -> Diagram:
    u, v = sig.check_word(u), sig.check_word(v)
    wiring = {(BOUNDARY, len(v) + i): (BOUNDARY, i) for i in range(len(u))}
    wiring.update({(BOUNDARY, j): (BOUNDARY, len(u) + j) for j in range(len(v))})
    return Diagram(sig, (), u + v, v + u, wiring)


def permutation(sig: Signature, w: Sequence[str], perm: Sequence[int]) -> Diagram:
    """Pure wiring whose ``j``-th codomain port carries domain port ``perm[j]``."""
    w = sig.check_word(w)
    if sorted(perm) != list(range(len(w))):
        raise DiagramError("not a permutation")
    return Diagram(sig, (), w, tuple(w[i] for i in perm),
                   {(BOUNDARY, j): (BOUNDARY, i) for j, i in enumerate(perm)})


# ----------------------------------------------------------------------
# isomorphism

def _number_from(d: Diagram, seeds: Iterable[int], numbering: Dict[int, int]):
    """Breadth-first numbering through ordered ports, starting at ``seeds``."""
    queue = []
    for x in seeds:
        if x not in numbering:
            numbering[x] = len(numbering)
            queue.append(x)
    targets = d.targets
    k = 0
    while k < len(queue):
        x = queue[k]
        k += 1
        ins, outs = d.types[x]
        for i in range(len(ins)):
            y = d.wiring[(x, i)][0]
            if y != BOUNDARY and y not in numbering:
                numbering[y] = len(numbering)
                queue.append(y)
        for j in range(len(outs)):
            y = targets[(x, j)][0]
            if y != BOUNDARY and y not in numbering:
                numbering[y] = len(numbering)
                queue.append(y)
    return queue


def _encode(d: Diagram, order: Sequence[int], numbering: Mapping[int, int]):
    def ref(p):
        return p if p[0] == BOUNDARY else (numbering[p[0]], p[1])

    rows = []
    for x in order:
        ins = d.types[x][0]
        rows.append((str(d.nodes[x]),
                     tuple(ref(d.wiring[(x, i)]) for i in range(len(ins)))))
    return tuple(rows)


def certificate(d: Diagram) -> tuple:
    """A complete isomorphism invariant of anchored diagrams.

    Boundary-reachable nodes are numbered by a deterministic traversal from
    the anchored ports; each boundary-free component gets the least
    encoding over all start nodes, and the components are then sorted.
    """
    numbering: Dict[int, int] = {}
    seeds = []
    for i in range(len(d.dom)):
        y = d.targets[(BOUNDARY, i)][0]
        if y != BOUNDARY:
            seeds.append(y)
    for j in range(len(d.cod)):
        y = d.wiring[(BOUNDARY, j)][0]
        if y != BOUNDARY:
            seeds.append(y)
    # seeds in anchored order, each seed expanded before the next
    for y in seeds:
        _number_from(d, [y], numbering)
    anchored = sorted(numbering, key=numbering.__getitem__)
    rest = [x for x in range(len(d.nodes)) if x not in numbering]
    comps = []
    seen = set()
    for x in rest:
        if x in seen:
            continue
        comp = _number_from(d, [x], {})
        seen.update(comp)
        best = None
        for start in comp:
            if best is not None and str(d.nodes[start]) > best[0][0][0]:
                continue
            local: Dict[int, int] = {}
            order = _number_from(d, [start], local)
            enc = _encode(d, order, local)
            if best is None or enc < best[0]:
                best = (enc, order)
        comps.append(best)
    comps.sort(key=lambda c: c[0])
    for _, order in comps:
        for x in order:
            numbering[x] = len(numbering)
        anchored.extend(order)
    cod_refs = tuple(
        (lambda p: p if p[0] == BOUNDARY else (numbering[p[0]], p[1]))(
            d.wiring[(BOUNDARY, j)]) for j in range(len(d.cod)))
    return (d.dom, d.cod, _encode(d, anchored, numbering), cod_refs)


def isomorphic(d1: Diagram, d2: Diagram) -> bool:
    if (d1.dom != d2.dom or d1.cod != d2.cod
            or len(d1.nodes) != len(d2.nodes)):
        return False
    return certificate(d1) == certificate(d2)


# ----------------------------------------------------------------------
# levels, cuts and layers

def node_poset(d: Diagram) -> Dict[int, FrozenSet[int]]:
    """``x -> {y : x <= y}`` for the path order on nodes."""
    out = {}
    for x, m in enumerate(d.descendants):
        ys = {x}
        y = 0
        while m:
            if m & 1:
                ys.add(y)
            m >>= 1
            y += 1
        out[x] = frozenset(ys)
    return out


def is_level(d: Diagram, level: Iterable[int]) -> bool:
    lv = set(level)
    if not lv <= set(range(len(d.nodes))):
        return False
    mask = 0
    for x in lv:
        mask |= 1 << x
    return all(not (d.ancestors[y] & ~mask) for y in lv)


def down_closure(d: Diagram, xs: Iterable[int]) -> FrozenSet[int]:
    out = set()
    for x in xs:
        out.add(x)
        m, y = d.ancestors[x], 0
        while m:
            if m & 1:
                out.add(y)
            m >>= 1
            y += 1
    return frozenset(out)


def cut(d: Diagram, level: Iterable[int]) -> FrozenSet[Wire]:
    """Wires leaving ``level`` (or the domain) for its complement (or the codomain)."""
    lv = frozenset(level)
    if not is_level(d, lv):
        raise DiagramError("not a level: not downward closed")
    out = set()
    for t, s in d.wiring.items():
        if (s[0] == BOUNDARY or s[0] in lv) and (t[0] == BOUNDARY or t[0] not in lv):
            out.add((s, t))
    return frozenset(out)


def cut_order(wires: Iterable[Wire]) -> List[Wire]:
    """Deterministic ordering of a cut set, shared by both sides of an interface."""
    return sorted(wires)


@dataclass(frozen=True)
class Layer:
    parent: Diagram
    lower: FrozenSet[int]
    upper: FrozenSet[int]
    nodes: FrozenSet[int]
    pinned: FrozenSet[Wire]
    dom_wires: FrozenSet[Wire]
    cod_wires: FrozenSet[Wire]

    @property
    def loose(self) -> FrozenSet[Wire]:
        return self.dom_wires & self.cod_wires


def layer(d: Diagram, lower: Iterable[int], upper: Iterable[int]) -> Layer:
    L, M = frozenset(lower), frozenset(upper)
    if not L <= M:
        raise DiagramError("lower level is not contained in upper level")
    cl, cm = cut(d, L), cut(d, M)
    inner = M - L
    pinned = frozenset((s, t) for t, s in d.wiring.items()
                       if s[0] in inner and t[0] in inner)
    return Layer(d, L, M, inner, pinned, cl, cm)


def extract(d: Diagram, nodes: Iterable[int], dom_wires: Sequence[Wire],
            cod_wires: Sequence[Wire]) -> Diagram:
    """Anchor the subgraph on ``nodes`` with the given boundary wire orders."""
    keep = sorted(set(nodes))
    local = {x: i for i, x in enumerate(keep)}
    dom_index = {w: i for i, w in enumerate(dom_wires)}
    wiring = {}
    for x in keep:
        for i in range(len(d.types[x][0])):
            s = d.wiring[(x, i)]
            if s[0] != BOUNDARY and s[0] in local:
                wiring[(local[x], i)] = (local[s[0]], s[1])
            else:
                wiring[(local[x], i)] = (BOUNDARY, dom_index[(s, (x, i))])
    for j, (s, t) in enumerate(cod_wires):
        if s[0] != BOUNDARY and s[0] in local:
            wiring[(BOUNDARY, j)] = (local[s[0]], s[1])
        else:
            wiring[(BOUNDARY, j)] = (BOUNDARY, dom_index[(s, t)])
    return Diagram(d.sig, tuple(d.nodes[x] for x in keep),
                   tuple(d.source_letter(s) for s, _ in dom_wires),
                   tuple(d.target_letter(t) for _, t in cod_wires), wiring)


def layer_diagram(ly: Layer, dom_order: Sequence[Wire] | None = None,
                  cod_order: Sequence[Wire] | None = None) -> Diagram:
    return extract(ly.parent, ly.nodes,
                   dom_order if dom_order is not None else cut_order(ly.dom_wires),
                   cod_order if cod_order is not None else cut_order(ly.cod_wires))


def boundary_wires(d: Diagram) -> Tuple[List[Wire], List[Wire]]:
    """Domain wires in domain order and codomain wires in codomain order."""
    dw = [((BOUNDARY, i), d.targets[(BOUNDARY, i)]) for i in range(len(d.dom))]
    cw = [(d.wiring[(BOUNDARY, j)], (BOUNDARY, j)) for j in range(len(d.cod))]
    return dw, cw


def factor_through_layers(d: Diagram, lower: Iterable[int], upper: Iterable[int]):
    """Split ``d`` into (bottom, middle, top) along the levels ``lower <= upper``."""
    L, M = frozenset(lower), frozenset(upper)
    ly = layer(d, L, M)
    everything = frozenset(range(len(d.nodes)))
    dw, cw = boundary_wires(d)
    lo, hi = cut_order(ly.dom_wires), cut_order(ly.cod_wires)
    bottom = extract(d, L, dw, lo)
    middle = extract(d, M - L, lo, hi)
    top = extract(d, everything - M, hi, cw)
    return bottom, middle, top


# ----------------------------------------------------------------------
# substitution of nodes by diagrams

def substitute(d: Diagram, sig: Signature, letter_map: Mapping[str, Word],
               node_map) -> Diagram:
    """Replace every node by a diagram and every wire by a bundle of wires.

    ``letter_map`` sends each letter to a word of ``sig``; ``node_map`` is a
    callable returning, for a node value, a diagram over ``sig`` whose
    domain and codomain are the expanded input and output words.
    """
    def expand(ws):
        out = []
        for a in ws:
            out.extend(letter_map[a])
        return tuple(out)

    def offsets(ws):
        offs, k = [], 0
        for a in ws:
            offs.append(k)
            k += len(letter_map[a])
        return offs

    repl = []
    base = []
    nodes: List[NodeValue] = []
    for x, v in enumerate(d.nodes):
        r = node_map(v)
        ins, outs = d.types[x]
        if r.dom != expand(ins) or r.cod != expand(outs):
            raise DiagramError(f"replacement for {v} has the wrong boundary")
        repl.append(r)
        base.append(len(nodes))
        nodes.extend(r.nodes)
    dom_off, cod_off = offsets(d.dom), offsets(d.cod)
    in_off = [offsets(t[0]) for t in d.types]
    out_off = [offsets(t[1]) for t in d.types]

    def resolve(x: int, p: Port) -> Port:
        # source port p inside replacement x, chased to a real source
        while True:
            if p[0] != BOUNDARY:
                return (p[0] + base[x], p[1])
            # p is a domain port of repl[x]: find the old input and copy
            k = p[1]
            ins = d.types[x][0]
            i = max(i for i in range(len(ins)) if in_off[x][i] <= k)
            copy = k - in_off[x][i]
            s = d.wiring[(x, i)]
            if s[0] == BOUNDARY:
                return (BOUNDARY, dom_off[s[1]] + copy)
            x = s[0]
            p = repl[x].wiring[(BOUNDARY, out_off[x][s[1]] + copy)]

    wiring = {}
    for x, r in enumerate(repl):
        for t, s in r.wiring.items():
            if t[0] != BOUNDARY:
                wiring[(t[0] + base[x], t[1])] = resolve(x, s)
    for j in range(len(d.cod)):
        s = d.wiring[(BOUNDARY, j)]
        for copy in range(len(letter_map[d.cod[j]])):
            tgt = (BOUNDARY, cod_off[j] + copy)
            if s[0] == BOUNDARY:
                wiring[tgt] = (BOUNDARY, dom_off[s[1]] + copy)
            else:
                x = s[0]
                wiring[tgt] = resolve(
                    x, repl[x].wiring[(BOUNDARY, out_off[x][s[1]] + copy)])
    return Diagram(sig, tuple(nodes), expand(d.dom), expand(d.cod), wiring)


def relabel(d: Diagram, sig: Signature, letters: Mapping[str, str],
            gens: Mapping[str, str]) -> Diagram:
    """Rename letters and generators node by node (a strict signature map)."""
    def rename(v):
        if isinstance(v, Gen):
            return Gen(gens[v.name])
        return type(v)(letters[v.letter])

    out = Diagram(sig, tuple(rename(v) for v in d.nodes),
                  tuple(letters[a] for a in d.dom),
                  tuple(letters[a] for a in d.cod), dict(d.wiring))
    for x, v in enumerate(d.nodes):
        ins, outs = d.types[x]
        if out.types[x] != (tuple(letters[a] for a in ins),
                            tuple(letters[a] for a in outs)):
            raise DiagramError(f"shape mismatch renaming {v}")
    return out
