"""Small test corpora: exhaustive and random diagrams, ordered DAGs and homs."""
from __future__ import annotations

import itertools
import random
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from .diagram import (BOUNDARY, Diagram, Disc, Dup, Gen, NodeValue, certificate,
                      node_type, relabel)
from .signature import DagHom, OrderedDag, Signature


def node_values(sig: Signature) -> List[NodeValue]:
    vals: List[NodeValue] = []
    for a in sig.letters:
        vals += [Dup(a), Disc(a)]
    vals += [Gen(name) for name, _, _ in sig.generators]
    return vals


def enumerate_diagrams(sig: Signature, max_nodes: int,
                       values: Optional[Sequence[NodeValue]] = None) -> List[Diagram]:
    """Every diagram with at most ``max_nodes`` nodes, up to isomorphism.

    Domain ports are created in order of first use and the codomain lists
    the open wires in order of creation, so the corpus covers all wirings
    up to permutations of the two boundaries.
    """
    values = list(values or node_values(sig))
    types = {v: node_type(sig, v) for v in values}
    found: Dict[tuple, Diagram] = {}

    def emit(nodes, dom, wiring, open_ports):
        w = dict(wiring)
        cod = []
        for j, (p, a) in enumerate(open_ports):
            w[(BOUNDARY, j)] = p
            cod.append(a)
        d = Diagram(sig, tuple(nodes), tuple(dom), tuple(cod), w)
        found.setdefault(certificate(d), d)

    def rec(nodes, dom, wiring, open_ports):
        emit(nodes, dom, wiring, open_ports)
        if len(nodes) == max_nodes:
            return
        x = len(nodes)
        for v in values:
            ins, outs = types[v]
            for choice in _input_choices(ins, open_ports):
                dom2 = list(dom)
                wiring2 = dict(wiring)
                taken = set()
                for i, (src, a) in enumerate(choice):
                    if src is None:
                        src = (BOUNDARY, len(dom2))
                        dom2.append(a)
                    else:
                        taken.add(src)
                    wiring2[(x, i)] = src
                open2 = [(p, a) for p, a in open_ports if p not in taken]
                open2 += [((x, j), a) for j, a in enumerate(outs)]
                rec(nodes + [v], dom2, wiring2, open2)

    rec([], [], {}, [])
    return list(found.values())


def orbit_representatives(diagrams: Sequence[Diagram],
                          renamings: Sequence[Tuple[Mapping[str, str], Mapping[str, str]]]
                          ) -> List[Diagram]:
    """One diagram per orbit under a group of signature automorphisms.

    ``renamings`` lists the non-identity elements as (letter map, generator
    map) pairs; a diagram is kept when its certificate is the least in its
    orbit, compared through ``repr``.
    """
    out = []
    for d in diagrams:
        key = repr(certificate(d))
        if all(key <= repr(certificate(relabel(d, d.sig, lm, gm)))
               for lm, gm in renamings):
            out.append(d)
    return out


def _input_choices(ins, open_ports):
    """For each input letter, either a fresh domain port or a distinct open source."""
    def rec(i, used):
        if i == len(ins):
            yield []
            return
        a = ins[i]
        for rest in rec(i + 1, used):
            yield [(None, a)] + rest
        for p, b in open_ports:
            if b == a and p not in used:
                for rest in rec(i + 1, used | {p}):
                    yield [(p, a)] + rest
    yield from rec(0, frozenset())


def random_diagram(sig: Signature, rng: random.Random, max_nodes: int,
                   values: Optional[Sequence[NodeValue]] = None,
                   loose: float = 0.15) -> Diagram:
    """Random well-formed diagram with a random codomain order."""
    values = list(values or node_values(sig))
    n = rng.randint(0, max_nodes)
    nodes: List[NodeValue] = []
    dom: List[str] = []
    wiring = {}
    open_ports: List[Tuple[tuple, str]] = []
    for _ in range(rng.randint(0, 2)):
        if rng.random() < loose:
            a = rng.choice(sig.letters)
            open_ports.append(((BOUNDARY, len(dom)), a))
            dom.append(a)
    for x in range(n):
        v = rng.choice(values)
        ins, outs = node_type(sig, v)
        for i, a in enumerate(ins):
            cands = [k for k, (_, b) in enumerate(open_ports) if b == a]
            if cands and rng.random() < 0.7:
                p, _ = open_ports.pop(rng.choice(cands))
            else:
                p = (BOUNDARY, len(dom))
                dom.append(a)
            wiring[(x, i)] = p
        nodes.append(v)
        open_ports += [((x, j), a) for j, a in enumerate(outs)]
    rng.shuffle(open_ports)
    cod = []
    for j, (p, a) in enumerate(open_ports):
        wiring[(BOUNDARY, j)] = p
        cod.append(a)
    return Diagram(sig, tuple(nodes), tuple(dom), tuple(cod), wiring)


def all_odags(max_vertices: int, min_vertices: int = 1) -> Iterator[OrderedDag]:
    """Every ordered DAG on ``v1 .. vn`` for ``min_vertices <= n <= max_vertices``."""
    for n in range(min_vertices, max_vertices + 1):
        vs = tuple(f"v{i + 1}" for i in range(n))
        pairs = [(vs[i], vs[j]) for i in range(n) for j in range(i + 1, n)]
        for bits in itertools.product((0, 1), repeat=len(pairs)):
            yield OrderedDag(vs, frozenset(p for p, b in zip(pairs, bits) if b))


def all_homs(source: OrderedDag, target: OrderedDag) -> Iterator[DagHom]:
    """Every order-preserving homomorphism ``source -> target``."""
    m, n = len(source.vertices), len(target.vertices)
    if m and not n:
        return
    for combo in itertools.combinations_with_replacement(range(n), m):
        vmap = {u: target.vertices[k] for u, k in zip(source.vertices, combo)}
        if all(vmap[s] == vmap[t] or (vmap[s], vmap[t]) in target.arrows
               for s, t in source.arrows):
            yield DagHom(source, target, tuple(vmap.items()))


def singular_variables(dag: OrderedDag) -> Iterator[Tuple[str, ...]]:
    """Sub-variables of the vertex word, in vertex order."""
    vs = dag.vertices
    for r in range(len(vs) + 1):
        yield from itertools.combinations(vs, r)
