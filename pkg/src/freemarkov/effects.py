"""Multipliers and (W, K)-effects over an ordered DAG of mechanisms."""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple

from .diagram import (BOUNDARY, Builder, Diagram, DiagramError, Disc, Dup, Gen,
                      Port, compose, cut, down_closure, relabel)
from .signature import OrderedDag, Signature, Word, is_singular


class EffectError(ValueError):
    pass


def _comb(b: Builder, src: Port, letter: str, m: int) -> List[Port]:
    """Attach a left-comb multiplier to ``src``; return its ``m`` output ports."""
    if m == 0:
        z = b.add(Disc(letter))
        b.connect(src, (z, 0))
        return []
    if m == 1:
        return [src]
    dups = []
    cur = src
    for _ in range(m - 1):
        x = b.add(Dup(letter))
        b.connect(cur, (x, 0))
        dups.append(x)
        cur = (x, 0)
    outs = [(dups[-1], 0), (dups[-1], 1)]
    outs += [(x, 1) for x in reversed(dups[:-1])]
    return outs


def multiplier_power(sig: Signature, a: str, m: int) -> Diagram:
    """The unique multiplier ``a -> a^m``."""
    if m < 0:
        raise EffectError("negative power")
    sig.check_word((a,))
    b = Builder(sig)
    for j, p in enumerate(_comb(b, (BOUNDARY, 0), a, m)):
        b.connect(p, (BOUNDARY, j))
    return b.finish((a,), (a,) * m)


def multiplier_singular(sig: Signature, w: Sequence[str], v: Sequence[str]) -> Diagram:
    """The unique multiplier from a singular word ``w`` to ``v``."""
    w, v = sig.check_word(w), sig.check_word(v)
    if not is_singular(w):
        raise EffectError(f"source word {' '.join(w)} is not singular")
    missing = sorted(set(v) - set(w))
    if missing:
        raise EffectError(f"letters {' '.join(missing)} do not occur in the source")
    b = Builder(sig)
    slots: Dict[str, List[int]] = {}
    for j, a in enumerate(v):
        slots.setdefault(a, []).append(j)
    for i, a in enumerate(w):
        pos = slots.get(a, [])
        for j, p in zip(pos, _comb(b, (BOUNDARY, i), a, len(pos))):
            b.connect(p, (BOUNDARY, j))
    return b.finish(w, v)


@dataclass(frozen=True)
class EffectSpec:
    """Mechanisms over an ordered DAG, with source set ``S`` and target set ``T``.

    Each vertex carries one letter; ``mechanisms[v]`` names a generator from
    the letters of ``v``'s parents (in vertex order) to ``v``'s letter.
    """

    sig: Signature
    dag: OrderedDag
    value: Mapping[str, str]
    mechanisms: Mapping[str, str]
    S: FrozenSet[str]
    T: FrozenSet[str]

    def validate(self) -> "EffectSpec":
        problems = []
        letters = [self.value.get(v) for v in self.dag.vertices]
        if None in letters:
            problems.append("every vertex needs a letter")
        elif len(set(letters)) != len(letters):
            problems.append("vertex letters must be distinct")
        for v in self.dag.vertices:
            if v not in self.mechanisms:
                problems.append(f"vertex {v} has no mechanism")
                continue
            dom, cod = self.sig.gen_type(self.mechanisms[v])
            want = tuple(self.value[p] for p in self.dag.parents(v))
            if dom != want or cod != (self.value[v],):
                problems.append(f"mechanism of {v} has type {dom}->{cod}, "
                                f"expected {want}->({self.value[v]},)")
        if not (self.S | self.T) <= set(self.dag.vertices):
            problems.append("S and T must be sets of vertices")
        if problems:
            raise EffectError("; ".join(problems))
        return self

    def word(self, vs) -> Word:
        return tuple(self.value[v] for v in self.dag.sort(vs))

    def retarget(self, S=None, T=None) -> "EffectSpec":
        return replace(self, S=frozenset(self.S if S is None else S),
                       T=frozenset(self.T if T is None else T))


def restrict_dag(spec: EffectSpec) -> OrderedDag:
    """The graph of directed paths ending in T that never pass through S."""
    dag, S = spec.dag, spec.S
    back = set()
    stack = [t for t in spec.T if t not in S]
    while stack:
        x = stack.pop()
        if x in back:
            continue
        back.add(x)
        stack.extend(p for p in dag.parents(x) if p not in S)
    arrows = {(p, x) for x in back for p in dag.parents(x)}
    verts = set(spec.S) | set(spec.T) | back | {p for p, _ in arrows}
    return OrderedDag(dag.sort(verts), frozenset(arrows))


def _effect_with_components(spec: EffectSpec):
    spec.validate()
    g = restrict_dag(spec)
    S, T = spec.S, spec.T
    b = Builder(spec.sig)
    dom_index = {v: i for i, v in enumerate(spec.dag.sort(S))}
    cod_index = {v: j for j, v in enumerate(spec.dag.sort(T))}
    comps: Dict[str, List[int]] = {}
    outs: Dict[str, List[Port]] = {}
    mech_node: Dict[str, int] = {}
    for v in g.vertices:
        start = len(b.nodes)
        letter = spec.value[v]
        if v in S:
            src = (BOUNDARY, dom_index[v])
        else:
            x = b.add(Gen(spec.mechanisms[v]))
            mech_node[v] = x
            src = (x, 0)
        n_out = len(g.children(v)) + (1 if v in T else 0)
        outs[v] = _comb(b, src, letter, n_out)
        comps[v] = list(range(start, len(b.nodes)))
    # fuse: copies of each vertex go to its children, then to the codomain
    used = {v: 0 for v in g.vertices}
    for v in g.vertices:
        if v in S:
            continue
        for i, p in enumerate(spec.dag.parents(v)):
            b.connect(outs[p][used[p]], (mech_node[v], i))
            used[p] += 1
    for v in g.vertices:
        if v in T:
            b.connect(outs[v][used[v]], (BOUNDARY, cod_index[v]))
            used[v] += 1
        if used[v] != len(outs[v]):
            raise EffectError(f"port accounting failed at {v}")
    d = b.finish(spec.word(S), spec.word(T))
    return d, comps, mech_node


def effect(spec: EffectSpec) -> Diagram:
    """The Markov minimal diagram of the effect of ``w_S`` on ``w_T``."""
    return _effect_with_components(spec)[0]


def twist(e: Diagram, sigma: Sequence[str], tau: Sequence[str],
          spec: EffectSpec) -> Diagram:
    """Reorder the domain as ``sigma`` and the codomain as ``tau``."""
    if sorted(sigma) != sorted(spec.S) or len(set(sigma)) != len(sigma):
        raise EffectError("sigma is not a permutation of S")
    if sorted(tau) != sorted(spec.T) or len(set(tau)) != len(tau):
        raise EffectError("tau is not a permutation of T")
    src = tuple(spec.value[v] for v in sigma)
    tgt = tuple(spec.value[v] for v in tau)
    pre = multiplier_singular(spec.sig, src, e.dom)
    post = multiplier_singular(spec.sig, e.cod, tgt)
    return compose(post, compose(e, pre))


def split_point(spec: EffectSpec, i: str):
    """Factor the effect through the cut just above the mechanism of ``i``.

    Returns ``(T_i, lower, upper)`` where ``lower`` targets ``T_i`` and
    ``upper`` starts from ``T_i``.
    """
    g = restrict_dag(spec)
    if i in spec.S or i not in g.vertices:
        raise EffectError(f"{i} is in S or outside the restricted graph")
    d, comps, mech = _effect_with_components(spec)
    level = down_closure(d, [mech[i]])
    letter_vertex = {spec.value[v]: v for v in spec.dag.vertices}
    Ti = frozenset(letter_vertex[d.source_letter(s)] for s, _ in cut(d, level))
    return Ti, spec.retarget(T=Ti), spec.retarget(S=Ti)


def map_effect(spec: EffectSpec, sig: Signature, letters: Mapping[str, str],
               gens: Mapping[str, str]) -> Diagram:
    """Image of the effect under a strict signature map, node by node."""
    return relabel(effect(spec), sig, letters, gens)


def rename_spec(spec: EffectSpec, sig: Signature, letters: Mapping[str, str],
                gens: Mapping[str, str]) -> EffectSpec:
    return replace(spec, sig=sig,
                   value={v: letters[a] for v, a in spec.value.items()},
                   mechanisms={v: gens[k] for v, k in spec.mechanisms.items()})
