"""The syntactic causal category of an ordered DAG and its refinements."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Sequence, Tuple

from .diagram import Diagram, Disc, Dup, Gen, atom, compose, identity, substitute, tensor
from .effects import EffectSpec, effect, twist
from .markov import disc_word, dup_word, equivalent
from .signature import (DagHom, OrderedDag, Signature, SignatureError, Word,
                        compose_homs, is_singular, word)


def mechanism_name(v: str) -> str:
    return f"k_{v}"


@dataclass(frozen=True)
class CausalModel:
    dag: OrderedDag
    sig: Signature

    def mechanism(self, v: str) -> Diagram:
        return atom(self.sig, Gen(mechanism_name(v)))

    def generators(self):
        """Every generator of the free Markov category: 1_v, disc, dup, mechanism."""
        for v in self.dag.vertices:
            yield f"id:{v}", identity(self.sig, (v,))
            yield f"disc:{v}", atom(self.sig, Disc(v))
            yield f"dup:{v}", atom(self.sig, Dup(v))
            yield f"gen:{mechanism_name(v)}", self.mechanism(v)


@lru_cache(maxsize=None)
def cau(dag: OrderedDag) -> CausalModel:
    gens = {mechanism_name(v): (dag.parents(v), (v,)) for v in dag.vertices}
    return CausalModel(dag, Signature.build(dag.vertices, gens))


def effect_spec(model: CausalModel, S, T) -> EffectSpec:
    vs = model.dag.vertices
    return EffectSpec(model.sig, model.dag, {v: v for v in vs},
                      {v: mechanism_name(v) for v in vs},
                      frozenset(S), frozenset(T))


def causal_effect(model: CausalModel, v: Sequence[str], w: Sequence[str]) -> Diagram:
    """The causal effect ``[w || v]``; words not in vertex order are twisted."""
    return _causal_effect(model, word(v), word(w))


@lru_cache(maxsize=1 << 16)
def _causal_effect(model: CausalModel, v: Word, w: Word) -> Diagram:
    for x in (v, w):
        if not is_singular(x):
            raise SignatureError(f"variable {' '.join(x)} is not singular")
        model.sig.check_word(x)
    spec = effect_spec(model, v, w)
    e = effect(spec)
    if e.dom == v and e.cod == w:
        return e
    return twist(e, v, w, spec)


@dataclass(frozen=True)
class Refinement:
    """The strict Markov functor Cau(G) -> Cau(H) along ``hom : H -> G``."""

    hom: DagHom
    source_model: CausalModel
    target_model: CausalModel

    @classmethod
    def of(cls, hom: DagHom) -> "Refinement":
        return cls(hom, cau(hom.target), cau(hom.source))

    def __call__(self, d: Diagram) -> Diagram:
        return refine(self, d)


def preimage_word(r: Refinement, v: Sequence[str]) -> Word:
    out = []
    for a in word(v):
        out.extend(r.hom.preimage(a))
    return tuple(out)


def refine(r: Refinement, d: Diagram) -> Diagram:
    if d.sig != r.source_model.sig:
        raise SignatureError("diagram is not valued in the source model")
    G = r.source_model.dag
    H = r.target_model
    letters = {v: preimage_word(r, (v,)) for v in G.vertices}
    cache: Dict[object, Diagram] = {}

    def image(value):
        if value not in cache:
            if isinstance(value, Dup):
                cache[value] = dup_word(H.sig, letters[value.letter])
            elif isinstance(value, Disc):
                cache[value] = disc_word(H.sig, letters[value.letter])
            else:
                v = value.name[len("k_"):]
                cache[value] = causal_effect(H, preimage_word(r, G.parents(v)),
                                             letters[v])
        return cache[value]

    return substitute(d, H.sig, letters, image)


def intervene(model: CausalModel, v: Sequence[str]) -> Tuple[CausalModel, Refinement]:
    """Cut the arrows into ``v`` and return the model with its refinement."""
    v = word(v)
    if not is_singular(v):
        raise SignatureError(f"variable {' '.join(v)} is not singular")
    model.sig.check_word(v)
    cut_dag = model.dag.without_incoming(v)
    target = cau(cut_dag)
    hom = DagHom(cut_dag, model.dag, tuple((x, x) for x in model.dag.vertices))
    return target, Refinement(hom, model, target)


def intervention_image(model: CausalModel, u: str) -> Diagram:
    """The expected image of a mechanism at an intervened vertex.

    The mechanism of ``u`` is replaced by an exogenous one, tensored with
    discards on the old parents.
    """
    target, _ = intervene(model, (u,))
    return tensor(disc_word(target.sig, model.dag.parents(u)), target.mechanism(u))


def check_cond_preserve(r: Refinement, v: Sequence[str], w: Sequence[str]) -> bool:
    lhs = refine(r, causal_effect(r.source_model, v, w))
    rhs = causal_effect(r.target_model, preimage_word(r, v), preimage_word(r, w))
    return equivalent(lhs, rhs)


def check_functoriality(psi: DagHom, phi: DagHom) -> bool:
    """``psi* . phi*`` agrees with ``(phi . psi)*`` on every generator."""
    composite = compose_homs(phi, psi)
    r_phi, r_psi = Refinement.of(phi), Refinement.of(psi)
    r_comp = Refinement.of(composite)
    for _, g in r_phi.source_model.generators():
        if not equivalent(refine(r_psi, refine(r_phi, g)), refine(r_comp, g)):
            return False
    return True
