"""Sweeps that exercise the decision procedure against its defining data.

Each sweep returns a small report dataclass; the acceptance tests and the
experiment scripts only format these reports.
"""
from __future__ import annotations

import hashlib
import itertools
import random
import time
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

from .causal import (Refinement, cau, causal_effect, check_cond_preserve, effect_spec,
                     intervene, mechanism_name, preimage_word, refine)
from .corpus import all_homs, random_diagram, singular_variables
from .diagram import (BOUNDARY, Diagram, DiagramError, Disc, Dup, Gen, Wire, atom, certificate, compose,
                      compose_all,
                      cut, cut_order, down_closure, factor_through_layers, identity,
                      isomorphic, permutation, relabel, symmetry, tensor, tensor_all, well_formed)
from .effects import (EffectError, EffectSpec, _effect_with_components, effect,
                      multiplier_singular, restrict_dag, split_point)
from .markov import (canonical_certificate, disc_word, dup_word, equivalent,
                     is_markov_minimal, markov_congruent, normalize)
from .signature import DagHom, OrderedDag, Signature, compose_homs
from .dot import to_dot
from .syntax import ParseError, elaborate, parse_term, print_term
from .surgery import (Match, Template, apply_surgery, check_symmetric, equivalent_bfs,
                      find_matches, grafted_match, is_normal, neighbours, sharp_layer)


@dataclass
class OracleReport:
    diagrams: int = 0
    pairs: int = 0
    conclusive: int = 0
    inconclusive: int = 0
    disagreements: List[Tuple[Diagram, Diagram, Optional[bool], bool]] = field(default_factory=list)
    seconds: float = 0.0


def oracle_sweep(diagrams: Sequence[Diagram], templates: Sequence[Template],
                 depth: int = 6, width: int = 10_000) -> OracleReport:
    """Compare ``equivalent`` with the surgery oracle around every diagram.

    Two families of pairs are compared for each diagram ``d``: ``d`` against
    its normal form, decided by a full bounded search, and ``d`` against
    each one-step surgery neighbour, which the search certifies after one
    expansion.  The verdict of the decision procedure is the equality of
    canonical certificates.
    """
    check_symmetric(templates)
    rep = OracleReport()
    start = time.perf_counter()
    for d in diagrams:
        rep.diagrams += 1
        c = canonical_certificate(d)
        nf = normalize(d)
        verdict = equivalent_bfs(d, nf, templates, depth, width, check=False)
        same = canonical_certificate(nf) == c
        rep.pairs += 1
        if verdict is None:
            rep.inconclusive += 1
        else:
            rep.conclusive += 1
            if verdict != same:
                rep.disagreements.append((d, nf, verdict, same))
        for e in neighbours(d, templates):
            rep.pairs += 1
            rep.conclusive += 1
            if canonical_certificate(e) != c:
                rep.disagreements.append((d, e, True, False))
    rep.seconds = time.perf_counter() - start
    return rep


@dataclass
class NormalizationReport:
    diagrams: int = 0
    failures: List[Tuple[str, Diagram]] = field(default_factory=list)
    seconds: float = 0.0


def normalization_check(d: Diagram, rng: random.Random) -> Optional[str]:
    """Name of the first violated normalization property, if any."""
    try:
        nf = normalize(d)
    except RuntimeError:
        return "termination"
    if nf.dom != d.dom or nf.cod != d.cod or well_formed(nf):
        return "boundary"
    if not is_markov_minimal(nf):
        return "minimality"
    if not markov_congruent(normalize(nf), nf):
        return "idempotence"
    a = normalize(d, random.Random(rng.random()))
    b = normalize(d, random.Random(rng.random()))
    if not (is_markov_minimal(a) and is_markov_minimal(b) and markov_congruent(a, b)):
        return "confluence"
    return None


def normalization_sweep(diagrams: Sequence[Diagram], seed: int = 0) -> NormalizationReport:
    rng = random.Random(seed)
    rep = NormalizationReport()
    start = time.perf_counter()
    for d in diagrams:
        rep.diagrams += 1
        bad = normalization_check(d, rng)
        if bad:
            rep.failures.append((bad, d))
    rep.seconds = time.perf_counter() - start
    return rep


def layer_match(d: Diagram, m: Match, lower, upper, middle: Diagram) -> Match:
    """Transport a match into the middle layer produced by factor_through_layers."""
    inner = sorted(set(upper) - set(lower))
    local = {x: i for i, x in enumerate(inner)}
    lo = cut_order(cut(d, lower))
    hi = cut_order(cut(d, upper))

    def tr(w: Wire) -> Wire:
        s, t = w
        s2 = (local[s[0]], s[1]) if s[0] in local else (BOUNDARY, lo.index(w))
        t2 = (local[t[0]], t[1]) if t[0] in local else (BOUNDARY, hi.index(w))
        return s2, t2

    return Match(middle, tuple(local[x] for x in m.node_map),
                 tuple(map(tr, m.dom_wires)), tuple(map(tr, m.cod_wires)))


@dataclass
class SurgeryTrial:
    template: str
    boundary: bool
    reversible: bool
    layered: bool

    @property
    def ok(self) -> bool:
        return self.boundary and self.reversible and self.layered


def surgery_trial(d: Diagram, m: Match, t: Template) -> SurgeryTrial:
    r = apply_surgery(d, m, t)
    boundary = r.dom == d.dom and r.cod == d.cod and not well_formed(r)
    back_site = grafted_match(d, m, t, r)
    rev = t.reversed()
    reversible = (is_normal(back_site.image())
                  and isomorphic(apply_surgery(r, back_site, rev), d))
    L, M = sharp_layer(m.image())
    bottom, middle, top = factor_through_layers(d, L, M)
    layered = (set(M) - set(L) == set(m.node_map)
               and isomorphic(compose(top, compose(middle, bottom)), d))
    if layered:
        mm = layer_match(d, m, L, M, middle)
        layered = (is_normal(mm.image()) and isomorphic(
            compose(top, compose(apply_surgery(middle, mm, t), bottom)), r))
    return SurgeryTrial(t.name, boundary, reversible, layered)


@dataclass
class SurgeryReport:
    trials: List[SurgeryTrial] = field(default_factory=list)
    attempts: int = 0
    seconds: float = 0.0

    @property
    def failures(self) -> List[SurgeryTrial]:
        return [x for x in self.trials if not x.ok]


def surgery_sweep(sig: Signature, templates: Sequence[Template], n: int,
                  max_nodes: int = 8, seed: int = 0) -> SurgeryReport:
    """``n`` random (diagram, match, template) triples with a nonempty template."""
    rng = random.Random(seed)
    usable = [t for t in templates if not t.is_empty]
    rep = SurgeryReport()
    start = time.perf_counter()
    while len(rep.trials) < n:
        rep.attempts += 1
        d = random_diagram(sig, rng, max_nodes)
        t = rng.choice(usable)
        ms = find_matches(d, t)
        if ms:
            rep.trials.append(surgery_trial(d, rng.choice(ms), t))
    rep.seconds = time.perf_counter() - start
    return rep


# ----------------------------------------------------------------------
# Markov laws

@dataclass
class Law:
    name: str
    lhs: Diagram
    rhs: Diagram


@dataclass
class LawReport:
    checked: int = 0
    failures: List[str] = field(default_factory=list)
    seconds: float = 0.0


def _flat_dup(sig: Signature, w) -> Diagram:
    """``w -> w w`` as parallel duplicates followed by one permutation."""
    n = len(w)
    perm = [2 * j for j in range(n)] + [2 * j + 1 for j in range(n)]
    dups = tensor_all(sig, [atom(sig, Dup(a)) for a in w])
    return compose(permutation(sig, dups.cod, perm), dups)


def words_up_to(letters: Sequence[str], n: int):
    for k in range(n + 1):
        yield from itertools.product(letters, repeat=k)


def markov_laws(sig: Signature, max_len: int = 4) -> Iterator[Law]:
    """Every instance of the comonoid, monoidality and discard laws.

    The comonoid laws are stated for every word, which covers the letters;
    the monoidality laws are stated for every split of every word against
    a duplicate assembled letter by letter.
    """
    for w in words_up_to(sig.letters, max_len):
        tag = " ".join(w) or "()"
        one = identity(sig, w)
        d, e = dup_word(sig, w), disc_word(sig, w)
        yield Law(f"coassociativity[{tag}]", compose(tensor(d, one), d),
                  compose(tensor(one, d), d))
        yield Law(f"counit-left[{tag}]", compose(tensor(e, one), d), one)
        yield Law(f"counit-right[{tag}]", compose(tensor(one, e), d), one)
        yield Law(f"cocommutativity[{tag}]", compose(symmetry(sig, w, w), d), d)
        yield Law(f"dup-flat[{tag}]", d, _flat_dup(sig, w))
        for k in range(len(w) + 1):
            u, v = w[:k], w[k:]
            mid = tensor_all(sig, [identity(sig, u), symmetry(sig, u, v), identity(sig, v)])
            yield Law(f"dup-tensor[{' '.join(u) or '()'}|{' '.join(v) or '()'}]",
                      _flat_dup(sig, w),
                      compose(mid, tensor(_flat_dup(sig, u), _flat_dup(sig, v))))
            yield Law(f"disc-tensor[{' '.join(u) or '()'}|{' '.join(v) or '()'}]",
                      tensor_all(sig, [atom(sig, Disc(a)) for a in w]),
                      tensor(disc_word(sig, u), disc_word(sig, v)))
    for name, dom, cod in sig.generators:
        yield Law(f"discard-natural[{name}]",
                  compose(disc_word(sig, cod), atom(sig, Gen(name))), disc_word(sig, dom))


def law_suite(laws: Iterable[Law]) -> LawReport:
    rep = LawReport()
    start = time.perf_counter()
    for law in laws:
        rep.checked += 1
        if not equivalent(law.lhs, law.rhs):
            rep.failures.append(law.name)
    rep.seconds = time.perf_counter() - start
    return rep


# ----------------------------------------------------------------------
# effects

def star_dags(max_leaves: int) -> Iterator[OrderedDag]:
    """Out-stars ``v1 -> leaves`` and in-stars ``leaves -> last``."""
    for n in range(1, max_leaves + 1):
        vs = tuple(f"v{i + 1}" for i in range(n + 1))
        yield OrderedDag(vs, frozenset((vs[0], x) for x in vs[1:]))
        yield OrderedDag(vs, frozenset((x, vs[-1]) for x in vs[:-1]))


def height(dag: OrderedDag) -> int:
    depth: Dict[str, int] = {}
    for v in dag.vertices:
        depth[v] = max((depth[p] + 1 for p in dag.parents(v)), default=0)
    return max(depth.values(), default=0)


def height_one_form(spec: EffectSpec) -> Diagram:
    """Closed form of an effect whose restricted graph has height at most one.

    Exogenous mechanisms run first, beside the identity on ``w_S``; a
    single multiplier then feeds every target that is not computed by a
    mechanism with inputs, and the parents of those that are; the
    remaining mechanisms run in parallel and a final permutation restores
    the order of ``T``.
    """
    g = restrict_dag(spec)
    if height(g) > 1:
        raise EffectError("restricted graph has height above one")
    S, T = spec.dag.sort(spec.S), spec.dag.sort(spec.T)
    inner = [v for v in g.vertices if v not in spec.S]
    exo = [v for v in inner if not g.parents(v)]
    star = [v for v in T if v not in spec.S and g.parents(v)]
    direct = [v for v in T if v not in star]
    sig = spec.sig
    val = spec.value

    def mech(v):
        return atom(sig, Gen(spec.mechanisms[v]))

    first = tensor(tensor_all(sig, [mech(v) for v in exo]),
                   identity(sig, [val[v] for v in S]))
    feeds = [val[v] for v in direct] + [val[p] for v in star for p in g.parents(v)]
    spread = multiplier_singular(sig, first.cod, feeds)
    last = tensor(identity(sig, [val[v] for v in direct]),
                  tensor_all(sig, [mech(v) for v in star]))
    order = direct + star
    perm = permutation(sig, last.cod, [order.index(v) for v in T])
    return compose_all([first, spread, last, perm])


@dataclass
class EffectReport:
    checked: int = 0
    failures: List[str] = field(default_factory=list)
    seconds: float = 0.0


def height_one_suite(dags: Iterable[OrderedDag]) -> EffectReport:
    """Compare ``effect`` with the closed form for every (S, T) on each DAG."""
    rep = EffectReport()
    start = time.perf_counter()
    for dag in dags:
        model = cau(dag)
        for S in singular_variables(dag):
            for T in singular_variables(dag):
                spec = effect_spec(model, S, T)
                rep.checked += 1
                if not equivalent(effect(spec), height_one_form(spec)):
                    rep.failures.append(f"{dag!s} S={S} T={T}".replace("\n", "; "))
    rep.seconds = time.perf_counter() - start
    return rep


class _EffectCache:
    """Effects and their certificates, keyed by (S, T), for one DAG."""

    def __init__(self):
        self.store: Dict[tuple, Tuple[Diagram, str]] = {}

    def get(self, spec: EffectSpec) -> Tuple[Diagram, str]:
        key = (spec.dag, spec.S, spec.T)
        if key not in self.store:
            d = effect(spec)
            self.store[key] = (d, canonical_certificate(d))
        return self.store[key]


def split_point_check(spec: EffectSpec, i: str, cache: Optional[_EffectCache] = None
                      ) -> Optional[str]:
    """Name of the first failed clause of the split property at ``i``, if any."""
    cache = cache or _EffectCache()
    g = restrict_dag(spec)
    Ti, lower, upper = split_point(spec, i)
    if i not in Ti:
        return "i not in T_i"
    if set(g.children(i)) & set(restrict_dag(lower).vertices):
        return "child of i below the cut"
    whole, whole_cert = cache.get(spec)
    lo_eff, lo_cert = cache.get(lower)
    up_eff, _ = cache.get(upper)
    if canonical_certificate(compose(up_eff, lo_eff)) != whole_cert:
        return "factorization"
    _, _, mech = _effect_with_components(spec)
    level = down_closure(whole, [mech[i]])
    low, _, high = factor_through_layers(whole, level, level)
    # the cut may carry several copies of one variable; a multiplier from
    # w_{T_i} accounts for whichever comb the construction chose
    names = {spec.value[v]: v for v in spec.dag.vertices}
    if {names[a] for a in low.cod} != set(Ti):
        return "cut letters differ from T_i"
    if low.cod == lo_eff.cod:
        if canonical_certificate(low) != lo_cert:
            return "lower layer"
        if not equivalent(high, up_eff):
            return "upper layer"
        return None
    spread = multiplier_singular(spec.sig, lower.word(Ti), low.cod)
    if not equivalent(low, compose(spread, lo_eff)):
        return "lower layer"
    if not equivalent(compose(high, spread), up_eff):
        return "upper layer"
    return None


def split_point_suite(instances: Iterable[Tuple[EffectSpec, str]]) -> EffectReport:
    rep = EffectReport()
    start = time.perf_counter()
    cache, dag = _EffectCache(), None
    for spec, i in instances:
        if spec.dag is not dag:
            cache, dag = _EffectCache(), spec.dag
        rep.checked += 1
        bad = split_point_check(spec, i, cache)
        if bad:
            rep.failures.append(f"{bad}: S={sorted(spec.S)} T={sorted(spec.T)} i={i} "
                                f"arrows={sorted(spec.dag.arrows)}")
    rep.seconds = time.perf_counter() - start
    return rep


def admissible_vertices(spec: EffectSpec) -> List[str]:
    """Vertices of the restricted graph outside ``S``."""
    return [v for v in restrict_dag(spec).vertices if v not in spec.S]


def split_point_instances(dags: Iterable[OrderedDag], pairs=None
                          ) -> Iterator[Tuple[EffectSpec, str]]:
    """(spec, i) for each DAG, each (S, T) and each admissible ``i``.

    ``pairs`` maps a DAG to the (S, T) pairs to use; by default every pair
    of vertex subsets.
    """
    for dag in dags:
        model = cau(dag)
        chosen = pairs(dag) if pairs else (
            (S, T) for S in singular_variables(dag) for T in singular_variables(dag))
        for S, T in chosen:
            spec = effect_spec(model, S, T)
            for i in admissible_vertices(spec):
                yield spec, i


def split_point_family(dag: OrderedDag) -> List[Tuple[Tuple[str, ...], Tuple[str, ...]]]:
    """A fixed spread of (S, T) pairs for DAGs too large for every pair.

    Sources are taken from nothing, the first vertex, or every parentless
    vertex; targets are everything outside the sources, the sinks, the
    last vertex, or the middle and last vertices.
    """
    vs = dag.vertices
    roots = tuple(v for v in vs if not dag.parents(v))
    sinks = tuple(v for v in vs if not dag.children(v))
    out = []
    for S in dict.fromkeys([(), vs[:1], roots]):
        for T in dict.fromkeys([tuple(v for v in vs if v not in S), sinks, vs[-1:],
                                dag.sort({vs[len(vs) // 2], vs[-1]})]):
            out.append((S, T))
    return out


# ----------------------------------------------------------------------
# causal models

@dataclass
class CausalReport:
    instances: int = 0
    checked: int = 0
    failures: List[str] = field(default_factory=list)
    seconds: float = 0.0


def _intervened_term(dag: OrderedDag, v: str, u: str) -> str:
    """Expected image of the mechanism of ``u`` after intervening at ``v``, as text."""
    k = f"gen {mechanism_name(u)}"
    if u != v:
        return k
    return " * ".join([f"disc {p}" for p in dag.parents(u)] + [k])


def intervention_suite(dags: Iterable[OrderedDag]) -> CausalReport:
    """Intervene at every vertex and compare each mechanism's image.

    The intervened vertex must become exogenous beside discards on its old
    parents; every other mechanism is unchanged.  Expected images are
    written as terms and elaborated, independently of the library's own
    construction.
    """
    rep = CausalReport()
    start = time.perf_counter()
    for dag in dags:
        model = cau(dag)
        for v in dag.vertices:
            target, r = intervene(model, (v,))
            rep.instances += 1
            for u in dag.vertices:
                rep.checked += 1
                want = elaborate(parse_term(_intervened_term(dag, v, u)), target.sig)
                if not equivalent(r(model.mechanism(u)), want):
                    rep.failures.append(f"at {v}, mechanism of {u}, arrows {sorted(dag.arrows)}")
    rep.seconds = time.perf_counter() - start
    return rep


@dataclass(frozen=True)
class LocalProblem:
    """A cond-preserve instance cut down to the vertices both sides can see.

    ``G`` keeps the restricted graph of (S, T) and ``H`` keeps the preimage
    of its vertices; arrows into (the preimage of) ``S`` are dropped because
    no mechanism there is ever used.  Vertices are positions, named
    ``v1 ..`` when materialized.
    """

    g_size: int
    g_arrows: Tuple[Tuple[int, int], ...]
    h_arrows: Tuple[Tuple[int, int], ...]
    vmap: Tuple[int, ...]
    S: Tuple[int, ...]
    T: Tuple[int, ...]

    def materialize(self) -> Tuple[Refinement, Tuple[str, ...], Tuple[str, ...]]:
        gv = tuple(f"v{i + 1}" for i in range(self.g_size))
        hv = tuple(f"v{i + 1}" for i in range(len(self.vmap)))
        G = OrderedDag(gv, frozenset((gv[a], gv[b]) for a, b in self.g_arrows))
        H = OrderedDag(hv, frozenset((hv[a], hv[b]) for a, b in self.h_arrows))
        hom = DagHom(H, G, tuple((hv[i], gv[k]) for i, k in enumerate(self.vmap)))
        return (Refinement.of(hom), tuple(gv[i] for i in self.S),
                tuple(gv[i] for i in self.T))


def restricted_groups(G: OrderedDag):
    """Group the (S, T) pairs of ``G`` by S and the restricted vertex set U.

    Each group carries the G side of the local problem: U's positions, the
    arrows kept among U, S as positions, and the list of (T, T positions).
    """
    model = cau(G)
    groups: Dict[tuple, tuple] = {}
    for S in singular_variables(G):
        for T in singular_variables(G):
            U = restrict_dag(effect_spec(model, S, T)).vertices
            if (U, S) not in groups:
                uidx = {v: i for i, v in enumerate(U)}
                g_arrows = tuple(sorted((uidx[a], uidx[b]) for a, b in G.arrows
                                        if a in uidx and b in uidx and b not in S))
                groups[(U, S)] = (uidx, g_arrows, tuple(uidx[v] for v in S), [])
            uidx = groups[(U, S)][0]
            groups[(U, S)][3].append((T, tuple(uidx[v] for v in T)))
    return groups


def local_problems(phi: DagHom, U, S, group) -> Iterator[Tuple[tuple, tuple]]:
    """(T, local problem as a tuple) for each target of one group."""
    uidx, g_arrows, s_idx, targets = group
    m = phi.mapping
    P = [h for h in phi.source.vertices if m[h] in uidx]
    pidx = {h: i for i, h in enumerate(P)}
    h_arrows = tuple(sorted((pidx[a], pidx[b]) for a, b in phi.source.arrows
                            if a in pidx and b in pidx and m[b] not in S))
    vmap = tuple(uidx[m[h]] for h in P)
    head = (len(U), g_arrows, h_arrows, vmap, s_idx)
    for T, t_idx in targets:
        yield T, head + (t_idx,)


def cond_preserve_problems(dags: Sequence[OrderedDag]):
    """Distinct local problems over every hom between the DAGs, with counts.

    Returns ``(problems, instances)`` where ``problems`` maps each local
    problem to one full instance ``(phi, S, T)`` that reduces to it.
    """
    seen: Dict[tuple, tuple] = {}
    instances = 0
    for G in dags:
        groups = restricted_groups(G)
        for H in dags:
            for phi in all_homs(H, G):
                for (U, S), group in groups.items():
                    instances += len(group[3])
                    for T, key in local_problems(phi, U, S, group):
                        if key not in seen:
                            seen[key] = (phi, S, T)
    return {LocalProblem(*k): v for k, v in seen.items()}, instances


def _effect_sides(r: Refinement, S, T) -> Tuple[Diagram, Diagram]:
    return (refine(r, causal_effect(r.source_model, S, T)),
            causal_effect(r.target_model, preimage_word(r, S), preimage_word(r, T)))


def reduction_agrees(phi: DagHom, S, T) -> bool:
    """Both sides of a full instance against those of its local problem.

    The local problem's sides are renamed back into the source model, which
    fails outright if they mention a mechanism whose type was cut down.
    """
    G = phi.target
    groups = restricted_groups(G)
    U = restrict_dag(effect_spec(cau(G), S, T)).vertices
    key = dict(local_problems(phi, U, S, groups[(U, S)]))[tuple(T)]
    r, S2, T2 = LocalProblem(*key).materialize()
    P = [h for h in phi.source.vertices if phi.mapping[h] in U]
    letters = {f"v{i + 1}": h for i, h in enumerate(P)}
    gens = {mechanism_name(a): mechanism_name(h) for a, h in letters.items()}
    sig = cau(phi.source).sig
    full = _effect_sides(Refinement.of(phi), S, T)
    try:
        local = [relabel(d, sig, letters, gens) for d in _effect_sides(r, S2, T2)]
    except DiagramError:
        return False
    return all(isomorphic(a, b) for a, b in zip(full, local))


def cond_preserve_suite(problems: Iterable[LocalProblem]) -> CausalReport:
    rep = CausalReport()
    start = time.perf_counter()
    for p in problems:
        rep.checked += 1
        r, S, T = p.materialize()
        if not check_cond_preserve(r, S, T):
            rep.failures.append(repr(p))
    rep.seconds = time.perf_counter() - start
    return rep


@dataclass
class FunctorialityPlan:
    """Representatives for every (psi, phi, generator) check of a DAG suite.

    A mechanism check at ``v`` equals the cond-preserve problem of ``psi``
    at (phi^-1 pa v, phi^-1 v), so it is keyed by that local problem.  The
    identity, duplicate and discard checks depend only on the sizes of the
    fibres of ``psi`` over phi^-1 v, which is their key.
    """

    mechanisms: Dict[tuple, tuple] = field(default_factory=dict)
    structural: Dict[tuple, tuple] = field(default_factory=dict)
    pairs: int = 0
    checks: int = 0


def functoriality_plan(dags: Sequence[OrderedDag]) -> FunctorialityPlan:
    plan = FunctorialityPlan()
    into: Dict[OrderedDag, List[DagHom]] = {B: [] for B in dags}
    out_of: Dict[OrderedDag, List[DagHom]] = {B: [] for B in dags}
    for A in dags:
        for B in dags:
            for h in all_homs(A, B):
                into[B].append(h)
                out_of[A].append(h)
    for B in dags:
        pairs_st: Dict[tuple, tuple] = {}
        blocks: Dict[tuple, tuple] = {}
        for phi in out_of[B]:
            for v in phi.target.vertices:
                S = phi.source.sort(u for p in phi.target.parents(v)
                                    for u in phi.preimage(p))
                T = phi.preimage(v)
                pairs_st.setdefault((S, T), (phi, v))
                blocks.setdefault(T, (phi, v))
        n_gen = sum(4 * len(phi.target.vertices) for phi in out_of[B])
        plan.pairs += len(into[B]) * len(out_of[B])
        plan.checks += len(into[B]) * n_gen
        # group the (S, T) pairs the way the cond-preserve enumeration does
        model = cau(B)
        groups: Dict[tuple, tuple] = {}
        for (S, T), rep in pairs_st.items():
            U = restrict_dag(effect_spec(model, S, T)).vertices
            if (U, S) not in groups:
                uidx = {x: i for i, x in enumerate(U)}
                g_arrows = tuple(sorted((uidx[a], uidx[b]) for a, b in B.arrows
                                        if a in uidx and b in uidx and b not in S))
                groups[(U, S)] = (uidx, g_arrows, tuple(uidx[x] for x in S), [], {})
            g = groups[(U, S)]
            g[3].append((T, tuple(g[0][x] for x in T)))
            g[4][T] = rep
        for psi in into[B]:
            for (U, S), g in groups.items():
                for T, key in local_problems(psi, U, S, g[:4]):
                    if key not in plan.mechanisms:
                        phi, v = g[4][T]
                        plan.mechanisms[key] = (psi, phi, v)
            for T, (phi, v) in blocks.items():
                key = tuple(len(psi.preimage(b)) for b in T)
                if key not in plan.structural:
                    plan.structural[key] = (psi, phi, v)
    return plan


def functorial_at(psi: DagHom, phi: DagHom, g: Diagram) -> bool:
    """``psi* phi* g`` against ``(phi psi)* g`` for one generator ``g``."""
    once = Refinement.of(compose_homs(phi, psi))
    return equivalent(refine(Refinement.of(psi), refine(Refinement.of(phi), g)),
                      refine(once, g))


def functoriality_suite(plan: FunctorialityPlan) -> CausalReport:
    rep = CausalReport(instances=plan.checks)
    start = time.perf_counter()
    for psi, phi, v in plan.mechanisms.values():
        rep.checked += 1
        if not functorial_at(psi, phi, cau(phi.target).mechanism(v)):
            rep.failures.append(f"mechanism of {v}: psi={psi.vmap} phi={phi.vmap}")
    for psi, phi, v in plan.structural.values():
        sig = cau(phi.target).sig
        for name, g in (("id", identity(sig, (v,))), ("dup", atom(sig, Dup(v))),
                        ("disc", atom(sig, Disc(v)))):
            rep.checked += 1
            if not functorial_at(psi, phi, g):
                rep.failures.append(f"{name} of {v}: psi={psi.vmap} phi={phi.vmap}")
    rep.seconds = time.perf_counter() - start
    return rep


# ----------------------------------------------------------------------
# text and DOT

@dataclass
class RoundTripReport:
    diagrams: int = 0
    failures: List[Tuple[str, str]] = field(default_factory=list)
    seconds: float = 0.0


def roundtrip_check(d: Diagram) -> Optional[str]:
    text = print_term(d)
    try:
        once = elaborate(parse_term(text), d.sig)
    except ParseError as e:
        return f"reparse failed: {e}"
    c = certificate(d)
    if certificate(once) != c:
        return "parse(print(d)) differs from d"
    # parsing is deterministic, so a textually stable print is a fixpoint
    text2 = print_term(once)
    if text2 != text and certificate(elaborate(parse_term(text2), d.sig)) != c:
        return "second round trip differs"
    return None


def roundtrip_suite(diagrams: Iterable[Diagram]) -> RoundTripReport:
    rep = RoundTripReport()
    start = time.perf_counter()
    for d in diagrams:
        rep.diagrams += 1
        bad = roundtrip_check(d)
        if bad:
            rep.failures.append((bad, print_term(d)))
    rep.seconds = time.perf_counter() - start
    return rep


def dot_digest(diagrams: Iterable[Diagram]) -> str:
    h = hashlib.sha256()
    for d in diagrams:
        h.update(to_dot(d).encode("utf-8"))
    return h.hexdigest()


def random_corpus(sig: Signature, n: int, max_nodes: int, seed: int = 0) -> List[Diagram]:
    rng = random.Random(seed)
    return [random_diagram(sig, rng, max_nodes) for _ in range(n)]
