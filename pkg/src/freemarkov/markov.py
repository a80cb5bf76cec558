"""Markov templates, normalization and the equality decision procedure.

Two diagrams denote the same morphism of the free Markov category iff their
normal forms have equal congruence certificates.  A normal form is reached
by two reductions applied to fixpoint:

* R1: a duplicate with a discarded prong becomes a plain wire;
* R2: a generator all of whose outputs are discarded (vacuously so when it
  has none) becomes a discard on each of its inputs.

In a Markov minimal diagram every non-terminal node reaches the codomain,
so contracting each tree of duplicates into a single fan-out and walking
backwards from the anchored codomain numbers those nodes canonically.
"""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Set, Tuple

from .diagram import (BOUNDARY, Builder, Diagram, DiagramError, Disc, Dup, Gen,
                      Port, atom, compose, identity, permutation, symmetry,
                      tensor, tensor_all)
from .signature import Signature
from .surgery import Template, empty_template


class NotMinimalError(ValueError):
    pass


# ----------------------------------------------------------------------
# templates

def _dup(sig, a):
    return atom(sig, Dup(a))


def _disc(sig, a):
    return atom(sig, Disc(a))


def dup_word(sig: Signature, w: Sequence[str]) -> Diagram:
    """Interleaved duplicate on a word: ``w -> w w``.

    Built recursively as ``(1_A x sym(A, B) x 1_B) . (dup_A x dup_B)``.
    """
    w = sig.check_word(w)
    if not w:
        return identity(sig, ())
    if len(w) == 1:
        return _dup(sig, w[0])
    head, rest = w[:1], w[1:]
    both = tensor(dup_word(sig, head), dup_word(sig, rest))
    swap = tensor_all(sig, [identity(sig, head), symmetry(sig, head, rest),
                            identity(sig, rest)])
    return compose(swap, both)


def disc_word(sig: Signature, w: Sequence[str]) -> Diagram:
    w = sig.check_word(w)
    return tensor_all(sig, [_disc(sig, a) for a in w])


def markov_templates(sig: Signature) -> List[Template]:
    """The symmetric set of Markov templates, including the empty one."""
    out: List[Template] = []
    for a in sig.letters:
        d, one = _dup(sig, a), identity(sig, (a,))
        left_comb = compose(tensor(d, one), d)
        right_comb = compose(tensor(one, d), d)
        coassoc = Template(f"coassoc[{a}]", left_comb, right_comb, (0,), (0, 1, 2))
        counit_l = Template(f"counit-left[{a}]",
                            compose(tensor(_disc(sig, a), one), d), one, (0,), (0,))
        counit_r = Template(f"counit-right[{a}]",
                            compose(tensor(one, _disc(sig, a)), d), one, (0,), (0,))
        cocomm = Template(f"cocomm[{a}]", d, d, (0,), (1, 0))
        for t in (coassoc, counit_l, counit_r, cocomm):
            out.append(t)
            out.append(t.reversed())
    for name, dom, cod in sig.generators:
        f = atom(sig, Gen(name))
        omega = compose(disc_word(sig, cod), f)
        lam = disc_word(sig, dom)
        t = Template(f"discard[{name}]", omega, lam,
                     tuple(range(len(dom))), ())
        out.append(t)
        out.append(t.reversed())
    out.append(empty_template(sig))
    return out


# ----------------------------------------------------------------------
# quasi-terminal nodes and minimality

def alive_nodes(d: Diagram) -> Set[int]:
    """Nodes with a directed path to the codomain."""
    alive: Set[int] = set()
    stack = [d.wiring[(BOUNDARY, j)][0] for j in range(len(d.cod))]
    while stack:
        x = stack.pop()
        if x == BOUNDARY or x in alive:
            continue
        alive.add(x)
        for i in range(len(d.types[x][0])):
            stack.append(d.wiring[(x, i)][0])
    return alive


def quasi_terminal_set(d: Diagram) -> FrozenSet[int]:
    """Nodes whose forward paths all die (for a duplicate: along one prong)."""
    alive = alive_nodes(d)
    out = set()
    for x, v in enumerate(d.nodes):
        if x not in alive:
            out.add(x)
        elif isinstance(v, Dup):
            for j in (0, 1):
                y = d.targets[(x, j)][0]
                if y != BOUNDARY and y not in alive:
                    out.add(x)
    return frozenset(out)


def is_terminal(d: Diagram, x: int) -> bool:
    return not d.types[x][1]


def is_markov_minimal(d: Diagram) -> bool:
    return all(is_terminal(d, x) for x in quasi_terminal_set(d))


# ----------------------------------------------------------------------
# normalization

class _Work:
    """Mutable copy of a diagram for in-place reductions."""

    def __init__(self, d: Diagram):
        self.d = d
        self.sig = d.sig
        self.nodes: Dict[int, object] = dict(enumerate(d.nodes))
        self.wiring: Dict[Port, Port] = dict(d.wiring)
        self.targets: Dict[Port, Port] = {s: t for t, s in self.wiring.items()}
        self.next_id = len(d.nodes)
        self.types = {x: d.types[x] for x in self.nodes}

    def feeds_disc(self, src: Port) -> Optional[int]:
        t = self.targets[src]
        if t[0] != BOUNDARY and isinstance(self.nodes[t[0]], Disc):
            return t[0]
        return None

    def redexes(self) -> List[Tuple[str, int, int]]:
        out = []
        for x in sorted(self.nodes):
            v = self.nodes[x]
            if isinstance(v, Dup):
                for j in (0, 1):
                    if self.feeds_disc((x, j)) is not None:
                        out.append(("R1", x, j))
            elif isinstance(v, Gen):
                outs = self.types[x][1]
                if all(self.feeds_disc((x, j)) is not None for j in range(len(outs))):
                    out.append(("R2", x, 0))
        return out

    def _link(self, s: Port, t: Port):
        self.wiring[t] = s
        self.targets[s] = t

    def fire(self, rule: str, x: int, j: int):
        if rule == "R1":
            disc = self.targets[(x, j)][0]
            s = self.wiring[(x, 0)]
            t = self.targets[(x, 1 - j)]
            for p in ((x, 0), (disc, 0)):
                del self.wiring[p]
            for p in ((x, 0), (x, 1)):
                del self.targets[p]
            del self.nodes[x], self.nodes[disc]
            self._link(s, t)
            return
        ins, outs = self.types[x]
        discs = [self.targets[(x, k)][0] for k in range(len(outs))]
        srcs = [self.wiring[(x, i)] for i in range(len(ins))]
        for k, z in enumerate(discs):
            del self.wiring[(z, 0)]
            del self.targets[(x, k)]
            del self.nodes[z]
        for i in range(len(ins)):
            del self.wiring[(x, i)]
        del self.nodes[x]
        for i, s in enumerate(srcs):
            z = self.next_id
            self.next_id += 1
            self.nodes[z] = Disc(ins[i])
            self.types[z] = ((ins[i],), ())
            self._link(s, (z, 0))

    def freeze(self) -> Diagram:
        keep = sorted(self.nodes)
        ren = {x: i for i, x in enumerate(keep)}

        def r(p):
            return p if p[0] == BOUNDARY else (ren[p[0]], p[1])

        return Diagram(self.sig, tuple(self.nodes[x] for x in keep),
                       self.d.dom, self.d.cod,
                       {r(t): r(s) for t, s in self.wiring.items()})


def normalize(d: Diagram, rng: Optional[random.Random] = None,
              trace: Optional[list] = None) -> Diagram:
    """Apply R1/R2 until none applies; ``rng`` randomizes the reduction order."""
    w = _Work(d)
    steps = 0
    bound = len(d.nodes)
    while True:
        red = w.redexes()
        if not red:
            if not steps:
                return d
            break
        step = rng.choice(red) if rng is not None else red[0]
        if trace is not None:
            trace.append(step)
        w.fire(*step)
        steps += 1
        if steps > bound:
            raise RuntimeError("normalization failed to terminate")
    return w.freeze()


# ----------------------------------------------------------------------
# congruence forms

@dataclass(frozen=True)
class CongruenceForm:
    """Duplicate trees contracted to unordered fan-outs, canonically numbered.

    ``inputs[k]`` lists, for the ``k``-th canonical node, the canonical
    source reference of each input port; ``bundles`` lists the sources that
    fan out to two or more targets, with the fan-out size.
    """

    dom: Tuple[str, ...]
    cod: Tuple[str, ...]
    values: Tuple[str, ...]
    inputs: Tuple[Tuple[tuple, ...], ...]
    outputs: Tuple[tuple, ...]
    bundles: Tuple[Tuple[tuple, int], ...]
    certificate: str


def _root_source(d: Diagram, s: Port) -> Port:
    while s[0] != BOUNDARY and isinstance(d.nodes[s[0]], Dup):
        s = d.wiring[(s[0], 0)]
    return s


def congruence_form(d: Diagram, check: bool = True) -> CongruenceForm:
    if check and not is_markov_minimal(d):
        raise NotMinimalError("congruence forms need a Markov minimal diagram")
    number: Dict[int, int] = {}
    order: List[int] = []

    def visit(t: Port):
        stack = [t]
        while stack:
            s = _root_source(d, d.wiring[stack.pop()])
            x = s[0]
            if x == BOUNDARY or x in number:
                continue
            number[x] = len(order)
            order.append(x)
            ins = d.types[x][0]
            stack.extend((x, i) for i in reversed(range(len(ins))))

    for j in range(len(d.cod)):
        visit((BOUNDARY, j))

    def ref(s: Port) -> tuple:
        s = _root_source(d, s)
        if s[0] == BOUNDARY:
            return ("d", s[1])
        return ("n", number[s[0]], s[1])

    rest = [x for x in range(len(d.nodes))
            if x not in number and not isinstance(d.nodes[x], Dup)]
    if any(d.types[x][1] for x in rest):
        raise NotMinimalError("a non-terminal node does not reach the codomain")
    keyed = sorted((str(d.nodes[x]),
                    tuple(ref(d.wiring[(x, i)]) for i in range(len(d.types[x][0]))),
                    x) for x in rest)
    for _, _, x in keyed:
        number[x] = len(order)
        order.append(x)
    values = tuple(str(d.nodes[x]) for x in order)
    inputs = tuple(tuple(ref(d.wiring[(x, i)]) for i in range(len(d.types[x][0])))
                   for x in order)
    outputs = tuple(ref(d.wiring[(BOUNDARY, j)]) for j in range(len(d.cod)))
    fan = Counter(r for row in inputs for r in row)
    fan.update(outputs)
    bundles = tuple(sorted((r, k) for r, k in fan.items() if k >= 2))

    def fmt(r):
        return f"d{r[1]}" if r[0] == "d" else f"{r[1]}.{r[2]}"

    cert = "|".join([
        "dom=" + " ".join(d.dom), "cod=" + " ".join(d.cod),
        *(f"{k}:{v}({','.join(map(fmt, ins))})"
          for k, (v, ins) in enumerate(zip(values, inputs))),
        "out(" + ",".join(map(fmt, outputs)) + ")"])
    return CongruenceForm(d.dom, d.cod, values, inputs, outputs, bundles, cert)


def markov_congruent(d1: Diagram, d2: Diagram) -> bool:
    return congruence_form(d1).certificate == congruence_form(d2).certificate


def canonical_certificate(d: Diagram) -> str:
    """Certificate of the Markov class of ``d``."""
    return congruence_form(normalize(d), check=False).certificate


def equivalent(d1: Diagram, d2: Diagram) -> bool:
    """Equality of the denoted morphisms of the free Markov category."""
    if d1.sig != d2.sig:
        raise DiagramError("signature mismatch")
    if d1.dom != d2.dom or d1.cod != d2.cod:
        return False
    return canonical_certificate(d1) == canonical_certificate(d2)


def explain_inequivalence(d1: Diagram, d2: Diagram) -> Optional[str]:
    if d1.dom != d2.dom:
        return "dom words differ"
    if d1.cod != d2.cod:
        return "cod words differ"
    if not equivalent(d1, d2):
        return "normal forms are not Markov congruent"
    return None


# ----------------------------------------------------------------------
# necessary conditions

@dataclass(frozen=True)
class CongruenceInvariants:
    live_values: Tuple[Tuple[str, int], ...]
    paths: Tuple[tuple, ...]
    splitters: Tuple[tuple, ...]


def _gen_step(d: Diagram, x: int, i: int, j: int):
    return (str(d.nodes[x]), i, j)


def _paths_to(d: Diagram, t: Port, memo) -> List[Tuple[tuple, tuple]]:
    """(start, generator steps) of every maximal directed path into ``t``."""
    if t in memo:
        return memo[t]
    s = d.wiring[t]
    if s[0] == BOUNDARY:
        res = [(("d", s[1]), ())]
    else:
        x = s[0]
        ins = d.types[x][0]
        if not ins:
            res = [((str(d.nodes[x]),), ())]
        else:
            res = []
            gen = isinstance(d.nodes[x], Gen)
            for i in range(len(ins)):
                for start, steps in _paths_to(d, (x, i), memo):
                    if gen:
                        steps = steps + (_gen_step(d, x, i, s[1]),)
                    res.append((start, steps))
    memo[t] = res
    return res


def _paths_from(d: Diagram, s: Port, memo) -> List[Tuple[int, tuple]]:
    """(codomain index, generator steps) of directed paths from source ``s``."""
    if s in memo:
        return memo[s]
    t = d.targets[s]
    if t[0] == BOUNDARY:
        res = [(t[1], ())]
    else:
        x = t[0]
        res = []
        gen = isinstance(d.nodes[x], Gen)
        for j in range(len(d.types[x][1])):
            for k, steps in _paths_from(d, (x, j), memo):
                if gen:
                    steps = (_gen_step(d, x, t[1], j),) + steps
                res.append((k, steps))
    memo[s] = res
    return res


def congruence_invariants(d: Diagram) -> CongruenceInvariants:
    """Data preserved by every Markov surgery, used as a quick pre-check."""
    q = quasi_terminal_set(d)
    live = Counter(str(v) for x, v in enumerate(d.nodes) if x not in q)
    memo: dict = {}
    paths = []
    for j in range(len(d.cod)):
        for start, steps in _paths_to(d, (BOUNDARY, j), memo):
            paths.append((start, steps, j))
    fmemo: dict = {}
    splitters = []
    for x, v in enumerate(d.nodes):
        outs = d.types[x][1]
        for p in range(len(outs)):
            for r in range(p + 1, len(outs)):
                for i, si in _paths_from(d, (x, p), fmemo):
                    for k, sk in _paths_from(d, (x, r), fmemo):
                        if isinstance(v, Dup):
                            a, b = sorted([(i, si), (k, sk)])
                            splitters.append((str(v), a, b))
                        elif i < k:
                            splitters.append((str(v), p, r, (i, si), (k, sk)))
                        else:
                            splitters.append((str(v), r, p, (k, sk), (i, si)))
    return CongruenceInvariants(tuple(sorted(live.items())),
                                tuple(sorted(paths, key=repr)),
                                tuple(sorted(splitters, key=repr)))
