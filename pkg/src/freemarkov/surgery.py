"""Normal subgraphs, template matching and surgery on anchored diagrams."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .diagram import (BOUNDARY, Diagram, DiagramError, Wire, certificate,
                      down_closure, layer)


class SurgeryError(ValueError):
    pass


@dataclass(frozen=True)
class SubDiagram:
    parent: Diagram
    nodes: FrozenSet[int]
    wires: FrozenSet[Wire]

    @classmethod
    def around(cls, parent: Diagram, nodes: Iterable[int],
               loose: Iterable[Wire] = ()) -> "SubDiagram":
        """The nodes with every incident wire, plus extra loose wires."""
        ns = frozenset(nodes)
        ws = {(s, t) for t, s in parent.wiring.items()
              if s[0] in ns or t[0] in ns}
        ws.update(loose)
        return cls(parent, ns, frozenset(ws))

    def is_loose(self, w: Wire) -> bool:
        s, t = w
        return s[0] not in self.nodes and t[0] not in self.nodes

    @property
    def loose(self) -> FrozenSet[Wire]:
        return frozenset(w for w in self.wires if self.is_loose(w))

    def flat(self) -> "SubDiagram":
        return SubDiagram(self.parent, self.nodes, self.wires - self.loose)


def _mask(xs: Iterable[int]) -> int:
    m = 0
    for x in xs:
        m |= 1 << x
    return m


def _before(d: Diagram, e: Wire, f: Wire) -> bool:
    """Some directed path runs through ``e`` and later through ``f``."""
    a, b = e[1][0], f[0][0]
    if a == BOUNDARY or b == BOUNDARY:
        return False
    return d.leq(a, b)


def is_normal(s: SubDiagram) -> bool:
    d = s.parent
    # every port of a chosen node is covered
    for x in s.nodes:
        ins, outs = d.types[x]
        for i in range(len(ins)):
            if (d.wiring[(x, i)], (x, i)) not in s.wires:
                return False
        for j in range(len(outs)):
            if ((x, j), d.targets[(x, j)]) not in s.wires:
                return False
    # convexity: paths between chosen nodes stay inside
    inside = _mask(s.nodes)
    below = above = 0
    for x in s.nodes:
        below |= d.descendants[x]
        above |= d.ancestors[x]
    if below & above & ~inside:
        return False
    # no directed path meets a loose wire and another chosen wire
    loose = [w for w in s.wires if s.is_loose(w)]
    for e in loose:
        for f in s.wires:
            if f != e and (_before(d, e, f) or _before(d, f, e)):
                return False
    return True


def sharp_layer(s: SubDiagram) -> Tuple[FrozenSet[int], FrozenSet[int]]:
    """Levels ``(L, M)`` of the layer enclosing a normal subgraph."""
    if not is_normal(s):
        raise SurgeryError("subgraph is not normal")
    d = s.parent
    loose_src = [w[0][0] for w in s.wires
                 if s.is_loose(w) and w[0][0] != BOUNDARY]
    under_loose = down_closure(d, loose_src)
    strictly_below = set()
    for y in s.nodes:
        m, x = d.ancestors[y], 0
        while m:
            if m & 1 and x not in s.nodes:
                strictly_below.add(x)
            m >>= 1
            x += 1
    L = frozenset(strictly_below) | under_loose
    M = down_closure(d, s.nodes) | under_loose
    return L, M


@dataclass(frozen=True)
class Template:
    """Surgery template ``omega / lam`` with boundary bijections.

    ``alpha[i]`` is the domain port of ``omega`` matched with domain port
    ``i`` of ``lam``; likewise ``beta`` for codomains.
    """

    name: str
    omega: Diagram
    lam: Diagram
    alpha: Tuple[int, ...]
    beta: Tuple[int, ...]

    def __post_init__(self):
        o, l = self.omega, self.lam
        if (sorted(self.alpha) != list(range(len(o.dom)))
                or sorted(self.beta) != list(range(len(o.cod)))
                or len(self.alpha) != len(l.dom) or len(self.beta) != len(l.cod)):
            raise SurgeryError(f"template {self.name}: boundary maps are not bijections")
        if any(l.dom[i] != o.dom[a] for i, a in enumerate(self.alpha)) or any(
                l.cod[j] != o.cod[b] for j, b in enumerate(self.beta)):
            raise SurgeryError(f"template {self.name}: boundary maps change letters")

    def reversed(self, name: Optional[str] = None) -> "Template":
        inv_a = [0] * len(self.alpha)
        for i, a in enumerate(self.alpha):
            inv_a[a] = i
        inv_b = [0] * len(self.beta)
        for j, b in enumerate(self.beta):
            inv_b[b] = j
        return Template(name or self.name + "^-1", self.lam, self.omega,
                        tuple(inv_a), tuple(inv_b))

    @property
    def is_empty(self) -> bool:
        return (not self.omega.nodes and not self.omega.dom and not self.omega.cod
                and not self.lam.nodes and not self.lam.dom and not self.lam.cod)


def empty_template(sig) -> Template:
    e = Diagram(sig, (), (), (), {})
    return Template("empty", e, e, (), ())


@dataclass(frozen=True)
class Match:
    """An embedding of a template's ``omega`` into ``target``."""

    target: Diagram
    node_map: Tuple[int, ...]
    dom_wires: Tuple[Wire, ...]
    cod_wires: Tuple[Wire, ...]

    def image(self) -> SubDiagram:
        loose = [w for w in self.dom_wires if w in set(self.cod_wires)]
        return SubDiagram.around(self.target, self.node_map, loose)


def _omega_plan(omega: Diagram, target: Diagram) -> List[int]:
    """Order omega nodes so that each is reached by wiring when possible."""
    order: List[int] = []
    placed: Set[int] = set()
    remaining = set(range(len(omega.nodes)))
    while remaining:
        start = min(remaining, key=lambda x: (len(target.by_value.get(omega.nodes[x], ())), x))
        queue = deque([start])
        placed.add(start)
        while queue:
            x = queue.popleft()
            order.append(x)
            remaining.discard(x)
            ins, outs = omega.types[x]
            nbrs = [omega.wiring[(x, i)][0] for i in range(len(ins))]
            nbrs += [omega.targets[(x, j)][0] for j in range(len(outs))]
            for y in nbrs:
                if y != BOUNDARY and y not in placed:
                    placed.add(y)
                    queue.append(y)
    return order


def _node_maps(omega: Diagram, target: Diagram):
    order = _omega_plan(omega, target)
    phi: Dict[int, int] = {}
    used: Set[int] = set()

    def candidates(x):
        # follow a wire from an already placed neighbour when there is one
        ins, outs = omega.types[x]
        for i in range(len(ins)):
            s = omega.wiring[(x, i)]
            if s[0] != BOUNDARY and s[0] in phi:
                t = target.targets.get((phi[s[0]], s[1]))
                return [t[0]] if t[1] == i and t[0] != BOUNDARY else []
        for j in range(len(outs)):
            t = omega.targets[(x, j)]
            if t[0] != BOUNDARY and t[0] in phi:
                s = target.wiring[(phi[t[0]], t[1])]
                return [s[0]] if s[1] == j and s[0] != BOUNDARY else []
        return target.by_value.get(omega.nodes[x], [])

    def consistent(x, y):
        if target.nodes[y] != omega.nodes[x] or y in used:
            return False
        ins, outs = omega.types[x]
        for i in range(len(ins)):
            s = omega.wiring[(x, i)]
            if s[0] != BOUNDARY and s[0] in phi:
                if target.wiring[(y, i)] != (phi[s[0]], s[1]):
                    return False
        for j in range(len(outs)):
            t = omega.targets[(x, j)]
            if t[0] != BOUNDARY and t[0] in phi:
                if target.targets[(y, j)] != (phi[t[0]], t[1]):
                    return False
        return True

    def rec(k):
        if k == len(order):
            yield dict(phi)
            return
        x = order[k]
        for y in candidates(x):
            if consistent(x, y):
                phi[x] = y
                used.add(y)
                yield from rec(k + 1)
                del phi[x]
                used.discard(y)

    yield from rec(0)


def find_matches(d: Diagram, t: Template) -> List[Match]:
    """All embeddings of ``t.omega`` onto normal subgraphs of ``d``."""
    omega = t.omega
    if omega.sig != d.sig:
        raise SurgeryError("signature mismatch")
    out: List[Match] = []
    seen = set()
    all_wires = sorted(d.wires)
    for phi in _node_maps(omega, d):
        img = set(phi.values())
        dom_w: List[Optional[Wire]] = [None] * len(omega.dom)
        cod_w: List[Optional[Wire]] = [None] * len(omega.cod)
        ok = True
        loose_pairs = []
        for i in range(len(omega.dom)):
            tgt = omega.targets[(BOUNDARY, i)]
            if tgt[0] == BOUNDARY:
                loose_pairs.append((i, tgt[1]))
                continue
            tp = (phi[tgt[0]], tgt[1])
            sp = d.wiring[tp]
            if sp[0] != BOUNDARY and sp[0] in img:
                ok = False
                break
            dom_w[i] = (sp, tp)
        if not ok:
            continue
        for j in range(len(omega.cod)):
            src = omega.wiring[(BOUNDARY, j)]
            if src[0] == BOUNDARY:
                continue
            sp = (phi[src[0]], src[1])
            tp = d.targets[sp]
            if tp[0] != BOUNDARY and tp[0] in img:
                ok = False
                break
            cod_w[j] = (sp, tp)
        if not ok:
            continue
        taken = {w for w in dom_w if w} | {w for w in cod_w if w}
        free = [w for w in all_wires if w[0][0] not in img and w[1][0] not in img
                and w not in taken]

        def assign(k, chosen):
            if k == len(loose_pairs):
                yield list(chosen)
                return
            i, j = loose_pairs[k]
            letter = omega.dom[i]
            for w in free:
                if w not in chosen and d.source_letter(w[0]) == letter:
                    chosen.append(w)
                    yield from assign(k + 1, chosen)
                    chosen.pop()

        for chosen in assign(0, []):
            dw, cw = list(dom_w), list(cod_w)
            for (i, j), w in zip(loose_pairs, chosen):
                dw[i] = w
                cw[j] = w
            m = Match(d, tuple(phi[x] for x in range(len(omega.nodes))),
                      tuple(dw), tuple(cw))
            key = (m.node_map, m.dom_wires, m.cod_wires)
            if key in seen:
                continue
            seen.add(key)
            if is_normal(m.image()):
                out.append(m)
    return out


def apply_surgery(d: Diagram, m: Match, t: Template) -> Diagram:
    """Graft ``t.lam`` in place of the matched copy of ``t.omega``."""
    omega, lam = t.omega, t.lam
    if m.target is not d or len(m.node_map) != len(omega.nodes):
        raise SurgeryError("inconsistent match")
    img = set(m.node_map)
    if len(img) != len(m.node_map):
        raise SurgeryError("inconsistent match: node map is not injective")
    removed = {w for w in m.image().wires}
    keep = [x for x in range(len(d.nodes)) if x not in img]
    new_id = {x: i for i, x in enumerate(keep)}
    base = len(keep)

    def old(p):
        return p if p[0] == BOUNDARY else (new_id[p[0]], p[1])

    wiring = {}
    for tp, sp in d.wiring.items():
        if (sp, tp) in removed:
            continue
        wiring[old(tp)] = old(sp)
    for tp, sp in lam.wiring.items():
        if sp[0] == BOUNDARY:
            src = old(m.dom_wires[t.alpha[sp[1]]][0])
        else:
            src = (sp[0] + base, sp[1])
        if tp[0] == BOUNDARY:
            tgt = old(m.cod_wires[t.beta[tp[1]]][1])
        else:
            tgt = (tp[0] + base, tp[1])
        wiring[tgt] = src
    return Diagram(d.sig, tuple(d.nodes[x] for x in keep) + lam.nodes,
                   d.dom, d.cod, wiring)


def grafted_match(d: Diagram, m: Match, t: Template, result: Diagram) -> Match:
    """The match of ``t.lam`` inside ``apply_surgery(d, m, t)``.

    Node ids of the grafted copy are appended after the surviving nodes,
    which makes the site of the reversed surgery explicit.
    """
    lam = t.lam
    base = len(result.nodes) - len(lam.nodes)
    keep = [x for x in range(len(d.nodes)) if x not in set(m.node_map)]
    new_id = {x: i for i, x in enumerate(keep)}

    def old(p):
        return p if p[0] == BOUNDARY else (new_id[p[0]], p[1])

    dom_w = []
    for i in range(len(lam.dom)):
        tp = lam.targets[(BOUNDARY, i)]
        src = old(m.dom_wires[t.alpha[i]][0])
        if tp[0] == BOUNDARY:
            dom_w.append((src, old(m.cod_wires[t.beta[tp[1]]][1])))
        else:
            dom_w.append((src, (tp[0] + base, tp[1])))
    cod_w = []
    for j in range(len(lam.cod)):
        sp = lam.wiring[(BOUNDARY, j)]
        tgt = old(m.cod_wires[t.beta[j]][1])
        if sp[0] == BOUNDARY:
            cod_w.append((old(m.dom_wires[t.alpha[sp[1]]][0]), tgt))
        else:
            cod_w.append(((sp[0] + base, sp[1]), tgt))
    return Match(result, tuple(range(base, base + len(lam.nodes))),
                 tuple(dom_w), tuple(cod_w))


def check_symmetric(templates: Sequence[Template]):
    keys = {_template_key(t) for t in templates}
    for t in templates:
        if _template_key(t.reversed()) not in keys:
            raise SurgeryError(f"template set is not symmetric: {t.name}")
    if not any(t.is_empty for t in templates):
        raise SurgeryError("template set lacks the empty template")


def _template_key(t: Template):
    return (certificate(t.omega), certificate(t.lam), t.alpha, t.beta)


def neighbours(d: Diagram, templates: Sequence[Template]) -> List[Diagram]:
    out = []
    for t in templates:
        if t.is_empty:
            continue
        for m in find_matches(d, t):
            out.append(apply_surgery(d, m, t))
    return out


@dataclass
class Ball:
    """Iso classes reached from a diagram by at most ``radius`` surgeries."""

    seen: Dict[tuple, int] = field(default_factory=dict)
    frontier: List[Diagram] = field(default_factory=list)
    radius: int = 0
    truncated: bool = False

    @property
    def closed(self) -> bool:
        return not self.frontier and not self.truncated


def grow(ball: Ball, templates: Sequence[Template], width: int):
    nxt: List[Diagram] = []
    for d in ball.frontier:
        for e in neighbours(d, templates):
            c = certificate(e)
            if c in ball.seen:
                continue
            if len(nxt) >= width:
                ball.truncated = True
                continue
            ball.seen[c] = ball.radius + 1
            nxt.append(e)
    ball.frontier = nxt
    ball.radius += 1


def ball(d: Diagram, templates: Sequence[Template], radius: int,
         width: int = 10_000) -> Ball:
    b = Ball({certificate(d): 0}, [d])
    for _ in range(radius):
        if not b.frontier:
            break
        grow(b, templates, width)
    return b


def equivalent_bfs(d1: Diagram, d2: Diagram, templates: Sequence[Template],
                   depth: int = 6, width: int = 10_000,
                   check: bool = True) -> Optional[bool]:
    """Bounded search for a chain of surgeries from ``d1`` to ``d2``.

    Returns True when one is found, False when the reachable classes of one
    side are exhausted without meeting, and None when the bounds run out.
    The search grows balls around both ends, which is equivalent to a
    one-sided search of the same total depth because every surgery can be
    reversed by a surgery with the reversed template.  Pass ``check=False``
    to skip the symmetry check of a template set already validated.
    """
    if check:
        check_symmetric(templates)
    if d1.dom != d2.dom or d1.cod != d2.cod or d1.sig != d2.sig:
        return False
    a = Ball({certificate(d1): 0}, [d1])
    b = Ball({certificate(d2): 0}, [d2])
    if a.seen.keys() & b.seen.keys():
        return True
    while a.radius + b.radius < depth:
        if a.closed or b.closed:
            return False
        side = a if (len(a.frontier) <= len(b.frontier) or not b.frontier) else b
        if not side.frontier:
            side = b if side is a else a
        grow(side, templates, width)
        if a.seen.keys() & b.seen.keys():
            return True
    if a.closed or b.closed:
        return False
    return None
