import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from freemarkov.corpus import enumerate_diagrams, orbit_representatives, random_diagram
from freemarkov.diagram import (BOUNDARY, Diagram, DiagramError, Disc, Dup, Gen, atom,
                                certificate, compose, cut, down_closure,
                                factor_through_layers, identity, is_level, isomorphic,
                                layer, layer_diagram, node_poset, relabel,
                                symmetry, tensor, well_formed)
from freemarkov.signature import Signature

from conftest import SWAP
from strategies import SIG, chains, diagrams

SIG4 = Signature.build("a b c x y z", {"f": ("a", "b"), "g": ("b", "c"),
                                       "h": ("x", "y"), "k": ("y", "z")})


def gen(name, sig=SIG4):
    return atom(sig, Gen(name))


def chain_fg():
    return compose(gen("g"), gen("f"))


def test_identity_and_atom():
    d = identity(SIG4, ("a", "b"))
    assert d.nodes == () and d.dom == d.cod == ("a", "b")
    assert not well_formed(d)
    dup = atom(SIG4, Dup("a"))
    assert dup.dom == ("a",) and dup.cod == ("a", "a")


def test_well_formed_reports_problems():
    bad = Diagram(SIG4, (Gen("f"),), ("a",), ("b",), {(0, 0): (BOUNDARY, 0)})
    assert any("dangling" in p for p in well_formed(bad))
    wrong = Diagram(SIG4, (Gen("f"),), ("a",), ("a",),
                    {(0, 0): (BOUNDARY, 0), (BOUNDARY, 0): (0, 0)})
    assert any("letter mismatch" in p for p in well_formed(wrong))
    with pytest.raises(DiagramError):
        wrong.validate()


def test_compose_checks_boundary():
    with pytest.raises(DiagramError, match="boundary mismatch"):
        compose(gen("f"), gen("f"))


def test_symmetry_is_an_involution():
    s = compose(symmetry(SIG4, "b", "a"), symmetry(SIG4, "a", "b"))
    assert isomorphic(s, identity(SIG4, ("a", "b")))
    assert symmetry(SIG4, "a", "b").cod == ("b", "a")


def test_interchange():
    f, g, h, k = gen("f"), gen("g"), gen("h"), gen("k")
    assert isomorphic(compose(tensor(g, k), tensor(f, h)),
                      tensor(compose(g, f), compose(k, h)))


def test_dup_differs_from_swapped_dup_as_a_diagram():
    d = atom(SIG4, Dup("a"))
    swapped = compose(symmetry(SIG4, "a", "a"), d)
    assert not isomorphic(d, swapped)
    # the two wirings of the prongs are the only ones, and they differ
    assert len({certificate(d), certificate(swapped)}) == 2


def test_node_poset():
    assert node_poset(identity(SIG4, "a b")) == {}
    po = node_poset(chain_fg())
    pairs = {(x, y) for x, ys in po.items() for y in ys if x != y}
    assert pairs == {(0, 1)}
    two = tensor(chain_fg(), compose(gen("k"), gen("h")))
    pairs = {(x, y) for x, ys in node_poset(two).items() for y in ys if x != y}
    assert pairs == {(0, 1), (2, 3)}


def test_cuts():
    d = chain_fg()
    assert cut(d, ()) == {((BOUNDARY, 0), (0, 0))}
    assert cut(d, (0, 1)) == {((1, 0), (BOUNDARY, 0))}
    assert cut(d, (0,)) == {((0, 0), (1, 0))}
    with pytest.raises(DiagramError, match="not a level"):
        cut(d, (1,))


def test_layers():
    d = chain_fg()
    whole = layer(d, (), (0, 1))
    assert isomorphic(layer_diagram(whole), d)
    empty = layer(d, (0,), (0,))
    assert empty.nodes == frozenset() and empty.loose == {((0, 0), (1, 0))}
    top = layer(d, (0,), (0, 1))
    assert isomorphic(layer_diagram(top), gen("g"))
    with pytest.raises(DiagramError):
        layer(d, (0, 1), (0,))


def test_factor_examples():
    d = chain_fg()
    bottom, middle, top = factor_through_layers(d, (), ())
    assert isomorphic(bottom, identity(SIG4, "a"))
    assert isomorphic(middle, identity(SIG4, "a"))
    assert isomorphic(top, d)
    _, middle, _ = factor_through_layers(d, (0,), (0,))
    assert isomorphic(middle, identity(SIG4, "b"))


def _levels(d):
    n = len(d.nodes)
    return [frozenset(c) for r in range(n + 1) for c in itertools.combinations(range(n), r)
            if is_level(d, c)]


def test_factor_recomposes_exhaustively():
    sig = Signature.build("a b", {"f": ("a", "b"), "g": ("b", "a")})
    # the letter swap is an automorphism, so one diagram per orbit suffices
    for d in orbit_representatives(enumerate_diagrams(sig, 4), [SWAP]):
        levels = _levels(d)
        for L in levels:
            for M in levels:
                if L <= M:
                    b, m, t = factor_through_layers(d, L, M)
                    assert isomorphic(compose(t, compose(m, b)), d)


def _maximal_paths(d):
    """Maximal directed paths as lists of wires."""
    wires = d.wires
    out_of = {}
    for s, t in wires:
        out_of.setdefault(s[0], []).append((s, t))

    def starts(w):
        s = w[0]
        return s[0] == BOUNDARY or not d.types[s[0]][0]

    def extend(path):
        t = path[-1][1]
        nxt = [] if t[0] == BOUNDARY else out_of.get(t[0], [])
        if not nxt:
            yield path
        for w in nxt:
            yield from extend(path + [w])

    for w in wires:
        if starts(w):
            yield from extend([w])


@settings(max_examples=150, deadline=None)
@given(diagrams(), st.integers(0, 2 ** 16))
def test_cut_meets_every_crossing_path_once(d, seed):
    rng = random.Random(seed)
    L = down_closure(d, rng.sample(range(len(d.nodes)), rng.randint(0, len(d.nodes))))
    wires = cut(d, L)

    def inside(p):
        return p[0] == BOUNDARY or p[0] in L

    for path in _maximal_paths(d):
        crosses = inside(path[0][0]) and not (path[-1][1][0] != BOUNDARY
                                              and path[-1][1][0] in L)
        assert sum(w in wires for w in path) == (1 if crosses else 0)


@settings(max_examples=150, deadline=None)
@given(chains(3))
def test_compose_is_associative(ds):
    f, g, h = ds
    assert isomorphic(compose(h, compose(g, f)), compose(compose(h, g), f))


@settings(max_examples=150, deadline=None)
@given(diagrams(), diagrams(), diagrams())
def test_tensor_is_associative_and_unital(f, g, h):
    assert isomorphic(tensor(f, tensor(g, h)), tensor(tensor(f, g), h))
    unit = identity(SIG, ())
    assert isomorphic(tensor(unit, f), f) and isomorphic(tensor(f, unit), f)
    assert isomorphic(compose(identity(SIG, f.cod), f), f)
    assert isomorphic(compose(f, identity(SIG, f.dom)), f)


@settings(max_examples=150, deadline=None)
@given(diagrams(max_nodes=4), diagrams(max_nodes=4))
def test_symmetry_is_natural(f, g):
    lhs = compose(symmetry(SIG, f.cod, g.cod), tensor(f, g))
    rhs = compose(tensor(g, f), symmetry(SIG, f.dom, g.dom))
    assert isomorphic(lhs, rhs)


@settings(max_examples=100, deadline=None)
@given(diagrams(), st.integers(0, 2 ** 16))
def test_isomorphic_ignores_node_numbering(d, seed):
    rng = random.Random(seed)
    order = list(range(len(d.nodes)))
    rng.shuffle(order)
    new = {x: i for i, x in enumerate(order)}

    def r(p):
        return p if p[0] == BOUNDARY else (new[p[0]], p[1])

    shuffled = Diagram(d.sig, tuple(d.nodes[x] for x in order), d.dom, d.cod,
                       {r(t): r(s) for t, s in d.wiring.items()})
    assert isomorphic(d, shuffled)


def test_relabel_swaps_letters():
    sig = Signature.build("a b", {"f": ("a", "b"), "g": ("b", "a")})
    d = compose(atom(sig, Gen("g")), atom(sig, Gen("f")))
    r = relabel(d, sig, {"a": "b", "b": "a"}, {"f": "g", "g": "f"})
    assert r.dom == ("b",) and r.nodes == (Gen("g"), Gen("f"))
    with pytest.raises(DiagramError):
        relabel(d, sig, {"a": "a", "b": "b"}, {"f": "g", "g": "f"})


def test_random_diagrams_are_well_formed():
    rng = random.Random(0)
    for _ in range(300):
        assert not well_formed(random_diagram(SIG, rng, 10))
