import pytest
from hypothesis import given, settings, strategies as st

from freemarkov.audit import surgery_trial
from freemarkov.corpus import enumerate_diagrams, orbit_representatives
from freemarkov.diagram import (BOUNDARY, Diagram, Disc, Dup, Gen, atom, compose,
                                identity, isomorphic, tensor)
from freemarkov.markov import markov_templates
from freemarkov.signature import Signature
from freemarkov.surgery import (SubDiagram, SurgeryError, Template, apply_surgery,
                                check_symmetric, empty_template, equivalent_bfs,
                                find_matches, is_normal, neighbours, sharp_layer)

from conftest import SWAP
from strategies import SIG, diagrams

CH = Signature.build("a b c d", {"f": ("a", "b"), "g": ("b", "c"), "h": ("c", "d")})


def chain():
    f, g, h = (atom(CH, Gen(n)) for n in "fgh")
    return compose(h, compose(g, f))


def counit_omega(sig=CH, a="a"):
    return compose(tensor(identity(sig, a), atom(sig, Disc(a))), atom(sig, Dup(a)))


def counit_template(sig=CH):
    return Template("counit", counit_omega(sig), identity(sig, "a"), (0,), (0,))


def test_whole_diagram_is_normal():
    d = chain()
    whole = SubDiagram.around(d, range(3))
    assert is_normal(whole)
    assert sharp_layer(whole) == (frozenset(), frozenset({0, 1, 2}))


def test_dup_inside_a_chain_is_normal():
    sig = Signature.build("a b", {"f": ("a", "a"), "g": ("a a", "b")})
    d = compose(atom(sig, Gen("g")), compose(atom(sig, Dup("a")), atom(sig, Gen("f"))))
    assert is_normal(SubDiagram.around(d, [1]))


def test_gap_in_a_chain_is_not_normal():
    assert not is_normal(SubDiagram.around(chain(), [0, 2]))


def test_sharp_layer_of_a_middle_node():
    assert sharp_layer(SubDiagram.around(chain(), [1])) == (frozenset({0}), frozenset({0, 1}))


def test_sharp_layer_of_a_loose_wire():
    d = chain()
    e = ((0, 0), (1, 0))
    s = SubDiagram(d, frozenset(), frozenset({e}))
    assert is_normal(s)
    # nodes at or below the source of the loose wire form both levels
    assert sharp_layer(s) == (frozenset({0}), frozenset({0}))


def test_sharp_layer_rejects_non_normal():
    with pytest.raises(SurgeryError):
        sharp_layer(SubDiagram.around(chain(), [0, 2]))


def test_empty_template_matches_once_and_changes_nothing():
    d = chain()
    t = empty_template(CH)
    ms = find_matches(d, t)
    assert len(ms) == 1
    assert isomorphic(apply_surgery(d, ms[0], t), d)


def test_counit_matches():
    t = counit_template()
    d = counit_omega()
    ms = find_matches(d, t)
    assert len(ms) == 1
    assert isomorphic(apply_surgery(d, ms[0], t), identity(CH, "a"))
    assert find_matches(identity(CH, "a"), t) == []


def test_template_with_isomorphic_sides_gives_isomorphic_result():
    o = counit_omega()
    t = Template("same", o, o, (0,), (0,))
    d = compose(atom(CH, Gen("f")), o)
    for m in find_matches(d, t):
        assert isomorphic(apply_surgery(d, m, t), d)


def test_template_boundary_maps_are_checked():
    o = counit_omega()
    with pytest.raises(SurgeryError):
        Template("bad", o, identity(CH, "b"), (0,), (0,))


def test_bfs_examples():
    ts = markov_templates(CH)
    d = chain()
    assert equivalent_bfs(d, d, ts, depth=0) is True
    assert equivalent_bfs(counit_omega(), identity(CH, "a"), ts, depth=1) is True
    assert equivalent_bfs(d, identity(CH, "a"), ts) is False


def test_bfs_needs_a_symmetric_set():
    ts = markov_templates(CH)
    one_way = [t for t in ts if not t.name.endswith("^-1")]
    with pytest.raises(SurgeryError):
        equivalent_bfs(chain(), chain(), one_way)
    check_symmetric(ts)


def test_surgery_properties_exhaustively():
    sig = Signature.build("a b", {"f": ("a", "b"), "g": ("b", "a")})
    ts = [t for t in markov_templates(sig) if not t.is_empty]
    trials = 0
    # the letter swap is an automorphism, so one diagram per orbit suffices
    for d in orbit_representatives(enumerate_diagrams(sig, 4), [SWAP]):
        for t in ts:
            for m in find_matches(d, t):
                trial = surgery_trial(d, m, t)
                assert trial.ok, (d, t.name, trial)
                trials += 1
    assert trials > 5_000


@settings(max_examples=40, deadline=None)
@given(diagrams(max_nodes=4), diagrams(max_nodes=4), st.integers(0, 1000))
def test_surgery_is_a_monoidal_congruence(d1, d2, k):
    ts = markov_templates(SIG)
    n1, n2 = neighbours(d1, ts), neighbours(d2, ts)
    e1 = n1[k % len(n1)] if n1 else d1
    e2 = n2[k % len(n2)] if n2 else d2
    assert equivalent_bfs(tensor(d1, d2), tensor(e1, e2), ts, depth=2)
    if d1.cod == d2.dom:
        assert equivalent_bfs(compose(d2, d1), compose(e2, e1), ts, depth=2)
