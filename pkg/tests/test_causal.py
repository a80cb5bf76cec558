import itertools
import random

import pytest

from freemarkov.audit import reduction_agrees
from freemarkov.causal import (Refinement, cau, causal_effect, check_cond_preserve,
                               check_functoriality, intervene, intervention_image,
                               mechanism_name, preimage_word, refine)
from freemarkov.corpus import all_homs, all_odags, singular_variables
from freemarkov.diagram import (Disc, Dup, Gen, atom, compose, identity, isomorphic,
                                tensor)
from freemarkov.markov import disc_word, dup_word, equivalent
from freemarkov.signature import DagHom, OrderedDag, SignatureError

CHAIN2 = OrderedDag.build("v1 v2", [("v1", "v2")])
CHAIN3 = OrderedDag.build("v1 v2 v3", [("v1", "v2"), ("v2", "v3")])
POINT = OrderedDag.build("p")


def k(model, v):
    return model.mechanism(v)


def test_cau_signature():
    m = cau(CHAIN3)
    assert m.sig.letters == ("v1", "v2", "v3")
    assert m.sig.gen_type("k_v2") == (("v1",), ("v2",))
    assert m.sig.gen_type("k_v1") == ((), ("v1",))
    assert mechanism_name("x") == "k_x"
    assert len(list(m.generators())) == 12


def test_causal_effect_examples():
    m = cau(CHAIN3)
    assert isomorphic(causal_effect(m, "v1", "v2"), k(m, "v2"))
    assert isomorphic(causal_effect(m, "", "v3"),
                      compose(k(m, "v3"), compose(k(m, "v2"), k(m, "v1"))))
    assert isomorphic(causal_effect(m, "v2", "v2"), identity(m.sig, "v2"))
    assert isomorphic(causal_effect(m, "v1 v2", ""), disc_word(m.sig, "v1 v2"))


def test_causal_effect_twists_unordered_words():
    m = cau(OrderedDag.build("v1 v2"))
    e = causal_effect(m, "", "v2 v1")
    assert e.cod == ("v2", "v1")
    assert isomorphic(e, tensor(k(m, "v2"), k(m, "v1")))
    with pytest.raises(SignatureError, match="not singular"):
        causal_effect(m, "v1 v1", "v2")


def test_preimage_word():
    H = OrderedDag.build("u1 u2 u3", [("u1", "u3")])
    hom = DagHom.build(H, CHAIN2, {"u1": "v1", "u2": "v1", "u3": "v2"})
    r = Refinement.of(hom)
    assert preimage_word(r, "v2 v1") == ("u3", "u1", "u2")
    assert preimage_word(r, "") == ()


def test_identity_refinement_is_the_identity():
    r = Refinement.of(DagHom.identity(CHAIN3))
    for _, g in r.source_model.generators():
        assert isomorphic(refine(r, g), g)


def test_empty_preimage_erases():
    H = OrderedDag.build("u")
    G = OrderedDag.build("v1 v2")
    r = Refinement.of(DagHom.build(H, G, {"u": "v1"}))
    m = r.source_model
    assert refine(r, k(m, "v2")).nodes == ()
    assert refine(r, atom(m.sig, Dup("v2"))).dom == ()
    assert isomorphic(refine(r, k(m, "v1")), k(r.target_model, "u"))


def test_splitting_a_vertex():
    H = OrderedDag.build("u1 u2", [("u1", "u2")])
    r = Refinement.of(DagHom.build(H, POINT, {"u1": "p", "u2": "p"}))
    m, t = r.source_model, r.target_model
    assert isomorphic(refine(r, atom(m.sig, Dup("p"))), dup_word(t.sig, "u1 u2"))
    assert isomorphic(refine(r, atom(m.sig, Disc("p"))), disc_word(t.sig, "u1 u2"))
    # the mechanism of p becomes the joint distribution of its preimage
    assert isomorphic(refine(r, k(m, "p")), causal_effect(t, "", "u1 u2"))


def test_refine_rejects_foreign_diagrams():
    r = Refinement.of(DagHom.identity(CHAIN2))
    with pytest.raises(SignatureError):
        refine(r, k(cau(CHAIN3), "v3"))


def test_intervention_at_a_root_changes_nothing():
    m = cau(CHAIN3)
    target, r = intervene(m, "v1")
    assert target.dag.arrows == CHAIN3.arrows
    for v in CHAIN3.vertices:
        assert isomorphic(r(k(m, v)), k(target, v))


def test_intervention_on_the_chain():
    m = cau(CHAIN2)
    target, r = intervene(m, "v2")
    assert target.dag.arrows == frozenset()
    want = tensor(atom(target.sig, Disc("v1")), k(target, "v2"))
    assert isomorphic(r(k(m, "v2")), want)
    assert isomorphic(intervention_image(m, "v2"), want)
    assert isomorphic(r(k(m, "v1")), k(target, "v1"))


def test_empty_intervention_is_the_identity():
    m = cau(CHAIN3)
    target, r = intervene(m, "")
    assert target.dag == CHAIN3
    with pytest.raises(SignatureError):
        intervene(m, "v1 v1")


def test_cond_preserve_examples():
    H = OrderedDag.build("u1 u2", [("u1", "u2")])
    r = Refinement.of(DagHom.build(H, POINT, {"u1": "p", "u2": "p"}))
    assert check_cond_preserve(r, "", "p")
    assert check_cond_preserve(r, "p", "p")
    _, ri = intervene(cau(CHAIN3), "v2")
    assert check_cond_preserve(ri, "v2", "v3")
    assert check_cond_preserve(ri, "v1", "v3 v2")


def test_cond_preserve_on_small_dags_with_permuted_words():
    dags = list(all_odags(3))
    checked = 0
    for H in dags:
        for G in dags:
            for h in all_homs(H, G):
                r = Refinement.of(h)
                for S in singular_variables(G):
                    rest = [v for v in G.vertices if v not in S]
                    for n in range(len(rest) + 1):
                        for T in itertools.permutations(rest, n):
                            assert check_cond_preserve(r, S, T), (h, S, T)
                            checked += 1
    assert checked > 1000


def test_reduction_agrees_on_a_sample():
    rng = random.Random(3)
    dags = list(all_odags(4))
    pairs = [(H, G) for H in dags for G in dags]
    tried = 0
    while tried < 40:
        H, G = rng.choice(pairs)
        homs = list(all_homs(H, G))
        if not homs:
            continue
        h = rng.choice(homs)
        vs = G.vertices
        S = tuple(v for v in vs if rng.random() < 0.4)
        T = tuple(v for v in vs if v not in S and rng.random() < 0.6)
        assert reduction_agrees(h, S, T), (h, S, T)
        tried += 1


def test_functoriality_examples():
    A = OrderedDag.build("w1 w2 w3", [("w1", "w3")])
    phi = DagHom.build(CHAIN2, POINT, {"v1": "p", "v2": "p"})
    psi = DagHom.build(A, CHAIN2, {"w1": "v1", "w2": "v1", "w3": "v2"})
    assert check_functoriality(psi, phi)
    assert check_functoriality(DagHom.identity(CHAIN2), phi)


def test_functoriality_on_small_dags():
    dags = list(all_odags(3))
    checked = 0
    for A in dags[:4]:
        for B in dags:
            for C in dags:
                for psi in all_homs(A, B):
                    for phi in all_homs(B, C):
                        assert check_functoriality(psi, phi)
                        checked += 1
    assert checked > 100


def test_refinement_preserves_compose_and_tensor():
    H = OrderedDag.build("u1 u2 u3", [("u1", "u2"), ("u1", "u3")])
    r = Refinement.of(DagHom.build(H, CHAIN2, {"u1": "v1", "u2": "v2", "u3": "v2"}))
    m = r.source_model
    d = compose(atom(m.sig, Dup("v2")), k(m, "v2"))
    e = tensor(k(m, "v1"), atom(m.sig, Disc("v2")))
    assert equivalent(r(compose(d, k(m, "v1"))), compose(r(d), r(k(m, "v1"))))
    assert isomorphic(r(tensor(d, e)), tensor(r(d), r(e)))
