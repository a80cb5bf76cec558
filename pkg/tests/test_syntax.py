import pytest
from hypothesis import given, settings

from freemarkov.diagram import Disc, Dup, Gen, atom, compose, identity, isomorphic, tensor
from freemarkov.dot import to_dot
from freemarkov.signature import OrderedDag, Signature
from freemarkov.syntax import (Comp, Id, ParseError, Sym, Tensor, elaborate,
                               format_signature, named_dag, parse_dag, parse_hom,
                               parse_signature, parse_term, print_term, read_term,
                               term_letters)

from strategies import SIG, diagrams

AB = parse_signature("letters: a b; gen f : a -> b; gen g : b -> a")


def test_parse_shapes():
    t = parse_term("gen f ; dup b * id(a)")
    assert isinstance(t, Comp) and isinstance(t.then, Tensor)
    assert isinstance(parse_term("id()"), Id) and parse_term("id()").word == ()
    s = parse_term("sym(a b, c)")
    assert isinstance(s, Sym) and s.left == ("a", "b") and s.right == ("c",)
    assert term_letters(parse_term("dup a ; sym(a, a) ; disc b")) == ["a", "b"]


def test_composition_reads_left_to_right():
    d = read_term("gen f ; gen g", AB)
    assert d.dom == ("a",) and d.cod == ("a",)
    assert isomorphic(d, compose(atom(AB, Gen("g")), atom(AB, Gen("f"))))


def test_tensor_binds_tighter_than_composition():
    d = read_term("dup a ; gen f * id(a)", AB)
    want = compose(tensor(atom(AB, Gen("f")), identity(AB, "a")), atom(AB, Dup("a")))
    assert isomorphic(d, want)


@pytest.mark.parametrize("src, message", [
    ("gen f ; gen f", "1:7: type error: cod b ≠ dom a"),
    ("dup a ; (gen f * id(a)", "1:23: expected ')', found end of input"),
    ("gen f ; $", "1:9: unexpected character '$'"),
    ("gen f ;\ngen", "2:4: expected name, found end of input"),
    ("gen f )", "1:7: expected end of input, found ')'"),
    ("sym(a b)", "1:8: expected ',', found ')'"),
])
def test_errors_are_located(src, message):
    with pytest.raises(ParseError) as e:
        read_term(src, AB)
    assert str(e.value) == message


def test_unknown_names_are_rejected():
    with pytest.raises((ParseError, ValueError)):
        read_term("gen nope", AB)
    with pytest.raises((ParseError, ValueError)):
        read_term("dup z", AB)


def test_print_examples():
    assert print_term(identity(AB, "a b")) == "id(a b)"
    assert print_term(identity(AB, "")) == "id()"
    d = atom(AB, Disc("a"))
    assert isomorphic(read_term(print_term(d), AB), d)


@settings(max_examples=300, deadline=None)
@given(diagrams(max_nodes=9))
def test_print_then_parse_is_isomorphic(d):
    assert isomorphic(read_term(print_term(d), SIG), d)


def test_signature_format_round_trips():
    sig = parse_signature("letters: a b  # two letters\ngen m : a b -> a\ngen u : -> b")
    assert sig.gen_type("u") == ((), ("b",))
    assert parse_signature(format_signature(sig)) == sig
    with pytest.raises(ParseError):
        parse_signature("letters: a\ngen f a -> a")
    with pytest.raises(ParseError):
        parse_signature("letters: a\ngen f : a -> b")


def test_dag_and_hom_formats():
    dag = parse_dag("vertices: v1 v2 v3\narrow v1 v2\narrow v2 v3")
    assert dag == named_dag("chain3")
    with pytest.raises(ParseError):
        parse_dag("vertices: v1 v2\narrow v2 v1")
    point = parse_dag("vertices: p")
    h = parse_hom("map v1 p; map v2 p; map v3 p", dag, point)
    assert h.preimage("p") == ("v1", "v2", "v3")
    with pytest.raises(ParseError, match="unmapped"):
        parse_hom("map v1 p", dag, point)
    with pytest.raises(ParseError, match="twice"):
        parse_hom("map v1 p; map v1 p", dag, point)


def test_named_dags():
    assert named_dag("star2").arrows == {("v1", "v2"), ("v1", "v3")}
    assert named_dag("discrete3").arrows == frozenset()
    assert named_dag("tree3") is None


def test_dot_labels():
    d = read_term("dup a ; (gen f * disc a)", AB)
    text = to_dot(d)
    for label in ('"dup:a"', '"disc:a"', '"gen:f"', '"d0:a"', '"c0:b"'):
        assert label in text
