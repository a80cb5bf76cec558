"""Hypothesis strategies shared by the property tests."""
import random

from hypothesis import strategies as st

from freemarkov.corpus import random_diagram
from freemarkov.diagram import Disc, Dup, Gen, atom, identity, tensor_all
from freemarkov.signature import Signature

SIG = Signature.build("a b", {"f": ("a", "b"), "g": ("b", "a"), "m": ("a b", "a"),
                              "u": ("", "b")})


def diagrams(sig=SIG, max_nodes=7):
    return st.builds(lambda seed, n: random_diagram(sig, random.Random(seed), n),
                     st.integers(0, 2 ** 32), st.integers(0, max_nodes))


def layer_on(sig, w, rng):
    """A one-node-per-wire layer with domain ``w``."""
    parts = []
    for a in w:
        options = [identity(sig, (a,)), atom(sig, Dup(a)), atom(sig, Disc(a))]
        options += [atom(sig, Gen(name)) for name, dom, _ in sig.generators if dom == (a,)]
        parts.append(rng.choice(options))
    return tensor_all(sig, parts)


def chains(k=3, sig=SIG, max_nodes=5):
    """``k`` composable diagrams, first to last."""
    def make(seed, n):
        rng = random.Random(seed)
        out = [random_diagram(sig, rng, n)]
        for _ in range(k - 1):
            out.append(layer_on(sig, out[-1].cod, rng))
        return out
    return st.builds(make, st.integers(0, 2 ** 32), st.integers(0, max_nodes))
