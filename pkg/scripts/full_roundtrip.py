"""Print/parse round trip and DOT digest over every diagram with at most five nodes.

The acceptance suite runs the orbit representatives; this covers the whole
corpus, including both members of each swap orbit.
"""
import gc
import time

from freemarkov.audit import dot_digest, roundtrip_suite
from freemarkov.corpus import enumerate_diagrams
from freemarkov.signature import Signature


def main():
    sig = Signature.build("a b", {"f": ("a", "b"), "g": ("b", "a")})
    t0 = time.perf_counter()
    corpus = enumerate_diagrams(sig, 5)
    print(f"corpus: {len(corpus)} diagrams in {time.perf_counter() - t0:.1f} s")
    gc.freeze()
    t0 = time.perf_counter()
    rep = roundtrip_suite(corpus)
    digest = dot_digest(corpus)
    print(f"round trip: {rep.diagrams} diagrams, {len(rep.failures)} failures")
    print(f"dot digest: {digest}")
    print(f"checks took {time.perf_counter() - t0:.1f} s")
    for why, text in rep.failures[:5]:
        print(f"  {why}: {text}")


if __name__ == "__main__":
    main()
