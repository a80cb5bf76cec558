"""Oracle sweep over every diagram with at most five nodes, not only orbit representatives."""
import argparse
import time

from freemarkov.audit import oracle_sweep
from freemarkov.corpus import enumerate_diagrams
from freemarkov.markov import markov_templates
from freemarkov.signature import Signature


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--max-nodes", type=int, default=5)
    ap.add_argument("--depth", type=int, default=6)
    args = ap.parse_args()
    sig = Signature.build("a b", {"f": ("a", "b"), "g": ("b", "a")})
    corpus = enumerate_diagrams(sig, args.max_nodes)
    t0 = time.perf_counter()
    rep = oracle_sweep(corpus, markov_templates(sig), args.depth)
    print(f"{rep.diagrams} diagrams, {rep.pairs} pairs, {rep.conclusive} conclusive, "
          f"{rep.inconclusive} inconclusive, {len(rep.disagreements)} disagreements, "
          f"{time.perf_counter() - t0:.1f} s")


if __name__ == "__main__":
    main()
