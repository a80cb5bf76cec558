"""Time the bounded surgery search on pairs the decision procedure separates.

Counit laws used backwards can always add a duplicate and a discard, so
the balls never close and a negative verdict only comes from the bounds.
This script measures how long a depth-limited search spends on such pairs.
"""
import argparse
import random
import time

from freemarkov.corpus import enumerate_diagrams
from freemarkov.markov import canonical_certificate, markov_templates
from freemarkov.signature import Signature
from freemarkov.surgery import equivalent_bfs


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--pairs", type=int, default=20)
    ap.add_argument("--depth", type=int, default=6)
    ap.add_argument("--max-nodes", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    sig = Signature.build("a b", {"f": ("a", "b"), "g": ("b", "a")})
    ts = markov_templates(sig)
    by_type = {}
    for d in enumerate_diagrams(sig, args.max_nodes):
        by_type.setdefault((d.dom, d.cod), []).append(d)
    groups = [g for g in by_type.values() if len(g) > 1]
    rng = random.Random(args.seed)
    verdicts = {True: 0, False: 0, None: 0}
    total = 0.0
    done = 0
    while done < args.pairs:
        d1, d2 = rng.sample(rng.choice(groups), 2)
        if canonical_certificate(d1) == canonical_certificate(d2):
            continue
        t0 = time.perf_counter()
        v = equivalent_bfs(d1, d2, ts, args.depth, check=False)
        total += time.perf_counter() - t0
        verdicts[v] += 1
        done += 1
    print(f"{done} separated pairs at depth {args.depth}: "
          f"{verdicts[False]} refuted, {verdicts[None]} inconclusive, "
          f"{verdicts[True]} joined (a joined pair would be a bug)")
    print(f"mean search time {total / max(done, 1):.2f} s per pair")


if __name__ == "__main__":
    main()
