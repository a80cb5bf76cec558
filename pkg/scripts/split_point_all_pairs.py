"""Split point check on every (S, T) pair of every ordered DAG with five vertices.

The acceptance suite uses a fixed spread of pairs at this size; this script
runs all of them and can take a long time.
"""
import argparse
import time

from freemarkov.audit import split_point_instances, split_point_suite
from freemarkov.corpus import all_odags


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--vertices", type=int, default=5)
    ap.add_argument("--limit", type=int, default=None, help="stop after this many DAGs")
    args = ap.parse_args()
    dags = list(all_odags(args.vertices, args.vertices))[:args.limit]
    t0 = time.perf_counter()
    rep = split_point_suite(split_point_instances(dags))
    print(f"{len(dags)} DAGs, {rep.checked} checks, {len(rep.failures)} failures, "
          f"{time.perf_counter() - t0:.1f} s")
    for f in rep.failures[:5]:
        print("  ", f)


if __name__ == "__main__":
    main()
