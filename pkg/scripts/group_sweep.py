"""Edge automorphism orders: formula vs brute force over the group catalog, summarized per group."""

import argparse
import time
from collections import defaultdict
from fractions import Fraction

from qlefschetz.orbifold_groups import group_catalog, sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-order", type=int, default=24)
    ap.add_argument("--max-delta", type=Fraction, default=Fraction(4))
    args = ap.parse_args()
    t0 = time.perf_counter()
    rows = sweep(group_catalog(args.max_order), max_delta=args.max_delta)
    stats = defaultdict(lambda: [0, 0])
    for r in rows:
        s = stats[r["group"]]
        s[0] += 1
        s[1] += r["formula"] == r["bruteforce"] and r["exact_sequence"]
    for name, (n, good) in stats.items():
        print(f"{name:8s} {good}/{n}")
    bad = sum(n - good for n, good in stats.values())
    print(f"{len(rows)} cases, {bad} failures, {time.perf_counter() - t0:.1f}s")
    raise SystemExit(1 if bad else 0)


if __name__ == "__main__":
    main()
