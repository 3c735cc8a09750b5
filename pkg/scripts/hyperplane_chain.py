"""Check the hyperplane chain P^n -> P^(n-1) and P^3 with two hyperplane sections, with timings."""

import argparse
import time

from qlefschetz import builtin_target, restriction_hom
from qlefschetz.quantum_lefschetz import AdmissibleContext, check_main_theorem
from qlefschetz.targets import LineBundleData, make_projective_target


def check(ctx, sub, order, b_max):
    hom = restriction_hom(ctx.target.ring, sub.ring, {"H": sub.ring.basis_element("h")})
    return check_main_theorem(ctx, sub, hom, order=order, b_max=b_max)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=5)
    ap.add_argument("--order", type=int, default=6)
    ap.add_argument("--b-max", type=int, default=3)
    args = ap.parse_args()
    ok = True
    for n in range(2, args.n_max + 1):
        t0 = time.perf_counter()
        rep = check(AdmissibleContext(make_projective_target(n), bundle_subset=(0,)),
                    make_projective_target(n - 1, "h"), args.order, args.b_max)
        ok &= rep.ok
        print(f"P{n} > P{n - 1}: {rep.summary()}  [{time.perf_counter() - t0:.2f}s]")
    P3 = builtin_target("P3")
    X = P3.with_bundle(LineBundleData("O(1)'", P3.ring.basis_element("H"), (1,), {}, True))
    rep = check(AdmissibleContext(X, bundle_subset=(0, 1)), make_projective_target(1, "h"), args.order, args.b_max)
    ok &= rep.ok
    print(f"P3 > P1 (two hyperplanes): {rep.summary()}")
    raise SystemExit(0 if ok else 1)


if __name__ == "__main__":
    main()
