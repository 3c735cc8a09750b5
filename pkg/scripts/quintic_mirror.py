"""Quintic: I0, mirror map and genus-zero instanton numbers from the modified J-function of P^4."""

import argparse

from qlefschetz import builtin_target, restriction_hom
from qlefschetz.coh_ring import frac_str
from qlefschetz.formal_series import apply_hom
from qlefschetz.quantum_lefschetz import (AdmissibleContext, extract_instanton_numbers,
                                          hypergeometric_modification, mirror_normalize)
from qlefschetz.targets import LineBundleData, make_quintic_target, small_J_series


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--d-max", type=int, default=5)
    args = ap.parse_args()
    P4 = builtin_target("P4")
    X = P4.with_bundle(LineBundleData("O(5)", P4.ring.basis_element("H") * 5, (5,), {}, True))
    Q = make_quintic_target()
    hom = restriction_hom(X.ring, Q.ring, {"H": Q.ring.basis_element("h")})
    Jtw = hypergeometric_modification(AdmissibleContext(X, bundle_subset=(1,)), small_J_series(X, args.d_max))
    md = mirror_normalize(apply_hom(Jtw, hom), Q.divisor_pairing)
    print("d  I0_d  tau_d")
    for d in range(args.d_max + 1):
        print(f"{d}  {frac_str(md.I0.get((d,), 0))}  {frac_str(md.mirror_map['h'].get((d,), 0))}")
    table = extract_instanton_numbers(md.normalized, "h", args.d_max)
    for d, n in sorted(table.n.items()):
        print(f"n_{d} = {frac_str(n)}")
    print(f"dilaton consistent: {table.dilaton_consistent}")


if __name__ == "__main__":
    main()
