"""Meta graphs: star-shaped localization graph types with ordered legs."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..errors import QLError
from ..quantum_lefschetz.admissible import AdmissibleContext, is_admissible_pair


@dataclass(frozen=True)
class MetaGraph:
    sector: str
    beta_star: tuple
    legs: tuple  # ((beta_i, k_i, c_i), ...): first m legs have delta > 0, the rest delta = 0
    m: int
    stable: bool

    @property
    def n(self) -> int:
        return len(self.legs) - self.m

    def to_dict(self) -> dict:
        return {"c": self.sector, "beta_star": list(self.beta_star), "m": self.m, "n": self.n,
                "legs": [{"beta": list(b), "k": list(k), "c": c} for b, k, c in self.legs], "stable": self.stable}

    def record(self) -> str:
        legs = ", ".join(f"({list(b)},{list(k)},{c})" for b, k, c in self.legs)
        return f"c={self.sector} | beta*={list(self.beta_star)} | legs=[{legs}] | m={self.m} | " \
               f"{'stable' if self.stable else 'unstable'}"


def line_bundle_delta(ctx: AdmissibleContext, beta, k) -> Fraction:
    """delta = beta(L) + (w, k) for the single bundle L of the context."""
    if len(ctx.bundle_subset) != 1:
        raise QLError("VALIDATION_ERROR", "localization needs exactly one line bundle L")
    return ctx.v(tuple(beta), tuple(k))[0]


def leg_candidates(ctx: AdmissibleContext, beta, k, support=None) -> list:
    """Admissible (beta_i, k_i, c_i) below (beta, k), excluding the zero degree."""
    beta, k = tuple(beta), tuple(k)
    lat = ctx.target.lattice
    out = []
    for b in lat.points(lat.beta_order(beta)):
        if any(x > y for x, y in zip(b, beta)):
            continue
        for kk in _boxes(k):
            if not any(b) and not any(kk):
                continue
            if ctx.spec.is_zero_monomial(kk):
                continue
            for c in ctx.target.sector_table.sectors:
                if is_admissible_pair(ctx, b, kk, c) and (support is None or (b, kk, c) in support):
                    out.append((b, kk, c))
    return sorted(out)


def _boxes(k: tuple) -> list:
    out = [()]
    for x in k:
        out = [p + (i,) for p in out for i in range(x + 1)]
    return out


def enumerate_meta_graphs(ctx: AdmissibleContext, beta, k, c: str, stable_only: bool = False,
                          support=None) -> list:
    """All elements of the union over m, n of Lambda_{beta,k,c,m,n}, in a deterministic order.

    Legs are ordered; legs with delta > 0 come first.  ``support`` optionally
    restricts leg triples to those where the input mu is nonzero.
    """
    beta, k = tuple(beta), tuple(k)
    if c not in ctx.target.sector_table.sectors:
        raise QLError("VALIDATION_ERROR", f"unknown sector {c!r}")
    if not is_admissible_pair(ctx, beta, k, c):
        return []
    cands = leg_candidates(ctx, beta, k, support)
    pos = [l for l in cands if line_bundle_delta(ctx, l[0], l[1]) > 0]
    zero = [l for l in cands if line_bundle_delta(ctx, l[0], l[1]) == 0]
    out = []

    def fits(b, kk):
        return all(x <= y for x, y in zip(b, beta)) and all(x <= y for x, y in zip(kk, k))

    def add(b, kk, leg):
        return tuple(x + y for x, y in zip(b, leg[0])), tuple(x + y for x, y in zip(kk, leg[1]))

    def rec(legs, b, kk, m, positive_phase):
        if kk == k:
            bstar = tuple(x - y for x, y in zip(beta, b))
            stable = any(bstar) or len(legs) >= 2
            if stable or not stable_only:
                out.append(MetaGraph(c, bstar, tuple(legs), m, stable))
        pools = ([pos] if positive_phase else []) + [zero]
        for idx, pool in enumerate(pools):
            still_positive = positive_phase and idx == 0
            for leg in pool:
                nb, nk = add(b, kk, leg)
                if fits(nb, nk):
                    rec(legs + [leg], nb, nk, m + still_positive, still_positive)

    rec([], ctx.target.lattice.zero(), ctx.spec.zero(), 0, True)
    return sorted(out, key=lambda g: (g.sector, g.beta_star, g.legs, g.m))


def dump_graphs(graphs) -> str:
    return "".join(g.record() + "\n" for g in graphs)


def graph_key(g: MetaGraph) -> tuple:
    """Hashable key for multiset comparisons."""
    return (g.sector, g.beta_star, g.legs, g.m, g.stable)

