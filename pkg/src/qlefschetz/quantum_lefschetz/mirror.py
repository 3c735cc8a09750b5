"""Mirror-map normalization of cone points and instanton-number extraction."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..coh_ring import frac_str, poincare_data
from ..errors import QLError
from ..formal_series import DegreeLattice, FormalSeries

# scalar power series in q: {beta: Fraction}


def ps_mul(a: dict, b: dict, lat: DegreeLattice, bound) -> dict:
    out: dict = {}
    for ba, x in a.items():
        for bb, y in b.items():
            beta = tuple(p + q for p, q in zip(ba, bb))
            if lat.beta_order(beta) <= bound:
                out[beta] = out.get(beta, Fraction(0)) + x * y
    return {k: v for k, v in out.items() if v}


def ps_inv(a: dict, lat: DegreeLattice, bound) -> dict:
    """1/a for a with a[0] != 0, by the recursion on the order functional."""
    zero = lat.zero()
    a0 = a.get(zero, Fraction(0))
    if not a0:
        raise QLError("NOT_INVERTIBLE", "power series with zero constant term")
    out = {zero: 1 / a0}
    for beta in sorted(lat.points(bound), key=lambda b: (lat.beta_order(b), b)):
        if beta == zero:
            continue
        acc = Fraction(0)
        for ba, x in a.items():
            if ba == zero:
                continue
            rest = tuple(p - q for p, q in zip(beta, ba))
            if min(rest) >= 0:
                acc += x * out.get(rest, Fraction(0))
        if acc:
            out[beta] = -acc / a0
    return out


def ps_exp(a: dict, lat: DegreeLattice, bound) -> dict:
    """exp(a) for a without constant term."""
    zero = lat.zero()
    if a.get(zero):
        raise QLError("UNSUPPORTED_SHAPE", "exponent has a constant term")
    out = {zero: Fraction(1)}
    term = {zero: Fraction(1)}
    n = 1
    while True:
        term = {k: v / n for k, v in ps_mul(term, a, lat, bound).items()}
        if not term:
            return out
        for k, v in term.items():
            out[k] = out.get(k, Fraction(0)) + v
        n += 1


def ps_compose(f: dict, coords: list, lat: DegreeLattice, bound) -> dict:
    """f(q) with q_i replaced by the series coords[i] (each without constant term)."""
    zero = lat.zero()
    cache: dict = {zero: {zero: Fraction(1)}}

    def power(beta):
        if beta not in cache:
            i = next(j for j, b in enumerate(beta) if b)
            prev = tuple(b - (j == i) for j, b in enumerate(beta))
            cache[beta] = ps_mul(power(prev), coords[i], lat, bound)
        return cache[beta]

    out: dict = {}
    for beta in sorted(f, key=lambda b: (lat.beta_order(b), b)):
        for k, v in power(beta).items():
            out[k] = out.get(k, Fraction(0)) + f[beta] * v
    return {k: v for k, v in out.items() if v}


@dataclass
class MirrorData:
    I0: dict
    mirror_map: dict  # basis label -> {beta: Fraction}
    normalized: FormalSeries
    q_of_Q: list = field(default_factory=list)

    def to_dict(self) -> dict:
        def ser(d):
            return {",".join(map(str, b)): frac_str(v) for b, v in sorted(d.items())}

        return {"I0": ser(self.I0), "mirror_map": {lab: ser(v) for lab, v in sorted(self.mirror_map.items())},
                "q_of_Q": [ser(c) for c in self.q_of_Q]}


def mirror_normalize(s: FormalSeries, divisor_pairing: dict) -> MirrorData:
    """Normalize s = z + a(q) z + b(q) 1 + D(q) + O(1/z) to a small-J shape.

    I0 = 1 + a, tau = (b 1 + D)/I0; the result is exp(-tau/z) s / I0 written in
    Q with Q^beta = q^beta exp(sum_D tau_D D.beta).  ``divisor_pairing`` maps a
    divisor basis label to its pairing row on the lattice.
    """
    ring, lat = s.ring, s.lattice
    bound = s.window.order if s.window.order is not None else s.max_order()
    zero, k0 = lat.zero(), s.spec.zero()
    unit = ring.unit
    allowed = {unit} | {ring.index(lab) for lab in divisor_pairing}
    a: dict = {}
    b: dict = {lab: {} for lab in [ring.basis[unit]] + sorted(divisor_pairing)}
    for (beta, k, z, lam, kap), x in s.items():
        if z < 0:
            continue
        where = f"q^{beta} t^{k} z^{z}"
        if lam or kap or any(k):
            raise QLError("UNSUPPORTED_SHAPE", f"positive part carries extra variables at {where}")
        if z >= 2:
            raise QLError("UNSUPPORTED_SHAPE", f"z^{z} term at {where}")
        if z == 1:
            if beta == zero:
                if x != ring.one():
                    raise QLError("UNSUPPORTED_SHAPE", "leading term is not z")
                continue
            if set(x.coeffs) != {unit}:
                raise QLError("UNSUPPORTED_SHAPE", f"z-coefficient {x!r} is not scalar at {where}")
            a[beta] = x.coeffs[unit]
            continue
        if beta == zero:
            raise QLError("UNSUPPORTED_SHAPE", "nonzero q^0 z^0 term")
        for i, c in x.coeffs.items():
            if i not in allowed:
                raise QLError("UNSUPPORTED_SHAPE", f"class {ring.basis[i]} in the z^0 part at {where}")
            b[ring.basis[i]][beta] = c
    I0 = {zero: Fraction(1), **a}
    inv = ps_inv(I0, lat, bound)
    tau = {lab: ps_mul(v, inv, lat, bound) for lab, v in b.items()}

    # exp(-tau/z)
    tz = s.like({(beta, k0, -1, 0, 0): ring.basis_element(lab) * (-c)
                 for lab, v in tau.items() for beta, c in v.items()})
    e = s.like({(zero, k0, 0, 0, 0): ring.one()})
    term = e
    n = 1
    while True:
        term = (term * tz) * Fraction(1, n)
        if not term:
            break
        e = e + term
        n += 1
    scal = s.like({(beta, k0, 0, 0, 0): ring.scalar(c) for beta, c in inv.items()})
    s1 = e * s * scal

    # q as a series in Q: q_i = Q_i exp(-sum_D tau_D(q) row_D[i])
    coords = [{tuple(int(j == i) for j in range(lat.rank)): Fraction(1)} for i in range(lat.rank)]
    shift = []
    for i in range(lat.rank):
        acc: dict = {}
        for lab, row in divisor_pairing.items():
            for beta, c in tau.get(lab, {}).items():
                acc[beta] = acc.get(beta, Fraction(0)) - c * row[i]
        shift.append({k: v for k, v in acc.items() if v})
    for _ in range(int(bound) + 2):
        new = []
        for i in range(lat.rank):
            u = ps_exp(ps_compose(shift[i], coords, lat, bound), lat, bound)
            e_i = tuple(int(j == i) for j in range(lat.rank))
            new.append({tuple(p + q for p, q in zip(e_i, k)): v for k, v in u.items()
                        if lat.beta_order(tuple(p + q for p, q in zip(e_i, k))) <= bound})
        if new == coords:
            break
        coords = new
    out: dict = {}
    cache: dict = {}
    for (beta, k, z, lam, kap), x in s1.terms.items():
        if beta not in cache:
            cache[beta] = ps_compose({beta: Fraction(1)}, coords, lat, bound)
        for gamma, c in cache[beta].items():
            key = (gamma, k, z, lam, kap)
            y = x * c
            out[key] = out[key] + y if key in out else y
    return MirrorData(I0, tau, s.like(out), coords)


@dataclass
class InstantonTable:
    yukawa: dict  # d -> K_d
    N: dict
    n: dict
    dilaton_consistent: bool

    def to_dict(self) -> dict:
        return {"yukawa": {str(d): frac_str(v) for d, v in sorted(self.yukawa.items())},
                "N": {str(d): frac_str(v) for d, v in sorted(self.N.items())},
                "n": {str(d): frac_str(v) for d, v in sorted(self.n.items())},
                "dilaton_consistent": self.dilaton_consistent}


def extract_instanton_numbers(normalized: FormalSeries, divisor_label: str, d_max: int) -> InstantonTable:
    """n_d from K(Q) = deg + sum_d n_d d^3 Q^d/(1-Q^d).

    The degree-d Yukawa coefficient <h,h,h>_d = d^2 <h>_{0,1,d} is read from
    the z^{-1} block; the z^{-2} block is cross-checked against the dilaton
    equation <1 psi>_{0,1,d} = -2 N_d.
    """
    ring, lat = normalized.ring, normalized.lattice
    if lat.rank != 1 or ring.sector_table.sectors != (ring.sector_table.untwisted,):
        raise QLError("UNSUPPORTED_TARGET", "need one Novikov variable and an untwisted ring")
    if max(ring.degrees) != 6:
        raise QLError("UNSUPPORTED_TARGET", "target is not three-dimensional")
    divisors = [i for i, deg in enumerate(ring.degrees) if deg == 2]
    if divisors != [ring.index(divisor_label)]:
        raise QLError("UNSUPPORTED_TARGET", "need exactly one divisor class")
    pairing, _ = poincare_data(ring)
    h = ring.basis_element(divisor_label)
    k0 = normalized.spec.zero()
    yuk, N, n = {}, {}, {}
    consistent = True
    for d in range(1, d_max + 1):
        key1 = ((d,), k0, -1, 0, 0)
        key2 = ((d,), k0, -2, 0, 0)
        if not normalized.window.admits(lat, key1):
            raise QLError("OUT_OF_WINDOW", f"degree {d} is beyond the series truncation")
        one_pt = pairing(h, normalized.terms.get(key1, ring.zero()))
        N[d] = one_pt / d
        yuk[d] = d * d * one_pt
        psi = pairing(ring.one(), normalized.terms.get(key2, ring.zero()))
        consistent = consistent and psi == -2 * N[d]
        n[d] = (yuk[d] - sum(n[e] * e ** 3 for e in n if d % e == 0)) / d ** 3
    return InstantonTable(yuk, N, n, consistent)

