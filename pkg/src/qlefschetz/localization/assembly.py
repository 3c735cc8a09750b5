"""Numeric and structural assembly of the localization recursion.

Two routes to the same number are kept apart on purpose:

* ``jcomp_block`` reads [J^Y_{beta,k,c}(mu, z)]_{z^{-b-1}} off the defining
  correlator sum, expanding 1/(z - psi) in z;
* ``assemble_typeI_II`` builds the Type I and Type II localization
  contributions as lambda-Laurent series, expanding in w = (lambda - c1)/delta
  with c1 pulled back at the distinguished marking.

Their lambda^{-1} / z^{-b-1} agreement is the bookkeeping identity behind the
recursion.  Type III terms involve root-stack classes CD(d) and are only ever
emitted symbolically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import comb, factorial

from ..coh_ring import RingElement, RingHom, frac_str, poincare_data
from ..errors import ModeUnavailable, QLError
from ..formal_series import FormalSeries, Window, apply_hom, lambda_coefficient, substitute_z
from ..quantum_lefschetz.admissible import AdmissibleContext, block_sectors, is_admissible_pair
from .factors import edge_factor_counts, edge_inverse_euler, lam_poly_str, node_smoothing_factor
from .graphs import enumerate_meta_graphs, line_bundle_delta
from .symbolic import SymExpr


def insertion_blocks(mu: FormalSeries) -> dict:
    """(beta, k) -> list of (class, psi power) for t^k mu_{beta,k}(-psi), parity-homogeneous classes."""
    out: dict = {}
    for (beta, k, z, lam, kap), x in mu.items():
        if lam or kap:
            raise QLError("VALIDATION_ERROR", "input mu must not involve lambda or kappa")
        if z < 0:
            raise QLError("VALIDATION_ERROR", "input mu must be polynomial in z")
        if not any(beta) and not any(k):
            raise QLError("VALIDATION_ERROR", "input mu has a constant block")
        sign = -1 if z % 2 else 1
        for p in (0, 1):
            part = x.parity_part(p)
            if part:
                out.setdefault((beta, k), []).append((part * sign, z, p))
    return out


class CorrelatorSum:
    """sum_m 1/m! sum phi^alpha <t^{k_1} mu_1(-psi), ..., t^{k_m} mu_m(-psi), phi_alpha X psi^j>_{beta_star}."""

    def __init__(self, oracle, mu: FormalSeries):
        self.oracle = oracle
        self.ring = mu.ring
        self.spec = mu.spec
        self.lattice = mu.lattice
        self.blocks = insertion_blocks(mu)
        _, self.dual = poincare_data(mu.ring)

    def _tuples(self, beta, k):
        """Ordered tuples of blocks with sum of k equal to k and sum of beta at most beta."""
        keys = sorted(self.blocks)
        out = []

        def rec(acc, b, kk):
            if kk == k:
                out.append(tuple(acc))
            for key in keys:
                nb = tuple(x + y for x, y in zip(b, key[0]))
                nk = tuple(x + y for x, y in zip(kk, key[1]))
                if all(x <= y for x, y in zip(nb, beta)) and all(x <= y for x, y in zip(nk, k)):
                    rec(acc + [key], nb, nk)

        rec([], self.lattice.zero(), self.spec.zero())
        return out

    def value(self, beta, k, X: RingElement, j: int) -> RingElement:
        beta, k = tuple(beta), tuple(k)
        ring = self.ring
        total = ring.zero()
        for keys in self._tuples(beta, k):
            m = len(keys)
            bstar = tuple(x - sum(key[0][i] for key in keys) for i, x in enumerate(beta))
            # t-monomial reordering sign
            sign = 1
            acc = self.spec.zero()
            for key in keys:
                sign *= self.spec.merge_sign(acc, key[1])
                acc = tuple(a + b for a, b in zip(acc, key[1]))
            if not sign:
                continue
            for choice in product(*[self.blocks[key] for key in keys]):
                s = sign
                # move t^{k_j} left past the classes of earlier insertions
                for jdx, key in enumerate(keys):
                    if self.spec.parity(key[1]):
                        for i in range(jdx):
                            if choice[i][2]:
                                s = -s
                ins = [(x, a) for x, a, _ in choice]
                for alpha in range(ring.dim):
                    phi = ring.basis_element(alpha) * X
                    if not phi:
                        continue
                    val = self.oracle.invariant(bstar, ins + [(phi, j)])
                    if val:
                        total = total + self.dual[alpha] * (val * s / factorial(m))
        return total


def _sector_part(x: RingElement, c: str) -> RingElement:
    return block_sectors(x).get(c, x.ring.zero())


def jcomp_block(oracle, mu: FormalSeries, beta, k, c: str, b: int) -> RingElement:
    """[J^Y_{beta,k,c}(mu, z)]_{z^{-b-1}} from the correlator definition."""
    if b < 0:
        raise QLError("VALIDATION_ERROR", "b must be nonnegative")
    cs = CorrelatorSum(oracle, mu)
    return _sector_part(cs.value(beta, k, mu.ring.one(), b), c)


def _w_power_coeff(e: int, p: int) -> Fraction:
    """Coefficient of c1^p lambda^{e-p} in (lambda - c1)^e."""
    if e >= 0:
        return Fraction(comb(e, p) * (-1) ** p) if p <= e else Fraction(0)
    return Fraction(comb(-e + p - 1, p))


def assemble_typeI_II(ctx: AdmissibleContext, beta, k, c: str, b: int, mu: FormalSeries, oracle,
                      lam_window: tuple = (-4, 4)) -> FormalSeries:
    """Type I + Type II contributions as a lambda-Laurent series (z-free) inside lam_window."""
    beta, k = tuple(beta), tuple(k)
    delta = line_bundle_delta(ctx, beta, k)
    if delta <= 0:
        raise QLError("VALIDATION_ERROR", "Type I/II assembly needs delta > 0")
    c1 = ctx.bundles[0].c1
    ring = mu.ring
    lo, hi = lam_window
    window = Window(mu.window.order, 0, 0, lo, hi)
    # Type I: t^k mu_{beta,k,c}(w)/delta * w^b
    block = {(beta, k, z + b, 0, 0): _sector_part(x, c) for (bb, kk, z, lam, kap), x in mu.terms.items()
             if bb == beta and kk == k and lam == 0 and kap == 0}
    type1 = substitute_z(mu.like(block, mu.window.replace(z_min=None, z_max=None)), c1, delta, (lo, hi))
    type1 = type1 * (1 / delta)
    # Type II: sum_j psi^j w^{b-j-1}/delta with w^e = delta^{-e} (lambda - c1)^e
    cs = CorrelatorSum(oracle, mu)
    terms: dict = {}
    j = 0
    while b - j - 1 >= lo:
        e = b - j - 1
        p = 0
        cp = ring.one()
        while cp and e - p >= lo:
            coef = _w_power_coeff(e, p)
            if coef and e - p <= hi:
                g = _sector_part(cs.value(beta, k, cp, j), c)
                if g:
                    key = (beta, k, 0, e - p, 0)
                    y = g * (coef / delta ** (e + 1))
                    terms[key] = terms[key] + y if key in terms else y
            p += 1
            cp = cp * c1
        j += 1
    type2 = FormalSeries(ring, mu.spec, mu.lattice, terms, window)
    return type1.with_window(window) + type2


def root_symbol_cancels(delta) -> bool:
    """The 1/s of the root-stack pushforward cancels the 1/s of the zero-side node factor."""
    node = node_smoothing_factor("zero", 1, "s", delta) * SymExpr.sym("s")
    return all(sym != "s" for mono in node.terms for sym, _ in mono)


# ---------------------------------------------------------------------------
# reports


@dataclass
class AmbientData:
    """Ambient X for degree-zero (delta = 0) checks: i* J^X(mu^X) against J^Y(i* mu^X)."""

    oracle: object
    hom: RingHom
    mu: FormalSeries


@dataclass
class RecursionReport:
    mode: str
    beta: tuple
    k: tuple
    sector: str
    b: int
    delta: Fraction
    status: str  # exact | mismatch | structural | unavailable
    lhs: str = ""
    rhs: str = ""
    terms: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status in ("exact", "structural")

    def to_dict(self) -> dict:
        return {"mode": self.mode, "beta": list(self.beta), "k": list(self.k), "c": self.sector, "b": self.b,
                "delta": frac_str(self.delta), "status": self.status, "lhs": self.lhs, "rhs": self.rhs,
                "terms": self.terms, "notes": self.notes}

    def lines(self) -> list:
        head = f"[{self.mode}] beta={list(self.beta)} k={list(self.k)} c={self.sector} b={self.b} " \
               f"delta={frac_str(self.delta)}: {self.status}"
        out = [head]
        if self.lhs or self.rhs:
            out.append(f"  lhs = {self.lhs}")
            out.append(f"  rhs = {self.rhs}")
        for t in self.terms:
            out.append(f"  term {t['graph']}")
            for f in t["factors"]:
                out.append(f"    {f}")
        out.extend(f"  note: {n}" for n in self.notes)
        return out


def _elem_str(x: RingElement) -> str:
    if not x:
        return "0"
    return " + ".join(f"{frac_str(c)}*{x.ring.basis[i]}" for i, c in x.sorted_items())


def structural_terms(ctx: AdmissibleContext, beta, k, c: str, b: int) -> list:
    """Symbolic right-hand side: one entry per stable meta graph."""
    out = []
    c1 = SymExpr.sym("c1")
    for g in enumerate_meta_graphs(ctx, beta, k, c, stable_only=True):
        factors = [f"coefficient 1/({g.m}!*{g.n}!) = {frac_str(Fraction(1, factorial(g.m) * factorial(g.n)))}",
                   f"sum_d CD(d) * (lambda/r)^({g.m - 1}-d) * (-1)^d on K_0,{len(g.legs) + 1}(Y,{list(g.beta_star)})"]
        for i, (bi, ki, ci) in enumerate(g.legs, start=1):
            if i <= g.m:
                d_i = line_bundle_delta(ctx, bi, ki)
                denom = -node_smoothing_factor("infinity", 1, "r", d_i, psi=f"psi_{i}", c1=c1)
                n_prod, n_lam = edge_factor_counts(d_i)
                factors.append(
                    f"leg {i}: (1/({frac_str(d_i)})) t^{list(ki)} J^Y_({list(bi)},{list(ki)},{ci})(mu, z)"
                    f"|z=(lambda-c1)/({frac_str(d_i)}) / ({denom})")
                factors.append(f"  edge {i}: inverse Euler {lam_poly_str(edge_inverse_euler(d_i, c1))} "
                               f"[{n_prod} product factors, {n_lam} lambda-form factors]")
            else:
                factors.append(f"leg {i}: t^{list(ki)} mu_({list(bi)},{list(ki)},{ci})(-psi_{i})")
        factors.append(f"psi_star^{b}")
        sign = 1 if (g.m - 1) % 2 == 0 else -1
        factors.append(f"sign flag: the Type III form with (-lambda/r) differs by (-1)^(m-1) = {sign}")
        out.append({"graph": g.record(), "m": g.m, "n": g.n, "factors": factors, "type3_sign_ratio": sign})
    return out


def recursion_report(ctx: AdmissibleContext, beta, k, c: str, b: int, mode: str = "structural",
                     mu: FormalSeries | None = None, oracle=None, ambient: AmbientData | None = None,
                     lam_window: tuple = (-4, 4)) -> RecursionReport:
    beta, k = tuple(beta), tuple(k)
    if not is_admissible_pair(ctx, beta, k, c):
        raise QLError("VALIDATION_ERROR", f"({list(beta)}, {list(k)}, {c}) is not an admissible pair")
    delta = line_bundle_delta(ctx, beta, k)
    if mode == "structural":
        rep = RecursionReport(mode, beta, k, c, b, delta, "structural", terms=structural_terms(ctx, beta, k, c, b))
        if delta == 0:
            rep.notes.append("delta = 0: the recursion does not apply; the degree-zero comparison governs this pair")
        rep.notes.append("CD(d) = c_d(-R pi_* f^* L^(1/r)) is left unevaluated")
        return rep
    if mode not in ("numeric", "numeric-full"):
        raise QLError("VALIDATION_ERROR", f"unknown mode {mode!r}")
    if oracle is None:
        raise ModeUnavailable("oracle", "numeric modes need a GW oracle")
    if mu is None:
        if ambient is not None:
            mu = apply_hom(ambient.mu, ambient.hom)
        else:
            raise QLError("VALIDATION_ERROR", "numeric modes need the input mu")
    if delta == 0:
        if ambient is None:
            raise ModeUnavailable("ambient", "delta = 0 pairs are checked against an ambient space")
        lhs = jcomp_block(oracle, mu, beta, k, c, b)
        rhs_x = CorrelatorSum(ambient.oracle, ambient.mu).value(beta, k, ambient.mu.ring.one(), b)
        rhs = _sector_part(ambient.hom(rhs_x), c)
        rep = RecursionReport(mode, beta, k, c, b, delta, "exact" if lhs == rhs else "mismatch",
                              _elem_str(lhs), _elem_str(rhs))
        rep.notes.append("degree-zero comparison [J^Y(i* mu)]_{z^{-b-1}} = i*[J^X(mu)]_{z^{-b-1}}")
        return rep
    if mode == "numeric-full":
        stable = enumerate_meta_graphs(ctx, beta, k, c, stable_only=True)
        if stable:
            raise ModeUnavailable("CD", f"{len(stable)} stable meta graph(s) carry root-stack classes CD(d)")
        lhs = jcomp_block(oracle, mu, beta, k, c, b)
        rep = RecursionReport(mode, beta, k, c, b, delta, "exact" if not lhs else "mismatch",
                              _elem_str(lhs), "0")
        rep.notes.append("no stable meta graphs: the right-hand side is the empty sum")
        return rep
    series = assemble_typeI_II(ctx, beta, k, c, b, mu, oracle, lam_window)
    lhs = lambda_coefficient(series, -1).terms.get((beta, k, 0, 0, 0), mu.ring.zero())
    rhs = jcomp_block(oracle, mu, beta, k, c, b)
    rep = RecursionReport(mode, beta, k, c, b, delta, "exact" if lhs == rhs else "mismatch",
                          _elem_str(lhs), _elem_str(rhs))
    rep.notes.append("lhs: lambda^-1 coefficient of Type I + Type II; rhs: correlator definition of J^Y")
    if not root_symbol_cancels(delta):
        rep.status = "mismatch"
        rep.notes.append("root symbol s failed to cancel")
    return rep
