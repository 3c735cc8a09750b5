"""Block-by-block check of [J^Y(i* mu, z)]_{z^{-b-1}} = [i* J^{X,tw}(mu^X, z)]_{z^{-b-1}}."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..coh_ring import RingHom, frac_str
from ..errors import QLError
from ..formal_series import FormalSeries, Window, apply_hom
from ..targets import TargetModel, small_J_series
from .admissible import AdmissibleContext, admissible_triples, block_sectors
from .mirror import mirror_normalize
from .modification import hypergeometric_modification, mu_plus


def _elem_str(x) -> str:
    if not x:
        return "0"
    return " + ".join(f"{frac_str(c)}*{x.ring.basis[i]}" for i, c in x.sorted_items())


@dataclass
class BlockComparison:
    beta: tuple
    k: tuple
    sector: str
    b: int
    lhs: object
    rhs: object

    @property
    def exact(self) -> bool:
        return self.lhs == self.rhs

    def counterexample(self) -> str | None:
        """First basis monomial where the two sides differ."""
        if self.exact:
            return None
        diff = self.lhs - self.rhs
        i, c = diff.sorted_items()[0]
        return f"q^{list(self.beta)} t^{list(self.k)} z^{-self.b - 1} {diff.ring.basis[i]}: {frac_str(c)}"

    def to_dict(self) -> dict:
        return {"beta": list(self.beta), "k": list(self.k), "c": self.sector, "b": self.b,
                "status": "exact" if self.exact else "mismatch", "lhs": _elem_str(self.lhs),
                "rhs": _elem_str(self.rhs), "counterexample": self.counterexample()}


@dataclass
class MainTheoremReport:
    mode: str
    order: Fraction
    b_max: int
    comparisons: list = field(default_factory=list)
    mirror: dict | None = None

    @property
    def ok(self) -> bool:
        return all(c.exact for c in self.comparisons)

    @property
    def mismatches(self) -> list:
        return [c for c in self.comparisons if not c.exact]

    def summary(self) -> str:
        if self.ok:
            return f"all blocks exact to order {frac_str(self.order).removesuffix('/1')} ({len(self.comparisons)} comparisons, b <= {self.b_max})"
        return f"{len(self.mismatches)} of {len(self.comparisons)} blocks differ; first: {self.mismatches[0].counterexample()}"

    def to_dict(self) -> dict:
        out = {"mode": self.mode, "order": frac_str(self.order), "b_max": self.b_max, "ok": self.ok,
               "summary": self.summary(), "comparisons": [c.to_dict() for c in self.comparisons]}
        if self.mirror is not None:
            out["mirror"] = self.mirror
        return out

    def lines(self) -> list:
        out = [f"mode: {self.mode}", self.summary()]
        for c in self.mismatches:
            out.append(f"  MISMATCH {c.counterexample()}")
        return out


def _mu_shape(mu: FormalSeries, divisors) -> str:
    """'zero', 'normalizable' (z*1, 1, divisors only) or 'general'."""
    if not mu:
        return "zero"
    ring = mu.ring
    allowed = {ring.unit} | {ring.index(lab) for lab in divisors}
    for (beta, k, z, lam, kap), x in mu.terms.items():
        if any(k) or lam or kap or z > 1:
            return "general"
        if z == 1 and set(x.coeffs) != {ring.unit}:
            return "general"
        if z == 0 and not set(x.coeffs) <= allowed:
            return "general"
    return "normalizable"


def check_main_theorem(ctx: AdmissibleContext, known_Y: TargetModel, hom: RingHom, order=4, b_max: int = 3,
                       J: FormalSeries | None = None) -> MainTheoremReport:
    """Compare the restricted modified J-function of X with the small J of Y.

    Mode "direct" applies when mu^{X,tw} = 0, so that J^Y(i* mu) is the small
    J-function of Y.  Mode "normalized" applies when mu is supported on z*1, 1
    and divisor classes; the restriction is then brought to small-J shape by
    mirror_normalize first.  Other shapes need a big-J oracle and raise
    UNSUPPORTED_SHAPE.
    """
    order = Fraction(order)
    if J is None:
        J = small_J_series(ctx.target, order, Window(order=order), spec=ctx.spec)
    Jtw = hypergeometric_modification(ctx, J)
    mu = mu_plus(Jtw)
    shape = _mu_shape(mu, ctx.target.divisor_pairing)
    if shape == "general":
        raise QLError("UNSUPPORTED_SHAPE", "mu^{X,tw} has classes beyond z*1, 1 and divisors; a big-J oracle is required")
    restricted = apply_hom(Jtw, hom)
    mirror = None
    if shape == "normalizable":
        md = mirror_normalize(restricted, known_Y.divisor_pairing)
        restricted = md.normalized
        mirror = md.to_dict()
    report = MainTheoremReport("direct" if shape == "zero" else "normalized", order, b_max, mirror=mirror)
    ring = known_Y.ring
    zero_k = ctx.spec.zero()
    triples = admissible_triples(ctx, order)
    for beta, k, c in triples:
        expected_block = known_Y.block(beta) if k == zero_k else {}
        for b in range(b_max + 1):
            z = -b - 1
            got = block_sectors(restricted.terms.get((beta, k, z, 0, 0), ring.zero()))
            want = block_sectors(expected_block.get(z, ring.zero()))
            report.comparisons.append(BlockComparison(beta, k, c, b, got.get(c, ring.zero()),
                                                      want.get(c, ring.zero())))
    # anything outside the admissible triples must vanish on both sides
    adm = set(triples)
    for (beta, k, z, lam, kap), x in sorted(restricted.terms.items()):
        if z >= 0 or -z - 1 > b_max or lam or kap:
            continue
        for c, part in block_sectors(x).items():
            if (beta, k, c) not in adm:
                report.comparisons.append(BlockComparison(beta, k, c, -z - 1, part, ring.zero()))
    return report
