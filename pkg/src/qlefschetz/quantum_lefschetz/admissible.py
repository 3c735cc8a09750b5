"""Admissible pairs and admissible-series validation."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..coh_ring import RingElement, fractional_part
from ..errors import QLError
from ..formal_series import ExtendedVariableSpec, FormalSeries
from ..targets import TargetModel


@dataclass
class AdmissibleContext:
    target: TargetModel
    spec: ExtendedVariableSpec = field(default_factory=ExtendedVariableSpec)
    bundle_subset: tuple = (0,)

    def __post_init__(self):
        self.bundle_subset = tuple(self.bundle_subset)
        r = len(self.bundle_subset)
        if any(len(row) != r for row in self.spec.weights):
            raise QLError("VALIDATION_ERROR", f"weight rows must have {r} entries (one per bundle)")
        for j in self.bundle_subset:
            if not 0 <= j < len(self.target.bundles):
                raise QLError("VALIDATION_ERROR", f"bundle index {j} out of range")
            if not self.target.bundles[j].semi_positive:
                raise QLError("VALIDATION_ERROR", f"bundle {self.target.bundles[j].name} is not semi-positive")

    @property
    def bundles(self) -> list:
        return [self.target.bundles[j] for j in self.bundle_subset]

    def v(self, beta: tuple, k: tuple) -> tuple:
        """v_j = beta(L_j) + (w_j, k) for each bundle in the subset."""
        lat = self.target.lattice
        return tuple(lat.pairing(j, beta) + self.spec.weight(pos, k) for pos, j in enumerate(self.bundle_subset))

    def restrict(self, positions) -> "AdmissibleContext":
        """Context for a sub-collection of the bundles (weights restricted accordingly)."""
        positions = tuple(positions)
        weights = tuple(tuple(row[p] for p in positions) for row in self.spec.weights)
        spec = ExtendedVariableSpec(self.spec.parities, weights)
        return AdmissibleContext(self.target, spec, tuple(self.bundle_subset[p] for p in positions))


def is_admissible_pair(ctx: AdmissibleContext, beta, k, c: str) -> bool:
    beta, k = tuple(beta), tuple(k)
    for L, v in zip(ctx.bundles, ctx.v(beta, k)):
        if fractional_part(L.age(c) - v) != 0:
            return False
    return True


def admissible_triples(ctx: AdmissibleContext, bound, include_zero: bool = False) -> list:
    """All admissible (beta, k, c) with order <= bound, sorted."""
    lat = ctx.target.lattice
    out = []
    for beta in lat.points(bound):
        for k in ctx.spec.degrees(bound, lat.beta_order(beta)):
            if not include_zero and not any(beta) and not any(k):
                continue
            for c in ctx.target.sector_table.sectors:
                if is_admissible_pair(ctx, beta, k, c):
                    out.append((beta, k, c))
    return out


@dataclass(frozen=True)
class Violation:
    kind: str  # NON_ADMISSIBLE | CONSTANT_BLOCK | PARITY
    beta: tuple
    k: tuple
    sector: str
    z: int
    detail: str = ""

    def to_dict(self) -> dict:
        return {"kind": self.kind, "beta": list(self.beta), "k": list(self.k), "c": self.sector, "z": self.z,
                "detail": self.detail}


@dataclass
class AdmissibilityReport:
    violations: list = field(default_factory=list)
    checked_terms: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"ok": self.ok, "checked_terms": self.checked_terms,
                "violations": [v.to_dict() for v in self.violations]}

    def lines(self) -> list:
        if self.ok:
            return [f"admissible: {self.checked_terms} terms checked, 0 violations"]
        out = [f"NOT admissible: {len(self.violations)} violation(s) in {self.checked_terms} terms"]
        for v in self.violations:
            out.append(f"  {v.kind} at beta={v.beta} k={v.k} c={v.sector} z^{v.z} {v.detail}".rstrip())
        return out


def block_sectors(x: RingElement) -> dict:
    """Split a coefficient into (beta,k,c)-pieces: the sector-s part belongs to c = s^{-1}."""
    st = x.ring.sector_table
    return {st.inverse(s): part for s, part in sorted(x.sector_parts().items())}


def validate_admissible_series(ctx: AdmissibleContext, s: FormalSeries, near=None) -> AdmissibilityReport:
    """Check conditions (1)-(3) of admissibility for ``s - near`` (near defaults to z).

    The sector of each coefficient determines c (coefficients of the
    (beta,k,c)-block live in sector c^{-1}), so the sector condition holds by
    construction and the other conditions are checked per sector piece.
    """
    if near is None:
        near = FormalSeries.z_term(s.ring, s.spec, s.lattice, s.window)
    elif isinstance(near, dict):
        near = FormalSeries(s.ring, s.spec, s.lattice,
                            {(s.lattice.zero(), s.spec.zero(), z, 0, 0): x for z, x in near.items()}, s.window)
    diff = s - near
    report = AdmissibilityReport(checked_terms=len(diff.terms))
    for (beta, k, z, lam, kap), x in diff.items():
        want = s.spec.parity(k)
        for c, part in block_sectors(x).items():
            if not any(beta) and not any(k):
                report.violations.append(Violation("CONSTANT_BLOCK", beta, k, c, z, "nonzero constant block"))
            elif not is_admissible_pair(ctx, beta, k, c):
                report.violations.append(Violation("NON_ADMISSIBLE", beta, k, c, z, "nonzero off Adm"))
            if part.parity_part(1 - want):
                report.violations.append(Violation("PARITY", beta, k, c, z, f"expected parity {want}"))
    return report
