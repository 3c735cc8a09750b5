"""Built-in target spaces, line-bundle data and small J-function blocks."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import reduce
from math import lcm
from pathlib import Path
from typing import Callable, Mapping

from .coh_ring import (CohRing, RingElement, SectorTable, as_fraction, build_ring, fractional_part,
                       load_ring, tensor_product)
from .errors import QLError
from .formal_series import DegreeLattice, ExtendedVariableSpec, FormalSeries, Window, load_series
from .io_util import parse_yaml, read_text

# tabulated genus-zero instanton numbers of the quintic threefold
QUINTIC_INSTANTONS = {1: 2875, 2: 609250, 3: 317206375, 4: 242467530000}


@dataclass(frozen=True)
class LineBundleData:
    name: str
    c1: RingElement | None
    pairing_row: tuple
    ages: Mapping = field(default_factory=dict)
    semi_positive: bool = True

    def age(self, sector: str) -> Fraction:
        return as_fraction(self.ages.get(sector, 0))


@dataclass
class TargetModel:
    name: str
    ring: CohRing | None
    sector_table: SectorTable
    lattice: DegreeLattice
    bundles: tuple
    positive_bundle: int
    small_J: Callable | None = None
    divisor_pairing: Mapping = field(default_factory=dict)
    provenance: str = "closed-form"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.bundles = tuple(self.bundles)
        st = self.sector_table
        for b in self.bundles:
            if b.age(st.untwisted) != 0:
                raise QLError("VALIDATION_ERROR", f"bundle {b.name} has nonzero untwisted age")
            for s, a in b.ages.items():
                if s not in st.sectors or not 0 <= as_fraction(a) < 1:
                    raise QLError("VALIDATION_ERROR", f"bad age data for {b.name} on {s!r}")
            if b.c1 is not None and self.ring is not None:
                if not b.c1.ring == self.ring:
                    raise QLError("VALIDATION_ERROR", f"c1 of {b.name} is not in the target ring")
                for k in b.c1.coeffs:
                    if self.ring.degrees[k] != 2 or self.ring.sectors[k] != st.untwisted:
                        raise QLError("VALIDATION_ERROR", f"c1 of {b.name} must be untwisted of degree 2")
        if not 0 <= self.positive_bundle < len(self.bundles):
            raise QLError("VALIDATION_ERROR", "positive bundle index out of range")

    def bundle_index(self, name: str) -> int:
        for i, b in enumerate(self.bundles):
            if b.name == name:
                return i
        raise QLError("VALIDATION_ERROR", f"unknown bundle {name!r}")

    def block(self, beta: tuple) -> dict:
        if self.small_J is None:
            raise QLError("NO_SMALL_J", f"target {self.name} has no small J-function")
        return self.small_J(tuple(beta))

    def with_bundle(self, bundle: LineBundleData) -> "TargetModel":
        bundles = self.bundles + (bundle,)
        return replace(self, bundles=bundles, lattice=_lattice(bundles, self.positive_bundle, self.lattice.rank))


def _lattice(bundles, positive: int, rank: int) -> DegreeLattice:
    return DegreeLattice(rank, tuple(b.pairing_row for b in bundles), tuple(b.semi_positive for b in bundles),
                         bundles[positive].pairing_row)


def laurent_mul(a: Mapping, b: Mapping) -> dict:
    """Product of z-Laurent polynomials {exponent: RingElement}."""
    out: dict = {}
    for i, x in a.items():
        for j, y in b.items():
            p = x * y
            if p:
                out[i + j] = out[i + j] + p if i + j in out else p
    return {e: c for e, c in out.items() if c}


def truncated_polynomial_ring(n: int, symbol: str = "H", top_integral=Fraction(1), name: str = "") -> CohRing:
    """Q[x]/(x^{n+1}) with deg x = 2 and int x^n = top_integral."""
    labels = ["1", symbol] + [f"{symbol}^{i}" for i in range(2, n + 1)]
    table = {(labels[i], labels[j]): {labels[i + j]: 1} for i in range(n + 1) for j in range(n + 1) if i + j <= n}
    return build_ring(labels, [2 * i for i in range(n + 1)], [0] * (n + 1), None, table,
                      integrals={"0": {labels[n]: as_fraction(top_integral)}}, name=name or f"P{n}")


def projective_block_factory(ring: CohRing, n: int) -> Callable:
    """Block generator d -> z * prod_{m=1}^d (H+mz)^{-(n+1)}."""
    H = ring.basis_element(1)
    one = ring.one()
    cache: dict = {}

    def inv_linear(m: int) -> dict:
        # (H + m z)^{-1} = sum_j (-1)^j H^j m^{-j-1} z^{-j-1}
        out = {}
        p = one
        j = 0
        while p:
            out[-j - 1] = p * (Fraction(-1) ** j / Fraction(m) ** (j + 1))
            p = p * H
            j += 1
        return out

    def block(beta: tuple) -> dict:
        d = beta[0]
        if d in cache:
            return cache[d]
        if d == 0:
            cache[d] = {}
            return {}
        acc = {1: one}
        for m in range(1, d + 1):
            inv = inv_linear(m)
            for _ in range(n + 1):
                acc = laurent_mul(acc, inv)
        cache[d] = acc
        return acc

    return block


def make_projective_target(n: int, symbol: str = "H") -> TargetModel:
    if n < 1:
        raise QLError("VALIDATION_ERROR", "n must be positive")
    ring = truncated_polynomial_ring(n, symbol, name=f"P{n}" if symbol == "H" else f"P{n}:{symbol}")
    H = ring.basis_element(symbol)
    bundles = (LineBundleData("O(1)", H, (Fraction(1),), {}, True),)
    return TargetModel(f"P{n}", ring, ring.sector_table, _lattice(bundles, 0, 1), bundles, 0,
                       projective_block_factory(ring, n), {symbol: (Fraction(1),)})


def weighted_sectors(weights) -> list:
    return sorted({fractional_part(Fraction(k, w)) for w in weights for k in range(w)})


def make_weighted_projective_target(weights, degrees=(1,), ring: CohRing | None = None) -> TargetModel:
    weights = [int(w) for w in weights]
    if not weights or any(w < 1 for w in weights):
        raise QLError("VALIDATION_ERROR", "weights must be positive integers")
    st = SectorTable.from_fractions(weighted_sectors(weights))
    unit = Fraction(1, reduce(lcm, weights))
    bundles = tuple(
        LineBundleData(f"O({a})", None, (a * unit,),
                       {str(f): fractional_part(a * f) for f in weighted_sectors(weights)}, a >= 0)
        for a in degrees)
    if ring is not None:
        st = ring.sector_table
    positive = next(i for i, a in enumerate(degrees) if a > 0)
    name = "WP" + ",".join(map(str, weights))
    return TargetModel(name, ring, st, _lattice(bundles, positive, 1), bundles, positive, None, {},
                       provenance="absent")


def multiple_cover_N(instantons: Mapping, d: int) -> Fraction:
    """N_d = sum_{k | d} n_{d/k} / k^3."""
    return sum((Fraction(instantons[d // k], k ** 3) for k in range(1, d + 1) if d % k == 0), Fraction(0))


def make_quintic_target(instantons: Mapping | None = None) -> TargetModel:
    """The quintic threefold: Q[h]/(h^4), int h^3 = 5, small J from instanton numbers."""
    inst = dict(QUINTIC_INSTANTONS if instantons is None else instantons)
    ring = truncated_polynomial_ring(3, "h", top_integral=5, name="quintic")
    h2, h3 = ring.basis_element("h^2"), ring.basis_element("h^3")
    bundles = (LineBundleData("O(1)", ring.basis_element("h"), (Fraction(1),), {}, True),)

    def block(beta):
        d = beta[0]
        if d == 0:
            return {}
        if any(k not in inst for k in range(1, d + 1)):
            raise QLError("NO_SMALL_J", f"no tabulated instanton data in degree {d}")
        N = multiple_cover_N(inst, d)
        # J_d = phi^h <h>_d / z + phi^1 <psi>_d / z^2 with phi^h = h^2/5, phi^1 = h^3/5;
        # divisor: <h>_d = d N_d, dilaton: <psi>_d = -2 N_d
        return {-1: h2 * (d * N / 5), -2: h3 * (-2 * N / 5)}

    return TargetModel("quintic", ring, ring.sector_table, _lattice(bundles, 0, 1), bundles, 0, block,
                       {"h": (Fraction(1),)}, provenance="tabulated")


def bmu_ring(n: int) -> CohRing:
    """Chen-Ruan ring of B mu_n: group ring of Z/n, all classes in degree 0."""
    fr = [Fraction(k, n) for k in range(n)]
    st = SectorTable.from_fractions(fr)
    labels = ["1"] + [f"1_{f}" for f in fr[1:]]
    lab = dict(zip(fr, labels))
    table = {(lab[f], lab[g]): {lab[fractional_part(f + g)]: 1} for f in fr for g in fr}
    inertia = {(lab[f], lab[f]): {lab[f]: 1} for f in fr}
    integrals = {str(f): {lab[f]: Fraction(1, n // f.denominator)} for f in fr}
    return build_ring(labels, [0] * n, [0] * n, [str(f) for f in fr], table, st, inertia_table=inertia,
                      basis_involution={lab[f]: lab[fractional_part(-f)] for f in fr}, integrals=integrals,
                      name=f"Bmu{n}")


def elliptic_ring() -> CohRing:
    table = {("1", x): {x: 1} for x in ("1", "a", "b", "pt")}
    table.update({(x, "1"): {x: 1} for x in ("a", "b", "pt")})
    table.update({("a", "b"): {"pt": 1}, ("b", "a"): {"pt": -1}})
    return build_ring(["1", "a", "b", "pt"], [0, 1, 1, 2], [0, 1, 1, 0], None, table,
                      integrals={"0": {"pt": 1}}, name="E")


def make_product_target(base: TargetModel, fiber: CohRing, bundle_ages: Mapping | None = None) -> TargetModel:
    """base x F where F has no curve classes in the lattice; small J is J^base (x) 1.

    ``bundle_ages`` gives ages of each base bundle twisted by a character of F,
    keyed by sector of F.
    """
    ring = tensor_product(base.ring, fiber, name=f"{base.ring.name}x{fiber.name}")
    embed = {i: i * fiber.dim + fiber.unit for i in range(base.ring.dim)}

    def lift(x: RingElement) -> RingElement:
        return RingElement(ring, {embed[k]: v for k, v in x.coeffs.items()})

    bundles = []
    for b in base.bundles:
        ages = {}
        for s in fiber.sector_table.sectors:
            a = (bundle_ages or {}).get(s, 0)
            if a:
                ages[s] = as_fraction(a)
        bundles.append(LineBundleData(b.name, lift(b.c1), b.pairing_row, ages, b.semi_positive))

    def block(beta):
        return {z: lift(x) for z, x in base.block(beta).items()}

    div = {ring.basis[embed[base.ring.index(lab)]]: row for lab, row in base.divisor_pairing.items()}
    return TargetModel(f"{base.name}x{fiber.name}", ring, ring.sector_table, base.lattice, tuple(bundles),
                       base.positive_bundle, block, div)


def builtin_target(tag: str, symbol: str | None = None) -> TargetModel:
    """Resolve built-in tags: P<n>, WP<w,...>, quintic, P<n>xBmu<k>, ExP1."""
    tag = tag.strip()
    if tag == "quintic":
        return make_quintic_target()
    if tag == "ExP1":
        return make_product_target(make_projective_target(1), elliptic_ring())
    if tag.startswith("WP"):
        return make_weighted_projective_target([int(w) for w in tag[2:].split(",")])
    if tag.startswith("P") and "xBmu" in tag:
        left, right = tag.split("xBmu")
        k = int(right)
        base = make_projective_target(int(left[1:]), symbol or "H")
        return make_product_target(base, bmu_ring(k), {f"{Fraction(1, k)}": Fraction(1, k)} if k > 1 else None)
    if tag.startswith("P") and tag[1:].isdigit():
        return make_projective_target(int(tag[1:]), symbol or "H")
    raise QLError("VALIDATION_ERROR", f"unknown builtin target {tag!r}")


def small_J_series(t: TargetModel, order, window: Window | None = None,
                   spec: ExtendedVariableSpec | None = None) -> FormalSeries:
    """z + sum_{0 < order(beta) <= order} q^beta block(beta)."""
    if t.small_J is None or t.ring is None:
        raise QLError("NO_SMALL_J", f"target {t.name} has no small J-function")
    spec = spec or ExtendedVariableSpec()
    order = as_fraction(order)
    window = window if window is not None else Window(order=order)
    k0 = spec.zero()
    terms = {(t.lattice.zero(), k0, 1, 0, 0): t.ring.one()}
    for beta in t.lattice.points(order):
        if not any(beta):
            continue
        for z, x in t.block(beta).items():
            terms[(beta, k0, z, 0, 0)] = x
    return FormalSeries(t.ring, spec, t.lattice, terms, window.replace(order=min(order, window.order or order)))


# ---------------------------------------------------------------------------
# configuration files


def _bundle_from_config(d: Mapping, ring: CohRing | None, index: int) -> LineBundleData:
    if "pairing_row" not in d:
        raise QLError("VALIDATION_ERROR", f"bundle #{index} lacks pairing_row")
    c1 = None
    if d.get("c1") is not None:
        if ring is None:
            raise QLError("VALIDATION_ERROR", "c1 given but the target has no ring")
        c1 = ring.element({str(k): as_fraction(str(v)) for k, v in d["c1"].items()})
    return LineBundleData(str(d.get("name", f"L{index}")), c1,
                          tuple(as_fraction(str(v)) for v in d["pairing_row"]),
                          {str(k): as_fraction(str(v)) for k, v in (d.get("ages") or {}).items()},
                          bool(d.get("semi_positive", True)))


def target_from_config(data: Mapping, base_dir: Path = Path(".")) -> TargetModel:
    if not isinstance(data, Mapping):
        raise QLError("VALIDATION_ERROR", "target config must be a mapping")
    if "builtin" in data:
        target = builtin_target(str(data["builtin"]), data.get("symbol"))
    elif "ring" in data:
        ring = load_ring(read_text(base_dir / data["ring"]))
        raw = data.get("bundles") or []
        if not raw:
            raise QLError("VALIDATION_ERROR", "ring-based target needs bundles")
        bundles = tuple(_bundle_from_config(b, ring, i) for i, b in enumerate(raw))
        rank = int((data.get("lattice") or {}).get("rank", len(bundles[0].pairing_row)))
        pos = data.get("positive_bundle", 0)
        pos = pos if isinstance(pos, int) else [b.name for b in bundles].index(pos)
        div = {str(k): tuple(as_fraction(str(v)) for v in row) for k, row in (data.get("divisor_pairing") or {}).items()}
        target = TargetModel(str(data.get("name", ring.name)), ring, ring.sector_table,
                             _lattice(bundles, pos, rank), bundles, pos, None, div, provenance="absent")
        data = {k: v for k, v in data.items() if k != "bundles"}
    else:
        raise QLError("VALIDATION_ERROR", "config needs 'builtin' or 'ring'")
    for i, b in enumerate(data.get("bundles") or []):
        target = target.with_bundle(_bundle_from_config(b, target.ring, len(target.bundles) + i))
    if "positive_bundle" in data and "builtin" in data:
        pos = data["positive_bundle"]
        pos = pos if isinstance(pos, int) else target.bundle_index(str(pos))
        target = replace(target, positive_bundle=pos, lattice=_lattice(target.bundles, pos, target.lattice.rank))
    if "name" in data:
        target = replace(target, name=str(data["name"]))
    if data.get("small_J"):
        blocks = load_series(read_text(base_dir / data["small_J"]), ring=target.ring)
        by_beta: dict = {}
        for (beta, k, z, lam, kap), x in blocks.terms.items():
            if any(beta) and not any(k) and lam == 0 and kap == 0:
                by_beta.setdefault(beta, {})[z] = x
        target = replace(target, small_J=lambda beta, _b=by_beta: dict(_b.get(tuple(beta), {})),
                         provenance="ingested")
    meta = dict(target.meta)
    meta["complete_intersection"] = tuple(target.bundle_index(str(n)) for n in data.get("complete_intersection") or [])
    ext = data.get("extended")
    meta["spec"] = ExtendedVariableSpec(tuple(ext.get("parities", [])),
                                        tuple(tuple(str(v) for v in row) for row in ext.get("weights", []))) \
        if ext else ExtendedVariableSpec()
    if data.get("sub"):
        meta["sub"] = str(base_dir / data["sub"])
    if data.get("restriction"):
        meta["restriction"] = {str(k): {str(a): as_fraction(str(b)) for a, b in v.items()}
                               for k, v in data["restriction"].items()}
    meta["admissible_inputs"] = [str(base_dir / p) for p in data.get("admissible_inputs") or []]
    return replace(target, meta=meta)


def load_target_config(path) -> TargetModel:
    path = Path(path)
    return target_from_config(parse_yaml(read_text(path)), path.parent)
