"""Truncated formal series in q^beta t^k z^a lambda^b kappa^c over a CohRing.

Terms are stored as ``t^k * x`` (the ring coefficient sits to the right of the
extended-variable monomial).  Odd extended variables anticommute with each
other and with odd ring elements; a monomial containing an odd variable twice
vanishes.  Monomials are kept in the canonical order t_1^{k_1}...t_N^{k_N}.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Callable, Iterable, Mapping

from .coh_ring import CohRing, RingElement, RingHom, as_fraction, frac_str
from .errors import QLError

Key = tuple  # (beta, k, z, lam, kap)


@dataclass(frozen=True)
class DegreeLattice:
    """Novikov lattice with per-bundle pairing rows and an order functional."""

    rank: int
    bundle_pairings: tuple
    semi_positive: tuple
    positive_row: tuple

    def __post_init__(self):
        rows = tuple(tuple(as_fraction(v) for v in row) for row in self.bundle_pairings)
        object.__setattr__(self, "bundle_pairings", rows)
        object.__setattr__(self, "semi_positive", tuple(bool(s) for s in self.semi_positive))
        object.__setattr__(self, "positive_row", tuple(as_fraction(v) for v in self.positive_row))
        if len(self.semi_positive) != len(rows):
            raise QLError("VALIDATION_ERROR", "one semi-positivity flag per bundle row")
        for row, sp in zip(rows, self.semi_positive):
            if len(row) != self.rank:
                raise QLError("VALIDATION_ERROR", "pairing row length differs from lattice rank")
            if sp and any(v < 0 for v in row):
                raise QLError("VALIDATION_ERROR", "semi-positive bundle has a negative pairing row")
        if len(self.positive_row) != self.rank or any(v <= 0 for v in self.positive_row):
            raise QLError("VALIDATION_ERROR", "order functional must be strictly positive")

    def pairing(self, j: int, beta: tuple) -> Fraction:
        return sum((r * b for r, b in zip(self.bundle_pairings[j], beta)), Fraction(0))

    def beta_order(self, beta: tuple) -> Fraction:
        return sum((r * b for r, b in zip(self.positive_row, beta)), Fraction(0))

    def order(self, beta: tuple, k: tuple) -> Fraction:
        return self.beta_order(beta) + sum(k)

    def points(self, bound) -> list:
        """Nonnegative lattice points of order at most ``bound``, sorted."""
        bound = as_fraction(bound)
        out = []

        def rec(prefix, budget):
            i = len(prefix)
            if i == self.rank:
                out.append(tuple(prefix))
                return
            step = self.positive_row[i]
            n = 0
            while n * step <= budget:
                rec(prefix + [n], budget - n * step)
                n += 1

        rec([], bound)
        return sorted(out)

    def zero(self) -> tuple:
        return (0,) * self.rank


@dataclass(frozen=True)
class ExtendedVariableSpec:
    parities: tuple = ()
    weights: tuple = ()  # N rows of r weights

    def __post_init__(self):
        object.__setattr__(self, "parities", tuple(int(p) % 2 for p in self.parities))
        w = tuple(tuple(as_fraction(v) for v in row) for row in self.weights)
        object.__setattr__(self, "weights", w)
        if len(w) != len(self.parities):
            raise QLError("VALIDATION_ERROR", "one weight row per extended variable")
        if len({len(row) for row in w}) > 1:
            raise QLError("VALIDATION_ERROR", "ragged weight matrix")
        if any(v < 0 for row in w for v in row):
            raise QLError("VALIDATION_ERROR", "weights must be nonnegative")

    @property
    def count(self) -> int:
        return len(self.parities)

    def zero(self) -> tuple:
        return (0,) * self.count

    def odd_positions(self, k: tuple) -> tuple:
        return tuple(i for i, e in enumerate(k) if e and self.parities[i])

    def parity(self, k: tuple) -> int:
        return sum(e for i, e in enumerate(k) if self.parities[i]) % 2

    def is_zero_monomial(self, k: tuple) -> bool:
        return any(e >= 2 and self.parities[i] for i, e in enumerate(k))

    def merge_sign(self, k1: tuple, k2: tuple) -> int:
        """Sign of reordering t^{k1} t^{k2} into canonical order (0 if it vanishes)."""
        o1, o2 = self.odd_positions(k1), self.odd_positions(k2)
        if set(o1) & set(o2):
            return 0
        inversions = sum(1 for i in o1 for j in o2 if i > j)
        return -1 if inversions % 2 else 1

    def weight(self, j: int, k: tuple) -> Fraction:
        return sum((self.weights[i][j] * e for i, e in enumerate(k)), Fraction(0))

    def degrees(self, bound, start: Fraction = Fraction(0)) -> list:
        """All k with |k| <= bound - start and odd entries at most 1."""
        budget = as_fraction(bound) - start
        out = []

        def rec(prefix):
            i = len(prefix)
            if i == self.count:
                out.append(tuple(prefix))
                return
            used = sum(prefix)
            cap = 1 if self.parities[i] else int(budget - used)
            for e in range(0, cap + 1):
                if used + e <= budget:
                    rec(prefix + [e])

        if budget >= 0:
            rec([])
        return sorted(out)


def _env_pair(name, default):
    raw = os.environ.get(name)
    if not raw:
        return default
    lo, hi = raw.split(",")
    return int(lo), int(hi)


@dataclass(frozen=True)
class Window:
    """Truncation data; ``None`` means unbounded on that side."""

    order: Fraction | None = None
    z_min: int | None = None
    z_max: int | None = None
    lam_min: int | None = None
    lam_max: int | None = None

    def __post_init__(self):
        if self.order is not None:
            object.__setattr__(self, "order", as_fraction(self.order))

    @classmethod
    def default(cls) -> "Window":
        z = _env_pair("QLEFSCHETZ_Z_WINDOW", (-12, 6))
        lam = _env_pair("QLEFSCHETZ_LAMBDA_WINDOW", (-6, 6))
        order = Fraction(os.environ.get("QLEFSCHETZ_ORDER", "8"))
        return cls(order, z[0], z[1], lam[0], lam[1])

    @classmethod
    def unbounded(cls) -> "Window":
        return cls()

    def admits(self, lattice: DegreeLattice, key: Key) -> bool:
        beta, k, z, lam, _ = key
        if self.z_min is not None and z < self.z_min:
            return False
        if self.z_max is not None and z > self.z_max:
            return False
        if self.lam_min is not None and lam < self.lam_min:
            return False
        if self.lam_max is not None and lam > self.lam_max:
            return False
        return self.order is None or lattice.order(beta, k) <= self.order

    def meet(self, other: "Window") -> "Window":
        def pick(a, b, f):
            if a is None:
                return b
            if b is None:
                return a
            return f(a, b)

        return Window(pick(self.order, other.order, min), pick(self.z_min, other.z_min, max),
                      pick(self.z_max, other.z_max, min), pick(self.lam_min, other.lam_min, max),
                      pick(self.lam_max, other.lam_max, min))

    def replace(self, **kw) -> "Window":
        d = dict(order=self.order, z_min=self.z_min, z_max=self.z_max, lam_min=self.lam_min, lam_max=self.lam_max)
        d.update(kw)
        return Window(**d)

    def to_dict(self) -> dict:
        return {"order": None if self.order is None else frac_str(self.order), "z": [self.z_min, self.z_max],
                "lambda": [self.lam_min, self.lam_max]}

    @classmethod
    def from_dict(cls, d: Mapping) -> "Window":
        order = d.get("order")
        return cls(None if order is None else as_fraction(order), *d.get("z", [None, None]),
                   *d.get("lambda", [None, None]))


class FormalSeries:
    """Immutable truncated series; ``terms`` maps (beta, k, z, lam, kap) -> RingElement."""

    __slots__ = ("ring", "spec", "lattice", "window", "terms")

    def __init__(self, ring: CohRing, spec: ExtendedVariableSpec, lattice: DegreeLattice,
                 terms: Mapping | None = None, window: Window | None = None):
        self.ring = ring
        self.spec = spec
        self.lattice = lattice
        self.window = window if window is not None else Window.default()
        clean = {}
        for key, x in (terms or {}).items():
            key = (tuple(key[0]), tuple(key[1]), int(key[2]), int(key[3]), int(key[4]))
            if not x or spec.is_zero_monomial(key[1]) or not self.window.admits(lattice, key):
                continue
            clean[key] = x
        self.terms = clean

    # -- constructors
    def like(self, terms, window: Window | None = None, ring: CohRing | None = None) -> "FormalSeries":
        return FormalSeries(ring or self.ring, self.spec, self.lattice, terms,
                            self.window if window is None else window)

    @classmethod
    def monomial(cls, ring, spec, lattice, coeff: RingElement, beta=None, k=None, z=0, lam=0, kap=0,
                 window: Window | None = None) -> "FormalSeries":
        beta = lattice.zero() if beta is None else tuple(beta)
        k = spec.zero() if k is None else tuple(k)
        return cls(ring, spec, lattice, {(beta, k, z, lam, kap): coeff}, window)

    @classmethod
    def z_term(cls, ring, spec, lattice, window: Window | None = None) -> "FormalSeries":
        return cls.monomial(ring, spec, lattice, ring.one(), z=1, window=window)

    # -- basic protocol
    def _check(self, other: "FormalSeries"):
        if not (self.ring == other.ring and self.spec == other.spec and self.lattice == other.lattice):
            raise QLError("CONTEXT_MISMATCH", "series over different ring/spec/lattice")

    def __eq__(self, other):
        if not isinstance(other, FormalSeries):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self):
        return len(self.terms)

    def __add__(self, other: "FormalSeries") -> "FormalSeries":
        self._check(other)
        out = dict(self.terms)
        for key, x in other.terms.items():
            out[key] = out[key] + x if key in out else x
        return self.like(out, self.window.meet(other.window))

    def __neg__(self) -> "FormalSeries":
        return self.like({k: -x for k, x in self.terms.items()})

    def __sub__(self, other: "FormalSeries") -> "FormalSeries":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, FormalSeries):
            return series_mul(self, other)
        if isinstance(other, RingElement):
            return self.like({k: x * other for k, x in self.terms.items()})
        c = as_fraction(other)
        return self.like({k: x * c for k, x in self.terms.items()})

    def __rmul__(self, other):
        if isinstance(other, RingElement):
            return self.mul_ring_left(other)
        return self * other

    def mul_ring_left(self, r: RingElement) -> "FormalSeries":
        """r * (t^k x) = (-1)^{|r||t^k|} t^k (r x) for parity-homogeneous pieces of r."""
        out = {}
        for p in (0, 1):
            rp = r.parity_part(p)
            if not rp:
                continue
            for key, x in self.terms.items():
                sign = -1 if p and self.spec.parity(key[1]) else 1
                y = rp * x * sign
                out[key] = out[key] + y if key in out else y
        return self.like(out)

    def items(self):
        return sorted(self.terms.items(), key=lambda kv: kv[0])

    def with_window(self, window: Window) -> "FormalSeries":
        return self.like(self.terms, window)

    def map_terms(self, fn: Callable) -> "FormalSeries":
        return self.like({k: fn(k, x) for k, x in self.terms.items()})

    def blocks(self) -> dict:
        """Group terms by extended degree: (beta, k) -> {(z, lam, kap): coeff}."""
        out: dict = {}
        for (beta, k, z, lam, kap), x in self.items():
            out.setdefault((beta, k), {})[(z, lam, kap)] = x
        return out

    def max_order(self) -> Fraction:
        return max((self.lattice.order(b, k) for b, k, *_ in self.terms), default=Fraction(0))

    def __repr__(self):
        if not self.terms:
            return "FormalSeries(0)"
        parts = [f"q^{b} t^{k} z^{z} l^{lam} k^{kap}: {x!r}" for (b, k, z, lam, kap), x in self.items()]
        return "FormalSeries(" + "; ".join(parts) + ")"


def series_mul(a: FormalSeries, b: FormalSeries) -> FormalSeries:
    a._check(b)
    spec = a.spec
    window = a.window.meet(b.window)
    lattice = a.lattice
    b_info = [(key, x, spec.parity(key[1])) for key, x in b.terms.items()]
    out: dict = {}
    for ka, xa in a.terms.items():
        split = None
        for kb, xb, pb in b_info:
            beta = tuple(p + q for p, q in zip(ka[0], kb[0]))
            k = tuple(p + q for p, q in zip(ka[1], kb[1]))
            key = (beta, k, ka[2] + kb[2], ka[3] + kb[3], ka[4] + kb[4])
            if not window.admits(lattice, key):
                continue
            sign = spec.merge_sign(ka[1], kb[1])
            if not sign:
                continue
            if pb:
                if split is None:
                    split = (xa.parity_part(0), xa.parity_part(1))
                y = (split[0] - split[1]) * xb
            else:
                y = xa * xb
            if sign < 0:
                y = -y
            if y:
                out[key] = out[key] + y if key in out else y
    return FormalSeries(a.ring, spec, lattice, out, window)


def coeff_at(s: FormalSeries, beta, k=None, z: int = 0, lam: int = 0, kap: int = 0) -> RingElement:
    key = (tuple(beta), tuple(k if k is not None else s.spec.zero()), z, lam, kap)
    if not s.window.admits(s.lattice, key):
        raise QLError("OUT_OF_WINDOW", f"index {key} outside truncation window")
    return s.terms.get(key, s.ring.zero())


def truncate_nonneg_z(s: FormalSeries) -> FormalSeries:
    return s.like({k: x for k, x in s.terms.items() if k[2] >= 0})


def _powers(c: RingElement, need_nilpotent: bool) -> Callable[[int], RingElement]:
    cache = [c.ring.one()]

    def get(j):
        while len(cache) <= j:
            if not cache[-1]:
                return c.ring.zero()
            cache.append(cache[-1] * c)
        return cache[j]

    if need_nilpotent:
        if c.unit_part():
            raise QLError("NOT_INVERTIBLE", "shift has a unit part; (lambda - c) is not invertible")
        j = 1
        while get(j):
            j += 1
            if j > c.ring.dim + 1:
                raise QLError("NOT_INVERTIBLE", "shift is not nilpotent")
    return get


def substitute_z(s: FormalSeries, c: RingElement, delta, lam_window: tuple | None = None) -> FormalSeries:
    """Substitute z := (lambda - c)/delta; returns a z-free lambda-Laurent series."""
    delta = as_fraction(delta)
    if delta <= 0:
        raise QLError("VALIDATION_ERROR", "delta must be positive")
    has_negative = any(k[2] < 0 for k in s.terms)
    power = _powers(c, has_negative)
    lo, hi = lam_window if lam_window is not None else (s.window.lam_min, s.window.lam_max)
    window = s.window.replace(z_min=0, z_max=0, lam_min=lo, lam_max=hi)
    out: dict = {}

    def put(key, y):
        if y:
            out[key] = out[key] + y if key in out else y

    for (beta, k, a, lam, kap), x in s.terms.items():
        if a >= 0:
            scale = Fraction(1, 1) / delta ** a
            for j in range(a + 1):
                cj = power(j)
                if not cj:
                    break
                coef = scale * comb(a, j) * (-1) ** j
                put((beta, k, 0, lam + a - j, kap), x * cj * coef)
        else:
            m = -a
            scale = delta ** m
            j = 0
            while True:
                cj = power(j)
                if not cj:
                    break
                put((beta, k, 0, lam - m - j, kap), x * cj * (scale * comb(m + j - 1, j)))
                j += 1
    return FormalSeries(s.ring, s.spec, s.lattice, out, window)


def lambda_coefficient(s: FormalSeries, e: int) -> FormalSeries:
    w = s.window
    if (w.lam_min is not None and e < w.lam_min) or (w.lam_max is not None and e > w.lam_max):
        raise QLError("OUT_OF_WINDOW", f"lambda^{e} outside window [{w.lam_min}, {w.lam_max}]")
    terms = {(b, k, z, 0, kap): x for (b, k, z, lam, kap), x in s.terms.items() if lam == e}
    return s.like(terms, w.replace(lam_min=0, lam_max=0))


def kappa_limit(s: FormalSeries) -> FormalSeries:
    if any(k[4] < 0 for k in s.terms):
        raise QLError("NEGATIVE_KAPPA", "series has negative kappa exponents")
    return s.like({k: x for k, x in s.terms.items() if k[4] == 0})


def apply_hom(s: FormalSeries, hom: RingHom) -> FormalSeries:
    """Apply a ring homomorphism coefficient-wise (restriction of series)."""
    if not s.ring == hom.source:
        raise QLError("RING_MISMATCH", "series ring differs from the homomorphism source")
    return FormalSeries(hom.target, s.spec, s.lattice, {k: hom.apply(x) for k, x in s.terms.items()}, s.window)


def z_laurent(s: FormalSeries, beta, k=None) -> dict:
    """The (beta, k) block at lambda^0 kappa^0 as {z exponent: coefficient}."""
    beta = tuple(beta)
    k = tuple(k) if k is not None else s.spec.zero()
    return {z: x for (b, kk, z, lam, kap), x in s.terms.items() if b == beta and kk == k and lam == 0 and kap == 0}


# ---------------------------------------------------------------------------
# series files

HEADER = "%qlefschetz-series 1"


def _canon(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def dump_series(s: FormalSeries, ring_ref: str | None = None) -> str:
    lines = [HEADER,
             "%ring: " + _canon(ring_ref if ring_ref is not None else s.ring.name),
             "%z_sign: 1",
             "%spec: " + _canon({"parities": list(s.spec.parities),
                                 "weights": [[frac_str(v) for v in row] for row in s.spec.weights]}),
             "%lattice: " + _canon({"rank": s.lattice.rank,
                                    "rows": [[frac_str(v) for v in row] for row in s.lattice.bundle_pairings],
                                    "semi_positive": list(s.lattice.semi_positive),
                                    "positive_row": [frac_str(v) for v in s.lattice.positive_row]}),
             "%window: " + _canon(s.window.to_dict())]
    for (beta, k, z, lam, kap), x in s.items():
        for idx, c in x.sorted_items():
            lines.append(" | ".join([",".join(map(str, beta)), ",".join(map(str, k)), str(z), str(lam), str(kap),
                                     s.ring.basis[idx], frac_str(c)]))
    return "\n".join(lines) + "\n"


def load_series(text: str, ring: CohRing | None = None,
                resolver: Callable[[str], CohRing] | None = None) -> FormalSeries:
    header: dict = {}
    records = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("%"):
            if line == HEADER:
                continue
            key, _, val = line[1:].partition(":")
            try:
                header[key.strip()] = json.loads(val)
            except json.JSONDecodeError as exc:
                raise QLError("PARSE_ERROR", f"line {lineno}: bad header value", line=lineno) from exc
            continue
        parts = [p.strip() for p in line.split("|")]
        if len(parts) != 7:
            raise QLError("PARSE_ERROR", f"line {lineno}: expected 7 fields", line=lineno)
        records.append((lineno, parts))
    for req in ("ring", "spec", "lattice"):
        if req not in header:
            raise QLError("PARSE_ERROR", f"missing header %{req}")
    if ring is None:
        if resolver is None:
            raise QLError("PARSE_ERROR", f"cannot resolve ring reference {header['ring']!r}")
        ring = resolver(header["ring"])
    spec = ExtendedVariableSpec(tuple(header["spec"]["parities"]), tuple(tuple(r) for r in header["spec"]["weights"]))
    lat = header["lattice"]
    lattice = DegreeLattice(lat["rank"], tuple(tuple(r) for r in lat["rows"]), tuple(lat["semi_positive"]),
                            tuple(lat["positive_row"]))
    window = Window.from_dict(header["window"]) if "window" in header else Window.unbounded()
    z_sign = int(header.get("z_sign", 1))
    if z_sign not in (1, -1):
        raise QLError("PARSE_ERROR", "z_sign must be 1 or -1")
    acc: dict = {}
    for lineno, (b, k, z, lam, kap, label, c) in records:
        try:
            key = (tuple(int(v) for v in b.split(",") if v), tuple(int(v) for v in k.split(",") if v),
                   int(z), int(lam), int(kap))
            coef = Fraction(c)
        except ValueError as exc:
            raise QLError("PARSE_ERROR", f"line {lineno}: {exc}", line=lineno) from exc
        if len(key[0]) != lattice.rank or len(key[1]) != spec.count:
            raise QLError("PARSE_ERROR", f"line {lineno}: coordinate count mismatch", line=lineno)
        if z_sign < 0 and key[2] % 2:
            coef = -coef
        try:
            idx = ring.index(label)
        except QLError as exc:
            raise QLError("PARSE_ERROR", f"line {lineno}: unknown basis label {label!r}", line=lineno) from exc
        acc.setdefault(key, {})
        acc[key][idx] = acc[key].get(idx, Fraction(0)) + coef
    terms = {key: RingElement(ring, d) for key, d in acc.items()}
    for key in terms:
        if not window.admits(lattice, key):
            raise QLError("OUT_OF_WINDOW", f"record {key} outside the declared window")
    return FormalSeries(ring, spec, lattice, terms, window)


def sum_series(items: Iterable[FormalSeries], like: FormalSeries) -> FormalSeries:
    out: dict = {}
    window = like.window
    for s in items:
        window = window.meet(s.window)
        for key, x in s.terms.items():
            out[key] = out[key] + x if key in out else x
    return like.like(out, window)
