"""Finite-dimensional super-commutative graded rings with sector decomposition.

A :class:`CohRing` models the Chen-Ruan cohomology of an orbifold with
rational coefficients: basis elements carry a rational degree, a parity and a
sector (inertia component).  Everything is exact; scalars are ``Fraction``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import lcm
from typing import Iterable, Mapping, Sequence

import yaml

from .errors import QLError


def as_fraction(x) -> Fraction:
    """Coerce ints, Fractions and "p/q" strings to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"not an exact scalar: {x!r}")


def frac_str(x: Fraction) -> str:
    """Canonical "p/q" text (q=1 kept) used in every serialized artifact."""
    return f"{x.numerator}/{x.denominator}"


def fractional_part(x: Fraction) -> Fraction:
    return x - (x.numerator // x.denominator)


# ---------------------------------------------------------------------------
# sectors


@dataclass(frozen=True)
class SectorTable:
    sectors: tuple
    involution: Mapping[str, str]
    band_order: Mapping[str, int]
    untwisted: str
    composition: Mapping[tuple, str] | None = None

    def __post_init__(self):
        object.__setattr__(self, "sectors", tuple(self.sectors))
        names = set(self.sectors)
        if len(names) != len(self.sectors):
            raise QLError("VALIDATION_ERROR", "duplicate sector identifiers")
        if self.untwisted not in names:
            raise QLError("VALIDATION_ERROR", f"untwisted sector {self.untwisted!r} not listed")
        for c in self.sectors:
            inv = self.involution.get(c)
            if inv not in names or self.involution.get(inv) != c:
                raise QLError("VALIDATION_ERROR", f"involution is not an order-2 permutation at {c!r}")
            a = self.band_order.get(c)
            if not isinstance(a, int) or a < 1:
                raise QLError("VALIDATION_ERROR", f"band order of {c!r} must be a positive integer")
            if a != self.band_order[inv]:
                raise QLError("VALIDATION_ERROR", f"a({c}) != a({inv})")
        if self.band_order[self.untwisted] != 1 or self.involution[self.untwisted] != self.untwisted:
            raise QLError("VALIDATION_ERROR", "untwisted sector must have a = 1 and be involution-fixed")
        if self.composition is not None:
            for key, val in self.composition.items():
                if val not in names:
                    raise QLError("VALIDATION_ERROR", f"composition {key} -> unknown sector {val!r}")

    def inverse(self, c: str) -> str:
        return self.involution[c]

    def compose(self, c1: str, c2: str) -> str | None:
        if self.composition is None:
            return None
        return self.composition.get((c1, c2))

    @classmethod
    def trivial(cls, name: str = "0") -> "SectorTable":
        return cls((name,), {name: name}, {name: 1}, name, {(name, name): name})

    @classmethod
    def from_fractions(cls, fracs: Iterable[Fraction]) -> "SectorTable":
        """Sectors labelled by exponents f in [0,1) of a cyclic action.

        The involution is f -> 1-f, a(f) is the denominator of f, and the
        composition is addition mod 1 whenever the set is closed under it.
        """
        fs = sorted({fractional_part(as_fraction(f)) for f in fracs} | {Fraction(0)})
        names = [str(f) for f in fs]
        inv = {str(f): str(fractional_part(-f)) for f in fs}
        band = {str(f): f.denominator for f in fs}
        comp = {}
        closed = True
        for f, g in product(fs, fs):
            h = fractional_part(f + g)
            if h not in fs:
                closed = False
                break
            comp[(str(f), str(g))] = str(h)
        return cls(tuple(names), inv, band, "0", comp if closed else None)


# ---------------------------------------------------------------------------
# ring


class CohRing:
    """Validated finite-dimensional super-commutative graded ring.

    ``mult_table`` maps index pairs (i, j) to tuples of (k, coefficient) with
    super signs already included.  ``inertia_table`` is the ordinary cup product
    inside each inertia component; it is only needed for the orbifold pairing.
    """

    def __init__(self, basis, degrees, parities, sectors, mult_table, sector_table: SectorTable,
                 unit: int = 0, inertia_table=None, basis_involution=None, integrals=None,
                 name: str = "", validate: bool = True):
        self.basis = tuple(str(b) for b in basis)
        n = len(self.basis)
        self.dim = n
        self.name = name
        self.degrees = tuple(as_fraction(d) for d in degrees)
        self.parities = tuple(int(p) % 2 for p in parities)
        self.sectors = tuple(sectors)
        self.sector_table = sector_table
        self.unit = unit
        if not (len(self.degrees) == len(self.parities) == len(self.sectors) == n):
            raise QLError("VALIDATION_ERROR", "basis/degree/parity/sector lengths differ")
        if len(set(self.basis)) != n:
            raise QLError("VALIDATION_ERROR", "duplicate basis labels")
        self._index = {b: i for i, b in enumerate(self.basis)}
        for s in self.sectors:
            if s not in sector_table.sectors:
                raise QLError("VALIDATION_ERROR", f"unknown sector {s!r}")
        self.table = _clean_table(mult_table, n)
        if inertia_table is None and len(sector_table.sectors) == 1:
            inertia_table = self.table
        self.inertia_table = None if inertia_table is None else _clean_table(inertia_table, n)
        if basis_involution is None:
            if any(sector_table.inverse(s) != s for s in self.sectors):
                raise QLError("VALIDATION_ERROR", "basis_involution required for non-self-inverse sectors")
            basis_involution = tuple(range(n))
        self.basis_involution = tuple(basis_involution)
        self.integrals = integrals
        self._key = (self.basis, self.degrees, self.parities, self.sectors,
                     tuple(sorted(self.table.items())))
        self._hash = hash(self._key)
        self.composition_checked = sector_table.composition is not None
        if validate:
            self._validate()

    # -- construction helpers
    def index(self, label: str) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise QLError("VALIDATION_ERROR", f"unknown basis label {label!r}") from None

    def element(self, coeffs: Mapping | None = None) -> "RingElement":
        out = {}
        for lab, c in (coeffs or {}).items():
            i = lab if isinstance(lab, int) else self.index(lab)
            c = as_fraction(c)
            if c:
                out[i] = out.get(i, Fraction(0)) + c
        return RingElement(self, out)

    def basis_element(self, label) -> "RingElement":
        return self.element({label: 1})

    def one(self) -> "RingElement":
        return RingElement(self, {self.unit: Fraction(1)})

    def zero(self) -> "RingElement":
        return RingElement(self, {})

    def scalar(self, x) -> "RingElement":
        return self.one() * as_fraction(x)

    def __eq__(self, other):
        return self is other or (isinstance(other, CohRing) and self._key == other._key)

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"CohRing({self.name or 'anonymous'}, dim={self.dim})"

    # -- arithmetic
    def mul(self, a: "RingElement", b: "RingElement", table=None) -> "RingElement":
        if not (a.ring == self and b.ring == self):
            raise QLError("RING_MISMATCH", "operands live in different rings")
        tab = self.table if table is None else table
        acc: dict[int, Fraction] = {}
        for i, ca in a.coeffs.items():
            for j, cb in b.coeffs.items():
                terms = tab.get((i, j))
                if not terms:
                    continue
                cc = ca * cb
                for k, s in terms:
                    acc[k] = acc.get(k, Fraction(0)) + cc * s
        return RingElement(self, {k: v for k, v in acc.items() if v})

    # -- validation
    def _validate(self):
        n = self.dim
        e = [RingElement(self, {i: Fraction(1)}) for i in range(n)]
        st = self.sector_table
        for i in range(n):
            if self.mul(e[self.unit], e[i]) != e[i] or self.mul(e[i], e[self.unit]) != e[i]:
                raise QLError("UNIT_VIOLATION", f"unit law fails on {self.basis[i]}", element=self.basis[i])
        if self.sectors[self.unit] != st.untwisted or self.degrees[self.unit] != 0 or self.parities[self.unit]:
            raise QLError("GRADING_VIOLATION", "unit must be even, degree 0, untwisted")
        for (i, j), terms in self.table.items():
            for k, _ in terms:
                if self.degrees[k] != self.degrees[i] + self.degrees[j] or \
                        self.parities[k] != (self.parities[i] + self.parities[j]) % 2:
                    raise QLError("GRADING_VIOLATION",
                                  f"{self.basis[i]}*{self.basis[j]} has a {self.basis[k]} term",
                                  pair=(self.basis[i], self.basis[j]))
                if self.composition_checked:
                    want = st.compose(self.sectors[i], self.sectors[j])
                    if want is not None and self.sectors[k] != want:
                        raise QLError("GRADING_VIOLATION",
                                      f"{self.basis[i]}*{self.basis[j]} leaves sector {want}",
                                      pair=(self.basis[i], self.basis[j]))
        for i in range(n):
            for j in range(i, n):
                sign = -1 if self.parities[i] and self.parities[j] else 1
                if self.mul(e[i], e[j]) != self.mul(e[j], e[i]) * sign:
                    raise QLError("COMMUTATIVITY_VIOLATION",
                                  f"{self.basis[i]}, {self.basis[j]}", pair=(self.basis[i], self.basis[j]))
        for i, j, k in product(range(n), repeat=3):
            if self.mul(self.mul(e[i], e[j]), e[k]) != self.mul(e[i], self.mul(e[j], e[k])):
                raise QLError("ASSOCIATIVITY_VIOLATION",
                              f"({self.basis[i]}, {self.basis[j]}, {self.basis[k]})",
                              triple=(self.basis[i], self.basis[j], self.basis[k]))
        inv = self.basis_involution
        if sorted(inv) != list(range(n)) or any(inv[inv[i]] != i for i in range(n)):
            raise QLError("VALIDATION_ERROR", "basis involution is not an involutive permutation")
        for i in range(n):
            if self.sectors[inv[i]] != st.inverse(self.sectors[i]):
                raise QLError("VALIDATION_ERROR", f"basis involution breaks sectors at {self.basis[i]}")
        if self.inertia_table is not None:
            for (i, j), terms in self.inertia_table.items():
                if self.sectors[i] != self.sectors[j] or any(self.sectors[k] != self.sectors[i] for k, _ in terms):
                    raise QLError("VALIDATION_ERROR", "inertia product must stay inside one sector")


def _clean_table(mult_table, n) -> dict:
    table = {}
    for (i, j), terms in dict(mult_table).items():
        if not (0 <= i < n and 0 <= j < n):
            raise QLError("VALIDATION_ERROR", f"table index out of range: {(i, j)}")
        acc: dict[int, Fraction] = {}
        for k, c in terms:
            if not 0 <= k < n:
                raise QLError("VALIDATION_ERROR", f"table index out of range: {k}")
            acc[k] = acc.get(k, Fraction(0)) + as_fraction(c)
        cleaned = tuple(sorted((k, c) for k, c in acc.items() if c))
        if cleaned:
            table[(i, j)] = cleaned
    return table


def _label_table(ring_basis: Sequence[str], table: Mapping) -> dict:
    idx = {b: i for i, b in enumerate(ring_basis)}

    def look(lab):
        if isinstance(lab, int):
            return lab
        if lab not in idx:
            raise QLError("VALIDATION_ERROR", f"unknown basis label {lab!r} in table")
        return idx[lab]

    out = {}
    for (a, b), terms in table.items():
        items = terms.items() if isinstance(terms, Mapping) else terms
        out[(look(a), look(b))] = [(look(c), as_fraction(v)) for c, v in items]
    return out


def build_ring(basis, degrees, parities, sectors, mult_table, sector_table: SectorTable | None = None,
               **kwargs) -> CohRing:
    """Build and validate a ring; table keys and entries may use labels."""
    basis = [str(b) for b in basis]
    sector_table = sector_table or SectorTable.trivial()
    if isinstance(sectors, Mapping):
        sectors = [sectors[b] for b in basis]
    if sectors is None:
        sectors = [sector_table.untwisted] * len(basis)
    inertia = kwargs.pop("inertia_table", None)
    if inertia is not None:
        inertia = _label_table(basis, inertia)
    inv = kwargs.pop("basis_involution", None)
    if isinstance(inv, Mapping):
        inv = [basis.index(inv.get(b, b)) for b in basis]
    unit = kwargs.pop("unit", 0)
    if isinstance(unit, str):
        unit = basis.index(unit)
    return CohRing(basis, degrees, parities, sectors, _label_table(basis, mult_table), sector_table,
                   unit=unit, inertia_table=inertia, basis_involution=inv, **kwargs)


class RingElement:
    """Immutable sparse element: basis index -> nonzero Fraction."""

    __slots__ = ("ring", "coeffs", "_hash")

    def __init__(self, ring: CohRing, coeffs: Mapping[int, Fraction]):
        self.ring = ring
        self.coeffs = {k: v for k, v in coeffs.items() if v}
        self._hash = None

    def __bool__(self):
        return bool(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __eq__(self, other):
        if isinstance(other, RingElement):
            return self.ring == other.ring and self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self == self.ring.scalar(other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(sorted(self.coeffs.items())))
        return self._hash

    def _check(self, other: "RingElement"):
        if not self.ring == other.ring:
            raise QLError("RING_MISMATCH", "operands live in different rings")

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.scalar(other)
        self._check(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, Fraction(0)) + v
        return RingElement(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return RingElement(self.ring, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, RingElement):
            return self.ring.mul(self, other)
        c = as_fraction(other)
        if not c:
            return RingElement(self.ring, {})
        return RingElement(self.ring, {k: v * c for k, v in self.coeffs.items()})

    def __rmul__(self, other):
        return self * other

    def __truediv__(self, other):
        return self * (1 / as_fraction(other))

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("use invert_unit_plus_nilpotent for negative powers")
        out = self.ring.one()
        for _ in range(e):
            out = out * self
        return out

    def coeff(self, label) -> Fraction:
        i = label if isinstance(label, int) else self.ring.index(label)
        return self.coeffs.get(i, Fraction(0))

    def unit_part(self) -> Fraction:
        return self.coeffs.get(self.ring.unit, Fraction(0))

    def restrict(self, pred) -> "RingElement":
        return RingElement(self.ring, {k: v for k, v in self.coeffs.items() if pred(k)})

    def parity_part(self, p: int) -> "RingElement":
        return self.restrict(lambda k: self.ring.parities[k] == p)

    def sector_parts(self) -> dict:
        out: dict[str, dict] = {}
        for k, v in self.coeffs.items():
            out.setdefault(self.ring.sectors[k], {})[k] = v
        return {s: RingElement(self.ring, d) for s, d in out.items()}

    def degree_parts(self) -> dict:
        out: dict[Fraction, dict] = {}
        for k, v in self.coeffs.items():
            out.setdefault(self.ring.degrees[k], {})[k] = v
        return {d: RingElement(self.ring, c) for d, c in out.items()}

    def parities_present(self) -> set:
        return {self.ring.parities[k] for k in self.coeffs}

    def sorted_items(self):
        return sorted(self.coeffs.items())

    def __repr__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for k, v in self.sorted_items():
            lab = self.ring.basis[k]
            parts.append(f"{v}*{lab}" if v != 1 else lab)
        return " + ".join(parts)


def ring_mul(a: RingElement, b: RingElement) -> RingElement:
    return a.ring.mul(a, b) if isinstance(b, RingElement) else a * b


def involution_pullback(x: RingElement) -> RingElement:
    inv = x.ring.basis_involution
    return RingElement(x.ring, {inv[k]: v for k, v in x.coeffs.items()})


def _nilpotent_powers(n: RingElement) -> list:
    powers = [n.ring.one()]
    for _ in range(n.ring.dim + 1):
        nxt = powers[-1] * n
        if not nxt:
            return powers
        powers.append(nxt)
    raise QLError("NOT_INVERTIBLE", "non-unit part is not nilpotent")


def invert_unit_plus_nilpotent(x: RingElement, lam_power: int = 0) -> dict:
    """Invert u*lam^k + n with n nilpotent; returns {lam exponent: coefficient}.

    With ``lam_power = 0`` the answer is a single entry at exponent 0.  The
    element ``x`` is read as: its unit coefficient multiplies lam^lam_power,
    everything else sits at lam^0.
    """
    u = x.unit_part()
    if not u:
        raise QLError("NOT_INVERTIBLE", "unit part is zero")
    n = x - x.ring.scalar(u)
    out: dict[int, RingElement] = {}
    for j, p in enumerate(_nilpotent_powers(-n / u)):
        e = -lam_power * (j + 1)
        term = p / u
        out[e] = out[e] + term if e in out else term
    return {e: c for e, c in out.items() if c}


def inverse(x: RingElement) -> RingElement:
    return invert_unit_plus_nilpotent(x).get(0, x.ring.zero())


# ---------------------------------------------------------------------------
# pairing


def _solve_inverse(mat: list) -> list | None:
    n = len(mat)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if aug[r][col]), None)
        if piv is None:
            return None
        aug[col], aug[piv] = aug[piv], aug[col]
        p = aug[col][col]
        aug[col] = [v / p for v in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


@dataclass
class Pairing:
    ring: CohRing
    gram: list
    dual_basis: list = field(default_factory=list)

    def __call__(self, a: RingElement, b: RingElement) -> Fraction:
        total = Fraction(0)
        for i, ca in a.coeffs.items():
            row = self.gram[i]
            for j, cb in b.coeffs.items():
                if row[j]:
                    total += ca * cb * row[j]
        return total


def poincare_data(ring: CohRing, fundamental_classes: Mapping | None = None):
    """Orbifold pairing sum_c a(c)^-1 int_c a . iota^* b and its dual basis."""
    functionals = fundamental_classes if fundamental_classes is not None else ring.integrals
    if functionals is None:
        raise QLError("VALIDATION_ERROR", "no integration functionals for this ring")
    if ring.inertia_table is None:
        raise QLError("VALIDATION_ERROR", "multi-sector ring needs an inertia_table for the pairing")
    st = ring.sector_table
    integ = [Fraction(0)] * ring.dim
    for sector, fn in functionals.items():
        top = max((ring.degrees[i] for i in range(ring.dim) if ring.sectors[i] == sector), default=None)
        for lab, v in fn.items():
            i = lab if isinstance(lab, int) else ring.index(lab)
            v = as_fraction(v)
            if ring.sectors[i] != sector or (v and ring.degrees[i] != top):
                raise QLError("VALIDATION_ERROR", f"functional for {sector} is not top-degree on {ring.basis[i]}")
            integ[i] = v / st.band_order[sector]
    n = ring.dim
    e = [RingElement(ring, {i: Fraction(1)}) for i in range(n)]
    gram = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            prod_ = ring.mul(e[i], involution_pullback(e[j]), ring.inertia_table)
            gram[i][j] = sum((v * integ[k] for k, v in prod_.coeffs.items()), Fraction(0))
    inv = _solve_inverse(gram)
    if inv is None:
        raise QLError("DEGENERATE_PAIRING", "Gram matrix is singular")
    dual = [RingElement(ring, {g: inv[g][b] for g in range(n) if inv[g][b]}) for b in range(n)]
    pairing = Pairing(ring, gram, dual)
    return pairing, dual


# ---------------------------------------------------------------------------
# homomorphisms


class RingHom:
    def __init__(self, source: CohRing, target: CohRing, images: Sequence[RingElement]):
        self.source = source
        self.target = target
        self.images = tuple(images)

    def __call__(self, x: RingElement) -> RingElement:
        return self.apply(x)

    def apply(self, x: RingElement) -> RingElement:
        if not x.ring == self.source:
            raise QLError("RING_MISMATCH", "element is not in the source ring")
        acc: dict[int, Fraction] = {}
        for k, v in x.coeffs.items():
            for j, w in self.images[k].coeffs.items():
                acc[j] = acc.get(j, Fraction(0)) + v * w
        return RingElement(self.target, acc)

    def then(self, other: "RingHom") -> "RingHom":
        """Composite x -> other(self(x))."""
        return RingHom(self.source, other.target, [other.apply(im) for im in self.images])


def _close_images(source: CohRing, target: CohRing, images: Mapping) -> dict:
    """Images by basis index; the unit and products of given generators are filled in."""
    known: dict = {}
    for i, lab in enumerate(source.basis):
        im = images.get(lab, images.get(i))
        if im is not None:
            known[i] = target.element(im) if isinstance(im, Mapping) else im
    known.setdefault(source.unit, target.one())
    grown = True
    while grown:
        grown = False
        for i, j in [(i, j) for i in sorted(known) for j in sorted(known)]:
            p = source.basis_element(i) * source.basis_element(j)
            if len(p.coeffs) == 1:
                (k, c), = p.coeffs.items()
                if k not in known and known[i].ring == target and known[j].ring == target:
                    known[k] = known[i] * known[j] / c
                    grown = True
    return known


def restriction_hom(source: CohRing, target: CohRing, images: Mapping) -> RingHom:
    """Validated homomorphism from generator images (unit and products inferred)."""
    known = _close_images(source, target, images)
    imgs = []
    for i, lab in enumerate(source.basis):
        im = known.get(i, target.zero())
        if not im.ring == target:
            raise QLError("NOT_A_HOMOMORPHISM", f"image of {lab} is not in the target ring", pair=(lab,))
        for k in im.coeffs:
            if target.degrees[k] != source.degrees[i] or target.parities[k] != source.parities[i]:
                raise QLError("NOT_A_HOMOMORPHISM", f"image of {lab} changes degree or parity", pair=(lab,))
            if target.sectors[k] != source.sectors[i]:
                raise QLError("NOT_A_HOMOMORPHISM", f"image of {lab} changes sector", pair=(lab,))
        imgs.append(im)
    hom = RingHom(source, target, imgs)
    if hom.apply(source.one()) != target.one():
        raise QLError("NOT_A_HOMOMORPHISM", "unit is not preserved")
    e = [source.basis_element(i) for i in range(source.dim)]
    for i in range(source.dim):
        for j in range(source.dim):
            if hom.apply(e[i] * e[j]) != imgs[i] * imgs[j]:
                raise QLError("NOT_A_HOMOMORPHISM", f"fails on ({source.basis[i]}, {source.basis[j]})",
                              pair=(source.basis[i], source.basis[j]))
    return hom


# ---------------------------------------------------------------------------
# tensor products and file I/O


def tensor_product(r1: CohRing, r2: CohRing, name: str = "") -> CohRing:
    """Graded tensor product with Koszul signs (a x b)(a' x b') = (-1)^{|b||a'|} aa' x bb'."""
    s1, s2 = r1.sector_table, r2.sector_table
    single1, single2 = len(s1.sectors) == 1, len(s2.sectors) == 1

    def sname(a, b):
        if single1:
            return b
        if single2:
            return a
        return f"{a},{b}"

    pairs = list(product(range(r1.dim), range(r2.dim)))
    labels = []
    for i, j in pairs:
        a, b = r1.basis[i], r2.basis[j]
        if i == r1.unit and j == r2.unit:
            labels.append(a)
        elif j == r2.unit:
            labels.append(a)
        elif i == r1.unit:
            labels.append(b)
        else:
            labels.append(f"{a}*{b}")
    if len(set(labels)) != len(labels):
        labels = [f"{r1.basis[i]}|{r2.basis[j]}" for i, j in pairs]
    pos = {p: n for n, p in enumerate(pairs)}

    def tens(tab1, tab2):
        if tab1 is None or tab2 is None:
            return None
        out = {}
        for (i, j), (i2, j2) in product(pairs, pairs):
            t1, t2 = tab1.get((i, i2)), tab2.get((j, j2))
            if not t1 or not t2:
                continue
            sign = -1 if r2.parities[j] and r1.parities[i2] else 1
            out[(pos[(i, j)], pos[(i2, j2)])] = [(pos[(k1, k2)], sign * c1 * c2) for k1, c1 in t1 for k2, c2 in t2]
        return out

    secs = [sname(a, b) for a, b in product(s1.sectors, s2.sectors)]
    inv = {sname(a, b): sname(s1.inverse(a), s2.inverse(b)) for a, b in product(s1.sectors, s2.sectors)}
    band = {sname(a, b): lcm(s1.band_order[a], s2.band_order[b]) for a, b in product(s1.sectors, s2.sectors)}
    comp = None
    if s1.composition is not None and s2.composition is not None:
        comp = {}
        for (a, b), (a2, b2) in product(product(s1.sectors, s2.sectors), repeat=2):
            x, y = s1.compose(a, a2), s2.compose(b, b2)
            if x is not None and y is not None:
                comp[(sname(a, b), sname(a2, b2))] = sname(x, y)
    st = SectorTable(tuple(secs), inv, band, sname(s1.untwisted, s2.untwisted), comp)
    integrals = None
    if r1.integrals is not None and r2.integrals is not None:
        integrals = {}
        for (sa, fa), (sb, fb) in product(r1.integrals.items(), r2.integrals.items()):
            fn = {}
            for la, va in fa.items():
                for lb, vb in fb.items():
                    ia = la if isinstance(la, int) else r1.index(la)
                    ib = lb if isinstance(lb, int) else r2.index(lb)
                    fn[labels[pos[(ia, ib)]]] = as_fraction(va) * as_fraction(vb)
            integrals[sname(sa, sb)] = fn
    return CohRing(labels, [r1.degrees[i] + r2.degrees[j] for i, j in pairs],
                   [r1.parities[i] + r2.parities[j] for i, j in pairs],
                   [sname(r1.sectors[i], r2.sectors[j]) for i, j in pairs],
                   tens(r1.table, r2.table), st, unit=pos[(r1.unit, r2.unit)],
                   inertia_table=tens(r1.inertia_table, r2.inertia_table),
                   basis_involution=[pos[(r1.basis_involution[i], r2.basis_involution[j])] for i, j in pairs],
                   integrals=integrals, name=name or f"{r1.name}x{r2.name}")


def ring_to_dict(ring: CohRing) -> dict:
    st = ring.sector_table

    def table_rows(tab):
        return [[ring.basis[i], ring.basis[j], [[ring.basis[k], frac_str(c)] for k, c in terms]]
                for (i, j), terms in sorted(tab.items())]

    data = {
        "name": ring.name,
        "basis": list(ring.basis),
        "degrees": [frac_str(d) for d in ring.degrees],
        "parities": list(ring.parities),
        "sectors": list(ring.sectors),
        "unit": ring.basis[ring.unit],
        "sector_table": {
            "sectors": list(st.sectors),
            "untwisted": st.untwisted,
        },
        "involution": {c: st.involution[c] for c in st.sectors},
        "band_orders": {c: st.band_order[c] for c in st.sectors},
        "basis_involution": {ring.basis[i]: ring.basis[j] for i, j in enumerate(ring.basis_involution) if i != j},
        "mult_table": table_rows(ring.table),
    }
    if st.composition is not None:
        data["composition"] = [[a, b, c] for (a, b), c in sorted(st.composition.items())]
    if ring.inertia_table is not None and ring.inertia_table is not ring.table:
        data["inertia_table"] = table_rows(ring.inertia_table)
    if ring.integrals is not None:
        data["integrals"] = {s: {(ring.basis[k] if isinstance(k, int) else k): frac_str(as_fraction(v))
                                 for k, v in fn.items()} for s, fn in ring.integrals.items()}
    return data


def ring_from_dict(data: Mapping) -> CohRing:
    try:
        basis = [str(b) for b in data["basis"]]
        sectors_meta = data.get("sector_table", {})
        sec_names = [str(s) for s in sectors_meta.get("sectors", ["0"])]
        involution = {str(k): str(v) for k, v in (data.get("involution") or {c: c for c in sec_names}).items()}
        band = {str(k): int(v) for k, v in (data.get("band_orders") or {c: 1 for c in sec_names}).items()}
        comp = data.get("composition")
        if comp is not None:
            comp = {(str(a), str(b)): str(c) for a, b, c in comp}
        elif len(sec_names) == 1:
            comp = {(sec_names[0], sec_names[0]): sec_names[0]}
        st = SectorTable(tuple(sec_names), involution, band, str(sectors_meta.get("untwisted", sec_names[0])), comp)

        def rows(raw):
            return {(str(a), str(b)): [(str(c), as_fraction(str(v))) for c, v in terms] for a, b, terms in raw}

        sectors = data.get("sectors")
        if sectors is None:
            sectors = [st.untwisted] * len(basis)
        return build_ring(basis, [as_fraction(str(d)) for d in data["degrees"]],
                          list(data.get("parities") or [0] * len(basis)), [str(s) for s in sectors],
                          rows(data.get("mult_table") or []), st,
                          unit=str(data.get("unit", basis[0])),
                          inertia_table=rows(data["inertia_table"]) if "inertia_table" in data else None,
                          basis_involution=data.get("basis_involution") or None,
                          integrals={str(s): {str(k): as_fraction(str(v)) for k, v in fn.items()}
                                     for s, fn in data["integrals"].items()} if data.get("integrals") else None,
                          name=str(data.get("name", "")))
    except QLError:
        raise
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise QLError("VALIDATION_ERROR", f"malformed ring definition: {exc}") from exc


def dump_ring(ring: CohRing) -> str:
    return yaml.safe_dump(ring_to_dict(ring), sort_keys=False, default_flow_style=None)


def load_ring(text: str) -> CohRing:
    from .io_util import parse_yaml

    return ring_from_dict(parse_yaml(text))
