"""Finite groups, cyclic characters and the edge automorphism formulas.

Characters are stored as exponents in Q/Z (the value e^{2 pi i x} is never
formed).  The group H_e = G x_{mu_t} Z of an edge is never built; the brute
force works with C_G(g) x Z directly and reduces modulo gamma_e = (g, t delta).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations, product
from math import lcm
from pathlib import Path

from .coh_ring import as_fraction, frac_str, fractional_part
from .errors import QLError
from .io_util import dump_json, parse_yaml, read_text


def age_of(q) -> Fraction:
    return fractional_part(as_fraction(q))


class FiniteGroup:
    """Group given by a multiplication table on 0..n-1."""

    def __init__(self, table, name: str = "", validate: bool = True):
        self.table = tuple(tuple(int(x) for x in row) for row in table)
        self.name = name
        n = len(self.table)
        if n == 0 or any(len(row) != n for row in self.table):
            raise QLError("VALIDATION_ERROR", "multiplication table must be square and nonempty")
        ids = [e for e in range(n) if all(self.table[e][x] == x and self.table[x][e] == x for x in range(n))]
        if not ids:
            raise QLError("VALIDATION_ERROR", "no identity element")
        self.identity = ids[0]
        inv = []
        for x in range(n):
            cands = [y for y in range(n) if self.table[x][y] == self.identity]
            if not cands:
                raise QLError("VALIDATION_ERROR", f"element {x} has no inverse")
            inv.append(cands[0])
        self.inverse = tuple(inv)
        if validate:
            for x in range(n):
                if sorted(self.table[x]) != list(range(n)):
                    raise QLError("VALIDATION_ERROR", f"row {x} is not a permutation")
            for x, y, z in product(range(n), repeat=3):
                if self.table[self.table[x][y]][z] != self.table[x][self.table[y][z]]:
                    raise QLError("VALIDATION_ERROR", f"associativity fails on ({x}, {y}, {z})")

    @property
    def order(self) -> int:
        return len(self.table)

    def mul(self, x: int, y: int) -> int:
        return self.table[x][y]

    def power(self, x: int, n: int) -> int:
        if n < 0:
            x, n = self.inverse[x], -n
        out = self.identity
        for _ in range(n):
            out = self.table[out][x]
        return out

    def element_order(self, x: int) -> int:
        k, y = 1, x
        while y != self.identity:
            y = self.table[y][x]
            k += 1
        return k

    def centralizer(self, g: int) -> list:
        return [h for h in range(self.order) if self.table[h][g] == self.table[g][h]]

    def is_abelian(self) -> bool:
        return all(self.table[x][y] == self.table[y][x] for x in range(self.order) for y in range(x))

    def is_cyclic(self) -> bool:
        return any(self.element_order(x) == self.order for x in range(self.order))

    def generators(self) -> list:
        """A small generating set, chosen greedily by element order."""
        gens: list = []
        span = {self.identity}
        for x in sorted(range(self.order), key=lambda x: (-self.element_order(x), x)):
            if x not in span:
                gens.append(x)
                span = self._closure(gens)
            if len(span) == self.order:
                break
        return gens

    def _closure(self, gens) -> set:
        span = {self.identity}
        frontier = [self.identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.table[x][g]
                    if y not in span:
                        span.add(y)
                        nxt.append(y)
            frontier = nxt
        return span

    def __repr__(self):
        return f"FiniteGroup({self.name or '?'}, order={self.order})"


# ---------------------------------------------------------------------------
# catalog


def cyclic_group(n: int) -> FiniteGroup:
    return FiniteGroup([[(i + j) % n for j in range(n)] for i in range(n)], f"Z{n}")


def _from_elements(elements, mul, name) -> FiniteGroup:
    index = {e: i for i, e in enumerate(elements)}
    return FiniteGroup([[index[mul(a, b)] for b in elements] for a in elements], name)


def dihedral_group(n: int) -> FiniteGroup:
    """Symmetries of the n-gon, order 2n: (r, s) with r in Z/n, s in {0, 1}."""
    elements = [(r, s) for s in (0, 1) for r in range(n)]

    def mul(a, b):
        r1, s1 = a
        r2, s2 = b
        return ((r1 + (-r2 if s1 else r2)) % n, (s1 + s2) % 2)

    return _from_elements(elements, mul, f"D{n}")


def _perm_group(perms, name) -> FiniteGroup:
    def mul(a, b):  # apply b first, then a
        return tuple(a[b[i]] for i in range(len(a)))

    return _from_elements(sorted(perms), mul, name)


def _sign(p) -> int:
    s = 1
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                s = -s
    return s


def symmetric_group(n: int) -> FiniteGroup:
    return _perm_group(list(permutations(range(n))), f"S{n}")


def alternating_group(n: int) -> FiniteGroup:
    return _perm_group([p for p in permutations(range(n)) if _sign(p) == 1], f"A{n}")


def quaternion_group() -> FiniteGroup:
    """Q8 as pairs (sign, unit) with units 1, i, j, k."""
    # unit products: (sign, unit)
    tab = {("1", u): (1, u) for u in "1ijk"}
    tab.update({(u, "1"): (1, u) for u in "ijk"})
    tab.update({("i", "i"): (-1, "1"), ("j", "j"): (-1, "1"), ("k", "k"): (-1, "1"),
                ("i", "j"): (1, "k"), ("j", "k"): (1, "i"), ("k", "i"): (1, "j"),
                ("j", "i"): (-1, "k"), ("k", "j"): (-1, "i"), ("i", "k"): (-1, "j")})
    elements = [(s, u) for s in (1, -1) for u in "1ijk"]

    def mul(a, b):
        s, u = tab[(a[1], b[1])]
        return (a[0] * b[0] * s, u)

    return _from_elements(elements, mul, "Q8")


def direct_product(g1: FiniteGroup, g2: FiniteGroup) -> FiniteGroup:
    n2 = g2.order
    table = [[g1.mul(a // n2, b // n2) * n2 + g2.mul(a % n2, b % n2) for b in range(g1.order * n2)]
             for a in range(g1.order * n2)]
    return FiniteGroup(table, f"{g1.name}x{g2.name}", validate=False)


def group_catalog(max_order: int = 24) -> list:
    """Cyclic, dihedral, symmetric (up to S4), alternating A4, Q8 and small abelian products."""
    out = [cyclic_group(n) for n in range(1, max_order + 1)]
    out += [dihedral_group(n) for n in range(2, max_order // 2 + 1)]
    out += [g for g in (symmetric_group(3), symmetric_group(4), alternating_group(4), quaternion_group())
            if g.order <= max_order]
    z = {n: cyclic_group(n) for n in (2, 3, 4, 6)}
    for a, b in ((2, 2), (2, 4), (3, 3), (2, 6), (4, 4)):
        if a * b <= max_order:
            out.append(direct_product(z[a], z[b]))
    if 8 <= max_order:
        out.append(direct_product(direct_product(z[2], z[2]), z[2]))
    return out


# ---------------------------------------------------------------------------
# characters


@dataclass(frozen=True)
class CyclicCharacter:
    group: FiniteGroup
    values: tuple  # element index -> exponent in [0, 1)

    def __post_init__(self):
        vals = tuple(age_of(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        G = self.group
        if len(vals) != G.order:
            raise QLError("VALIDATION_ERROR", "one character value per group element")
        for x in range(G.order):
            for y in range(G.order):
                if vals[G.mul(x, y)] != age_of(vals[x] + vals[y]):
                    raise QLError("VALIDATION_ERROR", f"not a homomorphism on ({x}, {y})")

    def __call__(self, x: int) -> Fraction:
        return self.values[x]

    @property
    def image_order(self) -> int:
        return lcm(*(v.denominator for v in self.values))

    def kernel(self) -> list:
        return [x for x, v in enumerate(self.values) if v == 0]


def characters(G: FiniteGroup) -> list:
    """All homomorphisms G -> Q/Z, by extension from a generating set."""
    gens = G.generators()
    out = []
    for choice in product(*[range(G.element_order(g)) for g in gens]):
        vals = {G.identity: Fraction(0)}
        frontier = [G.identity]
        ok = True
        while frontier and ok:
            nxt = []
            for x in frontier:
                for g, c in zip(gens, choice):
                    y = G.mul(x, g)
                    v = age_of(vals[x] + Fraction(c, G.element_order(g)))
                    if y in vals:
                        if vals[y] != v:
                            ok = False
                            break
                    else:
                        vals[y] = v
                        nxt.append(y)
                if not ok:
                    break
            frontier = nxt
        if not ok:
            continue
        try:
            out.append(CyclicCharacter(G, tuple(vals[x] for x in range(G.order))))
        except QLError:
            continue
    return out


# ---------------------------------------------------------------------------
# central extension G(eta, i)


@dataclass
class CentralExtension:
    group: FiniteGroup
    elements: list  # (g, b) with b in Q/Z and eta(g) = i b mod 1
    projection: list
    kernel: list  # indices of (e, j/i)
    eta_i: CyclicCharacter


def central_extension(G: FiniteGroup, eta: CyclicCharacter, i: int) -> CentralExtension:
    if i < 1:
        raise QLError("VALIDATION_ERROR", "i must be a positive integer")
    elements = [(g, age_of((eta(g) + j) / Fraction(i))) for g in range(G.order) for j in range(i)]
    index = {e: n for n, e in enumerate(elements)}
    table = [[index[(G.mul(a[0], b[0]), age_of(a[1] + b[1]))] for b in elements] for a in elements]
    H = FiniteGroup(table, f"{G.name}({i})")
    kernel = [n for n, (g, _) in enumerate(elements) if g == G.identity]
    eta_i = CyclicCharacter(H, tuple(b for _, b in elements))
    return CentralExtension(H, elements, [g for g, _ in elements], kernel, eta_i)


# ---------------------------------------------------------------------------
# edge automorphisms


@dataclass(frozen=True)
class EdgeGroupData:
    group: FiniteGroup
    rho: CyclicCharacter
    g: int
    delta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "delta", as_fraction(self.delta))

    @property
    def a(self) -> int:
        return self.group.element_order(self.g)

    @property
    def age(self) -> Fraction:
        return self.rho(self.g)

    def check(self):
        if self.delta <= 0:
            raise QLError("INVALID_EDGE_DATA", "delta must be positive")
        if fractional_part(self.delta - self.age) != 0:
            raise QLError("INVALID_EDGE_DATA", f"delta={frac_str(self.delta)} is not congruent to age "
                                               f"{frac_str(self.age)} mod Z")
        if (self.a * self.delta).denominator != 1:
            raise QLError("INVALID_EDGE_DATA", "a * delta is not an integer")


def edge_aut_order(d: EdgeGroupData) -> int:
    """|Aut(f)| = delta |C_G(g)|."""
    d.check()
    value = d.delta * len(d.group.centralizer(d.g))
    if value.denominator != 1:
        raise QLError("NON_INTEGRAL", f"delta |C_G(g)| = {frac_str(value)} is not an integer")
    return int(value)


def edge_aut_bruteforce(d: EdgeGroupData, window: int = 0) -> int:
    """|C_{H_e}(gamma_e)/<gamma_e>| by enumerating (h, n) in C_G(g) x [-W, W] and reducing mod gamma_e."""
    d.check()
    G = d.group
    t = d.rho.image_order
    shift = t * d.delta
    if shift.denominator != 1:
        raise QLError("INVALID_EDGE_DATA", "t * delta is not an integer")
    shift = int(shift)
    W = max(window, shift)
    cent = G.centralizer(d.g)
    reps = set()
    for h in cent:
        r = int(d.rho(h) * t)  # rho(h) = r/t
        for n in range(-W, W + 1):
            if (n - r) % t:
                continue
            # (h, n) * gamma^{-q} with q = floor(n / shift) lands in n' in [0, shift)
            q = n // shift
            reps.add((G.mul(h, G.power(d.g, -q)), n - q * shift))
    return len(reps)


def kernel_order(a: int, delta) -> int:
    """Order a*delta of the kernel of Aut(f) -> sector automorphisms."""
    value = a * as_fraction(delta)
    if value.denominator != 1:
        raise QLError("NON_INTEGRAL", f"a * delta = {frac_str(value)} is not an integer")
    return int(value)


def valid_deltas(age: Fraction, a: int, max_delta) -> list:
    """Positive delta <= max_delta with delta = age mod Z (a delta is then an integer)."""
    out = []
    x = age if age > 0 else Fraction(1)
    while x <= max_delta:
        out.append(x)
        x += 1
    return out


def sweep(groups=None, max_delta=4) -> list:
    """Compare formula and brute force for every group, character, element and valid delta."""
    rows = []
    for G in groups if groups is not None else group_catalog():
        for rho in characters(G):
            for g in range(G.order):
                a = G.element_order(g)
                for delta in valid_deltas(rho(g), a, max_delta):
                    d = EdgeGroupData(G, rho, g, delta)
                    formula = edge_aut_order(d)
                    brute = edge_aut_bruteforce(d)
                    ker = kernel_order(a, delta)
                    quotient = Fraction(len(G.centralizer(g)), a)
                    rows.append({"group": G.name, "g": g, "rho": [frac_str(v) for v in rho.values],
                                 "delta": frac_str(delta), "formula": formula, "bruteforce": brute,
                                 "kernel": ker, "exact_sequence": ker * quotient == formula})
    return rows


# ---------------------------------------------------------------------------
# files


def dump_group(G: FiniteGroup) -> str:
    return dump_json({"order": G.order, "name": G.name, "table": [x for row in G.table for x in row]})


def load_group(text: str) -> FiniteGroup:
    data = parse_yaml(text)
    n = int(data["order"])
    flat = [int(x) for x in data["table"]]
    if len(flat) != n * n:
        raise QLError("VALIDATION_ERROR", f"table has {len(flat)} entries, expected {n * n}")
    return FiniteGroup([flat[i * n:(i + 1) * n] for i in range(n)], str(data.get("name", "")))


def dump_character(chi: CyclicCharacter) -> str:
    return dump_json({str(i): frac_str(v) for i, v in enumerate(chi.values)})


def load_character(text: str, G: FiniteGroup) -> CyclicCharacter:
    data = parse_yaml(text)
    vals = [Fraction(0)] * G.order
    for k, v in data.items():
        vals[int(k)] = as_fraction(str(v))
    return CyclicCharacter(G, tuple(vals))


def load_group_file(path) -> FiniteGroup:
    return load_group(read_text(Path(path)))
