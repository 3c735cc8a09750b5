"""Genus-zero Gromov-Witten oracles.

An oracle answers <gamma_1 psi^{a_1}, ..., gamma_n psi^{a_n}>_{0,n,beta} as an
exact rational, or raises :class:`OracleGap`.  The built-in
:class:`SmallJOracle` only knows what follows from a small J-function:

* one-point descendants <gamma psi^j>_{0,1,beta} = (gamma, [J_beta]_{z^{-j-1}});
* degree-zero invariants (closed form on M_{0,n} x X);
* string, dilaton and divisor reductions down to those.

Nothing else is fabricated.  One-point values are read with the pairing
convention (gamma, phi^alpha) on the untwisted ordering; twisted-sector
insertions under a user oracle's own involution convention are the caller's
responsibility.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Protocol, Sequence

from ..coh_ring import RingElement, poincare_data
from ..errors import OracleGap
from ..targets import TargetModel


class GWOracle(Protocol):
    provenance: dict

    def invariant(self, beta: tuple, insertions: Sequence[tuple]) -> Fraction:
        ...


class SmallJOracle:
    def __init__(self, target: TargetModel):
        self.target = target
        self.ring = target.ring
        self.pairing, self.dual = poincare_data(target.ring)
        self.provenance: dict = {}
        self._cache: dict = {}
        self._one = target.ring.unit
        st = target.ring.sector_table
        self._divisors = {self.ring.index(lab): row for lab, row in target.divisor_pairing.items()}
        self._untwisted = {i for i in range(self.ring.dim) if self.ring.sectors[i] == st.untwisted}

    # -- public entry: multilinear in the classes
    def invariant(self, beta: tuple, insertions: Sequence[tuple]) -> Fraction:
        beta = tuple(beta)
        expanded = [[(i, c, a) for i, c in x.sorted_items()] for x, a in insertions]
        total = Fraction(0)

        def rec(pos, acc, coef):
            nonlocal total
            if pos == len(expanded):
                total += coef * self._basis_invariant(beta, tuple(acc))
                return
            for i, c, a in expanded[pos]:
                rec(pos + 1, acc + [(i, a)], coef * c)

        if all(expanded):
            rec(0, [], Fraction(1))
        return total

    def _key(self, beta, ins):
        if any(self.ring.parities[i] for i, _ in ins):
            return beta, ins
        return beta, tuple(sorted(ins))

    def _basis_invariant(self, beta: tuple, ins: tuple) -> Fraction:
        key = self._key(beta, ins)
        if key in self._cache:
            return self._cache[key]
        value, how = self._evaluate(*key)
        self._cache[key] = value
        self.provenance[key] = how
        return value

    def _evaluate(self, beta, ins):
        n = len(ins)
        ring = self.ring
        if not any(beta):
            if n < 3:
                return Fraction(0), "closed-form"
            if any(i not in self._untwisted for i, _ in ins):
                raise OracleGap(f"degree-zero invariant with twisted insertions {self._describe(beta, ins)}")
            if sum(a for _, a in ins) != n - 3:
                return Fraction(0), "closed-form"
            prod_ = ring.one()
            for i, _ in ins:
                prod_ = prod_ * ring.basis_element(i)
            multinom = Fraction(factorial(n - 3))
            for _, a in ins:
                multinom /= factorial(a)
            return multinom * self.pairing(prod_, ring.one()), "closed-form"
        if n == 1:
            i, j = ins[0]
            block = self.target.block(beta)
            coeff = block.get(-j - 1)
            if coeff is None:
                return Fraction(0), self.target.provenance
            return self.pairing(ring.basis_element(i), coeff), self.target.provenance
        if n == 0:
            raise OracleGap(f"unpointed invariant {self._describe(beta, ins)}")
        for pos, (i, a) in enumerate(ins):
            rest = ins[:pos] + ins[pos + 1:]
            if i == self._one and a == 0:
                total = Fraction(0)
                for l, (il, al) in enumerate(rest):
                    if al > 0:
                        total += self._basis_invariant(beta, rest[:l] + ((il, al - 1),) + rest[l + 1:])
                return total, "reduced"
            if i == self._one and a == 1:
                return (n - 3) * self._basis_invariant(beta, rest), "reduced"
            if a == 0 and i in self._divisors:
                row = self._divisors[i]
                total = sum((r * b for r, b in zip(row, beta)), Fraction(0)) * self._basis_invariant(beta, rest)
                D = ring.basis_element(i)
                for l, (il, al) in enumerate(rest):
                    if al > 0:
                        prod_ = D * ring.basis_element(il)
                        for k, c in prod_.sorted_items():
                            total += c * self._basis_invariant(beta, rest[:l] + ((k, al - 1),) + rest[l + 1:])
                return total, "reduced"
        raise OracleGap(f"no rule for {self._describe(beta, ins)}")

    def _describe(self, beta, ins) -> str:
        parts = ", ".join(f"{self.ring.basis[i]}*psi^{a}" for i, a in ins)
        return f"<{parts}>_(0,{len(ins)},{beta})"
