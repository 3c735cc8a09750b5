"""Laurent polynomials in named symbols with exact rational coefficients.

Used for the structural (unevaluated) side of the localization recursion:
lambda, r, s, psi_i, c1 and opaque classes such as CD(d) are plain symbols.
"""

from __future__ import annotations

from fractions import Fraction

from ..coh_ring import as_fraction, frac_str


class SymExpr:
    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        for mono, c in (terms or {}).items():
            c = as_fraction(c)
            if c:
                mono = tuple(sorted((s, e) for s, e in mono if e))
                clean[mono] = clean.get(mono, Fraction(0)) + c
        self.terms = {m: c for m, c in clean.items() if c}

    @classmethod
    def sym(cls, name: str, power: int = 1) -> "SymExpr":
        return cls({((name, power),): 1})

    @classmethod
    def const(cls, c) -> "SymExpr":
        return cls({(): c})

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, SymExpr):
            other = SymExpr.const(other)
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def _coerce(self, other) -> "SymExpr":
        return other if isinstance(other, SymExpr) else SymExpr.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, Fraction(0)) + c
        return SymExpr(out)

    __radd__ = __add__

    def __neg__(self):
        return SymExpr({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                exps = dict(m1)
                for s, e in m2:
                    exps[s] = exps.get(s, 0) + e
                m = tuple(sorted((s, e) for s, e in exps.items() if e))
                out[m] = out.get(m, Fraction(0)) + c1 * c2
        return SymExpr(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, SymExpr):
            if len(other.terms) != 1:
                raise ValueError("division by a non-monomial")
            (m, c), = other.terms.items()
            return self * SymExpr({tuple((s, -e) for s, e in m): 1 / c})
        return self * (1 / as_fraction(other))

    def __pow__(self, n: int):
        if n < 0:
            return SymExpr.const(1) / (self ** -n)
        out = SymExpr.const(1)
        for _ in range(n):
            out = out * self
        return out

    def subs(self, name: str, value) -> "SymExpr":
        """Substitute a symbol by an expression (nonnegative powers) or a monomial."""
        value = self._coerce(value)
        out = SymExpr()
        for m, c in self.terms.items():
            term = SymExpr.const(c)
            for s, e in m:
                term = term * (value ** e if s == name else SymExpr.sym(s, e))
            out = out + term
        return out

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for m, c in sorted(self.terms.items()):
            mono = "*".join(s if e == 1 else f"{s}^{e}" for s, e in m)
            parts.append(frac_str(c) + ("*" + mono if mono else ""))
        return " + ".join(parts)

    __repr__ = __str__
