"""Edge inverse Euler classes and node-smoothing factors.

lambda-polynomials are dicts {lambda exponent: coefficient}; coefficients may
be RingElements (numeric work) or SymExprs (structural dumps).
"""

from __future__ import annotations

from fractions import Fraction
from math import ceil, floor

from ..coh_ring import RingElement, as_fraction
from ..errors import QLError
from .symbolic import SymExpr


def _one(c1):
    return c1.ring.one() if isinstance(c1, RingElement) else SymExpr.const(1)


def _clean(p: dict) -> dict:
    return {e: x for e, x in p.items() if x}


def lam_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for i, x in a.items():
        for j, y in b.items():
            p = x * y
            out[i + j] = out[i + j] + p if i + j in out else p
    return _clean(out)


def _linear(a: Fraction, b: Fraction, c1) -> dict:
    """a*lambda + b*c1."""
    return _clean({1: _one(c1) * a, 0: c1 * b})


def edge_factor_counts(delta) -> tuple:
    """(factors in the product form, factors in the lambda form)."""
    delta = as_fraction(delta)
    return -1 - floor(-delta), ceil(delta)


def edge_product_form(delta, c1) -> dict:
    """prod_{i=1}^{-1-floor(-delta)} (lambda + (i/delta)(c1 - lambda))."""
    delta = as_fraction(delta)
    out = {0: _one(c1)}
    for i in range(1, edge_factor_counts(delta)[0] + 1):
        out = lam_mul(out, _linear(1 - Fraction(i) / delta, Fraction(i) / delta, c1))
    return out


def edge_lambda_form(delta, c1) -> dict:
    """(1/lambda) prod_{0 <= j < delta} (c1 + (delta - j)(lambda - c1)/delta)."""
    delta = as_fraction(delta)
    out = {0: _one(c1)}
    for j in range(edge_factor_counts(delta)[1]):
        out = lam_mul(out, _linear((delta - j) / delta, Fraction(j) / delta, c1))
    return {e - 1: x for e, x in out.items()}


def edge_inverse_euler(delta, c1, form: str = "product") -> dict:
    """Inverse Euler class of an edge of degree delta; both forms are computed and compared."""
    delta = as_fraction(delta)
    if delta <= 0:
        raise QLError("VALIDATION_ERROR", "edge degree must be positive")
    prod_ = edge_product_form(delta, c1)
    lam = edge_lambda_form(delta, c1)
    if prod_ != lam:
        raise QLError("FORM_MISMATCH", f"edge forms disagree at delta={delta}")
    if form not in ("product", "lambda_form"):
        raise QLError("VALIDATION_ERROR", f"unknown form {form!r}")
    return prod_ if form == "product" else lam


def node_smoothing_factor(side: str, a_e, root: str, delta, psi: str = "psi", c1=None,
                          deformation: bool = False) -> SymExpr:
    """Zero side: (lambda - c1)/(a s delta) - psi/(a s); infinity side: (-lambda + c1)/(a r delta) - psi/(a r)."""
    delta, a_e = as_fraction(delta), as_fraction(a_e)
    if delta <= 0:
        raise QLError("VALIDATION_ERROR", "node factor needs delta > 0")
    lam = SymExpr.sym("lambda")
    c1 = SymExpr.sym("c1") if c1 is None else c1
    inv_root = SymExpr.sym(root, -1)
    if side == "zero":
        out = (lam - c1) * inv_root / (a_e * delta) - SymExpr.sym(psi) * inv_root / a_e
    elif side == "infinity":
        out = (c1 - lam) * inv_root / (a_e * delta) - SymExpr.sym(psi) * inv_root / a_e
    else:
        raise QLError("VALIDATION_ERROR", f"unknown side {side!r}")
    return out * SymExpr.sym("lambda", -1) if deformation else out


def lam_poly_str(p: dict) -> str:
    """Canonical text of a lambda-polynomial with SymExpr coefficients."""
    total = SymExpr()
    for e, x in sorted(p.items()):
        total = total + (x if isinstance(x, SymExpr) else SymExpr.const(x)) * SymExpr.sym("lambda", e)
    return str(total)
