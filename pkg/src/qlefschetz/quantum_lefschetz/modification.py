"""Hypergeometric modification of J-functions and the truncation mu^+."""

from __future__ import annotations

from fractions import Fraction
from math import ceil

from ..errors import QLError
from ..formal_series import FormalSeries, truncate_nonneg_z
from .admissible import AdmissibleContext, validate_admissible_series


def factor_count(v: Fraction) -> int:
    """Number of integers m with 0 <= m < v."""
    return max(0, ceil(v))


def hyper_factor(ctx: AdmissibleContext, beta, k, twist_kappa: bool = False) -> dict:
    """prod_j prod_{0<=m<v_j} (c1(L_j) + (v_j - m) z [+ kappa]) as {(z exp, kappa exp): RingElement}."""
    ring = ctx.target.ring
    if ring is None:
        raise QLError("VALIDATION_ERROR", f"target {ctx.target.name} has no ring")
    poly = {(0, 0): ring.one()}
    for L, v in zip(ctx.bundles, ctx.v(tuple(beta), tuple(k))):
        if L.c1 is None:
            raise QLError("VALIDATION_ERROR", f"bundle {L.name} has no first Chern class")
        for m in range(factor_count(v)):
            lin = {(0, 0): L.c1, (1, 0): ring.scalar(v - m)}
            if twist_kappa:
                lin[(0, 1)] = ring.one()
            out: dict = {}
            for (za, ka), x in poly.items():
                for (zb, kb), y in lin.items():
                    p = x * y
                    if p:
                        key = (za + zb, ka + kb)
                        out[key] = out[key] + p if key in out else p
            poly = {key: x for key, x in out.items() if x}
    return poly


def hypergeometric_modification(ctx: AdmissibleContext, J: FormalSeries, twist_kappa: bool = False,
                                validate: bool = True) -> FormalSeries:
    """Multiply each (beta,k)-block of J by its hypergeometric factor.

    The z-window of the result shrinks from below by the largest factor degree,
    since input terms below the window would otherwise feed into it.
    """
    if validate:
        report = validate_admissible_series(ctx, J)
        if not report.ok:
            v = report.violations[0]
            raise QLError("NON_ADMISSIBLE_INPUT",
                          f"{v.kind} at beta={v.beta} k={v.k} c={v.sector} z^{v.z}", report=report)
    factors: dict = {}
    shift = 0
    out: dict = {}
    for (beta, k, z, lam, kap), x in J.terms.items():
        fk = (beta, k)
        if fk not in factors:
            factors[fk] = hyper_factor(ctx, beta, k, twist_kappa)
            shift = max(shift, max(zz for zz, _ in factors[fk]))
        for (dz, dk), f in factors[fk].items():
            y = x * f
            if y:
                key = (beta, k, z + dz, lam, kap + dk)
                out[key] = out[key] + y if key in out else y
    w = J.window
    if w.z_min is not None and w.order is not None:
        lat = ctx.target.lattice
        for beta in lat.points(w.order):
            for k in ctx.spec.degrees(w.order, lat.beta_order(beta)):
                shift = max(shift, sum(factor_count(v) for v in ctx.v(beta, k)))
    window = w.replace(z_min=None if w.z_min is None else w.z_min + shift)
    return J.like(out, window)


def mu_plus(Jtw: FormalSeries) -> FormalSeries:
    """[Jtw - z]_+."""
    z = FormalSeries.z_term(Jtw.ring, Jtw.spec, Jtw.lattice, Jtw.window)
    return truncate_nonneg_z(Jtw - z)
