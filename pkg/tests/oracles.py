"""Independent oracles, written without importing the package under test.

Each oracle recomputes a quantity by a different route (sympy rational
function expansion, classical Picard-Fuchs/Yukawa formulas, nested-loop
enumeration) so that golden values are not produced by the code they check.
"""

from fractions import Fraction
from itertools import product
from math import factorial

import sympy as sp

H, z = sp.symbols("H z")


def _truncate_H(expr, n):
    """Taylor-expand a rational function in H at 0 up to H^n (H^{n+1} = 0)."""
    out = 0
    for j in range(n + 1):
        out += sp.cancel(sp.diff(expr, H, j).subs(H, 0) / sp.factorial(j)) * H ** j
    return sp.expand(out)


def projective_block(n, d):
    """z / prod_{m=1}^d (H + m z)^{n+1} modulo H^{n+1}, as {(H power, z power): Fraction}.

    Built by the hypergeometric recursion block_d = block_{d-1} / (H + d z)^{n+1}.
    """
    expr = z
    for m in range(1, d + 1):
        expr = expr / (H + m * z) ** (n + 1)
    return _poly_terms(_truncate_H(expr, n))


def hyperplane_block(n, d, degree=1, hmax=None):
    """z prod_{m=1}^{degree*d} (degree*H + m z) / prod_{m=1}^d (H + m z)^{n+1} modulo H^{n+1}."""
    num = z
    for m in range(1, degree * d + 1):
        num = num * (degree * H + m * z)
    den = 1
    for m in range(1, d + 1):
        den = den * (H + m * z) ** (n + 1)
    return _poly_terms(_truncate_H(num / den, n if hmax is None else hmax))


def _poly_terms(expr):
    out = {}
    for term in sp.Add.make_args(sp.expand(expr)):
        if term == 0:
            continue
        coeff, rest = term.as_coeff_Mul()
        powers = rest.as_powers_dict()
        hp = int(powers.get(H, 0))
        zp = int(powers.get(z, 0))
        out[(hp, zp)] = out.get((hp, zp), Fraction(0)) + Fraction(int(sp.numer(coeff)), int(sp.denom(coeff)))
    return {k: v for k, v in out.items() if v}


def quintic_I0_bruteforce(d):
    """Coefficient of z^1 H^0 in z prod_{m=1}^{5d}(5H+mz)/prod_{m=1}^d(H+mz)^5."""
    return hyperplane_block(4, d, degree=5, hmax=0).get((0, 1), Fraction(0))


def quintic_I1_bruteforce(d):
    """Coefficient of z^0 H^1 in the same block."""
    return hyperplane_block(4, d, degree=5, hmax=1).get((1, 0), Fraction(0))


# ---------------------------------------------------------------------------
# classical quintic mirror symmetry (Candelas-de la Ossa-Green-Parkes route)


def _mul(a, b, n):
    out = [Fraction(0)] * (n + 1)
    for i, x in enumerate(a):
        if x:
            for j in range(0, n + 1 - i):
                out[i + j] += x * b[j]
    return out


def _inv(a, n):
    out = [Fraction(0)] * (n + 1)
    out[0] = 1 / a[0]
    for k in range(1, n + 1):
        out[k] = -sum(a[j] * out[k - j] for j in range(1, k + 1)) / a[0]
    return out


def _exp(a, n):
    """exp of a power series with a[0] = 0."""
    out = [Fraction(0)] * (n + 1)
    out[0] = Fraction(1)
    # e' = a' e
    da = [k * a[k] for k in range(n + 1)]
    for k in range(1, n + 1):
        out[k] = sum(da[j] * out[k - j] for j in range(1, k + 1)) / k
    return out


def _harmonic(m):
    return sum((Fraction(1, i) for i in range(1, m + 1)), Fraction(0))


def yukawa_instantons(dmax):
    """n_1..n_dmax for the quintic from K = 5/((1-3125x) w0^2 (x dT/dx)^3)."""
    n = dmax
    w0 = [Fraction(factorial(5 * d), factorial(d) ** 5) for d in range(n + 1)]
    w1 = [Fraction(factorial(5 * d), factorial(d) ** 5) * 5 * (_harmonic(5 * d) - _harmonic(d)) for d in range(n + 1)]
    ratio = _mul(w1, _inv(w0, n), n)  # T = log x + ratio
    # Q = x exp(ratio); invert x = Q * u(Q)
    e = _exp(ratio, n)  # Q/x as series in x
    # x(Q): fixed point x = Q / e(x)
    inv_e = _inv(e, n)
    xq = [Fraction(0)] * (n + 1)
    xq[1] = Fraction(1)
    for _ in range(n + 1):
        # compose inv_e with xq: sum c_k xq^k
        comp = [Fraction(0)] * (n + 1)
        pw = [Fraction(1)] + [Fraction(0)] * n
        for k in range(n + 1):
            comp = [c + inv_e[k] * p for c, p in zip(comp, pw)]
            pw = _mul(pw, xq, n)
        xq = [Fraction(0)] + comp[:n]
    # x dT/dx = 1 + x ratio'
    dT = [Fraction(1)] + [k * ratio[k] for k in range(1, n + 1)]
    w0sq = _mul(w0, w0, n)
    denom = _mul(_mul(w0sq, _mul(dT, _mul(dT, dT, n), n), n), [Fraction(1), Fraction(-3125)] + [0] * (n - 1), n)
    K_x = [5 * c for c in _inv(denom, n)]
    # substitute x = x(Q)
    K_Q = [Fraction(0)] * (n + 1)
    pw = [Fraction(1)] + [Fraction(0)] * n
    for k in range(n + 1):
        K_Q = [c + K_x[k] * p for c, p in zip(K_Q, pw)]
        pw = _mul(pw, xq, n)
    assert K_Q[0] == 5
    # K = 5 + sum_d n_d d^3 Q^d/(1-Q^d) = 5 + sum_m Q^m sum_{d|m} n_d d^3
    inst = {}
    for m in range(1, n + 1):
        rest = K_Q[m] - sum(inst[d] * d ** 3 for d in inst if m % d == 0)
        inst[m] = rest / m ** 3
    return [inst[d] for d in range(1, n + 1)]


# ---------------------------------------------------------------------------
# meta-graph brute force


def _compositions(total, length):
    """Ordered tuples of `length` nonzero vectors (nonneg entries) with entrywise sum <= total."""
    if length == 0:
        yield ()
        return
    for first in product(*[range(x + 1) for x in total]):
        if not any(first):
            continue
        rest = tuple(t - f for t, f in zip(total, first))
        for tail in _compositions(rest, length - 1):
            yield (first,) + tail


def bruteforce_meta_graphs(beta, k, c, sectors, admissible, delta, lattice_max=None):
    """All tuples (c, beta_star, legs, m, stable) from compositions of (beta, k).

    Ordered compositions of the vector (beta, k) into nonzero leg degrees are
    listed first, then every sector assignment, then the admissibility and
    "delta > 0 legs first" filters.  Rank-1 lattice, integer beta.
    """
    N = len(k)
    total = (beta,) + tuple(k)
    out = []
    for length in range(0, beta + sum(k) + 1):
        for parts in _compositions(total, length):
            if tuple(sum(p[i + 1] for p in parts) for i in range(N)) != tuple(k):
                continue
            for secs in product(sectors, repeat=length):
                legs = tuple((p[0], tuple(p[1:]), ci) for p, ci in zip(parts, secs))
                if not all(admissible(*leg) for leg in legs):
                    continue
                flags = [delta(l[0], l[1]) > 0 for l in legs]
                if flags != sorted(flags, reverse=True):
                    continue
                bstar = beta - sum(l[0] for l in legs)
                out.append((c, bstar, legs, sum(flags), bstar != 0 or length >= 2))
    return sorted(out)
