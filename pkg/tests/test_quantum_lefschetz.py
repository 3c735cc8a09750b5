import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qlefschetz.coh_ring import restriction_hom
from qlefschetz.errors import OracleGap, QLError
from qlefschetz.formal_series import ExtendedVariableSpec, FormalSeries, Window, apply_hom, kappa_limit, z_laurent
from qlefschetz.quantum_lefschetz import (AdmissibleContext, SmallJOracle, check_main_theorem,
                                          extract_instanton_numbers, hyper_factor, hypergeometric_modification,
                                          is_admissible_pair, mirror_normalize, mu_plus, validate_admissible_series)
from qlefschetz.targets import (LineBundleData, builtin_target, make_projective_target, make_quintic_target,
                                small_J_series)

from generators import contexts, random_admissible
from oracles import hyperplane_block, quintic_I0_bruteforce, quintic_I1_bruteforce, yukawa_instantons

F = Fraction


def quintic_ctx():
    P4 = builtin_target("P4")
    X = P4.with_bundle(LineBundleData("O(5)", P4.ring.basis_element("H") * 5, (F(5),), {}, True))
    return AdmissibleContext(X, bundle_subset=(1,))


def hyperplane_ctx(n, spec=None):
    return AdmissibleContext(make_projective_target(n), spec or ExtendedVariableSpec(), (0,))


# -- admissibility

def test_admissible_examples():
    ctx = quintic_ctx()
    assert all(is_admissible_pair(ctx, (d,), (), "0") for d in range(6))
    wp = AdmissibleContext(builtin_target("WP1,1,2"))
    assert is_admissible_pair(wp, (1,), (), "1/2")      # beta(L) = 1/2
    assert not is_admissible_pair(wp, (2,), (), "1/2")  # beta(L) = 1
    wpk = AdmissibleContext(builtin_target("WP1,1,2"), ExtendedVariableSpec((0,), (("1/2",),)))
    assert is_admissible_pair(wpk, (0,), (1,), "1/2")


def test_validate_examples():
    T = make_projective_target(4)
    ctx = hyperplane_ctx(4)
    J = small_J_series(T, 3)
    assert validate_admissible_series(ctx, J).ok
    bad = J + FormalSeries.monomial(T.ring, J.spec, J.lattice, T.ring.basis_element("H"), window=J.window)
    rep = validate_admissible_series(ctx, bad)
    assert [v.kind for v in rep.violations] == ["CONSTANT_BLOCK"]
    E = builtin_target("ExP1")
    spec = ExtendedVariableSpec((1,), ((1,),))
    ectx = AdmissibleContext(E, spec)
    s = FormalSeries.monomial(E.ring, spec, E.lattice, E.ring.basis_element("H"), beta=(0,), k=(1,), z=-1)
    rep = validate_admissible_series(ectx, s + FormalSeries.z_term(E.ring, spec, E.lattice, s.window))
    assert [v.kind for v in rep.violations] == ["PARITY"]


def test_non_admissible_block_flagged():
    B = builtin_target("P1xBmu2")
    ctx = AdmissibleContext(B)
    g = B.ring.basis_element("1_1/2")
    s = FormalSeries.monomial(B.ring, ctx.spec, B.lattice, g, beta=(2,), z=-1, window=Window(order=F(3)))
    rep = validate_admissible_series(ctx, s + FormalSeries.z_term(B.ring, ctx.spec, B.lattice, s.window))
    assert [v.kind for v in rep.violations] == ["NON_ADMISSIBLE"]
    with pytest.raises(QLError) as e:
        hypergeometric_modification(ctx, s + FormalSeries.z_term(B.ring, ctx.spec, B.lattice, s.window))
    assert e.value.code == "NON_ADMISSIBLE_INPUT"


# -- hyper factor

def _expand(poly):
    return {k: v for k, v in poly.items()}


def test_hyper_factor_quintic_degree_one():
    ctx = quintic_ctx()
    R = ctx.target.ring
    H = R.basis_element("H")
    got = hyper_factor(ctx, (1,), ())
    want = {(0, 0): R.one()}
    for m in range(1, 6):
        nxt = {}
        for (zz, kk), x in want.items():
            for (dz, y) in ((0, H * 5), (1, R.one() * m)):
                key = (zz + dz, kk)
                nxt[key] = nxt.get(key, R.zero()) + x * y
        want = {k: v for k, v in nxt.items() if v}
    assert got == want


def test_hyper_factor_empty_and_fractional():
    ctx = hyperplane_ctx(2)
    assert hyper_factor(ctx, (0,), ()) == {(0, 0): ctx.target.ring.one()}
    R = ctx.target.ring
    H = R.basis_element("H")
    fctx = hyperplane_ctx(2, ExtendedVariableSpec((0,), (("1/2",),)))
    got = hyper_factor(fctx, (1,), (1,))  # v = 3/2: (H + 3/2 z)(H + 1/2 z)
    assert got == {(0, 0): H * H, (1, 0): H * 2, (2, 0): R.one() * F(3, 4)}


@pytest.mark.parametrize("v", range(0, 6))
def test_hyper_factor_leading_coefficient_factorial(v):
    ctx = hyperplane_ctx(5)
    got = hyper_factor(ctx, (v,), ())
    fact = 1
    for i in range(1, v + 1):
        fact *= i
    assert got[(v, 0)] == ctx.target.ring.one() * fact
    assert max(zz for zz, _ in got) == v


# -- modification

def test_p2_modification_cancels_a_factor():
    ctx = hyperplane_ctx(2)
    Jtw = hypergeometric_modification(ctx, small_J_series(ctx.target, 3))
    R = ctx.target.ring
    for d in range(1, 4):
        got = {(int(R.basis[i].split("^")[-1]) if "H" in R.basis[i] and "^" in R.basis[i]
                else (1 if R.basis[i] == "H" else 0), zz): c
               for zz, x in z_laurent(Jtw, (d,)).items() for i, c in x.coeffs.items()}
        assert got == hyperplane_block(2, d)


def test_quintic_mu_plus():
    ctx = quintic_ctx()
    R = ctx.target.ring
    H = R.basis_element("H")
    mu = mu_plus(hypergeometric_modification(ctx, small_J_series(ctx.target, 2)))
    assert z_laurent(mu, (1,)) == {1: R.one() * 120, 0: H * 770}
    assert z_laurent(mu, (2,))[1] == R.one() * 113400
    assert z_laurent(mu, (2,))[1] == R.one() * quintic_I0_bruteforce(2)
    assert z_laurent(mu, (2,))[0] == H * quintic_I1_bruteforce(2)


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_mu_plus_vanishes_for_hyperplanes(n):
    ctx = hyperplane_ctx(n)
    assert mu_plus(hypergeometric_modification(ctx, small_J_series(ctx.target, 4))).is_zero()


def test_kappa_limit_of_twisted():
    ctx = quintic_ctx()
    J = small_J_series(ctx.target, 2)
    assert kappa_limit(hypergeometric_modification(ctx, J, twist_kappa=True)) == hypergeometric_modification(ctx, J)


def test_iterated_equals_joint():
    P3 = builtin_target("P3")
    X = P3.with_bundle(LineBundleData("O(1)'", P3.ring.basis_element("H"), (F(1),), {}, True))
    J = small_J_series(X, 4)
    joint = hypergeometric_modification(AdmissibleContext(X, bundle_subset=(0, 1)), J)
    first = hypergeometric_modification(AdmissibleContext(X, bundle_subset=(0,)), J)
    second = hypergeometric_modification(AdmissibleContext(X, bundle_subset=(1,)), first)
    assert joint == second


CTXS = contexts()


@settings(max_examples=30)
@given(st.sampled_from(range(len(CTXS))), st.integers(0, 10 ** 6))
def test_modification_preserves_admissibility(which, seed):
    _, ctx = CTXS[which]
    s = random_admissible(ctx, random.Random(seed))
    assert validate_admissible_series(ctx, s).ok
    mu = mu_plus(hypergeometric_modification(ctx, s))
    assert validate_admissible_series(ctx, mu, near={}).ok


@settings(max_examples=20)
@given(st.sampled_from(range(len(CTXS))), st.integers(0, 10 ** 6))
def test_kappa_compatibility_random(which, seed):
    _, ctx = CTXS[which]
    s = random_admissible(ctx, random.Random(seed))
    assert kappa_limit(hypergeometric_modification(ctx, s, twist_kappa=True)) == hypergeometric_modification(ctx, s)


# -- mirror map

def test_mirror_normalize_trivial():
    T = make_projective_target(1, "h")
    J = small_J_series(T, 3)
    md = mirror_normalize(J, T.divisor_pairing)
    assert md.I0 == {(0,): 1}
    assert all(not v for v in md.mirror_map.values())
    assert md.normalized == J


def test_mirror_normalize_rejects_higher_classes():
    T = make_projective_target(2)
    J = small_J_series(T, 2)
    bad = J + FormalSeries.monomial(T.ring, J.spec, J.lattice, T.ring.basis_element("H^2"), beta=(1,), z=1,
                                    window=J.window)
    with pytest.raises(QLError) as e:
        mirror_normalize(bad, T.divisor_pairing)
    assert e.value.code == "UNSUPPORTED_SHAPE"


def _quintic_restricted(order):
    ctx = quintic_ctx()
    Q = make_quintic_target()
    hom = restriction_hom(ctx.target.ring, Q.ring, {"H": Q.ring.basis_element("h")})
    Jtw = hypergeometric_modification(ctx, small_J_series(ctx.target, order))
    return apply_hom(Jtw, hom), Q


def test_quintic_mirror_data():
    s, Q = _quintic_restricted(4)
    md = mirror_normalize(s, Q.divisor_pairing)
    assert [md.I0[(d,)] for d in range(5)] == [1] + [quintic_I0_bruteforce(d) for d in range(1, 5)]
    assert [md.I0[(d,)] for d in range(1, 5)] == [120, 113400, 168168000, 305540235000]
    tau = md.mirror_map["h"]
    assert tau[(1,)] == 770
    assert tau[(1,)] / md.I0[(1,)] == F(77, 12)


def test_quintic_instantons():
    s, Q = _quintic_restricted(4)
    table = extract_instanton_numbers(mirror_normalize(s, Q.divisor_pairing).normalized, "h", 4)
    assert [table.n[d] for d in range(1, 5)] == yukawa_instantons(4)
    assert [table.n[d] for d in range(1, 4)] == [2875, 609250, 317206375]
    assert table.dilaton_consistent


def test_instantons_reject_non_threefold():
    T = make_projective_target(2)
    with pytest.raises(QLError) as e:
        extract_instanton_numbers(small_J_series(T, 2), "H", 2)
    assert e.value.code == "UNSUPPORTED_TARGET"


# -- checker

def test_check_p2_p1():
    ctx = hyperplane_ctx(2)
    P1 = make_projective_target(1, "h")
    hom = restriction_hom(ctx.target.ring, P1.ring, {"H": P1.ring.basis_element("h")})
    rep = check_main_theorem(ctx, P1, hom, order=6, b_max=3)
    assert rep.ok and rep.mode == "direct"
    assert rep.summary().startswith("all blocks exact to order 6")


def test_check_quintic_normalized():
    ctx = quintic_ctx()
    Q = make_quintic_target()
    hom = restriction_hom(ctx.target.ring, Q.ring, {"H": Q.ring.basis_element("h")})
    rep = check_main_theorem(ctx, Q, hom, order=3, b_max=3)
    assert rep.ok and rep.mode == "normalized"


def test_check_detects_wrong_target():
    ctx = quintic_ctx()
    wrong = make_quintic_target({1: 2875, 2: 609251, 3: 317206375, 4: 242467530000})
    hom = restriction_hom(ctx.target.ring, wrong.ring, {"H": wrong.ring.basis_element("h")})
    rep = check_main_theorem(ctx, wrong, hom, order=3, b_max=3)
    assert not rep.ok
    bad = rep.mismatches
    assert {c.beta for c in bad} == {(2,)}  # N_3 = n_3 + n_1/27 does not see n_2
    assert bad[0].counterexample()


def test_check_rejects_general_mu():
    P2 = builtin_target("P2")
    X = P2.with_bundle(LineBundleData("O(4)", P2.ring.basis_element("H") * 4, (F(4),), {}, True))
    ctx = AdmissibleContext(X, bundle_subset=(1,))
    P1 = make_projective_target(1, "h")
    hom = restriction_hom(X.ring, P1.ring, {"H": P1.ring.basis_element("h")})
    with pytest.raises(QLError) as e:
        check_main_theorem(ctx, P1, hom, order=2)
    assert e.value.code == "UNSUPPORTED_SHAPE"


# -- oracle

def test_small_j_oracle_reductions():
    T = make_projective_target(2)
    o = SmallJOracle(T)
    R = T.ring
    one, H, H2 = R.one(), R.basis_element("H"), R.basis_element("H^2")
    # z/(H+z)^3 = z^-2 - 3H z^-3 + ...: <pt psi>_{0,1,1} = 1
    assert o.invariant((1,), [(H2, 1)]) == 1
    assert o.invariant((1,), [(H2, 0)]) == 0
    assert o.invariant((1,), [(H, 0), (H2, 1)]) == 1      # divisor
    assert o.invariant((1,), [(one, 0), (H2, 2)]) == 1    # string
    assert o.invariant((1,), [(one, 1), (H2, 1)]) == -1   # dilaton, (n-3) = -1
    assert o.invariant((0,), [(H, 0), (H, 0), (one, 0)]) == 1
    assert o.provenance


def test_small_j_oracle_gap():
    o = SmallJOracle(make_projective_target(2))
    R = o.ring
    with pytest.raises(OracleGap):
        o.invariant((1,), [(R.basis_element("H^2"), 0), (R.basis_element("H^2"), 0)])
