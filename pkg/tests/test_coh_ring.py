from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from qlefschetz.coh_ring import (build_ring, dump_ring, frac_str, invert_unit_plus_nilpotent, involution_pullback,
                                 inverse, load_ring, poincare_data, restriction_hom, ring_mul)
from qlefschetz.errors import QLError
from qlefschetz.targets import bmu_ring, elliptic_ring, make_quintic_target, truncated_polynomial_ring

F = Fraction


def p2():
    return truncated_polynomial_ring(2)


def test_truncated_polynomial_ring_is_valid():
    R = p2()
    assert R.basis == ("1", "H", "H^2")
    assert R.degrees == (0, 2, 4)


def test_grading_violation():
    table = {("1", "1"): {"1": 1}, ("1", "H"): {"H": 1}, ("H", "1"): {"H": 1}, ("H", "H"): {"H": 1}}
    with pytest.raises(QLError) as e:
        build_ring(["1", "H"], [0, 2], [0, 0], None, table)
    assert e.value.code == "GRADING_VIOLATION"


def test_commutativity_violation():
    table = {("1", x): {x: 1} for x in ("1", "a", "b", "c")}
    table.update({(x, "1"): {x: 1} for x in ("a", "b", "c")})
    table.update({("a", "b"): {"c": 1}, ("b", "a"): {"c": 1}})  # odd*odd must anticommute
    with pytest.raises(QLError) as e:
        build_ring(["1", "a", "b", "c"], [0, 1, 1, 2], [0, 1, 1, 0], None, table)
    assert e.value.code == "COMMUTATIVITY_VIOLATION"


def test_bmu2_model():
    R = bmu_ring(2)
    g = R.basis_element("1_1/2")
    assert ring_mul(g, g) == R.one()


def test_products():
    R = p2()
    H = R.basis_element("H")
    one = R.one()
    assert (one + H) * (one + H) == one + H * 2 + R.basis_element("H^2")
    assert R.basis_element("H^2") * H == R.zero()


def test_ring_mismatch():
    with pytest.raises(QLError) as e:
        p2().one() * truncated_polynomial_ring(3).one()
    assert e.value.code == "RING_MISMATCH"


def test_pairing_p1():
    R = truncated_polynomial_ring(1, "h")
    pairing, dual = poincare_data(R)
    one, h = R.one(), R.basis_element("h")
    assert pairing(one, h) == 1
    assert pairing(one, one) == 0
    assert dual[R.index("1")] == h


def test_pairing_bmu2():
    R = bmu_ring(2)
    pairing, dual = poincare_data(R)
    g = R.basis_element("1_1/2")
    assert pairing(g, g) == F(1, 2)
    assert dual[R.index("1_1/2")] == g * 2


def test_degenerate_pairing():
    table = {("1", x): {x: 1} for x in ("1", "e", "f")}
    table.update({(x, "1"): {x: 1} for x in ("e", "f")})
    R = build_ring(["1", "e", "f"], [0, 2, 2], [0, 0, 0], None, table, integrals={"0": {"e": 1}})
    with pytest.raises(QLError) as e:
        poincare_data(R)
    assert e.value.code == "DEGENERATE_PAIRING"


def test_gram_identity_on_builtins():
    for R in (p2(), bmu_ring(3), elliptic_ring(), make_quintic_target().ring):
        pairing, dual = poincare_data(R)
        for a in range(R.dim):
            for b in range(R.dim):
                assert pairing(R.basis_element(a), dual[b]) == (1 if a == b else 0)


def test_involution():
    R = p2()
    assert involution_pullback(R.basis_element("H")) == R.basis_element("H")
    g = bmu_ring(2).basis_element("1_1/2")
    assert involution_pullback(g) == g
    R3 = bmu_ring(3)
    assert involution_pullback(R3.basis_element("1_1/3")) == R3.basis_element("1_2/3")
    x = R3.basis_element("1_1/3") + R3.basis_element("1_2/3") * 5
    assert involution_pullback(involution_pullback(x)) == x


def test_inversion_examples():
    R = p2()
    one, H, H2 = R.one(), R.basis_element("H"), R.basis_element("H^2")
    assert inverse(one + H) == one - H + H2
    # (lambda - H)^-1
    assert invert_unit_plus_nilpotent(one - H, lam_power=1) == {-1: one, -2: H, -3: H2}
    with pytest.raises(QLError) as e:
        inverse(H)
    assert e.value.code == "NOT_INVERTIBLE"


def test_restriction_examples():
    P2, P1 = p2(), truncated_polynomial_ring(1, "h")
    hom = restriction_hom(P2, P1, {"H": P1.basis_element("h")})
    assert hom(P2.basis_element("H^2")) == P1.zero()
    Q = make_quintic_target().ring
    P4 = truncated_polynomial_ring(4)
    hq = restriction_hom(P4, Q, {"H": Q.basis_element("h")})
    assert hq(P4.basis_element("H^3")) == Q.basis_element("h^3")
    with pytest.raises(QLError) as e:
        restriction_hom(P2, P1, {"H": P1.basis_element("h") + P1.one()})
    assert e.value.code == "NOT_A_HOMOMORPHISM"


def test_restriction_composes():
    P3, P2, P1 = truncated_polynomial_ring(3), p2(), truncated_polynomial_ring(1, "h")
    a = restriction_hom(P3, P2, {"H": P2.basis_element("H")})
    b = restriction_hom(P2, P1, {"H": P1.basis_element("h")})
    c = restriction_hom(P3, P1, {"H": P1.basis_element("h")})
    composed = a.then(b)
    for i in range(P3.dim):
        assert composed(P3.basis_element(i)) == c(P3.basis_element(i))


def test_ring_file_round_trip():
    for R in (p2(), bmu_ring(3), elliptic_ring()):
        text = dump_ring(R)
        R2 = load_ring(text)
        assert R2 == R
        assert dump_ring(R2) == text


def test_frac_str():
    assert frac_str(F(3)) == "3/1"
    assert frac_str(F(-2, 4)) == "-1/2"


# -- properties

coef = st.fractions(min_value=-5, max_value=5, max_denominator=7)


def _elements(R):
    return st.lists(coef, min_size=R.dim, max_size=R.dim).map(
        lambda cs: R.element({R.basis[i]: c for i, c in enumerate(cs)}))


E = elliptic_ring()
P4 = truncated_polynomial_ring(4)


@given(_elements(E), _elements(E), _elements(E))
def test_associativity_elliptic(a, b, c):
    assert (a * b) * c == a * (b * c)


@given(st.sampled_from(range(E.dim)), st.sampled_from(range(E.dim)))
def test_super_commutativity(i, j):
    a, b = E.basis_element(i), E.basis_element(j)
    sign = -1 if E.parities[i] and E.parities[j] else 1
    assert a * b == (b * a) * sign


@settings(max_examples=200)
@given(st.fractions(min_value=-5, max_value=5, max_denominator=7).filter(bool),
       st.lists(coef, min_size=4, max_size=4))
def test_inverse_times_x_is_one(u, rest):
    x = P4.scalar(u) + P4.element({P4.basis[i + 1]: c for i, c in enumerate(rest)})
    assert inverse(x) * x == P4.one()
