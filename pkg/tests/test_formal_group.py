from fractions import Fraction
from math import comb

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lubintate import LTGroup, NotAdmissible, lt_isomorphism, make_local_field, tamper, verify_axioms, verify_isomorphism
from lubintate.formal_group import guard_digits


def binom_frac(u: Fraction, k: int) -> Fraction:
    out = Fraction(1)
    for i in range(k):
        out *= (u - i) / (i + 1)
    return out


def to_mod(x: Fraction, M: int) -> int:
    return x.numerator * pow(x.denominator, -1, M) % M


@pytest.fixture(scope="module")
def q2():
    return LTGroup.standard(make_local_field(2, precN=18), cap=12)


def test_q2_group_law_is_multiplicative(q2):
    law = q2.group_law(10)
    assert law.to_string() == "X + Y + X*Y"


@pytest.mark.parametrize("u", [3, 5, -1, Fraction(1, 3)])
def test_q2_endo_is_binomial_series(q2, u):
    s = q2.endo(u, 12)
    M = 2**s.prec
    u = Fraction(u)
    for k in range(1, 13):
        assert s.coefficient((k,)).to_int() % M == to_mod(binom_frac(u, k), M)


def test_q3_second_iterate():
    G = LTGroup.standard(make_local_field(3, precN=12), cap=9)
    assert G.iterate(2).to_string() == "9*X + 30*X^3 + 27*X^5 + 9*X^7 + X^9"


@pytest.mark.parametrize("p,m", [(2, 1), (2, 3), (3, 2)])
def test_iterate_linear_and_top_terms(p, m):
    F = make_local_field(p, precN=12)
    G = LTGroup.standard(F, cap=p**m)
    s = G.iterate(m)
    assert s.coefficient((1,)).to_int() == p**m
    assert s.coefficient((p**m,)).to_int() == 1
    assert s.degree() == p**m


def test_group_law_agrees_across_backends():
    from lubintate import kernel

    laws = []
    for name in kernel.available_backends():
        kernel.set_backend(name)
        G = LTGroup.standard(make_local_field(3, 1, None, [-3, 0, 1], 12), cap=7)
        laws.append(G.group_law())
    kernel.set_backend(kernel.available_backends()[-1])
    assert all(law == laws[0] for law in laws)


def test_tamper_is_localized():
    G = LTGroup.standard(make_local_field(3, precN=12), cap=6)
    law = G.group_law()
    rep = verify_axioms(G, 6, law=tamper(law, (2, 1)))
    assert rep["status"] == "fail"
    assoc = [c for c in rep["checks"] if c["check"] == "associativity"][0]
    assert assoc["status"] == "fail"
    assert assoc["first_failure"]["degree"] == 3


def test_isomorphism_standard_to_cyclotomic():
    F = make_local_field(3, precN=12)
    G1 = LTGroup.standard(F, cap=7)
    G2 = LTGroup.cyclotomic(F, cap=7)
    theta = lt_isomorphism(G1, G2, 7)
    assert theta.coefficient((1,)).to_int() == 1
    assert verify_isomorphism(G1, G2, theta)["status"] == "pass"


def test_not_admissible():
    F = make_local_field(3, precN=8)
    with pytest.raises(NotAdmissible):
        LTGroup(F, [0, 3, 1])
    with pytest.raises(NotAdmissible):
        LTGroup(F, [0, 1, 0, 1])
    with pytest.raises(NotAdmissible):
        LTGroup.cyclotomic(make_local_field(3, 1, None, [-3, 0, 1], 8))


@given(cap=st.integers(2, 9), prec=st.integers(5, 12), a=st.sampled_from([2, -1, 5]))
def test_precision_bound_of_solver_outputs(cap, prec, a):
    # outputs carry prec - guard_digits(q, cap) digits, and those digits are right
    lo = LTGroup.standard(make_local_field(3, precN=prec), cap=cap)
    hi = LTGroup.standard(make_local_field(3, precN=prec + 10), cap=cap)
    law = lo.group_law()
    assert law.prec == prec - guard_digits(3, cap)
    assert law.first_difference(hi.group_law().at_prec(law.prec)) is None
    e = lo.endo(a)
    assert e.first_difference(hi.endo(a).at_prec(e.prec)) is None


def test_guard_digits():
    assert guard_digits(2, 8) == 3
    assert guard_digits(3, 8) == 2
    assert guard_digits(3, 6) == 2
    assert guard_digits(5, 4) == 1
    assert comb(4, 2) == 6
