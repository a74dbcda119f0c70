from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lubintate import (
    HenselConditionFails,
    NotEisenstein,
    OFElem,
    hensel_lift,
    make_local_field,
    teichmuller,
)

N = 10


def zp(p, prec=N):
    return make_local_field(p, precN=prec)


@pytest.mark.parametrize("p", [2, 3, 5])
@given(a=st.integers(-(10**9), 10**9), b=st.integers(-(10**9), 10**9))
def test_integer_arithmetic_matches_residues_mod_p_power(p, a, b):
    F = zp(p)
    M = p**N
    x, y = F(a), F(b)
    assert (x + y).to_int() % M == (a + b) % M
    assert (x * y).to_int() % M == (a * b) % M
    assert (x - y).to_int() % M == (a - b) % M
    if a % p:
        assert (x.inverse().to_int() * a) % M == 1


@given(num=st.integers(-500, 500), den=st.integers(1, 500))
def test_from_rational_inverts_multiplication(num, den):
    F = zp(3)
    x = OFElem.from_rational(F, Fraction(num, den))
    if num == 0:
        assert x.is_zero()
        return
    v = 0
    n = num
    while n % 3 == 0:
        n //= 3
        v += 1
    d = den
    while d % 3 == 0:
        d //= 3
        v -= 1
    assert x.valuation().value == v
    assert x * OFElem.from_rational(F, Fraction(den)) == OFElem.from_rational(F, Fraction(num))


def test_ramified_uniformizer_squares_to_3():
    F = make_local_field(3, 1, None, [-3, 0, 1], 12)
    pi = F.uniformizer()
    assert pi * pi == F(3)
    assert pi.valuation().value == 1
    assert F(3).valuation().value == 2
    assert (pi.field_inverse() * pi) == F(1)


def test_non_eisenstein_polynomial_rejected():
    with pytest.raises(NotEisenstein):
        make_local_field(3, 1, None, [-9, 0, 1], 8)


@given(seed=st.integers(0, 10**6))
def test_valuation_is_additive_in_a_ramified_unramified_field(seed):
    import random

    F = make_local_field(2, 2, None, [-2, 2, 1], 12)
    rng = random.Random(seed)
    x, y = F.random_element(rng), F.random_element(rng)
    if x.is_zero() or y.is_zero():
        return
    xy = x * y
    if xy.is_zero():
        return
    assert xy.valuation().value == x.valuation().value + y.valuation().value


@pytest.mark.parametrize("p,d", [(2, 1), (3, 1), (3, 2), (5, 1)])
def test_teichmuller_roots_of_unity(p, d):
    F = make_local_field(p, d, precN=8)
    for c in F.residue.units():
        w = teichmuller(c, F)
        assert w ** (F.q - 1) == F(1)
        assert w.residue() == c


def test_hensel_sqrt_and_failure():
    F = make_local_field(3, precN=10)
    r = hensel_lift([F(-7), F(0), F(1)], F(1))
    assert r * r == F(7).at_prec(r.prec)
    with pytest.raises(HenselConditionFails):
        hensel_lift([F(1), F(0), F(1)], F(1))


@given(seed=st.integers(0, 10**6))
def test_json_round_trip(seed):
    import random

    F = make_local_field(3, 2, None, [-3, 0, 1], 9)
    x = F.random_element(random.Random(seed))
    assert OFElem.from_json(F, x.to_json()) == x
