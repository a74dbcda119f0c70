import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lubintate import (
    AFElem,
    AFRing,
    EFElem,
    EFRing,
    LTGroup,
    af_frobenius,
    af_gamma,
    ef_frobenius,
    ef_root,
    make_local_field,
    v_E,
)
from lubintate.errors import InexactDivision


def af_ring(p, d=1, eis=None, prec=8, hi=24):
    F = make_local_field(p, d, None, eis, precN=prec + 8)
    return AFRing(LTGroup.standard(F, cap=16), prec, hi_default=hi)


RINGS = [(2, 1, None), (3, 1, None), (3, 1, [-3, 0, 1]), (2, 2, None)]


@pytest.mark.parametrize("p,d,eis", RINGS)
def test_frobenius_commutes_with_gamma(backend, p, d, eis):
    R = af_ring(p, d, eis)
    rng = random.Random(7)
    for _ in range(10):
        x = R.random(rng, -8, 24, exact=False)
        a = rng.choice([3, -1, 5] if p == 2 else [2, -1, 5])
        assert af_frobenius(af_gamma(a, x)).first_difference(af_gamma(a, af_frobenius(x))) is None


@pytest.mark.parametrize("p,d,eis", RINGS)
def test_frobenius_reduces_to_q_power(p, d, eis):
    R = af_ring(p, d, eis)
    E = EFRing(R.coef.residue, R.q)
    rng = random.Random(3)
    for _ in range(10):
        x = R.random(rng, -6, 20, exact=False)
        assert af_frobenius(x).reduce(E) == ef_frobenius(x.reduce(E))
        assert x.reduce(E) ** R.q == ef_frobenius(x.reduce(E))


@given(seed=st.integers(0, 10**6))
def test_af_ring_axioms(backend, seed):
    R = af_ring(3)
    rng = random.Random(seed)
    x, y, z = (R.random(rng, -3, 10, exact=False) for _ in range(3))
    assert (x * (y + z)).first_difference(x * y + x * z) is None
    assert ((x * y) * z).first_difference(x * (y * z)) is None
    u = R.one() + R.random(rng, 1, 10).scale(R.coef.uniformizer(R.prec))
    assert (u * u.inverse()).first_difference(R.one()) is None


def test_pi_inverse_and_frobenius_of_pi():
    R = af_ring(2)
    pi = R.pi()
    assert (pi * pi.inverse()).first_difference(R.one()) is None
    # phi(pi) = f(pi) = 2 pi + pi^2 for the standard Q_2 group
    assert af_frobenius(pi) == R.elem({1: R.coef.int_raw(2), 2: R.coef.one_raw()})


def test_div_pi_power():
    R = af_ring(3, 1, [-3, 0, 1])
    C = R.coef
    x = R.random(random.Random(1), -2, 8)
    y = x.scale(C.uniformizer(R.prec) ** 3)
    assert y.div_pi_power(3).first_difference(x.at_prec(R.prec - 3)) is None
    if any(any(C.residue_raw(c)) for c in x.coeffs):
        with pytest.raises(InexactDivision):
            x.div_pi_power(1)


def test_af_json_round_trip():
    R = af_ring(3)
    x = R.random(random.Random(2), -4, 12, exact=False)
    assert AFElem.from_json(R, x.to_json()) == x


@pytest.mark.parametrize("q", [2, 3, 4, 9])
def test_ve_of_pi_bar(q):
    from lubintate import FiniteFieldSpec

    p = 2 if q in (2, 4) else 3
    k = FiniteFieldSpec(p, {2: 1, 4: 2, 3: 1, 9: 2}[q])
    E = EFRing(k, q)
    assert v_E(E.pi_bar()) == Fraction(q, q - 1)


@given(seed=st.integers(0, 10**6))
def test_ve_is_additive_and_ultrametric(seed):
    from lubintate import FiniteFieldSpec

    E = EFRing(FiniteFieldSpec(3, 2), 3)
    rng = random.Random(seed)
    x, y = E.random(rng, -5, 10), E.random(rng, -5, 10)
    if x.is_zero() or y.is_zero():
        return
    assert v_E(x * y) == v_E(x) + v_E(y)
    s = x + y
    if not s.is_zero():
        assert v_E(s) >= min(v_E(x), v_E(y))


def test_ef_root_inverts_frobenius():
    from lubintate import FiniteFieldSpec

    E = EFRing(FiniteFieldSpec(2, 2), 2)
    x = E.random(random.Random(5), -3, 6)
    assert ef_frobenius(ef_root(x)) == x
    assert EFElem.from_json(E, x.to_json()) == x
