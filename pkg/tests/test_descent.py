import random
from math import gcd

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lubintate import (
    CharacterEta,
    EFRing,
    FiniteFieldSpec,
    MissingRootsOfUnity,
    NoPthRootHypothesis,
    OrderNotPPower,
    character_descent,
    cyclotomic_data,
    descent_ring,
    enumerate_characters,
    forward_certificate,
    lemma_LT4_solve_modp,
    lemma_LT5_descent,
    lt5_certified,
    rank1_module,
    solve_phi_fixed_modp,
    verify_module,
)
from lubintate.descent import random_unit, root_precision, tamper_cocycle, working_precision
from lubintate.rings import ef_frobenius


@pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1)])
def test_cyclotomic_root_has_exact_order(p, n):
    zd = cyclotomic_data(p, n)
    z = zd.zeta
    assert z ** (p**n) == z.field.uniformizer() ** 0
    if p**n > 2:
        assert not (z ** (p ** (n - 1)) - 1).is_zero()


@pytest.mark.parametrize("p", [2, 3])
def test_character_count(p):
    # Hom((Z/p^2)^*, mu_{p^2}) times the p^2 choices of eta(pi)
    unit_order = (p * p) - p
    homs = gcd(unit_order, p * p)
    assert len(enumerate_characters(p)) == homs * p * p


@pytest.mark.parametrize("p", [2, 3])
def test_characters_are_multiplicative(p):
    for eta, zd in enumerate_characters(p):
        assert eta.is_multiplicative()
        assert CharacterEta.from_json(zd.field, eta.to_json()).same_on_units(eta)


def test_working_precision_reaches_target():
    for p, n in [(2, 1), (2, 2), (3, 1), (3, 2)]:
        zd = cyclotomic_data(p, n)
        w = working_precision(zd, 8)
        P = w
        for _ in range(n):
            P = root_precision(P, p, zd.field.e)
        assert P >= 8


@pytest.mark.parametrize("p,n", [(2, 0), (2, 2), (3, 0), (3, 1)])
@given(seed=st.integers(0, 10**6))
def test_lt5_recovers_pth_roots(p, n, seed):
    zd = cyclotomic_data(p, n)
    R = descent_ring(zd)
    u = random_unit(R, random.Random(seed))
    beta = u**p
    res = lt5_certified(beta)
    lo, hi = res.window
    rhs = (res.alpha**p).scale(res.beta0)
    assert beta.truncate(hi).first_difference(rhs.truncate(hi)) is None
    # alpha agrees with u up to a constant
    ratio = (u * res.alpha.inverse(hi=hi)).truncate(min(hi, res.alpha.hi))
    assert ratio.is_constant()


def test_lt5_rejects_uniformizer():
    for p in (2, 3):
        R = descent_ring(cyclotomic_data(p, 0))
        with pytest.raises(NoPthRootHypothesis):
            lemma_LT5_descent(R.pi())


def test_lt5_square_over_q2():
    R = descent_ring(cyclotomic_data(2, 0))
    beta0, alpha = lemma_LT5_descent((R.one() + R.pi()) ** 2)
    assert alpha.first_difference(R.one() + R.pi()) is None
    assert beta0 == beta0.field.uniformizer() ** 0


@pytest.mark.parametrize("p", [2, 3])
def test_round_trip_small_orders(p):
    for i, (eta, zd) in enumerate(enumerate_characters(p)):
        if zd.n > 1:
            continue
        R = descent_ring(zd)
        D = rank1_module(eta, R)
        order = eta.order(zd)
        D2, beta = forward_certificate(D, random_unit(R, random.Random(i)), order)
        assert verify_module(D2)["status"] == "pass"
        res = character_descent(D2, beta, order, zd)
        assert res.eta.same_on_units(eta)
        assert res.twist * eta.pi_value == res.twist.field.uniformizer() ** 0
        assert res.certified_prec >= 8


def test_round_trip_order_nine():
    chars = [(eta, zd) for eta, zd in enumerate_characters(3) if eta.order(zd) == 9]
    eta, zd = chars[0]
    R = descent_ring(zd)
    D2, beta = forward_certificate(rank1_module(eta, R), random_unit(R, random.Random(11)), 9)
    res = character_descent(D2, beta, 9, zd)
    assert res.eta.same_on_units(eta)
    assert len(res.transcript) == 2


def test_descent_errors():
    eta, zd = [(e, z) for e, z in enumerate_characters(3) if e.order(z) == 9][0]
    R = descent_ring(zd)
    D2, beta = forward_certificate(rank1_module(eta, R), random_unit(R, random.Random(1)), 9)
    with pytest.raises(OrderNotPPower):
        character_descent(D2, beta, 6, zd)
    with pytest.raises(MissingRootsOfUnity):
        character_descent(D2, beta, 27, zd)
    with pytest.raises(NoPthRootHypothesis):
        character_descent(D2, beta * R.pi(), 9, zd)


def test_tampered_cocycle_is_localized():
    eta, zd = enumerate_characters(3)[4]
    R = descent_ring(zd, final=2)
    D2, _ = forward_certificate(rank1_module(eta, R), random_unit(R, random.Random(0)), eta.order(zd))
    rep = verify_module(tamper_cocycle(D2, 0, 3))
    assert rep["status"] == "fail"
    first = [c for c in rep["checks"] if c["status"] == "fail"][0]
    assert first["first_failure"]["exponent"] == 3


@pytest.mark.parametrize("p,d", [(2, 1), (3, 1), (2, 2), (3, 2)])
def test_phi_fixed_solutions(p, d):
    k = FiniteFieldSpec(p, d)
    E = EFRing(k, k.q)
    rng = random.Random(p * 10 + d)
    for _ in range(5):
        x = E.random(rng, -2, 5)
        if x.is_zero():
            continue
        a = x ** (k.q - 1)
        sol = solve_phi_fixed_modp(a)
        assert sol.solvable
        b = sol.basis
        assert b ** k.q == a * b
    sol = solve_phi_fixed_modp(E.pi_bar())
    assert sol.solvable == (k.q == 2)
    if not sol.solvable:
        assert sol.extension.kind == "kummer"


@pytest.mark.parametrize("kl", [1, 2, 3])
def test_lt4_multiplicative_and_additive(kl):
    kF = FiniteFieldSpec(2)
    k = FiniteFieldSpec(2, kl)
    E = EFRing(k, kF.q)
    rng = random.Random(kl)
    w = E.random(rng, 0, 4)
    while w.is_zero():
        w = E.random(rng, 0, 4)
    rhs = ef_frobenius(w) * w.inverse()
    res = lemma_LT4_solve_modp(rhs)
    assert res.x is not None and ef_frobenius(res.x) == rhs * res.x
    add = E.random(rng, 1, 6)
    res = lemma_LT4_solve_modp(add, additive=True)
    if not res.steps:
        assert ef_frobenius(res.x) - res.x == add
