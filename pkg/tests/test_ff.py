import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lubintate import FiniteFieldSpec, NotPrime, ReducibleModulus
from lubintate.ff import is_irreducible_p, is_prime

FIELDS = [(2, 1), (2, 3), (3, 2), (5, 1), (5, 2), (7, 1)]


def _has_root(m, p):
    return any(sum(c * x**i for i, c in enumerate(m)) % p == 0 for x in range(p))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_irreducibility_matches_root_count_in_low_degree(p):
    # a polynomial of degree 2 or 3 is irreducible iff it has no root
    for deg in (2, 3):
        for tail in itertools.product(range(p), repeat=deg):
            m = tuple(tail) + (1,)
            assert is_irreducible_p(m, p) == (not _has_root(m, p))


def test_is_prime_small():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_constructor_errors():
    with pytest.raises(NotPrime):
        FiniteFieldSpec(4)
    with pytest.raises(ReducibleModulus):
        FiniteFieldSpec(2, 2, [1, 0, 1])


@pytest.mark.parametrize("p,d", FIELDS)
def test_unit_group_is_cyclic_of_order_q_minus_1(p, d):
    k = FiniteFieldSpec(p, d)
    units = k.units()
    assert len(units) == k.q - 1
    assert all(u ** (k.q - 1) == k(1) for u in units)
    assert any(all(g**e != k(1) for e in range(1, k.q - 1)) for g in units)


@pytest.mark.parametrize("p,d", FIELDS)
@given(data=st.data())
def test_field_axioms(p, d, data):
    k = FiniteFieldSpec(p, d)
    elem = st.lists(st.integers(0, p - 1), min_size=d, max_size=d).map(k)
    a, b, c = data.draw(elem), data.draw(elem), data.draw(elem)
    assert a * (b + c) == a * b + a * c
    assert (a + b) ** p == a**p + b**p
    if not a.is_zero():
        assert a * a.inverse() == k(1)
    assert k(k.root_p_raw((a**p).c)) == a
