import pytest

from lubintate import (
    LTGroup,
    NotAUnit,
    TowerField,
    eisenstein_step,
    galois_apply,
    make_local_field,
    norm_to_base,
    reciprocity_conjugacy,
    torsion_check,
)
from lubintate.tower import apply_endo, is_root


def group(p, prec=12, kind="standard", cap=None):
    F = make_local_field(p, precN=prec)
    return getattr(LTGroup, kind)(F, cap=cap or 32)


def int_poly_mul(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return out


@pytest.mark.parametrize("p,m", [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (3, 3)])
def test_phi_m_times_previous_iterate_is_iterate(p, m):
    G = group(p, cap=p**m)
    step = eisenstein_step(G, m)
    phi = [c.to_int() for c in step.phi]
    f_m = [G.iterate(m).coefficient((k,)).to_int() for k in range(p**m + 1)]
    prev = [0, 1] if m == 1 else [G.iterate(m - 1).coefficient((k,)).to_int() for k in range(p ** (m - 1) + 1)]
    assert int_poly_mul(phi, prev) == f_m
    assert step.report["eisenstein"]
    assert step.degree == p**m - p ** (m - 1)


def test_q3_second_level_polynomial():
    assert eisenstein_step(group(3, cap=9), 2).to_string() == "X^6+6*X^4+9*X^2+3"


@pytest.mark.parametrize("q,m", [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)])
def test_torsion_is_cyclic_of_order_q_power(q, m):
    rep = torsion_check(group(q, prec=12), m, prec=6)
    assert rep["status"] == "pass", rep
    assert rep["order"] == q**m


@pytest.mark.parametrize("q,m", [(2, 2), (3, 2)])
def test_pi_power_annihilation(q, m):
    G = group(q, prec=12)
    T = TowerField(G, m, 6)
    pi_m = T.gen()
    assert not apply_endo(G, q ** (m - 1), pi_m, 6).is_zero()
    assert apply_endo(G, q**m, pi_m, 6).is_zero()


@pytest.mark.parametrize("q,m,sign", [(2, 1, -1), (2, 2, 1), (2, 3, 1), (3, 1, 1), (3, 2, 1)])
def test_norm_of_pi_m(q, m, sign):
    G = group(q, prec=14)
    N = norm_to_base(TowerField(G, m, 6).gen())
    assert N.to_int() == sign * q


@pytest.mark.parametrize("u", [2, 5, -1])
def test_reciprocity_conjugates_are_roots(u):
    G = group(3, prec=12)
    assert reciprocity_conjugacy(G, 2, u, prec=6)["status"] == "pass"


@pytest.mark.parametrize("m", [1, 2, 3])
@pytest.mark.parametrize("u", [3, 5, -1])
def test_cyclotomic_cross_check_over_q2(m, u):
    rep = reciprocity_conjugacy(group(2, prec=12, kind="cyclotomic"), m, u, prec=6)
    assert rep["status"] == "pass"
    assert any(e["check"].startswith("cyclotomic") for e in rep["entries"])


def test_galois_action_is_multiplicative_on_pi_m():
    G = group(3, prec=12)
    T = TowerField(G, 2, 6)
    x = T.gen()
    two_then_four = galois_apply(G, 4, galois_apply(G, 2, x))
    assert (two_then_four - galois_apply(G, 8, x)).is_zero()
    assert is_root(T, galois_apply(G, 2, x), 5)
    with pytest.raises(NotAUnit):
        galois_apply(G, 3, x)
