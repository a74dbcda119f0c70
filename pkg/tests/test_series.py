import pytest
from hypothesis import given
from hypothesis import strategies as st

from lubintate import NonUnitLinearTerm, NonzeroConstantInComposition, TruncatedSeries, make_local_field

P, N, CAP = 3, 8, 7
M = P**N
F = make_local_field(P, precN=N)

coeff_lists = st.lists(st.integers(-(10**6), 10**6), min_size=1, max_size=CAP + 1)


def poly_mul(a, b, cap):
    out = [0] * (cap + 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            if i + j <= cap:
                out[i + j] += x * y
    return out


def poly_compose(a, b, cap):
    acc = [0] * (cap + 1)
    for c in reversed(a):
        acc = poly_mul(acc, b, cap)
        acc[0] += c
    return acc


def ints(s):
    return [c % M for c in (s.coefficient((k,)).to_int() for k in range(s.cap + 1))]


def ser(coeffs):
    return TruncatedSeries.from_coeffs(F, coeffs, var="T", cap=CAP, prec=N)


@given(a=coeff_lists, b=coeff_lists)
def test_product_matches_integer_convolution(backend, a, b):
    got = ints(ser(a).mul_trunc(ser(b), CAP))
    assert got == [c % M for c in poly_mul(a, b, CAP)]


@given(a=coeff_lists, b=coeff_lists)
def test_composition_matches_horner(backend, a, b):
    b = [0] + b[: CAP]
    got = ints(ser(a).compose([ser(b)]))
    assert got == [c % M for c in poly_compose(a, b, CAP)]


@given(a=coeff_lists)
def test_reversion_is_a_compositional_inverse(backend, a):
    a = [0, 1 + 3 * a[0]] + a[1:]
    s = ser(a)
    r = s.reversion()
    X = TruncatedSeries.variable(F, ("T",), "T", CAP, N)
    assert s.compose([r]) == X
    assert r.compose([s]) == X


def test_reversion_preconditions():
    with pytest.raises(NonUnitLinearTerm):
        ser([0, 3, 1]).reversion()
    with pytest.raises(NonzeroConstantInComposition):
        ser([1, 1]).reversion()


@given(a=st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), st.integers(-50, 50), max_size=8),
       b=st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 3)), st.integers(-50, 50), max_size=8))
def test_bivariate_product_matches_dictionary_oracle(backend, a, b):
    cap = 5
    V = ("X", "Y")
    A = TruncatedSeries(F, V, cap, N, a)
    B = TruncatedSeries(F, V, cap, N, b)
    want = {}
    for (i, j), x in a.items():
        for (k, l), y in b.items():
            if i + j + k + l <= cap:
                want[(i + k, j + l)] = want.get((i + k, j + l), 0) + x * y
    got = A.mul_trunc(B, cap)
    for e in {(i, j) for i in range(cap + 1) for j in range(cap + 1 - i)}:
        assert got.coefficient(e).to_int() % M == want.get(e, 0) % M


def test_json_round_trip():
    s = ser([0, 3, -1, 4, 0, 5])
    assert TruncatedSeries.from_json(F, s.to_json()) == s
