import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from lubintate import kernel, make_local_field
from lubintate import _pykernel
from lubintate.series import monomial_basis

needs_c = pytest.mark.skipif("cython" not in kernel.available_backends(), reason="compiled kernel not built")

FIELDS = [(3, 1, None), (2, 2, None), (3, 1, [-3, 0, 1]), (3, 1, [3, 0, 0, 0, 0, 3, 1])]


def rand_coeffs(F, prec, length, rng):
    mods = F.coord_moduli(prec)
    return [tuple(rng.randrange(m) for m in mods) for _ in range(length)]


@needs_c
@pytest.mark.parametrize("p,d,eis", FIELDS)
@given(seed=st.integers(0, 10**6), la=st.integers(1, 40), lb=st.integers(1, 40), prec=st.integers(1, 100))
def test_dense_kernels_agree(p, d, eis, seed, la, lb, prec):
    F = make_local_field(p, d, None, eis, precN=8)
    rng = random.Random(seed)
    mod = F.modulus(prec)
    T = F.table_mod(mod)
    a, b = rand_coeffs(F, prec, la, rng), rand_coeffs(F, prec, lb, rng)
    out_len = rng.randint(1, la + lb)
    want = [tuple(r) for r in _pykernel.mul_dense(a, b, out_len, T, mod, F.n)]
    old = kernel.get_backend()
    kernel.set_backend("cython")
    try:
        got = kernel.mul_dense(a, b, out_len, T, mod, F.n)
    finally:
        kernel.set_backend(old)
    if kernel._use_c(mod):
        assert got == want
    else:
        assert [tuple(r) for r in got] == want


@needs_c
@pytest.mark.parametrize("nvars,cap", [(1, 9), (2, 6), (3, 4)])
@given(seed=st.integers(0, 10**6))
def test_graded_kernels_agree(nvars, cap, seed):
    F = make_local_field(3, 1, None, [-3, 0, 1], precN=8)
    basis = monomial_basis(nvars, cap)
    rng = random.Random(seed)
    mod = F.modulus(8)
    T = F.table_mod(mod)

    def sparse():
        keys = rng.sample(range(basis.size), min(basis.size, rng.randint(1, 12)))
        return {k: tuple(rng.randrange(mod) for _ in range(F.n)) for k in keys}

    a, b = sparse(), sparse()
    old = kernel.get_backend()
    try:
        kernel.set_backend("python")
        want = kernel.mul_graded(a, b, basis, T, mod, F.n)
        kernel.set_backend("cython")
        got = kernel.mul_graded(a, b, basis, T, mod, F.n)
    finally:
        kernel.set_backend(old)
    norm = lambda d: {k: tuple(x % mod for x in v) for k, v in d.items() if any(x % mod for x in v)}  # noqa: E731
    assert norm(got) == norm(want)


def test_backend_switching():
    assert "python" in kernel.available_backends()
    with pytest.raises(ValueError):
        kernel.set_backend("fortran")
    old = kernel.get_backend()
    kernel.set_backend("python")
    assert kernel.get_backend() == "python"
    kernel.set_backend(old)
