"""Finite fields F_q = F_p[y]/(modulus).

Polynomials over F_p are tuples of ints, lowest degree first.
"""
from __future__ import annotations

from functools import cached_property
from itertools import product

from .errors import NotPrime, ReducibleModulus


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


def _trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mod_p(a, p):
    return tuple(_trim(c % p for c in a))


def poly_divmod_p(a, b, p):
    """Quotient and remainder of a by b over F_p (b nonzero)."""
    a = _trim(c % p for c in a)
    b = _trim(c % p for c in b)
    if not b:
        raise ZeroDivisionError("division by zero polynomial")
    inv = pow(b[-1], -1, p)
    q = [0] * max(len(a) - len(b) + 1, 0)
    while len(a) >= len(b):
        shift = len(a) - len(b)
        c = a[-1] * inv % p
        q[shift] = c
        for i, bc in enumerate(b):
            a[i + shift] = (a[i + shift] - c * bc) % p
        a = _trim(a)
    return tuple(q), tuple(a)


def poly_mul_p(a, b, p):
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return tuple(_trim(out))


def poly_gcd_p(a, b, p):
    a, b = poly_mod_p(a, p), poly_mod_p(b, p)
    while b:
        a, b = b, poly_divmod_p(a, b, p)[1]
    if a:
        inv = pow(a[-1], -1, p)
        a = tuple(c * inv % p for c in a)
    return a


def _powmod_x(e, m, p):
    """X^e mod m over F_p, by square and multiply."""
    result = (1,)
    base = (0, 1)
    base = poly_divmod_p(base, m, p)[1]
    while e:
        if e & 1:
            result = poly_divmod_p(poly_mul_p(result, base, p), m, p)[1]
        base = poly_divmod_p(poly_mul_p(base, base, p), m, p)[1]
        e >>= 1
    return result


def is_irreducible_p(m, p) -> bool:
    """Rabin-style test: gcd(m, X^(p^i) - X) = 1 for i <= deg/2, and m | X^(p^deg) - X."""
    m = poly_mod_p(m, p)
    d = len(m) - 1
    if d < 1:
        return False
    if d == 1:
        return True
    for i in range(1, d // 2 + 1):
        xp = list(_powmod_x(p**i, m, p)) + [0, 0]
        xp[1] = (xp[1] - 1) % p
        if len(poly_gcd_p(xp, m, p)) > 1:
            return False
    xp = list(_powmod_x(p**d, m, p)) + [0, 0]
    xp[1] = (xp[1] - 1) % p
    return not poly_mod_p(xp, p)


def default_modulus(p: int, d: int) -> tuple:
    """Lexicographically first monic irreducible of degree d over F_p."""
    if d == 1:
        return (0, 1)
    for tail in product(range(p), repeat=d):
        cand = tuple(reversed(tail)) + (1,)
        if cand[0] and is_irreducible_p(cand, p):
            return cand
    raise ReducibleModulus(f"no irreducible of degree {d} over F_{p}")


class FiniteFieldSpec:
    """F_q with q = p^d, presented as F_p[y]/(modulus)."""

    def __init__(self, p: int, d: int = 1, modulus=None):
        if not is_prime(p):
            raise NotPrime(f"{p} is not prime")
        if d < 1:
            raise ValueError("residue degree must be >= 1")
        if modulus is None:
            modulus = default_modulus(p, d)
        modulus = poly_mod_p(modulus, p)
        if len(modulus) != d + 1 or modulus[-1] != 1:
            raise ReducibleModulus(f"modulus must be monic of degree {d}")
        if not is_irreducible_p(modulus, p):
            raise ReducibleModulus(f"{modulus} is reducible over F_{p}")
        self.p = p
        self.d = d
        self.modulus = modulus
        self.q = p**d

    def __eq__(self, other):
        return isinstance(other, FiniteFieldSpec) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"FiniteFieldSpec(p={self.p}, d={self.d}, modulus={self.modulus})"

    @property
    def key(self):
        return (self.p, self.d, self.modulus)

    # raw arithmetic on length-d tuples
    def reduce(self, coeffs) -> tuple:
        c = list(coeffs) + [0] * max(0, self.d - len(coeffs))
        c = [x % self.p for x in c]
        if len(c) > self.d:
            c = list(poly_divmod_p(c, self.modulus, self.p)[1])
            c += [0] * (self.d - len(c))
        return tuple(c)

    def mul_raw(self, a, b) -> tuple:
        if self.d == 1:
            return (a[0] * b[0] % self.p,)
        return self.reduce(poly_mul_p(a, b, self.p))

    def add_raw(self, a, b) -> tuple:
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def sub_raw(self, a, b) -> tuple:
        p = self.p
        return tuple((x - y) % p for x, y in zip(a, b))

    def pow_raw(self, a, e: int) -> tuple:
        if e < 0:
            a = self.inv_raw(a)
            e = -e
        result = self.one_raw
        while e:
            if e & 1:
                result = self.mul_raw(result, a)
            a = self.mul_raw(a, a)
            e >>= 1
        return result

    def inv_raw(self, a) -> tuple:
        if not any(a):
            raise ZeroDivisionError("inverse of zero in finite field")
        return self.pow_raw(a, self.q - 2)

    def root_p_raw(self, a) -> tuple:
        """Inverse of the absolute Frobenius x -> x^p."""
        return self.pow_raw(a, self.q // self.p) if self.d > 1 else tuple(a)

    @cached_property
    def one_raw(self):
        return (1,) + (0,) * (self.d - 1)

    @cached_property
    def zero_raw(self):
        return (0,) * self.d

    def __call__(self, c) -> FFElem:
        if isinstance(c, FFElem):
            return c
        if isinstance(c, int):
            return FFElem(self, self.reduce((c,)))
        return FFElem(self, self.reduce(tuple(c)))

    def elements(self):
        for c in product(range(self.p), repeat=self.d):
            yield FFElem(self, c)

    def units(self):
        return [x for x in self.elements() if not x.is_zero()]


class FFElem:
    __slots__ = ("spec", "c")

    def __init__(self, spec: FiniteFieldSpec, c):
        self.spec = spec
        self.c = tuple(c)

    def is_zero(self) -> bool:
        return not any(self.c)

    def _coerce(self, other):
        if isinstance(other, FFElem):
            return other
        return self.spec(other)

    def __add__(self, other):
        other = self._coerce(other)
        return FFElem(self.spec, self.spec.add_raw(self.c, other.c))

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return FFElem(self.spec, self.spec.sub_raw(self.c, other.c))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return FFElem(self.spec, tuple(-x % self.spec.p for x in self.c))

    def __mul__(self, other):
        other = self._coerce(other)
        return FFElem(self.spec, self.spec.mul_raw(self.c, other.c))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        return FFElem(self.spec, self.spec.pow_raw(self.c, e))

    def inverse(self):
        return FFElem(self.spec, self.spec.inv_raw(self.c))

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.spec(other)
        return isinstance(other, FFElem) and self.spec == other.spec and self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        if self.spec.d == 1:
            return f"FFElem({self.c[0]} mod {self.spec.p})"
        return f"FFElem({list(self.c)})"
