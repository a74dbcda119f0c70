"""Truncated arithmetic in O_F for F a finite extension of Q_p.

O_F is presented as W[x]/(E(x)) where W = Z_p[y]/(lift of the residue
modulus) is the unramified subring and E is Eisenstein over W. An element
is a vector of integers indexed by the basis ``x^i y^j`` (``i < e``,
``j < d``); index ``i*d + j``. Those vectors ("raw" values) are what the
series kernels work on; :class:`OFElem` wraps one together with its known
precision, counted in digits of the uniformizer.
"""
from __future__ import annotations

import random as _random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Optional, Sequence

from .errors import (
    HenselConditionFails,
    IndistinguishableFromZero,
    InexactDivision,
    NotAUnit,
    NotEisenstein,
    PrecisionExhausted,
)
from .ff import FFElem, FiniteFieldSpec


def vp_int(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _ceil_div(a: int, b: int) -> int:
    return -(-a // b)


@dataclass(frozen=True, order=False)
class Val:
    """A valuation in units of v(uniformizer) = 1; ``value=None`` is +infinity."""

    value: Optional[Fraction]

    @classmethod
    def inf(cls) -> "Val":
        return cls(None)

    @classmethod
    def of(cls, x) -> "Val":
        return cls(Fraction(x))

    @property
    def is_inf(self) -> bool:
        return self.value is None

    def _key(self):
        return (1, 0) if self.value is None else (0, self.value)

    def __lt__(self, other):
        return self._key() < _as_val(other)._key()

    def __le__(self, other):
        return self._key() <= _as_val(other)._key()

    def __gt__(self, other):
        return self._key() > _as_val(other)._key()

    def __ge__(self, other):
        return self._key() >= _as_val(other)._key()

    def __eq__(self, other):
        try:
            return self._key() == _as_val(other)._key()
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(self._key())

    def __add__(self, other):
        other = _as_val(other)
        if self.is_inf or other.is_inf:
            return Val.inf()
        return Val(self.value + other.value)

    __radd__ = __add__

    def __str__(self):
        return "inf" if self.value is None else str(self.value)


def _as_val(x) -> Val:
    if isinstance(x, Val):
        return x
    if isinstance(x, (int, Fraction)):
        return Val(Fraction(x))
    raise TypeError(f"cannot compare Val with {type(x).__name__}")


def _norm_coeff(c, d: int) -> tuple:
    if isinstance(c, int):
        c = (c,)
    c = tuple(int(x) for x in c)
    if len(c) > d:
        raise ValueError(f"unramified coefficient {c} has more than {d} entries")
    return c + (0,) * (d - len(c))


class LocalFieldSpec:
    """The base field F: residue field, Eisenstein polynomial, working precision.

    ``eisenstein`` lists coefficients lowest degree first; each coefficient is
    an integer or a length-``d`` tuple (an element of the unramified subring
    in the basis ``y^j``). ``prec`` is the default working precision in
    uniformizer digits; elements carry their own precision.
    """

    def __init__(self, residue: FiniteFieldSpec, eisenstein: Sequence, prec: int = 16):
        d = residue.d
        coeffs = tuple(_norm_coeff(c, d) for c in eisenstein)
        self.residue = residue
        self.p = residue.p
        self.d = d
        self.q = residue.q
        self.e = len(coeffs) - 1
        self.eisenstein = coeffs
        self.prec = int(prec)
        self._check_eisenstein()
        self.n = self.e * self.d
        # monic integer lift of the residue modulus
        self.unram_modulus = tuple(residue.modulus)

    def _check_eisenstein(self):
        p, coeffs = self.p, self.eisenstein
        if self.e < 1:
            raise NotEisenstein("Eisenstein polynomial must have degree >= 1")
        if coeffs[-1] != (1,) + (0,) * (self.d - 1):
            raise NotEisenstein("Eisenstein polynomial must be monic")
        for c in coeffs[:-1]:
            if any(x % p for x in c):
                raise NotEisenstein(f"coefficient {c} is not divisible by p={p}")
        c0 = tuple(x // p for x in coeffs[0])
        if not any(x % p for x in c0):
            raise NotEisenstein("constant term must have valuation exactly 1")
        if self.prec < 1:
            raise ValueError("precision must be positive")

    # identity ignores the working precision
    @property
    def key(self):
        return (self.p, self.d, self.residue.modulus, self.eisenstein)

    def __eq__(self, other):
        return isinstance(other, LocalFieldSpec) and self.key == other.key

    def __hash__(self):
        return hash(self.key)

    def __repr__(self):
        return f"LocalFieldSpec(p={self.p}, d={self.d}, e={self.e}, prec={self.prec})"

    def with_prec(self, prec: int) -> "LocalFieldSpec":
        return _with_prec(self, int(prec))

    @property
    def is_qp(self) -> bool:
        return self.e == 1 and self.d == 1 and self.eisenstein[0][0] == -self.p

    # ---- exact structure over Z -------------------------------------------------

    def _reduce_exact(self, terms: dict) -> list:
        """Reduce {(i, j): int} with arbitrary i, j to a length-n vector over Z."""
        d, e = self.d, self.e
        m = self.unram_modulus
        # y-reduction per x-degree
        by_i: dict = {}
        for (i, j), c in terms.items():
            if c:
                row = by_i.setdefault(i, {})
                row[j] = row.get(j, 0) + c
        top = max(by_i) if by_i else -1
        rows = []
        for i in range(top + 1):
            row = by_i.get(i, {})
            vec = [0] * (max(row) + 1 if row else 0)
            for j, c in row.items():
                vec[j] += c
            for k in range(len(vec) - 1, d - 1, -1):
                c = vec[k]
                if c:
                    vec[k] = 0
                    for t in range(d):
                        vec[k - d + t] -= c * m[t]
            vec = (vec + [0] * d)[:d]
            rows.append(vec)
        # x-reduction, x^e = -sum a_t x^t
        for i in range(len(rows) - 1, e - 1, -1):
            c = rows[i]
            if any(c):
                rows[i] = [0] * d
                for t in range(e):
                    prod = self._unram_mul_exact(c, self.eisenstein[t])
                    rows[i - e + t] = [a - b for a, b in zip(rows[i - e + t], prod)]
        rows = (rows + [[0] * d] * e)[:e]
        return [c for row in rows for c in row]

    def _unram_mul_exact(self, a, b) -> list:
        d = self.d
        out = [0] * (2 * d)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        m = self.unram_modulus
        for k in range(2 * d - 1, d - 1, -1):
            c = out[k]
            if c:
                out[k] = 0
                for t in range(d):
                    out[k - d + t] -= c * m[t]
        return out[:d]

    @cached_property
    def mult_table(self) -> tuple:
        """T[a][b] = coordinates of basis_a * basis_b, exact over Z."""
        d, n = self.d, self.n
        table = []
        for a in range(n):
            ia, ja = divmod(a, d)
            row = []
            for b in range(n):
                ib, jb = divmod(b, d)
                row.append(tuple(self._reduce_exact({(ia + ib, ja + jb): 1})))
            table.append(tuple(row))
        return tuple(table)

    def table_mod(self, mod: int) -> tuple:
        return _table_mod(self, mod)

    # ---- precision bookkeeping -------------------------------------------------

    def storage_digits(self, prec: int) -> int:
        return _ceil_div(max(prec, 0), self.e) + 1

    def modulus(self, prec: int) -> int:
        return self.p ** self.storage_digits(prec)

    def coord_moduli(self, prec: int) -> tuple:
        return _coord_moduli(self, prec)

    # ---- raw vector operations ---------------------------------------------------

    def canon(self, raw, prec: int) -> tuple:
        mods = self.coord_moduli(prec)
        return tuple(c % m for c, m in zip(raw, mods))

    def zero_raw(self) -> tuple:
        return (0,) * self.n

    def one_raw(self) -> tuple:
        return (1,) + (0,) * (self.n - 1)

    def int_raw(self, c: int) -> tuple:
        return (c,) + (0,) * (self.n - 1)

    def add_raw(self, a, b, prec):
        return self.canon([x + y for x, y in zip(a, b)], prec)

    def sub_raw(self, a, b, prec):
        return self.canon([x - y for x, y in zip(a, b)], prec)

    def neg_raw(self, a, prec):
        return self.canon([-x for x in a], prec)

    def mul_raw(self, a, b, prec):
        if self.n == 1:
            return ((a[0] * b[0]) % self.coord_moduli(prec)[0],)
        mod = self.modulus(prec)
        T = self.table_mod(mod)
        n = self.n
        out = [0] * n
        for i, x in enumerate(a):
            if x:
                Ti = T[i]
                for j, y in enumerate(b):
                    if y:
                        xy = x * y
                        for k, t in enumerate(Ti[j]):
                            if t:
                                out[k] += xy * t
        return self.canon(out, prec)

    def pow_raw(self, a, k: int, prec):
        result = self.canon(self.one_raw(), prec)
        base = a
        while k:
            if k & 1:
                result = self.mul_raw(result, base, prec)
            base = self.mul_raw(base, base, prec)
            k >>= 1
        return result

    def is_zero_raw(self, a) -> bool:
        return not any(a)

    def val_raw(self, a) -> Optional[int]:
        """Valuation of a canonical raw value, None when all known digits vanish."""
        best = None
        d, e, p = self.d, self.e, self.p
        for idx, c in enumerate(a):
            if c:
                v = e * vp_int(c, p) + idx // d
                if best is None or v < best:
                    best = v
        return best

    def residue_raw(self, a) -> tuple:
        """Reduction mod the uniformizer, as a residue-field raw tuple."""
        p = self.p
        return tuple(c % p for c in a[: self.d])

    def lift_residue(self, r) -> tuple:
        return tuple(r) + (0,) * (self.n - self.d)

    @cached_property
    def pi_raw_exact(self) -> tuple:
        if self.e > 1:
            return tuple(self._reduce_exact({(1, 0): 1}))
        return tuple(-c for c in self.eisenstein[0]) + ()

    @cached_property
    def eps_raw_exact(self) -> tuple:
        """eps = pi^e / p, a unit (exact integer coordinates)."""
        e = self.e
        terms = {}
        for t in range(e):
            for j, c in enumerate(self.eisenstein[t]):
                terms[(t, j)] = -(c // self.p)
        return tuple(self._reduce_exact(terms))

    def inv_unit_raw(self, a, prec) -> tuple:
        """Inverse of a unit by Newton iteration from the residue inverse."""
        r = self.residue_raw(a)
        if not any(r):
            raise NotAUnit("element is not a unit")
        y = self.lift_residue(self.residue.inv_raw(r))
        target = self.e * self.storage_digits(prec)
        mod = self.modulus(prec)
        k = 1
        a = tuple(c % mod for c in a)
        work = self.e * self.storage_digits(prec)
        while k < target:
            ay = self.mul_raw(a, y, work)
            two_minus = self.canon([(2 if i == 0 else 0) - c for i, c in enumerate(ay)], work)
            y = self.mul_raw(y, two_minus, work)
            k *= 2
        return self.canon(y, prec)

    def pi_div_const(self, prec) -> tuple:
        """c with x / pi = (x * c) / p for x in pi*O_F."""
        return _pi_div_const(self, prec)

    def div_pi_raw(self, a, prec) -> tuple:
        """Exact division of a canonical raw value of valuation >= 1 by pi.

        Input known mod pi^prec, output known mod pi^(prec-1).
        """
        if prec < 1:
            raise PrecisionExhausted("no digits left to divide by the uniformizer")
        if any(c % self.p for c in a[: self.d]):
            raise InexactDivision("element is not divisible by the uniformizer")
        mod = self.modulus(prec)
        c = self.pi_div_const(prec)
        z = self.mul_raw(a, c, self.e * self.storage_digits(prec))
        z = [x % mod for x in z]
        p = self.p
        for x in z:
            if x % p:
                raise InexactDivision("element is not divisible by the uniformizer")
        return self.canon([x // p for x in z], prec - 1)

    def pi_pow_raw(self, k: int, prec) -> tuple:
        return self.pow_raw(self.canon(self.pi_raw_exact, prec), k, prec)

    def teich_lifts(self):
        """Integer lifts of all residue classes (coordinates in [0, p))."""
        return [self.lift_residue(x.c) for x in self.residue.elements()]

    # ---- element constructors ---------------------------------------------------------

    def __call__(self, x, prec: Optional[int] = None) -> "OFElem":
        prec = self.prec if prec is None else prec
        if isinstance(x, OFElem):
            return x.at_prec(min(prec, x.prec)) if x.shift == 0 else x
        if isinstance(x, Fraction):
            return OFElem.from_rational(self, x, prec)
        if isinstance(x, int):
            return OFElem(self, self.int_raw(x), prec)
        return OFElem(self, tuple(x), prec)

    def uniformizer(self, prec: Optional[int] = None) -> "OFElem":
        prec = self.prec if prec is None else prec
        return OFElem(self, self.pi_raw_exact, prec)

    def random_element(self, rng: _random.Random, prec: Optional[int] = None) -> "OFElem":
        prec = self.prec if prec is None else prec
        mod = self.modulus(prec)
        return OFElem(self, tuple(rng.randrange(mod) for _ in range(self.n)), prec)

    def random_unit(self, rng: _random.Random, prec: Optional[int] = None) -> "OFElem":
        while True:
            x = self.random_element(rng, prec)
            if any(x.raw[: self.d]) and any(c % self.p for c in x.raw[: self.d]):
                return x


@lru_cache(maxsize=None)
def _with_prec(field: LocalFieldSpec, prec: int) -> LocalFieldSpec:
    if prec == field.prec:
        return field
    return LocalFieldSpec(field.residue, field.eisenstein, prec)


@lru_cache(maxsize=None)
def _table_mod(field: LocalFieldSpec, mod: int) -> tuple:
    return tuple(
        tuple(tuple(c % mod for c in entry) for entry in row) for row in field.mult_table
    )


@lru_cache(maxsize=None)
def _coord_moduli(field: LocalFieldSpec, prec: int) -> tuple:
    e, d, p = field.e, field.d, field.p
    out = []
    for idx in range(field.n):
        i = idx // d
        k = _ceil_div(prec - i, e)
        out.append(p ** k if k > 0 else 1)
    return tuple(out)


@lru_cache(maxsize=None)
def _pi_div_const(field: LocalFieldSpec, prec: int) -> tuple:
    work = field.e * field.storage_digits(prec)
    eps_inv = field.inv_unit_raw(field.canon(field.eps_raw_exact, work), work)
    pi_em1 = field.pi_pow_raw(field.e - 1, work)
    return field.mul_raw(pi_em1, eps_inv, work)


def make_local_field(p: int, d: int = 1, modulus=None, eisenstein=None, precN: int = 16) -> LocalFieldSpec:
    """Validated base field. ``eisenstein=None`` means the unramified field with uniformizer p."""
    residue = FiniteFieldSpec(p, d, modulus)
    if eisenstein is None:
        eisenstein = [-p, 1]
    return LocalFieldSpec(residue, eisenstein, precN)


class OFElem:
    """``pi^shift * body`` with ``body`` in O_F known modulo ``pi^prec``.

    Canonical form: ``shift <= 0``, and ``shift < 0`` only when the body is
    not divisible by pi. Integral elements therefore always have shift 0.
    """

    __slots__ = ("field", "raw", "prec", "shift", "exact_zero")

    def __init__(self, field: LocalFieldSpec, raw, prec: int, shift: int = 0, exact_zero: bool = False):
        if prec < 0:
            raise PrecisionExhausted("negative precision")
        self.field = field
        self.prec = prec
        self.exact_zero = exact_zero
        raw = field.canon(raw, prec)
        if shift > 0:
            raw = field.mul_raw(raw, field.pi_pow_raw(shift, prec + shift), prec + shift)
            prec += shift
            shift = 0
        elif shift < 0:
            v = field.val_raw(raw)
            t = min(-shift, prec if v is None else v)
            for _ in range(t):
                raw = field.div_pi_raw(raw, prec)
                prec -= 1
            shift += t
        self.raw = raw
        self.prec = prec
        self.shift = shift

    # ---- constructors ------------------------------------------------------------
    @classmethod
    def zero(cls, field, prec=None, exact=True):
        prec = field.prec if prec is None else prec
        return cls(field, field.zero_raw(), prec, exact_zero=exact)

    @classmethod
    def one(cls, field, prec=None):
        prec = field.prec if prec is None else prec
        return cls(field, field.one_raw(), prec)

    @classmethod
    def from_rational(cls, field, x: Fraction, prec=None):
        prec = field.prec if prec is None else prec
        x = Fraction(x)
        num, den = x.numerator, x.denominator
        k = 0
        while den % field.p == 0:
            den //= field.p
            k += 1
        body = OFElem(field, field.int_raw(num), prec + field.e * k)
        body = body * OFElem(field, field.int_raw(den), prec + field.e * k).inverse()
        if k:
            # p^-1 = pi^-e * eps
            eps = OFElem(field, field.eps_raw_exact, body.prec)
            body = body * eps**k
            return OFElem(field, body.raw, body.prec, shift=-field.e * k)
        return body

    # ---- basic properties --------------------------------------------------------
    @property
    def abs_prec(self) -> int:
        return self.shift + self.prec

    def is_zero(self) -> bool:
        return self.exact_zero or not any(self.raw)

    def is_integral(self) -> bool:
        return self.shift >= 0

    def valuation(self) -> Val:
        if self.exact_zero:
            return Val.inf()
        v = self.field.val_raw(self.raw)
        if v is None:
            raise IndistinguishableFromZero(
                f"all {self.prec} known digits vanish; valuation is only bounded below by {self.abs_prec}"
            )
        return Val(Fraction(self.shift + v))

    def val_lower(self) -> int:
        """Valuation, or the absolute precision when indistinguishable from zero."""
        if self.exact_zero:
            return self.abs_prec
        v = self.field.val_raw(self.raw)
        return self.abs_prec if v is None else self.shift + v

    def is_unit(self) -> bool:
        return self.shift == 0 and any(c % self.field.p for c in self.raw[: self.field.d])

    def residue(self) -> FFElem:
        if self.shift < 0:
            raise NotAUnit("element is not integral")
        return FFElem(self.field.residue, self.field.residue_raw(self.raw))

    def at_prec(self, prec: int) -> "OFElem":
        if prec > self.prec:
            raise PrecisionExhausted(f"cannot raise precision from {self.prec} to {prec}")
        return OFElem(self.field, self.raw, prec, self.shift)

    def lift(self, prec: int) -> "OFElem":
        """Same representative viewed at a higher precision (adds zero digits)."""
        return OFElem(self.field, self.raw, prec, self.shift)

    # ---- arithmetic ----------------------------------------------------------------
    def _coerce(self, other) -> "OFElem":
        if isinstance(other, OFElem):
            if other.field != self.field:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, int):
            extra = self.field.e * (abs(other).bit_length() + 1)
            return OFElem(self.field, self.field.int_raw(other), max(self.prec, 1) + extra)
        if isinstance(other, Fraction):
            return OFElem.from_rational(self.field, other, max(self.prec, 1) + 8 * self.field.e)
        return NotImplemented

    def _aligned(self, s: int):
        """(raw, prec) of the body rescaled to shift s <= self.shift."""
        k = self.shift - s
        if k == 0:
            return self.raw, self.prec
        prec = self.prec + k
        F = self.field
        return F.mul_raw(self.raw, F.pi_pow_raw(k, prec), prec), prec

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.exact_zero:
            return other
        if other.exact_zero:
            return self
        s = min(self.shift, other.shift)
        ra, pa = self._aligned(s)
        rb, pb = other._aligned(s)
        prec = min(pa, pb)
        return OFElem(self.field, self.field.add_raw(ra, rb, prec), prec, s)

    __radd__ = __add__

    def __neg__(self):
        if self.exact_zero:
            return self
        return OFElem(self.field, self.field.neg_raw(self.raw, self.prec), self.prec, self.shift)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.exact_zero:
            return self
        if other.exact_zero:
            return other
        F = self.field
        va = F.val_raw(self.raw)
        vb = F.val_raw(other.raw)
        va = self.prec if va is None else va
        vb = other.prec if vb is None else vb
        prec = min(self.prec + vb, other.prec + va)
        raw = F.mul_raw(self.raw, other.raw, prec)
        return OFElem(F, raw, prec, self.shift + other.shift)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.field_inverse() ** (-k)
        result = OFElem(self.field, self.field.one_raw(), self.prec + max(0, self.shift) * k + self.field.e)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self) -> "OFElem":
        """Inverse of a unit of O_F."""
        if not self.is_unit():
            raise NotAUnit("element has positive valuation (or is not integral)")
        return OFElem(self.field, self.field.inv_unit_raw(self.raw, self.prec), self.prec)

    def field_inverse(self) -> "OFElem":
        """Inverse in F; the result may have negative shift."""
        F = self.field
        v = F.val_raw(self.raw)
        if v is None:
            raise IndistinguishableFromZero("cannot invert an element indistinguishable from zero")
        raw, prec = self.raw, self.prec
        for _ in range(v):
            raw = F.div_pi_raw(raw, prec)
            prec -= 1
        inv = F.inv_unit_raw(raw, prec)
        return OFElem(F, inv, prec, -(self.shift + v))

    def divide_exact(self, other) -> "OFElem":
        """self / other inside O_F; requires v(self) >= v(other)."""
        other = self._coerce(other)
        if other.is_zero() and not other.exact_zero:
            raise IndistinguishableFromZero("divisor indistinguishable from zero")
        vb = other.valuation().value
        if not self.is_zero() and self.valuation().value < vb:
            raise InexactDivision("dividend valuation below divisor valuation")
        q = self * other.field_inverse()
        if q.shift < 0:
            if q.is_zero():
                return OFElem(self.field, q.raw, max(q.abs_prec, 0))
            raise InexactDivision("quotient is not integral")
        return q

    __truediv__ = divide_exact

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self._coerce(other)
        if not isinstance(other, OFElem):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def __repr__(self):
        if self.field.n == 1 and self.shift == 0:
            return f"OFElem({self.raw[0]} + O(pi^{self.prec}))"
        return f"OFElem({list(self.raw)}, prec={self.prec}, shift={self.shift})"

    def to_int(self) -> int:
        """Signed integer representative (only meaningful when n == 1)."""
        if self.field.n != 1 or self.shift != 0:
            raise ValueError("integer representative only defined for n == 1 integral elements")
        m = self.field.coord_moduli(self.prec)[0]
        c = self.raw[0]
        return c - m if c > m // 2 else c

    # ---- serialization ------------------------------------------------------------------
    def to_json(self) -> dict:
        d = self.field.d
        digits = [list(self.raw[i * d : (i + 1) * d]) for i in range(self.field.e)]
        return {"e_digits": digits, "prec": self.prec, "shift": self.shift}

    @classmethod
    def from_json(cls, field: LocalFieldSpec, obj: dict) -> "OFElem":
        raw = tuple(c for row in obj["e_digits"] for c in row)
        if len(raw) != field.n:
            raise ValueError("digit vector length does not match the field")
        x = cls.__new__(cls)
        x.field = field
        x.prec = int(obj["prec"])
        x.shift = int(obj.get("shift", 0))
        x.exact_zero = False
        x.raw = field.canon(raw, x.prec)
        return x


def teichmuller(c: FFElem, field: LocalFieldSpec, prec: Optional[int] = None) -> OFElem:
    """The (q-1)-th root of unity reducing to c."""
    prec = field.prec if prec is None else prec
    if c.is_zero():
        raise NotAUnit("Teichmuller representative of 0 is 0, not a root of unity")
    seed = OFElem(field, field.lift_residue(c.c), prec)
    one = OFElem.one(field, prec)
    poly = [-one] + [OFElem.zero(field, prec)] * (field.q - 2) + [one]
    return hensel_lift(poly, seed)


def _horner(coeffs, x):
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


def _derivative(coeffs):
    return [c * k for k, c in enumerate(coeffs)][1:]


def hensel_lift(poly: Sequence, x0, max_iter: int = 64):
    """Newton iteration from x0 to a root of ``poly`` (coefficients lowest first).

    Works for any ring element type exposing ``valuation``, ``val_lower``,
    ``divide_exact`` and ``is_zero``. Requires v(P(x0)) > 2 v(P'(x0)).
    """
    dpoly = _derivative(list(poly))
    px = _horner(list(poly), x0)
    dpx = _horner(dpoly, x0)
    if dpx.is_zero():
        raise HenselConditionFails("derivative vanishes at the starting point")
    vdp = dpx.valuation()
    vp0 = Val.of(px.val_lower()) if px.is_zero() else px.valuation()
    if not vp0 > vdp + vdp:
        raise HenselConditionFails(
            f"v(P(x0)) = {vp0} is not greater than 2 v(P'(x0)) = {vdp + vdp}"
        )
    work = x0.prec
    x = x0
    for _ in range(max_iter):
        x = x.lift(work)
        px = _horner(list(poly), x)
        if px.is_zero():
            break
        dpx = _horner(dpoly, x)
        step = px.divide_exact(dpx)
        x = x - step
    else:
        raise PrecisionExhausted("Newton iteration did not stabilise")
    dpx = _horner(dpoly, x)
    if dpx.is_zero():
        raise PrecisionExhausted("derivative lost at the root")
    loss = dpx.valuation().value
    x = x.at_prec(work - int(loss))
    # contact bound: v(x - x0) >= v(P(x0)) - 2 v(P'(x0))
    diff = x - x0
    if not diff.is_zero():
        bound = vp0.value - 2 * vdp.value if not vp0.is_inf else None
        if bound is not None and diff.valuation().value < bound:
            raise HenselConditionFails("contact bound violated; precision too low")
    return x
