"""The coefficient rings A_F (Laurent series in pi over O_F, completed
pi-adically in the coefficients) and E_F = k_F((pi_bar)).

An :class:`AFElem` is ``sum c_j pi^j`` with coefficients in a coefficient
field (O_F, or O_L for a finite extension L of F = Q_p) known modulo the
uniformizer to ``prec`` digits, and known for exponents ``<= hi``
(``hi = None`` means the element is an exact Laurent polynomial modulo the
coefficient precision).
"""
from __future__ import annotations

from fractions import Fraction
from typing import Optional

from . import kernel
from .errors import (
    InexactDivision,
    IndistinguishableFromZero,
    NotAUnit,
    PerfectionDepthExceeded,
    PrecisionExhausted,
    WindowOverflow,
)
from .ff import FiniteFieldSpec
from .formal_group import LTGroup, guard_digits
from .padic import LocalFieldSpec, OFElem


def _min_hi(*his):
    vals = [h for h in his if h is not None]
    return min(vals) if vals else None


class AFRing:
    """A_F (or O_L . A_F) attached to a Lubin-Tate group G over F.

    ``coef`` is the coefficient field; when it differs from G.field, F must
    be Q_p and O_F = Z_p embeds by integers. ``lo_limit`` bounds negative
    exponents (WindowOverflow below it); ``hi_default`` is the truncation
    used when an inverse has an infinite pi-adic expansion.
    """

    def __init__(self, G: LTGroup, prec: int, coef: Optional[LocalFieldSpec] = None, lo_limit: int = -4096, hi_default: int = 32):
        self.group = G
        self.base = G.field
        self.coef = self.base if coef is None else coef
        if self.coef != self.base and not self.base.is_qp:
            raise ValueError("coefficient extensions are only supported over F = Q_p")
        if self.coef.p != self.base.p:
            raise ValueError("coefficient field has a different residue characteristic")
        self.prec = int(prec)
        self.lo_limit = lo_limit
        self.hi_default = hi_default
        self.mod = self.coef.modulus(self.prec)
        # base-field precision needed so that coefficients reach `prec` coefficient digits
        ratio = self.coef.e // self.base.e if self.coef != self.base else 1
        self.ratio = ratio
        self.base_prec = -(-self.prec // ratio)
        self._series: dict = {}

    def __repr__(self):
        return f"AFRing(coef={self.coef!r}, prec={self.prec})"

    @property
    def q(self) -> int:
        return self.base.q

    # ---- constructors ----------------------------------------------------------------
    def _coerce_coeff(self, c) -> tuple:
        C = self.coef
        if isinstance(c, OFElem):
            if c.field == C:
                if c.shift < 0:
                    raise ValueError("coefficients must be integral")
                return C.canon(c.raw, self.prec)
            if c.field == self.base and self.base.is_qp:
                return C.canon(C.int_raw(c.to_int()), self.prec)
            raise ValueError("coefficient from an unrelated field")
        if isinstance(c, int):
            return C.canon(C.int_raw(c), self.prec)
        return C.canon(tuple(c), self.prec)

    def elem(self, coeffs: dict, hi: Optional[int] = None, prec: Optional[int] = None) -> "AFElem":
        prec = self.prec if prec is None else prec
        if not coeffs:
            return AFElem(self, 0, [], hi, prec)
        lo = min(coeffs)
        top = max(coeffs)
        dense = [self.coef.zero_raw()] * (top - lo + 1)
        for j, c in coeffs.items():
            dense[j - lo] = self._coerce_coeff(c)
        return AFElem(self, lo, dense, hi, prec)

    def zero(self) -> "AFElem":
        return AFElem(self, 0, [], None, self.prec)

    def one(self) -> "AFElem":
        return self.const(1)

    def const(self, c) -> "AFElem":
        return AFElem(self, 0, [self._coerce_coeff(c)], None, self.prec)

    def pi(self, k: int = 1) -> "AFElem":
        return AFElem(self, k, [self.coef.one_raw()], None, self.prec)

    def random(self, rng, lo: int, hi: int, exact: bool = True) -> "AFElem":
        C = self.coef
        dense = [C.random_element(rng, self.prec).raw for _ in range(hi - lo + 1)]
        return AFElem(self, lo, dense, None if exact else hi, self.prec)

    def from_series(self, s, hi: Optional[int] = None) -> "AFElem":
        """Embed a univariate TruncatedSeries over F (or the coefficient field)."""
        coeffs = {}
        for (k,), c in s.terms.items():
            coeffs[k] = self._coerce_coeff(OFElem(s.field, c, s.prec))
        h = s.cap if hi is None else min(hi, s.cap)
        prec = min(self.prec, s.prec * (self.coef.e // s.field.e) if s.field != self.coef else s.prec)
        return self.elem(coeffs, hi=h, prec=prec)

    # ---- images of pi ---------------------------------------------------------------------
    def f_of_pi(self) -> "AFElem":
        """phi(pi) = f(pi), an exact Laurent polynomial."""
        if "f" not in self._series:
            G = self.group
            f = G.f_series(G.degree if G.polynomial else G.cap)
            self._series["f"] = self.from_series(f, hi=None if G.polynomial else f.cap)
            if G.polynomial:
                x = self._series["f"]
                self._series["f"] = AFElem(self, x.lo, x.coeffs, None, x.prec)
        return self._series["f"]

    def endo_of_pi(self, a, cap: int) -> "AFElem":
        """[a](pi) known to degree ``cap``."""
        G = self.group
        a_el = G._coerce_scalar(a) if not isinstance(a, OFElem) else a
        key = ("endo", tuple(a_el.raw), a_el.prec, cap)
        if key not in self._series:
            need = self.base_prec + guard_digits(G.q, cap)
            H = G if G.prec >= need else _regroup(G, need)
            a_el = H._coerce_scalar(a_el if a_el.prec >= need else a)
            s = H.endo(a_el, cap)
            self._series[key] = self.from_series(s)
        return self._series[key]


_regroups: dict = {}


def _regroup(G: LTGroup, prec: int) -> LTGroup:
    """The same Lubin-Tate series at a higher working precision."""
    key = (id(G), prec)
    if key not in _regroups:
        F = G.field.with_prec(prec)
        if G.polynomial:
            H = LTGroup(F, [OFElem(F, c.raw, prec) for c in G.f_coeffs()], cap=G.cap, prec=prec, polynomial=True, kind=G.kind)
        else:
            H = LTGroup(F, G.f_series(G._f_cap), cap=G.cap, prec=prec, polynomial=False, kind=G.kind)
        _regroups[key] = (G, H)
    return _regroups[key][1]


class AFElem:
    __slots__ = ("ring", "lo", "coeffs", "hi", "prec")

    def __init__(self, ring: AFRing, lo: int, coeffs: list, hi: Optional[int], prec: int):
        C = ring.coef
        if prec < 0:
            raise PrecisionExhausted("negative precision")
        coeffs = [C.canon(c, prec) for c in coeffs]
        # trim
        start = 0
        while start < len(coeffs) and not any(coeffs[start]):
            start += 1
        end = len(coeffs)
        while end > start and not any(coeffs[end - 1]):
            end -= 1
        if hi is not None:
            end = min(end, max(start, hi - lo + 1))
            while end > start and not any(coeffs[end - 1]):
                end -= 1
        coeffs = coeffs[start:end]
        lo = lo + start if coeffs else 0
        if coeffs and lo < ring.lo_limit:
            raise WindowOverflow(f"exponent {lo} below the window limit {ring.lo_limit}")
        self.ring = ring
        self.lo = lo
        self.coeffs = coeffs
        self.hi = hi
        self.prec = prec

    # ---- queries ------------------------------------------------------------------------
    @property
    def top(self) -> int:
        """Largest stored exponent (lo - 1 when zero)."""
        return self.lo + len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_exact(self) -> bool:
        return self.hi is None

    def coefficient(self, j: int) -> OFElem:
        C = self.ring.coef
        if self.hi is not None and j > self.hi:
            raise PrecisionExhausted(f"exponent {j} beyond the known range (hi={self.hi})")
        if self.lo <= j <= self.top:
            return OFElem(C, self.coeffs[j - self.lo], self.prec)
        return OFElem(C, C.zero_raw(), self.prec)

    def items(self):
        for i, c in enumerate(self.coeffs):
            if any(c):
                yield self.lo + i, c

    def unit_exponent(self) -> Optional[int]:
        """Lowest exponent whose coefficient is a unit (the pi_bar-order of the reduction)."""
        C = self.ring.coef
        for i, c in enumerate(self.coeffs):
            if any(C.residue_raw(c)):
                return self.lo + i
        return None

    def is_unit(self) -> bool:
        return self.unit_exponent() is not None

    def is_constant(self) -> bool:
        return all(j == 0 for j, _ in self.items())

    def constant(self) -> OFElem:
        return self.coefficient(0)

    def window(self) -> list:
        return [self.lo, self.top if self.hi is None else self.hi]

    # ---- arithmetic -----------------------------------------------------------------------
    def _coerce(self, other) -> "AFElem":
        if isinstance(other, AFElem):
            if other.ring is not self.ring:
                raise ValueError("elements of different rings")
            return other
        if isinstance(other, (int, OFElem)):
            return self.ring.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        C = self.ring.coef
        prec = min(self.prec, other.prec)
        hi = _min_hi(self.hi, other.hi)
        if self.is_zero():
            return AFElem(self.ring, other.lo, other.coeffs, hi, prec)
        if other.is_zero():
            return AFElem(self.ring, self.lo, self.coeffs, hi, prec)
        lo = min(self.lo, other.lo)
        top = max(self.top, other.top)
        if hi is not None:
            top = min(top, hi)
        out = [C.zero_raw()] * (top - lo + 1)
        for src in (self, other):
            for i, c in enumerate(src.coeffs):
                k = src.lo + i - lo
                if 0 <= k < len(out):
                    out[k] = tuple(x + y for x, y in zip(out[k], c))
        return AFElem(self.ring, lo, out, hi, prec)

    __radd__ = __add__

    def __neg__(self):
        return AFElem(self.ring, self.lo, [tuple(-x for x in c) for c in self.coeffs], self.hi, self.prec)

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
        R = self.ring
        C = R.coef
        prec = min(self.prec, other.prec)
        if self.is_zero() or other.is_zero():
            z = self if self.is_zero() else other
            hi = None
            if self.hi is not None and not other.is_zero():
                hi = self.hi + other.lo
            if other.hi is not None and not self.is_zero():
                hi = _min_hi(hi, other.hi + self.lo)
            if z.hi is not None and hi is None:
                hi = z.hi + (other.lo if z is self else self.lo)
            return AFElem(R, 0, [], hi, prec)
        cands = []
        if self.hi is not None:
            cands.append(self.hi + other.lo)
        if other.hi is not None:
            cands.append(other.hi + self.lo)
        hi = min(cands) if cands else None
        lo = self.lo + other.lo
        full = len(self.coeffs) + len(other.coeffs) - 1
        out_len = full if hi is None else max(0, min(full, hi - lo + 1))
        mod = C.modulus(prec)
        prod = kernel.mul_dense(self.coeffs, other.coeffs, out_len, C.table_mod(mod), mod, C.n)
        return AFElem(R, lo, prod, hi, prec)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = None
        base = self
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        return self.ring.one() if result is None else result

    def shift(self, k: int) -> "AFElem":
        """Multiply by pi^k."""
        return AFElem(self.ring, self.lo + k, self.coeffs, None if self.hi is None else self.hi + k, self.prec)

    def scale(self, c) -> "AFElem":
        R = self.ring
        C = R.coef
        if isinstance(c, OFElem) and c.field == C:
            prec = min(self.prec, c.prec)
            cr = C.canon(c.raw, prec)
        else:
            prec = self.prec
            cr = R._coerce_coeff(c)
        return AFElem(R, self.lo, [C.mul_raw(x, cr, prec) for x in self.coeffs], self.hi, prec)

    def truncate(self, hi: int) -> "AFElem":
        return AFElem(self.ring, self.lo, self.coeffs, _min_hi(self.hi, hi), self.prec)

    def at_prec(self, prec: int) -> "AFElem":
        return AFElem(self.ring, self.lo, self.coeffs, self.hi, min(prec, self.prec))

    def div_pi_power(self, k: int) -> "AFElem":
        """Exact division of all coefficients by the uniformizer of the coefficient field, k times."""
        C = self.ring.coef
        if k <= 0:
            return self
        if self.prec < k:
            raise PrecisionExhausted("no digits left to divide by the uniformizer")
        # x / pi^k = x (p/pi)^k / p^k, one batched product
        W = self.prec + k * C.e
        ck = C.pow_raw(C.pi_div_const(W), k, W)
        mod = C.modulus(W)
        prod = kernel.mul_dense(list(self.coeffs), [ck], len(self.coeffs), C.table_mod(mod), mod, C.n)
        pk = C.p**k
        coeffs = []
        for row in prod:
            if any(x % pk for x in row):
                raise InexactDivision("element is not divisible by the uniformizer power")
            coeffs.append(C.canon([x // pk for x in row], self.prec - k))
        return AFElem(self.ring, self.lo, coeffs, self.hi, self.prec - k)

    def _split(self):
        """(k, c, z_minus, z_plus) with self = c pi^k (1 + z_minus + z_plus)."""
        R = self.ring
        C = R.coef
        k = self.unit_exponent()
        if k is None:
            raise NotAUnit("reduction mod the uniformizer vanishes")
        c = OFElem(C, self.coeffs[k - self.lo], self.prec)
        cinv = c.inverse()
        y = self.shift(-k).scale(cinv)
        zm = {j: v for j, v in y.items() if j < 0}
        zp = {j: v for j, v in y.items() if j > 0}
        z_minus = R.elem(zm, prec=y.prec)
        z_plus = R.elem(zp, hi=None if y.hi is None else y.hi, prec=y.prec)
        return k, cinv, z_minus, z_plus

    def inverse(self, hi: Optional[int] = None) -> "AFElem":
        """Inverse of a unit of A_F.

        Exact when the element is exact and its reduction is a monomial
        (a finite geometric sum); otherwise truncated at ``hi`` (default
        ``ring.hi_default``) or at what the input's own truncation allows.
        """
        R = self.ring
        N = self.prec
        k, cinv, z_minus, z_plus = self._split()
        C = R.coef
        zp_reduces_to_zero = all(not any(C.residue_raw(c)) for c in z_plus.coeffs)
        one = AFElem(R, 0, [C.one_raw()], None, N)
        if self.hi is None and zp_reduces_to_zero:
            z = z_minus + z_plus
            acc = one
            term = one
            for _ in range(N):
                term = -(term * z)
                if term.is_zero():
                    break
                acc = acc + term
            return acc.scale(cinv).shift(-k)
        target = R.hi_default if hi is None else hi
        L = -z_minus.lo if not z_minus.is_zero() else 0
        H = target + k + L * N + 2
        if z_plus.hi is not None:
            H = min(H, z_plus.hi)
        A = _series_inverse(one + z_plus, H)
        if z_minus.is_zero():
            inv = A
        else:
            w = z_minus * A
            acc = one
            term = one
            for _ in range(N):
                term = -(term * w)
                if term.is_zero() and term.hi is None:
                    break
                acc = acc + term
            inv = A * acc
        inv = inv.scale(cinv).shift(-k)
        if self.hi is not None and not inv.is_zero():
            inv = inv.truncate(self.hi + 2 * inv.lo)
        if hi is not None:
            inv = inv.truncate(hi)
        return inv

    def __truediv__(self, other):
        other = self._coerce(other)
        return self * other.inverse()

    # ---- comparison -----------------------------------------------------------------------
    def first_difference(self, other) -> Optional[int]:
        """Lowest exponent where the elements differ at their common precision and window."""
        other = self._coerce(other)
        d = self - other
        for j, c in d.items():
            return j
        return None

    def __eq__(self, other):
        if isinstance(other, (AFElem, int, OFElem)):
            return self.first_difference(other) is None
        return NotImplemented

    __hash__ = None

    def reduce(self, ef_ring: Optional["EFRing"] = None) -> "EFElem":
        """Image in k((pi_bar)) (the coefficient residue field)."""
        R = self.ring
        C = R.coef
        E = ef_ring if ef_ring is not None else EFRing(C.residue, R.q)
        terms = {}
        for j, c in self.items():
            r = C.residue_raw(c)
            if any(r):
                terms[j] = r
        return EFElem(E, 0, terms, None if self.hi is None else Fraction(self.hi))

    def __repr__(self):
        return f"AFElem({self.to_string()}, window={self.window()}, prec={self.prec})"

    def to_string(self) -> str:
        C = self.ring.coef
        parts = []
        for j, c in self.items():
            v = OFElem(C, c, self.prec).to_int() if C.n == 1 else list(c)
            parts.append(f"{v}*pi^{j}")
        s = " + ".join(parts) if parts else "0"
        return s + ("" if self.hi is None else f" + O(pi^{self.hi + 1})")

    def to_json(self) -> dict:
        C = self.ring.coef
        return {
            "window": [self.lo, self.hi if self.hi is not None else self.top],
            "exact": self.hi is None,
            "prec": self.prec,
            "coeffs": {str(j): OFElem(C, c, self.prec).to_json() for j, c in self.items()},
        }

    @classmethod
    def from_json(cls, ring: AFRing, obj: dict) -> "AFElem":
        coeffs = {int(j): OFElem.from_json(ring.coef, c) for j, c in obj["coeffs"].items()}
        hi = None if obj.get("exact", False) else obj["window"][1]
        return ring.elem(coeffs, hi=hi, prec=int(obj["prec"]))


def _series_inverse(u: AFElem, H: int) -> AFElem:
    """Inverse of 1 + (pi-adically small) power series, known to exponent H.

    Newton steps run on exact approximations; after the step with target k
    the iterate agrees with the inverse below pi^k.
    """
    R = u.ring
    C = R.coef
    if u.hi is not None:
        H = min(H, u.hi)
    one = AFElem(R, 0, [C.one_raw()], None, u.prec)
    two = AFElem(R, 0, [C.int_raw(2)], None, u.prec)
    y = one
    k = 1
    while k < H + 1:
        k = min(2 * k, H + 1)
        uk = AFElem(R, u.lo, u.coeffs, None, u.prec).truncate(k - 1)
        uk = AFElem(R, uk.lo, uk.coeffs, None, uk.prec)
        y = (y * (two - uk * y)).truncate(k - 1)
        y = AFElem(R, y.lo, y.coeffs, None, y.prec)
    return AFElem(R, y.lo, y.coeffs, H, y.prec)


# ---- phi and Gamma ------------------------------------------------------------------------


def _substitute(x: AFElem, s: AFElem, s_inv: AFElem) -> AFElem:
    """sum c_j s^j for j >= 0 plus sum c_j s_inv^(-j) for j < 0 (Horner on both halves)."""
    R = x.ring
    pos = [(j, c) for j, c in x.items() if j >= 0]
    neg = [(j, c) for j, c in x.items() if j < 0]
    result = R.zero()
    if pos:
        top = pos[-1][0]
        dense = {j: c for j, c in pos}
        acc = AFElem(R, 0, [dense[top]], None, x.prec)
        for j in range(top - 1, -1, -1):
            acc = acc * s
            if j in dense:
                acc = acc + AFElem(R, 0, [dense[j]], None, x.prec)
        result = result + acc
    if neg:
        low = neg[0][0]
        dense = {j: c for j, c in neg}
        acc = AFElem(R, 0, [dense[low]], None, x.prec)
        for j in range(low + 1, 0):
            acc = acc * s_inv
            if j in dense:
                acc = acc + AFElem(R, 0, [dense[j]], None, x.prec)
        acc = acc * s_inv
        result = result + acc
    return result


def af_frobenius(x: AFElem) -> AFElem:
    """phi_F: identity on coefficients, pi -> [pi](pi) = f(pi)."""
    R = x.ring
    f = R.f_of_pi()
    f_inv = R._series.get("f_inv")
    if f_inv is None:
        f_inv = f.inverse()
        R._series["f_inv"] = f_inv
    known = AFElem(R, x.lo, x.coeffs, None, x.prec)
    y = _substitute(known, f, f_inv)
    if x.hi is not None:
        # phi(pi^(h) O[[pi]]) = f(pi)^h O[[pi]], of pi-order >= q h - (q-1)(N-1)
        h = x.hi + 1
        n = max(-(-x.prec // R.ratio) - 1, 0)
        q = R.q
        bound = q * h - (q - 1) * (min(h, n) if h >= 0 else n)
        y = y.truncate(bound - 1)
    return y


def af_gamma(a, x: AFElem, target_hi: Optional[int] = None) -> AFElem:
    """sigma_a: identity on coefficients, pi -> [a](pi), for a unit a of O_F."""
    R = x.ring
    G = R.group
    a_el = G._coerce_scalar(a)
    if not a_el.is_unit():
        raise NotAUnit("sigma_a needs a unit a")
    if x.is_zero():
        return x
    if target_hi is None:
        target_hi = x.hi if x.hi is not None else max(x.top, R.hi_default)
    J = max(0, -x.lo)
    cap = max(2, target_hi + J + 2)
    s = R.endo_of_pi(a, cap)
    key = ("endo_inv", tuple(a_el.raw), cap)
    if key not in R._series:
        R._series[key] = s.inverse(hi=cap - 2)
    s_inv = R._series[key]
    known = AFElem(R, x.lo, x.coeffs, None, x.prec)
    y = _substitute(known, s, s_inv)
    if x.hi is not None:
        y = y.truncate(x.hi)
    return y


# ---- E_F ------------------------------------------------------------------------------------


class EFRing:
    """k((pi_bar)) and its perfection up to pi_bar^(1/q^max_depth).

    ``k`` is the coefficient residue field (k_F or k_L) and ``q`` the
    cardinality of k_F, which fixes Frobenius and v_E.
    """

    def __init__(self, k: FiniteFieldSpec, q: int, max_depth: int = 8):
        self.k = k
        self.q = q
        self.max_depth = max_depth

    def __eq__(self, other):
        return isinstance(other, EFRing) and (self.k, self.q) == (other.k, other.q)

    def __hash__(self):
        return hash((self.k, self.q))

    def elem(self, terms: dict, hi=None, depth: int = 0) -> "EFElem":
        """``terms`` maps exponent (int or Fraction with denominator q^depth) to coefficient."""
        qs = self.q**depth
        out = {}
        for e, c in terms.items():
            num = Fraction(e) * qs
            if num.denominator != 1:
                raise ValueError(f"exponent {e} needs more than depth {depth}")
            out[int(num)] = self.k(c).c
        return EFElem(self, depth, out, None if hi is None else Fraction(hi))

    def pi_bar(self) -> "EFElem":
        return EFElem(self, 0, {1: self.k.one_raw}, None)

    def one(self) -> "EFElem":
        return EFElem(self, 0, {0: self.k.one_raw}, None)

    def random(self, rng, lo: int, hi: int, exact: bool = True) -> "EFElem":
        k = self.k
        terms = {}
        for j in range(lo, hi + 1):
            c = tuple(rng.randrange(k.p) for _ in range(k.d))
            if any(c):
                terms[j] = c
        return EFElem(self, 0, terms, None if exact else Fraction(hi))


class EFElem:
    """sum c_n pi_bar^(n / q^depth), known for exponents <= hi (None: exact)."""

    __slots__ = ("ring", "depth", "terms", "hi")

    def __init__(self, ring: EFRing, depth: int, terms: dict, hi):
        if depth > ring.max_depth:
            raise PerfectionDepthExceeded(f"depth {depth} exceeds the configured {ring.max_depth}")
        qs = ring.q**depth
        clean = {}
        for n, c in terms.items():
            c = tuple(c)
            if any(c) and (hi is None or Fraction(n, qs) <= hi):
                clean[n] = c
        # lower the depth when every exponent allows it
        while depth > 0 and all(n % ring.q == 0 for n in clean):
            clean = {n // ring.q: c for n, c in clean.items()}
            depth -= 1
        self.ring = ring
        self.depth = depth
        self.terms = clean
        self.hi = hi

    def _common(self, other):
        d = max(self.depth, other.depth)
        q = self.ring.q
        a = {n * q ** (d - self.depth): c for n, c in self.terms.items()}
        b = {n * q ** (d - other.depth): c for n, c in other.terms.items()}
        return d, a, b

    def _coerce(self, other):
        if isinstance(other, EFElem):
            if other.ring != self.ring:
                raise ValueError("elements of different rings")
            return other
        return EFElem(self.ring, 0, {0: self.ring.k(other).c}, None)

    def exponents(self) -> list:
        qs = self.ring.q**self.depth
        return sorted(Fraction(n, qs) for n in self.terms)

    def coefficient(self, e):
        qs = self.ring.q**self.depth
        num = Fraction(e) * qs
        k = self.ring.k
        if num.denominator != 1:
            return k(0)
        return k(self.terms.get(int(num), k.zero_raw))

    def is_zero(self) -> bool:
        return not self.terms

    def order(self) -> Fraction:
        """Lowest pi_bar-exponent."""
        if not self.terms:
            raise IndistinguishableFromZero("zero below the truncation order")
        return Fraction(min(self.terms), self.ring.q**self.depth)

    def __add__(self, other):
        other = self._coerce(other)
        d, a, b = self._common(other)
        k = self.ring.k
        out = dict(a)
        for n, c in b.items():
            out[n] = k.add_raw(out[n], c) if n in out else c
        return EFElem(self.ring, d, out, _min_hi(self.hi, other.hi))

    __radd__ = __add__

    def __neg__(self):
        k = self.ring.k
        return EFElem(self.ring, self.depth, {n: tuple(-x % k.p for x in c) for n, c in self.terms.items()}, self.hi)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __mul__(self, other):
        other = self._coerce(other)
        d, a, b = self._common(other)
        k = self.ring.k
        qs = self.ring.q**d
        hi = None
        if self.hi is not None and b:
            hi = self.hi + Fraction(min(b), qs)
        if other.hi is not None and a:
            hi = _min_hi(hi, other.hi + Fraction(min(a), qs))
        if (self.hi is not None and not b) or (other.hi is not None and not a):
            hi = _min_hi(hi, self.hi if self.hi is not None else other.hi)
        out: dict = {}
        for n, c in a.items():
            for m, e in b.items():
                if hi is not None and Fraction(n + m, qs) > hi:
                    continue
                prod = k.mul_raw(c, e)
                out[n + m] = k.add_raw(out[n + m], prod) if n + m in out else prod
        return EFElem(self.ring, d, out, hi)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.ring.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def inverse(self, hi=None) -> "EFElem":
        """Inverse by peeling the leading term; truncated unless the element is a monomial."""
        if not self.terms:
            raise IndistinguishableFromZero("cannot invert zero")
        R = self.ring
        k = R.k
        n0 = min(self.terms)
        c0inv = k.inv_raw(self.terms[n0])
        qs = R.q**self.depth
        if len(self.terms) == 1:
            h = None if self.hi is None else self.hi - 2 * Fraction(n0, qs)
            return EFElem(R, self.depth, {-n0: c0inv}, h)
        # 1/(c0 T^n0 (1 + z)) with z of positive order
        z = {n - n0: k.mul_raw(c, c0inv) for n, c in self.terms.items() if n != n0}
        base_hi = None if self.hi is None else self.hi - Fraction(n0, qs)
        target = hi if hi is not None else (base_hi if base_hi is not None else Fraction(32))
        if base_hi is not None:
            target = min(target, base_hi)
        top = int(target * qs)
        inv = {0: k.one_raw}
        for n in range(1, top + 1):
            s = k.zero_raw
            for m, c in z.items():
                if m <= n and (n - m) in inv:
                    s = k.add_raw(s, k.mul_raw(c, inv[n - m]))
            if any(s):
                inv[n] = tuple(-x % k.p for x in s)
        out = {n - n0: k.mul_raw(c, c0inv) for n, c in inv.items()}
        h_out = Fraction(top, qs) - Fraction(n0, qs)
        return EFElem(R, self.depth, out, h_out)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __eq__(self, other):
        if not isinstance(other, EFElem):
            return NotImplemented
        d = self - other
        return d.is_zero()

    __hash__ = None

    def __repr__(self):
        return f"EFElem({self.to_string()})"

    def to_string(self) -> str:
        parts = []
        for e in self.exponents():
            c = self.coefficient(e)
            cs = str(c.c[0]) if self.ring.k.d == 1 else str(list(c.c))
            parts.append(f"{cs}*pbar^({e})")
        s = " + ".join(parts) if parts else "0"
        return s + ("" if self.hi is None else f" + O(pbar^>{self.hi})")

    def to_json(self) -> dict:
        qs = self.ring.q**self.depth
        return {
            "depth": self.depth,
            "hi": None if self.hi is None else f"{self.hi.numerator}/{self.hi.denominator}",
            "terms": [
                {"e": f"{Fraction(n, qs).numerator}/{Fraction(n, qs).denominator}", "c": list(c)}
                for n, c in sorted(self.terms.items())
            ],
        }

    @classmethod
    def from_json(cls, ring: EFRing, obj: dict) -> "EFElem":
        terms = {Fraction(t["e"]): tuple(t["c"]) for t in obj["terms"]}
        hi = None if obj.get("hi") is None else Fraction(obj["hi"])
        return ring.elem(terms, hi=hi, depth=int(obj.get("depth", 0)))


def ef_frobenius(x: EFElem) -> EFElem:
    """Reduction of phi_F: pi_bar -> pi_bar^q, identity on coefficients (x -> x^q over k_F)."""
    q = x.ring.q
    hi = None if x.hi is None else x.hi * q
    return EFElem(x.ring, x.depth, {n * q: c for n, c in x.terms.items()}, hi)


def ef_root(x: EFElem) -> EFElem:
    """Inverse of ef_frobenius, raising the perfection depth by one."""
    q = x.ring.q
    hi = None if x.hi is None else x.hi / q
    return EFElem(x.ring, x.depth + 1, dict(x.terms), hi)


def v_E(x: EFElem) -> Fraction:
    """q/(q-1) times the lowest pi_bar-exponent."""
    q = x.ring.q
    return Fraction(q, q - 1) * x.order()
