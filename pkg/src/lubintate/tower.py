"""The torsion tower F_m = F[X]/(Phi_m), Phi_m = f^m / f^(m-1).

A tower element is ``pi^shift * sum c_i pi_m^i`` with ``c_i`` in O_F known
modulo ``pi^prec`` (pi the uniformizer of F). Since O_F[pi_m] is the ring of
integers of F_m, an element is divisible by pi exactly when all of its
coefficients are.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from math import ceil, floor
from typing import Optional, Sequence

from . import kernel
from .errors import (
    CapInsufficient,
    ConjugateNotRoot,
    IndistinguishableFromZero,
    InexactDivision,
    NotAUnit,
    NotEisenstein,
    NotTopologicallyNilpotent,
    PrecisionExhausted,
)
from .formal_group import LTGroup
from .padic import LocalFieldSpec, OFElem, Val
from .series import TruncatedSeries

MAX_CAP = 96


# ---- Eisenstein quotients ---------------------------------------------------------------


@dataclass
class EisensteinStep:
    m: int
    phi: list  # OFElem coefficients, lowest degree first, monic
    report: dict = dc_field(default_factory=dict)

    @property
    def degree(self) -> int:
        return len(self.phi) - 1

    def to_string(self, var: str = "X") -> str:
        parts = []
        for k in range(self.degree, -1, -1):
            c = self.phi[k]
            if c.is_zero():
                continue
            v = c.to_int() if c.field.n == 1 else list(c.raw)
            mon = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
            if k and v == 1:
                parts.append(mon)
            elif k and v == -1:
                parts.append("-" + mon)
            else:
                parts.append(f"{v}{'*' if mon else ''}{mon}")
        s = "+".join(str(x) for x in parts) or "0"
        return s.replace("+-", "-")

    def to_json(self) -> dict:
        return {
            "level": self.m,
            "Phi": self.to_string(),
            "coeffs": [c.to_json() for c in self.phi],
            "eisenstein": self.report.get("eisenstein", False),
            "report": self.report,
        }


def _poly_divmod(num: list, den: list, field: LocalFieldSpec, prec: int):
    """Division of raw coefficient lists by a polynomial with unit leading coefficient."""
    F = field
    num = [F.canon(c, prec) for c in num]
    lead_inv = F.inv_unit_raw(den[-1], prec)
    dq = len(den) - 1
    quo = [F.zero_raw()] * max(len(num) - dq, 0)
    for k in range(len(num) - 1, dq - 1, -1):
        c = F.mul_raw(num[k], lead_inv, prec)
        if not any(c):
            continue
        quo[k - dq] = c
        for i, d in enumerate(den):
            num[k - dq + i] = F.sub_raw(num[k - dq + i], F.mul_raw(c, d, prec), prec)
    return quo, num[:dq]


def eisenstein_step(G: LTGroup, m: int) -> EisensteinStep:
    """Phi_m = f^m / f^(m-1) (Phi_1 = f / X), checked for exactness and the Eisenstein criterion."""
    if m < 1:
        raise ValueError("level must be >= 1")
    if not G.polynomial:
        raise NotEisenstein("Eisenstein quotients need f to be a polynomial")
    F = G.field
    q = G.q
    if G.degree != q:
        raise NotEisenstein(f"f must have degree q = {q}")
    prec = G.prec
    top = G.iterate(m).to_univariate_list()
    if m == 1:
        den = [F.zero_raw(), F.one_raw()]
    else:
        den = G.iterate(m - 1).to_univariate_list()
    den = den[: q ** (m - 1) + 1]
    top = top[: q**m + 1]
    if not any(F.residue_raw(den[-1])):
        raise NotEisenstein("leading coefficient of f is not a unit")
    quo, rem = _poly_divmod(top, den, F, prec)
    if any(any(c) for c in rem):
        raise InexactDivision("f^(m-1) does not divide f^m (corrupted f?)")
    lead = quo[-1]
    if lead != F.canon(F.one_raw(), prec):
        inv = F.inv_unit_raw(lead, prec)
        quo = [F.mul_raw(c, inv, prec) for c in quo]
    phi = [OFElem(F, c, prec) for c in quo]
    # exact check of Phi_m * f^(m-1) = f^m
    prod = kernel.mul_dense(quo, den, len(top), F.table_mod(F.modulus(prec)), F.modulus(prec), F.n)
    if lead != F.canon(F.one_raw(), prec):
        prod = [F.mul_raw(c, lead, prec) for c in prod]
    exact = all(F.canon(a, prec) == F.canon(b, prec) for a, b in zip(prod, top))
    pi = OFElem(F, F.pi_raw_exact, prec)
    middle_ok = all(c.is_zero() or c.valuation().value >= 1 for c in phi[1:-1])
    const = phi[0]
    const_val = None if const.is_zero() else const.valuation().value
    report = {
        "degree": len(phi) - 1,
        "expected_degree": q**m - q ** (m - 1),
        "divides_exactly": exact,
        "monic": True,
        "middle_divisible": middle_ok,
        "constant_valuation": None if const_val is None else str(const_val),
        "constant_is_uniformizer": const == pi,
    }
    report["eisenstein"] = bool(middle_ok and const_val == 1 and exact)
    if not report["eisenstein"]:
        raise NotEisenstein(f"Phi_{m} fails the Eisenstein criterion: {report}")
    return EisensteinStep(m, phi, report)


# ---- the field F_m ------------------------------------------------------------------------


class TowerField:
    """F_m = F(pi_m) with pi_m a root of Phi_m, elements known modulo pi^prec."""

    def __init__(self, G: LTGroup, m: int, prec: Optional[int] = None):
        self.group = G
        self.base = G.field
        self.m = m
        self.prec = G.prec if prec is None else prec
        if self.prec > G.prec:
            raise PrecisionExhausted("tower precision exceeds the group's working precision")
        self.step = eisenstein_step(G, m)
        F = self.base
        self.phi_raw = [F.canon(c.raw, self.prec) for c in self.step.phi]
        self.E = self.step.degree
        # w = pi / pi_m, an integral element
        a0 = self.step.phi[0].at_prec(self.prec)
        unit = a0.divide_exact(OFElem(F, F.pi_raw_exact, self.prec))
        uinv = unit.inverse()
        coeffs = [(-(c.at_prec(self.prec) * uinv)).raw for c in self.step.phi[1:]]
        self._w = TowerFieldElem(self, coeffs, self.prec - 0)

    def __repr__(self):
        return f"TowerField(level={self.m}, degree={self.E}, prec={self.prec})"

    # constructors
    def element(self, coeffs: Sequence, prec: Optional[int] = None, shift: int = 0) -> "TowerFieldElem":
        F = self.base
        prec = self.prec if prec is None else prec
        raw = []
        for c in coeffs:
            if isinstance(c, OFElem):
                if c.shift < 0:
                    raise ValueError("use the shift argument for non-integral coefficients")
                prec = min(prec, c.prec)
                raw.append(c.raw)
            elif isinstance(c, int):
                raw.append(F.int_raw(c))
            else:
                raw.append(tuple(c))
        return TowerFieldElem(self, raw, prec, shift)

    def zero(self) -> "TowerFieldElem":
        return TowerFieldElem(self, [], self.prec)

    def one(self) -> "TowerFieldElem":
        return TowerFieldElem(self, [self.base.one_raw()], self.prec)

    def gen(self) -> "TowerFieldElem":
        """pi_m."""
        if self.E == 1:
            return TowerFieldElem(self, [F_neg(self.base, self.phi_raw[0], self.prec)], self.prec)
        return TowerFieldElem(self, [self.base.zero_raw(), self.base.one_raw()], self.prec)

    def from_base(self, a: OFElem) -> "TowerFieldElem":
        prec = min(self.prec, a.prec)
        return TowerFieldElem(self, [a.raw], prec, a.shift)

    def random_element(self, rng, integral: bool = True) -> "TowerFieldElem":
        F = self.base
        return TowerFieldElem(self, [F.random_element(rng, self.prec).raw for _ in range(self.E)], self.prec)

    def pi_inverse(self) -> "TowerFieldElem":
        """pi_m^{-1} = pi^{-1} * w."""
        w = self._w
        return TowerFieldElem(self, w.raw, w.prec, w.shift - 1)

    # polynomial arithmetic on raw lists
    def _mul_raw(self, a: list, b: list, prec: int) -> list:
        F = self.base
        if not a or not b:
            return []
        mod = F.modulus(prec)
        T = F.table_mod(mod)
        prod = kernel.mul_dense(list(a), list(b), len(a) + len(b) - 1, T, mod, F.n)
        return self._reduce(prod, prec)

    def _reduce(self, poly: list, prec: int) -> list:
        F = self.base
        E = self.E
        phi = self.phi_raw
        poly = [list(c) for c in poly]
        if F.n == 1:
            mod = F.modulus(prec)
            ints = [c[0] for c in poly]
            ph = [c[0] for c in phi]
            for k in range(len(ints) - 1, E - 1, -1):
                c = ints[k] % mod
                if c:
                    ints[k] = 0
                    base = k - E
                    for i in range(E):
                        if ph[i]:
                            ints[base + i] -= c * ph[i]
            return [F.canon((x,), prec) for x in ints[:E]]
        for k in range(len(poly) - 1, E - 1, -1):
            c = F.canon(poly[k], prec)
            if any(c):
                poly[k] = list(F.zero_raw())
                base = k - E
                for i in range(E):
                    prod = F.mul_raw(c, phi[i], prec)
                    poly[base + i] = [x - y for x, y in zip(poly[base + i], prod)]
        return [F.canon(c, prec) for c in poly[:E]]


def F_neg(F: LocalFieldSpec, raw, prec):
    return F.neg_raw(raw, prec)


class TowerFieldElem:
    __slots__ = ("tower", "raw", "prec", "shift")

    def __init__(self, tower: TowerField, raw: Sequence, prec: int, shift: int = 0):
        F = tower.base
        E = tower.E
        raw = [tuple(c) for c in raw]
        if len(raw) > E:
            raw = tower._reduce(raw, prec)
        raw = [F.canon(c, prec) for c in raw] + [F.zero_raw()] * (E - len(raw))
        if shift > 0:
            pk = F.pi_pow_raw(shift, prec + shift)
            raw = [F.mul_raw(c, pk, prec + shift) for c in raw]
            prec += shift
            shift = 0
        while shift < 0 and prec > 0 and any(any(c) for c in raw) and all(not any(F.residue_raw(c)) for c in raw):
            raw = [F.div_pi_raw(c, prec) for c in raw]
            prec -= 1
            shift += 1
        self.tower = tower
        self.raw = raw
        self.prec = prec
        self.shift = shift

    # ---- queries ---------------------------------------------------------------------
    @property
    def field(self) -> LocalFieldSpec:
        return self.tower.base

    def coefficient(self, i: int) -> OFElem:
        return OFElem(self.field, self.raw[i], self.prec)

    def coefficients(self) -> list:
        return [self.coefficient(i) for i in range(self.tower.E)]

    def is_zero(self) -> bool:
        return not any(any(c) for c in self.raw)

    def _body_val(self) -> Optional[Fraction]:
        F = self.field
        E = self.tower.E
        best = None
        for i, c in enumerate(self.raw):
            v = F.val_raw(c)
            if v is not None:
                val = Fraction(v, F.e) + Fraction(i, E)
                if best is None or val < best:
                    best = val
        return best

    def valuation(self) -> Val:
        """v_pi on F_m, so that v(pi_m) = 1/deg Phi_m."""
        v = self._body_val()
        if v is None:
            raise IndistinguishableFromZero(f"all {self.prec} known digits vanish")
        return Val(v + self.shift)

    def val_lower(self) -> Fraction:
        v = self._body_val()
        return Fraction(self.shift + self.prec) if v is None else v + self.shift

    def abs_prec(self) -> int:
        return self.shift + self.prec

    # ---- arithmetic ---------------------------------------------------------------------
    def _coerce(self, other) -> "TowerFieldElem":
        if isinstance(other, TowerFieldElem):
            if other.tower is not self.tower:
                raise ValueError("elements of different tower fields")
            return other
        if isinstance(other, OFElem):
            return self.tower.from_base(other)
        if isinstance(other, int):
            return TowerFieldElem(self.tower, [self.field.int_raw(other)], self.prec + self.field.e * (abs(other).bit_length() + 1))
        return NotImplemented

    def _aligned(self, s: int):
        k = self.shift - s
        if k == 0:
            return self.raw, self.prec
        F = self.field
        prec = self.prec + k
        pk = F.pi_pow_raw(k, prec)
        return [F.mul_raw(c, pk, prec) for c in self.raw], prec

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        F = self.field
        s = min(self.shift, other.shift)
        ra, pa = self._aligned(s)
        rb, pb = other._aligned(s)
        prec = min(pa, pb)
        return TowerFieldElem(self.tower, [F.add_raw(x, y, prec) for x, y in zip(ra, rb)], prec, s)

    __radd__ = __add__

    def __neg__(self):
        F = self.field
        return TowerFieldElem(self.tower, [F.neg_raw(c, self.prec) for c in self.raw], self.prec, self.shift)

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
        va = self._body_val()
        vb = other._body_val()
        va = self.prec if va is None else floor(va)
        vb = other.prec if vb is None else floor(vb)
        prec = min(self.prec + vb, other.prec + va)
        raw = self.tower._mul_raw(self.raw, other.raw, prec)
        return TowerFieldElem(self.tower, raw, prec, self.shift + other.shift)

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
        return self.tower.one() if result is None else result

    def scale(self, c: OFElem) -> "TowerFieldElem":
        return self * self.tower.from_base(c)

    def _unit_inverse_body(self) -> "TowerFieldElem":
        """Inverse of a body that is a unit of O_{F_m} (Newton iteration)."""
        F = self.field
        T = self.tower
        r = F.residue_raw(self.raw[0])
        if not any(r):
            raise NotAUnit("element is not a unit")
        prec = self.prec
        y = TowerFieldElem(T, [F.canon(F.lift_residue(F.residue.inv_raw(r)), prec)], prec)
        u = TowerFieldElem(T, self.raw, prec)
        two = TowerFieldElem(T, [F.int_raw(2)], prec)
        contact = Fraction(1, T.E)
        while contact < prec:
            y = y * (two - u * y)
            y = TowerFieldElem(T, y.raw, prec)  # units: no precision loss
            contact *= 2
        return y

    def inverse(self) -> "TowerFieldElem":
        v = self._body_val()
        if v is None:
            raise IndistinguishableFromZero("cannot invert an element indistinguishable from zero")
        T = self.tower
        F = self.field
        t = int(v * T.E)
        body = TowerFieldElem(T, self.raw, self.prec)
        if t:
            wt = T._w ** t
            bw = body * wt
            raw, prec = bw.raw, bw.prec
            for _ in range(t):
                raw = [F.div_pi_raw(c, prec) for c in raw]
                prec -= 1
            u = TowerFieldElem(T, raw, prec)
            uinv = u._unit_inverse_body()
            res = uinv * wt
            return TowerFieldElem(T, res.raw, res.prec, res.shift - self.shift - t)
        uinv = body._unit_inverse_body()
        return TowerFieldElem(T, uinv.raw, uinv.prec, -self.shift)

    def __truediv__(self, other):
        other = self._coerce(other)
        return self * other.inverse()

    def __eq__(self, other):
        if isinstance(other, (int, OFElem, TowerFieldElem)):
            return (self - other).is_zero()
        return NotImplemented

    __hash__ = None

    def at_prec(self, prec: int) -> "TowerFieldElem":
        if prec > self.prec:
            raise PrecisionExhausted("cannot raise precision")
        return TowerFieldElem(self.tower, self.raw, prec, self.shift)

    def __repr__(self):
        return f"TowerFieldElem({self.to_string()}, prec={self.prec}, shift={self.shift})"

    def to_string(self, var: str = "pi_m") -> str:
        F = self.field
        parts = []
        for i, c in enumerate(self.raw):
            if not any(c):
                continue
            v = OFElem(F, c, self.prec).to_int() if F.n == 1 else list(c)
            mon = "" if i == 0 else (var if i == 1 else f"{var}^{i}")
            parts.append(f"{v}" + (f"*{mon}" if mon else ""))
        return " + ".join(parts) if parts else "0"

    def to_json(self) -> dict:
        return {
            "level": self.tower.m,
            "modulus": self.tower.step.to_string(),
            "coeffs": [OFElem(self.field, c, self.prec).to_json() for c in self.raw],
            "prec": self.prec,
            "shift": self.shift,
        }


# ---- series evaluation -------------------------------------------------------------------


def _tail_prec(cap: int, vmin: Fraction) -> int:
    return floor((cap + 1) * vmin)


def needed_cap(prec: int, vmin: Fraction) -> int:
    """Smallest cap whose truncation tail has valuation >= prec."""
    return max(1, ceil(Fraction(prec) / vmin) - 1)


def evaluate_univariate(s: TruncatedSeries, x: TowerFieldElem, exact: bool = False) -> TowerFieldElem:
    """s(x) by Horner; unless ``exact`` the truncation tail bounds the precision."""
    T = x.tower
    coeffs = s.to_univariate_list()
    prec = min(s.prec, x.prec + max(0, x.shift))
    if not exact:
        if (0,) in s.terms:
            raise ValueError("series has a constant term")
        v = x.val_lower()
        if v <= 0:
            raise NotTopologicallyNilpotent("evaluation point must have positive valuation")
        prec = min(prec, _tail_prec(s.cap, v))
    acc = TowerFieldElem(T, [coeffs[-1]], s.prec)
    for c in reversed(coeffs[:-1]):
        acc = acc * x + TowerFieldElem(T, [c], s.prec)
    limit = prec - acc.shift
    return acc.at_prec(limit) if acc.prec > limit else acc


def evaluate_bivariate(s: TruncatedSeries, x: TowerFieldElem, y: TowerFieldElem) -> TowerFieldElem:
    T = x.tower
    vx, vy = x.val_lower(), y.val_lower()
    vmin = min(vx, vy)
    if vmin <= 0:
        raise NotTopologicallyNilpotent("evaluation points must have positive valuation")
    cap = s.cap
    prec = min(s.prec, _tail_prec(cap, vmin))
    # powers of x
    xp = [T.one()]
    for _ in range(cap):
        xp.append(xp[-1] * x)
    rows: dict = {}
    for (i, j), c in s.terms.items():
        rows.setdefault(j, []).append((i, c))
    acc = T.zero()
    for j in range(cap, -1, -1):
        acc = acc * y if j < cap else acc
        inner = T.zero()
        for i, c in rows.get(j, []):
            inner = inner + xp[i] * TowerFieldElem(T, [c], s.prec)
        acc = acc + inner
    acc = TowerFieldElem(T, acc.raw, acc.prec, acc.shift)
    limit = prec - acc.shift
    return acc.at_prec(limit) if acc.prec > limit else acc


def _endo_at(G: LTGroup, a, prec: int, vmin: Fraction, max_cap: int = MAX_CAP) -> TruncatedSeries:
    cap = needed_cap(prec, vmin)
    if cap > max_cap:
        raise CapInsufficient(f"need cap {cap} > {max_cap} to reach precision {prec}")
    return G.endo(a, cap)


def fg_add(G: LTGroup, x: TowerFieldElem, y: TowerFieldElem, prec: Optional[int] = None, max_cap: int = MAX_CAP) -> TowerFieldElem:
    """F_f(x, y) for x, y in the maximal ideal of F_m."""
    if x.is_zero():
        return y
    if y.is_zero():
        return x
    vmin = min(x.val_lower(), y.val_lower())
    if vmin <= 0:
        raise NotTopologicallyNilpotent("fg_add needs points of positive valuation")
    prec = min(x.prec, y.prec) if prec is None else prec
    cap = needed_cap(prec, vmin)
    if cap > max_cap:
        raise CapInsufficient(f"need cap {cap} > {max_cap} for precision {prec}")
    law = G.group_law(cap)
    return evaluate_bivariate(law, x, y)


def apply_endo(G: LTGroup, a, x: TowerFieldElem, prec: Optional[int] = None) -> TowerFieldElem:
    """[a](x) for x of positive valuation."""
    if x.is_zero():
        return x
    prec = x.prec if prec is None else prec
    v = x.val_lower()
    if v <= 0:
        raise NotTopologicallyNilpotent("[a] needs a point of positive valuation")
    return evaluate_univariate(_endo_at(G, a, prec, v), x)


def phi_at(T: TowerField, x: TowerFieldElem) -> TowerFieldElem:
    """Phi_m(x)."""
    coeffs = T.phi_raw
    acc = TowerFieldElem(T, [coeffs[-1]], T.prec)
    for c in reversed(coeffs[:-1]):
        acc = acc * x + TowerFieldElem(T, [c], T.prec)
    return acc


def is_root(T: TowerField, x: TowerFieldElem, prec: int) -> bool:
    r = phi_at(T, x)
    return r.is_zero() or r.val_lower() >= prec


# ---- residues of O_F / pi^m --------------------------------------------------------------


def residues_mod_pi_power(F: LocalFieldSpec, m: int, units_only: bool = False) -> list:
    """Representatives sum_{i<m} r_i pi^i with r_i ranging over integer lifts of k_F."""
    lifts = F.teich_lifts()
    prec = F.prec
    pis = [OFElem(F, F.pi_pow_raw(i, prec), prec) for i in range(m)]
    reps = [OFElem.zero(F, prec, exact=False)]
    for i in range(m):
        reps = [r + OFElem(F, lift, prec) * pis[i] for r in reps for lift in lifts]
    if units_only:
        reps = [r for r in reps if r.is_unit()]
    return reps


def residue_key(a: OFElem, m: int) -> tuple:
    return tuple(a.at_prec(min(a.prec, m)).raw)


# ---- Galois action and checks ------------------------------------------------------------


def galois_apply(G: LTGroup, a, x: TowerFieldElem) -> TowerFieldElem:
    """sigma_a: pi_m -> [a](pi_m), extended F-linearly."""
    T = x.tower
    a = G._coerce_scalar(a)
    if not a.is_unit():
        raise NotAUnit("sigma_a needs a unit a")
    img = apply_endo(G, a, T.gen(), T.prec)
    if not is_root(T, img, img.prec):
        raise ConjugateNotRoot("[a](pi_m) is not a root of Phi_m at this precision")
    acc = TowerFieldElem(T, [x.raw[-1]], x.prec)
    for c in reversed(x.raw[:-1]):
        acc = acc * img + TowerFieldElem(T, [c], x.prec)
    return TowerFieldElem(T, acc.raw, acc.prec, acc.shift + x.shift)


def norm_to_base(x: TowerFieldElem) -> OFElem:
    """N_{F_m/F}(x) as the determinant of multiplication by x."""
    T = x.tower
    F = T.base
    E = T.E
    body = TowerFieldElem(T, x.raw, x.prec)
    cols = []
    basis = TowerFieldElem(T, [F.one_raw()], x.prec)
    pm = T.gen()
    for i in range(E):
        cols.append((body * basis).coefficients())
        if i + 1 < E:
            basis = basis * pm
    M = [[cols[j][i] for j in range(E)] for i in range(E)]
    det = _det(M, F)
    if x.shift:
        det = det * OFElem(F, F.one_raw(), det.prec, shift=E * x.shift)
    return det


def _det(M: list, F: LocalFieldSpec) -> OFElem:
    n = len(M)
    M = [row[:] for row in M]
    det = OFElem.one(F, min(c.prec for row in M for c in row) + 1)
    sign = 1
    for col in range(n):
        best, bv = None, None
        for r in range(col, n):
            c = M[r][col]
            if c.is_zero():
                continue
            v = c.valuation().value
            if bv is None or v < bv:
                best, bv = r, v
        if best is None:
            return OFElem.zero(F, det.prec, exact=False)
        if best != col:
            M[col], M[best] = M[best], M[col]
            sign = -sign
        piv = M[col][col]
        det = det * piv
        inv = piv.field_inverse()
        for r in range(col + 1, n):
            if M[r][col].is_zero():
                continue
            factor = M[r][col] * inv
            for k in range(col, n):
                M[r][k] = M[r][k] - factor * M[col][k]
    return det if sign == 1 else -det


def torsion_points(G: LTGroup, T: TowerField) -> dict:
    """{residue key of a mod pi^m: [a](pi_m)} for all a in O_F / pi^m."""
    F = G.field
    m = T.m
    pi_m = T.gen()
    out = {}
    for a in residues_mod_pi_power(F, m):
        key = residue_key(a, m)
        if a.is_zero():
            out[key] = (a, T.zero())
        else:
            out[key] = (a, apply_endo(G, a, pi_m, T.prec))
    return out


def _entry(check: str, ok: bool, level: int, witness) -> dict:
    return {"check": check, "level": level, "status": "pass" if ok else "fail", "witness": witness}


def torsion_check(G: LTGroup, m: int, prec: int = 6, full_table: Optional[bool] = None, sample: int = 64, seed: int = 0) -> dict:
    """Certify that the level-m torsion generated by pi_m is cyclic of order q^m."""
    import random

    F = G.field
    T = TowerField(G, m, prec)
    pi_m = T.gen()
    entries = []
    pi_pow = OFElem(F, F.pi_pow_raw(m, G.prec), G.prec)
    top = apply_endo(G, pi_pow, pi_m, prec)
    entries.append(_entry("pi^m kills pi_m", top.is_zero() or top.val_lower() >= prec, m, {"value": top.to_string(), "prec": top.prec}))
    if m >= 1:
        below = OFElem(F, F.pi_pow_raw(m - 1, G.prec), G.prec)
        low = apply_endo(G, below, pi_m, prec)
        nonzero = not low.is_zero()
        entries.append(_entry("pi^(m-1) does not kill pi_m", nonzero, m, {"value": low.to_string(), "valuation": str(low.valuation().value) if nonzero else None}))
    one = apply_endo(G, 1, pi_m, prec)
    entries.append(_entry("[1] fixes pi_m", one == pi_m, m, None))

    units = residues_mod_pi_power(F, m, units_only=True)
    rng = random.Random(seed)
    if len(units) > sample:
        units = rng.sample(units, sample)
    conj = []
    all_roots = True
    for a in units:
        c = apply_endo(G, a, pi_m, prec)
        if not is_root(T, c, c.prec):
            all_roots = False
        conj.append(c)
    distinct = True
    for i in range(len(conj)):
        for j in range(i + 1, len(conj)):
            if (conj[i] - conj[j]).is_zero():
                distinct = False
    entries.append(_entry("unit conjugates are roots of Phi_m", all_roots, m, {"count": len(conj)}))
    entries.append(_entry("unit conjugates pairwise distinct", distinct, m, {"count": len(conj), "degree": T.E}))
    q = G.q
    if full_table is None:
        full_table = q**m <= 16
    if full_table:
        pts = torsion_points(G, T)
        keys = list(pts)
        bad = None
        for ka in keys:
            a, xa = pts[ka]
            for kb in keys:
                b, xb = pts[kb]
                s = fg_add(G, xa, xb, prec)
                target = pts[residue_key(a + b, m)][1]
                if not (s - target).is_zero():
                    bad = {"a": a.to_json(), "b": b.to_json()}
                    break
            if bad:
                break
        entries.append(_entry("group table F_f([a]pi_m,[b]pi_m) = [a+b]pi_m", bad is None, m, {"order": len(keys), "failure": bad}))
    status = "pass" if all(e["status"] == "pass" for e in entries) else "fail"
    return {"check": "torsion", "level": m, "order": q**m, "prec": prec, "status": status, "entries": entries}


def reciprocity_conjugacy(G: LTGroup, m: int, u, prec: int = 6) -> dict:
    """[u^-1](pi_m) is a Galois conjugate of pi_m; cyclotomic cross-check when f = (1+X)^p - 1."""
    F = G.field
    T = TowerField(G, m, prec)
    u = G._coerce_scalar(u)
    if not u.is_unit():
        raise NotAUnit("reciprocity data needs a unit u")
    uinv = u.inverse()
    pi_m = T.gen()
    img = apply_endo(G, uinv, pi_m, prec)
    root = is_root(T, img, img.prec)
    entries = [_entry("[u^-1](pi_m) is a root of Phi_m", root, m, {"value": img.to_string(), "prec": img.prec})]
    if is_cyclotomic(G):
        p = F.p
        k = uinv.at_prec(m).to_int() % p**m
        zeta = T.one() + pi_m
        cyc = zeta**k - T.one()
        same = (cyc - img).at_prec(min(cyc.prec, img.prec)).is_zero()
        entries.append(_entry("cyclotomic action zeta -> zeta^(u^-1)", same, m, {"exponent": k}))
    status = "pass" if all(e["status"] == "pass" for e in entries) else "fail"
    return {"check": "reciprocity", "level": m, "u": u.to_json(), "prec": prec, "status": status, "entries": entries}


def is_cyclotomic(G: LTGroup) -> bool:
    """f = (1+X)^p - 1 over Q_p (for p = 2 this is also the standard choice)."""
    from math import comb

    F = G.field
    if not (F.is_qp and G.polynomial and G.degree == F.p):
        return False
    return all(c == comb(F.p, k) for k, c in enumerate(G.f_coeffs()) if k)


def embed(x: TowerFieldElem, target: TowerField) -> TowerFieldElem:
    """Image of x in a higher level, via pi_m = f^(M-m)(pi_M)."""
    T = x.tower
    if target.m < T.m:
        raise ValueError("can only embed into a higher level")
    G = target.group
    img = evaluate_univariate(G.iterate(target.m - T.m), target.gen(), exact=True)
    acc = TowerFieldElem(target, [x.raw[-1]], x.prec)
    for c in reversed(x.raw[:-1]):
        acc = acc * img + TowerFieldElem(target, [c], x.prec)
    return TowerFieldElem(target, acc.raw, acc.prec, acc.shift + x.shift)
