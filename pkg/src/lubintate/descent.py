"""Rank-one (phi, Gamma)-modules over O_L . A_F and the descent to a character.

Only F = Q_p is supported here: the coefficient field O_L is Z_p[zeta_{p^n}]
presented by the Eisenstein polynomial Phi_{p^n}(X + 1), so that
zeta = 1 + (uniformizer of L). Precisions are counted in digits of that
uniformizer.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import product
from math import comb, gcd
from typing import Optional

from .errors import (
    LubinTateError,
    MissingRootsOfUnity,
    NoPthRootHypothesis,
    NotAUnit,
    OrderNotPPower,
    PrecisionExhausted,
    ZeroInput,
)
from .formal_group import LTGroup
from .padic import LocalFieldSpec, OFElem, make_local_field, teichmuller
from .rings import AFElem, AFRing, EFElem, EFRing, af_frobenius, af_gamma, ef_frobenius


# ---- cyclotomic coefficient fields ---------------------------------------------------------------


def _cyclotomic_shifted(p: int, n: int) -> list:
    """Coefficients of Phi_{p^n}(X + 1), lowest degree first."""
    step = p ** (n - 1)
    out = [0] * (step * (p - 1) + 1)
    for i in range(p):
        e = i * step
        for k in range(e + 1):
            out[k] += comb(e, k)
    return out


@dataclass
class ZetaData:
    """A primitive p^n-th root of unity in the coefficient field L."""

    field: LocalFieldSpec
    p: int
    n: int
    zeta: OFElem

    @property
    def order(self) -> int:
        return self.p**self.n

    def power(self, k: int) -> OFElem:
        return self.zeta ** (k % self.order)

    def log(self, x: OFElem) -> int:
        """k with zeta^k = x, or LubinTateError when x is not a p^n-th root of unity."""
        for k in range(self.order):
            if self.power(k) == x:
                return k
        raise LubinTateError("value is not a p-power root of unity of L")


def cyclotomic_data(p: int, n: int, prec: int = 8) -> ZetaData:
    """L = Q_p(zeta_{p^n}) with ``prec`` digits of its uniformizer zeta - 1."""
    if n == 0:
        L = make_local_field(p, precN=prec)
        return ZetaData(L, p, 0, OFElem.one(L, prec))
    if p == 2 and n == 1:
        L = make_local_field(2, precN=prec)
        return ZetaData(L, 2, 1, OFElem(L, L.int_raw(-1), prec))
    L = LocalFieldSpec(make_local_field(p).residue, _cyclotomic_shifted(p, n), prec)
    zeta = OFElem(L, L.one_raw(), prec) + L.uniformizer(prec)
    return ZetaData(L, p, n, zeta)


# ---- characters ------------------------------------------------------------------------------------


def unit_group_generators(p: int, level: int) -> list:
    """Generators of (Z/p^level)^* as a direct product: [(g, order), ...]."""
    M = p**level
    if level == 0 or (p == 2 and level == 1):
        return []
    if p == 2:
        gens = [(M - 1, 2)]
        if level >= 3:
            gens.append((5, 2 ** (level - 2)))
        return gens
    order = (p - 1) * p ** (level - 1)
    for g in range(2, M):
        if gcd(g, p) != 1:
            continue
        if all(pow(g, order // r, M) != 1 for r in _prime_factors(order)):
            return [(g, order)]
    raise AssertionError("no primitive root")


def _prime_factors(n: int) -> list:
    out, d = [], 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


class CharacterEta:
    """A finite-order character of F^* = Q_p^*, given by its value at the
    uniformizer and its values on (Z/p^level)^*."""

    def __init__(self, field: LocalFieldSpec, level: int, pi_value: OFElem, unit_values: dict):
        self.field = field
        self.p = field.p
        self.level = level
        self.pi_value = pi_value
        self.unit_values = dict(sorted(unit_values.items()))
        M = self.p**level
        reps = [r for r in range(M) if r % self.p] if M > 1 else [0]
        if sorted(self.unit_values) != reps:
            raise ValueError(f"unit values must be given on all of (Z/{M})^*")

    @classmethod
    def from_exponents(cls, zd: ZetaData, level: int, pi_exp: int, gen_exps: list) -> "CharacterEta":
        """eta(pi) = zeta^pi_exp and eta(g_i) = zeta^gen_exps[i] on the generators of
        :func:`unit_group_generators`."""
        p = zd.p
        M = p**level
        gens = unit_group_generators(p, level)
        if len(gen_exps) != len(gens):
            raise ValueError("one exponent per generator")
        for (g, o), k in zip(gens, gen_exps):
            if (k * o) % zd.order:
                raise ValueError(f"zeta^{k} has order not dividing the order {o} of {g}")
        values = {}
        for es in product(*[range(o) for _, o in gens]):
            r = 1
            k = 0
            for (g, _), e, ke in zip(gens, es, gen_exps):
                r = r * pow(g, e, M) % M if M > 1 else 0
                k += e * ke
            values[r % M if M > 1 else 0] = zd.power(k)
        return cls(zd.field, level, zd.power(pi_exp), values)

    def value(self, a) -> OFElem:
        """eta(a) for a unit a of Z_p (int or OFElem of Q_p)."""
        M = self.p**self.level
        if isinstance(a, OFElem):
            if not a.is_unit():
                raise NotAUnit("eta is evaluated on units here")
            a = a.to_int()
        if a % self.p == 0:
            raise NotAUnit("eta is evaluated on units here")
        return self.unit_values[a % M if M > 1 else 0]

    def is_multiplicative(self) -> bool:
        M = self.p**self.level
        if M == 1:
            return self.unit_values[0] == 1
        keys = list(self.unit_values)
        for a in keys:
            for b in keys:
                if self.unit_values[a * b % M] != self.unit_values[a] * self.unit_values[b]:
                    return False
        return True

    def order(self, zd: ZetaData) -> int:
        exps = [zd.log(self.pi_value)] + [zd.log(v) for v in self.unit_values.values()]
        o = 1
        for k in exps:
            o = max(o, zd.order // gcd(zd.order, k))
        return o

    def same_on_units(self, other: "CharacterEta") -> bool:
        M = self.p ** max(self.level, other.level)
        for r in range(1, max(M, 2)):
            if r % self.p == 0:
                continue
            if not (self.value(r) == other.value(r)):
                return False
        return True

    def to_json(self) -> dict:
        return {
            "pi_value": self.pi_value.to_json(),
            "level": self.level,
            "unit_values": {str(r): v.to_json() for r, v in self.unit_values.items()},
        }

    @classmethod
    def from_json(cls, field: LocalFieldSpec, obj: dict) -> "CharacterEta":
        return cls(
            field,
            int(obj["level"]),
            OFElem.from_json(field, obj["pi_value"]),
            {int(r): OFElem.from_json(field, v) for r, v in obj["unit_values"].items()},
        )


def enumerate_characters(p: int, max_level: int = 2, max_n: int = 2, prec: int = 8) -> list:
    """All characters of p-power order dividing p^max_n and level <= max_level.

    Returns (eta, zd) pairs; zd is the cyclotomic field of the exact order.
    """
    out = []
    gens = unit_group_generators(p, max_level)
    full = p**max_n
    seen = set()
    for pi_exp in range(full):
        ranges = []
        for g, o in gens:
            ranges.append([k for k in range(full) if (k * o) % full == 0])
        for ks in product(*ranges):
            key = (pi_exp,) + tuple(ks)
            if key in seen:
                continue
            seen.add(key)
            o = max([full // gcd(full, k) for k in key] + [1])
            n = 0
            while p**n < o:
                n += 1
            zd = cyclotomic_data(p, n, prec)
            scale = full // zd.order
            eta = CharacterEta.from_exponents(zd, max_level, pi_exp // scale, [k // scale for k in ks])
            out.append((eta, zd))
    return out


def gamma_generators(F: LocalFieldSpec, prec: Optional[int] = None) -> list:
    """Topological generators of Z_p^*: the Teichmuller lift of a primitive
    root mod p and 1 + p (p odd); -1 and 3 (p = 2)."""
    if not F.is_qp:
        raise ValueError("descent is implemented for F = Q_p")
    prec = F.prec if prec is None else prec
    p = F.p
    if p == 2:
        return [OFElem(F, F.int_raw(-1), prec), OFElem(F, F.int_raw(3), prec)]
    g = unit_group_generators(p, 1)[0][0]
    return [teichmuller(F.residue(g), F, prec), OFElem(F, F.int_raw(1 + p), prec)]


# ---- modules ----------------------------------------------------------------------------------------


def root_precision(prec: int, p: int, e: int) -> int:
    """Digits to which alpha is determined (up to a constant) by alpha^p mod varpi_L^prec.

    (1 + varpi^j d)^p - 1 has valuation min(p j, e + j), so alpha is
    ambiguous from the first j where that reaches prec.
    """
    return max(-(-prec // p), prec - e)


def working_precision(zd: ZetaData, target: int) -> int:
    """Coefficient precision so that n root extractions leave ``target`` digits."""
    e = zd.field.e
    w = target
    while True:
        P = w
        for _ in range(zd.n):
            P = root_precision(P, zd.p, e)
        if P >= target:
            return w
        w += 1


def descent_window(zd: ZetaData, prec: int, final: int = 8) -> int:
    """A pi-adic window for the certificate that leaves ``final`` exponents
    after every stage of the descent.

    A p-th root step at digit d < pe/(p-1) only knows the root below
    exponent H/p, so each such digit costs a factor p of window.
    """
    p, e = zd.p, zd.field.e
    threshold = Fraction(p * e, p - 1)
    factor = 1
    P = prec
    for _ in range(zd.n):
        factor *= p ** sum(1 for d in range(p, P, p) if d < threshold)
        P = root_precision(P, p, e)
    return final * factor


def descent_ring(
    zd: ZetaData, G: Optional[LTGroup] = None, prec: Optional[int] = None, hi: Optional[int] = None, final: int = 8
) -> AFRing:
    """O_L . A_F for F = Q_p with its standard Lubin-Tate group unless G is given.

    The default precision is the working precision for a descent whose
    answer is certified to the field's precision, and the default window
    leaves ``final`` exponents after the descent.
    """
    p = zd.p
    prec = working_precision(zd, zd.field.prec) if prec is None else prec
    if hi is None:
        hi = descent_window(zd, prec, final)
    if G is None:
        G = LTGroup.standard(make_local_field(p, precN=prec + 4), cap=16)
    return AFRing(G, prec, coef=zd.field, hi_default=hi)


@dataclass
class RankOneModule:
    """phi(e) = lam e and sigma_a(e) = c_a e on the stored generators a."""

    ring: AFRing
    lam: AFElem
    cocycle: list  # [(a: OFElem of F, c_a: AFElem)]

    def generator_labels(self) -> list:
        return [str(a.to_int()) for a, _ in self.cocycle]

    def c(self, a) -> AFElem:
        for b, c in self.cocycle:
            if b == a or (isinstance(a, int) and b.to_int() == a):
                return c
        raise KeyError(a)

    def to_json(self) -> dict:
        return {
            "lambda": self.lam.to_json(),
            "cocycle": {lab: c.to_json() for lab, (_, c) in zip(self.generator_labels(), self.cocycle)},
        }


def rank1_module(eta: CharacterEta, ring: AFRing) -> RankOneModule:
    """(O_L . A_F)(eta): lam = eta(pi), c_a = eta(a), all constants."""
    gens = gamma_generators(ring.base, ring.base.prec)
    cocycle = [(a, ring.const(eta.value(a))) for a in gens]
    return RankOneModule(ring, ring.const(eta.pi_value), cocycle)


def change_basis(D: RankOneModule, u: AFElem, gamma_hi: Optional[int] = None) -> RankOneModule:
    """The same module in the basis u e.

    ``gamma_hi`` caps the window of the cocycle; sigma_a needs [a](pi) to
    that many terms, which is the expensive part.
    """
    uinv = u.inverse()
    lam = D.lam * af_frobenius(u) * uinv
    if gamma_hi is None:
        gamma_hi = D.ring.hi_default
    ug = u.truncate(gamma_hi)
    cocycle = [(a, (c * af_gamma(a, ug, gamma_hi) * uinv).truncate(gamma_hi)) for a, c in D.cocycle]
    return RankOneModule(D.ring, lam, cocycle)


def forward_certificate(D: RankOneModule, u: AFElem, order: int, gamma_hi: Optional[int] = 24):
    """Twist a module with constant root-of-unity lam by u; returns the new
    module and beta = u^order, which satisfies lam'^order = phi(beta)/beta."""
    if not D.lam.is_constant() or not (D.lam ** order == D.ring.one()):
        raise ValueError("forward certificates need lam a root of unity of the given order")
    if gamma_hi is not None:
        gamma_hi = min(gamma_hi, D.ring.hi_default)
    return change_basis(D, u, gamma_hi), u**order


def random_unit(ring: AFRing, rng, lo: int = 0, hi: int = 3) -> AFElem:
    """A random exact Laurent polynomial pi^lo (c_0 + c_1 pi + ...) with c_0 a unit.

    With lo >= 0 the element is a unit of O_L[[pi]] up to a power of pi, so
    inverses and products keep their full pi-adic window.
    """
    C = ring.coef
    while True:
        u = ring.random(rng, lo, hi)
        if any(C.residue_raw(u.coefficient(lo).raw)):
            return u


def tamper_cocycle(D: RankOneModule, index: int, exponent: int, delta: int = 1) -> RankOneModule:
    """Negative control: add delta * pi^exponent to one stored c_a."""
    R = D.ring
    cocycle = list(D.cocycle)
    a, c = cocycle[index]
    cocycle[index] = (a, c + R.elem({exponent: delta}))
    return RankOneModule(R, D.lam, cocycle)


def _relation_check(name: str, lhs: AFElem, rhs: AFElem) -> dict:
    j = lhs.first_difference(rhs)
    entry = {"check": name, "status": "pass" if j is None else "fail", "first_failure": None}
    if j is not None:
        entry["first_failure"] = {
            "exponent": j,
            "lhs": lhs.coefficient(j).to_json(),
            "rhs": rhs.coefficient(j).to_json(),
        }
    return entry


def verify_module(D: RankOneModule) -> dict:
    """phi sigma_a = sigma_a phi on each generator (lam phi(c_a) = c_a sigma_a(lam)),
    sigma_a sigma_b = sigma_b sigma_a, and lam a unit."""
    checks = [{"check": "etale", "status": "pass" if D.lam.is_unit() else "fail", "first_failure": None}]
    labels = D.generator_labels()
    for lab, (a, c) in zip(labels, D.cocycle):
        lhs = D.lam * af_frobenius(c)
        rhs = c * af_gamma(a, D.lam)
        checks.append(_relation_check(f"commutation[{lab}]", lhs, rhs))
    for i in range(len(D.cocycle)):
        for j in range(i + 1, len(D.cocycle)):
            (a, ca), (b, cb) = D.cocycle[i], D.cocycle[j]
            checks.append(
                _relation_check(f"gamma_commute[{labels[i]},{labels[j]}]", ca * af_gamma(a, cb), cb * af_gamma(b, ca))
            )
    checks.sort(key=lambda c: c["check"])
    failed = [c["check"] for c in checks if c["status"] != "pass"]
    return {"status": "pass" if not failed else "fail", "failed": failed, "checks": checks}


# ---- E_F helpers --------------------------------------------------------------------------------------


def _ef_trunc(x: EFElem, H) -> EFElem:
    H = Fraction(H)
    if x.hi is not None:
        H = min(H, x.hi)
    return EFElem(x.ring, x.depth, x.terms, H)


def _ef_exact(x: EFElem) -> EFElem:
    return EFElem(x.ring, x.depth, x.terms, None)


def _ef_frob_power(x: EFElem, r: int) -> EFElem:
    """x^r for r a power of p: coefficients to the r-th power, exponents times r."""
    k = x.ring.k
    hi = None if x.hi is None else x.hi * r
    return EFElem(x.ring, x.depth, {n * r: k.pow_raw(c, r) for n, c in x.terms.items()}, hi)


def _ef_scale(x: EFElem, c) -> EFElem:
    k = x.ring.k
    return EFElem(x.ring, x.depth, {n: k.mul_raw(v, c) for n, v in x.terms.items()}, x.hi)


def _coeff_root(k, c, r: int):
    """Inverse of c -> c^r on the residue field, r a power of p."""
    while r > 1:
        c = k.root_p_raw(c)
        r //= k.p
    return c


def _split_constant(x: EFElem):
    k = x.ring.k
    c = x.terms.get(0, k.zero_raw)
    rest = EFElem(x.ring, x.depth, {n: v for n, v in x.terms.items() if n != 0}, x.hi)
    return c, rest


def _artin_schreier(mu: EFElem, r: int, H):
    """Solve w^r - w = mu as far as possible inside the ring.

    Returns (w, residual) with w^r - w = mu - residual, where the residual
    collects the obstruction: polar terms with exponent not divisible by r
    and the constant term. ``H`` truncates the series for positive exponents.
    """
    E = mu.ring
    k = E.k
    w = EFElem(E, mu.depth, {}, None)
    rest = dict(mu.terms)
    residual = {}
    # polar part, most negative first
    while True:
        neg = [n for n in rest if n < 0]
        if not neg:
            break
        n = min(neg)
        c = rest.pop(n)
        if n % r:
            residual[n] = c
            continue
        b = _coeff_root(k, c, r)
        w = w + EFElem(E, mu.depth, {n // r: b}, None)
        m = n // r
        rest[m] = k.add_raw(rest.get(m, k.zero_raw), b)
        if not any(rest[m]):
            del rest[m]
    if 0 in rest:
        residual[0] = rest.pop(0)
    pos = EFElem(E, mu.depth, rest, None)
    if not pos.is_zero():
        H = Fraction(H)
        acc = EFElem(E, mu.depth, {}, None)
        term = pos
        while not term.is_zero() and term.order() <= H:
            acc = acc + term
            term = _ef_exact(_ef_trunc(_ef_frob_power(term, r), H))
        w = w - _ef_trunc(acc, H)
        w = _ef_trunc(w, H)
    res = EFElem(E, mu.depth, residual, None)
    if mu.hi is not None and w.hi is not None:
        w = _ef_trunc(w, mu.hi)
    elif mu.hi is not None:
        w = EFElem(E, w.depth, w.terms, mu.hi)
    return w, res


def _binom_mod_p(num: int, den: int, i: int, p: int) -> int:
    """binom(num/den, i) mod p, for den prime to p."""
    x = Fraction(num, den)
    c = Fraction(1)
    for j in range(i):
        c = c * (x - j) / (j + 1)
    return c.numerator * pow(c.denominator, -1, p) % p


def _ef_kth_root(a: EFElem, r: int, H) -> Optional[EFElem]:
    """x with x^r = a (r prime to p), or None when a is not an r-th power."""
    E = a.ring
    k = E.k
    p = k.p
    if a.is_zero():
        raise ZeroInput("a must be nonzero")
    n0 = min(a.terms)
    if n0 % r:
        return None
    c0 = a.terms[n0]
    b = None
    for y in k.units():
        if k.pow_raw(y.c, r) == tuple(c0):
            b = y.c
            break
    if b is None:
        return None
    c0inv = k.inv_raw(c0)
    z = EFElem(E, a.depth, {n - n0: k.mul_raw(c, c0inv) for n, c in a.terms.items() if n != n0}, None)
    H = Fraction(H) - Fraction(n0, E.q**a.depth)
    if a.hi is not None:
        H = min(H, a.hi - Fraction(n0, E.q**a.depth))
    y = E.one()
    if not z.is_zero():
        zp = E.one()
        i = 1
        vz = z.order()
        while i * vz <= H:
            zp = _ef_exact(_ef_trunc(zp * z, H))
            coef = _binom_mod_p(1, r, i, p)
            if coef:
                y = y + zp * coef
            i += 1
        y = _ef_trunc(y, H)
    x = EFElem(E, a.depth, {n0 // r: b}, None) * y
    return x


# ---- mod-p solvers ----------------------------------------------------------------------------------


@dataclass
class ExtensionStep:
    """A declared finite extension where a solution lives.

    kind "kummer": X^degree - mu; kind "artin-schreier": X^degree - X - mu.
    """

    kind: str
    degree: int
    mu: EFElem
    generator: str = "w"
    base: object = "E_F"

    def polynomial(self) -> str:
        if self.kind == "kummer":
            return f"{self.generator}^{self.degree} - ({self.mu.to_string()})"
        return f"{self.generator}^{self.degree} - {self.generator} - ({self.mu.to_string()})"

    def to_json(self) -> dict:
        base = self.base.to_json() if isinstance(self.base, ExtensionStep) else self.base
        return {
            "kind": self.kind,
            "degree": self.degree,
            "mu": self.mu.to_json(),
            "generator": self.generator,
            "base": base,
            "polynomial": self.polynomial(),
        }


@dataclass
class PhiFixedSolution:
    """Solutions of x^q = a x in E_F: the F_q-line spanned by ``basis``, or an extension."""

    a: EFElem
    basis: Optional[EFElem]
    extension: Optional[ExtensionStep]
    verified: bool

    @property
    def solvable(self) -> bool:
        return self.basis is not None

    def to_json(self) -> dict:
        return {
            "equation": "x^q = a x",
            "a": self.a.to_json(),
            "solvable": self.solvable,
            "basis": None if self.basis is None else self.basis.to_json(),
            "dimension": 1 if self.solvable else 0,
            "extension": None if self.extension is None else self.extension.to_json(),
            "verified": self.verified,
        }


def _check_line(x: EFElem, a: EFElem) -> bool:
    """Closure of the F_q-line through x under scaling and sums, by substitution."""
    E = x.ring
    q = E.q
    k = E.k
    if k.q != q:
        return True
    sols = [_ef_scale(x, c.c) for c in k.elements()]
    for s in sols:
        if not (_ef_power(s, q) == a * s):
            return False
    for s, t in zip(sols, sols[1:] + sols[:1]):
        u = s + t
        if not (_ef_power(u, q) == a * u):
            return False
    return True


def _ef_power(x: EFElem, q: int) -> EFElem:
    """x^q in characteristic p (q a power of p)."""
    return _ef_frob_power(x, q)


def solve_phi_fixed_modp(a: EFElem, H=None) -> PhiFixedSolution:
    """Rank-one mod-p Frobenius equation x^q = a x, i.e. x^(q-1) = a."""
    if a.is_zero():
        raise ZeroInput("a must be nonzero")
    E = a.ring
    q = E.q
    H = Fraction(32 if H is None else H)
    x = _ef_kth_root(a, q - 1, H)
    if x is None:
        step = ExtensionStep("kummer", q - 1, a)
        return PhiFixedSolution(a, None, step, True)
    ok = _ef_power(x, q) == a * x and _check_line(x, a)
    if not ok:
        raise LubinTateError("solution failed verification by substitution")
    return PhiFixedSolution(a, x, None, True)


@dataclass
class LT4Result:
    kind: str  # "multiplicative" or "additive"
    rhs: EFElem
    x: Optional[EFElem]
    steps: list
    kernel: str
    frobenius_power: int
    verified: bool

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "rhs": self.rhs.to_json(),
            "x": None if self.x is None else self.x.to_json(),
            "in_E_F": not self.steps,
            "steps": [s.to_json() for s in self.steps],
            "kernel": self.kernel,
            "frobenius_power": self.frobenius_power,
            "verified": self.verified,
        }


def _phi_iter(x: EFElem, i: int) -> EFElem:
    for _ in range(i):
        x = ef_frobenius(x)
    return x


def lemma_LT4_solve_modp(rhs: EFElem, additive: bool = False, H=None) -> LT4Result:
    """phi(x)/x = rhs (multiplicative) or phi(x) - x = rhs (additive) over k_L (x) E_F.

    phi fixes k_L, so with N = [k_L : k_F] one solves with phi^N, which is
    w -> w^(q^N), and returns x = w phi(w) ... phi^(N-1)(w) (resp. the sum).
    """
    E = rhs.ring
    k = E.k
    q = E.q
    N = 1
    while q**N < k.q:
        N += 1
    if q**N != k.q:
        raise ValueError("the coefficient field must be an extension of k_F")
    Q = q**N
    H = Fraction(32 if H is None else H)
    if not additive:
        if rhs.is_zero():
            raise NotAUnit("lambda_bar must be a unit")
        # phi(x)/x has leading coefficient 1 and order divisible by q-1;
        # otherwise the solution needs the Kummer extension w^(Q-1) = rhs
        n0 = min(rhs.terms)
        lead = rhs.terms[n0]
        if rhs.depth or lead != k.one_raw or n0 % (q - 1):
            return LT4Result("multiplicative", rhs, None, [ExtensionStep("kummer", Q - 1, rhs)], "k_L^*", N, True)
        hi = None if rhs.hi is None else rhs.hi - n0
        unit = EFElem(E, 0, {n - n0: c for n, c in rhs.terms.items()}, hi)
        w = _ef_kth_root(unit, Q - 1, H)
        if w is None:
            raise LubinTateError("principal unit without a (Q-1)-th root")
        x = w
        for i in range(1, N):
            x = x * _phi_iter(w, i)
        s = n0 // (q - 1)
        x = EFElem(E, 0, {n + s: c for n, c in x.terms.items()}, None if x.hi is None else x.hi + s)
        ok = ef_frobenius(x) == rhs * x
        if not ok:
            raise LubinTateError("multiplicative solution failed verification")
        return LT4Result("multiplicative", rhs, x, [], "k_L^*", N, True)
    w, res = _artin_schreier(rhs, Q, H)
    x = w
    for i in range(1, N):
        x = x + _phi_iter(w, i)
    ok = ef_frobenius(x) - x == rhs - res
    if not ok:
        raise LubinTateError("additive solution failed verification")
    steps = [] if res.is_zero() else [ExtensionStep("artin-schreier", Q, res)]
    return LT4Result("additive", rhs, x, steps, "k_L", N, True)


# ---- LT5 -------------------------------------------------------------------------------------------------


@dataclass
class LT5Result:
    beta: AFElem
    beta0: OFElem
    alpha: AFElem
    window: list
    steps: list = dc_field(default_factory=list)
    verified_prec: int = 0

    def to_json(self) -> dict:
        return {
            "verified_prec": self.verified_prec,
            "beta": self.beta.to_json(),
            "beta0": self.beta0.to_json(),
            "alpha": self.alpha.to_json(),
            "window": self.window,
            "steps": self.steps,
        }


def _lift_ef(R: AFRing, x: EFElem) -> AFElem:
    """Lift of an element of E_F to A with integer digits, keeping its window."""
    if x.depth:
        raise NoPthRootHypothesis("a p-th root outside E_F would be needed")
    C = R.coef
    hi = None if x.hi is None else int(x.hi // 1)
    return R.elem({n: C.lift_residue(c) for n, c in x.terms.items()}, hi=hi)


def _inv_near_one(v: AFElem, H: int) -> AFElem:
    """Inverse of v = 1 + z with z divisible by the uniformizer, known below pi^(H+1)."""
    R = v.ring
    z = v - R.one()
    N = v.prec
    J = max(0, -z.lo) if not z.is_zero() else 0
    Hw = H + J * N
    acc = R.one()
    term = R.one()
    zt = AFElem(R, z.lo, z.coeffs, None, z.prec)
    for _ in range(N):
        term = -(term * zt)
        term = AFElem(R, term.lo, term.coeffs, None, term.prec).truncate(Hw)
        term = AFElem(R, term.lo, term.coeffs, None, term.prec)
        if term.is_zero():
            break
        acc = acc + term
    hi = H if v.hi is None else min(H, v.hi + 2 * min(0, z.lo if not z.is_zero() else 0))
    return acc.truncate(hi)


def lemma_LT5_descent(beta: AFElem, p: Optional[int] = None, hi: Optional[int] = None) -> tuple:
    """beta = beta0 * alpha^p with beta0 a constant unit of O_L.

    Mod the uniformizer of L, beta must be a p-th power in E_F. The lift is
    built digit by digit: at digit k a correction (1 + varpi_L^j delta)
    absorbs the non-constant part of the discrepancy (a p-th root below
    the threshold p e/(p-1), an Artin-Schreier equation at it, a linear one
    above it), and constants go into beta0. Raises NoPthRootHypothesis when
    a step has no solution. Returns (beta0, alpha); see :func:`lt5_certified`
    for the verified record.
    """
    res = lt5_certified(beta, p, hi)
    return res.beta0, res.alpha


def lt5_certified(beta: AFElem, p: Optional[int] = None, hi: Optional[int] = None) -> LT5Result:
    R = beta.ring
    C = R.coef
    p = C.p if p is None else p
    if p != C.p:
        raise ValueError("p must be the residue characteristic")
    if not beta.is_unit():
        raise NotAUnit("beta must be a unit")
    N = beta.prec
    e = C.e
    E = EFRing(C.residue, R.q)
    k = C.residue
    H = R.hi_default if hi is None else hi
    if beta.hi is not None:
        H = min(H, beta.hi)
    steps = []
    # digit 0: pth root of the reduction
    bb = beta.reduce(E)
    terms = {}
    for n, c in bb.terms.items():
        if n % p:
            raise NoPthRootHypothesis(f"reduction has the term pi_bar^{n}, exponent not divisible by p={p}")
        terms[n // p] = _coeff_root(k, c, p)
    alpha = _lift_ef(R, EFElem(E, 0, terms, None))
    rho = (beta * (alpha**p).inverse(hi=H)).truncate(H)
    steps.append({"digit": 0, "kind": "pth-root"})
    beta0 = OFElem.one(C, N)
    threshold = Fraction(p * e, p - 1)
    eps = OFElem(C, C.eps_raw_exact, N)
    w_bar = eps.inverse().residue()
    as_scale = None
    if threshold.denominator == 1:
        for y in k.units():
            if y ** (p - 1) == -w_bar:
                as_scale = y
                break
    for d in range(1, N):
        z = rho - R.one()
        if z.is_zero():
            continue
        g = z.div_pi_power(d)
        gb = g.reduce(E)
        c, rest = _split_constant(gb)
        if any(c):
            corr = OFElem(C, C.lift_residue(c), N) * C.uniformizer(N) ** d + 1
            beta0 = beta0 * corr
            rho = rho.scale(corr.inverse())
        if rest.is_zero():
            continue
        if d < threshold:
            if d % p:
                raise NoPthRootHypothesis(f"digit {d}: non-constant discrepancy that is not a p-th power")
            sub = {}
            for n, cc in rest.terms.items():
                if n % p:
                    raise NoPthRootHypothesis(f"digit {d}: exponent {n} not divisible by p")
                sub[n // p] = _coeff_root(k, cc, p)
            delta = EFElem(E, 0, sub, None if rest.hi is None else Fraction(int(rest.hi // p)))
            j = d // p
            kind = "pth-root"
        elif d == threshold:
            if as_scale is None:
                raise LubinTateError("no scaling turns the threshold equation into Artin-Schreier form")
            y, residual = _artin_schreier(_ef_scale(rest, (as_scale**p).inverse().c), p, H)
            if not residual.is_zero():
                raise NoPthRootHypothesis(f"digit {d}: Artin-Schreier obstruction {residual.to_string()}")
            delta = _ef_scale(y, as_scale.c)
            j = d // p
            kind = "artin-schreier"
        else:
            delta = _ef_scale(rest, w_bar.inverse().c)
            j = d - e
            kind = "linear"
        x = _lift_ef(R, delta).scale(C.uniformizer(N) ** j)
        one_x = R.one() + x
        alpha = alpha * one_x
        rho = (rho * _inv_near_one(one_x**p, H)).truncate(H)
        steps.append({"digit": d, "kind": kind, "shift": j})
    # verification: beta = beta0 alpha^p below pi^(H'+1)
    rhs = (alpha**p).scale(beta0)
    Hc = min(h for h in (H, rho.hi, alpha.hi) if h is not None)
    if Hc < max(beta.lo, 0):
        raise PrecisionExhausted(f"LT5 window exhausted (known only below pi^{Hc + 1}); raise the ring's hi_default")
    if (beta.truncate(Hc)).first_difference(rhs.truncate(Hc)) is not None:
        raise LubinTateError("LT5 witness failed verification")
    check = (beta * (alpha**p).inverse(hi=Hc)).truncate(Hc)
    if not check.is_constant():
        raise LubinTateError("beta alpha^-p is not constant")
    P = root_precision(N, p, e)
    return LT5Result(beta, beta0, alpha.truncate(Hc).at_prec(P), [beta.lo, Hc], steps, N)


# ---- the descent ---------------------------------------------------------------------------------------


@dataclass
class DescentResult:
    eta: CharacterEta
    twist: OFElem
    alpha: AFElem
    transcript: list
    verified: bool
    certified_prec: int = 0

    def to_json(self) -> dict:
        return {
            "certified_prec": self.certified_prec,
            "eta": self.eta.to_json(),
            "unramified_twist": self.twist.to_json(),
            "alpha": self.alpha.to_json(),
            "transcript": self.transcript,
            "verified": self.verified,
        }


def _is_p_power(n: int, p: int) -> Optional[int]:
    k = 0
    while n % p == 0 and n > 1:
        n //= p
        k += 1
    return k if n == 1 else None


def _constant_ratio(num: AFElem, den: AFElem, what: str) -> OFElem:
    """The constant c with num = c den, checked on the common window."""
    j0 = den.unit_exponent()
    if j0 is None:
        raise NotAUnit(f"{what}: denominator is not a unit")
    hi = [h for h in (num.hi, den.hi) if h is not None]
    if hi and min(hi) < j0:
        raise PrecisionExhausted(f"{what}: window exhausted before the leading exponent {j0}")
    c = num.coefficient(j0) * den.coefficient(j0).inverse()
    j = num.first_difference(den.scale(c))
    if j is not None:
        raise LubinTateError(f"{what} is not constant (exponent {j})")
    return c


def character_descent(D: RankOneModule, beta: AFElem, order: int, zd: ZetaData) -> DescentResult:
    """From lam^order = phi(beta)/beta, find an unramified twist t and alpha
    with t lam = phi(alpha)/alpha, then read eta on the Gamma generators from
    the phi-fixed basis f = alpha^-1 e. The returned character has eta(pi) = 1;
    the module is isomorphic to (O_L . A_F)(eta) twisted by the unramified
    character pi -> t^-1.
    """
    R = D.ring
    p = R.coef.p
    n = _is_p_power(order, p)
    if n is None:
        raise OrderNotPPower(f"order {order} is not a power of p={p}")
    if zd.field != R.coef:
        raise MissingRootsOfUnity("the roots of unity must live in the coefficient field")
    if zd.order < order and order > 1:
        raise MissingRootsOfUnity(f"L contains zeta of order {zd.order}, below {order}")
    if af_frobenius(beta).first_difference(D.lam**order * beta) is not None:
        raise NoPthRootHypothesis("the certificate does not satisfy lam^order = phi(beta)/beta")
    transcript = []
    lam = D.lam
    twist = OFElem.one(R.coef, R.prec)
    cur = beta
    for stage in range(n, 0, -1):
        res = lt5_certified(cur)
        alpha = res.alpha
        zeta = _constant_ratio(af_frobenius(alpha), alpha * lam ** (p ** (stage - 1)), "phi(alpha)/(alpha lam^(p^(stage-1)))")
        k = zd.log(zeta)
        if (k * p) % zd.order:
            raise NoPthRootHypothesis("the discrepancy is not a p-th root of unity")
        # t^(p^(stage-1)) = zeta with t a p^n-th root of unity
        i = k // (zd.order // p)
        t = zd.power(i * (zd.order // p**stage))
        lam = lam.scale(t)
        twist = twist * t
        cur = alpha
        transcript.append(
            {
                "stage": n - stage + 1,
                "beta": res.beta.to_json(),
                "alpha": alpha.to_json(),
                "beta0": res.beta0.to_json(),
                "zeta": zeta.to_json(),
                "twist": t.to_json(),
                "window": res.window,
            }
        )
    A = cur
    # now lam = phi(A)/A
    if af_frobenius(A).first_difference(lam * A) is not None:
        raise LubinTateError("phi(A)/A does not match the twisted lam")
    values = {}
    for a, c in D.cocycle:
        eta_a = _constant_ratio(c * A, af_gamma(a, A), f"eta({a.to_int()})")
        values[a.to_int()] = eta_a
    # extend from generators to (Z/p^level)^* for the smallest level that makes it well defined
    eta = _character_from_generators(zd, values)
    return DescentResult(eta, twist, A, transcript, True, A.prec)


def _character_from_generators(zd: ZetaData, values: dict) -> CharacterEta:
    """Character of Z_p^* with eta(pi) = 1 from its values on the Gamma generators."""
    p = zd.p
    logs = {a: zd.log(v) for a, v in values.items()}
    # the Teichmuller generator (p odd) carries no p-power part
    for level in range(0, 2 + max(zd.n, 1)):
        M = p**level
        try:
            exps = [_log_in_terms(g, M, logs, p, zd) for g, _ in unit_group_generators(p, level)]
            eta = CharacterEta.from_exponents(zd, level, 0, exps)
        except ValueError:
            continue
        if all(eta.value(a) == v for a, v in values.items()):
            return eta
    raise LubinTateError("the values on the generators do not define a character of p-power order")


def _log_in_terms(g: int, M: int, logs: dict, p: int, zd: ZetaData) -> int:
    """log_zeta eta(g) for g in (Z/M)^*, writing g through the Gamma generators."""
    if p == 2:
        # generators -1 and 3; 3 generates the 2-power part modulo sign
        a, b = logs.get(-1, 0), logs.get(3, 0)
        for s in (0, 1):
            for t in range(M):
                if pow(-1, s) * pow(3, t, M) % M == g % M:
                    return (s * a + t * b) % zd.order
        raise ValueError("not generated")
    one_p = 1 + p
    b = logs.get(one_p, 0)
    # g = omega(g) (1+p)^t with omega(g) of order prime to p, whose value is 1
    tg = pow(g, p - 1, M)
    base = pow(one_p, p - 1, M)
    for t in range(M):
        if pow(base, t, M) == tg:
            return (t * b) % zd.order
    raise ValueError("not generated")
