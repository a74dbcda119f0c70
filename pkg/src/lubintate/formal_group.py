"""Lubin-Tate formal groups: the commuting-series solver, F_f, [a], iterates."""
from __future__ import annotations

from fractions import Fraction
from typing import Optional, Sequence

from .errors import (
    CapTooSmall,
    IntegralityViolation,
    NotAdmissible,
    PrecisionExhausted,
)
from .padic import LocalFieldSpec, OFElem
from .series import TruncatedSeries, monomial_basis


def precision_profile(cap: int, work: int, lin_prec: int, q: Optional[int]) -> list:
    """Guaranteed precision of each degree of the solver output.

    With ``q`` given (admissible g and h, both congruent to X^q mod pi), an
    error in degree j only loses a digit when it feeds degree q*j, because
    every other contribution is multiplied by pi before the division.
    Without ``q`` each degree may lose one digit.
    """
    P = [0, min(work, lin_prec)]
    for k in range(2, cap + 1):
        lower = min(P[1:k])
        if q is None:
            P.append(min(work, lower) - 1)
            continue
        pk = min(work - 1, lower)
        if k % q == 0:
            pk = min(pk, P[k // q] - 1)
        P.append(pk)
    return P


def is_admissible(f: TruncatedSeries, check_linear: bool = True) -> tuple:
    """(ok, reason) for f = pi*X mod deg 2, f = X^q mod pi, f(0) = 0."""
    F = f.field
    q = F.q
    if f.nvars != 1:
        return False, "f must be univariate"
    if (0,) in f.terms:
        return False, "f(0) != 0"
    if check_linear:
        lin = f.coefficient((1,))
        if lin != OFElem(F, F.pi_raw_exact, f.prec):
            return False, "linear coefficient is not the uniformizer"
    for (k,), c in f.terms.items():
        r = F.residue_raw(c)
        if k == q:
            if r != F.residue.one_raw:
                return False, "coefficient of X^q is not 1 mod pi"
        elif any(r):
            return False, f"coefficient of X^{k} is not divisible by pi"
    if f.cap >= q and (q,) not in f.terms:
        return False, "coefficient of X^q is not 1 mod pi"
    return True, ""


class _Hom:
    """Degree-graded sparse raw coefficients over a fixed monomial basis."""

    def __init__(self, field: LocalFieldSpec, basis, work: int):
        self.F = field
        self.basis = basis
        self.work = work
        self.table = basis.add_table
        self.mod = field.modulus(work)

    def mul(self, A: dict, B: dict, acc: dict) -> None:
        F, W, table = self.F, self.work, self.table
        if F.n == 1:
            mod = self.mod
            for i, a in A.items():
                row = table[i]
                x = a[0]
                for j, b in B.items():
                    k = row[j]
                    acc[k] = (acc.get(k, 0) + x * b[0]) % mod
            return
        for i, a in A.items():
            row = table[i]
            for j, b in B.items():
                k = row[j]
                prod = F.mul_raw(a, b, W)
                prev = acc.get(k)
                acc[k] = prod if prev is None else tuple(x + y for x, y in zip(prev, prod))

    def finish(self, acc: dict) -> dict:
        F, W = self.F, self.work
        out = {}
        for k, v in acc.items():
            if F.n == 1:
                v = (v,)
            v = F.canon(v, W)
            if any(v):
                out[k] = v
        return out


def solve_commuting_series(
    L: TruncatedSeries,
    g: TruncatedSeries,
    h: TruncatedSeries,
    cap: int,
    prec: Optional[int] = None,
    order: str = "lex",
    check: bool = True,
) -> TruncatedSeries:
    """The unique phi = L mod deg 2 with g(phi) = phi(h(x_1), ..., h(x_n)).

    ``L`` is a linear form in the output variables, ``g`` and ``h`` are
    univariate with linear coefficient of valuation one. Degree k is solved
    from (g_1 - h_1^k) phi_k = [phi_<k(h) - g(phi_<k)]_k; the right side must
    be divisible by pi. ``order`` only permutes the monomials within a degree.
    """
    F = L.field
    if g.field != F or h.field != F:
        raise ValueError("series over different fields")
    if g.nvars != 1 or h.nvars != 1:
        raise ValueError("g and h must be univariate")
    if cap > min(g.cap, h.cap):
        raise CapTooSmall(f"cap {cap} exceeds the caps of g ({g.cap}) or h ({h.cap})")
    if any(sum(e) != 1 for e in L.terms):
        raise ValueError("L must be a linear form")
    work = min(g.prec, h.prec) if prec is None else min(prec, g.prec, h.prec)
    q = None
    if check:
        for s in (g, h):
            ok, why = is_admissible(s, check_linear=False)
            if not ok:
                raise NotAdmissible(why)
        q = F.q
    g1 = g.coefficient((1,)).at_prec(work)
    h1 = h.coefficient((1,)).at_prec(work)
    if g1.is_zero() or h1.is_zero() or g1.valuation().value != 1 or h1.valuation().value != 1:
        raise NotAdmissible("linear coefficients of g and h must have valuation one")

    nv = L.nvars
    basis = monomial_basis(nv, cap)
    H = _Hom(F, basis, work)
    idx = basis.index
    monos = basis.monos
    by_deg: list = [[] for _ in range(cap + 1)]
    for i, m in enumerate(monos):
        by_deg[sum(m)].append(i)
    if order == "revlex":
        by_deg = [list(reversed(x)) for x in by_deg]
    elif order != "lex":
        raise ValueError("order must be 'lex' or 'revlex'")

    phi: list = [dict() for _ in range(cap + 1)]
    lin_prec = L.prec
    for e, c in L.terms.items():
        phi[1][idx[e]] = F.canon(c, work)

    # h(x_i) for each variable, embedded in the output variables
    hs = []
    for v in range(nv):
        hs.append(h.rename((L.vars[v],)).embed(L.vars, [v]).at_prec(work).truncate(cap))
    hpow_cache: dict = {}
    one = TruncatedSeries.one(F, L.vars, cap, work)

    def h_power(v, k):
        key = (v, k)
        if key not in hpow_cache:
            hpow_cache[key] = one if k == 0 else h_power(v, k - 1).mul_trunc(hs[v], cap)
        return hpow_cache[key]

    hmono: dict = {}

    def h_mono(i):
        """Homogeneous parts of prod_v h(x_v)^{e_v}, keyed by degree."""
        if i in hmono:
            return hmono[i]
        e = monos[i]
        s = one
        for v, k in enumerate(e):
            if k:
                s = s.mul_trunc(h_power(v, k), cap)
        parts: dict = {}
        for m, c in s.terms.items():
            parts.setdefault(sum(m), {})[idx[m]] = c
        hmono[i] = parts
        return parts

    g_terms = {k: F.canon(c, work) for (k,), c in g.terms.items() if 2 <= k <= cap}
    gdeg = max(g_terms, default=1)
    # pw[i][k]: degree-k part of phi^i
    pw: dict = {1: phi}
    for i in range(2, gdeg + 1):
        pw[i] = [dict() for _ in range(cap + 1)]
    for k in range(2, cap + 1):
        for i in range(2, min(k, gdeg) + 1):
            acc: dict = {}
            for s in range(1, k - i + 2):
                if phi[s] and pw[i - 1][k - s]:
                    H.mul(phi[s], pw[i - 1][k - s], acc)
            pw[i][k] = H.finish(acc)
        # numerator: phi_<k(h)_k - g(phi_<k)_k
        num: dict = {}
        for j in range(1, k):
            for i, c in phi[j].items():
                part = h_mono(i).get(k)
                if part:
                    for t, hc in part.items():
                        prod = F.mul_raw(c, hc, work)
                        prev = num.get(t)
                        num[t] = prod if prev is None else tuple(x + y for x, y in zip(prev, prod))
        for i, gc in g_terms.items():
            if i > k:
                continue
            for t, pc in pw[i][k].items():
                prod = F.mul_raw(gc, pc, work)
                prev = num.get(t)
                num[t] = tuple(-x for x in prod) if prev is None else tuple(x - y for x, y in zip(prev, prod))
        div = g1 - h1 ** k
        unit = div.divide_exact(OFElem(F, F.pi_raw_exact, work))
        unit_inv = F.canon(unit.inverse().lift(work).raw, work)
        for t in by_deg[k]:
            c = num.get(t)
            if c is None:
                continue
            c = F.canon(c, work)
            if not any(c):
                continue
            if any(F.residue_raw(c)):
                raise IntegralityViolation(
                    f"degree {k} coefficient at {monos[t]} is not divisible by the uniformizer"
                )
            quo = F.div_pi_raw(c, work)
            val = F.canon(F.mul_raw(quo, unit_inv, work), work)
            if any(val):
                phi[k][t] = val

    profile = precision_profile(cap, work, lin_prec, q)
    out_prec = min(profile[1:])
    if out_prec < 1:
        raise PrecisionExhausted(
            f"working precision {work} leaves no certified digits at cap {cap}"
        )
    terms = {monos[i]: c for part in phi for i, c in part.items()}
    return TruncatedSeries(F, L.vars, cap, out_prec, terms)


def guard_digits(q: int, cap: int) -> int:
    """Digits lost by the solver at the given cap for admissible inputs.

    Degree m q^j with m >= 2 loses j + 1 digits and q^j loses j, so this is
    max(1 + floor(log_q(cap/2)), floor(log_q cap)) for cap >= 2.
    """
    if cap < 2:
        return 0
    work = 1 << 20
    return work - min(precision_profile(cap, work, work, q)[1:])


class LTGroup:
    """A Lubin-Tate series f for the uniformizer of ``field``, with caches.

    ``cap`` is the default total-degree cap and ``prec`` the working
    precision; solver outputs carry ``prec - guard_digits`` digits.
    """

    def __init__(
        self,
        field: LocalFieldSpec,
        f,
        cap: int = 16,
        prec: Optional[int] = None,
        polynomial: Optional[bool] = None,
        kind: str = "explicit",
    ):
        self.field = field
        self.cap = int(cap)
        self.prec = field.prec if prec is None else int(prec)
        self.kind = kind
        if isinstance(f, TruncatedSeries):
            if polynomial is None:
                polynomial = False
            self._f_terms = {e: c for e, c in f.terms.items()}
            self._f_cap = f.cap
            self._f_prec = f.prec
        else:
            coeffs = list(f)
            if polynomial is None:
                polynomial = True
            s = TruncatedSeries.from_coeffs(field, coeffs, cap=len(coeffs) - 1, prec=self.prec)
            self._f_terms = dict(s.terms)
            self._f_cap = len(coeffs) - 1
            self._f_prec = self.prec
        self.polynomial = polynomial
        self.degree = max((e[0] for e in self._f_terms), default=0)
        ok, why = is_admissible(self.f_series(max(self.field.q, min(self.cap, self._f_cap if not polynomial else self.cap))))
        if not ok:
            raise NotAdmissible(why)
        self._law: dict = {}
        self._endo: dict = {}
        self._iter: dict = {}

    # ---- constructors ---------------------------------------------------------------
    @classmethod
    def standard(cls, field: LocalFieldSpec, cap: int = 16, prec: Optional[int] = None) -> "LTGroup":
        """f = pi*X + X^q."""
        q = field.q
        coeffs = [0] * (q + 1)
        coeffs[1] = OFElem(field, field.pi_raw_exact, field.prec if prec is None else prec)
        coeffs[q] = 1
        return cls(field, coeffs, cap=cap, prec=prec, polynomial=True, kind="standard")

    @classmethod
    def cyclotomic(cls, field: LocalFieldSpec, cap: int = 16, prec: Optional[int] = None) -> "LTGroup":
        """f = (1+X)^p - 1, for F = Q_p with uniformizer p."""
        if not field.is_qp:
            raise NotAdmissible("the cyclotomic choice needs F = Q_p with uniformizer p")
        from math import comb

        p = field.p
        coeffs = [comb(p, k) for k in range(p + 1)]
        coeffs[0] = 0
        return cls(field, coeffs, cap=cap, prec=prec, polynomial=True, kind="cyclotomic")

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def uniformizer(self) -> OFElem:
        return OFElem(self.field, self.field.pi_raw_exact, self.prec)

    def __repr__(self):
        return f"LTGroup({self.kind}, f={self.f_series(self.degree if self.polynomial else self._f_cap).to_string()}, cap={self.cap}, prec={self.prec})"

    # ---- the series f --------------------------------------------------------------------
    def f_series(self, cap: Optional[int] = None, var: str = "X") -> TruncatedSeries:
        cap = self.cap if cap is None else cap
        if not self.polynomial and cap > self._f_cap:
            raise CapTooSmall(f"f is only known to degree {self._f_cap}")
        prec = min(self.prec, self._f_prec)
        return TruncatedSeries(self.field, (var,), cap, prec, {e: c for e, c in self._f_terms.items() if e[0] <= cap})

    def f_coeffs(self) -> list:
        s = self.f_series(self.degree if self.polynomial else self._f_cap)
        return [s.coefficient((k,)) for k in range(s.cap + 1)]

    def certified_prec(self, cap: int) -> int:
        return self.prec - guard_digits(self.q, cap)

    # ---- F_f --------------------------------------------------------------------------------
    def group_law(self, cap: Optional[int] = None) -> TruncatedSeries:
        cap = self.cap if cap is None else cap
        if cap not in self._law:
            F = self.field
            L = TruncatedSeries(F, ("X", "Y"), 1, self.prec, {(1, 0): 1, (0, 1): 1})
            f = self.f_series(cap)
            self._law[cap] = solve_commuting_series(L, f, f, cap, prec=self.prec)
        return self._law[cap]

    # ---- [a] --------------------------------------------------------------------------------
    def _coerce_scalar(self, a) -> OFElem:
        F = self.field
        if isinstance(a, OFElem):
            if a.shift < 0:
                raise ValueError("endomorphisms need a in O_F")
            return a.at_prec(min(a.prec, self.prec))
        if isinstance(a, Fraction):
            x = OFElem.from_rational(F, a, self.prec)
            if x.shift < 0:
                raise ValueError("endomorphisms need a in O_F")
            return x
        return OFElem(F, F.int_raw(int(a)), self.prec)

    def endo(self, a, cap: Optional[int] = None, var: str = "T") -> TruncatedSeries:
        cap = self.cap if cap is None else cap
        a = self._coerce_scalar(a)
        key = (a.raw, a.prec, cap)
        if key not in self._endo:
            F = self.field
            L = TruncatedSeries(F, ("T",), 1, a.prec, {(1,): a.raw})
            f = self.f_series(cap)
            self._endo[key] = solve_commuting_series(L, f, f, cap, prec=self.prec)
        s = self._endo[key]
        return s if var == "T" else s.rename((var,))

    # ---- iterates ----------------------------------------------------------------------------
    def iterate(self, m: int, cap: Optional[int] = None, var: str = "X") -> TruncatedSeries:
        """f composed with itself m times."""
        if m < 0:
            raise ValueError("m must be >= 0")
        q = self.q
        if cap is None:
            cap = q**m if self.polynomial and self.degree == q else self.cap
        if q**m > cap:
            raise CapTooSmall(f"f^{m} has degree q^m = {q**m}, above the cap {cap}")
        key = (m, cap)
        if key not in self._iter:
            F = self.field
            result = TruncatedSeries.variable(F, (var,), var, cap, self.prec)
            f = self.f_series(cap, var)
            for _ in range(m):
                result = f.compose([result], cap=cap)
            self._iter[key] = result
        s = self._iter[key]
        return s if s.vars == (var,) else s.rename((var,))

    # ---- verification -------------------------------------------------------------------------
    def verify_axioms(self, cap: Optional[int] = None, a_values: Sequence = (2, 3, 5, -1), law: Optional[TruncatedSeries] = None) -> dict:
        cap = self.cap if cap is None else cap
        return verify_axioms(self, cap, a_values, law)


def _compare(name: str, lhs: TruncatedSeries, rhs: TruncatedSeries, **extra) -> dict:
    diff = lhs.first_difference(rhs)
    entry = {
        "check": name,
        "status": "pass" if diff is None else "fail",
        "cap": min(lhs.cap, rhs.cap),
        "prec": min(lhs.prec, rhs.prec),
        "first_failure": None,
    }
    if diff is not None:
        F = lhs.field
        P = entry["prec"]
        zero = F.zero_raw()
        entry["first_failure"] = {
            "exponent": list(diff),
            "degree": sum(diff),
            "lhs": OFElem(F, lhs.terms.get(diff, zero), P).to_json(),
            "rhs": OFElem(F, rhs.terms.get(diff, zero), P).to_json(),
        }
    entry.update(extra)
    return entry


def _scalar_label(a) -> str:
    if isinstance(a, OFElem):
        return str(a.to_int()) if a.field.n == 1 else str(list(a.raw))
    return str(a)


def verify_axioms(G: LTGroup, cap: int, a_values: Sequence = (2, 3, 5, -1), law: Optional[TruncatedSeries] = None) -> dict:
    """Report on the formal A-module identities, each with its first failing coefficient."""
    F = G.field
    P = law if law is not None else G.group_law(cap)
    P = P.truncate(cap)
    prec = P.prec
    f = G.f_series(cap).at_prec(prec)
    V2 = ("X", "Y")
    V3 = ("X", "Y", "Z")
    X, Y = (TruncatedSeries.variable(F, V2, v, cap, prec) for v in V2)
    zero2 = TruncatedSeries.zero(F, V2, cap, prec)
    X3, Y3, Z3 = (TruncatedSeries.variable(F, V3, v, cap, prec) for v in V3)
    checks = []

    checks.append(_compare("identity_left", P.compose([X, zero2]), X))
    checks.append(_compare("identity_right", P.compose([zero2, Y]), Y))
    checks.append(_compare("commutativity", P, P.compose([Y, X])))
    P3xy = P.embed(V3, [0, 1])
    P3yz = P.embed(V3, [1, 2])
    checks.append(_compare("associativity", P.compose([P3xy, Z3]), P.compose([X3, P3yz])))
    fX = f.embed(V2, [0])
    fY = f.embed(V2, [1])
    checks.append(_compare("f_equivariance", f.compose([P]), P.compose([fX, fY])))

    T = ("T",)
    endos = {}
    for a in a_values:
        endos[_scalar_label(a)] = (a, G.endo(a, cap).at_prec(prec))
    fT = f.rename(T)
    for la, (a, ea) in endos.items():
        checks.append(_compare(f"endo_commutes_with_f[{la}]", fT.compose([ea]), ea.compose([fT])))
        eaX = ea.embed(V2, [0])
        eaY = ea.embed(V2, [1])
        checks.append(_compare(f"endo_homomorphism[{la}]", ea.compose([P]), P.compose([eaX, eaY])))
    labels = list(endos)
    for la in labels:
        for lb in labels:
            a, ea = endos[la]
            b, eb = endos[lb]
            ab = G._coerce_scalar(a) * G._coerce_scalar(b)
            eab = G.endo(ab, cap).at_prec(prec)
            checks.append(_compare(f"endo_product[{la},{lb}]", ea.compose([eb]), eab))
            apb = G._coerce_scalar(a) + G._coerce_scalar(b)
            eapb = G.endo(apb, cap).at_prec(prec)
            P1 = P.rename(("T", "S"))
            checks.append(_compare(f"endo_sum[{la},{lb}]", P1.compose([ea, eb]), eapb))
    checks.sort(key=lambda c: c["check"])
    failed = [c["check"] for c in checks if c["status"] != "pass"]
    return {
        "group": G.kind,
        "cap": cap,
        "prec": prec,
        "status": "pass" if not failed else "fail",
        "failed": failed,
        "checks": checks,
    }


def tamper(series: TruncatedSeries, exps, delta: int = 1) -> TruncatedSeries:
    """Copy of ``series`` with ``delta`` added to one coefficient (negative control)."""
    F = series.field
    exps = tuple(exps)
    terms = dict(series.terms)
    old = terms.get(exps, F.zero_raw())
    terms[exps] = (old[0] + delta,) + tuple(old[1:])
    return TruncatedSeries(F, series.vars, series.cap, series.prec, terms)


def lt_isomorphism(G: LTGroup, G2: LTGroup, cap: Optional[int] = None) -> TruncatedSeries:
    """theta = X mod deg 2 with f2(theta) = theta(f), for two series sharing the uniformizer."""
    if G.field != G2.field:
        raise ValueError("groups over different fields")
    cap = min(G.cap, G2.cap) if cap is None else cap
    F = G.field
    prec = min(G.prec, G2.prec)
    L = TruncatedSeries(F, ("X",), 1, prec, {(1,): 1})
    return solve_commuting_series(L, G2.f_series(cap), G.f_series(cap), cap, prec=prec)


def verify_isomorphism(G: LTGroup, G2: LTGroup, theta: TruncatedSeries, a_values: Sequence = (2, -1)) -> dict:
    """theta(F_f(X,Y)) = F_f2(theta X, theta Y) and theta o [a]_f = [a]_f2 o theta."""
    cap = theta.cap
    P1 = G.group_law(cap)
    P2 = G2.group_law(cap)
    prec = min(P1.prec, P2.prec, theta.prec)
    th = theta.at_prec(prec)
    V2 = ("X", "Y")
    tX = th.embed(V2, [0])
    tY = th.embed(V2, [1])
    checks = [
        _compare("f_intertwined", G2.f_series(cap).compose([th]), th.compose([G.f_series(cap)])),
        _compare("homomorphism", th.compose([P1.at_prec(prec)]), P2.at_prec(prec).compose([tX, tY])),
    ]
    thT = th.rename(("T",))
    for a in a_values:
        e1 = G.endo(a, cap).at_prec(prec)
        e2 = G2.endo(a, cap).at_prec(prec)
        checks.append(_compare(f"endo_intertwined[{_scalar_label(a)}]", thT.compose([e1]), e2.compose([thT])))
    checks.sort(key=lambda c: c["check"])
    failed = [c["check"] for c in checks if c["status"] != "pass"]
    return {"cap": cap, "prec": prec, "status": "pass" if not failed else "fail", "failed": failed, "checks": checks}
