"""Truncated multivariate power series over O_F.

A series is known up to total degree ``cap`` and modulo ``pi^prec``; terms
live in a sparse map from exponent tuples to raw O_F vectors.
"""
from __future__ import annotations

from functools import cached_property, lru_cache
from itertools import combinations_with_replacement
from typing import Optional, Sequence

import numpy as np

from . import kernel
from .errors import CapTooSmall, NonUnitLinearTerm, NonzeroConstantInComposition
from .padic import LocalFieldSpec, OFElem

_TABLE_LIMIT = 1500  # monomials; above this the graded product uses tuple arithmetic


def mono_key(exps: tuple):
    """Sort key: total degree, then lexicographic with the first variable largest."""
    return (sum(exps), tuple(-e for e in exps))


class MonomialBasis:
    """All monomials of total degree <= cap in ``nvars`` variables, graded order."""

    def __init__(self, nvars: int, cap: int):
        self.nvars = nvars
        self.cap = cap
        monos = []
        for k in range(cap + 1):
            for combo in combinations_with_replacement(range(nvars), k):
                e = [0] * nvars
                for v in combo:
                    e[v] += 1
                monos.append(tuple(e))
        monos.sort(key=mono_key)
        self.monos = monos
        self.index = {m: i for i, m in enumerate(monos)}
        self.deg = [sum(m) for m in monos]
        self.size = len(monos)

    @cached_property
    def add_table(self):
        if self.size > _TABLE_LIMIT:
            return _LazyAddTable(self)
        idx = self.index
        cap = self.cap
        table = []
        for a in self.monos:
            da = sum(a)
            row = []
            for b in self.monos:
                if da + sum(b) > cap:
                    row.append(-1)
                else:
                    row.append(idx[tuple(x + y for x, y in zip(a, b))])
            table.append(row)
        return table

    @cached_property
    def np_add_table(self):
        if self.size > _TABLE_LIMIT:
            return None
        return np.array(self.add_table, dtype=np.int32)

    @cached_property
    def np_deg(self):
        return np.array(self.deg, dtype=np.int32)


class _LazyAddTable:
    """Row access computing monomial sums on demand (large bases)."""

    def __init__(self, basis):
        self.basis = basis

    def __getitem__(self, i):
        return _LazyRow(self.basis, self.basis.monos[i])


class _LazyRow:
    def __init__(self, basis, mono):
        self.basis = basis
        self.mono = mono

    def __getitem__(self, j):
        s = tuple(x + y for x, y in zip(self.mono, self.basis.monos[j]))
        return self.basis.index.get(s, -1)


@lru_cache(maxsize=128)
def monomial_basis(nvars: int, cap: int) -> MonomialBasis:
    return MonomialBasis(nvars, cap)


class TruncatedSeries:
    """Power series in ``vars`` over O_F, exact up to degree ``cap`` and mod pi^prec."""

    __slots__ = ("field", "vars", "cap", "prec", "terms", "__dict__")

    def __init__(self, field: LocalFieldSpec, vars: Sequence[str], cap: int, prec: int, terms: dict, _canonical=False):
        self.field = field
        self.vars = tuple(vars)
        self.cap = int(cap)
        self.prec = int(prec)
        if _canonical:
            self.terms = terms
            return
        nv = len(self.vars)
        out = {}
        canon = field.canon
        for e, c in terms.items():
            e = tuple(e)
            if len(e) != nv:
                raise ValueError(f"exponent {e} does not match variables {self.vars}")
            if sum(e) > self.cap:
                continue
            if isinstance(c, OFElem):
                if c.shift < 0:
                    raise ValueError("series coefficients must be integral")
                c = c.raw
            elif isinstance(c, int):
                c = field.int_raw(c)
            c = canon(c, self.prec)
            if any(c):
                out[e] = c
        self.terms = out

    # ---- constructors -----------------------------------------------------------------
    @classmethod
    def zero(cls, field, vars, cap, prec):
        return cls(field, vars, cap, prec, {}, _canonical=True)

    @classmethod
    def one(cls, field, vars, cap, prec):
        return cls(field, vars, cap, prec, {(0,) * len(vars): 1})

    @classmethod
    def variable(cls, field, vars, name, cap, prec):
        vars = tuple(vars)
        e = [0] * len(vars)
        e[vars.index(name)] = 1
        return cls(field, vars, cap, prec, {tuple(e): 1})

    @classmethod
    def from_coeffs(cls, field, coeffs: Sequence, var="T", cap=None, prec=None):
        """Univariate series from a coefficient list, lowest degree first."""
        prec = field.prec if prec is None else prec
        cap = len(coeffs) - 1 if cap is None else cap
        return cls(field, (var,), cap, prec, {(i,): c for i, c in enumerate(coeffs) if i <= cap})

    # ---- access -------------------------------------------------------------------------
    @property
    def nvars(self) -> int:
        return len(self.vars)

    @property
    def basis(self) -> MonomialBasis:
        return monomial_basis(self.nvars, self.cap)

    def coefficient(self, exps) -> OFElem:
        if isinstance(exps, int):
            exps = (exps,)
        exps = tuple(exps)
        if sum(exps) > self.cap:
            raise CapTooSmall(f"degree {sum(exps)} exceeds cap {self.cap}")
        raw = self.terms.get(exps, self.field.zero_raw())
        return OFElem(self.field, raw, self.prec)

    def __getitem__(self, exps) -> OFElem:
        return self.coefficient(exps)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: mono_key(kv[0]))

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def low_degree(self) -> Optional[int]:
        return min((sum(e) for e in self.terms), default=None)

    def homogeneous(self, k: int) -> "TruncatedSeries":
        return TruncatedSeries(
            self.field, self.vars, self.cap, self.prec,
            {e: c for e, c in self.terms.items() if sum(e) == k}, _canonical=True,
        )

    def truncate(self, cap: int) -> "TruncatedSeries":
        cap = min(cap, self.cap)
        return TruncatedSeries(
            self.field, self.vars, cap, self.prec,
            {e: c for e, c in self.terms.items() if sum(e) <= cap}, _canonical=True,
        )

    def at_prec(self, prec: int) -> "TruncatedSeries":
        prec = min(prec, self.prec)
        return TruncatedSeries(self.field, self.vars, self.cap, prec, self.terms)

    def with_cap(self, cap: int) -> "TruncatedSeries":
        """Reinterpret a polynomial at a larger cap (only valid for exact polynomials)."""
        return TruncatedSeries(self.field, self.vars, cap, self.prec, self.terms, _canonical=cap >= self.cap)

    def rename(self, vars) -> "TruncatedSeries":
        return TruncatedSeries(self.field, vars, self.cap, self.prec, self.terms, _canonical=True)

    def embed(self, vars, positions) -> "TruncatedSeries":
        """View as a series in a larger variable set; ``positions[i]`` is the slot of own variable i."""
        nv = len(vars)
        terms = {}
        for e, c in self.terms.items():
            ne = [0] * nv
            for i, k in enumerate(e):
                ne[positions[i]] += k
            terms[tuple(ne)] = c
        return TruncatedSeries(self.field, vars, self.cap, self.prec, terms, _canonical=True)

    def to_univariate_list(self) -> list:
        if self.nvars != 1:
            raise ValueError("not a univariate series")
        out = [self.field.zero_raw()] * (self.cap + 1)
        for (k,), c in self.terms.items():
            out[k] = c
        return out

    # ---- arithmetic ---------------------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, TruncatedSeries):
            raise TypeError("expected a TruncatedSeries")
        if other.field != self.field or other.vars != self.vars:
            raise ValueError("incompatible series (field or variables differ)")

    def __add__(self, other):
        if isinstance(other, (int, OFElem)):
            other = TruncatedSeries(self.field, self.vars, self.cap, self.prec, {(0,) * self.nvars: other})
        self._check(other)
        cap = min(self.cap, other.cap)
        prec = min(self.prec, other.prec)
        terms = {e: c for e, c in self.terms.items() if sum(e) <= cap}
        for e, c in other.terms.items():
            if sum(e) <= cap:
                terms[e] = tuple(x + y for x, y in zip(terms[e], c)) if e in terms else c
        return TruncatedSeries(self.field, self.vars, cap, prec, terms)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(self.field, self.vars, self.cap, self.prec, {e: tuple(-x for x in c) for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, OFElem)):
            return self + (-other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "TruncatedSeries":
        F = self.field
        if isinstance(c, int):
            c = OFElem(F, F.int_raw(c), self.prec)
        if c.shift < 0:
            raise ValueError("scalar must be integral")
        prec = min(self.prec, c.prec)
        cr = F.canon(c.raw, prec)
        return TruncatedSeries(F, self.vars, self.cap, prec, {e: F.mul_raw(v, cr, prec) for e, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, OFElem)):
            return self.scale(other)
        self._check(other)
        la = self.low_degree()
        lb = other.low_degree()
        prec = min(self.prec, other.prec)
        if la is None or lb is None:
            return TruncatedSeries.zero(self.field, self.vars, min(self.cap + (lb or 0), other.cap + (la or 0)), prec)
        cap = min(self.cap + lb, other.cap + la)
        return _mul(self, other, cap, prec)

    __rmul__ = __mul__

    def mul_trunc(self, other, cap: int) -> "TruncatedSeries":
        """Product truncated at ``cap`` (never beyond what the inputs justify)."""
        la = self.low_degree()
        lb = other.low_degree()
        prec = min(self.prec, other.prec)
        if la is None or lb is None:
            return TruncatedSeries.zero(self.field, self.vars, cap, prec)
        cap = min(cap, self.cap + lb, other.cap + la)
        return _mul(self, other, cap, prec)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a series")
        result = TruncatedSeries.one(self.field, self.vars, self.cap, self.prec)
        for _ in range(k):
            result = result * self
        return result

    # ---- composition --------------------------------------------------------------------
    def compose(self, inners: Sequence["TruncatedSeries"], cap: Optional[int] = None, power_cache: Optional[dict] = None) -> "TruncatedSeries":
        """Substitute ``inners[i]`` for variable i. Inners share variables and have no constant term."""
        if len(inners) != self.nvars:
            raise ValueError("need one inner series per variable")
        base = inners[0]
        for s in inners:
            if s.field != self.field or s.vars != base.vars:
                raise ValueError("inner series must share field and variables")
            if (0,) * s.nvars in s.terms:
                raise NonzeroConstantInComposition("inner series has a nonzero constant term")
        lows = [s.low_degree() for s in inners]
        L = min((x for x in lows if x is not None), default=self.cap + 1)
        out_cap = min([s.cap for s in inners] + [(self.cap + 1) * L - 1])
        if cap is not None:
            out_cap = min(out_cap, cap)
        prec = min([self.prec] + [s.prec for s in inners])
        F = self.field
        if power_cache is None:
            power_cache = {}
        one = TruncatedSeries.one(F, base.vars, out_cap, prec)

        def power(v, k):
            key = (v, k)
            if key not in power_cache:
                if k == 0:
                    power_cache[key] = one
                else:
                    power_cache[key] = power(v, k - 1).mul_trunc(inners[v], out_cap)
            return power_cache[key]

        prefix: dict = {}

        def mono(e):
            if e in prefix:
                return prefix[e]
            last = max(i for i, k in enumerate(e) if k) if any(e) else -1
            if last < 0:
                r = one
            else:
                rest = e[:last] + (0,) * (len(e) - last)
                r = power(last, e[last])
                if any(rest):
                    r = mono(rest).mul_trunc(r, out_cap)
            prefix[e] = r
            return r

        acc: dict = {}
        for e, c in self.terms.items():
            if sum(e) * L > out_cap:
                continue
            m = mono(e)
            for me, mc in m.terms.items():
                prod = F.mul_raw(c, mc, prec)
                if me in acc:
                    acc[me] = tuple(x + y for x, y in zip(acc[me], prod))
                else:
                    acc[me] = prod
        return TruncatedSeries(F, base.vars, out_cap, prec, acc)

    def __call__(self, *inners, cap=None):
        return self.compose(inners, cap=cap)

    def reversion(self) -> "TruncatedSeries":
        """Compositional inverse of a univariate series with unit linear coefficient."""
        if self.nvars != 1:
            raise ValueError("reversion needs a univariate series")
        F = self.field
        if (0,) in self.terms:
            raise NonzeroConstantInComposition("series has a nonzero constant term")
        a1 = self.coefficient((1,))
        if not a1.is_unit():
            raise NonUnitLinearTerm("linear coefficient is not a unit")
        a1_inv = a1.inverse()
        g = TruncatedSeries(F, self.vars, self.cap, self.prec, {(1,): a1_inv})
        for k in range(2, self.cap + 1):
            comp = self.compose([g], cap=k, power_cache=None)
            ck = comp.coefficient((k,))
            if ck.is_zero():
                continue
            terms = dict(g.terms)
            terms[(k,)] = (-(ck * a1_inv)).raw
            g = TruncatedSeries(F, self.vars, self.cap, self.prec, terms)
        return g

    # ---- comparison ---------------------------------------------------------------------
    def first_difference(self, other) -> Optional[tuple]:
        """Smallest (graded order) exponent where the series differ, at common cap and precision."""
        self._check(other)
        cap = min(self.cap, other.cap)
        prec = min(self.prec, other.prec)
        F = self.field
        zero = F.zero_raw()
        keys = sorted({e for e in list(self.terms) + list(other.terms) if sum(e) <= cap}, key=mono_key)
        for e in keys:
            a = F.canon(self.terms.get(e, zero), prec)
            b = F.canon(other.terms.get(e, zero), prec)
            if a != b:
                return e
        return None

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return self.first_difference(other) is None

    __hash__ = None

    def __repr__(self):
        return f"TruncatedSeries({self.to_string()} + O(deg {self.cap + 1}), prec={self.prec})"

    def to_string(self, signed: bool = True) -> str:
        F = self.field
        parts = []
        for e, c in self.sorted_terms():
            if F.n == 1:
                v = c[0]
                m = F.coord_moduli(self.prec)[0]
                if signed and v > m // 2:
                    v -= m
                cs = str(v)
            else:
                cs = "[" + ",".join(map(str, c)) + "]"
            mon = "*".join(
                (name if k == 1 else f"{name}^{k}") for name, k in zip(self.vars, e) if k
            )
            if not mon:
                parts.append(cs)
            elif cs == "1":
                parts.append(mon)
            elif cs == "-1":
                parts.append("-" + mon)
            else:
                parts.append(f"{cs}*{mon}")
        s = " + ".join(parts) if parts else "0"
        return s.replace("+ -", "- ")

    # ---- serialization --------------------------------------------------------------------
    def to_json(self) -> dict:
        return {
            "vars": list(self.vars),
            "cap": self.cap,
            "terms": [
                {"e": list(e), "c": OFElem(self.field, c, self.prec).to_json()}
                for e, c in self.sorted_terms()
            ],
        }

    @classmethod
    def from_json(cls, field, obj) -> "TruncatedSeries":
        terms = {}
        prec = None
        for t in obj["terms"]:
            c = OFElem.from_json(field, t["c"])
            prec = c.prec if prec is None else min(prec, c.prec)
            terms[tuple(t["e"])] = c.raw
        if prec is None:
            prec = int(obj.get("prec", field.prec))
        return cls(field, obj["vars"], obj["cap"], prec, terms)


def _mul(a: TruncatedSeries, b: TruncatedSeries, cap: int, prec: int) -> TruncatedSeries:
    F = a.field
    basis = monomial_basis(a.nvars, cap)
    idx = basis.index
    ia = {idx[e]: c for e, c in a.terms.items() if sum(e) <= cap}
    ib = {idx[e]: c for e, c in b.terms.items() if sum(e) <= cap}
    mod = F.modulus(prec)
    out = kernel.mul_graded(ia, ib, basis, F.table_mod(mod), mod, F.n)
    monos = basis.monos
    canon = F.canon
    terms = {}
    for k, c in out.items():
        c = canon(c, prec)
        if any(c):
            terms[monos[k]] = c
    return TruncatedSeries(F, a.vars, cap, prec, terms, _canonical=True)
