"""The ``lt`` command line driver.

Every subcommand prints one canonical JSON object (sorted keys, no
whitespace) and exits 0 on success, 1 when a verification fails or a
computation raises a library error, 2 on usage errors.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from typing import Optional

from .errors import LubinTateError

SCHEMA_VERSION = 1

COMMANDS = [
    "group-law",
    "endo",
    "iterate",
    "verify-axioms",
    "iso",
    "eisenstein",
    "torsion-check",
    "galois",
    "norm",
    "reciprocity",
    "af-frobenius",
    "af-gamma",
    "ve",
    "solve-modp",
    "lt4",
    "lt5",
    "descend",
]

DEFAULTS = {
    "p": 2,
    "d": 1,
    "modulus": None,
    "eisenstein": None,
    "f": "standard",
    "f2": "cyclotomic",
    "prec": None,
    "deg": 8,
    "window": "-8,24",
    "level": 1,
    "a": "3",
    "u": "5",
    "m": 1,
    "seed": 0,
    "x": None,
    "kl": 1,
    "char": None,
    "additive": False,
}

# precision used when --prec is absent
PREC_DEFAULTS = {
    "torsion-check": 6,
    "galois": 6,
    "norm": 6,
    "reciprocity": 6,
    "af-frobenius": 8,
    "af-gamma": 8,
    "lt5": 8,
    "descend": 8,
}


class UsageError(Exception):
    def __init__(self, message: str, flag: Optional[str] = None):
        super().__init__(message)
        self.flag = flag


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        flag = None
        for tok in message.replace(",", " ").split():
            if tok.startswith("--"):
                flag = tok.rstrip(":")
                break
        if flag is None and "COMMAND" in message:
            flag = "COMMAND"
        raise UsageError(message, flag)


def load_schema(name: str) -> dict:
    """The published JSON schema of a subcommand (or ``error``)."""
    from importlib.resources import files

    return json.loads(files("lubintate").joinpath("schemas", f"{name}.json").read_text())


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("field and group")
    g.add_argument("--p", type=int)
    g.add_argument("--d", type=int, help="residue degree of F over Q_p")
    g.add_argument("--modulus", help="comma separated coefficients of the residue modulus, lowest first")
    g.add_argument("--eisenstein", help="comma separated coefficients of the Eisenstein polynomial, lowest first")
    g.add_argument("--f", help="standard | cyclotomic | comma separated coefficients of f")
    g.add_argument("--f2", help="second series for iso")
    g.add_argument("--prec", type=int, help="coefficient precision N (pi-adic digits)")
    g.add_argument("--deg", type=int, help="total degree cap D")
    g.add_argument("--window", help="lo,hi exponent window for A_F elements")
    g.add_argument("--level", type=int, help="character level for descend")
    g.add_argument("--a", help="scalar a (integer or fraction)")
    g.add_argument("--u", help="unit u for reciprocity")
    g.add_argument("--m", type=int, help="tower level, iterate count, or cyclotomic level of L for lt5")
    g.add_argument("--seed", type=int)
    g.add_argument("--x", help="JSON input element instead of a seeded random one")
    g.add_argument("--kl", type=int, help="degree of k_L over k_F for lt4")
    g.add_argument("--char", type=int, help="index of a single character for descend")
    g.add_argument("--additive", action="store_true", default=None, help="additive form of lt4")
    g.add_argument("--config", help="JSON file with flag values; flags override it")
    g.add_argument("--out", help="write a transcript of inputs and output to this file")
    parser = _Parser(prog="lt", description="Lubin-Tate formal groups and rank-one (phi, Gamma)-modules")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def resolve_config(ns: argparse.Namespace) -> dict:
    cfg = {}
    if ns.config:
        try:
            with open(ns.config) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}", "--config")
        if not isinstance(loaded, dict):
            raise UsageError("config must be a JSON object", "--config")
        for k, v in loaded.items():
            key = k.lstrip("-").replace("-", "_")
            if key not in DEFAULTS:
                raise UsageError(f"unknown config key {k!r}", "--config")
            cfg[key] = v
    out = {}
    for key, default in DEFAULTS.items():
        v = getattr(ns, key, None)
        if v is None:
            v = cfg.get(key, default)
        out[key] = v
    if out["prec"] is None:
        out["prec"] = PREC_DEFAULTS.get(ns.command, 16)
    return out


# ---- parsing helpers -------------------------------------------------------------------------


def _int_list(s, flag: str) -> Optional[list]:
    if s is None:
        return None
    if isinstance(s, list):
        return [int(c) for c in s]
    try:
        return [int(c) for c in str(s).split(",")]
    except ValueError:
        raise UsageError(f"{flag} expects comma separated integers", flag)


def _scalar(s, flag: str):
    try:
        v = Fraction(str(s))
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"{flag} expects an integer or a fraction", flag)
    return int(v) if v.denominator == 1 else v


def _window(s) -> tuple:
    try:
        lo, hi = (int(c) for c in str(s).split(","))
    except ValueError:
        raise UsageError("--window expects lo,hi", "--window")
    if lo > hi:
        raise UsageError("--window needs lo <= hi", "--window")
    return lo, hi


def _json_input(cfg: dict):
    try:
        return json.loads(cfg["x"])
    except (TypeError, json.JSONDecodeError):
        raise UsageError("--x expects a JSON object", "--x")


def make_field(cfg: dict, prec: Optional[int] = None):
    from .padic import make_local_field

    return make_local_field(
        int(cfg["p"]),
        int(cfg["d"]),
        _int_list(cfg["modulus"], "--modulus"),
        _int_list(cfg["eisenstein"], "--eisenstein"),
        precN=cfg["prec"] if prec is None else prec,
    )


def make_group(cfg: dict, F, which: str = "f", cap: Optional[int] = None):
    from .formal_group import LTGroup

    choice = cfg[which]
    cap = cfg["deg"] if cap is None else cap
    if choice == "standard":
        return LTGroup.standard(F, cap=cap)
    if choice == "cyclotomic":
        return LTGroup.cyclotomic(F, cap=cap)
    coeffs = _int_list(choice, f"--{which}")
    return LTGroup(F, coeffs, cap=cap)


def _series_out(s) -> dict:
    return {"series": s.to_json(), "string": s.to_string(), "prec": s.prec}


# ---- subcommands --------------------------------------------------------------------------------


def cmd_group_law(cfg):
    G = make_group(cfg, make_field(cfg))
    s = G.group_law(cfg["deg"])
    return _series_out(s), True


def cmd_endo(cfg):
    G = make_group(cfg, make_field(cfg))
    a = _scalar(cfg["a"], "--a")
    s = G.endo(a, cfg["deg"])
    out = _series_out(s)
    out["a"] = str(a)
    return out, True


def cmd_iterate(cfg):
    G = make_group(cfg, make_field(cfg))
    s = G.iterate(int(cfg["m"]), cap=cfg["deg"])
    out = _series_out(s)
    out["m"] = int(cfg["m"])
    return out, True


def cmd_verify_axioms(cfg):
    G = make_group(cfg, make_field(cfg))
    rep = G.verify_axioms(cfg["deg"])
    return rep, rep["status"] == "pass"


def cmd_iso(cfg):
    from .formal_group import lt_isomorphism, verify_isomorphism

    F = make_field(cfg)
    G1 = make_group(cfg, F, "f")
    G2 = make_group(cfg, F, "f2")
    theta = lt_isomorphism(G1, G2, cfg["deg"])
    rep = verify_isomorphism(G1, G2, theta)
    rep["theta"] = _series_out(theta)
    return rep, rep["status"] == "pass"


def _tower_group(cfg):
    # the tower needs the group's working precision above the tower's
    F = make_field(cfg, prec=cfg["prec"] + 6)
    return make_group(cfg, F)


def cmd_eisenstein(cfg):
    from .tower import eisenstein_step

    G = make_group(cfg, make_field(cfg), cap=max(cfg["deg"], make_field(cfg).q ** int(cfg["m"])))
    step = eisenstein_step(G, int(cfg["m"]))
    out = step.to_json()
    return out, bool(out["eisenstein"])


def cmd_torsion_check(cfg):
    from .tower import torsion_check

    G = _tower_group(cfg)
    rep = torsion_check(G, int(cfg["m"]), prec=cfg["prec"], seed=cfg["seed"])
    return rep, rep["status"] == "pass"


def cmd_galois(cfg):
    from .tower import TowerField, galois_apply, is_root

    G = _tower_group(cfg)
    T = TowerField(G, int(cfg["m"]), cfg["prec"])
    a = _scalar(cfg["a"], "--a")
    img = galois_apply(G, a, T.gen())
    root = is_root(T, img, img.prec)
    out = {"level": T.m, "a": str(a), "image": img.to_json(), "string": img.to_string(), "is_root": root}
    return out, root


def cmd_norm(cfg):
    from .padic import OFElem
    from .tower import TowerField, norm_to_base

    G = _tower_group(cfg)
    m = int(cfg["m"])
    T = TowerField(G, m, cfg["prec"])
    N = norm_to_base(T.gen())
    F = G.field
    pi = OFElem(F, F.pi_raw_exact, N.prec)
    # for q = 2 and m = 1 the norm of a root of f(X)/X is -pi
    sign = -1 if (G.q == 2 and m == 1) else 1
    expected = pi if sign == 1 else -pi
    ok = (N - expected).is_zero()
    out = {"level": m, "norm": N.to_json(), "expected_sign": sign, "matches": ok}
    if F.n == 1 and N.shift == 0:
        out["value"] = N.to_int()
    return out, ok


def cmd_reciprocity(cfg):
    from .tower import reciprocity_conjugacy

    G = _tower_group(cfg)
    rep = reciprocity_conjugacy(G, int(cfg["m"]), _scalar(cfg["u"], "--u"), prec=cfg["prec"])
    return rep, rep["status"] == "pass"


def _af_setup(cfg):
    from .rings import AFElem, AFRing

    lo, hi = _window(cfg["window"])
    N = cfg["prec"]
    F = make_field(cfg, prec=N + 8)
    G = make_group(cfg, F, cap=16)
    R = AFRing(G, N, lo_limit=min(lo, 0) - 4096, hi_default=hi)
    if cfg["x"] is not None:
        x = AFElem.from_json(R, _json_input(cfg))
    else:
        x = R.random(random.Random(cfg["seed"]), lo, hi, exact=False)
    return R, x


def cmd_af_frobenius(cfg):
    from .rings import EFRing, af_frobenius, ef_frobenius

    R, x = _af_setup(cfg)
    y = af_frobenius(x)
    E = EFRing(R.coef.residue, R.q)
    ok = y.reduce(E) == ef_frobenius(x.reduce(E))
    out = {"x": x.to_json(), "phi_x": y.to_json(), "reduction_is_q_power": ok}
    return out, ok


def cmd_af_gamma(cfg):
    from .rings import af_frobenius, af_gamma

    R, x = _af_setup(cfg)
    a = _scalar(cfg["a"], "--a")
    y = af_gamma(a, x)
    lhs = af_frobenius(y)
    rhs = af_gamma(a, af_frobenius(x))
    ok = lhs.first_difference(rhs) is None
    out = {"a": str(a), "x": x.to_json(), "sigma_a_x": y.to_json(), "commutes_with_phi": ok}
    return out, ok


def _ef_setup(cfg, kl: int = 1):
    from .ff import FiniteFieldSpec
    from .rings import EFElem, EFRing

    F = make_field(cfg)
    kF = F.residue
    k = kF if kl == 1 else FiniteFieldSpec(F.p, kF.d * kl)
    E = EFRing(k, kF.q)
    lo, hi = _window(cfg["window"])
    if cfg["x"] is not None:
        x = EFElem.from_json(E, _json_input(cfg))
    else:
        x = E.random(random.Random(cfg["seed"]), lo, hi)
    return E, x


def cmd_ve(cfg):
    from .rings import v_E

    E, x = _ef_setup(cfg)
    if x.is_zero():
        return {"x": x.to_json(), "v_E": "inf"}, True
    v = v_E(x)
    return {"x": x.to_json(), "v_E": str(v), "order": str(x.order()), "q": E.q}, True


def cmd_solve_modp(cfg):
    from .descent import solve_phi_fixed_modp

    E, x = _ef_setup(cfg)
    sol = solve_phi_fixed_modp(x)
    return sol.to_json(), sol.verified


def cmd_lt4(cfg):
    from .descent import lemma_LT4_solve_modp

    E, x = _ef_setup(cfg, int(cfg["kl"]))
    res = lemma_LT4_solve_modp(x, additive=bool(cfg["additive"]))
    return res.to_json(), res.verified


def cmd_lt5(cfg):
    from .descent import cyclotomic_data, descent_ring, lt5_certified, random_unit
    from .rings import AFElem

    p = int(cfg["p"])
    if int(cfg["d"]) != 1 or cfg["eisenstein"] is not None:
        raise UsageError("lt5 works over F = Q_p", "--d")
    zd = cyclotomic_data(p, int(cfg["m"]) if cfg["m"] is not None else 0, prec=cfg["prec"])
    R = descent_ring(zd, prec=cfg["prec"], hi=_window(cfg["window"])[1])
    if cfg["x"] is not None:
        beta = AFElem.from_json(R, _json_input(cfg))
    else:
        u = random_unit(R, random.Random(cfg["seed"]))
        beta = u**p
    res = lt5_certified(beta, p)
    out = res.to_json()
    out["field"] = {"p": p, "cyclotomic_level": zd.n, "degree": zd.field.e}
    return out, True


def cmd_descend(cfg):
    from .descent import (
        character_descent,
        descent_ring,
        enumerate_characters,
        forward_certificate,
        random_unit,
        rank1_module,
    )

    p = int(cfg["p"])
    if int(cfg["d"]) != 1 or cfg["eisenstein"] is not None:
        raise UsageError("descend works over F = Q_p", "--d")
    level = int(cfg["level"])
    chars = [(i, eta, zd) for i, (eta, zd) in enumerate(enumerate_characters(p, max_level=level)) if eta.level == level]
    if cfg["char"] is not None:
        chars = [c for c in chars if c[0] == int(cfg["char"])]
        if not chars:
            raise UsageError("no character with that index at this level", "--char")
    rings = {}
    records = []
    for i, eta, zd in chars:
        key = (zd.p, zd.n)
        if key not in rings:
            rings[key] = descent_ring(zd)
        R = rings[key]
        order = eta.order(zd)
        D = rank1_module(eta, R)
        u = random_unit(R, random.Random(cfg["seed"] * 1000 + i))
        D2, beta = forward_certificate(D, u, order)
        res = character_descent(D2, beta, order, zd)
        match = res.eta.same_on_units(eta)
        twist_ok = res.twist * eta.pi_value == res.twist.__class__.one(zd.field, res.twist.prec)
        rec = {
            "index": i,
            "order": order,
            "cyclotomic_level": zd.n,
            "eta": eta.to_json(),
            "recovered": res.eta.to_json(),
            "matches_on_units": match,
            "twist_inverts_eta_pi": twist_ok,
            "certified_prec": res.certified_prec,
            "windows": [s["window"] for s in res.transcript],
        }
        if cfg["char"] is not None:
            rec["descent"] = res.to_json()
        records.append(rec)
    ok = all(r["matches_on_units"] and r["twist_inverts_eta_pi"] for r in records)
    return {"p": p, "level": level, "characters": records, "status": "pass" if ok else "fail"}, ok


HANDLERS = {name: globals()["cmd_" + name.replace("-", "_")] for name in COMMANDS}


def run(argv) -> tuple:
    """(exit code, output object) without printing."""
    try:
        ns = build_parser().parse_args(argv)
        cfg = resolve_config(ns)
        result, ok = HANDLERS[ns.command](cfg)
        out = {"command": ns.command, "schema_version": SCHEMA_VERSION}
        out.update(result)
        code = 0 if ok else 1
    except UsageError as exc:
        return 2, {"error": "UsageError", "flag": exc.flag, "message": str(exc), "schema_version": SCHEMA_VERSION}
    except LubinTateError as exc:
        return 1, {"error": type(exc).__name__, "message": str(exc), "schema_version": SCHEMA_VERSION}
    except (ValueError, TypeError, KeyError) as exc:
        return 2, {"error": "UsageError", "flag": None, "message": str(exc), "schema_version": SCHEMA_VERSION}
    if ns.out:
        transcript = {"argv": list(argv), "config": cfg, "exit_code": code, "output": out}
        with open(ns.out, "w") as fh:
            fh.write(dumps(transcript) + "\n")
    return code, out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if any(a in ("-h", "--help") for a in argv):
        try:
            build_parser().parse_args(argv)
        except SystemExit as exc:
            return int(exc.code or 0)
    code, out = run(argv)
    print(dumps(out))
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
