"""Backend selection for the series kernels.

The compiled extension is used when it imported and the coefficient
modulus fits int64 arithmetic; everything else runs the pure-Python
kernels. ``set_backend("python")`` forces the fallback.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

from . import _pykernel

try:
    from . import _ckernel
except ImportError:  # extension not built
    _ckernel = None

# (mod-1)^2 + mod must stay below 2^63
INT64_MOD_LIMIT = 3_000_000_000

_state = {"backend": "cython" if _ckernel is not None else "python"}


def available_backends() -> list:
    return ["python"] + (["cython"] if _ckernel is not None else [])


def get_backend() -> str:
    return _state["backend"]


def set_backend(name: str) -> None:
    if name not in ("python", "cython"):
        raise ValueError(f"unknown backend {name!r}")
    if name == "cython" and _ckernel is None:
        raise RuntimeError("compiled kernel is not available; build the extension first")
    _state["backend"] = name


def _use_c(mod: int) -> bool:
    return _state["backend"] == "cython" and mod < INT64_MOD_LIMIT


@lru_cache(maxsize=64)
def _np_table(T: tuple) -> np.ndarray:
    return np.array(T, dtype=np.int64)


def mul_graded(a: dict, b: dict, basis, T: tuple, mod: int, n: int) -> dict:
    """Sparse graded product; ``basis`` is a :class:`MonomialBasis`."""
    if not a or not b:
        return {}
    if _use_c(mod) and basis.np_add_table is not None:
        ka = sorted(a)
        kb = sorted(b)
        ia = np.array(ka, dtype=np.int32)
        ib = np.array(kb, dtype=np.int32)
        ca = np.array([a[k] for k in ka], dtype=np.int64)
        cb = np.array([b[k] for k in kb], dtype=np.int64)
        out = _ckernel.mul_graded(
            ia, ca, ib, cb, basis.np_add_table, basis.np_deg, basis.cap, _np_table(T), mod, basis.size
        )
        rows = np.flatnonzero(out.any(axis=1))
        return {int(r): tuple(int(c) for c in out[r]) for r in rows}
    return _pykernel.mul_graded(a, b, basis.add_table, basis.deg, basis.cap, T, mod, n)


def mul_dense(a: list, b: list, out_len: int, T: tuple, mod: int, n: int) -> list:
    """Truncated dense convolution of coefficient lists."""
    if not a or not b or out_len <= 0:
        return [(0,) * n] * max(out_len, 0)
    if _use_c(mod):
        out = _ckernel.mul_dense(
            np.array(a, dtype=np.int64), np.array(b, dtype=np.int64), out_len, _np_table(T), mod
        )
        return [tuple(int(c) for c in row) for row in out]
    return _pykernel.mul_dense(a, b, out_len, T, mod, n)
