"""Pure-Python series kernels; same contracts as the compiled ``_ckernel``.

Coefficients are raw O_F vectors (tuples of length n). ``T`` is the
structure-constant table reduced mod ``mod``. Outputs are reduced mod
``mod`` but not canonicalised.
"""


def mul_graded(a, b, add_table, deg, cap, T, mod, n):
    """Product of two sparse graded series.

    ``a`` and ``b`` map monomial index -> coefficient tuple. ``add_table[i][j]``
    is the index of the product monomial (or -1 past the cap); ``deg[i]`` is
    the total degree of monomial ``i``.
    """
    out = {}
    b_items = sorted(b.items())
    if n == 1:
        for ka, va in a.items():
            x = va[0]
            if not x:
                continue
            room = cap - deg[ka]
            row = add_table[ka]
            for kb, vb in b_items:
                if deg[kb] > room:
                    break
                idx = row[kb]
                if idx >= 0:
                    out[idx] = out.get(idx, 0) + x * vb[0]
        return {k: (v % mod,) for k, v in out.items()}
    for ka, va in a.items():
        room = cap - deg[ka]
        row = add_table[ka]
        nz_a = [(i, x) for i, x in enumerate(va) if x]
        for kb, vb in b_items:
            if deg[kb] > room:
                break
            idx = row[kb]
            if idx < 0:
                continue
            acc = out.get(idx)
            if acc is None:
                acc = out[idx] = [0] * n
            for i, x in nz_a:
                Ti = T[i]
                for j, y in enumerate(vb):
                    if y:
                        xy = x * y
                        for k, t in enumerate(Ti[j]):
                            if t:
                                acc[k] += xy * t
    return {k: tuple(c % mod for c in v) for k, v in out.items()}


def mul_dense(a, b, out_len, T, mod, n):
    """Truncated convolution of dense coefficient lists (index = exponent offset)."""
    if n == 1:
        out = [0] * out_len
        for i, va in enumerate(a):
            x = va[0]
            if not x:
                continue
            top = min(len(b), out_len - i)
            for j in range(top):
                y = b[j][0]
                if y:
                    out[i + j] += x * y
        return [(c % mod,) for c in out]
    out = [[0] * n for _ in range(out_len)]
    for i, va in enumerate(a):
        nz_a = [(s, x) for s, x in enumerate(va) if x]
        if not nz_a:
            continue
        top = min(len(b), out_len - i)
        for j in range(top):
            vb = b[j]
            acc = out[i + j]
            for s, x in nz_a:
                Ts = T[s]
                for t, y in enumerate(vb):
                    if y:
                        xy = x * y
                        for k, c in enumerate(Ts[t]):
                            if c:
                                acc[k] += xy * c
    return [tuple(c % mod for c in v) for v in out]
