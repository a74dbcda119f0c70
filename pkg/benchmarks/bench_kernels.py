"""Compare the compiled and pure-Python kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 1]

Times the two hot kernels directly and then a few end-to-end workloads
(group law solve, an Eisenstein step, one descent round trip) under each
available backend.
"""
import argparse
import random
import time

from lubintate import (
    LTGroup,
    character_descent,
    descent_ring,
    eisenstein_step,
    enumerate_characters,
    forward_certificate,
    kernel,
    make_local_field,
    rank1_module,
)
from lubintate.descent import random_unit
from lubintate.series import monomial_basis


def _dense_case():
    F = make_local_field(3, 1, None, [-3, 0, 1], precN=8)
    mod = F.modulus(16)
    rng = random.Random(0)
    a = [tuple(rng.randrange(mod) for _ in range(F.n)) for _ in range(200)]
    b = [tuple(rng.randrange(mod) for _ in range(F.n)) for _ in range(200)]
    T = F.table_mod(mod)
    return lambda: kernel.mul_dense(a, b, 300, T, mod, F.n)


def _graded_case():
    F = make_local_field(3, 1, None, [-3, 0, 1], precN=8)
    basis = monomial_basis(2, 12)
    mod = F.modulus(20)
    T = F.table_mod(mod)
    rng = random.Random(1)
    a = {k: tuple(rng.randrange(mod) for _ in range(F.n)) for k in range(basis.size)}
    b = dict(a)
    return lambda: kernel.mul_graded(a, b, basis, T, mod, F.n)


def _group_law():
    G = LTGroup.standard(make_local_field(3, 1, None, [-3, 0, 1], precN=24), cap=16)
    G.group_law()


def _eisenstein():
    eisenstein_step(LTGroup.standard(make_local_field(3, precN=12), cap=27), 3)


def _descent():
    eta, zd = [(e, z) for e, z in enumerate_characters(3) if e.order(z) == 9][0]
    R = descent_ring(zd)
    D, beta = forward_certificate(rank1_module(eta, R), random_unit(R, random.Random(0)), 9)
    character_descent(D, beta, 9, zd)


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=1)
    args = ap.parse_args()
    backends = kernel.available_backends()
    cases = [
        ("mul_dense 200x200", _dense_case()),
        ("mul_graded 2 vars cap 12", _graded_case()),
        ("group law Q3(sqrt3) cap 16", _group_law),
        ("Eisenstein step Q3 m=3", _eisenstein),
        ("descent round trip order 9", _descent),
    ]
    print(f"{'workload':<30}" + "".join(f"{b:>12}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    old = kernel.get_backend()
    try:
        for name, fn in cases:
            row = {}
            for b in backends:
                kernel.set_backend(b)
                row[b] = best_of(fn, args.repeat)
            line = f"{name:<30}" + "".join(f"{row[b]:>11.4f}s" for b in backends)
            if len(backends) > 1:
                line += f"{row['python'] / row['cython']:>11.1f}x"
            print(line)
    finally:
        kernel.set_backend(old)
    if "cython" not in backends:
        print("compiled kernel not available; only the Python backend was timed")


if __name__ == "__main__":
    main()
