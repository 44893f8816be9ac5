"""Compare the compiled term kernels with the pure-Python fallbacks.

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import timeit

from si3 import _backend
from si3.algebra import parse_expr
from si3.algebra.poly import _add_scaled_py, _mul_terms_py

CASES = {
    "dense-xyz": ("(x + 2*y - 3*z + i + 1)^6", "(x - y + 5*z - 2)^5"),
    "radicals": ("(x + i*y)^4*(1/2*a + 3*b)", "(x - i*y)^3*(c - 2*d) + z^2"),
    "phase-space": ("(y*p3 - z*p2)^2 + (z*p1 - x*p3)^2", "(x*p2 - y*p1)^3 + a*x^2"),
}


def polys(case):
    f, g = CASES[case]
    return parse_expr(f).num.terms, parse_expr(g).num.terms


def bench(fn, args, repeat):
    return min(timeit.repeat(lambda: fn(*args), number=repeat, repeat=5)) / repeat


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=20)
    opts = ap.parse_args()
    ext = _backend._ext
    print(f"backend: {_backend.BACKEND}")
    print(f"{'case':14} {'kernel':11} {'python us':>10} {'compiled us':>12} {'speedup':>8}")
    for case in CASES:
        a, b = polys(case)
        rows = [("mul_terms", _mul_terms_py, getattr(ext, "mul_terms", None), (a, b)),
                ("add_scaled", _add_scaled_py, getattr(ext, "add_scaled", None), (a, b, 3))]
        for name, py, cy, args in rows:
            tp = bench(py, args, opts.repeat) * 1e6
            if cy is None:
                print(f"{case:14} {name:11} {tp:10.1f} {'-':>12} {'-':>8}")
                continue
            assert cy(*args) == py(*args)
            tc = bench(cy, args, opts.repeat) * 1e6
            print(f"{case:14} {name:11} {tp:10.1f} {tc:12.1f} {tp / tc:8.2f}")


if __name__ == "__main__":
    main()
