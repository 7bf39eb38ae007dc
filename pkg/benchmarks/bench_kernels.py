"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5]

Prints best-of-N wall times per kernel and backend, and checks that both
backends return identical (radical inverse) or matching (exponential sum)
results.
"""
import argparse
import timeit

import numpy as np

from tropos import _kernels_py

try:
    from tropos import _kernels as _compiled
except ImportError:
    _compiled = None


def cases():
    ks = np.arange(-(1 << 16), (1 << 16) + 1, dtype=np.int64)
    lam = np.log(np.arange(1, 4, dtype=np.float64))
    coef = np.array([1, 1, 1], dtype=np.complex128)
    s = (0.3 + 1j * np.linspace(-1000, 1000, 200_000)).astype(np.complex128)
    return {
        "radical_inverse_num (2^17 heights)": (lambda m: m.radical_inverse_num(2, ks, 18), np.array_equal),
        "expsum_eval (3 terms x 2e5 points)": (lambda m: m.expsum_eval(lam, coef, s),
                                               lambda a, b: np.allclose(a, b, rtol=1e-13, atol=1e-13)),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    backends = {"python": _kernels_py}
    if _compiled is not None:
        backends["compiled"] = _compiled
    else:
        print("compiled extension not built; timing the fallback only")
    for name, (fn, same) in cases().items():
        times, outs = {}, {}
        for label, mod in backends.items():
            outs[label] = np.asarray(fn(mod))
            times[label] = min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat))
        line = "  ".join(f"{k}={v * 1e3:8.2f} ms" for k, v in times.items())
        if "compiled" in times:
            agree = same(outs["python"], outs["compiled"])
            line += f"  speedup={times['python'] / times['compiled']:5.1f}x  agree={agree}"
        print(f"{name:38s} {line}")


if __name__ == "__main__":
    main()
