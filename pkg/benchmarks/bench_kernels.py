"""Compare the compiled and pure-Python kernel backends.

Times the hot kernels per call, checks that both backends agree bitwise,
then times a full ellipse fit under each backend.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--terms 10]
"""
import argparse
import timeit

import numpy as np

from fbeig import _kernels
from fbeig.domain import Ellipse
from fbeig.fitter import OptimConfig, fit_gauss_newton

OVERSHOOT, CUTOFF = 10, 2.0


def kernel_cases(n_terms):
    rng = np.random.default_rng(0)
    coeffs = rng.uniform(-0.1, 0.1, n_terms)
    r = rng.uniform(0.1, 1.0, 1000)
    t = rng.uniform(0.0, 2 * np.pi, 1000)
    rho = 3.78
    return {
        "jn_array(60, 30.0)": (lambda k: k.jn_array(60, 30.0, OVERSHOOT, CUTOFF), 1),
        "u_value_dr": (lambda k: k.u_value_dr(rho, coeffs, 2, 0.7, 0.3, OVERSHOOT, CUTOFF), 1),
        "u_full": (lambda k: k.u_full(rho, coeffs, 2, 0.7, 0.3, OVERSHOOT, CUTOFF), 1),
        "u_many (1000 pts)": (lambda k: k.u_many(rho, coeffs, 2, r, t, OVERSHOOT, CUTOFF), 1000),
    }


def _flat(value):
    if isinstance(value, tuple):
        return np.concatenate([np.ravel(np.asarray(v, dtype=float)) for v in value])
    return np.ravel(np.asarray(value, dtype=float))


def time_call(fn, repeat):
    number = 200
    best = min(timeit.repeat(fn, number=number, repeat=repeat))
    return best / number


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--terms", type=int, default=10)
    args = ap.parse_args()

    found = _kernels.backends()
    print(f"backends available: {', '.join(sorted(found))}")
    cases = kernel_cases(args.terms)
    print(f"\n{'kernel':<22}" + "".join(f"{name:>14}" for name in sorted(found)) + f"{'speedup':>10}")
    for label, (fn, points) in cases.items():
        outs = {name: _flat(fn(mod)) for name, mod in found.items()}
        times = {name: time_call(lambda m=mod: fn(m), args.repeat) / points for name, mod in found.items()}
        same = all(np.array_equal(outs["python"], o) for o in outs.values())
        speed = times["python"] / times["cython"] if "cython" in times else float("nan")
        row = "".join(f"{times[n] * 1e6:>12.3f}us" for n in sorted(found))
        print(f"{label:<22}{row}{speed:>9.1f}x" + ("" if same else "  MISMATCH"))

    print(f"\nfull fit, ellipse (0.5, 1), N={args.terms}:")
    shape = Ellipse(0.5, 1.0)
    opt = OptimConfig(hadamard=False)
    results = {}
    for name in sorted(found):
        old = _kernels.set_backend(name)
        try:
            t = min(timeit.repeat(lambda: fit_gauss_newton(shape, args.terms, opt=opt), number=1, repeat=3))
            results[name] = fit_gauss_newton(shape, args.terms, opt=opt).eigenvalue_raw
        finally:
            _kernels.set_backend(old)
        print(f"  {name:<8} {t:8.3f} s   lambda = {results[name]!r}")
    if len(set(results.values())) > 1:
        print("  backends disagree on lambda")


if __name__ == "__main__":
    main()
