"""Time the compiled kernels against the pure NumPy fallback.

Runs each kernel on representative workloads and prints the best-of-R
wall time per backend with the speedup. The compiled extension mainly
pays off in husimi_max, whose Nelder-Mead loop is scalar code in the
fallback.

Usage: python3 benchmarks/bench_backends.py [--repeats R]
"""

import argparse
import time

import numpy as np

from wehrlgme.backend import available_backends
from wehrlgme.gme import fibonacci_sphere
from wehrlgme.states import SymmetricState, husimi_coefficients


def best_of(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def random_wcoef(rng, n):
    d = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
    return husimi_coefficients(SymmetricState.from_dicke(d))


def workloads(rng):
    out = []
    for n in (10, 14):
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        out.append((f"permanent n={n}",
                    lambda mod, a=a: mod.permanent(a)))
    theta = rng.uniform(0.0, np.pi, 20000)
    phi = rng.uniform(0.0, 2.0 * np.pi, 20000)
    for n in (4, 12):
        w = random_wcoef(rng, n)
        out.append((f"husimi_many N={n}, 20000 pts",
                    lambda mod, w=w: mod.husimi_many(w, theta, phi)))
    starts = fibonacci_sphere(64)
    for n in (4, 10):
        w = random_wcoef(rng, n)
        out.append((f"husimi_max N={n}, 64 starts",
                    lambda mod, w=w: mod.husimi_max(w, starts, 200, 1e-14)))
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    from wehrlgme import _core_py
    modules = {"python": _core_py}
    if "compiled" in available_backends():
        from wehrlgme import _core
        modules["compiled"] = _core
    else:
        print("compiled extension not available; timing the fallback only")

    rng = np.random.default_rng(0)
    names = list(modules)
    width = 34
    header = f"{'workload':{width}s}" + "".join(f"{n:>12s}" for n in names)
    if len(names) == 2:
        header += f"{'speedup':>10s}"
    print(header)
    for label, fn in workloads(rng):
        times = [best_of(lambda m=modules[n]: fn(m), args.repeats)
                 for n in names]
        row = f"{label:{width}s}" + "".join(f"{t * 1e3:10.2f}ms" for t in times)
        if len(times) == 2:
            row += f"{times[0] / times[1]:9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
