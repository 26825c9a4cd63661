"""Time the compiled dipole kernels against the pure-numpy fallback.

Usage: python3 benchmarks/bench_kernels.py [--n 20000] [--repeats 5]
"""

import argparse
import time

import numpy as np

from magcap import _core_py

try:
    from magcap import _core
except ImportError:
    _core = None


def bench(fn, repeats, *args):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--n", type=int, default=20000)
    parser.add_argument("--repeats", type=int, default=5)
    args = parser.parse_args()

    rng = np.random.default_rng(0)
    rs = rng.normal(size=(args.n, 3)) * 0.2
    rs += 0.05 * rs / np.linalg.norm(rs, axis=1, keepdims=True)
    m_hat = np.array([0.0, 0.0, 1.0])

    impls = [("python", _core_py)]
    if _core is not None:
        impls.append(("compiled", _core))
    else:
        print("compiled extension not available; timing fallback only")

    for name in ("field_batch", "field_jacobian_batch"):
        times = {}
        for label, mod in impls:
            times[label] = bench(getattr(mod, name), args.repeats,
                                 rs, 68.75, m_hat)
        line = f"{name:22s} n={args.n}"
        for label, t in times.items():
            line += f"  {label}={t * 1e3:8.3f} ms"
        if len(times) == 2:
            line += f"  speedup={times['python'] / times['compiled']:.2f}x"
        print(line)

    # force kernel is scalar per call; time a loop over single evaluations
    single = rs[: min(args.n, 2000)]
    ma_hat = np.array([0.0, 0.0, 1.0])
    mc_hat = np.array([1.0, 0.0, 0.0])

    def force_loop(mod):
        for r in single:
            mod.force_on_dipole(r, 68.75, ma_hat, 0.97855, mc_hat)

    times = {label: bench(force_loop, args.repeats, mod)
             for label, mod in impls}
    line = f"{'force_on_dipole':22s} n={len(single)}"
    for label, t in times.items():
        line += f"  {label}={t * 1e3:8.3f} ms"
    if len(times) == 2:
        line += f"  speedup={times['python'] / times['compiled']:.2f}x"
    print(line)


if __name__ == "__main__":
    main()
