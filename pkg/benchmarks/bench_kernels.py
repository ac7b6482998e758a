"""Compare the numba and pure-numpy kernel backends.

    python benchmarks/bench_kernels.py [--repeat 5]

Each kernel is run once to trigger compilation, then timed ``--repeat``
times; the best time is reported along with the max abs difference between
the two backends' outputs.
"""
import argparse
import time

import numpy as np

from esnkit.kernels import TANH, get_backend, numba_available


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases(rng):
    W = rng.uniform(-1, 1, (1000, 1000)) * (1.25 / 18.3)
    Win = rng.uniform(-1, 1, (1000, 1))
    U = np.ascontiguousarray(rng.uniform(0.4, 1.3, (4999, 1)))
    x0 = np.zeros(1000)
    W_out = rng.normal(size=(1, 1000))
    Z = np.ascontiguousarray(rng.normal(size=(4999, 1000)))
    A = rng.uniform(-1, 1, (300, 300))
    v = rng.normal(size=300)
    return {
        "leaky_rollout N=1000 T=4999": lambda k: k.leaky_rollout(W, Win, U, x0, 1.0, TANH, 1e6)[0],
        "readout_apply 1000x4999": lambda k: k.readout_apply(W_out, Z),
        "power_iteration 300x300": lambda k: np.array([k.power_iteration(A, v, 1e-10, 3000)[0]]),
        "mackey_glass_rk4 100k steps": lambda k: k.mackey_glass_rk4(100000, 170, 0.1, 0.2, 0.1, 10.0, 1.2, False),
        "lorenz_rk4 100k steps": lambda k: k.lorenz_rk4(100000, 0.02, 10.0, 28.0, 8 / 3, np.array([1.0, 0, 0])),
    }


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args()
    names = ["numpy"] + (["numba"] if numba_available() else [])
    backends = {n: get_backend(n) for n in names}
    print(f"{'kernel':32s}" + "".join(f"{n:>12s}" for n in names) + ("   speedup   max|diff|" if len(names) == 2 else ""))
    for label, fn in cases(np.random.default_rng(0)).items():
        results = {n: best_of(lambda: fn(k), args.repeat) for n, k in backends.items()}
        line = f"{label:32s}" + "".join(f"{results[n][0]:11.4f}s" for n in names)
        if len(names) == 2:
            diff = np.max(np.abs(results["numpy"][1] - results["numba"][1]))
            line += f"   {results['numpy'][0] / results['numba'][0]:6.1f}x   {diff:.2e}"
        print(line)


if __name__ == "__main__":
    main()
