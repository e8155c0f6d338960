#!/usr/bin/env python3
"""Time the numba kernels against their numpy twins.

Kernel timings call both implementations directly.  The end-to-end timing
runs a small ensemble in a subprocess per backend, since the backend is
fixed at import time by ``IAFC_DISABLE_NUMBA``.

    python3 benchmarks/bench_kernels.py --points 65536 --repeat 20
"""

import argparse
import os
import subprocess
import sys
import timeit

import numpy as np

from iafc import _kernels

E2E = """
import time, numpy as np, iafc
c = iafc.uniform_comb(7, 2*np.pi*300, 2*np.pi*5, 30.0)
spec = iafc.DisorderSpec("spacing", 10.0, {trials}, 1)
iafc.run_ensemble(c, iafc.DisorderSpec("spacing", 10.0, 2, 1))  # warm-up / JIT
t0 = time.perf_counter()
r = iafc.run_ensemble(c, spec)
print(time.perf_counter() - t0, repr(r.mean_efficiency))
"""


def kernel_cases(n, rng):
    omega = np.linspace(-5000.0, 5000.0, n)
    centers = np.arange(-3, 4) * 600.0
    widths = np.full(7, 31.4)
    depths = np.full(7, 4.77)
    field = rng.normal(size=n) + 1j * rng.normal(size=n)
    dl = _kernels.NUMPY_KERNELS["propagator"](omega, centers, widths, depths, 1.0)
    t = np.linspace(-1.0, 1.0, n)
    y = np.abs(field) ** 2
    total, comp = np.zeros(n), np.zeros(n)
    return {
        "propagator": (omega, centers, widths, depths, 1.0),
        "transmit": (field, dl, 0.7),
        "abs2": (field,),
        "neumaier_add": (total, comp, y),
        "window_trapz": (t, y, 0.1, 0.3),
    }


def bench(fn, args, repeat):
    fn(*args)  # compile / warm caches
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def end_to_end(trials):
    out = {}
    for name, flag in (("numpy", "1"), ("numba", "")):
        env = dict(os.environ, IAFC_DISABLE_NUMBA=flag)
        res = subprocess.run([sys.executable, "-c", E2E.format(trials=trials)], env=env,
                             capture_output=True, text=True, check=True)
        sec, eta = res.stdout.split()
        out[name] = (float(sec), float(eta))
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=2**16)
    ap.add_argument("--repeat", type=int, default=20)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--skip-e2e", action="store_true")
    args = ap.parse_args()

    if _kernels.NUMBA_KERNELS is None:
        sys.exit("numba is not installed; nothing to compare")
    rng = np.random.default_rng(0)
    cases = kernel_cases(args.points, rng)
    print(f"{'kernel':<14}{'numpy ms':>11}{'numba ms':>11}{'speedup':>9}")
    for name, a in cases.items():
        t_np = bench(_kernels.NUMPY_KERNELS[name], a, args.repeat)
        t_nb = bench(_kernels.NUMBA_KERNELS[name], a, args.repeat)
        print(f"{name:<14}{t_np * 1e3:>11.3f}{t_nb * 1e3:>11.3f}{t_np / t_nb:>9.2f}")

    if not args.skip_e2e:
        r = end_to_end(args.trials)
        print(f"\nensemble of {args.trials} trials, 7 teeth, F=60")
        for name, (sec, eta) in r.items():
            print(f"  {name:<6} {sec:8.3f} s   eta={eta:.12f}")
        print(f"  speedup {r['numpy'][0] / r['numba'][0]:.2f}x, |d eta| = {abs(r['numpy'][1] - r['numba'][1]):.1e}")


if __name__ == "__main__":
    main()
