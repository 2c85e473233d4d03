"""Time the compiled and numpy kernels on the same inputs.

    python benchmarks/bench_kernels.py [--disks 262144] [--order 1024] [--repeat 3]
"""

import argparse
import time

import numpy as np

from brjunokit import kernels


def _best(fn, repeat):
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def bench_disks(n, repeat):
    side = int(np.sqrt(n))
    xs = np.linspace(-2, 2, side)
    X, Y = np.meshgrid(xs, xs)
    zr, zi = X.ravel().copy(), Y.ravel().copy()
    rad = np.full(zr.shape, 4 / side)
    c = (-0.122561166876654, 0.744861766619744)
    R0 = (1 + np.sqrt(1 + 4 * np.hypot(*c))) / 2
    empty = np.zeros(0)
    rows = {}
    for name in kernels.available_backends():
        be = kernels.get_backend(name)
        rows[name] = _best(lambda: be.iterate_disks(zr, zi, rad, c[0], c[1], 1e-17, R0, 500,
                                                    empty, empty, empty), repeat)
    return rows


def bench_linearizer(n, repeat):
    theta = (np.sqrt(5) - 1) / 2
    k = np.arange(n + 1)
    lam = np.exp(2j * np.pi * theta)
    d = lam ** k - lam
    drad = np.full(n + 1, 1e-15)
    rows = {}
    for name in kernels.available_backends():
        be = kernels.get_backend(name)
        rows[name] = _best(lambda: be.linearizer_series(d.real.copy(), d.imag.copy(), drad, 0.5, n), repeat)
    return rows


def report(title, rows, same):
    print(title)
    base = rows.get("numpy", (None,))[0]
    for name, (t, _) in rows.items():
        speed = f"  x{base / t:.1f}" if base and name != "numpy" else ""
        print(f"  {name:7s} {t * 1e3:9.1f} ms{speed}")
    print(f"  identical outputs: {same}")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--disks", type=int, default=262144)
    ap.add_argument("--order", type=int, default=1024)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    print(f"backends: {', '.join(kernels.available_backends())} (default {kernels.BACKEND})")
    rows = bench_disks(args.disks, args.repeat)
    outs = [r[1] for r in rows.values()]
    same = all(np.array_equal(a, b) for o in outs[1:] for a, b in zip(outs[0], o))
    report(f"iterate_disks, {args.disks} disks, maxiter 500", rows, same)
    rows = bench_linearizer(args.order, args.repeat)
    outs = [r[1] for r in rows.values()]
    same = all(np.array_equal(a, b) for o in outs[1:] for a, b in zip(outs[0][:3], o[:3]))
    report(f"linearizer_series, order {args.order}", rows, same)


if __name__ == "__main__":
    main()
