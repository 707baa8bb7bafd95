"""Timing comparison of the compiled and pure word-enumeration kernels.

Run from the repository root:

    python3 benchmarks/bench_core.py --radius 8 --repeat 3
"""

import argparse
import time

from crossedprod import _core
from crossedprod._core import pure

try:
    from crossedprod._core import _speedups
except ImportError:
    _speedups = None


def best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def run(args):
    backends = [("pure", pure)]
    if _speedups is not None:
        backends.append(("compiled", _speedups))
    print(f"active backend: {_core.BACKEND}")
    header = f"{'kernel':<28}" + "".join(f"{name:>12}" for name, _ in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)

    cap = 10**8
    for k in (2, 3):
        for n in range(args.radius - 2, args.radius + 1):
            times = [
                best_of(lambda m=mod: m.free_ball_words(k, n, cap), args.repeat)
                for _, mod in backends
            ]
            row = f"ball_words k={k} n={n:<12}" + "".join(
                f"{t * 1e3:>10.2f}ms" for t in times
            )
            if len(times) == 2 and times[1] > 0:
                row += f"{times[0] / times[1]:>9.1f}x"
            print(row)

    t = (1, 2, 1)
    for k in (2, 3):
        n = args.radius
        times = [
            best_of(lambda m=mod: m.free_t_count(k, t, n, cap), args.repeat)
            for _, mod in backends
        ]
        row = f"t_count  k={k} n={n:<12}" + "".join(
            f"{x * 1e3:>10.2f}ms" for x in times
        )
        if len(times) == 2 and times[1] > 0:
            row += f"{times[0] / times[1]:>9.1f}x"
        print(row)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--radius", type=int, default=8)
    parser.add_argument("--repeat", type=int, default=3)
    run(parser.parse_args())


if __name__ == "__main__":
    main()
