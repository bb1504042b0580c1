"""Time the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Every case is run on both backends and the results are compared before any
timing is reported.
"""

import argparse
import sys
import timeit

from redsched import _pykernels

try:
    from redsched import _kernels
except ImportError:
    _kernels = None


CASES = [
    # name, function name, args
    ("uni-greedy p=1536 q=64", "uni_greedy_time", (1536, [12] * 64, [2] * 64)),
    ("uni-greedy compositions p=1536 m=10", "uni_greedy_composition_times", (1536, 10, 3, 1, 1)),
    ("uni-greedy compositions p=64 m=14", "uni_greedy_composition_times", (64, 14, 1, 1, 0)),
    ("pipeline compositions p=1024 m=10", "pipeline_composition_times", (1024, 10, 3, 1, 1)),
    ("bi-greedy events p=64 q=10", "bi_greedy_events", (64, [3] * 10, [1] * 10, 10_000)),
    ("bi-greedy events p=256 q=32", "bi_greedy_events", (256, [2] * 32, [1] * 32, 100_000)),
]


def _best(fn, args, repeat):
    timer = timeit.Timer(lambda: fn(*args))
    number, _ = timer.autorange()
    return min(timer.repeat(repeat=repeat, number=number)) / number


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args(argv)
    if _kernels is None:
        print("compiled kernels are not built; only the fallback is available", file=sys.stderr)
        return 1
    print(f"{'case':40s} {'python':>12s} {'cython':>12s} {'speedup':>9s}")
    for name, func, fargs in CASES:
        py, cy = getattr(_pykernels, func), getattr(_kernels, func)
        if py(*fargs) != cy(*fargs):
            print(f"{name}: backends disagree", file=sys.stderr)
            return 1
        t_py = _best(py, fargs, args.repeat)
        t_cy = _best(cy, fargs, args.repeat)
        print(f"{name:40s} {t_py * 1e3:10.3f}ms {t_cy * 1e3:10.3f}ms {t_py / t_cy:8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
