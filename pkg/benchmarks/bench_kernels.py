#!/usr/bin/env python3
"""Compare the compiled edit-distance kernels against the pure-Python fallback.

Run from the repository root after an editable install:

    python benchmarks/bench_kernels.py
"""

import random
import statistics
import time

from weft import _kernels_py

try:
    from weft import _speedups
except ImportError:
    _speedups = None

TAGS = ["html", "body", "div", "span", "p", "td", "tr", "ul", "li", "b"]


def random_pairs(rng, length, count):
    alphabet = "abcdefghijklmnop :-"
    make = lambda: "".join(rng.choice(alphabet) for _ in range(length))
    return [(make(), make()) for _ in range(count)]


def random_path_pairs(rng, length, count):
    make = lambda: [rng.choice(TAGS) + str(rng.randrange(9)) for _ in range(length)]
    return [(make(), make()) for _ in range(count)]


def bench(fn, pairs, repeats=5):
    timings = []
    for _ in range(repeats):
        started = time.perf_counter()
        for a, b in pairs:
            fn(a, b)
        timings.append(time.perf_counter() - started)
    return min(timings)


def main():
    rng = random.Random(7)
    print(f"{'case':<28} {'python':>10} {'compiled':>10} {'speedup':>9}")
    rows = [
        ("levenshtein", "strings len 10", random_pairs(rng, 10, 2000)),
        ("levenshtein", "strings len 40", random_pairs(rng, 40, 1000)),
        ("levenshtein", "strings len 160", random_pairs(rng, 160, 100)),
        ("levenshtein_seq", "paths len 8", random_path_pairs(rng, 8, 2000)),
        ("levenshtein_seq", "paths len 24", random_path_pairs(rng, 24, 1000)),
        ("common_prefix_len", "paths len 24", random_path_pairs(rng, 24, 5000)),
    ]
    speedups = []
    for fn_name, label, pairs in rows:
        py_time = bench(getattr(_kernels_py, fn_name), pairs)
        if _speedups is None:
            print(f"{fn_name + ' ' + label:<28} {py_time * 1e3:>8.1f}ms {'n/a':>10} {'n/a':>9}")
            continue
        c_time = bench(getattr(_speedups, fn_name), pairs)
        speedups.append(py_time / c_time)
        print(
            f"{fn_name + ' ' + label:<28} {py_time * 1e3:>8.1f}ms "
            f"{c_time * 1e3:>8.1f}ms {py_time / c_time:>8.1f}x"
        )
    if speedups:
        print(f"\nmedian speedup: {statistics.median(speedups):.1f}x")


if __name__ == "__main__":
    main()
