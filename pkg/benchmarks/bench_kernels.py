"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N]

Inputs are sized like the real workload: a 120 s recording at 100 Hz
(18 channels), a pooled feature set of ~300 walks, and 10 rules.
"""
import argparse
import timeit

import numpy as np

from it2fnn import _pykernels

try:
    from it2fnn import _ext
except ImportError:
    _ext = None


def cases(rng):
    signal = rng.random(12_000) * 800
    X = rng.random((300, 11))
    U = rng.random((300, 10))
    U /= U.sum(axis=1, keepdims=True)
    C = rng.random((10, 10))
    return {
        "median_filter (12000 samples, w=10) x18": lambda k: [k.median_filter(signal, 10) for _ in range(18)],
        "max_sq_dist (300 x 10 rules, d=10)": lambda k: k.max_sq_dist(X[:, :10], C),
        "fcm_update (300 x 11, R=10)": lambda k: k.fcm_update(X, U, 2.0),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=7)
    args = ap.parse_args()
    backends = [("python", _pykernels)] + ([("cython", _ext)] if _ext else [])
    if _ext is None:
        print("compiled extension not built; timing the python fallback only")
    print(f"{'kernel':45s} " + " ".join(f"{name:>12s}" for name, _ in backends) + "   speedup")
    for label, fn in cases(np.random.default_rng(0)).items():
        times = []
        for _, mod in backends:
            number = max(1, int(0.2 / max(timeit.timeit(lambda: fn(mod), number=1), 1e-6)))
            best = min(timeit.repeat(lambda: fn(mod), number=number, repeat=args.repeat)) / number
            times.append(best)
        cells = " ".join(f"{t * 1e3:10.3f}ms" for t in times)
        speed = f"{times[0] / times[1]:8.1f}x" if len(times) == 2 else ""
        print(f"{label:45s} {cells} {speed}")


if __name__ == "__main__":
    main()
