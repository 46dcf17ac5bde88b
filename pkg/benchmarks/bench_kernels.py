"""Compare the compiled and numpy kernel backends.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from sbsbound import _pykernels
from sbsbound.oracles import bloch_grid
from sbsbound.sampling import random_density, random_independent_set

try:
    from sbsbound import _ckernels
except ImportError:
    _ckernels = None


def cases(rng):
    rhos = np.array([random_density(rng, 2), random_density(rng, 2)])
    probs = np.array([0.4, 0.6])
    th, ph = bloch_grid(180)
    small = random_independent_set(rng, 4, 8)
    big = random_independent_set(rng, 24, 32)
    return {
        "grid 181x361": lambda k: k.pvm_grid_objective(rhos, probs, th, ph),
        "mgs 4x8": lambda k: k.mgs(small, 1e-10),
        "mgs 24x32": lambda k: k.mgs(big, 1e-10),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    backends = {"python": _pykernels}
    if _ckernels is not None:
        backends["cython"] = _ckernels
    print(f"{'kernel':<14}" + "".join(f"{b:>14}" for b in backends) + ("     speedup" if len(backends) > 1 else ""))
    for name, fn in cases(rng).items():
        times = {}
        for b, mod in backends.items():
            number = 3 if name.startswith("grid") else 200
            t = min(timeit.repeat(lambda: fn(mod), number=number, repeat=args.repeat)) / number
            times[b] = t
        row = f"{name:<14}" + "".join(f"{times[b] * 1e3:>11.3f} ms" for b in backends)
        if len(times) > 1:
            row += f"{times['python'] / times['cython']:>11.1f}x"
        print(row)


if __name__ == "__main__":
    main()
