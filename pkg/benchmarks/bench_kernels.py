"""Time the numba and numpy kernel backends on the same workloads.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each backend runs in its own interpreter because the backend is fixed at
import time by PARTHETA_BACKEND.
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np
from partheta import kernels
from partheta.zerofinder import find_zeros_in_disk, _order_cached

repeat = int(sys.argv[1])
xs = 50 * np.exp(2j * np.pi * np.arange(4096) / 4096)
k = np.arange(1, 61)
seeds = (-(0.5 ** -k) * np.exp(1j * (0.3 * (-1.0) ** k + 0.0137 * k))).astype(np.complex128)

def series():
    kernels.series_sum_many(0.6 + 0.1j, xs, 120, 1, 0)

def aberth():
    kernels.aberth(0.5 + 0j, 60, seeds, 300, 1e-13)

def zeros():
    _order_cached.cache_clear()
    find_zeros_in_disk(0.7, 1e4)

out = {"backend": kernels.BACKEND}
for name, fn in [("series_sum_many 4096x120", series), ("aberth degree 60", aberth),
                 ("find_zeros_in_disk q=0.7 R=1e4", zeros)]:
    fn()  # warm-up, includes JIT compilation
    ts = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        ts.append(time.perf_counter() - t)
    out[name] = min(ts)
print(json.dumps(out))
"""


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rows = []
    for backend in ("numba", "numpy"):
        env = dict(os.environ, PARTHETA_BACKEND=backend)
        res = subprocess.run([sys.executable, "-c", WORKER, str(args.repeat)], env=env,
                             capture_output=True, text=True, check=True)
        rows.append(json.loads(res.stdout))
    names = [k for k in rows[0] if k != "backend"]
    print(f"{'workload':34s} {'numba [s]':>12s} {'numpy [s]':>12s} {'speedup':>8s}")
    for n in names:
        a, b = rows[0][n], rows[1][n]
        print(f"{n:34s} {a:12.5f} {b:12.5f} {b / a:8.1f}")


if __name__ == "__main__":
    main()
