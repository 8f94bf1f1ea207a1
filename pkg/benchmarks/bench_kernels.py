#!/usr/bin/env python3
"""Compare the numba and numpy gate kernels, then a full anneal under each backend.

Usage: python3 benchmarks/bench_kernels.py [--qubits 16] [--repeats 20] [--json out.json]
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from hamclass import _kernels
from hamclass.tensor import StateVector

WARMUP_RUNS = 2
SEED = 7


def random_unitary(dim, rng):
    q, _ = np.linalg.qr(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
    return q


def best_of(fn, repeats):
    for _ in range(WARMUP_RUNS):
        fn()
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def bench_gates(n, repeats):
    rng = np.random.default_rng(SEED)
    psi0 = StateVector.uniform(n).amplitudes
    cases = {
        "1q": (random_unitary(2, rng), (n // 2,), (), ()),
        "2q": (random_unitary(4, rng), (0, n - 1), (), ()),
        "2q+ctrl3": (random_unitary(4, rng), (1, 2), (n - 3, n - 2, n - 1), (1, 0, 1)),
    }
    rows = []
    for name, (u, t, c, cv) in cases.items():
        a, b = psi0.copy(), psi0.copy()
        _kernels.np_apply_matrix(a, n, u, t, c, cv)
        row = {"case": name, "qubits": n}
        row["numpy_s"] = best_of(lambda: _kernels.np_apply_matrix(psi0.copy(), n, u, t, c, cv), repeats)
        if _kernels.HAVE_NUMBA:
            _kernels.nb_apply_matrix(b, n, u, t, c, cv)
            row["max_abs_diff"] = float(np.abs(a - b).max())
            row["numba_s"] = best_of(lambda: _kernels.nb_apply_matrix(psi0.copy(), n, u, t, c, cv), repeats)
            row["speedup"] = row["numpy_s"] / row["numba_s"]
        rows.append(row)
    return rows


ANNEAL_SNIPPET = (
    "import time;from hamclass.tasks import run_color_task;"
    "from hamclass.anneal import AnnealConfig;import warnings;warnings.simplefilter('ignore');"
    "t=time.perf_counter();r=run_color_task(6, AnnealConfig(30,30,20.0));"
    "print(time.perf_counter()-t, r.metrics.energy_fidelity)"
)


def bench_anneal():
    out = {}
    for backend, flag in (("numba", "0"), ("numpy", "1")):
        env = dict(os.environ, HAMCLASS_DISABLE_NUMBA=flag)
        # first run fills the numba cache; time the second
        for _ in range(2):
            res = subprocess.run([sys.executable, "-c", ANNEAL_SNIPPET], env=env,
                                 capture_output=True, text=True, check=True)
        secs, fid = res.stdout.split()
        out[backend] = {"seconds": float(secs), "energy_fidelity": float(fid)}
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--qubits", type=int, default=16)
    ap.add_argument("--repeats", type=int, default=20)
    ap.add_argument("--skip-anneal", action="store_true")
    ap.add_argument("--json", help="write results here")
    args = ap.parse_args()

    print(f"backend available: numba={_kernels.HAVE_NUMBA}")
    results = {"gates": bench_gates(args.qubits, args.repeats)}
    for r in results["gates"]:
        line = f"{r['case']:>9s} n={r['qubits']} numpy {r['numpy_s'] * 1e3:8.3f} ms"
        if "numba_s" in r:
            line += f"  numba {r['numba_s'] * 1e3:8.3f} ms  x{r['speedup']:.2f}  diff {r['max_abs_diff']:.1e}"
        print(line)
    if not args.skip_anneal:
        results["anneal_color6"] = bench_anneal()
        for k, v in results["anneal_color6"].items():
            print(f"6-bit color anneal ({k}): {v['seconds']:.2f} s, energy fidelity {v['energy_fidelity']:.1f}%")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(results, fh, indent=2)


if __name__ == "__main__":
    main()
