"""Compare the compiled and pure-numpy search kernels on the same workload.

The backend is fixed at import time by FMMKIT_BACKEND, so each timing runs
in a fresh interpreter.  The probe prints its wall time and final best
residual; matching residuals across backends confirm the numeric twins
agree on the trajectory endpoint.

Usage:
    python3 benchmarks/bench_search.py [--dims M N P] [--rank R]
        [--restarts K] [--seed S] [--max-sweeps N] [--repeat T]
"""

import argparse
import json
import os
import statistics
import subprocess
import sys

PROBE = r"""
import json, sys, time
from fmmkit.search import SearchConfig, search, kernels

cfg = SearchConfig(
    dims=tuple(%(dims)s),
    rank=%(rank)d,
    restarts=%(restarts)d,
    seed=%(seed)d,
    max_sweeps=%(max_sweeps)d,
    snap_grid=(0, 1, -1),
)
t0 = time.perf_counter()
out = search(cfg)
wall = time.perf_counter() - t0
print(json.dumps({
    "backend": kernels.BACKEND,
    "wall": wall,
    "best_residual": out.best_residual,
    "sweeps_used": out.sweeps_used,
    "rationalized": out.rationalized is not None,
}))
"""


def run_probe(backend, params):
    env = dict(os.environ)
    env["FMMKIT_BACKEND"] = backend
    code = PROBE % params
    proc = subprocess.run(
        [sys.executable, "-c", code],
        capture_output=True, text=True, env=env,
    )
    if proc.returncode != 0:
        raise RuntimeError("%s probe failed:\n%s" % (backend, proc.stderr))
    return json.loads(proc.stdout)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dims", type=int, nargs=3, default=[2, 2, 2], metavar=("M", "N", "P"))
    ap.add_argument("--rank", type=int, default=7)
    ap.add_argument("--restarts", type=int, default=20)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--max-sweeps", type=int, default=2000)
    ap.add_argument("--repeat", type=int, default=3, help="timing repetitions per backend")
    args = ap.parse_args(argv)

    params = {
        "dims": list(args.dims),
        "rank": args.rank,
        "restarts": args.restarts,
        "seed": args.seed,
        "max_sweeps": args.max_sweeps,
    }

    # availability check: numba probe falls back with a notice when missing
    backends = ["numpy"]
    try:
        import numba  # noqa: F401
        backends.insert(0, "numba")
    except ImportError:
        print("numba not installed; timing the numpy backend only")

    results = {}
    for backend in backends:
        walls = []
        last = None
        for i in range(args.repeat):
            last = run_probe(backend, params)
            walls.append(last["wall"])
            print("%-6s run %d  %.3fs  best_residual %.6e  rationalized %s"
                  % (backend, i + 1, last["wall"], last["best_residual"],
                     last["rationalized"]))
        results[backend] = {"walls": walls, "final": last}

    print()
    for backend in backends:
        walls = results[backend]["walls"]
        print("%-6s median %.3fs  min %.3fs  (x%d)"
              % (backend, statistics.median(walls), min(walls), len(walls)))
    if len(backends) == 2:
        ratio = statistics.median(results["numpy"]["walls"]) / statistics.median(
            results["numba"]["walls"])
        print("numpy/numba median wall ratio: %.2fx" % ratio)
        a = results["numba"]["final"]["best_residual"]
        b = results["numpy"]["final"]["best_residual"]
        print("final residuals: numba %.9e  numpy %.9e" % (a, b))
    return 0


if __name__ == "__main__":
    sys.exit(main())
