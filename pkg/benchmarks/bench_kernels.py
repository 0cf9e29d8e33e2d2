#!/usr/bin/env python3
"""Benchmark the training kernels: numba-compiled vs pure-Python fallback.

Each mode runs in its own subprocess (the path is selected at import time
via SETPRED_NUMBA), so the comparison includes neither cross-talk nor JIT
compilation: kernels are warmed once before timing.

Usage: python benchmarks/bench_kernels.py [--n 240] [--d 18] [--repeats 3]
"""

import argparse
import json
import os
import subprocess
import sys
import time


def run_mode(mode_env: str, args) -> dict:
    env = dict(os.environ, SETPRED_NUMBA=mode_env)
    out = subprocess.run(
        [sys.executable, __file__, "--worker", "--n", str(args.n),
         "--d", str(args.d), "--repeats", str(args.repeats)],
        env=env, capture_output=True, text=True, check=True,
    )
    return json.loads(out.stdout.strip().splitlines()[-1])


def worker(args) -> None:
    import numpy as np

    from setpred import _kernels

    rng = np.random.default_rng(0)
    X = rng.normal(size=(args.n, args.d))
    w_true = rng.normal(size=args.d)
    y = (X @ w_true > 0).astype(np.float64)
    W1 = rng.uniform(-0.5, 0.5, (args.d, 3))
    b1 = rng.uniform(-0.5, 0.5, 3)
    w2 = rng.uniform(-0.5, 0.5, 3)

    bench = {
        "logistic_fit_gd": lambda: _kernels.logistic_fit_gd(
            X, y, 0.0, 0.0, 1e-3, 150, 1e-9),
        "lasso_fit_cd": lambda: _kernels.lasso_fit_cd(X, y, 0.01, 100, 1e-10),
        "mlp_fit_gd": lambda: _kernels.mlp_fit_gd(X, y, W1, b1, w2, 0.1, 0.5, 150),
    }
    results = {"numba": _kernels.NUMBA_ENABLED}
    for name, fn in bench.items():
        fn()  # warm-up (JIT compile on the numba path)
        times = []
        for _ in range(args.repeats):
            start = time.perf_counter()
            fn()
            times.append(time.perf_counter() - start)
        results[name] = min(times)
    print(json.dumps(results))


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--n", type=int, default=240)
    parser.add_argument("--d", type=int, default=18)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--worker", action="store_true")
    args = parser.parse_args()
    if args.worker:
        worker(args)
        return

    compiled = run_mode("1", args)
    fallback = run_mode("0", args)
    if not compiled["numba"]:
        print("warning: numba unavailable; both columns run the fallback")
    print(f"kernel benchmark  n={args.n} d={args.d} (best of {args.repeats})")
    print(f"{'kernel':<18}{'numba':>12}{'python':>12}{'speedup':>10}")
    for name in ("logistic_fit_gd", "lasso_fit_cd", "mlp_fit_gd"):
        a, b = compiled[name], fallback[name]
        print(f"{name:<18}{a * 1e3:>10.2f}ms{b * 1e3:>10.2f}ms{b / a:>9.1f}x")


if __name__ == "__main__":
    main()
