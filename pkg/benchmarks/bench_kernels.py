"""Compare the compiled iteration kernel with its pure-Python twin.

Each run performs a fixed number of steps (the tolerance is set below
anything reachable) on generated instances of increasing dimension and
reports the best wall time over a few repeats.

    python benchmarks/bench_kernels.py --dims 2 5 10 50 --iters 2000
"""
import argparse
import json
import time

import numpy as np

from splitqvi.generate import GeneratorConfig, generate
from splitqvi.kernels import HAVE_COMPILED, compile_plan, run_plan


def best_time(plan, params, x0, iters, backend, repeats):
    alphas = params.alphas(iters + 1)
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        xs, *_ = run_plan(plan, params.rho1, params.rho2, params.gamma, alphas, x0, 1e-300,
                          backend=backend)
        best = min(best, time.perf_counter() - t0)
    return best, xs


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dims", type=int, nargs="+", default=[2, 5, 10, 25, 50])
    ap.add_argument("--iters", type=int, default=2000)
    ap.add_argument("--repeats", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--json", help="also write the results to this file")
    args = ap.parse_args(argv)
    if not HAVE_COMPILED:
        raise SystemExit("compiled kernel not built; run `pip install -e . --no-build-isolation`")

    rows = []
    print(f"{'n1':>4} {'n2':>4} {'iters':>6} {'python s':>10} {'compiled s':>11} {'speedup':>8} {'max diff':>9}")
    for n in args.dims:
        m = max(1, (3 * n) // 4)
        spec = generate(GeneratorConfig(n1=n, n2=m, seed=args.seed))
        plan = compile_plan(spec)
        params = spec.params()
        x0 = np.ones(n)
        t_py, x_py = best_time(plan, params, x0, args.iters, "python", args.repeats)
        t_c, x_c = best_time(plan, params, x0, args.iters, "compiled", args.repeats)
        diff = float(np.abs(x_py - x_c).max())
        rows.append({"n1": n, "n2": m, "iters": args.iters, "python_s": t_py, "compiled_s": t_c,
                     "speedup": t_py / t_c, "max_diff": diff})
        print(f"{n:>4} {m:>4} {args.iters:>6} {t_py:>10.4f} {t_c:>11.5f} {t_py / t_c:>7.1f}x {diff:>9.1e}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
