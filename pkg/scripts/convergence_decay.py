"""Decay of J(P_k) - J_min for every method on seeded random instances.

Writes a long-format CSV (seed, method, iter, J, residual, alpha, J_min) ready
for a semilog plot of |J - J_min| against iter. J_min is the best value found
by a 20-start trust-region multistart. For oda-convex the J column holds the
relaxed objective.
"""

import argparse
import csv

from quadgrass.cli import BENCH_METHODS, CONVEX_METHODS, RunConfig, resolve_init, run_method
from quadgrass.instances import random_instance
from quadgrass.solvers import SolverOptions, multistart


def decay_rows(seed, M, m, opts):
    inst = random_instance(M, m, seed)
    J_min = multistart(inst, 20, seed=seed, opts=opts)[0].objective
    cfg = RunConfig(command="bench", options=opts)
    for method in BENCH_METHODS:
        init = "uniform" if method == "oda-convex" else "spectral-C"
        start = resolve_init(init, inst, method in CONVEX_METHODS, opts)
        rep = run_method(inst, method, start, cfg)
        for row in rep.trace:
            yield seed, method, row.iter, row.objective, row.residual, row.step, J_min


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--M", type=int, default=12)
    p.add_argument("--m", type=int, default=4)
    p.add_argument("--seeds", type=int, default=3)
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--out", default="decay.csv")
    args = p.parse_args(argv)

    opts = SolverOptions(max_iter=args.max_iter)
    rows = [r for s in range(args.seeds) for r in decay_rows(s, args.M, args.m, opts)]
    with open(args.out, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(("seed", "method", "iter", "J", "residual", "alpha", "J_min"))
        w.writerows((s, meth, k, repr(J), repr(r), repr(a), repr(Jm)) for s, meth, k, J, r, a, Jm in rows)
    print(f"wrote {len(rows)} rows to {args.out}")


if __name__ == "__main__":
    main()
