"""Monte Carlo L^p error against the accuracy target over a budget sweep.

    python scripts/lp_sweep.py --samples 200000 --csv lp_sweep.csv
"""

import argparse
import csv
import sys

from sinebits.builder import HolderBudget, assemble, solve_hyperparams
from sinebits.core import TargetFunction
from sinebits.targets import builtin_target
from sinebits.verifier import ModulusDescriptor, check_lp_bound


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--target", default="norm")
    ap.add_argument("--eps", type=float, nargs="+", default=[0.5, 0.25, 0.1])
    ap.add_argument("--dims", type=int, nargs="+", default=[1, 2])
    ap.add_argument("--p", type=float, nargs="+", default=[1.0, 2.0])
    ap.add_argument("--mu", type=float, default=1.0)
    ap.add_argument("--samples", type=int, default=200_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--csv", help="write rows here as well")
    args = ap.parse_args()

    cols = ["eps", "d", "p", "N", "M", "delta", "estimate", "stderr", "bound", "passed"]
    rows = []
    for d in args.dims:
        base = builtin_target(args.target, d)
        f = TargetFunction(base.oracle, d, (args.mu, 1.0), base.range, base.name)
        for eps in args.eps:
            for p in args.p:
                hp = solve_hyperparams(HolderBudget(args.mu, 1.0, eps, "lp", p=p), d)
                rep = check_lp_bound(f, assemble(f, hp), hp, ModulusDescriptor.holder(args.mu, 1.0),
                                     args.samples, args.seed)
                rows.append([eps, d, p, hp.N, hp.M, hp.delta, rep.lp_err_estimate, rep.lp_stderr,
                             rep.theoretical_bound, rep.lp_err_estimate - 3 * rep.lp_stderr <= eps])
                print(" ".join(f"{c}={v:.4g}" if isinstance(v, float) else f"{c}={v}"
                               for c, v in zip(cols, rows[-1])))
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(cols)
            w.writerows(rows)
    return 0 if all(r[-1] for r in rows) else 1


if __name__ == "__main__":
    sys.exit(main())
