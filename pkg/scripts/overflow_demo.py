"""Float vs exact evaluation on an instance whose 2^x exponent reaches 1024.

    python scripts/overflow_demo.py --N 32 --d 2
"""

import argparse

import numpy as np

from sinebits.builder import assemble, sample_digits
from sinebits.core import Hyperparams
from sinebits.evaluator import forward, forward_detailed
from sinebits.targets import builtin_target
from sinebits.verifier import filter_grid, grid_points, truncation_oracle


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    ap.add_argument("--d", type=int, default=2)
    ap.add_argument("--N", type=int, default=32)
    ap.add_argument("--M", type=int, default=4)
    ap.add_argument("--grid", type=int, default=65)
    args = ap.parse_args()

    f = builtin_target("norm", args.d)
    p = Hyperparams(args.d, args.N, args.M, 0.1 / args.N)
    table = sample_digits(f, p)
    net = assemble(f, p, table)
    X = filter_grid(grid_points(args.d, args.grid), p)
    oracle = truncation_oracle(f, p, table, X)
    flt = forward_detailed(net, X, "float")
    ex = forward(net, X, "exact")

    print(f"d={p.d} N={p.N} n1={p.n1} code space k=2^{p.code_length}={p.code_space}")
    print(f"off-region grid points: {len(X)}")
    print(f"float overflow flags:   {int(flt.overflow.sum())}")
    wrong = ~(np.abs(flt.values[:, 0] - oracle) <= 1e-9)
    print(f"float path wrong:       {int(wrong.sum())}")
    print(f"exact max |Phi-oracle|: {np.max(np.abs(ex - oracle)):.3e}")
    i = int(np.argmax(flt.overflow)) if flt.overflow.any() else 0
    print(f"example x={X[i].tolist()}: float={float(flt.values[i, 0])!r} exact={float(ex[i])!r} oracle={float(oracle[i])!r}")


if __name__ == "__main__":
    main()
