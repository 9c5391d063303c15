"""Acceptance criteria, one test per criterion; each prints a PASS/FAIL line."""

import json
import math
import time

import numpy as np
import pytest

from sinebits.builder import (
    HolderBudget,
    assemble,
    build_bit_extractor,
    expected_shape,
    extend_linf,
    sample_digits,
    solve_hyperparams,
)
from sinebits.cli import main as cli_main
from sinebits.core import Hyperparams, TargetFunction, audit_architecture
from sinebits.evaluator import KinkProximityError, forward, forward_detailed, gradient
from sinebits.targets import builtin_target
from sinebits.verifier import (
    ModulusDescriptor,
    check_linf_bound,
    check_lp_bound,
    check_partition,
    filter_grid,
    grid_points,
    truncation_oracle,
)
from tests.acceptance_log import record

HOLDER_BUILTINS = ("x", "norm", "sq", "cosmix")


def norm_mu1(d):
    base = builtin_target("norm", d)
    return TargetFunction(base.oracle, d, (1.0, 1.0), base.range, "norm")


def test_c01_bit_extraction():
    rng = np.random.default_rng(101)
    t0 = time.perf_counter()
    worst = 0.0
    for k in range(1, 17):
        xs = 2.0 ** np.arange(1, k + 1)
        for _ in range(100):
            bits = rng.integers(0, 2, k)
            out = forward(build_bit_extractor(bits.tolist()), xs, "exact")
            worst = max(worst, float(np.max(np.abs(out - bits))))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-9 and dt < 10
    record(1, ok, f"bit extraction k=1..16 x100 strings, max |g(2^i)-b_i| = {worst:.1e}, {dt:.2f}s (< 10s)")
    assert ok


def test_c02_partition():
    t0 = time.perf_counter()
    failures = [(N, d) for N in range(1, 9) for d in range(1, 4)
                if not check_partition(Hyperparams(d, N, 1, 0.1 / N))]
    dt = time.perf_counter() - t0
    ok = not failures and dt < 30
    record(2, ok, f"partition injectivity (N,d) in 1..8 x 1..3, failures={failures}, {dt:.2f}s (< 30s)")
    assert ok


def test_c03_architecture_audit():
    rng = np.random.default_rng(303)
    bad = []
    for _ in range(50):
        d, N, M = int(rng.integers(1, 4)), int(rng.integers(2, 17)), int(rng.integers(1, 13))
        p = Hyperparams(d, N, M, 0.1 / N)
        got = audit_architecture(assemble(builtin_target("norm", d), p))
        want = (6, max(2 * d * math.ceil(math.log2(N)), 2 * M))
        if got != want:
            bad.append((d, N, M, got, want))
    record(3, not bad, f"architecture audit on 50 random instances, mismatches={len(bad)}")
    assert not bad


def test_c04_oracle_equivalence():
    rng = np.random.default_rng(404)
    worst, points = 0.0, 0
    for inst in range(20):
        d = 1 if inst < 10 else 2
        name = HOLDER_BUILTINS[inst % 4]
        N, M = int(rng.integers(1, 9)), int(rng.integers(1, 9))
        p = Hyperparams(d, N, M, float(rng.uniform(0.02, 0.3)) / N)
        f = builtin_target(name, d)
        table = sample_digits(f, p)
        net = assemble(f, p, table)
        X = filter_grid(grid_points(d, 10**4 if d == 1 else 101), p)
        diff = np.abs(forward(net, X, "exact") - truncation_oracle(f, p, table, X))
        worst = max(worst, float(diff.max()))
        points += X.shape[0]
    ok = worst <= 1e-9
    record(4, ok, f"oracle equivalence, 20 instances / {points} off-region grid points, max diff {worst:.1e} (<= 1e-9)")
    assert ok


def test_c05_pointwise_bound():
    violations, checks, tightest = [], 0, math.inf
    for name in HOLDER_BUILTINS:
        for d in (1, 2):
            f = builtin_target(name, d)
            mu, alpha = f.holder
            for N in (2, 5, 8):
                for M in (2, 4, 8):
                    for frac in (0.01, 0.1, 0.5):
                        p = Hyperparams(d, N, M, frac / N)
                        X = filter_grid(grid_points(d, 2001 if d == 1 else 101), p)
                        err = float(np.max(np.abs(f(X) - forward(assemble(f, p), X, "exact"))))
                        bound = mu * d ** (alpha / 2) * 2.0**-M + mu * (math.sqrt(d) / N) ** alpha
                        checks += 1
                        tightest = min(tightest, bound + 1e-8 - err)
                        if err > bound + 1e-8:
                            violations.append((name, d, N, M, frac, err, bound))
    record(5, not violations, f"pointwise bound, {checks} checks over (N,M,delta) 3x3x3 sweeps, "
           f"violations={len(violations)}, min slack {tightest:.3g}")
    assert not violations


def test_c06_range_enclosure():
    rng = np.random.default_rng(606)
    worst = 0.0
    cases = [("x", 1, 6, 5), ("cosmix", 1, 9, 6), ("sq", 2, 5, 4), ("norm", 2, 8, 6), ("cosmix", 3, 3, 4)]
    for name, d, N, M in cases:
        f = builtin_target(name, d)
        p = Hyperparams(d, N, M, 0.2 / N)
        table = sample_digits(f, p)
        X = rng.random((10**5, d))
        X[:1000] = np.clip(np.floor(X[:1000] * N) / N + 1 / N - 0.5 * p.delta, 0, 1)  # force some points into Omega
        phi = forward(assemble(f, p, table), X, "exact")
        worst = max(worst, table.f_lo - phi.min(), phi.max() - table.f_hi)
    ok = worst <= 1e-9
    record(6, ok, f"range enclosure on 5 x 10^5 points incl. trifling region, max excess {max(worst, 0):.1e}")
    assert ok


LP_CASES = [(eps, d, p) for eps in (0.5, 0.25, 0.1) for d in (1, 2) for p in (1, 2)]
LP_SEED = 777


@pytest.mark.parametrize("eps,d,p", LP_CASES)
def test_c07_lp_bound(eps, d, p):
    f = norm_mu1(d)
    params = solve_hyperparams(HolderBudget(1.0, 1.0, eps, "lp", p=p), d)
    t0 = time.perf_counter()
    rep = check_lp_bound(f, assemble(f, params), params, ModulusDescriptor.holder(1, 1), 10**6, LP_SEED)
    dt = time.perf_counter() - t0
    lower = rep.lp_err_estimate - 3 * rep.lp_stderr
    ok = lower <= eps and rep.passed and dt < 120
    record(7, ok, f"Lp eps={eps} d={d} p={p}: est {rep.lp_err_estimate:.4g} +- {rep.lp_stderr:.2g} "
           f"(N={params.N}, M={params.M}), est-3se <= eps, {dt:.1f}s")
    assert ok


@pytest.mark.parametrize("d", [1, 2])
def test_c08_linf_extension(d):
    f = norm_mu1(d)
    params = solve_hyperparams(HolderBudget(1.0, 1.0, 0.5, "linf"), d)
    net = extend_linf(f, params)
    inner_n1 = params.n1
    W = max(2 * d * inner_n1, 2 * params.M)
    shape_ok = audit_architecture(net) == (2 * d + 6, 3**d * (W + 4)) == expected_shape(params, True)
    rep = check_linf_bound(f, net, params, ModulusDescriptor.holder(1, 1), 10**4 if d == 1 else 401)
    ok = shape_ok and rep.passed
    record(8, ok, f"linf d={d}: sup {rep.measured:.4g} <= bound {rep.theoretical_bound:.4g}, "
           f"(depth, width) = {audit_architecture(net)}")
    assert ok


def test_c09_overflow_divergence():
    f = builtin_target("norm", 2)
    p = Hyperparams(2, 32, 4, 0.1 / 32)
    table = sample_digits(f, p)
    net = assemble(f, p, table)
    X = filter_grid(grid_points(2, 65), p)
    res = forward_detailed(net, X, "float")
    exact = forward(net, X, "exact")
    oracle = truncation_oracle(f, p, table, X)
    n_over = int(res.overflow.sum())
    float_err = np.abs(res.values[:, 0] - oracle)
    n_wrong = int(np.sum(~(float_err <= 1e-9)))
    exact_err = float(np.max(np.abs(exact - oracle)))
    ok = n_over > 0 and exact_err <= 1e-9
    record(9, ok, f"d=2 N=32: float path overflows at {n_over} / {len(X)} points and is wrong at {n_wrong}; "
           f"exact path max |Phi - oracle| = {exact_err:.1e}")
    assert ok


def test_c10_gradient():
    net = assemble(builtin_target("x", 1), Hyperparams(1, 4, 4, 0.05))
    rng = np.random.default_rng(1010)
    accepted = agree = rejected = 0
    while accepted < 10**4:
        x = rng.random(1)
        try:
            rep = gradient(net, x)
        except KinkProximityError:
            rejected += 1
            continue
        accepted += 1
        agree += rep.max_rel_err <= 1e-4
    frac = agree / accepted
    ok = frac >= 0.99
    record(10, ok, f"gradient agreement {frac:.2%} of 10^4 non-kink points (>= 99%), {rejected} resampled")
    assert ok


def test_c11_determinism(tmp_path):
    cfg = {"target": "cosmix", "d": 2, "mode": "lp", "budget": {"mu": 2.3, "alpha": 1, "epsilon": 0.8},
           "samples": 20000, "grid": 101, "seed": 12345}
    c = tmp_path / "cfg.json"
    c.write_text(json.dumps(cfg))
    outs = []
    for name in ("first", "second"):
        out = tmp_path / name
        assert cli_main(["synthesize", "--config", str(c), "--out", str(out)]) == 0
        assert cli_main(["verify", "--config", str(c), "--out", str(out)]) == 0
        outs.append(out)
    files = ("weights.json", "manifest.json", "report.json", "samples.csv")
    same = all((outs[0] / f).read_bytes() == (outs[1] / f).read_bytes() for f in files)
    record(11, same, f"determinism: {', '.join(files)} byte-identical across two runs")
    assert same


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-v"]))
