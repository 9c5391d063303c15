import math

import numpy as np
import pytest

from sinebits.builder import assemble, extend_linf, sample_digits
from sinebits.core import Hyperparams, RegionError, TargetFunction
from sinebits.verifier import (
    ModulusDescriptor,
    VerificationConfigError,
    check_linf_bound,
    check_lp_bound,
    check_partition,
    check_pointwise_bound,
    estimate_modulus,
    filter_grid,
    truncation_oracle,
)
from sinebits.targets import builtin_target

LIP = ModulusDescriptor.holder(1.0, 1.0)


def square():
    return TargetFunction(lambda X: X[:, 0] ** 2, 1, (2.0, 1.0), (0.0, 1.0), "x^2")


class TestOracle:
    def test_examples(self):
        f = builtin_target("x", 1)
        p = Hyperparams(1, 2, 2, 0.05)
        assert truncation_oracle(f, p, sample_digits(f, p), [[0.7]])[0] == 0.5
        p = Hyperparams(1, 4, 3, 0.01)
        assert truncation_oracle(square(), p, sample_digits(square(), p), [[0.8]])[0] == 0.5

    def test_constant(self):
        f = builtin_target("const", 2, c=0.7)
        p = Hyperparams(2, 3, 4, 0.01)
        assert np.all(truncation_oracle(f, p, sample_digits(f, p), [[0.1, 0.5], [0.9, 0.2]]) == 0.7)

    def test_region_error(self):
        f = builtin_target("x", 1)
        p = Hyperparams(1, 2, 2, 0.05)
        with pytest.raises(RegionError):
            truncation_oracle(f, p, sample_digits(f, p), [[0.48]])


class TestPointwise:
    def test_lipschitz_example(self):
        f = builtin_target("x", 1)
        p = Hyperparams(1, 4, 3, 0.01)
        rep = check_pointwise_bound(f, assemble(f, p), p, LIP, 10**4)
        assert rep.passed and rep.theoretical_bound == pytest.approx(2.0**-3 + 0.25)

    def test_profile_near_edges(self):
        f = builtin_target("x", 1)
        p = Hyperparams(1, 2, 8, 0.001)
        rep = check_pointwise_bound(f, assemble(f, p), p, LIP, 10**4)
        assert rep.passed and 0.49 < rep.measured < 0.5

    def test_constant_zero_error(self):
        f = builtin_target("const", 1, c=0.2)
        p = Hyperparams(1, 3, 3, 0.01)
        rep = check_pointwise_bound(f, assemble(f, p), p, ModulusDescriptor.holder(0, 1), 500)
        assert rep.measured == 0.0 and rep.passed

    def test_filter_drops_dust(self):
        p = Hyperparams(1, 4, 1, 0.05)
        X = np.array([[0.2], [0.2 + 1e-13], [0.25], [0.1]])
        assert filter_grid(X, p).tolist() == [[0.1]]

    def test_empty_grid(self):
        f = builtin_target("x", 1)
        p = Hyperparams(1, 2, 2, 0.45)
        with pytest.raises(VerificationConfigError):
            check_pointwise_bound(f, assemble(f, p), p, LIP, 0)

    def test_monotone_in_m(self):
        f = builtin_target("cosmix", 1)
        prev = math.inf
        for M in range(1, 7):
            p = Hyperparams(1, 5, M, 0.01)
            rep = check_pointwise_bound(f, assemble(f, p), p, ModulusDescriptor.holder(*f.holder), 2000)
            assert rep.measured <= prev + 1e-9
            prev = rep.measured


class TestLp:
    def test_corollary_instance(self):
        from sinebits.builder import HolderBudget, solve_hyperparams

        f = builtin_target("x", 1)
        p = solve_hyperparams(HolderBudget(1, 1, 0.25, "lp", p=1), 1)
        rep = check_lp_bound(f, assemble(f, p), p, LIP, 50_000, seed=3)
        assert rep.passed and rep.lp_err_estimate - 3 * rep.lp_stderr <= 0.25

    def test_reproducible(self):
        f = builtin_target("sq", 2)
        p = Hyperparams(2, 4, 4, 0.01, 2.0)
        net = assemble(f, p)
        a = check_lp_bound(f, net, p, ModulusDescriptor.holder(*f.holder), 5000, seed=11)
        b = check_lp_bound(f, net, p, ModulusDescriptor.holder(*f.holder), 5000, seed=11)
        assert a.to_dict() == b.to_dict()

    def test_sobol_sampler(self):
        f = builtin_target("x", 1)
        p = Hyperparams(1, 4, 4, 0.01)
        rep = check_lp_bound(f, assemble(f, p), p, LIP, 4096, seed=1, sampler="sobol")
        assert rep.passed

    def test_constant(self):
        f = builtin_target("const", 1)
        p = Hyperparams(1, 4, 4, 0.01)
        rep = check_lp_bound(f, assemble(f, p), p, ModulusDescriptor.holder(0, 1), 2000, seed=1)
        assert rep.lp_err_estimate == 0.0

    def test_sample_floor(self):
        f = builtin_target("x", 1)
        p = Hyperparams(1, 2, 2, 0.05)
        with pytest.raises(VerificationConfigError):
            check_lp_bound(f, assemble(f, p), p, LIP, 10, seed=0)


class TestLinf:
    def test_example_d1(self):
        f = builtin_target("x", 1)
        p = Hyperparams(1, 4, 4, 0.01)
        rep = check_linf_bound(f, extend_linf(f, p), p, LIP, 10**4)
        assert rep.passed and rep.theoretical_bound == pytest.approx(2.0**-4 + 0.25 + 0.01)

    def test_needs_extension(self):
        f = builtin_target("x", 1)
        p = Hyperparams(1, 4, 4, 0.01)
        with pytest.raises(VerificationConfigError):
            check_linf_bound(f, assemble(f, p), p, LIP, 100)


class TestPartition:
    @pytest.mark.parametrize("N,d", [(2, 1), (4, 2), (1, 1), (1, 3), (5, 2)])
    def test_examples(self, N, d):
        assert check_partition(Hyperparams(d, N, 1, 0.1 / N))


class TestModulus:
    def test_holder_dominates(self):
        f = builtin_target("sq", 2)
        mod = estimate_modulus(f, [0.01, 0.1, 0.5, 1.0], 5000, seed=2)
        assert mod.advisory
        for r, v in zip(mod.radii, mod.values):
            assert v <= f.modulus(r) + 1e-12
        assert list(mod.values) == sorted(mod.values)

    def test_constant(self):
        mod = estimate_modulus(builtin_target("const", 1), [0.1, 0.5], 1000, seed=0)
        assert mod.values == (0.0, 0.0)

    def test_identity_half(self):
        mod = estimate_modulus(builtin_target("x", 1), [0.5], 200_000, seed=0)
        assert 0.45 < mod(0.5) <= 0.5

    def test_radii_sorted(self):
        with pytest.raises(VerificationConfigError):
            estimate_modulus(builtin_target("x", 1), [0.5, 0.1], 10, seed=0)
