"""Independent oracles and statistical checks for constructed networks."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy.stats import qmc

from .builder import DigitTable, build_Phi1, sample_digits
from .core import (
    Hyperparams,
    Network,
    RegionError,
    TargetFunction,
    cells_of,
    code_of_cell,
    codes_of_cells,
    codes_to_indices,
    iter_cells,
    slab_mask,
)
from .evaluator import evaluate, forward

SUP_SLACK = 1e-8
BOUNDARY_DUST = 1e-12
MIN_LP_SAMPLES = 1000


class VerificationConfigError(ValueError):
    """Verification request is malformed (empty grid, too few samples, ...)."""


@dataclass(frozen=True)
class ModulusDescriptor:
    """Continuity modulus: exact Hölder form, or an empirical lower estimate."""

    kind: str
    mu: float = 0.0
    alpha: float = 1.0
    radii: tuple[float, ...] = ()
    values: tuple[float, ...] = ()

    @classmethod
    def holder(cls, mu: float, alpha: float) -> "ModulusDescriptor":
        return cls("holder", mu=float(mu), alpha=float(alpha))

    @classmethod
    def for_target(cls, f: TargetFunction) -> "ModulusDescriptor":
        if f.holder is None:
            raise VerificationConfigError(f"target {f.name!r} has no Hölder descriptor")
        return cls.holder(*f.holder)

    @property
    def advisory(self) -> bool:
        return self.kind != "holder"

    def __call__(self, r: float) -> float:
        if self.kind == "holder":
            return self.mu * float(r) ** self.alpha
        # step function through the sampled table; beyond the last radius use the last value
        pos = np.searchsorted(np.asarray(self.radii), r, side="right") - 1
        if pos < 0:
            return 0.0
        return float(self.values[pos])


@dataclass
class ErrorReport:
    check: str
    measured: float
    theoretical_bound: float
    passed: bool
    advisory: bool = False
    n_samples: int = 0
    seed: int | None = None
    sup_err_off_region: float | None = None
    lp_err_estimate: float | None = None
    lp_stderr: float | None = None
    linf_err: float | None = None
    p: float | None = None
    details: dict = field(default_factory=dict)
    samples: dict | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        out = asdict(self)
        out.pop("samples")
        return out


# ------------------------------------------------------------------ bounds


def trunc_scale(modulus: ModulusDescriptor, params: Hyperparams, table: DigitTable | None) -> float:
    """Scale of the digit-truncation term: omega(sqrt d), or the range width if larger."""
    w = modulus(math.sqrt(params.d))
    if table is not None:
        w = max(w, table.f_hi - table.f_lo)
    return w


def pointwise_bound(modulus, params: Hyperparams, table: DigitTable | None = None) -> float:
    d = params.d
    return trunc_scale(modulus, params, table) * 2.0**-params.M + modulus(math.sqrt(d) / params.N)


def lp_bound(modulus, params: Hyperparams, p: float, table: DigitTable | None = None) -> float:
    d = params.d
    vol = 1.0 - (1.0 - params.N * params.delta) ** d
    return pointwise_bound(modulus, params, table) + modulus(math.sqrt(d)) * vol ** (1.0 / p)


def linf_bound(modulus, params: Hyperparams, table: DigitTable | None = None) -> float:
    """Whole-cube bound for the shifted-copy extension; ``params`` carry the outer delta."""
    return pointwise_bound(modulus, params, table) + params.d * modulus(params.delta)


# ----------------------------------------------------------------- oracles


def truncation_oracle(f: TargetFunction, params: Hyperparams, table: DigitTable, X) -> np.ndarray:
    """Piecewise-constant value the network realises off the trifling region.

    Pure table lookup: no network evaluation.  Raises RegionError if any
    point lies in the trifling region.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    alpha, off = cells_of(X, params)
    if not off.all():
        raise RegionError(f"{int((~off).sum())} points lie in the trifling region")
    idx = codes_to_indices(codes_of_cells(alpha, params.n1))
    weights = 2.0 ** -np.arange(1, params.M + 1)
    frac = table.digits[idx - 1].astype(np.float64) @ weights
    return table.f_lo + (table.f_hi - table.f_lo) * frac


def grid_points(d: int, density: int) -> np.ndarray:
    axis = np.linspace(0.0, 1.0, density)
    return np.stack(np.meshgrid(*[axis] * d, indexing="ij"), axis=-1).reshape(-1, d)


def filter_grid(X: np.ndarray, params: Hyperparams) -> np.ndarray:
    """Drop points in the trifling region or within dust of a slab boundary."""
    keep = ~slab_mask(X, params.N, params.delta).any(axis=1)
    lines = np.arange(1, params.N + 1) / params.N
    for edge in (lines, lines - params.delta):
        near = np.abs(X[:, :, None] - edge[None, None, :]) < BOUNDARY_DUST
        keep &= ~near.any(axis=(1, 2))
    return X[keep]


def _sup_check(name, f, net, X, bound, advisory, path="exact", extra=None):
    phi = forward(net, X, path)
    fx = f(X)
    err = np.abs(fx - phi)
    sup = float(err.max())
    rep = ErrorReport(
        check=name,
        measured=sup,
        theoretical_bound=bound,
        passed=bool(sup <= bound + SUP_SLACK),
        advisory=advisory,
        n_samples=int(X.shape[0]),
        samples={"x": X, "f": fx, "phi": phi, "abs_err": err},
    )
    if extra:
        for k, v in extra.items():
            setattr(rep, k, v)
    return rep


def check_pointwise_bound(
    f: TargetFunction,
    net: Network,
    params: Hyperparams,
    modulus: ModulusDescriptor,
    grid_density: int,
    table: DigitTable | None = None,
) -> ErrorReport:
    X = filter_grid(grid_points(params.d, grid_density), params)
    if X.shape[0] == 0:
        raise VerificationConfigError("every grid point falls in the trifling region")
    bound = pointwise_bound(modulus, params, table)
    rep = _sup_check("pointwise", f, net, X, bound, modulus.advisory)
    rep.sup_err_off_region = rep.measured
    rep.samples["in_omega"] = np.zeros(X.shape[0], dtype=bool)
    return rep


def check_linf_bound(
    f: TargetFunction,
    net: Network,
    params: Hyperparams,
    modulus: ModulusDescriptor,
    grid_density: int,
    table: DigitTable | None = None,
) -> ErrorReport:
    if (net.structure_tags or {}).get("kind") != "phi_linf":
        raise VerificationConfigError("check_linf_bound needs a network from extend_linf")
    X = grid_points(params.d, grid_density)
    bound = linf_bound(modulus, params, table)
    rep = _sup_check("linf", f, net, X, bound, modulus.advisory)
    rep.linf_err = rep.measured
    rep.samples["in_omega"] = slab_mask(X, params.N, params.delta).any(axis=1)
    return rep


def _eval_with_fallback(net: Network, X: np.ndarray, chunk: int = 200_000) -> np.ndarray:
    """Float path where it is trustworthy, exact path for the rest."""
    tags = net.structure_tags or {}
    k = int(tags.get("k", 0))
    out = np.empty(X.shape[0])
    for lo in range(0, X.shape[0], chunk):
        Xc = X[lo:lo + chunk]
        if tags.get("kind") in ("phi", "phi_linf") and k > 40:
            out[lo:lo + chunk] = forward(net, Xc, "exact")
            continue
        vals, over = evaluate(net, Xc, "float")
        if over.any() and tags:
            vals[over] = forward(net, Xc[over], "exact")
        out[lo:lo + chunk] = vals
    return out


def sample_cube(d: int, n: int, seed: int, method: str = "random") -> np.ndarray:
    if method == "random":
        return np.random.default_rng(seed).random((n, d))
    if method == "sobol":
        return qmc.Sobol(d, scramble=True, seed=seed).random(n)
    raise VerificationConfigError(f"unknown sampler {method!r}")


def check_lp_bound(
    f: TargetFunction,
    net: Network,
    params: Hyperparams,
    modulus: ModulusDescriptor,
    n_samples: int,
    seed: int,
    p: float | None = None,
    table: DigitTable | None = None,
    sampler: str = "random",
) -> ErrorReport:
    """Monte Carlo L^p error over the whole cube, trifling region included.

    Passes iff estimate - 3 * stderr <= bound; the stderr of the p-th root
    comes from the delta method.
    """
    p = params.p if p is None else p
    if not (1 <= p < math.inf):
        raise VerificationConfigError(f"Monte Carlo L^p check needs 1 <= p < inf, got {p}")
    if n_samples < MIN_LP_SAMPLES:
        raise VerificationConfigError(f"need at least {MIN_LP_SAMPLES} samples, got {n_samples}")
    X = sample_cube(params.d, n_samples, seed, sampler)
    phi = _eval_with_fallback(net, X)
    fx = f(X)
    err = np.abs(fx - phi)
    powed = err**p
    m = float(np.mean(powed))
    se_m = float(np.std(powed, ddof=1)) / math.sqrt(n_samples)
    est = m ** (1.0 / p)
    se = (1.0 / p) * m ** (1.0 / p - 1.0) * se_m if m > 0 else 0.0
    bound = lp_bound(modulus, params, p, table)
    return ErrorReport(
        check="lp",
        measured=est,
        theoretical_bound=bound,
        passed=bool(est - 3 * se <= bound),
        advisory=modulus.advisory,
        n_samples=n_samples,
        seed=int(seed),
        lp_err_estimate=est,
        lp_stderr=se,
        p=p,
        details={"sampler": sampler},
        samples={
            "x": X,
            "f": fx,
            "phi": phi,
            "abs_err": err,
            "in_omega": slab_mask(X, params.N, params.delta).any(axis=1),
        },
    )


# ----------------------------------------------------------- partition


def cell_sample_points(alpha: Sequence[int], params: Hyperparams) -> np.ndarray:
    """3^d points per cell: both closed endpoints and the midpoint in each coordinate."""
    N, delta = params.N, params.delta
    per_axis = []
    for a in alpha:
        lo, hi = a / N, (a + 1) / N - delta
        per_axis.append([lo, 0.5 * (lo + hi), hi])
    return np.stack(np.meshgrid(*per_axis, indexing="ij"), axis=-1).reshape(-1, len(alpha))


def check_partition(params: Hyperparams, tol: float = 1e-9) -> bool:
    """Coordinate encoder: constant on each cell, equal to its code, injective."""
    net = build_Phi1(params)
    seen = set()
    for alpha in iter_cells(params):
        pts = cell_sample_points(alpha, params)
        out = forward(net, pts, "float").reshape(pts.shape[0], -1)
        code = np.array(code_of_cell(alpha, params), dtype=np.float64)
        if out.shape[1] != code.shape[0] or np.any(np.abs(out - code[None, :]) > tol):
            return False
        seen.add(tuple(code.astype(int)))
    return len(seen) == params.N**params.d


# --------------------------------------------------------------- modulus


def estimate_modulus(
    f: TargetFunction, radii: Sequence[float], n_pairs: int, seed: int
) -> ModulusDescriptor:
    """Empirical lower estimate of the continuity modulus from random pairs."""
    radii = [float(r) for r in radii]
    if any(r <= 0 for r in radii) or radii != sorted(radii):
        raise VerificationConfigError("radii must be positive and sorted")
    rng = np.random.default_rng(seed)
    d = f.d
    vals = []
    running = 0.0
    for r in radii:
        X = rng.random((n_pairs, d))
        u = rng.standard_normal((n_pairs, d))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        u *= rng.random((n_pairs, 1)) ** (1.0 / d)
        # clipping to the cube only shortens the displacement
        Y = np.clip(X + r * u, 0.0, 1.0)
        running = max(running, float(np.max(np.abs(f(X) - f(Y)))))
        vals.append(running)
    return ModulusDescriptor("empirical", radii=tuple(radii), values=tuple(vals))


__all__ = [
    "ErrorReport",
    "ModulusDescriptor",
    "VerificationConfigError",
    "check_linf_bound",
    "check_lp_bound",
    "check_partition",
    "check_pointwise_bound",
    "estimate_modulus",
    "linf_bound",
    "lp_bound",
    "pointwise_bound",
    "sample_digits",
    "truncation_oracle",
]
