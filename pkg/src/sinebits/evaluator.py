"""Forward evaluation on two paths, plus generalized gradients.

``float``  plain IEEE-double layer-by-layer evaluation; 2^x may overflow to
           +inf, which is reported through ``ForwardResult.overflow``.
``exact``  uses the structure tags: the 2^x output is kept as an exact power
           of two and each downstream sine unit is evaluated through dyadic
           reduction, so depth-6 networks with 2^(n1 d) > 1024 still evaluate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .core import ActivationKind, CapabilityError, DomainError, Network
from .exactnum import (
    DyadicRational,
    ramp_of_phase,
    ramp_of_real_exponent,
    reduce_mod_1,
)

EvalPath = Literal["float", "exact"]

SNAP_TOL = 1e-9
GRAD_STEP = 1e-6
KINK_RADIUS = 10 * GRAD_STEP

EXACT_KINDS = ("phi", "phi_linf", "bit_extractor")


class KinkProximityError(ValueError):
    """Point lies within the exclusion radius of a ReLU kink."""


@dataclass(frozen=True)
class ForwardResult:
    values: np.ndarray  # (n, output_dim)
    overflow: np.ndarray  # (n,) bool
    path: str

    @property
    def any_overflow(self) -> bool:
        return bool(self.overflow.any())


def _activate(kind: ActivationKind, z: np.ndarray) -> np.ndarray:
    if kind is ActivationKind.RELU:
        return np.maximum(z, 0.0)
    if kind is ActivationKind.SINE:
        return np.sin(z)
    if kind is ActivationKind.POW2:
        with np.errstate(over="ignore"):
            return np.exp2(z)
    return z


def _derivative(kind: ActivationKind, z: np.ndarray, a: np.ndarray) -> np.ndarray:
    if kind is ActivationKind.RELU:
        return (z > 0).astype(np.float64)
    if kind is ActivationKind.SINE:
        return np.cos(z)
    if kind is ActivationKind.POW2:
        return math.log(2.0) * a
    return np.ones_like(z)


def _as_batch(net: Network, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1) if net.input_dim != 1 or X.shape[0] == 1 else X.reshape(-1, 1)
    if X.ndim != 2 or X.shape[1] != net.input_dim:
        raise DomainError(f"input has shape {X.shape}, network expects {net.input_dim} columns")
    return X


def _float_forward(net: Network, X: np.ndarray, start: int = 0):
    a = X
    overflow = np.zeros(X.shape[0], dtype=bool)
    with np.errstate(over="ignore", invalid="ignore"):
        for layer in net.layers[start:]:
            a = _activate(layer.activation, layer.preactivation(a))
            # inf from 2^x, or inf*0 / inf-inf downstream of it
            overflow |= ~np.isfinite(a).all(axis=1)
    return a, overflow


def forward_detailed(net: Network, X, path: EvalPath = "float") -> ForwardResult:
    X = _as_batch(net, X)
    if path == "float":
        vals, overflow = _float_forward(net, X)
        return ForwardResult(vals, overflow, "float")
    if path != "exact":
        raise ValueError(f"unknown evaluation path {path!r}")
    tags = net.structure_tags or {}
    kind = tags.get("kind")
    if kind not in EXACT_KINDS:
        raise CapabilityError(
            f"exact path needs structure tags of kind {EXACT_KINDS}, got {kind!r}"
        )
    if kind == "bit_extractor":
        vals = _exact_bit_extractor(net, X)
    else:
        vals = _exact_phi(net, X)
    return ForwardResult(vals, np.zeros(X.shape[0], dtype=bool), "exact")


def forward(net: Network, X, path: EvalPath = "float") -> np.ndarray:
    """Network output; shape (n,) for scalar-output networks, else (n, out)."""
    res = forward_detailed(net, X, path)
    return res.values[:, 0] if res.values.shape[1] == 1 else res.values


def evaluate(net: Network, X, path: EvalPath = "float") -> tuple[np.ndarray, np.ndarray]:
    """(values, overflow flags) for a batch; convenience wrapper."""
    res = forward_detailed(net, X, path)
    return res.values[:, 0], res.overflow


# -------------------------------------------------------------- exact path


def _payloads(tags) -> list[DyadicRational]:
    fb = int(tags["frac_bits"])
    return [DyadicRational(int(h, 16), fb) for h in tags["payloads"]]


def _exact_bit_extractor(net: Network, X: np.ndarray) -> np.ndarray:
    tags = net.structure_tags
    (b,) = _payloads(tags)
    k = int(tags["k"])
    out = np.empty((X.shape[0], 1))
    mask_cache: dict[float, float] = {}
    for r, x in enumerate(X[:, 0]):
        x = float(x)
        if not math.isfinite(x):
            raise DomainError(f"non-finite input {x}")
        if x not in mask_cache:
            num, den = abs(x).as_integer_ratio()
            fb = b.frac_bits + den.bit_length() - 1
            prod = b.numerator * num
            if x < 0:
                prod = -prod
            # Python's & on negative ints is an exact mod 2^fb
            t = DyadicRational(prod & ((1 << fb) - 1), fb)
            mask_cache[x] = ramp_of_phase(t, k)
        out[r, 0] = mask_cache[x]
    # final identity layer reads (ramp, 0) pairs
    last = net.layers[-1]
    v = np.zeros((X.shape[0], last.cols))
    v[:, 0] = out[:, 0]
    return last.preactivation(v)


def _exact_phi(net: Network, X: np.ndarray) -> np.ndarray:
    tags = net.structure_tags
    d, n1, M = int(tags["d"]), int(tags["n1"]), int(tags["M"])
    k = int(tags["k"])
    n_copies = int(tags["n_copies"])
    block5 = int(tags["block5"])
    C = n1 * d
    s = math.sin(float(tags["delta"]))
    payloads = _payloads(tags)

    # layers 1-2 are benign in double precision
    a = X
    for layer in net.layers[:2]:
        a = _activate(layer.activation, layer.preactivation(a))
    n = X.shape[0]
    pairs = a.reshape(n, n_copies, C, 2) if C else np.zeros((n, n_copies, 0, 2))
    phi = (pairs[..., 0] - pairs[..., 1]) / (2.0 * s)
    snapped = np.rint(phi)
    ok = (np.abs(phi - snapped) <= SNAP_TOL).all(axis=2)
    weights = 2.0 ** np.arange(C)
    exponent_float = phi @ weights + 1.0
    bits = snapped.astype(np.int64)
    idx = (bits << np.arange(C, dtype=np.int64)).sum(axis=2) + 1 if C else np.ones(
        (n, n_copies), dtype=np.int64
    )

    rho = np.empty((n, n_copies, M))
    if ok.any():
        uniq, inv = np.unique(idx[ok], return_inverse=True)
        table = np.array(
            [[ramp_of_phase(reduce_mod_1(b, int(i)), k) for b in payloads] for i in uniq]
        ).reshape(len(uniq), M)
        rho[ok] = table[inv]
    # transition band: the exponent is not an integer, evaluate at high precision
    for r, c in zip(*np.nonzero(~ok)):
        t = float(exponent_float[r, c])
        rho[r, c] = [ramp_of_real_exponent(b, t, k) for b in payloads]

    v5 = np.zeros((n, n_copies, block5))
    v5[:, :, 0:2 * M:2] = rho
    v5 = v5.reshape(n, n_copies * block5)
    out, _ = _float_forward(net, v5, start=5)
    return out


# --------------------------------------------------------------- gradients


@dataclass(frozen=True)
class GradientReport:
    analytic: np.ndarray
    numeric: np.ndarray
    max_rel_err: float
    kink_distance: float


def kink_distance(net: Network, x) -> float:
    """Linearised distance min |z| / |grad z| over all ReLU pre-activations."""
    x = _as_batch(net, x)[0]
    a = x[None, :]
    J = np.eye(net.input_dim)  # d a / d x, shape (units, d)
    best = math.inf
    with np.errstate(over="ignore", invalid="ignore"):
        for layer in net.layers:
            z = layer.preactivation(a)[0]
            Jz = layer.weights @ J
            if layer.activation is ActivationKind.RELU:
                g = np.linalg.norm(Jz, axis=1)
                with np.errstate(divide="ignore"):
                    dist = np.where(g > 0, np.abs(z) / g, np.where(z == 0, 0.0, math.inf))
                if dist.size:
                    best = min(best, float(np.nanmin(np.where(np.isnan(dist), 0.0, dist))))
            act = _activate(layer.activation, z[None, :])
            J = _derivative(layer.activation, z, act[0])[:, None] * Jz
            a = act
    return best


def analytic_gradient(net: Network, x) -> np.ndarray:
    """Reverse-mode gradient of the first output with relu'(0) = 0."""
    x = _as_batch(net, x)[0]
    a = x[None, :]
    tape = []
    with np.errstate(over="ignore", invalid="ignore"):
        for layer in net.layers:
            z = layer.preactivation(a)
            act = _activate(layer.activation, z)
            tape.append(_derivative(layer.activation, z[0], act[0]))
            a = act
        g = np.zeros(net.output_dim)
        g[0] = 1.0
        for layer, dz in zip(reversed(net.layers), reversed(tape)):
            g = layer.weights.T @ (g * dz)
    return g


def numeric_gradient(net: Network, x, h: float = GRAD_STEP) -> np.ndarray:
    x = _as_batch(net, x)[0]
    d = x.shape[0]
    pts = np.concatenate([x + h * np.eye(d), x - h * np.eye(d)])
    vals, _ = _float_forward(net, pts)
    return (vals[:d, 0] - vals[d:, 0]) / (2 * h)


def gradient(net: Network, x, h: float = GRAD_STEP) -> GradientReport:
    """Analytic vs central-difference gradient at a point away from kinks.

    Relative error uses the floor max(|a|, |n|, 1), so gradients that vanish
    on a plateau compare absolutely.
    """
    dist = kink_distance(net, x)
    if not dist > 10 * h:
        raise KinkProximityError(f"point is {dist:.3g} from a ReLU kink (need > {10 * h:g})")
    an = analytic_gradient(net, x)
    nu = numeric_gradient(net, x, h)
    denom = np.maximum(np.maximum(np.abs(an), np.abs(nu)), 1.0)
    rel = float(np.max(np.abs(an - nu) / denom)) if an.size else 0.0
    return GradientReport(an, nu, rel, dist)


__all__ = [
    "EvalPath",
    "ForwardResult",
    "GradientReport",
    "KinkProximityError",
    "analytic_gradient",
    "evaluate",
    "forward",
    "forward_detailed",
    "gradient",
    "kink_distance",
    "numeric_gradient",
]
