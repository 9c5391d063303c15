"""Domain types, cube geometry and structural audits.

The unit cube [0,1]^d is split into N^d closed cells

    cell(alpha) = prod_i [alpha_i/N, (alpha_i+1)/N - delta]

and the *trifling region*: points with some coordinate in an open slab
(j/N - delta, j/N), j = 1..N.  The point x_i = 1 is counted in the trifling
region (it is the closed endpoint of no cell).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Sequence

import numpy as np


class DomainError(ValueError):
    """A point lies outside [0,1]^d."""


class RegionError(ValueError):
    """A point lies in the trifling region where no cell applies."""


class StructureError(ValueError):
    """Layer shapes do not compose."""


class CapabilityError(RuntimeError):
    """The requested operation is not supported for this input."""


def ceil_log2(n: int) -> int:
    """Smallest integer m >= 0 with 2**m >= n, in pure integer arithmetic."""
    if n < 1:
        raise ValueError(f"ceil_log2 needs n >= 1, got {n}")
    return (n - 1).bit_length()


@dataclass(frozen=True)
class Hyperparams:
    d: int
    N: int
    M: int
    delta: float
    p: float = 1.0
    n1: int = field(init=False)

    def __post_init__(self):
        for name in ("d", "N", "M"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or isinstance(v, bool) or v < 1:
                raise ValueError(f"{name} must be a positive integer, got {v!r}")
        if not (self.delta > 0 and self.N * self.delta < 1):
            raise ValueError(f"need 0 < delta < 1/N, got delta={self.delta}, N={self.N}")
        if not (self.p >= 1):
            raise ValueError(f"p must be in [1, inf], got {self.p}")
        object.__setattr__(self, "n1", ceil_log2(int(self.N)))

    @property
    def code_length(self) -> int:
        return self.n1 * self.d

    @property
    def code_space(self) -> int:
        """Number of slots in the code index space, 2^(n1*d)."""
        return 1 << self.code_length

    def replace(self, **changes) -> "Hyperparams":
        kw = dict(d=self.d, N=self.N, M=self.M, delta=self.delta, p=self.p)
        kw.update(changes)
        return Hyperparams(**kw)


class ActivationKind(str, Enum):
    RELU = "relu"
    SINE = "sine"
    POW2 = "pow2"
    IDENTITY = "identity"


@dataclass(frozen=True)
class AffineLayer:
    weights: np.ndarray
    bias: np.ndarray
    activation: ActivationKind

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        b = np.asarray(self.bias, dtype=np.float64).reshape(-1)
        if w.ndim != 2:
            raise StructureError(f"weights must be 2-D, got shape {w.shape}")
        if b.shape[0] != w.shape[0]:
            raise StructureError(f"bias length {b.shape[0]} != weight rows {w.shape[0]}")
        w.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "bias", b)
        object.__setattr__(self, "activation", ActivationKind(self.activation))

    @property
    def rows(self) -> int:
        return self.weights.shape[0]

    @property
    def cols(self) -> int:
        return self.weights.shape[1]

    def preactivation(self, x: np.ndarray) -> np.ndarray:
        """Affine part on a batch ``x`` of shape (n, cols)."""
        if self.cols == 0:
            return np.broadcast_to(self.bias, (x.shape[0], self.rows)).copy()
        with np.errstate(invalid="ignore", over="ignore"):
            return x @ self.weights.T + self.bias


@dataclass(frozen=True)
class Network:
    layers: tuple[AffineLayer, ...]
    input_dim: int
    structure_tags: dict[str, Any] | None = None

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        prev = self.input_dim
        for idx, layer in enumerate(self.layers):
            if layer.cols != prev:
                raise StructureError(
                    f"layer {idx} expects {layer.cols} inputs but receives {prev}"
                )
            prev = layer.rows

    @property
    def output_dim(self) -> int:
        return self.layers[-1].rows if self.layers else self.input_dim

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def width(self) -> int:
        return max([self.input_dim] + [layer.rows for layer in self.layers])

    def activations(self) -> list[str]:
        return [layer.activation.value for layer in self.layers]


@dataclass(frozen=True)
class TargetFunction:
    """Point oracle on [0,1]^d with optional Hölder constants and range.

    ``oracle`` must accept a batch of shape (n, d) and return shape (n,).
    A Hölder constant ``mu = 0`` is allowed and means the function is constant.
    """

    oracle: Callable[[np.ndarray], np.ndarray]
    d: int
    holder: tuple[float, float] | None = None
    range: tuple[float, float] | None = None
    name: str = "custom"

    def __post_init__(self):
        if self.holder is not None:
            mu, alpha = self.holder
            if mu < 0 or not (0 < alpha <= 1):
                raise ValueError(f"invalid Hölder descriptor (mu={mu}, alpha={alpha})")
        if self.range is not None and not self.range[0] <= self.range[1]:
            raise ValueError(f"invalid range {self.range}")

    def __call__(self, x) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        return np.asarray(self.oracle(x), dtype=np.float64).reshape(-1)

    def modulus(self, r):
        """Hölder bound mu * r^alpha on the continuity modulus."""
        if self.holder is None:
            raise CapabilityError(f"target {self.name!r} has no Hölder descriptor")
        mu, alpha = self.holder
        return mu * np.power(r, alpha)


# ---------------------------------------------------------------- geometry


def _check_point(x, d: int) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64).reshape(-1)
    if x.shape[0] != d:
        raise DomainError(f"point has dimension {x.shape[0]}, expected {d}")
    if np.any(~np.isfinite(x)) or np.any(x < 0) or np.any(x > 1):
        raise DomainError(f"point {x.tolist()} lies outside [0,1]^{d}")
    return x


def slab_mask(x: np.ndarray, N: int, delta: float) -> np.ndarray:
    """Elementwise membership of coordinates in the open slabs, or x >= 1.

    Vectorised over any array shape.  Neighbouring grid lines are re-checked
    because ``floor(x*N)`` can land one line off near grid points.
    """
    x = np.asarray(x, dtype=np.float64)
    j = np.floor(x * N) + 1.0
    mask = np.zeros(x.shape, dtype=bool)
    for jj in (j - 1.0, j, j + 1.0):
        line = jj / N
        mask |= (jj >= 1) & (jj <= N) & (x > line - delta) & (x < line)
    return mask | (x >= 1.0)


def in_trifling_region(x, params: Hyperparams) -> bool:
    x = _check_point(x, params.d)
    return bool(np.any(slab_mask(x, params.N, params.delta)))


def cell_of(x, params: Hyperparams) -> tuple[int, ...]:
    x = _check_point(x, params.d)
    if np.any(slab_mask(x, params.N, params.delta)):
        raise RegionError(f"point {x.tolist()} lies in the trifling region")
    N = params.N
    alpha = []
    for xi in x:
        a = min(int(math.floor(xi * N)), N - 1)
        # guard against floor landing one cell off at a grid point
        if xi < a / N:
            a -= 1
        elif a + 1 < N and xi >= (a + 1) / N:
            a += 1
        alpha.append(a)
    return tuple(alpha)


def cells_of(X: np.ndarray, params: Hyperparams) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised ``cell_of``: returns (alpha array (n, d), off_region mask (n,)).

    Rows inside the trifling region get alpha = -1.
    """
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    N = params.N
    bad = slab_mask(X, N, params.delta).any(axis=1)
    alpha = np.clip(np.floor(X * N).astype(np.int64), 0, N - 1)
    alpha = np.where(X < alpha / N, alpha - 1, alpha)
    alpha = np.where((alpha + 1 < N) & (X >= (alpha + 1) / N), alpha + 1, alpha)
    alpha[bad] = -1
    return alpha, ~bad


def iter_cells(params: Hyperparams):
    """All cell indices in lexicographic order (last coordinate fastest)."""
    return np.array(np.meshgrid(*[np.arange(params.N)] * params.d, indexing="ij")).reshape(
        params.d, -1
    ).T


def code_of_cell(alpha: Sequence[int], params: Hyperparams) -> tuple[int, ...]:
    """Binary code produced by the coordinate-encoding stage on a cell.

    Bit (i, n) is 1 exactly when floor(alpha_i * 2^n / 2^n1) is even, i.e. the
    complement of the n-th most significant of the n1 binary digits of alpha_i.
    """
    alpha = tuple(int(a) for a in alpha)
    if len(alpha) != params.d or any(not 0 <= a < params.N for a in alpha):
        raise ValueError(f"invalid cell index {alpha} for N={params.N}, d={params.d}")
    n1 = params.n1
    bits = []
    for a in alpha:
        for n in range(1, n1 + 1):
            bits.append(1 - ((a >> (n1 - n)) & 1))
    return tuple(bits)


def codes_of_cells(alpha: np.ndarray, n1: int) -> np.ndarray:
    """Vectorised ``code_of_cell`` over an (n, d) integer array."""
    alpha = np.atleast_2d(np.asarray(alpha, dtype=np.int64))
    shifts = np.arange(n1 - 1, -1, -1)
    bits = 1 - ((alpha[:, :, None] >> shifts[None, None, :]) & 1)
    return bits.reshape(alpha.shape[0], -1).astype(np.int64)


def code_to_index(code: Sequence[int]) -> int:
    idx = 1
    for j, c in enumerate(code):
        if c not in (0, 1):
            raise ValueError(f"code entry {j} is {c!r}, not a bit")
        idx += int(c) << j
    return idx


def codes_to_indices(codes: np.ndarray) -> np.ndarray:
    codes = np.atleast_2d(np.asarray(codes, dtype=np.int64))
    weights = np.left_shift(np.int64(1), np.arange(codes.shape[1], dtype=np.int64))
    return codes @ weights + 1


def audit_architecture(net: Network) -> tuple[int, int]:
    """(depth, width) with width counting the input layer as N_0."""
    prev = net.input_dim
    for idx, layer in enumerate(net.layers):
        if layer.cols != prev:
            raise StructureError(f"layer {idx} expects {layer.cols} inputs, gets {prev}")
        prev = layer.rows
    return net.depth, net.width
