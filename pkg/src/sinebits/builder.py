"""Explicit weight matrices for the ReLU / sine / 2^x approximation networks.

Layer layout of the assembled network (depth 6)::

    1 sine   n1*d units   sin(N*pi*2^n/2^n1 * x_i + delta)
    2 relu   2*n1*d       relu(u + sin delta), relu(u - sin delta)
    3 pow2   1            2^(sum_c 2^(c-1) * ramp_c + 1)
    4 sine   M            sin(2*pi*b_j * y)
    5 relu   2M           relu(z/(2 s_k) + 1/2), relu(z/(2 s_k) - 1/2), s_k = sin(2^-k)
    6 ident  1            f_lo + (f_hi - f_lo) * sum_j 2^-j * ramp_j

The whole-cube extension runs 3^d input-shifted copies of that stack in
parallel and reduces them with d two-layer middle-value stages.
"""

from __future__ import annotations

import hashlib
import logging
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .core import (
    ActivationKind,
    AffineLayer,
    CapabilityError,
    Hyperparams,
    Network,
    TargetFunction,
    code_of_cell,
    code_to_index,
    codes_of_cells,
    codes_to_indices,
    iter_cells,
)
from .exactnum import DyadicRational, encode_bits

log = logging.getLogger(__name__)

RELU = ActivationKind.RELU
SINE = ActivationKind.SINE
POW2 = ActivationKind.POW2
IDENT = ActivationKind.IDENTITY

MAX_LINF_DIM = 4


class InfeasibleError(ValueError):
    """Requested accuracy cannot be met under the trifling-region constraint."""


@dataclass(frozen=True)
class DigitTable:
    """First M binary digits of the normalised target at every cell anchor.

    Row ``i - 1`` belongs to code index ``i``; rows whose code no cell
    produces are all zero (``realizable`` marks the others).
    """

    digits: np.ndarray
    f_lo: float
    f_hi: float
    realizable: np.ndarray
    range_source: str = "supplied"

    def __post_init__(self):
        if not self.f_lo < self.f_hi:
            raise ValueError(f"need f_lo < f_hi, got ({self.f_lo}, {self.f_hi})")

    @property
    def M(self) -> int:
        return self.digits.shape[1]

    def row_value(self, index: int) -> float:
        """sum_j a_ij 2^-j for a 1-based code index."""
        row = self.digits[index - 1]
        return float(sum(int(a) * 2.0 ** -(j + 1) for j, a in enumerate(row)))

    def checksum(self) -> str:
        h = hashlib.sha256()
        h.update(np.ascontiguousarray(self.digits, dtype=np.uint8).tobytes())
        h.update(repr((self.f_lo, self.f_hi)).encode())
        return h.hexdigest()


@dataclass(frozen=True)
class HolderBudget:
    mu: float
    alpha: float
    epsilon: float
    mode: str = "off-region"
    p: float = 1.0
    delta: float | None = None  # caller-supplied for mode off-region

    def __post_init__(self):
        if self.mode not in ("off-region", "lp", "linf"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if not (self.mu > 0 and 0 < self.alpha <= 1 and self.epsilon > 0):
            raise ValueError("need mu > 0, alpha in (0, 1], epsilon > 0")

    def is_trivial(self, d: int) -> bool:
        """True when the constant network already meets the tolerance."""
        return self.epsilon >= self.mu * d ** (self.alpha / 2)


# ------------------------------------------------------------------ helpers


def _layer(w, b, act) -> AffineLayer:
    return AffineLayer(np.asarray(w, dtype=np.float64), np.asarray(b, dtype=np.float64), act)


def ramp_slope(k: int) -> float:
    """1 / (2 sin(2^-k)) as a double; +inf once it exceeds the double range."""
    if k <= 60:
        return 1.0 / (2.0 * math.sin(math.ldexp(1.0, -k)))
    # sin(2^-k) = 2^-k to far below an ulp here
    return math.ldexp(1.0, k - 1) if k - 1 <= 1023 else math.inf


def compose(outer: Network, inner: Network) -> Network:
    """outer o inner, folding inner's final affine map into outer's first layer."""
    last = inner.layers[-1]
    if last.activation is not IDENT:
        raise ValueError("inner network must end in an identity layer")
    first = outer.layers[0]
    if first.cols != last.rows:
        raise ValueError(f"cannot compose: {first.cols} inputs vs {last.rows} outputs")
    with np.errstate(invalid="ignore", over="ignore"):
        w = first.weights @ last.weights
        b = first.weights @ last.bias + first.bias
    merged = _layer(w, b, first.activation)
    return Network(inner.layers[:-1] + (merged,) + outer.layers[1:], inner.input_dim)


# ------------------------------------------------------------ sub-networks


def build_clipped_ramp(threshold: float) -> Network:
    """1 above t, 0 below -t, x/(2t) + 1/2 in between; two ReLUs."""
    if not threshold > 0:
        raise ValueError(f"ramp threshold must be positive, got {threshold}")
    t = float(threshold)
    return Network(
        (
            _layer([[1.0], [1.0]], [t, -t], RELU),
            _layer([[1 / (2 * t), -1 / (2 * t)]], [0.0], IDENT),
        ),
        1,
    )


def _check_phi_delta(delta: float):
    if not 0 < delta <= 0.5:
        raise ValueError(f"delta must lie in (0, 1/2], got {delta}")


def build_phi13(params: Hyperparams, n: int = 0) -> Network:
    """x -> ramp_{sin delta}(sin(N*pi/2^n1 * 2^n * x + delta)); n = 0 is phi_{1,2}."""
    _check_phi_delta(params.delta)
    s = math.sin(params.delta)
    w = params.N * math.pi / 2**params.n1 * 2**n
    return Network(
        (
            _layer([[w]], [params.delta], SINE),
            _layer([[1.0], [1.0]], [s, -s], RELU),
            _layer([[1 / (2 * s), -1 / (2 * s)]], [0.0], IDENT),
        ),
        1,
    )


def build_phi12(params: Hyperparams) -> Network:
    return build_phi13(params, 0)


def _phi1_layers(params: Hyperparams, scale: np.ndarray | None = None, offset: np.ndarray | None = None):
    """Sine and ReLU layers of the coordinate encoder.

    ``scale``/``offset`` (length d) replace x_i by scale_i*x_i + offset_i.
    """
    d, n1 = params.d, params.n1
    _check_phi_delta(params.delta)
    scale = np.ones(d) if scale is None else np.asarray(scale, dtype=np.float64)
    offset = np.zeros(d) if offset is None else np.asarray(offset, dtype=np.float64)
    s = math.sin(params.delta)
    C = n1 * d
    w1 = np.zeros((C, d))
    b1 = np.zeros(C)
    for i in range(d):
        for n in range(1, n1 + 1):
            c = i * n1 + (n - 1)
            freq = params.N * math.pi / 2**n1 * 2**n
            w1[c, i] = freq * scale[i]
            b1[c] = params.delta + freq * offset[i]
    w2 = np.zeros((2 * C, C))
    b2 = np.zeros(2 * C)
    for c in range(C):
        w2[2 * c, c] = 1.0
        w2[2 * c + 1, c] = 1.0
        b2[2 * c] = s
        b2[2 * c + 1] = -s
    return _layer(w1, b1, SINE), _layer(w2, b2, RELU)


def _ramp_readout(C: int, s: float) -> np.ndarray:
    """(C, 2C) map from ReLU pairs to ramp values."""
    w = np.zeros((C, 2 * C))
    for c in range(C):
        w[c, 2 * c] = 1 / (2 * s)
        w[c, 2 * c + 1] = -1 / (2 * s)
    return w


def build_Phi1(params: Hyperparams) -> Network:
    l1, l2 = _phi1_layers(params)
    C = params.code_length
    l3 = _layer(_ramp_readout(C, math.sin(params.delta)), np.zeros(C), IDENT)
    tags = {"kind": "phi1", "d": params.d, "N": params.N, "n1": params.n1, "delta": params.delta}
    return Network((l1, l2, l3), params.d, tags)


def build_Phi2(n_bits: int) -> Network:
    """Single pow2 layer: bits -> 2^(sum_i 2^(i-1) bits_i + 1)."""
    w = np.array([[2.0**i for i in range(n_bits)]]).reshape(1, n_bits)
    return Network((_layer(w, [1.0], POW2),), n_bits, {"kind": "phi2", "n_bits": n_bits})


def build_Phi21(params: Hyperparams) -> Network:
    """Phi2 o Phi1 as a depth-4 network (pow2 output read by an identity layer)."""
    C = params.code_length
    phi2 = build_Phi2(C)
    outer = Network(phi2.layers + (_layer([[1.0]], [0.0], IDENT),), C)
    return compose(outer, build_Phi1(params))


def complement(bits: Sequence[int]) -> list[int]:
    return [1 - int(b) for b in bits]


def extractor_payload(bits: Sequence[int]) -> DyadicRational:
    """Encoding constant whose extractor returns ``bits`` (not their complement)."""
    return encode_bits(complement(bits))


def _extractor_layers(payloads: Sequence[DyadicRational], k: int, scale: Sequence[float]):
    """Sine and ReLU layers of M parallel bit extractors sharing one input."""
    M = len(payloads)
    w4 = np.array([[2 * math.pi * float(b)] for b in payloads]).reshape(M, 1)
    slope = ramp_slope(k)
    w5 = np.zeros((2 * M, M))
    b5 = np.zeros(2 * M)
    for j in range(M):
        w5[2 * j, j] = slope
        w5[2 * j + 1, j] = slope
        b5[2 * j] = 0.5
        b5[2 * j + 1] = -0.5
    w6 = np.zeros((1, 2 * M))
    for j in range(M):
        w6[0, 2 * j] = scale[j]
        w6[0, 2 * j + 1] = -scale[j]
    return _layer(w4, np.zeros(M), SINE), _layer(w5, b5, RELU), w6


def build_bit_extractor(bits: Sequence[int]) -> Network:
    """g(2^i) = bits_i for i = 1..k, with ReLU and sine units only."""
    bits = [int(b) for b in bits]
    k = len(bits)
    if k < 1:
        raise ValueError("need at least one bit")
    b = extractor_payload(bits)
    l1, l2, w3 = _extractor_layers([b], k, [1.0])
    tags = {"kind": "bit_extractor", "k": k, "payloads": [_hex(b)], "frac_bits": b.frac_bits}
    return Network((l1, l2, _layer(w3, [0.0], IDENT)), 1, tags)


def _hex(b: DyadicRational) -> str:
    return format(b.numerator, "x")


# ---------------------------------------------------------------- digits


def estimate_range(f: TargetFunction, params: Hyperparams, max_points: int = 2_000_000):
    """Enclosing range from a dense grid, widened by one grid-neighbour step."""
    m = 4 * params.N
    while m**params.d > max_points and m > 2:
        m -= 1
    axis = np.linspace(0.0, 1.0, m + 1)
    grid = np.stack(np.meshgrid(*[axis] * params.d, indexing="ij"), axis=-1)
    vals = f(grid.reshape(-1, params.d)).reshape((m + 1,) * params.d)
    step = 0.0
    for ax in range(params.d):
        if m >= 1:
            step = max(step, float(np.max(np.abs(np.diff(vals, axis=ax)))))
    lo, hi = float(vals.min()) - step, float(vals.max()) + step
    if not lo < hi:
        hi = lo + 1.0
    return lo, hi


def truncate_digits(value: float, M: int) -> list[int]:
    """First M binary digits of value, clamped into [0, 1 - 2^-(M+1)]."""
    v = min(max(value, 0.0), 1.0 - 2.0 ** -(M + 1))
    q = int(math.floor(math.ldexp(v, M)))
    return [(q >> (M - 1 - j)) & 1 for j in range(M)]


def sample_digits(f: TargetFunction, params: Hyperparams) -> DigitTable:
    if f.range is not None:
        f_lo, f_hi = map(float, f.range)
        source = "supplied"
    else:
        f_lo, f_hi = estimate_range(f, params)
        source = "estimated"
    if not f_hi > f_lo:
        raise ValueError(f"need f_hi > f_lo, got ({f_lo}, {f_hi})")
    cells = iter_cells(params)
    anchors = cells / params.N
    vals = f(anchors)
    normed = (vals - f_lo) / (f_hi - f_lo)
    idx = codes_to_indices(codes_of_cells(cells, params.n1))
    digits = np.zeros((params.code_space, params.M), dtype=np.uint8)
    realizable = np.zeros(params.code_space, dtype=bool)
    for row, v in zip(idx, normed):
        digits[row - 1] = truncate_digits(float(v), params.M)
        realizable[row - 1] = True
    digits.setflags(write=False)
    realizable.setflags(write=False)
    return DigitTable(digits, f_lo, f_hi, realizable, source)


def column_payloads(table: DigitTable) -> list[DyadicRational]:
    """Extractor constants for the M digit columns (k = full code space)."""
    return [extractor_payload(table.digits[:, j].tolist()) for j in range(table.M)]


# --------------------------------------------------------------- assembly


@dataclass
class _CopySpec:
    scale: np.ndarray
    offset: np.ndarray
    shift_index: tuple[int, ...] = field(default_factory=tuple)


def _copy_stack(params: Hyperparams, table: DigitTable, copies: list[_CopySpec], block5: int):
    """Layers 1-5 of ``len(copies)`` parallel copies plus the per-copy readout.

    Returns (layers, readout) where readout (n_copies, n_copies*block5) maps
    layer-5 outputs to (copy value - f_lo).
    """
    C = params.code_length
    M = params.M
    k = params.code_space
    s = math.sin(params.delta)
    payloads = column_payloads(table)
    # an all-zero digit column is interpolated by the zero function; dropping its
    # readout keeps Phi constant inside the trifling region too
    live = table.digits.any(axis=0)
    scale_out = [(table.f_hi - table.f_lo) * 2.0 ** -(j + 1) if live[j] else 0.0 for j in range(M)]
    n = len(copies)

    w1 = np.zeros((n * C, params.d))
    b1 = np.zeros(n * C)
    w2 = np.zeros((n * 2 * C, n * C))
    b2 = np.zeros(n * 2 * C)
    w3 = np.zeros((n, n * 2 * C))
    b3 = np.ones(n)
    w4 = np.zeros((n * M, n))
    b4 = np.zeros(n * M)
    w5 = np.zeros((n * block5, n * M))
    b5 = np.zeros(n * block5)
    readout = np.zeros((n, n * block5))

    ramp = _ramp_readout(C, s)
    pow_w = np.array([2.0**c for c in range(C)])
    l4, l5, w6 = _extractor_layers(payloads, k, scale_out)
    for ci, cp in enumerate(copies):
        l1, l2 = _phi1_layers(params, cp.scale, cp.offset)
        w1[ci * C:(ci + 1) * C] = l1.weights
        b1[ci * C:(ci + 1) * C] = l1.bias
        w2[ci * 2 * C:(ci + 1) * 2 * C, ci * C:(ci + 1) * C] = l2.weights
        b2[ci * 2 * C:(ci + 1) * 2 * C] = l2.bias
        w3[ci, ci * 2 * C:(ci + 1) * 2 * C] = pow_w @ ramp
        w4[ci * M:(ci + 1) * M, ci] = l4.weights[:, 0]
        w5[ci * block5:ci * block5 + 2 * M, ci * M:(ci + 1) * M] = l5.weights
        b5[ci * block5:ci * block5 + 2 * M] = l5.bias
        readout[ci, ci * block5:ci * block5 + 2 * M] = w6[0]

    layers = (
        _layer(w1, b1, SINE),
        _layer(w2, b2, RELU),
        _layer(w3, b3, POW2),
        _layer(w4, b4, SINE),
        _layer(w5, b5, RELU),
    )
    return layers, readout, payloads


def _tags(kind: str, params: Hyperparams, table: DigitTable, payloads, n_copies: int, block5: int):
    return {
        "kind": kind,
        "d": params.d,
        "N": params.N,
        "n1": params.n1,
        "M": params.M,
        "delta": params.delta,
        "f_lo": table.f_lo,
        "f_hi": table.f_hi,
        "k": params.code_space,
        "frac_bits": params.code_space + 2,
        "payloads": [_hex(b) for b in payloads],
        "n_copies": n_copies,
        "block5": block5,
        "digit_checksum": table.checksum(),
        "range_source": table.range_source,
    }


def assemble(f: TargetFunction, params: Hyperparams, table: DigitTable | None = None) -> Network:
    """Depth-6 network Phi for f on [0,1]^d off the trifling region."""
    if f.d != params.d:
        raise ValueError(f"target has d={f.d} but params have d={params.d}")
    table = sample_digits(f, params) if table is None else table
    single = _CopySpec(np.ones(params.d), np.zeros(params.d))
    layers, readout, payloads = _copy_stack(params, table, [single], 2 * params.M)
    out = _layer(readout, [table.f_lo], IDENT)
    return Network(layers + (out,), params.d, _tags("phi", params, table, payloads, 1, 2 * params.M))


# ------------------------------------------------------- mid-value selection


def mid3(a, b, c):
    """Middle value of three (elementwise)."""
    return np.maximum(np.minimum(a, b), np.minimum(np.maximum(a, b), c))


def build_mid_selector() -> Network:
    """Two hidden ReLU layers computing the middle value of three reals."""
    # layer A: relu(a-b), relu(b-a), relu(+-b), relu(+-c)
    wa = np.array(
        [[1, -1, 0], [-1, 1, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]], dtype=np.float64
    )
    # max_ab = b + relu(a-b); min_ab = b - relu(b-a); c = relu(c) - relu(-c)
    mx = np.array([1, 0, 1, -1, 0, 0], dtype=np.float64)
    mn = np.array([0, -1, 1, -1, 0, 0], dtype=np.float64)
    cc = np.array([0, 0, 0, 0, 1, -1], dtype=np.float64)
    wb = np.stack([mx - cc, cc - mn, mx, -mx, mn, -mn, cc, -cc])
    # mid = max_ab + min_ab - c - relu(max_ab - c) + relu(c - min_ab)
    wo = np.array([[-1, 1, 1, -1, 1, -1, -1, 1]], dtype=np.float64)
    return Network(
        (_layer(wa, np.zeros(6), RELU), _layer(wb, np.zeros(8), RELU), _layer(wo, [0.0], IDENT)),
        3,
    )


def _mid_stage(n_in: int, inp: np.ndarray, bias: np.ndarray):
    """Two ReLU layers reducing n_in non-negative values (given as inp @ h + bias)
    to n_in/3 middle values.  Returns (layerA, layerB, out_w) with
    out = out_w @ layerB_output.
    """
    g = n_in // 3
    sel = np.zeros((4 * g, n_in))
    for t in range(g):
        a, b, c = 3 * t, 3 * t + 1, 3 * t + 2
        sel[4 * t, a], sel[4 * t, b] = 1, -1
        sel[4 * t + 1, a], sel[4 * t + 1, b] = -1, 1
        sel[4 * t + 2, b] = 1
        sel[4 * t + 3, c] = 1
    la_w = sel @ inp
    la_b = sel @ bias
    wb = np.zeros((5 * g, 4 * g))
    wo = np.zeros((g, 5 * g))
    for t in range(g):
        mx = np.zeros(4 * g)
        mn = np.zeros(4 * g)
        cc = np.zeros(4 * g)
        mx[4 * t + 2], mx[4 * t] = 1, 1
        mn[4 * t + 2], mn[4 * t + 1] = 1, -1
        cc[4 * t + 3] = 1
        wb[5 * t] = mx - cc
        wb[5 * t + 1] = cc - mn
        wb[5 * t + 2] = mx
        wb[5 * t + 3] = mn
        wb[5 * t + 4] = cc
        wo[t, 5 * t:5 * t + 5] = [-1, 1, 1, 1, -1]
    return _layer(la_w, la_b, RELU), _layer(wb, np.zeros(5 * g), RELU), wo


def extension_shifts(delta: float) -> list[tuple[float, float]]:
    """Three affine coordinate maps x -> (1-delta) x + k delta/2, k = 0, 1, 2.

    Each maps [0,1] into itself, moves points by at most delta, and the three
    images are delta/2 apart, so at most one lands in a width-delta/2 slab.
    """
    return [(1.0 - delta, kk * delta / 2) for kk in range(3)]


def extend_linf(f: TargetFunction, params: Hyperparams, table: DigitTable | None = None) -> Network:
    """Whole-cube network of depth 2d+6 and width 3^d (max{2 n1 d, 2M} + 4).

    The inner networks use trifling width delta/2; the final error bound is
    omega(sqrt d) 2^-M + omega(sqrt d / N) + d omega(delta).
    """
    d = params.d
    if d > MAX_LINF_DIM:
        raise CapabilityError(f"whole-cube extension supports d <= {MAX_LINF_DIM}, got {d}")
    if params.delta > 2.0 / (3.0 * params.N):
        raise ValueError(f"extension needs delta <= 2/(3N) = {2 / (3 * params.N)}, got {params.delta}")
    if f.d != d:
        raise ValueError(f"target has d={f.d} but params have d={d}")
    inner = params.replace(delta=params.delta / 2)
    table = sample_digits(f, inner) if table is None else table
    W = max(2 * inner.code_length, 2 * inner.M)
    block5 = W + 4
    shifts = extension_shifts(params.delta)
    copies = []
    n_copies = 3**d
    for c in range(n_copies):
        ks = tuple((c // 3**i) % 3 for i in range(d))  # coordinate 1 varies fastest
        scale = np.array([shifts[kk][0] for kk in ks])
        offset = np.array([shifts[kk][1] for kk in ks])
        copies.append(_CopySpec(scale, offset, ks))
    layers, readout, payloads = _copy_stack(inner, table, copies, block5)

    mids: list[AffineLayer] = []
    inp, bias = readout, np.zeros(n_copies)
    n_in = n_copies
    for _ in range(d):
        la, lb, wo = _mid_stage(n_in, inp, bias)
        mids += [la, lb]
        inp, bias = wo, np.zeros(wo.shape[0])
        n_in //= 3
    out = _layer(inp, bias + table.f_lo, IDENT)
    tags = _tags("phi_linf", inner, table, payloads, n_copies, block5)
    tags["outer_delta"] = params.delta
    tags["shift_indices"] = [list(cp.shift_index) for cp in copies]
    return Network(layers + tuple(mids) + (out,), d, tags)


# --------------------------------------------------------- hyperparameters


def _ceil(y: float, rtol: float = 1e-12) -> int:
    """Ceiling that forgives float dust on exact integers (e.g. 3/0.1)."""
    r = round(y)
    if abs(y - r) <= rtol * max(1.0, abs(y)):
        return int(r)
    return int(math.ceil(y))


def ceil_log2_real(y: float) -> int:
    return _ceil(math.log2(y))


def _grid_and_digits(mu, alpha, eps_share, d):
    """(M, N) with mu d^(alpha/2) 2^-M <= eps_share and mu (sqrt d / N)^alpha <= eps_share."""
    M = max(1, ceil_log2_real(mu * d ** (alpha / 2) / eps_share))
    N = max(1, _ceil(math.sqrt(d) * (mu / eps_share) ** (1 / alpha)))
    return M, N


def solve_hyperparams(budget: HolderBudget, d: int) -> Hyperparams:
    """Hyperparameters meeting a Hölder accuracy budget.

    off-region  eps split in halves; delta supplied by the caller (default 1/(10N))
    lp          eps split in thirds; delta from mu d^(a/2) [1-(1-N delta)^d]^(1/p) = eps/3
    linf        eps split in thirds; delta = (eps / (3 mu d))^(1/a), capped at 2/(3N)
    """
    mu, a, eps = budget.mu, budget.alpha, budget.epsilon
    if budget.is_trivial(d):
        log.warning("epsilon >= mu d^(alpha/2): the constant network already meets the budget")
    if budget.mode == "off-region":
        M, N = _grid_and_digits(mu, a, eps / 2, d)
        delta = budget.delta if budget.delta is not None else 1.0 / (10 * N)
        if not 0 < delta < 1.0 / N:
            raise InfeasibleError(f"trifling width delta={delta} must lie in (0, 1/N={1.0 / N})")
        return Hyperparams(d, N, M, delta, budget.p)
    M, N = _grid_and_digits(mu, a, eps / 3, d)
    if budget.mode == "lp":
        q = (eps / (3 * mu * d ** (a / 2))) ** budget.p
        if q >= 1:
            raise InfeasibleError(
                "no delta < 1/N solves mu d^(alpha/2) [1-(1-N delta)^d]^(1/p) = eps/3: "
                f"eps/3 = {eps / 3} >= mu d^(alpha/2) = {mu * d ** (a / 2)}"
            )
        delta = (1.0 - (1.0 - q) ** (1.0 / d)) / N
        return Hyperparams(d, N, M, delta, budget.p)
    delta = (eps / (3 * mu * d)) ** (1 / a)
    cap = 2.0 / (3.0 * N)
    if delta > cap:
        log.info("linf: delta %.6g exceeds the extension limit 2/(3N); using %.6g", delta, cap)
        delta = cap
    return Hyperparams(d, N, M, delta, math.inf)


def corollary_width(budget: HolderBudget, d: int) -> int:
    """Closed-form width max{2d ceil(log2 N*), 2 ceil(log2 (c mu d^(a/2) / eps)) + 2}."""
    mu, a, eps = budget.mu, budget.alpha, budget.epsilon
    if budget.mode == "off-region":
        w1 = 2 * d * ceil_log2_real(math.sqrt(d) * (2 * mu / eps) ** (1 / a))
        w2 = 2 * ceil_log2_real(mu * d ** (a / 2) / eps) + 2
    else:
        w1 = 2 * d * ceil_log2_real(math.sqrt(d) * (3 * mu / eps) ** (1 / a))
        w2 = 2 * ceil_log2_real(3 * mu * d ** (a / 2) / (2 * eps)) + 2
    base = max(w1, w2)
    return 3**d * (base + 4) if budget.mode == "linf" else base


def expected_shape(params: Hyperparams, linf: bool = False) -> tuple[int, int]:
    """Depth and width stated for the construction."""
    W = max(2 * params.code_length, 2 * params.M)
    if linf:
        return 2 * params.d + 6, 3**params.d * (W + 4)
    return 6, max(W, params.d)


__all__ = [
    "DigitTable",
    "HolderBudget",
    "InfeasibleError",
    "assemble",
    "build_Phi1",
    "build_Phi2",
    "build_Phi21",
    "build_bit_extractor",
    "build_clipped_ramp",
    "build_mid_selector",
    "build_phi12",
    "build_phi13",
    "code_of_cell",
    "code_to_index",
    "compose",
    "corollary_width",
    "estimate_range",
    "expected_shape",
    "extend_linf",
    "mid3",
    "sample_digits",
    "solve_hyperparams",
]
