"""Exact dyadic arithmetic for the sine units fed by the 2^x layer.

The sine units downstream of the 2^x layer evaluate sin(2*pi*b*2^e) with b a
dyadic rational carrying k+2 fractional bits and e up to 2^(n1*d).  In double
precision 2^e overflows once e > 1023 and b*2^e loses every fractional bit
long before that.  Since b*2^e mod 1 is a left shift followed by a mask, the
reduction is done on the integer numerator and floats only ever see the
reduced phase.

Error budget
------------
After exact reduction and exact folding into [0, 1/4], the only rounding is
(i) the conversion of the folded phase to double, (ii) the product with 2*pi
and (iii) ``math.sin``; together a few ulp *relative* to the result.  The
folding step matters: the smallest sines have magnitude ~2^-k, and relative
(not absolute) accuracy is what keeps the clipped ramp unambiguous, since the
ramp only compares |sin| against sin(2^-k), and on the interpolation
points that ratio is at least about pi.  For k > ~1000 the double value of
sin(2^-k) underflows, so ``ramp_of_phase`` works with a scaled ratio.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath


@dataclass(frozen=True)
class DyadicRational:
    """Value ``numerator / 2**frac_bits`` with an arbitrary-size numerator."""

    numerator: int
    frac_bits: int

    def __post_init__(self):
        if self.numerator < 0 or self.frac_bits < 0:
            raise ValueError("DyadicRational needs numerator >= 0 and frac_bits >= 0")

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.frac_bits)

    def __float__(self) -> float:
        # int / int true division is correctly rounded, even for huge operands
        return self.numerator / (1 << self.frac_bits)

    @classmethod
    def from_float(cls, x: float) -> "DyadicRational":
        """Exact dyadic value of a non-negative finite double."""
        num, den = float(x).as_integer_ratio()
        return cls(num, den.bit_length() - 1)


@dataclass(frozen=True)
class SymbolicPow2:
    """The exact value 2**exponent, never materialised unless asked."""

    exponent: int

    def to_float(self) -> tuple[float, bool]:
        """Materialise as a double; returns (value, overflowed)."""
        if self.exponent > 1023:
            return math.inf, True
        return math.ldexp(1.0, self.exponent), False


def encode_bits(bits: Sequence[int]) -> DyadicRational:
    """b = sum_i bits_i 2^-(i+1) + 2^-(k+2), as numerator / 2^(k+2)."""
    k = len(bits)
    if k < 1:
        raise ValueError("encode_bits needs at least one bit")
    num = 1
    for i, bit in enumerate(bits, start=1):
        if bit not in (0, 1):
            raise ValueError(f"bit {i} is {bit!r}")
        if bit:
            num |= 1 << (k + 1 - i)
    return DyadicRational(num, k + 2)


def reduce_mod_1(b: DyadicRational, i: int) -> DyadicRational:
    """Fractional part of b * 2**i by shift-and-mask."""
    if i < 0:
        raise ValueError("reduce_mod_1 needs i >= 0")
    mask = (1 << b.frac_bits) - 1
    if i >= b.frac_bits:
        return DyadicRational(0, b.frac_bits)
    return DyadicRational((b.numerator << i) & mask, b.frac_bits)


def multiply_mod_1(b: DyadicRational, x: DyadicRational) -> DyadicRational:
    """Fractional part of the exact product b * x."""
    fb = b.frac_bits + x.frac_bits
    prod = b.numerator * x.numerator
    return DyadicRational(prod & ((1 << fb) - 1), fb)


def fold_quarter(t: DyadicRational) -> tuple[int, DyadicRational]:
    """Write sin(2*pi*t) = sign * sin(2*pi*r) with r in [0, 1/4], exactly."""
    fb = max(t.frac_bits, 2)
    num = t.numerator << (fb - t.frac_bits)
    quarter = 1 << (fb - 2)
    q, rem = divmod(num, quarter)
    q &= 3
    if q in (1, 3):
        rem = quarter - rem
    sign = 1 if q in (0, 1) else -1
    return sign, DyadicRational(rem, fb)


def sine_2pi(t: DyadicRational) -> float:
    """sin(2*pi*t) for t in [0, 1), with exact symmetry folding."""
    if t.numerator >= (1 << t.frac_bits):
        raise ValueError("sine_2pi needs t in [0, 1)")
    sign, r = fold_quarter(t)
    return sign * math.sin(math.tau * float(r))


def pow2_add(code_index: int) -> SymbolicPow2:
    if code_index < 1:
        raise ValueError(f"code index must be >= 1, got {code_index}")
    return SymbolicPow2(int(code_index))


def _scaled(num: int, frac_bits: int) -> tuple[float, int]:
    """(m, e) with num / 2^frac_bits ~= m * 2^e and 0.5 <= m < 1 (m=0 for 0)."""
    if num == 0:
        return 0.0, 0
    shift = max(num.bit_length() - 64, 0)
    m, e = math.frexp(float(num >> shift))
    return m, e + shift - frac_bits


def sine_ratio(t: DyadicRational, k: int) -> float:
    """sin(2*pi*t) / sin(2^-k) evaluated without underflow.

    Returns a signed double; saturates to +-inf when the ratio exceeds the
    double range (only its comparison with 1 matters downstream).
    """
    sign, r = fold_quarter(t)
    m, e = _scaled(r.numerator, r.frac_bits)
    if m == 0.0:
        return 0.0
    if e > -60:
        num_m, num_e = math.frexp(math.sin(math.tau * math.ldexp(m, e)))
    else:
        # sin(y) = y (1 - y^2/6 ...) and y < 2^-57: the correction is below an ulp
        num_m, num_e = math.frexp(math.tau * m)
        num_e += e
    if k <= 60:
        den_m, den_e = math.frexp(math.sin(math.ldexp(1.0, -k)))
    else:
        den_m, den_e = 0.5, 1 - k
    ratio_e = num_e - den_e
    if ratio_e > 1000:
        return sign * math.inf
    if ratio_e < -1000:
        return 0.0
    return sign * math.ldexp(num_m / den_m, ratio_e)


def ramp_from_ratio(ratio: float) -> float:
    """Clipped ramp evaluated at sin = ratio * threshold: clip(ratio/2 + 1/2)."""
    if ratio >= 1.0:
        return 1.0
    if ratio <= -1.0:
        return 0.0
    return 0.5 * ratio + 0.5


def ramp_of_phase(t: DyadicRational, k: int) -> float:
    """Value of the threshold-sin(2^-k) clipped ramp at sin(2*pi*t)."""
    return ramp_from_ratio(sine_ratio(t, k))


def ramp_of_real_exponent(b: DyadicRational, exponent: float, k: int) -> float:
    """Clipped ramp at sin(2*pi*b*2^exponent) for a non-integer exponent.

    The double ``exponent`` is taken as exact and the phase is computed with
    enough working precision to keep about 64 correct fractional bits.
    """
    if not math.isfinite(exponent):
        raise ValueError(f"exponent must be finite, got {exponent}")
    prec = max(int(math.ceil(exponent)), 0) + b.frac_bits + 96
    with mpmath.workprec(prec):
        phase = mpmath.mpf(b.numerator) * mpmath.ldexp(1, -b.frac_bits)
        phase = phase * mpmath.power(2, mpmath.mpf(exponent))
        phase = phase - mpmath.floor(phase)
    with mpmath.workprec(128):
        s = mpmath.sin(2 * mpmath.pi * phase)
        ratio = s / mpmath.sin(mpmath.ldexp(1, -k))
        if ratio >= 1:
            return 1.0
        if ratio <= -1:
            return 0.0
        return float(ratio / 2 + mpmath.mpf(1) / 2)
