"""IEEE-754 single-precision bit utilities, restricted to positive normal values.

Everything in this module is exact: bit-field extraction, packing, and
power-of-two exponent shifts introduce no rounding error.
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass

MANTISSA_SCALE = 2 ** 23        # N_m, scale between fractional and integer mantissa
EXPONENT_BIAS = 127             # B
MANTISSA_MASK = MANTISSA_SCALE - 1

# positive normal singles occupy bit patterns [0x00800000, 0x7F800000)
MIN_NORMAL_BITS = 0x00800000
MAX_NORMAL_BITS = 0x7F7FFFFF
MIN_NORMAL = 2.0 ** -126
MAX_NORMAL = (2.0 - 2.0 ** -23) * 2.0 ** 127


class DomainError(ValueError):
    """Input is outside the supported domain of positive normal singles."""


@dataclass(frozen=True)
class FloatRepr:
    """Field decomposition of a positive normal single-precision value."""

    bits: int             # packed pattern, sign * 2^31 + E * 2^23 + M
    sign: int             # always 0 here
    biased_exponent: int  # E, in [1, 254]
    exponent: int         # e = E - bias
    mantissa_int: int     # M, in [0, 2^23)
    mantissa_frac: float  # m = M / N_m, exact in binary

    @property
    def value(self) -> float:
        """The represented number (1 + m) * 2^e."""
        return math.ldexp(1.0 + self.mantissa_frac, self.exponent)

    @classmethod
    def from_fields(cls, exponent: int, mantissa_int: int) -> "FloatRepr":
        """Build a positive-normal representation from (e, M)."""
        biased = exponent + EXPONENT_BIAS
        if not 1 <= biased <= 254:
            raise DomainError(f"exponent {exponent} outside normal range")
        if not 0 <= mantissa_int < MANTISSA_SCALE:
            raise DomainError(f"mantissa_int {mantissa_int} outside [0, 2^23)")
        bits = (biased << 23) | mantissa_int
        return cls(bits, 0, biased, exponent, mantissa_int,
                   mantissa_int / MANTISSA_SCALE)


@dataclass(frozen=True)
class NormalizedInput:
    """x factored as x_tilde * 2^(2n) with x_tilde in [1, 4)."""

    x_tilde: float
    n: int                # in [-63, 63]
    region_exponent: int  # 0 when x_tilde in [1,2), 1 when in [2,4)


def bits_to_float(bits: int) -> float:
    """Reinterpret a 32-bit pattern as the single-precision value it encodes."""
    if not 0 <= bits <= 0xFFFFFFFF:
        raise DomainError(f"bit pattern {bits:#x} is not a 32-bit value")
    return struct.unpack("<f", struct.pack("<I", bits))[0]


def float_to_bits(x: float) -> int:
    """Bit pattern of x, requiring x to be exactly a positive normal single."""
    if not isinstance(x, (int, float)) or isinstance(x, bool):
        raise DomainError(f"not a real number: {x!r}")
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"{x!r} is outside supported domain")
    try:
        bits = struct.unpack("<I", struct.pack("<f", x))[0]
    except OverflowError:
        raise DomainError(f"{x!r} is outside the positive normal range") from None
    if struct.unpack("<f", struct.pack("<I", bits))[0] != x:
        raise DomainError(f"{x!r} is not exactly representable in single precision")
    if not MIN_NORMAL_BITS <= bits <= MAX_NORMAL_BITS:
        raise DomainError(f"{x!r} is outside the positive normal range")
    return bits


def as_single(x: float) -> float:
    """Round a real to the nearest single-precision value (may be inf/0)."""
    x = float(x)
    try:
        return struct.unpack("<f", struct.pack("<f", x))[0]
    except OverflowError:
        return math.copysign(math.inf, x)


def decode(bits: int) -> FloatRepr:
    """Split a bit pattern into sign/exponent/mantissa fields.

    Rejects zero, subnormals, infinities, NaN and negative values.
    """
    if not 0 <= bits <= 0xFFFFFFFF:
        raise DomainError(f"bit pattern {bits:#x} is not a 32-bit value")
    if bits >> 31:
        raise DomainError(f"{bits:#010x} has the sign bit set; outside supported domain")
    biased = (bits >> 23) & 0xFF
    if biased == 0:
        raise DomainError(f"{bits:#010x} encodes zero or a subnormal; outside supported domain")
    if biased == 255:
        raise DomainError(f"{bits:#010x} encodes an infinity or NaN; outside supported domain")
    mantissa = bits & MANTISSA_MASK
    return FloatRepr(bits, 0, biased, biased - EXPONENT_BIAS, mantissa,
                     mantissa / MANTISSA_SCALE)


def encode(repr_: FloatRepr) -> int:
    """Pack fields back into a bit pattern; exact inverse of decode."""
    if repr_.sign != 0:
        raise DomainError("negative values are outside supported domain")
    if not 1 <= repr_.biased_exponent <= 254:
        raise DomainError(f"biased exponent {repr_.biased_exponent} outside [1, 254]")
    if repr_.exponent != repr_.biased_exponent - EXPONENT_BIAS:
        raise DomainError("exponent fields disagree")
    if not 0 <= repr_.mantissa_int < MANTISSA_SCALE:
        raise DomainError(f"mantissa_int {repr_.mantissa_int} outside [0, 2^23)")
    if repr_.mantissa_frac != repr_.mantissa_int / MANTISSA_SCALE:
        raise DomainError("mantissa fields disagree")
    bits = (repr_.biased_exponent << 23) | repr_.mantissa_int
    if bits != repr_.bits:
        raise DomainError(f"stored bits {repr_.bits:#010x} disagree with fields {bits:#010x}")
    return bits


def normalize(x: float) -> NormalizedInput:
    """Factor a positive normal single as x_tilde * 2^(2n), x_tilde in [1, 4).

    Even exponents land in [1, 2), odd exponents in [2, 4); either way the
    factorization is exact.
    """
    r = decode(float_to_bits(x))
    if r.exponent % 2 == 0:
        n = r.exponent // 2
        return NormalizedInput(1.0 + r.mantissa_frac, n, 0)
    n = (r.exponent - 1) // 2
    return NormalizedInput(2.0 * (1.0 + r.mantissa_frac), n, 1)


def denormalize(y_tilde: float, n: int) -> float:
    """Undo normalization: map y_tilde back to y_tilde * 2^(-n).

    If y_tilde approximates 1/sqrt(x_tilde) then the result approximates
    1/sqrt(x) for the original x = x_tilde * 2^(2n).
    """
    if not math.isfinite(y_tilde) or y_tilde <= 0.0:
        raise DomainError(f"{y_tilde!r} is outside supported domain")
    result = math.ldexp(y_tilde, -n)
    if not MIN_NORMAL <= result <= MAX_NORMAL:
        raise DomainError(
            f"denormalize({y_tilde!r}, {n}) leaves the single-precision normal range")
    return result
