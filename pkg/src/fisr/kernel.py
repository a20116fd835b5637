"""The bit-shift inverse square root kernel, parameterized by magic constant.

All arithmetic is performed in single precision with round-to-nearest-even,
no fused multiply-add and no extended intermediates, matching the classic
C routine operation for operation:

    float InvSqrt(float x) {
        float halfnumber = 0.5f * x;
        int i = *(int*) &x;
        i = R - (i >> 1);
        x = *(float*) &i;
        x = x * (1.5f - halfnumber * x * x);
        x = x * (1.5f - halfnumber * x * x);
        return x;
    }
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .floatbits import (
    MANTISSA_SCALE,
    DomainError,
    bits_to_float,
    decode,
    float_to_bits,
)

CLASSIC_MAGIC = 0x5F3759DF

# The closed-form seed model covers magics whose float decomposition has
# exponent 63 and fractional mantissa below 1/2.
SEED_MODEL_EXPONENT = 63

_HALF = np.float32(0.5)
_THREE_HALVES = np.float32(1.5)


def magic_in_model_range(magic: int) -> bool:
    """True when the seed model's preconditions hold for this magic constant."""
    try:
        r = decode(magic)
    except DomainError:
        return False
    return r.exponent == SEED_MODEL_EXPONENT and r.mantissa_int < MANTISSA_SCALE // 2


@dataclass(frozen=True)
class KernelConfig:
    """Magic constant plus Newton-Raphson iteration count.

    By default construction fails for magics outside the seed model's range;
    use relaxed() to experiment outside it.
    """

    magic: int
    iterations: int
    enforce_model_range: bool = True

    def __post_init__(self) -> None:
        if not 0 <= self.magic <= 0xFFFFFFFF:
            raise DomainError(f"magic {self.magic:#x} is not a 32-bit value")
        if self.iterations < 0:
            raise DomainError(f"iterations must be non-negative, got {self.iterations}")
        if self.enforce_model_range and not self.within_model_range:
            raise DomainError(
                f"magic {self.magic:#010x} is outside the seed-model range "
                f"(needs exponent {SEED_MODEL_EXPONENT} and mantissa below 1/2); "
                f"use KernelConfig.relaxed() to bypass")

    @classmethod
    def relaxed(cls, magic: int, iterations: int) -> "KernelConfig":
        """Config without the seed-model range check, for experimentation."""
        return cls(magic, iterations, enforce_model_range=False)

    @property
    def within_model_range(self) -> bool:
        return magic_in_model_range(self.magic)


def seed_bits(x: float, magic: int) -> float:
    """Integer-arithmetic seed: reinterpret, halve the bits, subtract from magic.

    Returns the float whose pattern is magic - floor(bits(x) / 2), the kernel's
    zeroth approximation of 1/sqrt(x).
    """
    ix = float_to_bits(x)
    iy = (magic - (ix >> 1)) & 0xFFFFFFFF
    try:
        decode(iy)
    except DomainError as exc:
        raise DomainError(f"seed pattern {iy:#010x} out of range: {exc}") from exc
    return bits_to_float(iy)


def newton_step(y: float, half_x: float) -> float:
    """One Newton-Raphson update y * (1.5 - half_x * y * y).

    Each multiply and subtract is rounded to single precision, in exactly this
    association order; reassociation would change low bits.
    """
    yf = np.float32(y)
    t = np.float32(half_x) * yf
    t = t * yf
    t = _THREE_HALVES - t
    return float(yf * t)


def invsqrt(x: float, config: KernelConfig) -> float:
    """Approximate 1/sqrt(x): integer seed plus Newton-Raphson refinements."""
    y = seed_bits(x, config.magic)  # also validates the input domain
    half = float(_HALF * np.float32(x))
    for _ in range(config.iterations):
        y = newton_step(y, half)
    return y
