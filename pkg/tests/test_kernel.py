"""Kernel tests against an independent per-operation transliteration.

The oracle below rounds after every arithmetic step through struct packing,
exactly as a C float expression would; products and sums of two singles are
exact in double, so the single rounding per step is the correctly rounded
result.  The kernel must match it bit for bit.
"""
import math
import struct

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fisr.floatbits import DomainError, bits_to_float, float_to_bits
from fisr.kernel import (
    CLASSIC_MAGIC,
    KernelConfig,
    invsqrt,
    magic_in_model_range,
    newton_step,
    seed_bits,
)


def _f32(value: float) -> float:
    return struct.unpack("<f", struct.pack("<f", value))[0]


def _oracle_bits(x: float, magic: int, iterations: int) -> int:
    half = _f32(0.5 * x)
    i = struct.unpack("<I", struct.pack("<f", x))[0]
    i = (magic - (i >> 1)) & 0xFFFFFFFF
    y = struct.unpack("<f", struct.pack("<I", i))[0]
    for _ in range(iterations):
        t = _f32(half * y)
        t = _f32(t * y)
        t = _f32(1.5 - t)
        y = _f32(y * t)
    return struct.unpack("<I", struct.pack("<f", y))[0]


GOLDEN_ANCHORS = {
    # x -> result bits for k = 0, 1, 2 with the classic constant
    1.0: (0x3F7759DF, 0x3F7F910F, 0x3F7FFFB7),
    2.0: (0x3F3759DF, 0x3F34F95E, 0x3F3504F1),
    0.15625: (0x402759DF, 0x4021A191, 0x4021E86C),
    3.0: (0x3F1759DF, 0x3F13AC3C, 0x3F13CD30),
    1024.0: (0x3CF759DF, 0x3CFF910F, 0x3CFFFFB7),
}


@pytest.mark.parametrize("x,expected", sorted(GOLDEN_ANCHORS.items()))
def test_golden_anchors(x, expected):
    for k, bits in enumerate(expected):
        y = invsqrt(x, KernelConfig(CLASSIC_MAGIC, k))
        assert float_to_bits(float(y)) == bits


def test_seed_bits_classic_unity():
    s = seed_bits(1.0, CLASSIC_MAGIC)
    assert float_to_bits(float(s)) == 0x3F7759DF


def test_matches_transliteration_over_pinned_sample():
    rng = np.random.default_rng(0xD1CE)
    bits = rng.integers(0x00800000, 0x7F800000, size=1000, dtype=np.uint32)
    for k in (0, 1, 2):
        config = KernelConfig(CLASSIC_MAGIC, k)
        for b in bits.tolist():
            x = bits_to_float(b)
            got = float_to_bits(float(invsqrt(x, config)))
            assert got == _oracle_bits(x, CLASSIC_MAGIC, k)


@given(st.integers(0x00800000, 0x7F7FFFFF),
       st.integers(0, 2))
def test_matches_transliteration_classic(bits, k):
    x = bits_to_float(bits)
    got = float_to_bits(float(invsqrt(x, KernelConfig(CLASSIC_MAGIC, k))))
    assert got == _oracle_bits(x, CLASSIC_MAGIC, k)


def test_quarter_input_doubles_unity_output():
    # power-of-four scaling is exact integer arithmetic on the exponent
    for k in (0, 1, 2):
        config = KernelConfig(CLASSIC_MAGIC, k)
        assert float(invsqrt(0.25, config)) == 2.0 * float(invsqrt(1.0, config))


@given(st.integers(0x01000000, 0x7F7FFFFF), st.integers(-63, 63),
       st.integers(0, 2))
def test_power_of_four_equivariance(bits, n, k):
    exp_field = bits >> 23
    scaled_field = exp_field + 2 * n
    # the lowest binade denormalizes the halving inside a Newton step
    if not 2 <= scaled_field <= 254:
        return
    config = KernelConfig(CLASSIC_MAGIC, k)
    x = bits_to_float(bits)
    x_scaled = bits_to_float(bits + (2 * n << 23))
    direct = float(invsqrt(x_scaled, config))
    rescaled = math.ldexp(float(invsqrt(x, config)), -n)
    assert float_to_bits(direct) == float_to_bits(rescaled)


@given(st.integers(0x00800000, 0x7F7FFFFF))
def test_newton_contracts_error(bits):
    # |delta'| = |delta|^2 (3+delta)/2; with |delta0| <= 0.035 the factor
    # stays below 1.52, plus a few ulps of arithmetic blur per step
    x = bits_to_float(bits)
    ref = 1.0 / math.sqrt(x)
    y = invsqrt(x, KernelConfig(CLASSIC_MAGIC, 0))
    prev = abs(float(y) / ref - 1.0)
    for _ in range(2):
        y = newton_step(y, np.float32(0.5) * np.float32(x))
        cur = abs(float(y) / ref - 1.0)
        assert cur <= 1.52 * prev * prev + 5e-7
        prev = cur


def test_domain_rejections():
    config = KernelConfig(CLASSIC_MAGIC, 1)
    for bad in (0.0, -1.0, float("inf"), float("nan"), 1e-45, 1e300):
        with pytest.raises(DomainError):
            invsqrt(bad, config)


def test_config_validation():
    with pytest.raises(ValueError):
        KernelConfig(CLASSIC_MAGIC, -1)
    with pytest.raises(ValueError):
        KernelConfig(1 << 32, 1)
    with pytest.raises(DomainError):
        KernelConfig(0x5F400000, 1)  # mantissa half or above
    relaxed = KernelConfig.relaxed(0x5F400000, 1)
    assert not relaxed.within_model_range
    assert magic_in_model_range(CLASSIC_MAGIC)
    assert not magic_in_model_range(0x3F800000)


def test_relaxed_magic_may_produce_out_of_range_seed():
    # a tiny constant drives the subtraction below the normal range
    config = KernelConfig.relaxed(0x00000001, 0)
    with pytest.raises(DomainError):
        invsqrt(1.0, config)
