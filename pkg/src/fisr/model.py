"""Closed-form model of the integer seed and its Newton-refined error.

The seed produced by `magic - (bits >> 1)` is, for magics whose float
decomposition has exponent 63 and fractional mantissa below 1/2, an exactly
known piecewise-linear function of the normalized input x in [1, 4).  The
natural parameter is

    t = 2 + 4*m_R + 2*mu/N_m

where m_R is the magic's fractional mantissa and mu in {0, 1} is the parity
of the input's integer mantissa (the bit dropped by the right shift).  All
evaluation here is double precision; the model is a mathematical object and
comparisons against the kernel quantize at the final step only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import List

from .floatbits import (
    EXPONENT_BIAS,
    MANTISSA_MASK,
    MANTISSA_SCALE,
    DomainError,
    decode,
    float_to_bits,
)
from .kernel import SEED_MODEL_EXPONENT, magic_in_model_range

# parity quantum: the t step between even and odd integer mantissas
PARITY_STEP = 2.0 / MANTISSA_SCALE

# bit patterns spanning the normalized interval [1, 4)
UNIT_LO_BITS = 0x3F800000
UNIT_MID_BITS = 0x40000000
UNIT_HI_BITS = 0x40800000


class Region(Enum):
    """The three seed intervals: [1,2), [2,t], (t,4)."""

    I = "I"
    II = "II"
    III = "III"


def _check_t(t: float) -> None:
    # zero mantissa gives t exactly 2; mantissa below 1/2 keeps t below 4
    if not 2.0 <= t < 4.0:
        raise DomainError(f"t={t!r} outside [2, 4)")


def classify(x_tilde: float, t: float) -> Region:
    """Region of x_tilde; the junction x_tilde == t belongs to region II."""
    _check_t(t)
    if not 1.0 <= x_tilde < 4.0:
        raise DomainError(f"x_tilde={x_tilde!r} outside [1, 4)")
    if x_tilde < 2.0:
        return Region.I
    if x_tilde <= t:
        return Region.II
    return Region.III


@dataclass(frozen=True)
class SeedParam:
    """A magic constant with its derived model parameters."""

    magic: int
    exponent: int        # always 63 within the model range
    mantissa_frac: float  # m_R < 1/2
    t_even: float        # 2 + 4*m_R, for even-mantissa inputs
    t_odd: float         # t_even + 2/N_m, for odd-mantissa inputs
    t_smooth: float      # single-t approximation; equals t_odd

    @classmethod
    def from_magic(cls, magic: int) -> "SeedParam":
        if not magic_in_model_range(magic):
            raise DomainError(
                f"magic {magic:#010x} outside the seed-model range "
                f"(needs exponent {SEED_MODEL_EXPONENT} and mantissa below 1/2)")
        r = decode(magic)
        t_even = 2.0 + 4.0 * r.mantissa_frac
        return cls(magic, r.exponent, r.mantissa_frac,
                   t_even, t_even + PARITY_STEP, t_even + PARITY_STEP)


def t_from_magic(magic: int, parity: str = "smooth") -> float:
    """Model parameter t for a magic constant.

    parity "even"/"odd" gives the exact per-parity value; "smooth" is the
    single-t approximation (identical to "odd").
    """
    p = SeedParam.from_magic(magic)
    if parity == "even":
        return p.t_even
    if parity == "odd":
        return p.t_odd
    if parity == "smooth":
        return p.t_smooth
    raise ValueError(f"parity must be even, odd or smooth, got {parity!r}")


def magic_from_t(t: float) -> int:
    """Magic constant nearest to a model parameter t.

    R = N_m*(63 + bias) + round(2^-2 * N_m * (t - 2) - 1/2) with round-half-up
    ties.  Ties never occur at the derived optima; the choice is documented
    here and isolated to this function.
    """
    _check_t(t)
    v = 2.0 ** 21 * (t - 2.0) - 0.5
    return (SEED_MODEL_EXPONENT + EXPONENT_BIAS) * MANTISSA_SCALE + math.floor(v + 0.5)


def y00(x_tilde: float, t: float) -> float:
    """Piecewise-linear seed model on [1, 4), continuous at 2 and at t."""
    region = classify(x_tilde, t)
    if region is Region.I:
        return -0.25 * (x_tilde - 0.5 * t - 3.0)
    if region is Region.II:
        return -0.125 * (x_tilde - t - 4.0)
    return -0.0625 * (x_tilde - t - 8.0)


def y0_exact(x_tilde: float, t_even: float, t_odd: float) -> float:
    """Exact seed value for a representable x_tilde in [1, 4).

    Selects t by the parity of x_tilde's integer mantissa and evaluates the
    piecewise model.  Every term is a dyadic rational of at most 30
    significant bits, so the double result is exact.
    """
    bits = float_to_bits(x_tilde)
    if not UNIT_LO_BITS <= bits < UNIT_HI_BITS:
        raise DomainError(f"x_tilde={x_tilde!r} not on the [1, 4) grid")
    t = t_odd if bits & 1 else t_even
    if x_tilde < 2.0:
        return -0.25 * (x_tilde - 0.5 * t - 3.0)
    if x_tilde <= t:
        return -0.125 * (x_tilde - t - 4.0)
    return -0.0625 * (x_tilde - t - 8.0)


def newton_error(delta_prev: float) -> float:
    """Relative error after one Newton step, -d^2 (3 + d) / 2.

    Non-positive for d >= -3; fixed points at 0 and -2.
    """
    return -0.5 * delta_prev * delta_prev * (3.0 + delta_prev)


def y0_refined(x_tilde: float, t: float, k: int) -> float:
    """Seed model refined by k Newton steps, y <- y*(3 - y^2 x)/2.

    Cross-check path for the error recursion; both must agree.
    """
    y = y00(x_tilde, t)
    for _ in range(k):
        y = 0.5 * y * (3.0 - y * y * x_tilde)
    return y


def relative_error(x_tilde: float, t: float, k: int = 0) -> float:
    """Model relative error sqrt(x)*y0k - 1 after k Newton steps."""
    d = math.sqrt(x_tilde) * y00(x_tilde, t) - 1.0
    for _ in range(k):
        d = newton_error(d)
    return d


def absolute_error(x_tilde: float, t: float, k: int = 0) -> float:
    """Model absolute error y0k - 1/sqrt(x) on the normalized interval."""
    return relative_error(x_tilde, t, k) / math.sqrt(x_tilde)


@dataclass(frozen=True)
class Extremum:
    """A candidate extremum of an error curve at fixed t."""

    location: float
    value: float
    kind: str  # "interior" or "boundary"


# Closed forms used by the balance equations.  The two interior maxima of the
# unrefined relative error and its global minimum (at the region II/III
# junction x = t) are the only candidates that ever bind the minimax.

def rel_interior_max_region1(t: float) -> float:
    """delta0 at its region-I stationary point (6+t)/6."""
    return -1.0 + 0.5 * (1.0 + t / 6.0) ** 1.5


def rel_interior_max_region2(t: float) -> float:
    """delta0 at its region-II stationary point (4+t)/3."""
    return -1.0 + 2.0 * 3.0 ** -1.5 * (1.0 + t / 4.0) ** 1.5


def rel_at_junction(t: float) -> float:
    """delta0 at x = t, the global minimum sqrt(t)/2 - 1 (negative on (2,4))."""
    return 0.5 * math.sqrt(t) - 1.0


def relative_error_extrema(t: float) -> List[Extremum]:
    """Interior maxima and boundary candidates of the unrefined relative error.

    Interior values are direct evaluations of the model at each stationary
    point.  Note the region-III interior maximum is close to, but not equal
    to, t/8 - 1/2 (that expression is the boundary value at x = 4, which the
    interior value exceeds by ~2e-4).
    """
    _check_t(t)
    interior = [(6.0 + t) / 6.0, (4.0 + t) / 3.0, (8.0 + t) / 3.0]
    out = [Extremum(x, relative_error(x, t, 0), "interior") for x in interior]
    boundary = [
        (1.0, t / 8.0 - 0.5),
        (2.0, math.sqrt(2.0) * (0.25 + t / 8.0) - 1.0),
        (t, rel_at_junction(t)),
        (4.0, t / 8.0 - 0.5),
    ]
    out.extend(Extremum(x, v, "boundary") for x, v in boundary)
    return out


def absolute_error_extrema(t: float) -> List[Extremum]:
    """Interior maxima and boundary candidates of the unrefined absolute error.

    The interior locations 2^(2/3), 2^(4/3) and 4 do not depend on t; the
    region-III stationary point coincides with the right boundary.
    """
    _check_t(t)
    x1, x2 = 2.0 ** (2.0 / 3.0), 2.0 ** (4.0 / 3.0)
    out = [
        Extremum(x1, 0.75 - 1.5 * 2.0 ** (-1.0 / 3.0) + t / 8.0, "interior"),
        Extremum(x2, 0.5 - 0.75 * 2.0 ** (1.0 / 3.0) + t / 8.0, "interior"),
        Extremum(4.0, t / 16.0 - 0.25, "interior"),
    ]
    boundary = [
        (1.0, t / 8.0 - 0.5),
        (2.0, t / 8.0 - (2.0 * math.sqrt(2.0) - 1.0) / 4.0),
        (t, 0.5 - 1.0 / math.sqrt(t)),
        (4.0, t / 16.0 - 0.25),
    ]
    out.extend(Extremum(x, v, "boundary") for x, v in boundary)
    return out


def abs_error_slope_k1(x: float, t: float, region: Region) -> float:
    """d/dx of the once-refined absolute error on regions I and II.

    A root in x locates the interior minimum of absolute_error(., t, 1).
    """
    _check_t(t)
    if region is Region.I:
        return (-75.0 / 128.0 - 27.0 * t / 256.0 - 9.0 * t ** 2 / 512.0
                - t ** 3 / 1024.0 + 1.0 / (2.0 * x ** 1.5)
                + 27.0 * x / 64.0 + 9.0 * t * x / 64.0 + 3.0 * t ** 2 * x / 256.0
                - 27.0 * x ** 2 / 128.0 - 9.0 * t * x ** 2 / 256.0
                + x ** 3 / 32.0)
    if region is Region.II:
        return (-0.25 - 3.0 * t / 64.0 - 3.0 * t ** 2 / 256.0
                - t ** 3 / 1024.0 + 1.0 / (2.0 * x ** 1.5)
                + 3.0 * x / 32.0 + 3.0 * t * x / 64.0 + 3.0 * t ** 2 * x / 512.0
                - 9.0 * x ** 2 / 256.0 - 9.0 * t * x ** 2 / 1024.0
                + x ** 3 / 256.0)
    raise ValueError("slope expression exists for regions I and II only")
