"""Fast inverse square root: kernel, exact seed model, derived constants.

The package has four layers:

- floatbits: strict IEEE-754 single-precision bit manipulation,
- kernel: the classic bit-trick kernel, parameterized by the seed constant,
- model / derive: a closed-form model of the seed and the optimization that
  re-derives the best constants for each error objective,
- sweep / figures / cli: exhaustive bit-level verification and reporting.
"""
from .floatbits import (
    DomainError,
    FloatRepr,
    NormalizedInput,
    as_single,
    bits_to_float,
    decode,
    denormalize,
    encode,
    float_to_bits,
    normalize,
)
from .kernel import CLASSIC_MAGIC, KernelConfig, invsqrt, newton_step, seed_bits
from .model import (
    Region,
    SeedParam,
    absolute_error,
    absolute_error_extrema,
    classify,
    magic_from_t,
    relative_error,
    relative_error_extrema,
    t_from_magic,
    y00,
    y0_exact,
)
from .derive import (
    BracketError,
    DerivationResult,
    derive_all,
    grid_max_error,
    solve_abs_k0,
    solve_abs_k1,
    solve_abs_k2,
    solve_rel_k0,
    solve_rel_k1,
    solve_rel_k2,
    verify_rel_k2_matches_k1,
)
# The sweep() entry point itself stays on the submodule (fisr.sweep.sweep)
# so the fisr.sweep attribute keeps naming the module.
from .sweep import (
    ErrorReport,
    ScalingReport,
    SeedModelReport,
    SweepSpec,
    emit_cloud,
    verify_scaling,
    verify_seed_model,
)

__version__ = "0.1.0"

__all__ = [
    "CLASSIC_MAGIC",
    "BracketError",
    "DerivationResult",
    "DomainError",
    "ErrorReport",
    "FloatRepr",
    "KernelConfig",
    "NormalizedInput",
    "Region",
    "ScalingReport",
    "SeedModelReport",
    "SeedParam",
    "SweepSpec",
    "absolute_error",
    "absolute_error_extrema",
    "as_single",
    "bits_to_float",
    "classify",
    "decode",
    "denormalize",
    "derive_all",
    "emit_cloud",
    "encode",
    "float_to_bits",
    "grid_max_error",
    "invsqrt",
    "magic_from_t",
    "newton_step",
    "normalize",
    "relative_error",
    "relative_error_extrema",
    "seed_bits",
    "solve_abs_k0",
    "solve_abs_k1",
    "solve_abs_k2",
    "solve_rel_k0",
    "solve_rel_k1",
    "solve_rel_k2",
    "t_from_magic",
    "verify_rel_k2_matches_k1",
    "verify_scaling",
    "verify_seed_model",
    "y00",
    "y0_exact",
]
