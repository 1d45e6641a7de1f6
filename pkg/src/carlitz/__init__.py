"""Exact arithmetic for the Carlitz module over function fields.

Computes, for rings of integers of Carlitz cyclotomic fields (and other
monogenic orders over k[t]), the zeta value sum(1/|R/I|), the lattice of
exponential preimages of the integral points with its regulator, and the
class module with its Fitting generator, then verifies the valuation
identity v(Reg * |H|) = 0 exactly and the class number formula
zeta = Reg * |H| to the working precision.
"""

from .classmod import ClassModule, class_module, euler_char_check
from .errors import (
    CarlitzError,
    DivergenceError,
    PrecisionError,
    RankError,
    ReconstructionError,
    StabilizationError,
)
from .expmap import (
    ExpCoeffs,
    LocalEmbedding,
    LogCoeffs,
    Window,
    ball_start,
    carlitz_period,
    convergence_threshold,
    exp_coefficients,
    exp_eval,
    exp_preimage_window,
    log_coefficients,
    log_eval,
)
from .ffield import GF, FiniteField
from .funcfield import (
    FunctionField,
    InfinitePlace,
    PrimeSplitting,
    build_cyclotomic,
    infinite_places,
    place_table,
    prime_ideals_up_to,
    rational_field,
    split_prime,
)
from .laurent import Laurent, format_series
from .lattice import (
    Lattice,
    RegulatorResult,
    UnitModule,
    integral_preimage_lattice,
    period_sublattice,
    regulator,
    saturate,
    unit_module,
)
from .normalforms import (
    FiniteTModule,
    charpoly,
    fitting_generator,
    hermite_form,
    invariant_factors,
    smith_form,
)
from .poly import (
    Poly,
    RatFunc,
    format_poly,
    irreducible_polys,
    is_irreducible,
    parse_poly,
    poly_factor,
    poly_gcd,
    poly_xgcd,
)
from .twisted import DrinfeldModule, TwistedPoly, twisted_mul
from .verify import VerificationReport, verify
from .windows import WindowContext
from .zeta import ZetaResult, zeta_direct_oracle, zeta_euler, zeta_value

__version__ = "0.1.0"
