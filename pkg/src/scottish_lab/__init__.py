"""Desk-scale numerical lab for dyadic block norms, bilinear sign-form norms
of Hankel matrices, antidiagonal averaging operators, and flat-polynomial
witness constructions."""

from .core import (
    BlockIndex,
    CoeffSeq,
    DenseMatrix,
    HankelSymbol,
    block_of,
    derive_seed,
    hankel_matrix,
    hard_block,
    least_squares_line,
    limit_estimate,
    make_rng,
    multiplier_support,
    read_coeff_csv,
    read_matrix_csv,
    write_coeff_csv,
    write_matrix_csv,
)
from .dyadic import (
    DyadicProfile,
    besov_detail,
    besov_norm,
    dyadic_kernel,
    dyadic_profile,
    hard_block_bound,
    lp_norm_circle,
    lp_norm_detail,
    paley_diagnostic,
)
from .extremal import (
    DecayWitnessParams,
    FlatPolyReport,
    MajorantReport,
    MomentReport,
    assemble_majorant,
    flat_polynomial,
    problem88_witness,
    psi,
    rudin_shapiro,
    weighted_moment,
)
from .mazur import (
    RangeDiagnostic,
    WitnessReport,
    antidiagonal_average,
    cesaro_product,
    problem8_witness,
    range_diagnostic,
)
from .tensornorm import (
    NormBracket,
    SignVector,
    injective_norm_exact,
    injective_norm_search,
    projective_bracket,
    v2_profile,
)

__version__ = "0.1.0"

__all__ = [
    "BlockIndex",
    "CoeffSeq",
    "DecayWitnessParams",
    "DenseMatrix",
    "DyadicProfile",
    "FlatPolyReport",
    "HankelSymbol",
    "MajorantReport",
    "MomentReport",
    "NormBracket",
    "RangeDiagnostic",
    "SignVector",
    "WitnessReport",
    "antidiagonal_average",
    "assemble_majorant",
    "besov_detail",
    "besov_norm",
    "block_of",
    "cesaro_product",
    "derive_seed",
    "dyadic_kernel",
    "dyadic_profile",
    "flat_polynomial",
    "hankel_matrix",
    "hard_block",
    "hard_block_bound",
    "injective_norm_exact",
    "injective_norm_search",
    "least_squares_line",
    "limit_estimate",
    "lp_norm_circle",
    "lp_norm_detail",
    "make_rng",
    "multiplier_support",
    "paley_diagnostic",
    "problem88_witness",
    "problem8_witness",
    "projective_bracket",
    "psi",
    "range_diagnostic",
    "read_coeff_csv",
    "read_matrix_csv",
    "rudin_shapiro",
    "v2_profile",
    "weighted_moment",
    "write_coeff_csv",
    "write_matrix_csv",
]
