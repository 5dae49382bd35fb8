"""Numerical engine and verification suite for the dual-convolution
Banach algebra of trace-class kernels over the multiplicative group."""

from ._intervals import EMPTY, IntervalSet, interval
from .coefficients import (
    CoefficientFunction,
    GroupElement,
    check_fusion,
    check_intertwine_Pe,
    check_parity_vanishing,
    check_pdiag_homomorphism,
    check_W_isometry,
    coeff_eval,
    group_inv,
    group_mul,
    lambda_isometry_integral,
    parse_samples,
    pi_act,
    rho_isometry_integral,
    v_isometry_integral,
)
from .convolution import (
    LazyDCKernel,
    bochner_h_grid,
    bochner_h_support,
    bochner_term_at,
    check_associative,
    check_commutative,
    dc_bochner_terms,
    dc_kernel,
    dc_kernel_hform,
    triple_product_direct,
    u_support,
)
from .derivation import (
    BilinearFormValue,
    check_derivation_identity,
    check_phi_antisymmetry,
    check_phi_l2_bound,
    phi_kernel_2d,
    phi_pairing,
    phi_rank_one,
)
from .errors import (
    ConfigError,
    DegenerateDilation,
    InvalidExponent,
    ModeMismatch,
    NonConvergence,
    ParityUndefined,
)
from .families import (
    generate_family,
    generate_tensors,
    sample_group_elements,
    sample_points,
)
from .functions import (
    HaarFunction,
    conjugate,
    dilate,
    gauss_log,
    haar_integral,
    hat,
    indicator,
    invert_variable,
    lp_norm,
    pairing,
    parity_project,
    parse_function,
    pointwise_product,
    reflect,
    right_dilate,
    scaled_product_integral,
    sign_multiply,
    zero_function,
)
from .kernels import (
    FiniteRankKernel,
    RankOneTensor,
    finite_rank,
    kernel_eval,
    l2_kernel_norm,
    parity_compress,
    parse_kernel,
    rank_one,
    transpose_predual,
)
from .lp import (
    check_gamma_ratios,
    dc_bilinear_smoke,
    gamma_function,
    gamma_ratio_table,
    vp_isometry_check,
)
from .quadrature import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    integrate_adaptive,
    integrate_log,
    integrate_log_2d,
)
from .report import Report, combine_reports, make_report

__version__ = "0.1.0"
