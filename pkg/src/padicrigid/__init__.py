"""Exact-arithmetic rigidity and local Frobenius-structure toolkit.

Decides cohomological rigidity of regular-singular systems on the
projective line from local exponent data, checks the residue-disk /
integrality / rationality hypotheses at a prime, computes the Frobenius
power q = p^f with q = 1 (mod N), and constructs verified local
Frobenius structures on truncated Robba-ring models.
"""

from .padics import (
    INF,
    PadicNumber,
    Rational,
    denominator_lcm,
    is_p_integral,
    multiplicative_order,
    padic_valuation,
)
from .series import LaurentSeries, MatrixSeries, log_one_plus, matrix_exp
from .linalg import JordanType, MatrixQ, centralizer_dim, end_exponents, jordan_form
from .fuchsian import (
    FuchsianSystem,
    LocalData,
    SingularPoint,
    accessory_parameters,
    chi_p,
    cohomology_report,
    euler_char_c,
    local_h0,
    rigidity_index,
    validate_system,
)
from .conditions import check_c1, check_c3, frobenius_power, full_condition_report
from .frobenius import (
    BaseChangeResult,
    FrobLift,
    LocalModule,
    change_of_lifting,
    compose_results,
    connection_form,
    exponential_gauge,
    local_frobenius_structure,
    pullback_connection,
    rescaling_isomorphism,
    shift_isomorphism,
)

__version__ = "0.1.0"
