"""Exact-arithmetic engine for supercuspidal representations of the
metaplectic double cover of SL(2, Q_p): Whittaker functionals, Bessel
functions, local zeta functions, gamma factors, and the coefficient-exact
verification of their functional equation."""

from .exactnum import (
    CycValue,
    KElement,
    LaurentPoly,
    NEGATE_S,
    PadicContext,
    Q_NEG_S,
    Q_POS_S,
    S_TO_ONE_MINUS_S,
    laurent_substitute,
    q_half_power,
)
from .localchar import (
    AdditiveCharacter,
    MultChar,
    chi_psi,
    hilbert_symbol,
    hilbert_symbol_oracle,
    legendre,
    square_class_data,
    weil_alpha,
)
from .cover import (
    CosetDecomposition,
    MetaElement,
    SL2Element,
    chi_entry,
    cocycle,
    coset_decompose,
    kubota_split,
    meta_inv,
    meta_mul,
    validate_kubota_splitting,
)
from .repn import (
    EigenBasis,
    InducedVector,
    Representation,
    SigmaRep,
    builtin_sigma_p3,
    check_strongly_cuspidal,
    eigenbasis,
    sigma_from_dict,
)
from .zeta import (
    ADDITIVE_DX,
    MULTIPLICATIVE_DX,
    BesselTable,
    FEReport,
    GammaFactor,
    ShellIntegralPlan,
    StabilizationError,
    ZetaFunction,
    bessel_closed,
    bessel_direct,
    bessel_table,
    check_fe,
    fourier_inversion_check,
    gamma_coefficient,
    gamma_factor,
    improper_integral,
    integrate_ball,
    integrate_shell,
    zeta_function,
)

__version__ = "0.1.0"
