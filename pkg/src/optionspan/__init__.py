"""Finite-market option spanning toolkit.

Exact call-ladder replication of claims written on one underlying,
order-closure verification for sublattices of claims, and LP-based
no-free-lunch pricing with certificates, all on finite (or discretized)
state spaces.
"""

from ._version import __version__
from .errors import (
    DegeneratePi,
    DimensionMismatch,
    EmptySequence,
    FreeLunchPresent,
    InvalidN,
    InvalidPricing,
    InvalidProbability,
    MalformedProgram,
    MissingOne,
    NegativeTarget,
    NegativeUnderlying,
    NonPositiveProbability,
    NotDeterminedByArbitrage,
    NotMeasurable,
    NumericalDegeneracy,
    OptionSpanError,
)
from .lattice import (
    SublatticeSpec,
    build_cell_indicators,
    closure_contains,
    sublattice_closure_partition,
    verify_green_jarrow,
    verify_order_closed_iff_sequential,
)
from .lp import LinearProgram, LPResult, SolverTolerances, solve
from .market import (
    Claim,
    FiniteMarket,
    Partition,
    build_market,
    conditional_expectation,
    is_measurable,
    market_from_dict,
    market_to_dict,
    sigma_of,
)
from .norms import (
    NormSpec,
    PairingBank,
    StatePriceDensity,
    YoungFunction,
    convergence_report,
    default_bank,
    norm,
    pair,
    parse_norm_spec,
    verify_mode_agreement,
)
from .options import (
    MembershipResult,
    OptionPortfolio,
    call,
    combine,
    is_in_span,
    payoff,
    portfolio_from_dict,
    portfolio_to_dict,
    put,
    z_identity_check,
    z_identity_report,
)
from .pricing import (
    FreeLunchCertificate,
    NFLResult,
    PriceBounds,
    PricingFunctional,
    check_positivity,
    extend_by_arbitrage,
    no_free_lunch,
    portfolio_price,
    price_bounds,
    pricing_from_dict,
    pricing_to_dict,
)
from .replication import (
    CompletionEntry,
    completion_demo,
    exact_replicate,
    indicator_ladder,
    ladder_sequence,
    simple_ladder,
    underlying_levels,
)
from .reports import ConvergenceReport, ConvergenceRow, VerificationReport

__all__ = [name for name in dir() if not name.startswith("_")]
