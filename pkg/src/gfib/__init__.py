"""d-generalized Fibonacci numbers, exactly and through the renewal closed form."""

__version__ = "0.1.0"

from .closedform import ClosedFormValue, ErrorRecord, approx_value, error_term, fib_closed, required_precision
from .combinatorics import CompositionSet, composition_log_probability, count_compositions, enumerate_compositions
from .errors import (
    CertificationError,
    EnumerationCapError,
    GFibError,
    InvalidOrderError,
    PrecisionCeilingError,
    PrecisionRefinementRequired,
)
from .exact import BigIntegerSequence, fib_at, fib_sequence
from .interval import CertifiedReal, Verdict
from .renewal import (
    LifetimeDistribution,
    RenewalMass,
    SimulationReport,
    blackwell_rate_check,
    build_distribution,
    nbu_check,
    renewal_mass_dp,
    simulate_first_passage,
)
from .roots import (
    DerivedConstants,
    RootEnclosure,
    blackwell_constant,
    characteristic_residual,
    mean_lifetime,
    solve_q,
)
