"""Exact simulation, closed-form solutions and analysis of the order-4k
rational recurrence u[n+4k] = u[n] / (A[n] + B[n] u[n] u[n+4] ... u[n+4k-4])."""
from .core import (
    ETA_FORM,
    U_FORM,
    IndexOutOfRange,
    Orbit,
    SequenceSpec,
    SystemSpec,
    ZeroDenominator,
    floor4,
    iterate,
    map_eta_index,
    map_u_index,
    parse_rational,
    render_rational,
    step,
    tau,
)
from .closed_form import (
    ClosedFormQuery,
    ComparisonReport,
    compare,
    eval_eta,
    eval_special_a1,
    eval_special_a_minus1,
    eval_u_constant,
    eval_u_general,
)
from .invariants import (
    InvariantSeries,
    SymmetryCertificate,
    ZeroFactor,
    check_r_recurrence,
    r_closed,
    r_from_orbit,
    symmetry_roots,
    u_from_r,
)
from .analysis import (
    char_roots_nonzero,
    char_roots_zero,
    classify,
    detect_period,
    equilibria,
    predict_period,
    theta_factors,
)

__version__ = "0.1.0"
