"""deltaprime: 1-D Schrodinger operators with delta-prime-like short-range potentials.

Computes the resonant couplings and coupling function of a compactly
supported profile, the reflection/transmission coefficients of the scaled
potentials alpha*eps^-2*psi(x/eps) and of their zero-range limit, and
verifies the limit empirically on discretized operators.
"""

from .convergence import (
    ConvergenceReport,
    DiscreteOperator,
    Grid,
    discretize_limit,
    discretize_seps,
    make_grid,
    resolvent_apply,
    study,
)
from .errors import (
    DeltaPrimeError,
    InvalidInputError,
    NearTangencyWarning,
    NotResonantError,
    NumericalFailureError,
)
from .profiles import (
    Moments,
    PotentialProfile,
    builtin_profile,
    from_samples,
    from_segments,
    load_profile,
    moments,
    save_profile,
)
from .resonance import (
    Classification,
    NonResonant,
    Resonant,
    ResonantValue,
    classify,
    coupling,
    find_resonances,
)
from .scattering import (
    ScatteringCoefficients,
    asymptotic_coeffs,
    finite_coeffs,
    limit_coeffs,
    q_factor,
)
from .shooting import FundamentalData, neumann_mismatch, shoot

__version__ = "0.1.0"

__all__ = [
    "Classification",
    "ConvergenceReport",
    "DeltaPrimeError",
    "DiscreteOperator",
    "FundamentalData",
    "Grid",
    "InvalidInputError",
    "Moments",
    "NearTangencyWarning",
    "NonResonant",
    "NotResonantError",
    "NumericalFailureError",
    "PotentialProfile",
    "Resonant",
    "ResonantValue",
    "ScatteringCoefficients",
    "asymptotic_coeffs",
    "builtin_profile",
    "classify",
    "coupling",
    "discretize_limit",
    "discretize_seps",
    "find_resonances",
    "finite_coeffs",
    "from_samples",
    "from_segments",
    "limit_coeffs",
    "load_profile",
    "make_grid",
    "moments",
    "neumann_mismatch",
    "q_factor",
    "resolvent_apply",
    "save_profile",
    "shoot",
    "study",
]
